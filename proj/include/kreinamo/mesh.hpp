#pragma once

#include "kreinamo/eig.hpp"
#include "kreinamo/profiles.hpp"

#include <array>
#include <optional>
#include <vector>

namespace kreinamo {

/// Riccati–Bessel function S_l(x) = x j_l(x) = √(πx/2) J_{l+1/2}(x);
/// S_{−1}(x) = cos x. Series for small x, upward recurrence otherwise.
double riccati_bessel(int l, double x);
double riccati_bessel_derivative(int l, double x);

/// Dirichlet eigenmode of Q[1] on [0, 1]:
/// u_n(r) = N_n r^{1/2} J_{l+1/2}(√ρ_n r), N_n = √2 / J_{l+3/2}(√ρ_n).
struct RadialMode {
    int n = 1;
    int l = 0;
    double sqrt_rho = 0.0;
    double norm = 0.0;  // N_n

    double rho() const { return sqrt_rho * sqrt_rho; }
    double value(double r) const;
    double derivative(double r) const;
};

/// First `count` roots of J_{l+1/2}, increasing.
std::vector<RadialMode> radial_modes(int l, int count);

/// λ_n^ε(α₀) = −ρ_n + ε α₀ √ρ_n.
double mesh_eigenvalue(const RadialMode& mode, int krein_sign, double alpha0);
double mesh_eigenvalue(int n, int krein_sign, int l, double alpha0);

/// One branch λ_n^ε of the unperturbed mesh.
struct MeshBranch {
    int n = 1;
    int l = 0;
    int krein_sign = 1;
    double sqrt_rho = 0.0;

    double at(double alpha0) const { return -sqrt_rho * sqrt_rho + krein_sign * alpha0 * sqrt_rho; }
};

/// Crossing of branches (n, ε) and (m, δ).
struct DiabolicalPoint {
    int n = 1, eps = 1;
    int m = 1, delta = 1;
    int l = 0;
    double alpha0_c = 0.0;  // ε√ρ_n + δ√ρ_m
    double lambda0 = 0.0;   // εδ√(ρ_n ρ_m)
    bool same_type = false;
    std::optional<int> parabola;  // l = 0 only: n+m (opposite), |n−m| (same)
};

struct DpWindow {
    double alpha_min = -1e300;
    double alpha_max = 1e300;
};

std::vector<DiabolicalPoint> diabolical_points(int l, int n_max, DpWindow window = {});

/// The perturbation shape φ(r) = constant + Σ terms.
struct Perturbation {
    double constant = 0.0;
    std::vector<FourierTerm> terms;

    double operator()(double r) const;
    static Perturbation uniform() { return {1.0, {}}; }
    static Perturbation cosine(int k) { return {0.0, {{FourierKind::Cos, k, 1.0}}}; }
    static Perturbation sine(int k) { return {0.0, {{FourierKind::Sin, k, 1.0}}}; }
};

/// α₀ + amplitude·φ as an evaluable profile.
FourierProfile perturbed_profile(double alpha0, const Perturbation& phi, double amplitude);

struct QuadratureOptions {
    int panels = 64;
    int points = 8;  // Gauss–Legendre points per panel
    double tolerance = 1e-8;
    int max_doublings = 8;
};

/// [𝔅u_m^δ, u_n^ε] = ∫₀¹ φ [(εδ√(ρ_nρ_m) + l(l+1)/r²) u_m u_n + u_m' u_n'] dr.
double krein_product_B(const Perturbation& phi, const RadialMode& mode_m, int delta,
                       const RadialMode& mode_n, int eps, const QuadratureOptions& opt = {});

struct Unfolding {
    std::array<Complex, 2> lambda1;      // first-order corrections
    std::array<Complex, 2> predicted;    // λ₀ + amplitude·λ₁
    double discriminant = 0.0;
    bool complex_split = false;
    double b_nn = 0.0, b_mm = 0.0, b_nm = 0.0;
};

/// Roots of λ₁² − λ₁(ε b_nn/(2√ρ_n) + δ b_mm/(2√ρ_m))
///          + εδ (b_nn b_mm − b_nm²)/(4√(ρ_nρ_m)) = 0.
Unfolding dp_unfold(const DiabolicalPoint& dp, const Perturbation& phi, double amplitude,
                    const QuadratureOptions& opt = {});

/// The two discrete eigenvalues that emanate from a DP of the assembled
/// IdealizedDirichlet operator under α₀ᶜ + amplitude·φ. The discrete DP
/// location is taken from the discrete Q[1] spectrum, so discretization
/// shifts of the unperturbed mesh do not pollute the splitting.
struct ObservedSplit {
    std::array<Complex, 2> values;
    Complex lambda0_discrete;
    double alpha0_discrete = 0.0;
    Complex split;  // values[0] − values[1], ordered by descending Im then Re
};

ObservedSplit observe_split(const DiabolicalPoint& dp, const Perturbation& phi, double amplitude,
                            int M);

struct ResonanceRow {
    DiabolicalPoint dp;
    Unfolding prediction;
    std::optional<ObservedSplit> observed_plus;
    std::optional<ObservedSplit> observed_minus;
};

struct ResonanceOptions {
    int n_max = 6;
    double amplitude = 0.05;
    int M = 400;
    bool observe = true;
    int workers = 1;
    DpWindow window;
};

/// First-order and observed DP displacements for every l = 0 DP with indices
/// ≤ n_max under φ, grouped by parabola index.
std::vector<ResonanceRow> resonance_scan(const Perturbation& phi, const ResonanceOptions& opt);

}  // namespace kreinamo
