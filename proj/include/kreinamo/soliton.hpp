#pragma once

#include "kreinamo/dynamo_operator.hpp"
#include "kreinamo/eig.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kreinamo {

/// Soliton profile in the rescaled coordinate, α(x) = 2/cosh(x − x0).
inline SolitonProfile unit_soliton(double x0, double strength = 1.0) {
    return SolitonProfile{1.0, x0, strength};
}

struct PencilMode {
    Complex epsilon;
    Complex lambda;               // 1/2 − ϵ²
    Eigen::VectorXcd F;           // scaled to unit max modulus
    double tail_mass = 0.0;       // fraction of ∫|F|² beyond x0 + 5
    bool localized = false;       // tail_mass < 0.5
    bool near_jordan = false;     // |ϵ| ≤ 1e−8; no eigenfunction claims
    bool physical = false;        // principal branch: Re ϵ > 0
};

struct PencilSpectrum {
    PencilSign sign = PencilSign::Plus;
    int l = 0;
    double x0 = 0.0, X = 0.0;
    int M = 0;
    Grid grid;
    std::vector<PencilMode> modes;  // sorted by descending Re λ
};

struct PencilOptions {
    bool eigenfunctions = true;
    bool enforce_density = true;  // require ≥ 20 nodes per unit length and X > x0 + 5
    double strength = 1.0;        // soliton amplitude factor; 0 is the empty box
};

/// Eigensolve of the companion linearization. Eigenfunctions come from inverse
/// iteration on the tridiagonal T ∓ ϵα − ϵ² at each computed ϵ.
PencilSpectrum pencil_spectrum(PencilSign sign, int l, double x0, double X, int M,
                               const PencilOptions& opt = {});

/// Lowest eigenvalue of the real symmetric tridiagonal T ∓ ϵ diag(α) − ϵ² I.
double pencil_ground_level(const Tridiagonal& T, const Eigen::VectorXd& alpha, PencilSign sign,
                           double epsilon);

/// Real ϵ ∈ (−1/√2, 1/√2) at which the ground level vanishes, ascending.
/// Zeros of excited levels (further λ > 0 pencil modes) are not included.
std::vector<double> bound_state_epsilons(const Tridiagonal& T, const Eigen::VectorXd& alpha,
                                         PencilSign sign);

struct BoundStateSample {
    double x0 = 0.0;
    double lambda = 0.0;
    double epsilon = 0.0;
    bool localized = true;  // tail mass of the ground state below 0.5
};

struct BoundStateBranch {
    int l = 0;
    double X = 0.0;
    int M = 0;
    std::vector<BoundStateSample> samples;
    std::optional<double> x_J;
    int epsilon_sign_changes = 0;
    std::string truncation;  // why the branch does not cover the full range
};

struct BranchOptions {
    double x0_min = 0.1;
    double x0_max = 20.0;
    int samples = 60;
    double x_J_tolerance = 1e-4;
};

/// Follows the + pencil bound state across x0 by continuity in ϵ and locates
/// x_J, where ϵ passes through zero (λ reaches 1/2).
BoundStateBranch bound_state_branch(int l, double X, int M, const BranchOptions& opt = {});

/// x0 at which T has a zero eigenvalue, bracketed in [lo, hi].
double locate_jordan_point(int l, double X, int M, double lo, double hi, double tolerance);

struct JordanReport {
    double x_J = 0.0;
    Eigen::VectorXd xi0, xi1;
    double kernel_residual = 0.0;       // ‖T Ξ₀‖ / ‖Ξ₀‖
    double kernel_relative = 0.0;       // kernel_residual / ‖T‖∞
    double xi1_residual = 0.0;          // ‖T Ξ₁ − P b‖ / ‖P b‖ after kernel projection
    double rhs_kernel_component = 0.0;  // ⟨Ξ₀, b⟩ / ‖b‖ removed by the projection
};

/// Solves (∂² − V₀)Ξ₀ = 0 and (∂² − V₀)Ξ₁ = V₁Ξ₀ at the Jordan configuration,
/// with V₀ = l(l+1)/x² − (α² − 1)/2 and V₁ = −α.
JordanReport jordan_system_solve(int l, double x0, double X, int M);

struct Superpotential {
    int l = 0;
    double x0 = 0.0, X = 0.0;
    Grid grid;
    Eigen::VectorXd w;             // u'/u at grid nodes
    std::vector<int> u_sign;       // sign of u at grid nodes
    std::vector<double> zeros;     // interpolated zeros of u
    std::vector<int> singular;     // node i with a zero of u in (x_i, x_{i+1})
};

/// Integrates T u = 0 from x ≈ 0 with u ~ x^{l+1} (Dormand–Prince) and
/// samples w = u'/u on the grid x_i = i·X/(M+1).
Superpotential superpotential(int l, double x0, double X, int M, double strength = 1.0);

struct DiracResidual {
    double value = 0.0;
    bool reliable = true;
    double excluded_fraction = 0.0;  // share of F's support dropped near singular w
};

/// ‖γ∂Ψ + VΨ − ϵΨ‖₂ / ‖Ψ‖₂ with Ψ = (F, ϵ⁻¹LF), L = −∂ + w by centered
/// differences, excluding nodes within `exclusion` of zeros of u.
DiracResidual dirac_residual(double epsilon, const Eigen::VectorXd& F, PencilSign sign,
                             const Superpotential& w, double exclusion = 1.0);

}  // namespace kreinamo
