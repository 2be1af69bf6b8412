#pragma once

#include "kreinamo/dynamo_operator.hpp"
#include "kreinamo/eig.hpp"
#include "kreinamo/soliton.hpp"

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace kreinamo {

using ProfileFamily = std::function<AlphaProfile(double)>;
using ProfileFamily2D = std::function<AlphaProfile(double, double)>;

struct BranchSample {
    double param = 0.0;
    Complex lambda;
    int M = 0;
    bool is_real = true;
};

struct Branch {
    int id = 0;
    std::vector<BranchSample> points;  // strictly increasing param
};

struct SweepOptions {
    int track_count = 8;          // leading eigenvalues (by Re λ) at the first parameter
    double jump_fraction = 0.05;  // of the local spectral spacing
    int max_depth = 4;
    int workers = 1;
};

struct SweepResult {
    std::vector<Branch> branches;
    std::vector<std::pair<double, double>> exhausted;  // intervals still jumping at the depth cap
    BoundarySpec bc;
    int M = 0;
    double lo = 0.0, hi = 0.0;
    int solves = 0;
};

SweepResult sweep(const ProfileFamily& family, double lo, double hi, int steps,
                  const BoundarySpec& bc, int M, const SweepOptions& opt = {});

/// All eigenvalues of the assembled operator, sorted by descending Re λ.
std::vector<Complex> operator_spectrum(const AlphaProfile& profile, const BoundarySpec& bc, int M);

struct BranchPoint {
    int order = 2;
    double param_1 = 0.0;
    std::optional<double> param_2;
    Complex lambda;
    std::vector<int> branch_ids;  // −1 marks a partner outside the tracked set
    double residual = 0.0;
};

struct DetectOptions {
    double realness_tolerance = kRealTolerance;
    double parameter_tolerance = 1e-6;  // fraction of the sweep range
};

struct DetectResult {
    std::vector<BranchPoint> points;
    std::vector<std::pair<double, double>> flagged;  // bracket failures
};

/// Locates real↔complex transitions along the swept branches by bisection on
/// the parameter. The eigenvalue is the midpoint of the merging pair; the
/// residual is the pair's separation at the final bracket.
DetectResult detect_branch_points(const SweepResult& sweep, const ProfileFamily& family,
                                  const DetectOptions& opt = {});

/// Smallest d₁₂ + d₁₃ + d₂₃ over triples among the `candidates` leading
/// eigenvalues; the minimizing triple goes to `cluster` when given.
double coalescence_objective(const std::vector<Complex>& spectrum, int candidates,
                             std::array<Complex, 3>* cluster = nullptr);

struct TripleSearchOptions {
    double zeta_lo = 0.3, zeta_hi = 0.6;
    double C_lo = 0.7, C_hi = 1.0;
    int grid = 11;
    int candidates = 8;
    int starts = 3;     // best grid cells refined by Nelder–Mead
    int restarts = 3;
    int max_evaluations = 300;
    double x_tolerance = 1e-9;  // Nelder–Mead simplex diameter; t scales like its cube root
    double threshold = 1e-2;    // τ₃ relative to |λ|
    int workers = 1;
};

struct TripleResult {
    bool found = false;
    BranchPoint point;  // order 3, params (ζ, C), residual t
    std::array<Complex, 3> cluster{};
    double relative_residual = 0.0;  // t / |λ|
    int evaluations = 0;
};

TripleResult find_triple_point(const ProfileFamily2D& family, const BoundarySpec& bc, int M,
                               const TripleSearchOptions& opt = {});

/// Nelder–Mead from a known (ζ, C), e.g. to carry a coarse-grid result to a finer M.
TripleResult refine_triple_point(const ProfileFamily2D& family, double zeta, double C,
                                 const BoundarySpec& bc, int M, const TripleSearchOptions& opt = {});

struct CuspReport {
    std::vector<double> C;
    std::vector<double> max_im;  // max |Im λ| of the three eigenvalues nearest the triple
    double left_slope = 0.0, right_slope = 0.0;
    double smooth_variation = 0.0;  // largest slope change away from the centre
    bool is_cusp = false;
};

/// Slice in C through (ζ, C_centre) with 2·half_samples + 1 points.
CuspReport cusp_diagnostic(const ProfileFamily2D& family, double zeta, double C_centre,
                           Complex lambda_centre, double half_width, int half_samples,
                           const BoundarySpec& bc, int M, int workers = 1);

struct CutoffOptions {
    double density = 20.0;  // nodes per unit length
    double overlap_threshold = 0.8;
    int workers = 1;
};

struct CutoffMode {
    PencilSign sign = PencilSign::Plus;
    int n = 1;
    std::vector<Complex> lambda;    // one per X
    std::vector<Complex> epsilon;
    std::vector<double> overlap;    // with the previous X on [0, min X]
    std::vector<bool> localized;
    bool identity_lost = false;
    std::optional<double> exponent; // decaying modes only
    double max_relative_variation = 0.0;
};

struct CutoffTable {
    int l = 0;
    SolitonProfile profile;
    std::vector<double> X;
    std::vector<int> M;
    std::vector<CutoffMode> modes;
};

/// Per pencil sign, the `mode_count` leading modes with real ϵ > 0 followed
/// across the X list.
CutoffTable cutoff_study(const SolitonProfile& profile, int l, const std::vector<double>& X,
                         int mode_count, const CutoffOptions& opt = {});

}  // namespace kreinamo
