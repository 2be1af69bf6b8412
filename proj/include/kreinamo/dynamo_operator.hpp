#pragma once

#include "kreinamo/profiles.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <vector>

namespace kreinamo {

enum class BoundaryKind { PhysicalVacuum, IdealizedDirichlet, BoxDirichlet };

/// Boundary regime plus angular mode number l. PhysicalVacuum and
/// IdealizedDirichlet live on [0, 1]; BoxDirichlet on [0, X].
struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::IdealizedDirichlet;
    int l = 0;
    double X = 1.0;

    static BoundarySpec vacuum(int l) { return {BoundaryKind::PhysicalVacuum, l, 1.0}; }
    static BoundarySpec dirichlet(int l) { return {BoundaryKind::IdealizedDirichlet, l, 1.0}; }
    static BoundarySpec box(int l, double X) { return {BoundaryKind::BoxDirichlet, l, X}; }

    double length() const { return kind == BoundaryKind::BoxDirichlet ? X : 1.0; }
    void validate() const;
};

const char* to_string(BoundaryKind kind);

struct Grid {
    double h = 0.0;
    std::vector<double> nodes;  // r_i = i·h for the unknowns of the u₁ block
};

/// Finite-difference image of the 2×2 dynamo operator
///
///     [ −Q[1]   α    ]
///     [ Q[α]   −Q[1] ]
///
/// with Q[α] = −∂ α ∂ + α l(l+1)/r². The u₁ block comes first. Under
/// PhysicalVacuum u₁ also carries the boundary node r = 1, so the matrix has
/// dimension 2M + 1; otherwise both blocks hold the M interior nodes.
struct DiscreteOperator {
    Eigen::MatrixXd matrix;
    Grid grid;
    BoundarySpec bc;
    AlphaProfile profile;
    int u1_size = 0;
    int u2_size = 0;
};

/// Second-order flux-form assembly on r_i = i·h, h = R/(M+1).
DiscreteOperator assemble(const AlphaProfile& profile, const BoundarySpec& bc, int M);

/// max |(J A) − (J A)ᵀ| for the block swap J = [[0, I], [I, 0]]. Only defined
/// when both blocks have equal size (Dirichlet-type regimes).
double krein_symmetry_defect(const DiscreteOperator& op);

/// Discrete T = −∂² + l(l+1)/x² − α²/2 + 1/2 with Dirichlet ends on (0, X),
/// as a symmetric tridiagonal matrix (diagonal, off-diagonal).
struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd dense() const;
};

Tridiagonal assemble_kinetic(const SolitonProfile& profile, int l, double X, int M);

/// +1 selects F₊ (the pencil T − ϵα − ϵ²), −1 selects F₋ (T + ϵα − ϵ²).
enum class PencilSign : int { Plus = 1, Minus = -1 };

/// First-companion form [[0, I], [T, ∓diag(α)]] of the quadratic pencil
/// (T ∓ ϵα − ϵ²)F = 0; its eigenvalues are the pencil's ϵ and its
/// eigenvectors stack (F, ϵF).
struct PencilLinearization {
    Eigen::MatrixXd matrix;
    PencilSign sign = PencilSign::Plus;
    int l = 0;
    double X = 0.0;
    SolitonProfile profile;
    Grid grid;
    Tridiagonal kinetic;
    Eigen::VectorXd alpha;  // α at the grid nodes
};

PencilLinearization assemble_pencil(PencilSign sign, const SolitonProfile& profile, int l,
                                    double X, int M);

/// λ = 1/2 − ϵ².
std::complex<double> lambda_from_epsilon(std::complex<double> epsilon);

/// Plain-text dense dump: one row per line, whitespace-separated.
void write_dense(std::ostream& os, const Eigen::MatrixXd& matrix);

}  // namespace kreinamo
