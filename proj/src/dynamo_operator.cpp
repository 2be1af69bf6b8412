#include "kreinamo/dynamo_operator.hpp"

#include "kreinamo/error.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace kreinamo {

namespace {

constexpr int kMinNodes = 8;

/// Rows of Q[a] for nodes 1..rows against columns 1..cols (cols ≥ rows);
/// couplings to nodes outside 1..cols are dropped (Dirichlet).
template <class Coef>
void add_flux_block(Eigen::Ref<Eigen::MatrixXd> block, const std::vector<double>& nodes,
                    double h, int l, double sign, Coef&& coef) {
    const int rows = static_cast<int>(block.rows());
    const int cols = static_cast<int>(block.cols());
    const double L = static_cast<double>(l) * (l + 1);
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < rows; ++i) {
        const double r = nodes[i];
        const double a_minus = coef(r - 0.5 * h);
        const double a_plus = coef(r + 0.5 * h);
        block(i, i) += sign * ((a_minus + a_plus) * inv_h2 + coef(r) * L / (r * r));
        if (i > 0) block(i, i - 1) += sign * (-a_minus * inv_h2);
        if (i + 1 < cols) block(i, i + 1) += sign * (-a_plus * inv_h2);
    }
}

}  // namespace

void BoundarySpec::validate() const {
    if (l < 0) throw InputError("angular mode number l must be non-negative");
    if (kind == BoundaryKind::BoxDirichlet && !(X > 0.0 && std::isfinite(X))) {
        throw InputError("box length X must be positive");
    }
}

const char* to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::PhysicalVacuum:
        return "vacuum";
    case BoundaryKind::IdealizedDirichlet:
        return "dirichlet";
    case BoundaryKind::BoxDirichlet:
        return "box";
    }
    return "?";
}

DiscreteOperator assemble(const AlphaProfile& profile, const BoundarySpec& bc, int M) {
    bc.validate();
    if (M < kMinNodes) throw InputError("grid needs at least 8 interior nodes");
    const double R = bc.length();
    if (R > domain_end(profile) * (1.0 + 1e-12)) {
        throw InputError("profile domain [0, " + std::to_string(domain_end(profile)) +
                         "] does not cover the boundary regime's domain");
    }

    const double h = R / (M + 1);
    const bool vacuum = bc.kind == BoundaryKind::PhysicalVacuum;
    const int n1 = vacuum ? M + 1 : M;
    const int n2 = M;

    DiscreteOperator op;
    op.bc = bc;
    op.profile = profile;
    op.u1_size = n1;
    op.u2_size = n2;
    op.grid.h = h;
    op.grid.nodes.resize(n1);
    for (int i = 0; i < n1; ++i) op.grid.nodes[i] = (i + 1) * h;
    // The boundary node sits exactly on r = R.
    if (vacuum) op.grid.nodes.back() = R;

    const auto alpha = [&](double r) {
        const double v = evaluate(profile, r);
        if (!std::isfinite(v)) throw InputError("profile value is not finite");
        return v;
    };
    const auto one = [](double) { return 1.0; };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    add_flux_block(A.block(0, 0, n1, n1), op.grid.nodes, h, bc.l, -1.0, one);
    if (vacuum) {
        // Ghost node u_{N+1} = u_{N−1} − 2h·l·u_N from the centered mixed condition
        // u' + l u = 0 at r = 1, folded into the last −Q[1] row.
        const double inv_h2 = 1.0 / (h * h);
        A(n1 - 1, n1 - 2) += -(-inv_h2);
        A(n1 - 1, n1 - 1) += -(2.0 * h * bc.l * inv_h2);
    }
    for (int i = 0; i < n2; ++i) A(i, n1 + i) = alpha(op.grid.nodes[i]);
    add_flux_block(A.block(n1, 0, n2, n1), op.grid.nodes, h, bc.l, 1.0, alpha);
    add_flux_block(A.block(n1, n1, n2, n2), op.grid.nodes, h, bc.l, -1.0, one);

    op.matrix = std::move(A);
    return op;
}

double krein_symmetry_defect(const DiscreteOperator& op) {
    if (op.u1_size != op.u2_size) {
        throw InputError("Krein symmetry check needs equal block sizes (Dirichlet-type regime)");
    }
    const int n = op.u1_size;
    Eigen::MatrixXd JA(2 * n, 2 * n);
    JA.topRows(n) = op.matrix.bottomRows(n);
    JA.bottomRows(n) = op.matrix.topRows(n);
    return (JA - JA.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd Tridiagonal::apply(const Eigen::VectorXd& v) const {
    const Eigen::Index n = diag.size();
    Eigen::VectorXd out = diag.cwiseProduct(v);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        out(i) += off(i) * v(i + 1);
        out(i + 1) += off(i) * v(i);
    }
    return out;
}

Eigen::MatrixXd Tridiagonal::dense() const {
    const Eigen::Index n = diag.size();
    Eigen::MatrixXd T = diag.asDiagonal();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        T(i, i + 1) = off(i);
        T(i + 1, i) = off(i);
    }
    return T;
}

Tridiagonal assemble_kinetic(const SolitonProfile& profile, int l, double X, int M) {
    if (l < 0) throw InputError("angular mode number l must be non-negative");
    if (M < kMinNodes) throw InputError("grid needs at least 8 interior nodes");
    if (!(X > 0.0)) throw InputError("box length X must be positive");
    const double h = X / (M + 1);
    const double L = static_cast<double>(l) * (l + 1);
    Tridiagonal T;
    T.diag.resize(M);
    T.off = Eigen::VectorXd::Constant(M - 1, -1.0 / (h * h));
    for (int i = 0; i < M; ++i) {
        const double x = (i + 1) * h;
        const double a = evaluate(profile, x);
        T.diag(i) = 2.0 / (h * h) + L / (x * x) - 0.5 * a * a + 0.5;
    }
    return T;
}

PencilLinearization assemble_pencil(PencilSign sign, const SolitonProfile& profile, int l,
                                    double X, int M) {
    if (!(X > profile.x0)) throw InputError("pencil box must extend beyond the soliton peak");
    PencilLinearization p;
    p.kinetic = assemble_kinetic(profile, l, X, M);
    p.sign = sign;
    p.l = l;
    p.X = X;
    p.profile = profile;
    p.grid.h = X / (M + 1);
    p.grid.nodes.resize(M);
    p.alpha.resize(M);
    for (int i = 0; i < M; ++i) {
        p.grid.nodes[i] = (i + 1) * p.grid.h;
        p.alpha(i) = evaluate(profile, p.grid.nodes[i]);
    }
    const double s = static_cast<double>(static_cast<int>(sign));
    p.matrix = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    p.matrix.topRightCorner(M, M).setIdentity();
    p.matrix.bottomLeftCorner(M, M) = p.kinetic.dense();
    p.matrix.bottomRightCorner(M, M).diagonal() = -s * p.alpha;
    return p;
}

std::complex<double> lambda_from_epsilon(std::complex<double> epsilon) {
    return 0.5 - epsilon * epsilon;
}

void write_dense(std::ostream& os, const Eigen::MatrixXd& matrix) {
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            if (j) os << ' ';
            os << matrix(i, j);
        }
        os << '\n';
    }
}

}  // namespace kreinamo
