#include "doctest.h"

#include "kreinamo/dynamo_operator.hpp"
#include "kreinamo/eig.hpp"
#include "kreinamo/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace kreinamo;

namespace {

Complex nearest(const std::vector<Complex>& values, Complex target) {
    return *std::min_element(values.begin(), values.end(), [&](Complex a, Complex b) {
        return std::abs(a - target) < std::abs(b - target);
    });
}

// S_l(x) = x j_l(x) and its derivative.
double S(int l, double x) { return x * std::sph_bessel(l, x); }
double dS(int l, double x) {
    const double j = std::sph_bessel(l, x);
    const double dj = (l == 0 ? -std::sph_bessel(1, x) : std::sph_bessel(l - 1, x) - (l + 1) / x * j);
    return j + x * dj;
}

// Constant α, vacuum closure: u₁ = Σ a_i S(k_i r), u₂ = Σ a_i c_i S(k_i r) with
// λ = −k² ± αk and c_i = (λ + k_i²)/α; zero of the 2×2 boundary determinant.
double vacuum_determinant(double lambda, double alpha, int l) {
    const double s = std::sqrt(alpha * alpha - 4.0 * lambda);
    const double k1 = std::abs(0.5 * (alpha + s)), k2 = std::abs(0.5 * (alpha - s));
    const double c1 = (lambda + k1 * k1) / alpha, c2 = (lambda + k2 * k2) / alpha;
    return c1 * S(l, k1) * (k2 * dS(l, k2) + l * S(l, k2)) - c2 * S(l, k2) * (k1 * dS(l, k1) + l * S(l, k1));
}

double secant_root(double a, double b, double alpha, int l) {
    double fa = vacuum_determinant(a, alpha, l), fb = vacuum_determinant(b, alpha, l);
    for (int i = 0; i < 60 && std::abs(b - a) > 1e-13 * std::abs(b); ++i) {
        const double c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = vacuum_determinant(b, alpha, l);
    }
    return b;
}

}  // namespace

TEST_CASE("constant alpha: discrete spectrum is -q +/- alpha sqrt(q) over the Q[1] block") {
    for (int l : {0, 2}) {
        const double alpha = 2.5;
        const DiscreteOperator op = assemble(ConstantProfile{alpha}, BoundarySpec::dirichlet(l), 60);
        const int n = op.u1_size;
        const Eigen::MatrixXd Q = -op.matrix.topLeftCorner(n, n);
        const Eigen::VectorXd q = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (Q + Q.transpose())).eigenvalues();
        const auto values = eig_general(op.matrix).values;
        for (Eigen::Index i = 0; i < q.size(); ++i)
            for (int s : {1, -1}) {
                const Complex exact(-q(i) + s * alpha * std::sqrt(q(i)), 0.0);
                CHECK(std::abs(nearest(values, exact) - exact) <= 1e-8 * (1.0 + std::abs(exact)));
            }
    }
}

TEST_CASE("Dirichlet-type matrices are Krein symmetric") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 10; ++t) {
        const QuarticProfile p{1.0, u(rng), u(rng), u(rng), u(rng)};
        const DiscreteOperator op = assemble(p, BoundarySpec::dirichlet(t % 3), 40);
        CHECK(krein_symmetry_defect(op) <= 1e-12 * op.matrix.cwiseAbs().maxCoeff());
    }
    const DiscreteOperator box = assemble(SolitonProfile{1.0, 4.0, 1.0}, BoundarySpec::box(1, 10.0), 80);
    CHECK(krein_symmetry_defect(box) <= 1e-12 * box.matrix.cwiseAbs().maxCoeff());
}

TEST_CASE("vacuum regime adds the boundary node") {
    const DiscreteOperator op = assemble(ConstantProfile{1.0}, BoundarySpec::vacuum(1), 50);
    CHECK(op.matrix.rows() == 101);
    CHECK(op.u1_size == 51);
    CHECK(op.grid.nodes.back() == 1.0);
    CHECK_THROWS_AS(krein_symmetry_defect(op), InputError);
}

TEST_CASE("vacuum spectrum converges to the Bessel boundary determinant") {
    const double alpha = 2.0;
    const int l = 1;
    const auto values = eig_general(assemble(ConstantProfile{alpha}, BoundarySpec::vacuum(l), 400).matrix).values;
    std::vector<double> leading;
    for (const Complex& v : values)
        if (std::abs(v.imag()) < 1e-9 && v.real() > -200.0) leading.push_back(v.real());
    std::sort(leading.rbegin(), leading.rend());
    REQUIRE(leading.size() >= 4);
    for (int i = 0; i < 4; ++i) {
        const double root = secant_root(leading[i], leading[i] * (1.0 + 1e-4), alpha, l);
        CHECK(std::abs(vacuum_determinant(root, alpha, l)) < 1e-8);
        CHECK(std::abs(leading[i] - root) <= 1e-3 * std::abs(root));
    }
}

TEST_CASE("second-order convergence under grid refinement") {
    const double exact = -std::numbers::pi * std::numbers::pi + 1.5 * std::numbers::pi;
    const auto err = [&](int M) {
        const auto v = eig_general(assemble(ConstantProfile{1.5}, BoundarySpec::dirichlet(0), M).matrix).values;
        return std::abs(nearest(v, Complex(exact, 0.0)).real() - exact);
    };
    const double ratio = err(50) / err(101);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("box regime needs a soliton-like domain") {
    CHECK_THROWS_AS(assemble(ConstantProfile{1.0}, BoundarySpec::box(0, 5.0), 50), InputError);
    CHECK_THROWS_AS(assemble(ConstantProfile{1.0}, BoundarySpec::dirichlet(-1), 50), InputError);
    CHECK_THROWS_AS(assemble(ConstantProfile{1.0}, BoundarySpec::dirichlet(0), 2), InputError);
}

TEST_CASE("kinetic operator of the empty box is the discrete Laplacian plus one half") {
    const int M = 50;
    const double X = 10.0, h = X / (M + 1);
    const Tridiagonal T = assemble_kinetic(SolitonProfile{1.0, 5.0, 0.0}, 0, X, M);
    for (int i = 0; i < M; ++i) CHECK(T.diag(i) == doctest::Approx(2.0 / (h * h) + 0.5));
    for (int i = 0; i + 1 < M; ++i) CHECK(T.off(i) == doctest::Approx(-1.0 / (h * h)));
}

TEST_CASE("companion eigenvectors stack F and eps F") {
    const PencilLinearization P = assemble_pencil(PencilSign::Plus, SolitonProfile{1.0, 4.0, 1.0}, 0, 10.0, 60);
    const SpectrumSample s = eig_general(P.matrix, true);
    const Eigen::Index n = P.alpha.size();
    const Eigen::MatrixXd T = P.kinetic.dense();
    int checked = 0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const Complex eps = s.values[k];
        if (std::abs(eps) < 1e-6) continue;
        const Eigen::VectorXcd F = s.vectors->col(static_cast<Eigen::Index>(k)).head(n);
        const Eigen::VectorXcd G = s.vectors->col(static_cast<Eigen::Index>(k)).tail(n);
        CHECK((G - eps * F).norm() <= 1e-8 * (1.0 + std::abs(eps)));
        const Eigen::VectorXcd r = T.cast<Complex>() * F - eps * P.alpha.cast<Complex>().cwiseProduct(F) - eps * eps * F;
        CHECK(r.norm() <= 1e-7 * (1.0 + std::abs(eps * eps)) * T.norm());
        ++checked;
    }
    CHECK(checked > 100);
    CHECK(lambda_from_epsilon(Complex(0.5, 0.0)) == Complex(0.25, 0.0));
}
