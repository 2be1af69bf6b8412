#include "doctest.h"

#include "kreinamo/error.hpp"
#include "kreinamo/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace kreinamo;

namespace {

PencilOptions loose() {
    PencilOptions po;
    po.enforce_density = false;
    return po;
}

}  // namespace

TEST_CASE("empty box: physical pencil modes reproduce the discrete Laplacian") {
    const int M = 240;
    const double X = 12.0, h = X / (M + 1);
    PencilOptions po = loose();
    po.strength = 0.0;
    const PencilSpectrum s = pencil_spectrum(PencilSign::Plus, 0, 6.0, X, M, po);
    std::vector<double> got;
    for (const PencilMode& m : s.modes)
        if (m.physical) got.push_back(m.lambda.real());
    REQUIRE(got.size() == static_cast<std::size_t>(M));
    for (int k = 1; k <= 10; ++k) {
        const double mu = (2.0 - 2.0 * std::cos(k * std::numbers::pi / (M + 1))) / (h * h);
        CHECK(got[static_cast<std::size_t>(k - 1)] == doctest::Approx(-mu).epsilon(1e-9));
    }
}

TEST_CASE("every pencil mode has lambda = 1/2 - eps^2 and solves the pencil") {
    for (PencilSign sign : {PencilSign::Plus, PencilSign::Minus}) {
        const PencilSpectrum s = pencil_spectrum(sign, 1, 5.0, 12.0, 240);
        const PencilLinearization P = assemble_pencil(sign, unit_soliton(5.0), 1, 12.0, 240);
        const double sg = static_cast<int>(sign);
        for (std::size_t i = 0; i < s.modes.size(); ++i) {
            const PencilMode& m = s.modes[i];
            CHECK(std::abs(m.lambda - (0.5 - m.epsilon * m.epsilon)) < 1e-12 * (1.0 + std::abs(m.lambda)));
            if (i > 0) CHECK(m.lambda.real() <= s.modes[i - 1].lambda.real());
            if (m.near_jordan || m.F.size() == 0 || !m.physical || std::abs(m.lambda) > 50.0) continue;
            const Eigen::VectorXcd TF = P.kinetic.dense().cast<Complex>() * m.F;
            const Eigen::VectorXcd r = TF - sg * m.epsilon * P.alpha.cast<Complex>().cwiseProduct(m.F) -
                                       m.epsilon * m.epsilon * m.F;
            CHECK(r.norm() <= 1e-8 * TF.norm() + 1e-10);
        }
    }
}

TEST_CASE("density precondition is enforced unless disabled") {
    CHECK_THROWS_AS(pencil_spectrum(PencilSign::Plus, 0, 6.0, 30.0, 300), InputError);
    CHECK_THROWS_AS(pencil_spectrum(PencilSign::Plus, 0, 6.0, 10.0, 400), InputError);
    CHECK_NOTHROW(pencil_spectrum(PencilSign::Plus, 0, 6.0, 10.0, 100, loose()));
}

TEST_CASE("bound states of the two pencils mirror each other") {
    for (int l : {0, 1, 3})
        for (double x0 : {0.5, 2.0, 6.0, 10.0}) {
            const auto P = assemble_pencil(PencilSign::Plus, unit_soliton(x0), l, x0 + 20.0, 400);
            const auto Mn = assemble_pencil(PencilSign::Minus, unit_soliton(x0), l, x0 + 20.0, 400);
            const auto ep = bound_state_epsilons(P.kinetic, P.alpha, PencilSign::Plus);
            auto em = bound_state_epsilons(Mn.kinetic, Mn.alpha, PencilSign::Minus);
            REQUIRE(ep.size() == em.size());
            std::reverse(em.begin(), em.end());
            for (std::size_t i = 0; i < ep.size(); ++i) {
                CHECK(ep[i] == doctest::Approx(-em[i]).epsilon(1e-9));
                CHECK(std::abs(ep[i]) < 1.0 / std::sqrt(2.0));
                CHECK(std::abs(pencil_ground_level(P.kinetic, P.alpha, PencilSign::Plus, ep[i])) < 1e-8);
            }
        }
}

TEST_CASE("ground-level root at x0 = 6 for l = 0 is negative; its mirror is the minus-pencil bound state") {
    const auto P = assemble_pencil(PencilSign::Plus, unit_soliton(6.0), 0, 30.0, 600);
    const auto e = bound_state_epsilons(P.kinetic, P.alpha, PencilSign::Plus);
    REQUIRE(e.size() == 1u);
    CHECK(e[0] < 0.0);
    CHECK(0.5 - e[0] * e[0] > 0.0);
    const PencilSpectrum minus = pencil_spectrum(PencilSign::Minus, 0, 6.0, 30.0, 600);
    int localized = 0;
    for (const PencilMode& m : minus.modes)
        if (m.physical && m.localized && m.lambda.real() > 0.0) {
            ++localized;
            CHECK(m.epsilon.real() == doctest::Approx(-e[0]).epsilon(1e-6));
            CHECK(m.tail_mass < 0.01);
        }
    CHECK(localized == 1);
}

TEST_CASE("box modes are delocalized") {
    const PencilSpectrum s = pencil_spectrum(PencilSign::Plus, 0, 6.0, 30.0, 600);
    int box = 0;
    for (const PencilMode& m : s.modes)
        if (m.physical && m.lambda.real() < 0.0 && m.lambda.real() > -0.5) {
            CHECK(m.tail_mass > 0.5);
            CHECK_FALSE(m.localized);
            ++box;
        }
    CHECK(box > 3);
}

TEST_CASE("bound-state branch rises to 1/2 at the Jordan point") {
    BranchOptions opt;
    opt.x0_max = 6.0;
    opt.samples = 25;
    const BoundStateBranch b = bound_state_branch(0, 40.0, 800, opt);
    REQUIRE(b.x_J.has_value());
    CHECK(*b.x_J == doctest::Approx(0.8811).epsilon(1e-3));
    CHECK(b.epsilon_sign_changes == 1);
    for (const BoundStateSample& s : b.samples) {
        CHECK(s.lambda <= 0.5 + 1e-12);
        CHECK(s.lambda == doctest::Approx(0.5 - s.epsilon * s.epsilon));
        CHECK((s.x0 < *b.x_J) == (s.epsilon > 0.0));
    }
    CHECK_THROWS_AS(bound_state_branch(0, 10.0, 400, opt), InputError);
}

TEST_CASE("Jordan chain at x_J") {
    const double xj = locate_jordan_point(0, 40.0, 800, 0.1, 5.0, 1e-10);
    const JordanReport r = jordan_system_solve(0, xj, 40.0, 800);
    CHECK(r.x_J == xj);
    CHECK(r.kernel_relative < 1e-10);
    CHECK(r.xi1_residual < 1e-10);
    CHECK(std::abs(r.xi0.dot(r.xi1)) < 1e-8 * r.xi0.norm() * r.xi1.norm());
    CHECK_THROWS_AS(jordan_system_solve(0, xj + 0.5, 40.0, 800), InputError);
}

TEST_CASE("empty box superpotential is coth(x / sqrt 2) / sqrt 2") {
    const Superpotential s = superpotential(0, 6.0, 12.0, 240, 0.0);
    CHECK(s.zeros.empty());
    for (std::size_t i = 0; i < s.grid.nodes.size(); ++i) {
        const double x = s.grid.nodes[i];
        const double exact = 1.0 / (std::tanh(x / std::sqrt(2.0)) * std::sqrt(2.0));
        CHECK(s.w(static_cast<Eigen::Index>(i)) == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("superpotential satisfies the Riccati equation at second order") {
    const auto riccati = [](int M) {
        const Superpotential s = superpotential(1, 6.0, 20.0, M);
        const double h = s.grid.h;
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < s.grid.nodes.size(); ++i) {
            const double x = s.grid.nodes[i];
            const bool near_zero = std::any_of(s.zeros.begin(), s.zeros.end(),
                                               [&](double z) { return std::abs(x - z) < 1.0; });
            if (near_zero || x < 1.0) continue;
            const auto k = static_cast<Eigen::Index>(i);
            const double a = 2.0 / std::cosh(x - 6.0);
            const double V = 2.0 / (x * x) - 0.5 * a * a + 0.5;
            worst = std::max(worst, std::abs((s.w(k + 1) - s.w(k - 1)) / (2 * h) + s.w(k) * s.w(k) - V));
        }
        return worst;
    };
    const double coarse = riccati(400), fine = riccati(1600);
    CHECK(fine < 1e-3);
    CHECK(coarse / fine > 10.0);
}

TEST_CASE("Dirac residual separates the true eigenvalue from a wrong one") {
    const PencilSpectrum s = pencil_spectrum(PencilSign::Minus, 0, 6.0, 30.0, 1200, loose());
    const Superpotential w = superpotential(0, 6.0, 30.0, 1200);
    const auto it = std::find_if(s.modes.begin(), s.modes.end(), [](const PencilMode& m) {
        return m.physical && m.localized && m.lambda.real() > 0.0;
    });
    REQUIRE(it != s.modes.end());
    const Eigen::VectorXd F = it->F.real();
    const DiracResidual good = dirac_residual(it->epsilon.real(), F, PencilSign::Minus, w);
    const DiracResidual bad = dirac_residual(it->epsilon.real() + 0.1, F, PencilSign::Minus, w);
    CHECK(good.reliable);
    CHECK(good.value < 1e-3);
    CHECK(bad.value > 0.05);
    CHECK_THROWS_AS(dirac_residual(0.0, F, PencilSign::Minus, w), InputError);
}
