#include "doctest.h"

#include "kreinamo/error.hpp"
#include "kreinamo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace kreinamo;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("Riccati-Bessel functions match the standard library") {
    for (int l = 0; l <= 4; ++l)
        for (double x : {1e-3, 0.1, 0.7, 2.0, 9.5, 31.0}) {
            const double ref = x * std::sph_bessel(l, x);
            CHECK(riccati_bessel(l, x) == doctest::Approx(ref).epsilon(1e-10).scale(1e-12));
            const double j = std::sph_bessel(l, x);
            const double dj = l == 0 ? -std::sph_bessel(1, x) : std::sph_bessel(l - 1, x) - (l + 1) / x * j;
            CHECK(riccati_bessel_derivative(l, x) == doctest::Approx(j + x * dj).epsilon(1e-10).scale(1e-12));
        }
    CHECK(riccati_bessel(-1, 0.4) == doctest::Approx(std::cos(0.4)));
}

TEST_CASE("radial modes: l = 0 roots are n pi, all roots are Bessel zeros") {
    const auto m0 = radial_modes(0, 6);
    for (int n = 1; n <= 6; ++n) CHECK(m0[n - 1].sqrt_rho == doctest::Approx(n * pi));
    for (int l = 1; l <= 3; ++l) {
        const auto m = radial_modes(l, 8);
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK(std::abs(std::sph_bessel(l, m[i].sqrt_rho)) < 1e-12);
            if (i > 0) CHECK(m[i].sqrt_rho > m[i - 1].sqrt_rho);
        }
    }
}

TEST_CASE("radial modes are orthonormal and satisfy the boundary conditions") {
    for (int l : {0, 2}) {
        const auto m = radial_modes(l, 4);
        const int N = 20000;
        for (std::size_t a = 0; a < m.size(); ++a)
            for (std::size_t b = a; b < m.size(); ++b) {
                double s = 0.0;
                for (int i = 1; i < N; ++i) {
                    const double r = static_cast<double>(i) / N;
                    s += m[a].value(r) * m[b].value(r);
                }
                CHECK(s / N == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-6));
            }
        for (const auto& mode : m) CHECK(std::abs(mode.value(1.0)) < 1e-10);
    }
}

TEST_CASE("mesh branches are straight lines in alpha0") {
    for (int s : {1, -1}) {
        const double a = mesh_eigenvalue(3, s, 1, 0.0), b = mesh_eigenvalue(3, s, 1, 1.0),
                     c = mesh_eigenvalue(3, s, 1, 2.0);
        CHECK(b - a == doctest::Approx(c - b));
    }
    CHECK(mesh_eigenvalue(2, 1, 0, 0.0) == doctest::Approx(-4 * pi * pi));
}

TEST_CASE("diabolical points are genuine branch crossings") {
    for (int l : {0, 1}) {
        const auto dps = diabolical_points(l, 5);
        CHECK(dps.size() == 45u);  // C(10, 2) pairs of distinct branches
        for (const auto& dp : dps) {
            const double a = mesh_eigenvalue(dp.n, dp.eps, l, dp.alpha0_c);
            const double b = mesh_eigenvalue(dp.m, dp.delta, l, dp.alpha0_c);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
            CHECK(a == doctest::Approx(dp.lambda0).epsilon(1e-12));
        }
    }
}

TEST_CASE("l = 0 diabolical points lie on the parabolas (alpha0^2 - j^2 pi^2)/4") {
    for (const auto& dp : diabolical_points(0, 6)) {
        REQUIRE(dp.parabola.has_value());
        const double j = *dp.parabola;
        const double v = (dp.alpha0_c * dp.alpha0_c - j * j * pi * pi) / 4.0;
        CHECK(dp.lambda0 == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("window filters diabolical points") {
    for (const auto& dp : diabolical_points(0, 6, DpWindow{0.0, 10.0})) {
        CHECK(dp.alpha0_c >= 0.0);
        CHECK(dp.alpha0_c <= 10.0);
    }
    CHECK_THROWS_AS(diabolical_points(0, 1), InputError);
}

TEST_CASE("uniform perturbation: Krein products reduce to 2 rho and 0") {
    const auto m = radial_modes(1, 4);
    const Perturbation one = Perturbation::uniform();
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b) {
            const double same = krein_product_B(one, m[a], 1, m[b], 1);
            const double opposite = krein_product_B(one, m[a], -1, m[b], 1);
            if (a == b) {
                CHECK(same == doctest::Approx(2.0 * m[a].rho()).epsilon(1e-8));
                CHECK(std::abs(opposite) < 1e-8 * m[a].rho());
            } else {
                CHECK(std::abs(same) < 1e-8 * m[a].rho() * m[b].rho());
            }
        }
}

TEST_CASE("uniform perturbation shifts each branch by its slope") {
    for (const auto& dp : diabolical_points(0, 4)) {
        const Unfolding u = dp_unfold(dp, Perturbation::uniform(), 0.1);
        const double sn = dp.eps * dp.n * pi, sm = dp.delta * dp.m * pi;
        const double lo = std::min(sn, sm), hi = std::max(sn, sm);
        const double r0 = std::min(u.lambda1[0].real(), u.lambda1[1].real());
        const double r1 = std::max(u.lambda1[0].real(), u.lambda1[1].real());
        CHECK(r0 == doctest::Approx(lo).epsilon(1e-8));
        CHECK(r1 == doctest::Approx(hi).epsilon(1e-8));
        CHECK_FALSE(u.complex_split);
    }
}

TEST_CASE("cos(2 pi r) couples the (1,+),(1,-) pair into a complex split of +/- i pi/2") {
    const auto dps = diabolical_points(0, 2);
    const auto it = std::find_if(dps.begin(), dps.end(), [](const DiabolicalPoint& d) {
        return d.n == 1 && d.m == 1 && d.eps == 1 && d.delta == -1;
    });
    REQUIRE(it != dps.end());
    const Unfolding u = dp_unfold(*it, Perturbation::cosine(1), 0.05);
    CHECK(u.complex_split);
    CHECK(u.b_nm == doctest::Approx(pi * pi).epsilon(1e-8));
    CHECK(std::abs(u.b_nn) < 1e-8);
    CHECK(std::abs(std::abs(u.lambda1[0].imag()) - pi / 2) < 1e-8);
    CHECK(std::abs(u.lambda1[0] - std::conj(u.lambda1[1])) < 1e-8);
}

TEST_CASE("cosine selectivity: off-resonant opposite-type products vanish") {
    for (int k : {1, 2, 3})
        for (const auto& dp : diabolical_points(0, 6)) {
            if (dp.same_type || dp.n + dp.m == 2 * k) continue;
            CHECK(std::abs(dp_unfold(dp, Perturbation::cosine(k), 0.05).b_nm) < 1e-8);
        }
}

TEST_CASE("same-type points unfold into real pairs") {
    for (const auto& dp : diabolical_points(0, 5)) {
        if (!dp.same_type) continue;
        for (const Perturbation& phi : {Perturbation::cosine(1), Perturbation::sine(2)}) {
            const Unfolding u = dp_unfold(dp, phi, 0.05);
            CHECK_FALSE(u.complex_split);
            CHECK(std::abs(u.lambda1[0].imag()) < 1e-12);
        }
    }
}

TEST_CASE("observed splitting matches first order for a resonant pair") {
    const auto dps = diabolical_points(0, 2);
    const auto it = std::find_if(dps.begin(), dps.end(), [](const DiabolicalPoint& d) {
        return d.n == 1 && d.m == 1 && !d.same_type;
    });
    REQUIRE(it != dps.end());
    const double amp = 0.02;
    const Unfolding u = dp_unfold(*it, Perturbation::cosine(1), amp);
    const ObservedSplit o = observe_split(*it, Perturbation::cosine(1), amp, 200);
    const Complex pred = amp * (u.lambda1[0] - u.lambda1[1]);
    const double err = std::min(std::abs(o.split - pred), std::abs(o.split + pred)) / std::abs(pred);
    CHECK(err < 0.05);
}
