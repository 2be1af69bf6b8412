#include "doctest.h"

#include "kreinamo/error.hpp"
#include "kreinamo/profiles.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace kreinamo;

namespace {

double fd1(const AlphaProfile& p, double r, double h) {
    return (evaluate(p, r + h) - evaluate(p, r - h)) / (2.0 * h);
}

double fd2(const AlphaProfile& p, double r, double h) {
    return (evaluate(p, r + h) - 2.0 * evaluate(p, r) + evaluate(p, r - h)) / (h * h);
}

std::vector<AlphaProfile> sample_profiles() {
    return {ConstantProfile{1.7},
            reversal_quartic(3.0),
            triple_family_quartic(0.45, 0.86),
            FourierProfile{0.3, {{FourierKind::Cos, 1, 0.5}, {FourierKind::Sin, 3, -0.2}}},
            SolitonProfile{1.3, 4.0, 1.0},
            SolitonProfile{1.0, 6.0, 0.25}};
}

}  // namespace

TEST_CASE("analytic derivatives agree with finite differences") {
    for (const auto& p : sample_profiles()) {
        for (double r : {0.13, 0.5, 0.87}) {
            CHECK(evaluate_derivative(p, r, 1) == doctest::Approx(fd1(p, r, 1e-5)).epsilon(1e-6));
            CHECK(evaluate_derivative(p, r, 2) == doctest::Approx(fd2(p, r, 1e-4)).epsilon(1e-4));
        }
    }
}

TEST_CASE("reversal quartic has the published coefficients and a sign change") {
    const AlphaProfile p = reversal_quartic(2.0);
    CHECK(evaluate(p, 0.0) == doctest::Approx(2.0));
    CHECK(evaluate(p, 1.0) == doctest::Approx(2.0 * (1.0 - 26.09 + 53.64 - 28.22)));
    CHECK(evaluate(p, 0.0) * evaluate(p, 0.5) < 0.0);
}

TEST_CASE("triple family is affine in zeta") {
    const auto a = triple_family_quartic(0.3, 1.0);
    const auto b = triple_family_quartic(0.45, 1.0);
    const auto c = triple_family_quartic(0.6, 1.0);
    CHECK(b.c0 == doctest::Approx(0.5 * (a.c0 + c.c0)));
    CHECK(b.c2 == doctest::Approx(0.5 * (a.c2 + c.c2)));
    CHECK(b.c3 == doctest::Approx(0.5 * (a.c3 + c.c3)));
    CHECK(b.c4 == doctest::Approx(0.5 * (a.c4 + c.c4)));
}

TEST_CASE("soliton satisfies the stationary constraint for any width") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> width(0.2, 3.0), centre(1.0, 10.0);
    std::vector<double> xs;
    for (int i = 0; i <= 400; ++i) xs.push_back(0.05 * i);
    for (int t = 0; t < 25; ++t) {
        const double a = width(rng);
        CHECK(constraint_residual(SolitonProfile{a, centre(rng), 1.0}, xs, a) < 1e-10);
    }
}

TEST_CASE("scaled soliton violates the constraint") {
    std::vector<double> xs{4.0, 5.0, 6.0};
    CHECK(constraint_residual(SolitonProfile{1.0, 5.0, 0.5}, xs, 1.0) > 0.1);
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS(evaluate(ConstantProfile{1.0}, 1.5), InputError);
    CHECK_THROWS_AS(evaluate(reversal_quartic(1.0), -0.1), InputError);
    CHECK_THROWS_AS(evaluate_derivative(ConstantProfile{1.0}, 0.5, 3), InputError);
    CHECK_NOTHROW(evaluate(SolitonProfile{}, 1e6));
    CHECK(std::isinf(domain_end(SolitonProfile{})));
}

TEST_CASE("json round trip preserves every variant") {
    for (const auto& p : sample_profiles()) {
        const AlphaProfile q = profile_from_json(profile_to_json(p));
        CHECK(describe(q) == describe(p));
        for (double r : {0.0, 0.25, 0.75, 1.0}) CHECK(evaluate(q, r) == evaluate(p, r));
    }
}

TEST_CASE("malformed json is rejected") {
    using nlohmann::json;
    CHECK_THROWS_AS(profile_from_json(json::array()), InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "gaussian"}}), InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "constant"}}), InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "quartic"}, {"C", 1.0}, {"coeffs", {1, 2}}}),
                    InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "fourier"},
                                           {"alpha0", 1.0},
                                           {"terms", {{{"kind", "tan"}, {"k", 1}, {"amplitude", 1.0}}}}}),
                    InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "fourier"},
                                           {"alpha0", 1.0},
                                           {"terms", {{{"kind", "cos"}, {"k", 0}, {"amplitude", 1.0}}}}}),
                    InputError);
    CHECK_THROWS_AS(profile_from_json(json{{"variant", "soliton"}, {"a", -1.0}, {"x0", 5.0}}), InputError);
}
