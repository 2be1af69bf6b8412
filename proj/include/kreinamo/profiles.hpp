#pragma once

#include <json.hpp>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kreinamo {

/// α(r) = alpha0.
struct ConstantProfile {
    double alpha0 = 0.0;
};

/// α(r) = C·(c0 + c2 r² + c3 r³ + c4 r⁴) on [0, 1].
struct QuarticProfile {
    double C = 1.0;
    double c0 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

enum class FourierKind { Cos, Sin };

/// amplitude·cos(2πkr) or amplitude·sin(2πkr).
struct FourierTerm {
    FourierKind kind = FourierKind::Cos;
    int k = 1;
    double amplitude = 0.0;
};

/// α(r) = alpha0 + Σ terms on [0, 1].
struct FourierProfile {
    double alpha0 = 0.0;
    std::vector<FourierTerm> terms;
};

/// α(x) = strength · 2a / cosh(a(x − x0)) on [0, ∞). strength = 1 is the
/// one-soliton profile; strength = 0 gives the empty-box limit.
struct SolitonProfile {
    double a = 1.0;
    double x0 = 5.0;
    double strength = 1.0;
};

using AlphaProfile =
    std::variant<ConstantProfile, QuarticProfile, FourierProfile, SolitonProfile>;

/// Quartic with the coefficients of the field-reversal profile,
/// α(r) = C(1 − 26.09 r² + 53.64 r³ − 28.22 r⁴).
QuarticProfile reversal_quartic(double C);

/// Quartic from the ζ-parameterized family used for the triple-point search;
/// the ζ-affine coefficients are evaluated here.
QuarticProfile triple_family_quartic(double zeta, double C);

/// Right end of the natural domain; +∞ for solitons.
double domain_end(const AlphaProfile& profile);

double evaluate(const AlphaProfile& profile, double r);

/// Analytic first (order = 1) or second (order = 2) derivative.
double evaluate_derivative(const AlphaProfile& profile, double r, int order);

/// max |α'' + α³/2 − a²α| over the sample points.
double constraint_residual(const AlphaProfile& profile,
                           std::span<const double> samples, double a);

/// Short human-readable identifier used in output metadata.
std::string describe(const AlphaProfile& profile);

AlphaProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const AlphaProfile& profile);

}  // namespace kreinamo
