#include "kreinamo/profiles.hpp"

#include "kreinamo/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kreinamo {

namespace {

constexpr double kDomainSlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_domain(const AlphaProfile& profile, double r) {
    if (!std::isfinite(r) || r < -kDomainSlack) {
        throw InputError("profile evaluated outside its domain: r = " + std::to_string(r));
    }
    const double end = domain_end(profile);
    if (r > end * (1.0 + kDomainSlack) + kDomainSlack) {
        throw InputError("profile evaluated beyond r = " + std::to_string(end) +
                         ": r = " + std::to_string(r));
    }
}

double fourier_value(const FourierProfile& p, double r, int order) {
    const double two_pi = 2.0 * std::numbers::pi;
    double v = order == 0 ? p.alpha0 : 0.0;
    for (const auto& t : p.terms) {
        const double w = two_pi * t.k;
        const double s = std::sin(w * r);
        const double c = std::cos(w * r);
        if (t.kind == FourierKind::Cos) {
            v += t.amplitude * (order == 0 ? c : order == 1 ? -w * s : -w * w * c);
        } else {
            v += t.amplitude * (order == 0 ? s : order == 1 ? w * c : -w * w * s);
        }
    }
    return v;
}

double soliton_value(const SolitonProfile& p, double x, int order) {
    const double y = p.a * (x - p.x0);
    const double sech = 1.0 / std::cosh(y);
    const double amp = p.strength * 2.0 * p.a;
    switch (order) {
    case 0:
        return amp * sech;
    case 1:
        return -amp * p.a * sech * std::tanh(y);
    default: {
        const double th = std::tanh(y);
        return -amp * p.a * p.a * sech * (1.0 - 2.0 * th * th);
    }
    }
}

double value(const AlphaProfile& profile, double r, int order) {
    return std::visit(
        overloaded{
            [&](const ConstantProfile& p) { return order == 0 ? p.alpha0 : 0.0; },
            [&](const QuarticProfile& p) {
                const double r2 = r * r;
                switch (order) {
                case 0:
                    return p.C * (p.c0 + p.c2 * r2 + p.c3 * r2 * r + p.c4 * r2 * r2);
                case 1:
                    return p.C * (2.0 * p.c2 * r + 3.0 * p.c3 * r2 + 4.0 * p.c4 * r2 * r);
                default:
                    return p.C * (2.0 * p.c2 + 6.0 * p.c3 * r + 12.0 * p.c4 * r2);
                }
            },
            [&](const FourierProfile& p) { return fourier_value(p, r, order); },
            [&](const SolitonProfile& p) { return soliton_value(p, r, order); },
        },
        profile);
}

}  // namespace

QuarticProfile reversal_quartic(double C) {
    return QuarticProfile{C, 1.0, -26.09, 53.64, -28.22};
}

QuarticProfile triple_family_quartic(double zeta, double C) {
    return QuarticProfile{C,
                          -(21.465 + 2.467 * zeta),
                          426.412 + 167.928 * zeta,
                          -(806.729 + 436.289 * zeta),
                          392.276 + 272.991 * zeta};
}

double domain_end(const AlphaProfile& profile) {
    if (std::holds_alternative<SolitonProfile>(profile)) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0;
}

double evaluate(const AlphaProfile& profile, double r) {
    check_domain(profile, r);
    return value(profile, r, 0);
}

double evaluate_derivative(const AlphaProfile& profile, double r, int order) {
    if (order != 1 && order != 2) {
        throw InputError("derivative order must be 1 or 2");
    }
    check_domain(profile, r);
    return value(profile, r, order);
}

double constraint_residual(const AlphaProfile& profile, std::span<const double> samples,
                           double a) {
    double worst = 0.0;
    for (double r : samples) {
        const double al = evaluate(profile, r);
        const double res = evaluate_derivative(profile, r, 2) + 0.5 * al * al * al - a * a * al;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::string describe(const AlphaProfile& profile) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const ConstantProfile& p) { os << "constant(" << p.alpha0 << ")"; },
                   [&](const QuarticProfile& p) {
                       os << "quartic(C=" << p.C << ";" << p.c0 << "," << p.c2 << "," << p.c3
                          << "," << p.c4 << ")";
                   },
                   [&](const FourierProfile& p) {
                       os << "fourier(" << p.alpha0;
                       for (const auto& t : p.terms) {
                           os << (t.kind == FourierKind::Cos ? ";cos" : ";sin") << t.k << ":"
                              << t.amplitude;
                       }
                       os << ")";
                   },
                   [&](const SolitonProfile& p) {
                       os << "soliton(a=" << p.a << ",x0=" << p.x0;
                       if (p.strength != 1.0) os << ",strength=" << p.strength;
                       os << ")";
                   },
               },
               profile);
    return os.str();
}

namespace {

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw InputError(std::string("profile field '") + key + "' must be a number");
    }
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) {
        throw InputError(std::string("profile field '") + key + "' is not finite");
    }
    return v;
}

}  // namespace

AlphaProfile profile_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string()) {
        throw InputError("profile must be an object with a string 'variant' field");
    }
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "constant") {
        return ConstantProfile{require_number(j, "alpha0")};
    }
    if (variant == "quartic") {
        const auto& c = j.contains("coeffs") ? j.at("coeffs") : nlohmann::json();
        if (!c.is_array() || c.size() != 4) {
            throw InputError("quartic profile needs 'coeffs': [c0, c2, c3, c4]");
        }
        QuarticProfile q;
        q.C = require_number(j, "C");
        for (const auto& v : c) {
            if (!v.is_number()) throw InputError("quartic coefficients must be numbers");
        }
        q.c0 = c[0].get<double>();
        q.c2 = c[1].get<double>();
        q.c3 = c[2].get<double>();
        q.c4 = c[3].get<double>();
        return q;
    }
    if (variant == "fourier") {
        FourierProfile f;
        f.alpha0 = require_number(j, "alpha0");
        if (j.contains("terms")) {
            if (!j.at("terms").is_array()) throw InputError("fourier 'terms' must be an array");
            for (const auto& t : j.at("terms")) {
                FourierTerm term;
                const auto kind = t.value("kind", std::string{});
                if (kind == "cos") {
                    term.kind = FourierKind::Cos;
                } else if (kind == "sin") {
                    term.kind = FourierKind::Sin;
                } else {
                    throw InputError("fourier term kind must be 'cos' or 'sin'");
                }
                if (!t.contains("k") || !t.at("k").is_number_integer() || t.at("k").get<int>() < 1) {
                    throw InputError("fourier term 'k' must be a positive integer");
                }
                term.k = t.at("k").get<int>();
                term.amplitude = require_number(t, "amplitude");
                f.terms.push_back(term);
            }
        }
        return f;
    }
    if (variant == "soliton") {
        SolitonProfile s;
        s.a = require_number(j, "a");
        s.x0 = require_number(j, "x0");
        if (j.contains("strength")) s.strength = require_number(j, "strength");
        if (s.a <= 0.0) throw InputError("soliton 'a' must be positive");
        if (s.x0 <= 0.0) throw InputError("soliton 'x0' must be positive");
        return s;
    }
    throw InputError("unknown profile variant '" + variant + "'");
}

nlohmann::json profile_to_json(const AlphaProfile& profile) {
    return std::visit(
        overloaded{
            [](const ConstantProfile& p) {
                return nlohmann::json{{"variant", "constant"}, {"alpha0", p.alpha0}};
            },
            [](const QuarticProfile& p) {
                return nlohmann::json{{"variant", "quartic"},
                                      {"C", p.C},
                                      {"coeffs", {p.c0, p.c2, p.c3, p.c4}}};
            },
            [](const FourierProfile& p) {
                nlohmann::json terms = nlohmann::json::array();
                for (const auto& t : p.terms) {
                    terms.push_back({{"kind", t.kind == FourierKind::Cos ? "cos" : "sin"},
                                     {"k", t.k},
                                     {"amplitude", t.amplitude}});
                }
                return nlohmann::json{{"variant", "fourier"}, {"alpha0", p.alpha0}, {"terms", terms}};
            },
            [](const SolitonProfile& p) {
                nlohmann::json j{{"variant", "soliton"}, {"a", p.a}, {"x0", p.x0}};
                if (p.strength != 1.0) j["strength"] = p.strength;
                return j;
            },
        },
        profile);
}

}  // namespace kreinamo
