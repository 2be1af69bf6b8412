#include "kreinamo/mesh.hpp"

#include "kreinamo/dynamo_operator.hpp"
#include "kreinamo/error.hpp"
#include "kreinamo/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kreinamo {

namespace {

double riccati_series(int l, double x) {
    // x^{l+1}/(2l+1)!! · Σ_k (−x²/2)^k / (k! (2l+3)(2l+5)…(2l+2k+1))
    double prefactor = std::pow(x, l + 1);
    for (int j = 1; j <= 2 * l + 1; j += 2) prefactor /= j;
    double term = 1.0, sum = 1.0;
    const double y = -0.5 * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= y / (k * (2.0 * l + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return prefactor * sum;
}

struct GaussLegendre {
    std::vector<double> nodes, weights;  // on [−1, 1]
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.nodes[i] = x;
        g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

template <class F>
double composite_gauss(F&& f, int panels, const GaussLegendre& g) {
    double sum = 0.0;
    const double w = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = p * w;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            sum += g.weights[q] * f(a + 0.5 * w * (g.nodes[q] + 1.0));
        }
    }
    return 0.5 * w * sum;
}

}  // namespace

double riccati_bessel(int l, double x) {
    if (l < -1) throw InputError("Riccati-Bessel order must be ≥ −1");
    if (l == -1) return std::cos(x);
    if (l == 0) return std::sin(x);
    if (std::abs(x) < l + 1.0) return riccati_series(l, x);
    double prev = std::cos(x), cur = std::sin(x);
    for (int k = 0; k < l; ++k) {
        const double next = (2.0 * k + 1.0) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double riccati_bessel_derivative(int l, double x) {
    if (l == -1) return -std::sin(x);
    if (l == 0) return std::cos(x);
    if (x == 0.0) return 0.0;
    return riccati_bessel(l - 1, x) - l / x * riccati_bessel(l, x);
}

double RadialMode::value(double r) const {
    // N r^{1/2} J_{l+1/2}(k r) = √2 S_l(k r) / S_{l+1}(k)
    return std::numbers::sqrt2 * riccati_bessel(l, sqrt_rho * r) /
           riccati_bessel(l + 1, sqrt_rho);
}

double RadialMode::derivative(double r) const {
    return std::numbers::sqrt2 * sqrt_rho * riccati_bessel_derivative(l, sqrt_rho * r) /
           riccati_bessel(l + 1, sqrt_rho);
}

std::vector<RadialMode> radial_modes(int l, int count) {
    if (l < 0) throw InputError("angular mode number l must be non-negative");
    if (count < 1) throw InputError("radial_modes needs count ≥ 1");
    std::vector<RadialMode> modes;
    modes.reserve(count);
    const double step = 0.05;
    double x = 0.5 * step;
    double fx = riccati_bessel(l, x);
    int guard = 0;
    while (static_cast<int>(modes.size()) < count) {
        if (++guard > 10'000'000) {
            throw NumericError("root bracketing failed for l = " + std::to_string(l) +
                               ", n = " + std::to_string(modes.size() + 1));
        }
        const double xn = x + step;
        const double fn = riccati_bessel(l, xn);
        if (fx == 0.0 || (fx < 0.0) != (fn < 0.0)) {
            double a = x, b = xn, fa = fx;
            if (fx == 0.0) b = a;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = riccati_bessel(l, mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            double root = 0.5 * (a + b);
            for (int it = 0; it < 3; ++it) {
                const double d = riccati_bessel_derivative(l, root);
                if (d == 0.0) break;
                const double dx = riccati_bessel(l, root) / d;
                if (std::abs(dx) > 1e-8) break;
                root -= dx;
            }
            RadialMode m;
            m.n = static_cast<int>(modes.size()) + 1;
            m.l = l;
            m.sqrt_rho = root;
            m.norm = std::numbers::sqrt2 * std::sqrt(0.5 * std::numbers::pi * root) /
                     riccati_bessel(l + 1, root);
            modes.push_back(m);
        }
        x = xn;
        fx = fn;
    }
    return modes;
}

double mesh_eigenvalue(const RadialMode& mode, int krein_sign, double alpha0) {
    return -mode.rho() + krein_sign * alpha0 * mode.sqrt_rho;
}

double mesh_eigenvalue(int n, int krein_sign, int l, double alpha0) {
    if (n < 1) throw InputError("radial mode number must be ≥ 1");
    return mesh_eigenvalue(radial_modes(l, n).back(), krein_sign, alpha0);
}

std::vector<DiabolicalPoint> diabolical_points(int l, int n_max, DpWindow window) {
    if (n_max < 2) throw InputError("diabolical_points needs n_max ≥ 2");
    const auto modes = radial_modes(l, n_max);
    std::vector<DiabolicalPoint> out;
    // Unordered pairs of distinct branches (n, ε) < (m, δ) in the order
    // (1,+), (1,−), (2,+), (2,−), …
    const auto key = [](int n, int s) { return 2 * n + (s > 0 ? 0 : 1); };
    for (int n = 1; n <= n_max; ++n) {
        for (int eps : {1, -1}) {
            for (int m = 1; m <= n_max; ++m) {
                for (int delta : {1, -1}) {
                    if (key(m, delta) <= key(n, eps)) continue;
                    const double sn = modes[n - 1].sqrt_rho;
                    const double sm = modes[m - 1].sqrt_rho;
                    DiabolicalPoint dp;
                    dp.n = n;
                    dp.eps = eps;
                    dp.m = m;
                    dp.delta = delta;
                    dp.l = l;
                    dp.alpha0_c = eps * sn + delta * sm;
                    dp.lambda0 = eps * delta * sn * sm;
                    dp.same_type = eps == delta;
                    if (l == 0) dp.parabola = dp.same_type ? std::abs(n - m) : n + m;
                    if (dp.alpha0_c < window.alpha_min || dp.alpha0_c > window.alpha_max) continue;
                    out.push_back(dp);
                }
            }
        }
    }
    return out;
}

double Perturbation::operator()(double r) const {
    double v = constant;
    for (const auto& t : terms) {
        const double arg = 2.0 * std::numbers::pi * t.k * r;
        v += t.amplitude * (t.kind == FourierKind::Cos ? std::cos(arg) : std::sin(arg));
    }
    return v;
}

FourierProfile perturbed_profile(double alpha0, const Perturbation& phi, double amplitude) {
    FourierProfile p;
    p.alpha0 = alpha0 + amplitude * phi.constant;
    for (auto t : phi.terms) {
        t.amplitude *= amplitude;
        p.terms.push_back(t);
    }
    return p;
}

double krein_product_B(const Perturbation& phi, const RadialMode& mode_m, int delta,
                       const RadialMode& mode_n, int eps, const QuadratureOptions& opt) {
    if (mode_m.l != mode_n.l) throw InputError("Krein product needs modes of equal l");
    const double L = static_cast<double>(mode_n.l) * (mode_n.l + 1);
    const double cross = eps * delta * mode_n.sqrt_rho * mode_m.sqrt_rho;
    const auto integrand = [&](double r) {
        const double um = mode_m.value(r), un = mode_n.value(r);
        return phi(r) * ((cross + L / (r * r)) * um * un +
                         mode_m.derivative(r) * mode_n.derivative(r));
    };
    const auto g = gauss_legendre(opt.points);
    int panels = opt.panels;
    double prev = composite_gauss(integrand, panels, g);
    for (int d = 0; d < opt.max_doublings; ++d) {
        panels *= 2;
        const double cur = composite_gauss(integrand, panels, g);
        if (std::abs(cur - prev) <= opt.tolerance * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw NumericError("Krein product quadrature did not converge (panel doubling)");
}

Unfolding dp_unfold(const DiabolicalPoint& dp, const Perturbation& phi, double amplitude,
                    const QuadratureOptions& opt) {
    const auto modes = radial_modes(dp.l, std::max(dp.n, dp.m));
    const RadialMode& un = modes[dp.n - 1];
    const RadialMode& um = modes[dp.m - 1];
    Unfolding u;
    u.b_nn = krein_product_B(phi, un, dp.eps, un, dp.eps, opt);
    u.b_mm = krein_product_B(phi, um, dp.delta, um, dp.delta, opt);
    u.b_nm = krein_product_B(phi, um, dp.delta, un, dp.eps, opt);

    const double sn = un.sqrt_rho, sm = um.sqrt_rho;
    const double linear = dp.eps * u.b_nn / (2.0 * sn) + dp.delta * u.b_mm / (2.0 * sm);
    const double constant =
        dp.eps * dp.delta * (u.b_nn * u.b_mm - u.b_nm * u.b_nm) / (4.0 * sn * sm);
    u.discriminant = linear * linear - 4.0 * constant;

    const double scale = std::pow(std::abs(u.b_nn) / (2.0 * sn) + std::abs(u.b_mm) / (2.0 * sm) +
                                      std::abs(u.b_nm) / (2.0 * std::sqrt(sn * sm)),
                                  2);
    u.complex_split = u.discriminant < -(1e-12 * scale + 1e-16);
    const Complex root = u.complex_split ? Complex(0.0, std::sqrt(-u.discriminant))
                                         : Complex(std::sqrt(std::max(u.discriminant, 0.0)), 0.0);
    u.lambda1 = {0.5 * (linear + root), 0.5 * (linear - root)};
    for (int k = 0; k < 2; ++k) u.predicted[k] = dp.lambda0 + amplitude * u.lambda1[k];
    return u;
}

ObservedSplit observe_split(const DiabolicalPoint& dp, const Perturbation& phi, double amplitude,
                            int M) {
    const auto bc = BoundarySpec::dirichlet(dp.l);
    const auto q1 = assemble(ConstantProfile{0.0}, bc, M);
    // −Q[1] sits in the u₁ block of the α = 0 operator.
    const Eigen::MatrixXd Q1 = -q1.matrix.topLeftCorner(M, M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(Q1.diagonal(), Q1.diagonal(-1), Eigen::EigenvaluesOnly);
    const double rn = es.eigenvalues()(dp.n - 1);
    const double rm = es.eigenvalues()(dp.m - 1);

    ObservedSplit o;
    o.alpha0_discrete = dp.eps * std::sqrt(rn) + dp.delta * std::sqrt(rm);
    o.lambda0_discrete = dp.eps * dp.delta * std::sqrt(rn * rm);

    const auto op = assemble(perturbed_profile(o.alpha0_discrete, phi, amplitude), bc, M);
    auto values = eig_general(op.matrix).values;
    std::partial_sort(values.begin(), values.begin() + 2, values.end(), [&](Complex a, Complex b) {
        return std::abs(a - o.lambda0_discrete) < std::abs(b - o.lambda0_discrete);
    });
    o.values = {values[0], values[1]};
    if (std::pair(o.values[0].imag(), o.values[0].real()) <
        std::pair(o.values[1].imag(), o.values[1].real())) {
        std::swap(o.values[0], o.values[1]);
    }
    o.split = o.values[0] - o.values[1];
    return o;
}

std::vector<ResonanceRow> resonance_scan(const Perturbation& phi, const ResonanceOptions& opt) {
    auto dps = diabolical_points(0, opt.n_max, opt.window);
    std::stable_sort(dps.begin(), dps.end(), [](const DiabolicalPoint& a, const DiabolicalPoint& b) {
        return a.parabola.value_or(0) < b.parabola.value_or(0);
    });
    std::vector<ResonanceRow> rows(dps.size());
    parallel_for(dps.size(), opt.workers, [&](std::size_t i) {
        ResonanceRow row;
        row.dp = dps[i];
        row.prediction = dp_unfold(dps[i], phi, opt.amplitude);
        if (opt.observe) {
            row.observed_plus = observe_split(dps[i], phi, opt.amplitude, opt.M);
            row.observed_minus = observe_split(dps[i], phi, -opt.amplitude, opt.M);
        }
        rows[i] = std::move(row);
    });
    return rows;
}

}  // namespace kreinamo
