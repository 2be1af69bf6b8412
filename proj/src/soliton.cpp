#include "kreinamo/soliton.hpp"

#include "kreinamo/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace kreinamo {

namespace {

constexpr double kEdge = 0.70710678118654752440;  // 1/√2, λ = 0
constexpr double kTailOffset = 5.0;
constexpr double kJordanEpsilon = 1e-8;

double sign_value(PencilSign sign) { return static_cast<double>(static_cast<int>(sign)); }

Eigen::VectorXd alpha_on_grid(const SolitonProfile& p, double X, int M) {
    const double h = X / (M + 1);
    Eigen::VectorXd a(M);
    for (int i = 0; i < M; ++i) a(i) = evaluate(p, (i + 1) * h);
    return a;
}

// Eigenvector of the complex symmetric tridiagonal K(ϵ) = T − sϵα − ϵ² for the
// (near) null direction, by three steps of inverse iteration.
Eigen::VectorXcd null_vector(const Tridiagonal& T, const Eigen::VectorXd& alpha, double s,
                             Complex eps) {
    const int M = static_cast<int>(T.diag.size());
    const double scale = T.diag.cwiseAbs().maxCoeff();
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(M);
    for (int iter = 0; iter < 3; ++iter) {
        std::vector<lapack_complex_double> dl(M - 1), d(M), du(M - 1), b(M);
        double nudge = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            for (int i = 0; i < M; ++i) {
                const Complex di = T.diag(i) - s * eps * alpha(i) - eps * eps + nudge;
                d[i] = di;
                b[i] = v(i);
            }
            for (int i = 0; i + 1 < M; ++i) dl[i] = du[i] = T.off(i);
            const lapack_int info =
                LAPACKE_zgtsv(LAPACK_COL_MAJOR, M, 1, dl.data(), d.data(), du.data(), b.data(), M);
            if (info == 0) break;
            if (info < 0) throw NumericError("tridiagonal solve rejected its arguments");
            nudge = (nudge == 0.0 ? 1e-14 : nudge * 100.0) * scale;
        }
        for (int i = 0; i < M; ++i) v(i) = b[i];
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v /= v(k);
    }
    return v;
}

double tail_mass(const Eigen::VectorXcd& F, double h, double x0) {
    double total = 0.0, tail = 0.0;
    for (Eigen::Index i = 0; i < F.size(); ++i) {
        const double m = std::norm(F(i));
        total += m;
        if ((i + 1) * h > x0 + kTailOffset) tail += m;
    }
    return total > 0.0 ? tail / total : 1.0;
}

double lowest_eigenvalue(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                         Eigen::VectorXd* vector) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    std::vector<double> d(diag.data(), diag.data() + n);
    std::vector<double> e(off.data(), off.data() + off.size());
    e.push_back(0.0);
    lapack_int found = 0;
    double w = 0.0;
    std::vector<double> z(vector ? n : 1);
    std::vector<lapack_int> ifail(n);
    const lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, vector ? 'V' : 'N', 'I', n, d.data(),
                                           e.data(), 0.0, 0.0, 1, 1, 0.0, &found, &w, z.data(), n,
                                           ifail.data());
    if (info != 0 || found != 1) throw NumericError("tridiagonal eigensolver did not converge");
    if (vector) *vector = Eigen::Map<Eigen::VectorXd>(z.data(), n);
    return w;
}

}  // namespace

PencilSpectrum pencil_spectrum(PencilSign sign, int l, double x0, double X, int M,
                               const PencilOptions& opt) {
    if (opt.enforce_density) {
        if (!(X > x0 + kTailOffset))
            throw InputError("box must extend at least 5 units beyond the soliton peak");
        if (M < 20.0 * X) throw InputError("pencil grid needs at least 20 nodes per unit length");
    }
    const SolitonProfile profile = unit_soliton(x0, opt.strength);
    const PencilLinearization lin = assemble_pencil(sign, profile, l, X, M);
    const SpectrumSample sample = eig_general(lin.matrix, false);

    PencilSpectrum out;
    out.sign = sign;
    out.l = l;
    out.x0 = x0;
    out.X = X;
    out.M = M;
    out.grid = lin.grid;
    out.modes.reserve(sample.values.size());
    const double s = sign_value(sign);
    for (const Complex& eps : sample.values) {
        PencilMode mode;
        mode.epsilon = eps;
        mode.lambda = lambda_from_epsilon(eps);
        mode.physical = eps.real() > 0.0;
        mode.near_jordan = std::abs(eps) <= kJordanEpsilon;
        if (opt.eigenfunctions && !mode.near_jordan) {
            mode.F = null_vector(lin.kinetic, lin.alpha, s, eps);
            mode.tail_mass = tail_mass(mode.F, lin.grid.h, x0);
            mode.localized = mode.tail_mass < 0.5;
        }
        out.modes.push_back(std::move(mode));
    }
    std::sort(out.modes.begin(), out.modes.end(), [](const PencilMode& a, const PencilMode& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    });
    return out;
}

double pencil_ground_level(const Tridiagonal& T, const Eigen::VectorXd& alpha, PencilSign sign,
                           double epsilon) {
    const Eigen::VectorXd d =
        T.diag - sign_value(sign) * epsilon * alpha -
        Eigen::VectorXd::Constant(T.diag.size(), epsilon * epsilon);
    return lowest_eigenvalue(d, T.off, nullptr);
}

std::vector<double> bound_state_epsilons(const Tridiagonal& T, const Eigen::VectorXd& alpha,
                                         PencilSign sign) {
    constexpr int kScan = 96;
    const double lo = -kEdge * (1.0 - 1e-9), hi = kEdge * (1.0 - 1e-9);
    auto g = [&](double e) { return pencil_ground_level(T, alpha, sign, e); };
    std::vector<double> roots;
    double e_prev = lo, g_prev = g(lo);
    for (int k = 1; k <= kScan; ++k) {
        const double e = lo + (hi - lo) * k / kScan;
        const double ge = g(e);
        if (g_prev == 0.0) {
            roots.push_back(e_prev);
        } else if ((g_prev < 0.0) != (ge < 0.0) && ge != 0.0) {
            boost::uintmax_t iters = 200;
            const auto bracket = boost::math::tools::toms748_solve(
                g, e_prev, e, g_prev, ge, boost::math::tools::eps_tolerance<double>(50), iters);
            roots.push_back(0.5 * (bracket.first + bracket.second));
        }
        e_prev = e;
        g_prev = ge;
    }
    return roots;
}

double locate_jordan_point(int l, double X, int M, double lo, double hi, double tolerance) {
    auto mu = [&](double x0) {
        const Tridiagonal T = assemble_kinetic(unit_soliton(x0), l, X, M);
        return lowest_eigenvalue(T.diag, T.off, nullptr);
    };
    double f_lo = mu(lo), f_hi = mu(hi);
    if ((f_lo < 0.0) == (f_hi < 0.0)) throw NumericError("Jordan point is not bracketed");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = mu(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

BoundStateBranch bound_state_branch(int l, double X, int M, const BranchOptions& opt) {
    if (opt.samples < 2) throw InputError("branch needs at least two x0 samples");
    if (!(opt.x0_max > opt.x0_min) || opt.x0_min < 0.0) throw InputError("invalid x0 range");
    if (!(X > opt.x0_max + kTailOffset))
        throw InputError("box must extend at least 5 units beyond the largest x0");
    BoundStateBranch branch;
    branch.l = l;
    branch.X = X;
    branch.M = M;
    std::optional<double> previous;
    for (int k = 0; k < opt.samples; ++k) {
        const double x0 = opt.x0_min + (opt.x0_max - opt.x0_min) * k / (opt.samples - 1);
        const SolitonProfile p = unit_soliton(x0);
        const Tridiagonal T = assemble_kinetic(p, l, X, M);
        const Eigen::VectorXd alpha = alpha_on_grid(p, X, M);
        const std::vector<double> roots = bound_state_epsilons(T, alpha, PencilSign::Plus);
        if (roots.empty()) {
            if (previous) {
                branch.truncation = "bound state left the spectrum at x0 = " + std::to_string(x0);
                break;
            }
            continue;
        }
        // Continuity in ϵ; the first sample takes the largest ϵ (the branch
        // enters from the continuum edge).
        double eps = roots.back();
        if (previous) {
            eps = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
                return std::abs(a - *previous) < std::abs(b - *previous);
            });
            if ((eps < 0.0) != (*previous < 0.0)) ++branch.epsilon_sign_changes;
        }
        previous = eps;
        Eigen::VectorXd F;
        lowest_eigenvalue(T.diag - eps * alpha - Eigen::VectorXd::Constant(M, eps * eps), T.off, &F);
        const bool localized = tail_mass(F.cast<Complex>(), X / (M + 1), x0) < 0.5;
        branch.samples.push_back({x0, 0.5 - eps * eps, eps, localized});
    }
    if (branch.samples.empty()) {
        branch.truncation = "no bound state in the x0 range";
        return branch;
    }
    if (branch.samples.front().x0 > opt.x0_min && branch.truncation.empty())
        branch.truncation = "bound state absent below x0 = " + std::to_string(branch.samples.front().x0);
    for (std::size_t k = 1; k < branch.samples.size(); ++k) {
        const auto& a = branch.samples[k - 1];
        const auto& b = branch.samples[k];
        if ((a.epsilon < 0.0) != (b.epsilon < 0.0)) {
            branch.x_J = locate_jordan_point(l, X, M, a.x0, b.x0, opt.x_J_tolerance);
            break;
        }
    }
    return branch;
}

JordanReport jordan_system_solve(int l, double x0, double X, int M) {
    const SolitonProfile p = unit_soliton(x0);
    const Tridiagonal T = assemble_kinetic(p, l, X, M);
    const Eigen::VectorXd alpha = alpha_on_grid(p, X, M);
    JordanReport r;
    r.x_J = x0;
    const double mu = lowest_eigenvalue(T.diag, T.off, &r.xi0);
    r.xi0 /= r.xi0.norm();
    r.kernel_residual = T.apply(r.xi0).norm();
    double tnorm = 0.0;
    for (int i = 0; i < M; ++i) {
        double row = std::abs(T.diag(i));
        if (i > 0) row += std::abs(T.off(i - 1));
        if (i + 1 < M) row += std::abs(T.off(i));
        tnorm = std::max(tnorm, row);
    }
    r.kernel_relative = r.kernel_residual / tnorm;
    (void)mu;
    if (r.kernel_relative > 1e-4)
        throw InputError("x0 is not a Jordan configuration: T has no numerical kernel");

    const Eigen::VectorXd b = alpha.cwiseProduct(r.xi0);
    const double kernel_part = r.xi0.dot(b);
    r.rhs_kernel_component = kernel_part / b.norm();
    const Eigen::VectorXd pb = b - kernel_part * r.xi0;

    // Bordered system [[T, Ξ₀], [Ξ₀ᵀ, 0]] keeps Ξ₁ ⟂ Ξ₀.
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * M);
    for (int i = 0; i < M; ++i) {
        entries.emplace_back(i, i, T.diag(i));
        if (i + 1 < M) {
            entries.emplace_back(i, i + 1, T.off(i));
            entries.emplace_back(i + 1, i, T.off(i));
        }
        entries.emplace_back(i, M, r.xi0(i));
        entries.emplace_back(M, i, r.xi0(i));
    }
    Eigen::SparseMatrix<double> K(M + 1, M + 1);
    K.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw NumericError("bordered Jordan system is singular");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M + 1);
    rhs.head(M) = pb;
    const Eigen::VectorXd sol = lu.solve(rhs);
    r.xi1 = sol.head(M);
    r.xi1_residual = (T.apply(r.xi1) - pb).norm() / pb.norm();
    return r;
}

Superpotential superpotential(int l, double x0, double X, int M, double strength) {
    if (M < 8) throw InputError("grid needs at least 8 interior nodes");
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>;
    const SolitonProfile p = unit_soliton(x0, strength);
    const double L = static_cast<double>(l) * (l + 1);
    auto rhs = [&](const State& y, State& dy, double x) {
        const double a = evaluate(p, x);
        dy[0] = y[1];
        dy[1] = (L / (x * x) - 0.5 * a * a + 0.5) * y[0];
    };
    Superpotential sp;
    sp.l = l;
    sp.x0 = x0;
    sp.X = X;
    sp.grid.h = X / (M + 1);
    sp.grid.nodes.resize(M);
    sp.w.resize(M);
    sp.u_sign.resize(M);

    // Frobenius start u = x^{l+1}(1 + c x²), c = V_reg(0) / (2(2l + 3)).
    const double a0 = evaluate(p, 0.0);
    const double c = (0.5 - 0.5 * a0 * a0) / (2.0 * (2 * l + 3));
    const double xs = std::min(1e-3, 0.25 * sp.grid.h);
    State y{std::pow(xs, l + 1) * (1.0 + c * xs * xs),
            (l + 1) * std::pow(xs, l) + (l + 3) * c * std::pow(xs, l + 2)};
    {
        const double n = std::abs(y[0]) + std::abs(y[1]);
        y[0] /= n;
        y[1] /= n;
    }
    auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    double x = xs;
    double u_prev = 0.0;
    for (int i = 0; i < M; ++i) {
        const double xi = (i + 1) * sp.grid.h;
        odeint::integrate_adaptive(stepper, rhs, y, x, xi, 0.01 * sp.grid.h);
        x = xi;
        sp.grid.nodes[i] = xi;
        sp.w(i) = y[1] / y[0];
        sp.u_sign[i] = y[0] > 0.0 ? 1 : (y[0] < 0.0 ? -1 : 0);
        if (i > 0 && sp.u_sign[i] != sp.u_sign[i - 1]) {
            sp.singular.push_back(i - 1);
            const double t = u_prev / (u_prev - y[0]);
            sp.zeros.push_back(xi - sp.grid.h + t * sp.grid.h);
        }
        const double n = std::abs(y[0]) + std::abs(y[1]);
        y[0] /= n;
        y[1] /= n;
        u_prev = y[0];
    }
    return sp;
}

DiracResidual dirac_residual(double epsilon, const Eigen::VectorXd& F, PencilSign sign,
                             const Superpotential& sp, double exclusion) {
    const int M = static_cast<int>(F.size());
    if (M != sp.w.size()) throw InputError("eigenfunction and superpotential grids differ");
    if (epsilon == 0.0) throw InputError("Dirac reconstruction needs a nonzero ϵ");
    const double h = sp.grid.h;
    const double s = sign_value(sign);
    const SolitonProfile p = unit_soliton(sp.x0);
    auto at = [&](int i) { return (i < 0 || i >= M) ? 0.0 : F(i); };

    Eigen::VectorXd psi2(M);
    for (int i = 0; i < M; ++i)
        psi2(i) = (-(at(i + 1) - at(i - 1)) / (2.0 * h) + sp.w(i) * F(i)) / epsilon;

    std::vector<bool> keep(M, true);
    for (int i = 0; i < M; ++i)
        for (double z : sp.zeros)
            if (std::abs(sp.grid.nodes[i] - z) < exclusion) keep[i] = false;

    const double fmax = F.cwiseAbs().maxCoeff();
    int support = 0, dropped = 0;
    for (int i = 0; i < M; ++i) {
        if (std::abs(F(i)) > 1e-3 * fmax) {
            ++support;
            if (!keep[i]) ++dropped;
        }
    }
    DiracResidual out;
    out.excluded_fraction = support ? static_cast<double>(dropped) / support : 0.0;
    out.reliable = out.excluded_fraction <= 0.2;

    double num = 0.0, den = 0.0;
    for (int i = 1; i + 1 < M; ++i) {
        if (!keep[i] || !keep[i - 1] || !keep[i + 1]) continue;
        const double a = evaluate(p, sp.grid.nodes[i]);
        const double d_psi2 = (psi2(i + 1) - psi2(i - 1)) / (2.0 * h);
        const double r1 = d_psi2 + sp.w(i) * psi2(i) - s * a * F(i) - epsilon * F(i);
        num += r1 * r1;
        den += F(i) * F(i) + psi2(i) * psi2(i);
    }
    if (den == 0.0) throw NumericError("exclusion zones cover the whole eigenfunction");
    out.value = std::sqrt(num / den);
    return out;
}

}  // namespace kreinamo
