#include "kreinamo/tracker.hpp"

#include "kreinamo/error.hpp"
#include "kreinamo/optimize.hpp"
#include "kreinamo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kreinamo {

std::vector<Complex> operator_spectrum(const AlphaProfile& profile, const BoundarySpec& bc, int M) {
    std::vector<Complex> values = eig_general(assemble(profile, bc, M).matrix, false).values;
    sort_by_real_desc(values);
    return values;
}

namespace {

struct Slice {
    double param = 0.0;
    std::vector<Complex> values;
};

double local_spacing(const std::vector<Complex>& s, std::size_t i) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.size(); ++j)
        if (j != i) d = std::min(d, std::abs(s[j] - s[i]));
    return std::max(d, 1e-8 * (1.0 + std::abs(s[i])));
}

class Walker {
public:
    Walker(const ProfileFamily& family, const BoundarySpec& bc, int M, const SweepOptions& opt,
           SweepResult& out)
        : family_(family), bc_(bc), M_(M), opt_(opt), out_(out) {}

    Slice solve(double p) {
        ++out_.solves;
        return {p, operator_spectrum(family_(p), bc_, M_)};
    }

    std::vector<std::size_t> walk(const Slice& a, const Slice& b, int depth,
                                  const std::vector<std::size_t>& idx) {
        const std::vector<std::size_t> perm = pair_spectra(a.values, b.values);
        bool jump = false;
        for (std::size_t i : idx) {
            const Complex moved = b.values[perm[i]] - a.values[i];
            if (std::abs(moved) > opt_.jump_fraction * local_spacing(a.values, i)) {
                jump = true;
                break;
            }
        }
        if (jump) {
            if (depth < opt_.max_depth) {
                const Slice mid = solve(0.5 * (a.param + b.param));
                const auto idx_mid = walk(a, mid, depth + 1, idx);
                return walk(mid, b, depth + 1, idx_mid);
            }
            out_.exhausted.emplace_back(a.param, b.param);
        }
        std::vector<std::size_t> next(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            next[k] = perm[idx[k]];
            append(k, b.param, b.values[next[k]]);
        }
        return next;
    }

    void append(std::size_t k, double p, Complex v) {
        out_.branches[k].points.push_back({p, v, M_, is_real(v)});
    }

private:
    const ProfileFamily& family_;
    const BoundarySpec& bc_;
    int M_;
    const SweepOptions& opt_;
    SweepResult& out_;
};

Complex nearest(const std::vector<Complex>& values, Complex target, bool upper_only) {
    Complex best = values.front();
    double d = std::numeric_limits<double>::infinity();
    for (const Complex& v : values) {
        if (upper_only && v.imag() < 0.0) continue;
        const double e = std::abs(v - target);
        if (e < d) {
            d = e;
            best = v;
        }
    }
    return best;
}

// Separation of the two eigenvalues nearest `target`.
double pair_separation(const std::vector<Complex>& values, Complex target) {
    std::vector<Complex> v = values;
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), [&](Complex a, Complex b) {
        return std::abs(a - target) < std::abs(b - target);
    });
    return std::abs(v[0] - v[1]);
}

}  // namespace

SweepResult sweep(const ProfileFamily& family, double lo, double hi, int steps,
                  const BoundarySpec& bc, int M, const SweepOptions& opt) {
    if (steps < 2) throw InputError("sweep needs at least two parameter steps");
    if (!(hi > lo)) throw InputError("sweep range must be increasing");
    if (opt.track_count < 1) throw InputError("track_count must be positive");
    SweepResult out;
    out.bc = bc;
    out.M = M;
    out.lo = lo;
    out.hi = hi;

    std::vector<Slice> base(static_cast<std::size_t>(steps));
    parallel_for(base.size(), opt.workers, [&](std::size_t k) {
        const double p = lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
        base[k] = {p, operator_spectrum(family(p), bc, M)};
    });
    out.solves = steps;

    const std::size_t tracked = std::min<std::size_t>(opt.track_count, base.front().values.size());
    out.branches.resize(tracked);
    std::vector<std::size_t> idx(tracked);
    std::iota(idx.begin(), idx.end(), 0);
    Walker walker(family, bc, M, opt, out);
    for (std::size_t k = 0; k < tracked; ++k) {
        out.branches[k].id = static_cast<int>(k);
        walker.append(k, base.front().param, base.front().values[k]);
    }
    for (std::size_t s = 0; s + 1 < base.size(); ++s) idx = walker.walk(base[s], base[s + 1], 0, idx);
    return out;
}

DetectResult detect_branch_points(const SweepResult& sw, const ProfileFamily& family,
                                  const DetectOptions& opt) {
    DetectResult out;
    const double ptol = opt.parameter_tolerance * (sw.hi - sw.lo);
    auto real = [&](Complex v) { return is_real(v, opt.realness_tolerance); };

    for (const Branch& br : sw.branches) {
        for (std::size_t i = 0; i + 1 < br.points.size(); ++i) {
            const BranchSample& a = br.points[i];
            const BranchSample& b = br.points[i + 1];
            const bool ra = real(a.lambda), rb = real(b.lambda);
            if (ra == rb) continue;
            const std::size_t ci = ra ? i + 1 : i;
            const Complex own = br.points[ci].lambda;

            int partner = -1;
            for (const Branch& other : sw.branches) {
                if (other.id == br.id || other.points.size() != br.points.size()) continue;
                const Complex v = other.points[ci].lambda;
                if (std::abs(v - std::conj(own)) <= 1e-9 * (1.0 + std::abs(own))) {
                    partner = other.id;
                    break;
                }
            }
            if (own.imag() < 0.0 && partner >= 0) continue;

            auto target = [&](double p) {
                const double t = (p - a.param) / (b.param - a.param);
                return Complex(a.lambda.real() + t * (b.lambda.real() - a.lambda.real()),
                               std::abs(a.lambda.imag()) +
                                   t * (std::abs(b.lambda.imag()) - std::abs(a.lambda.imag())));
            };
            double p_real = ra ? a.param : b.param;
            double p_cplx = ra ? b.param : a.param;
            while (std::abs(p_cplx - p_real) > ptol) {
                const double mid = 0.5 * (p_real + p_cplx);
                const auto values = operator_spectrum(family(mid), sw.bc, sw.M);
                if (real(nearest(values, target(mid), true)))
                    p_real = mid;
                else
                    p_cplx = mid;
            }
            const auto v_real = operator_spectrum(family(p_real), sw.bc, sw.M);
            const auto v_cplx = operator_spectrum(family(p_cplx), sw.bc, sw.M);
            const Complex z_cplx = nearest(v_cplx, target(p_cplx), true);
            const Complex z_real = nearest(v_real, target(p_real), true);
            if (!real(z_real) || real(z_cplx)) {
                out.flagged.emplace_back(a.param, b.param);
                continue;
            }
            BranchPoint bp;
            bp.order = 2;
            bp.param_1 = 0.5 * (p_real + p_cplx);
            bp.lambda = Complex(z_cplx.real(), 0.0);
            bp.branch_ids = {br.id, partner};
            bp.residual = pair_separation(v_real, Complex(z_cplx.real(), 0.0));
            out.points.push_back(bp);
        }
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const BranchPoint& x, const BranchPoint& y) { return x.param_1 < y.param_1; });
    return out;
}

double coalescence_objective(const std::vector<Complex>& spectrum, int candidates,
                             std::array<Complex, 3>* cluster) {
    const int K = std::min<int>(candidates, static_cast<int>(spectrum.size()));
    if (K < 3) throw InputError("coalescence objective needs at least three eigenvalues");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
            for (int k = j + 1; k < K; ++k) {
                const double t = std::abs(spectrum[i] - spectrum[j]) +
                                 std::abs(spectrum[i] - spectrum[k]) +
                                 std::abs(spectrum[j] - spectrum[k]);
                if (t < best) {
                    best = t;
                    if (cluster) *cluster = {spectrum[i], spectrum[j], spectrum[k]};
                }
            }
    return best;
}

namespace {

struct TripleSearch {
    const ProfileFamily2D& family;
    const BoundarySpec& bc;
    int M;
    const TripleSearchOptions& opt;
    int evaluations = 0;

    double objective(double zeta, double C) {
        ++evaluations;
        if (zeta < opt.zeta_lo || zeta > opt.zeta_hi || C < opt.C_lo || C > opt.C_hi)
            return std::numeric_limits<double>::infinity();
        return coalescence_objective(operator_spectrum(family(zeta, C), bc, M), opt.candidates);
    }

    NelderMeadResult polish(double zeta, double C, double step_zeta, double step_C) {
        auto f = [&](const std::vector<double>& x) { return objective(x[0], x[1]); };
        NelderMeadOptions nm;
        nm.max_evaluations = opt.max_evaluations;
        nm.x_tolerance = opt.x_tolerance;
        NelderMeadResult best = nelder_mead(f, {zeta, C}, {step_zeta, step_C}, nm);
        for (int r = 0; r < opt.restarts; ++r) {
            step_zeta *= 0.25;
            step_C *= 0.25;
            NelderMeadResult again = nelder_mead(f, best.x, {step_zeta, step_C}, nm);
            if (again.value <= best.value) best = again;
        }
        return best;
    }

    TripleResult result(const std::vector<double>& x) {
        TripleResult r;
        std::array<Complex, 3> cluster{};
        const double t = coalescence_objective(operator_spectrum(family(x[0], x[1]), bc, M),
                                               opt.candidates, &cluster);
        const Complex mean = (cluster[0] + cluster[1] + cluster[2]) / 3.0;
        r.cluster = cluster;
        r.point.order = 3;
        r.point.param_1 = x[0];
        r.point.param_2 = x[1];
        r.point.lambda = mean;
        r.point.branch_ids = {0, 1, 2};
        r.point.residual = t;
        r.relative_residual = t / std::max(std::abs(mean), 1e-300);
        r.found = r.relative_residual < opt.threshold;
        r.evaluations = evaluations;
        return r;
    }
};

void validate_window(const TripleSearchOptions& opt) {
    if (!(opt.zeta_hi > opt.zeta_lo) || !(opt.C_hi > opt.C_lo))
        throw InputError("triple-point window must have positive extent");
    if (opt.grid < 2) throw InputError("triple-point grid needs at least two points per axis");
    if (opt.candidates < 3) throw InputError("triple-point search needs at least three candidates");
}

}  // namespace

TripleResult find_triple_point(const ProfileFamily2D& family, const BoundarySpec& bc, int M,
                               const TripleSearchOptions& opt) {
    validate_window(opt);
    TripleSearch search{family, bc, M, opt};
    const int g = opt.grid;
    const double dz = (opt.zeta_hi - opt.zeta_lo) / (g - 1);
    const double dc = (opt.C_hi - opt.C_lo) / (g - 1);
    std::vector<double> grid_values(static_cast<std::size_t>(g * g));
    parallel_for(grid_values.size(), opt.workers, [&](std::size_t k) {
        const double zeta = opt.zeta_lo + dz * static_cast<double>(k / g);
        const double C = opt.C_lo + dc * static_cast<double>(k % g);
        grid_values[k] = coalescence_objective(operator_spectrum(family(zeta, C), bc, M),
                                               opt.candidates);
    });
    search.evaluations += g * g;

    std::vector<std::size_t> order(grid_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return grid_values[a] < grid_values[b] || (grid_values[a] == grid_values[b] && a < b);
    });
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    const int starts = std::min<int>(opt.starts, static_cast<int>(order.size()));
    for (int s = 0; s < starts; ++s) {
        const std::size_t k = order[static_cast<std::size_t>(s)];
        const double zeta = opt.zeta_lo + dz * static_cast<double>(k / g);
        const double C = opt.C_lo + dc * static_cast<double>(k % g);
        const double sz = (zeta + 0.5 * dz <= opt.zeta_hi) ? 0.5 * dz : -0.5 * dz;
        const double sc = (C + 0.5 * dc <= opt.C_hi) ? 0.5 * dc : -0.5 * dc;
        NelderMeadResult r = search.polish(zeta, C, sz, sc);
        if (r.value < best.value) best = r;
    }
    return search.result(best.x);
}

TripleResult refine_triple_point(const ProfileFamily2D& family, double zeta, double C,
                                 const BoundarySpec& bc, int M, const TripleSearchOptions& opt) {
    validate_window(opt);
    TripleSearch search{family, bc, M, opt};
    const double sz = 0.01 * (opt.zeta_hi - opt.zeta_lo);
    const double sc = 0.01 * (opt.C_hi - opt.C_lo);
    NelderMeadResult r = search.polish(zeta, C, zeta + sz <= opt.zeta_hi ? sz : -sz,
                                       C + sc <= opt.C_hi ? sc : -sc);
    return search.result(r.x);
}

CuspReport cusp_diagnostic(const ProfileFamily2D& family, double zeta, double C_centre,
                           Complex lambda_centre, double half_width, int half_samples,
                           const BoundarySpec& bc, int M, int workers) {
    if (half_samples < 4) throw InputError("cusp slice needs at least four samples per side");
    if (!(half_width > 0.0)) throw InputError("cusp slice width must be positive");
    const int n = 2 * half_samples + 1;
    const double d = half_width / half_samples;
    CuspReport rep;
    rep.C.resize(n);
    rep.max_im.resize(n);
    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t k) {
        const double C = C_centre + d * (static_cast<double>(k) - half_samples);
        std::vector<Complex> v = operator_spectrum(family(zeta, C), bc, M);
        std::partial_sort(v.begin(), v.begin() + 3, v.end(), [&](Complex a, Complex b) {
            return std::abs(a - lambda_centre) < std::abs(b - lambda_centre);
        });
        rep.C[k] = C;
        rep.max_im[k] =
            std::max({std::abs(v[0].imag()), std::abs(v[1].imag()), std::abs(v[2].imag())});
    });
    std::vector<double> slope(n - 1);
    for (int i = 0; i + 1 < n; ++i) slope[i] = (rep.max_im[i + 1] - rep.max_im[i]) / d;
    const int c = half_samples;
    rep.left_slope = slope[c - 1];
    rep.right_slope = slope[c];
    for (int i = 0; i + 1 < n - 1; ++i) {
        const bool outer = (i + 1 <= c - 2) || (i >= c + 1);
        if (outer) rep.smooth_variation = std::max(rep.smooth_variation, std::abs(slope[i + 1] - slope[i]));
    }
    rep.is_cusp = std::abs(rep.right_slope - rep.left_slope) > 10.0 * rep.smooth_variation;
    return rep;
}

namespace {

double interpolate(const Eigen::VectorXcd& F, double h, double x) {
    // F holds nodes x_i = (i+1)h with zero Dirichlet values at both ends.
    const double s = x / h;
    const auto i = static_cast<Eigen::Index>(std::floor(s));
    const double t = s - static_cast<double>(i);
    auto at = [&](Eigen::Index k) { return (k < 1 || k > F.size()) ? 0.0 : F(k - 1).real(); };
    return (1.0 - t) * at(i) + t * at(i + 1);
}

double overlap(const Eigen::VectorXcd& Fa, double ha, const Eigen::VectorXcd& Fb, double hb,
               double length) {
    constexpr int kSamples = 4000;
    const double dx = length / kSamples;
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const double x = (k + 0.5) * dx;
        const double fa = interpolate(Fa, ha, x), fb = interpolate(Fb, hb, x);
        ab += fa * fb;
        aa += fa * fa;
        bb += fb * fb;
    }
    return (aa > 0.0 && bb > 0.0) ? std::abs(ab) / std::sqrt(aa * bb) : 0.0;
}

}  // namespace

CutoffTable cutoff_study(const SolitonProfile& profile, int l, const std::vector<double>& X,
                         int mode_count, const CutoffOptions& opt) {
    if (X.size() < 3) throw InputError("cutoff study needs at least three box lengths");
    for (std::size_t k = 1; k < X.size(); ++k)
        if (!(X[k] > X[k - 1])) throw InputError("box lengths must be increasing");
    if (mode_count < 1) throw InputError("mode count must be positive");
    if (profile.a != 1.0) throw InputError("cutoff study uses the unit-width soliton");
    if (opt.density < 20.0) throw InputError("grid density must be at least 20 nodes per unit");

    CutoffTable table;
    table.l = l;
    table.profile = profile;
    table.X = X;
    table.M.resize(X.size());
    for (std::size_t k = 0; k < X.size(); ++k)
        table.M[k] = static_cast<int>(std::ceil(opt.density * X[k]));

    const std::array<PencilSign, 2> signs{PencilSign::Plus, PencilSign::Minus};
    std::vector<PencilSpectrum> spectra(2 * X.size());
    parallel_for(spectra.size(), opt.workers, [&](std::size_t job) {
        const std::size_t k = job / 2;
        PencilOptions po;
        po.strength = profile.strength;
        po.enforce_density = false;
        spectra[job] = pencil_spectrum(signs[job % 2], l, profile.x0, X[k], table.M[k], po);
    });

    for (std::size_t s = 0; s < signs.size(); ++s) {
        std::vector<std::vector<const PencilMode*>> picked(X.size());
        for (std::size_t k = 0; k < X.size(); ++k)
            for (const PencilMode& m : spectra[2 * k + s].modes)
                if (m.physical && is_real(m.lambda) && std::abs(m.epsilon.imag()) == 0.0)
                    picked[k].push_back(&m);
        for (int n = 1; n <= mode_count; ++n) {
            bool available = true;
            for (const auto& p : picked) available = available && static_cast<int>(p.size()) >= n;
            if (!available) break;
            CutoffMode mode;
            mode.sign = signs[s];
            mode.n = n;
            for (std::size_t k = 0; k < X.size(); ++k) {
                const PencilMode& m = *picked[k][static_cast<std::size_t>(n - 1)];
                mode.lambda.push_back(m.lambda);
                mode.epsilon.push_back(m.epsilon);
                mode.localized.push_back(m.localized);
                if (k > 0) {
                    const PencilMode& prev = *picked[k - 1][static_cast<std::size_t>(n - 1)];
                    const double ov = overlap(prev.F, spectra[2 * (k - 1) + s].grid.h, m.F,
                                              spectra[2 * k + s].grid.h, X.front());
                    mode.overlap.push_back(ov);
                    if (ov < opt.overlap_threshold) mode.identity_lost = true;
                }
            }
            const double base = std::abs(mode.lambda.front());
            for (const Complex& v : mode.lambda)
                mode.max_relative_variation =
                    std::max(mode.max_relative_variation, std::abs(v - mode.lambda.front()) / base);
            const bool decaying = std::all_of(mode.lambda.begin(), mode.lambda.end(),
                                              [](Complex v) { return v.real() < 0.0; });
            if (decaying) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                const double N = static_cast<double>(X.size());
                for (std::size_t k = 0; k < X.size(); ++k) {
                    const double lx = std::log(X[k]), ly = std::log(std::abs(mode.lambda[k].real()));
                    sx += lx;
                    sy += ly;
                    sxx += lx * lx;
                    sxy += lx * ly;
                }
                mode.exponent = (N * sxy - sx * sy) / (N * sxx - sx * sx);
            }
            table.modes.push_back(std::move(mode));
        }
    }
    return table;
}

}  // namespace kreinamo
