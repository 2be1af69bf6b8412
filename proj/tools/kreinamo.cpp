#include "kreinamo/acceptance.hpp"
#include "kreinamo/error.hpp"
#include "kreinamo/io.hpp"
#include "kreinamo/mesh.hpp"
#include "kreinamo/parallel.hpp"
#include "kreinamo/profiles.hpp"
#include "kreinamo/soliton.hpp"
#include "kreinamo/tracker.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

using json = nlohmann::json;
using namespace kreinamo;

namespace {

// Typed access to one JSON object; keys never read are reported by finish().
class Config {
public:
    Config(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {
        if (!j_.is_object()) throw InputError(where_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw InputError(where_ + ": missing required key '" + key + "'");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw InputError(where_ + ": '" + key + "' must be a finite number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw InputError(where_ + ": '" + key + "' must be an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw InputError(where_ + ": '" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) throw InputError(where_ + ": '" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::size_t min_size = 1) {
        const json& v = raw(key);
        if (!v.is_array() || v.size() < min_size)
            throw InputError(where_ + ": '" + key + "' must be an array of at least " +
                             std::to_string(min_size) + " numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw InputError(where_ + ": '" + key + "' must hold numbers only");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::pair<double, double> range(const std::string& key) {
        const auto v = numbers(key, 2);
        if (v.size() != 2 || !(v[1] > v[0]))
            throw InputError(where_ + ": '" + key + "' must be [lo, hi] with lo < hi");
        return {v[0], v[1]};
    }

    Config object(const std::string& key) { return Config(raw(key), where_ + "." + key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                throw InputError(where_ + ": unknown key '" + it.key() + "'");
    }

    void mark(const std::string& key) { used_.insert(key); }

private:
    json j_;
    std::string where_;
    std::set<std::string> used_;
};

struct Overrides {
    std::optional<int> M;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

struct Context {
    Config cfg;
    int workers = 1;
    std::string out_dir = "out";
    std::optional<int> M_override{};

    int grid(int fallback) {
        if (M_override) {
            cfg.mark("M");
            return *M_override;
        }
        return cfg.integer("M", fallback);
    }
};

int default_workers() {
    if (const char* env = std::getenv("KREINAMO_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw InputError("KREINAMO_WORKERS must be a positive integer");
        return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config file " + path + " is not valid JSON: " + e.what());
    }
}

Context make_context(const std::string& command, const std::string& path, const Overrides& ov) {
    Context ctx{Config(load_config(path), "config")};
    if (ctx.cfg.has("command") && ctx.cfg.text("command", "") != command)
        throw InputError("config is for command '" + ctx.cfg.text("command", "") + "', not '" + command + "'");
    ctx.cfg.mark("command");
    ctx.workers = ov.workers ? *ov.workers : ctx.cfg.integer("workers", default_workers());
    if (ov.workers) ctx.cfg.mark("workers");
    if (ctx.workers < 1) throw InputError("worker count must be positive");
    ctx.out_dir = ov.out_dir ? *ov.out_dir : ctx.cfg.text("out_dir", "out");
    if (ov.out_dir) ctx.cfg.mark("out_dir");
    ctx.M_override = ov.M;
    return ctx;
}

BoundarySpec parse_bc(Config c) {
    const std::string kind = c.text("kind", "vacuum");
    BoundarySpec bc;
    if (kind == "vacuum")
        bc = BoundarySpec::vacuum(c.integer("l", 0));
    else if (kind == "dirichlet")
        bc = BoundarySpec::dirichlet(c.integer("l", 0));
    else if (kind == "box")
        bc = BoundarySpec::box(c.integer("l", 0), c.number("X"));
    else
        throw InputError("bc.kind must be 'vacuum', 'dirichlet' or 'box'");
    c.finish();
    bc.validate();
    return bc;
}

Perturbation parse_phi(Config c) {
    json f{{"variant", "fourier"}, {"alpha0", c.number("constant", 0.0)}};
    f["terms"] = c.has("terms") ? c.raw("terms") : json::array();
    c.finish();
    const auto prof = std::get<FourierProfile>(profile_from_json(f));
    return Perturbation{prof.alpha0, prof.terms};
}

ProfileFamily parse_family(Config c, const BoundarySpec& bc) {
    const std::string kind = c.text("kind", "");
    ProfileFamily fam;
    if (kind == "constant") {
        fam = [](double a) -> AlphaProfile { return ConstantProfile{a}; };
    } else if (kind == "reversal_quartic") {
        fam = [](double C) -> AlphaProfile { return reversal_quartic(C); };
    } else if (kind == "triple_quartic") {
        const double zeta = c.number("zeta");
        fam = [zeta](double C) -> AlphaProfile { return triple_family_quartic(zeta, C); };
    } else if (kind == "perturbed") {
        const Perturbation phi = parse_phi(c.object("phi"));
        const double amp = c.number("amplitude");
        fam = [phi, amp](double a) -> AlphaProfile { return perturbed_profile(a, phi, amp); };
    } else if (kind == "soliton_x0") {
        if (bc.kind != BoundaryKind::BoxDirichlet) throw InputError("soliton_x0 family needs a box bc");
        const double a = c.number("a", 1.0);
        fam = [a](double x0) -> AlphaProfile { return SolitonProfile{a, x0, 1.0}; };
    } else {
        throw InputError("family.kind must be constant, reversal_quartic, triple_quartic, perturbed or soliton_x0");
    }
    c.finish();
    return fam;
}

std::string to_text(const std::function<void(std::ostream&)>& fn) {
    std::ostringstream ss;
    fn(ss);
    return ss.str();
}

std::string svg_text(const std::vector<PlotPanel>& panels) {
    return to_text([&](std::ostream& os) { write_svg(os, panels); });
}

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

int cmd_spectrum(Context& ctx) {
    Config& c = ctx.cfg;
    const BoundarySpec bc = c.has("bc") ? parse_bc(c.object("bc")) : BoundarySpec::vacuum(1);
    const ProfileFamily fam = parse_family(c.object("family"), bc);
    const auto [lo, hi] = c.range("range");
    const int steps = c.integer("steps", 41);
    const int M = ctx.grid(300);
    SweepOptions so;
    so.track_count = c.integer("track", 8);
    so.jump_fraction = c.number("jump_fraction", 0.05);
    so.max_depth = c.integer("max_depth", 4);
    so.workers = ctx.workers;
    const bool detect = c.flag("detect", true);
    c.finish();

    const SweepResult sw = sweep(fam, lo, hi, steps, bc, M, so);
    DetectResult bp;
    if (detect) bp = detect_branch_points(sw, fam);

    // First sign change of the leading real part.
    std::optional<double> crossing;
    const std::size_t npts = sw.branches.front().points.size();
    auto lead = [&](std::size_t i) {
        double v = -HUGE_VAL;
        for (const Branch& b : sw.branches) v = std::max(v, b.points[i].lambda.real());
        return v;
    };
    for (std::size_t i = 1; i < npts && !crossing; ++i) {
        const double a = lead(i - 1), b = lead(i);
        if ((a < 0.0) != (b < 0.0)) {
            const double pa = sw.branches.front().points[i - 1].param;
            const double pb = sw.branches.front().points[i].param;
            crossing = pa + (pb - pa) * a / (a - b);
        }
    }

    const auto csv = write_file(ctx.out_dir, "branches.csv",
                                to_text([&](std::ostream& os) { write_branches_csv(os, sw); }));
    write_file(ctx.out_dir, "branch_points.csv",
               to_text([&](std::ostream& os) { write_branch_points_csv(os, bp.points); }));
    PlotPanel re{"Re λ", "parameter", "Re λ", {}, false}, im{"Im λ ≥ 0", "parameter", "Im λ", {}, true};
    for (const Branch& b : sw.branches) {
        PlotSeries sr{"branch " + std::to_string(b.id), {}}, si = sr;
        for (const BranchSample& p : b.points) {
            sr.points.emplace_back(p.param, p.lambda.real());
            if (p.lambda.imag() >= 0.0) si.points.emplace_back(p.param, p.lambda.imag());
        }
        re.series.push_back(std::move(sr));
        im.series.push_back(std::move(si));
    }
    write_file(ctx.out_dir, "spectrum.svg", svg_text({re, im}));

    json s{{"command", "spectrum"}, {"branches", sw.branches.size()}, {"branch_points", bp.points.size()},
           {"flagged_intervals", bp.flagged.size()}, {"solves", sw.solves},
           {"exhausted_intervals", sw.exhausted.size()}, {"M", M}, {"csv", csv}};
    s["leading_zero_crossing"] = crossing ? json(*crossing) : json(nullptr);
    print_summary(s);
    return 0;
}

int cmd_triple(Context& ctx) {
    Config& c = ctx.cfg;
    TripleSearchOptions opt;
    if (c.has("window")) {
        Config w = c.object("window");
        if (w.has("zeta")) std::tie(opt.zeta_lo, opt.zeta_hi) = w.range("zeta");
        if (w.has("C")) std::tie(opt.C_lo, opt.C_hi) = w.range("C");
        w.finish();
    }
    const int l = c.integer("l", 1);
    const BoundarySpec bc = c.has("bc") ? parse_bc(c.object("bc")) : BoundarySpec::vacuum(l);
    if (bc.l != l) throw InputError("bc.l disagrees with l");
    const int M = ctx.grid(300);
    opt.grid = c.integer("grid", opt.grid);
    opt.candidates = c.integer("candidates", opt.candidates);
    opt.starts = c.integer("starts", opt.starts);
    opt.restarts = c.integer("restarts", opt.restarts);
    opt.max_evaluations = c.integer("max_evaluations", opt.max_evaluations);
    opt.x_tolerance = c.number("x_tolerance", opt.x_tolerance);
    opt.threshold = c.number("threshold", opt.threshold);
    opt.workers = ctx.workers;
    const int refine_M = c.integer("refine_M", 0);
    const bool cusp = c.flag("cusp", true);
    c.finish();

    const ProfileFamily2D fam = [](double z, double C) -> AlphaProfile { return triple_family_quartic(z, C); };
    const TripleResult r = find_triple_point(fam, bc, M, opt);
    json out{{"zeta", r.point.param_1}, {"C", *r.point.param_2}, {"residual", r.point.residual},
             {"relative_residual", r.relative_residual}, {"found", r.found},
             {"lambda", complex_json(r.point.lambda)}, {"M", M}, {"evaluations", r.evaluations}};
    std::vector<BranchPoint> points{r.point};
    if (refine_M > 0) {
        const TripleResult f = refine_triple_point(fam, r.point.param_1, *r.point.param_2, bc, refine_M, opt);
        out["refined"] = {{"M", refine_M}, {"zeta", f.point.param_1}, {"C", *f.point.param_2},
                          {"residual", f.point.residual}, {"relative_residual", f.relative_residual},
                          {"found", f.found}};
        points.push_back(f.point);
    }
    if (cusp) {
        const CuspReport cr = cusp_diagnostic(fam, r.point.param_1, *r.point.param_2, r.point.lambda,
                                              0.02, 8, bc, M, ctx.workers);
        out["cusp"] = {{"is_cusp", cr.is_cusp}, {"left_slope", cr.left_slope},
                       {"right_slope", cr.right_slope}, {"smooth_variation", cr.smooth_variation}};
        PlotPanel p{"max |Im λ| near the triple point", "C", "max |Im λ|", {}, false};
        PlotSeries s{"slice", {}};
        for (std::size_t i = 0; i < cr.C.size(); ++i) s.points.emplace_back(cr.C[i], cr.max_im[i]);
        p.series.push_back(s);
        write_file(ctx.out_dir, "cusp.svg", svg_text({p}));
    }
    write_file(ctx.out_dir, "triple.json", out.dump(2) + "\n");
    write_file(ctx.out_dir, "triple_point.csv",
               to_text([&](std::ostream& os) { write_branch_points_csv(os, points); }));
    json s = out;
    s["command"] = "triple";
    print_summary(s);
    return 0;
}

int cmd_mesh(Context& ctx, std::optional<int> l_flag, std::optional<double> amax_flag,
             std::optional<int> nmax_flag) {
    Config& c = ctx.cfg;
    const int l = l_flag ? *l_flag : c.integer("l", 0);
    const double amax = amax_flag ? *amax_flag : c.number("alpha0_max", 25.0);
    const int nmax = nmax_flag ? *nmax_flag : c.integer("n_max", 6);
    const int samples = c.integer("samples", 201);
    c.mark("l");
    c.mark("alpha0_max");
    c.mark("n_max");
    c.finish();
    if (l < 0 || nmax < 1 || !(amax > 0.0) || samples < 2)
        throw InputError("mesh needs l ≥ 0, n_max ≥ 1, alpha0_max > 0 and samples ≥ 2");

    const auto dps = diabolical_points(l, nmax, DpWindow{0.0, amax});
    const auto csv = write_file(ctx.out_dir, "mesh.csv",
                                to_text([&](std::ostream& os) { write_mesh_csv(os, l, nmax, amax, samples); }));
    write_file(ctx.out_dir, "mesh_dps.csv", to_text([&](std::ostream& os) { write_dp_csv(os, dps); }));
    PlotPanel p{"spectral mesh, l = " + std::to_string(l), "α₀", "λ", {}, false};
    for (const RadialMode& mode : radial_modes(l, nmax))
        for (int s : {1, -1}) {
            PlotSeries ser{"n=" + std::to_string(mode.n) + (s > 0 ? "+" : "-"), {}};
            ser.points.emplace_back(0.0, mesh_eigenvalue(mode, s, 0.0));
            ser.points.emplace_back(amax, mesh_eigenvalue(mode, s, amax));
            p.series.push_back(ser);
        }
    PlotSeries dp_series{"diabolical points", {}};
    PlotPanel q{"diabolical points", "α₀", "λ₀", {}, true};
    for (const auto& d : dps) dp_series.points.emplace_back(d.alpha0_c, d.lambda0);
    q.series.push_back(dp_series);
    write_file(ctx.out_dir, "mesh.svg", svg_text({p, q}));
    print_summary({{"command", "mesh"}, {"l", l}, {"n_max", nmax}, {"alpha0_max", amax},
                   {"diabolical_points", dps.size()}, {"csv", csv}});
    return 0;
}

std::vector<DiabolicalPoint> select_dps(Config& c, int l, int nmax) {
    auto all = diabolical_points(l, nmax);
    if (!c.has("dps")) return all;
    const json& sel = c.raw("dps");
    if (!sel.is_array()) throw InputError("'dps' must be an array of {n, eps, m, delta}");
    std::vector<DiabolicalPoint> out;
    for (const auto& e : sel) {
        Config d(e, "config.dps[]");
        const int n = d.integer("n"), eps = d.integer("eps"), m = d.integer("m"), delta = d.integer("delta");
        d.finish();
        bool found = false;
        for (const auto& dp : all) {
            const bool same = dp.n == n && dp.eps == eps && dp.m == m && dp.delta == delta;
            const bool swapped = dp.n == m && dp.eps == delta && dp.m == n && dp.delta == eps;
            if (same || swapped) {
                out.push_back(dp);
                found = true;
                break;
            }
        }
        if (!found) throw InputError("requested crossing is not a diabolical point within n_max");
    }
    return out;
}

int cmd_unfold(Context& ctx) {
    Config& c = ctx.cfg;
    const Perturbation phi = parse_phi(c.object("phi"));
    const double amp = c.number("amplitude", 0.05);
    const int nmax = c.integer("n_max", 6);
    const int l = c.integer("l", 0);
    const int M = ctx.grid(400);
    const auto dps = select_dps(c, l, nmax);
    QuadratureOptions quad;
    if (c.has("quadrature")) {
        Config q = c.object("quadrature");
        quad.panels = q.integer("panels", quad.panels);
        quad.points = q.integer("points", quad.points);
        quad.tolerance = q.number("tolerance", quad.tolerance);
        quad.max_doublings = q.integer("max_doublings", quad.max_doublings);
        q.finish();
        if (quad.panels < 1 || quad.points < 1 || quad.max_doublings < 0 || !(quad.tolerance > 0.0))
            throw InputError("config.quadrature: panels, points must be positive and tolerance > 0");
    }
    c.finish();

    std::vector<ResonanceRow> rows(dps.size());
    json list = json::array();
    parallel_for(dps.size(), ctx.workers, [&](std::size_t i) {
        rows[i].dp = dps[i];
        rows[i].prediction = dp_unfold(dps[i], phi, amp, quad);
        rows[i].observed_plus = observe_split(dps[i], phi, amp, M);
    });
    int agree = 0, compared = 0;
    for (const auto& r : rows) {
        const Complex pred = amp * (r.prediction.lambda1[0] - r.prediction.lambda1[1]);
        const Complex obs = r.observed_plus->split;
        const double err = std::min(std::abs(obs - pred), std::abs(obs + pred));
        // First-order splittings below 1e-6 are zero to quadrature accuracy.
        const bool nonzero = std::abs(pred) > 1e-6 * amp;
        const double rel = nonzero ? err / std::abs(pred) : HUGE_VAL;
        compared += nonzero;
        if (rel <= 0.1) ++agree;
        list.push_back({{"n", r.dp.n}, {"eps", r.dp.eps}, {"m", r.dp.m}, {"delta", r.dp.delta},
                        {"alpha0_c", r.dp.alpha0_c}, {"lambda0", r.dp.lambda0}, {"same_type", r.dp.same_type},
                        {"lambda1", {complex_json(r.prediction.lambda1[0]), complex_json(r.prediction.lambda1[1])}},
                        {"complex_split", r.prediction.complex_split},
                        {"predicted_split", complex_json(pred)}, {"observed_split", complex_json(obs)},
                        {"relative_error", std::isfinite(rel) ? json(rel) : json(nullptr)}});
    }
    const auto csv = write_file(ctx.out_dir, "unfold.csv",
                                to_text([&](std::ostream& os) { write_resonance_csv(os, rows); }));
    write_file(ctx.out_dir, "unfold.json", list.dump(2) + "\n");
    print_summary({{"command", "unfold"}, {"diabolical_points", rows.size()}, {"nonzero_splits", compared},
                   {"within_10_percent", agree},
                   {"amplitude", amp}, {"M", M}, {"csv", csv}});
    return 0;
}

int cmd_resonance(Context& ctx) {
    Config& c = ctx.cfg;
    ResonanceOptions opt;
    const Perturbation phi = parse_phi(c.object("phi"));
    opt.amplitude = c.number("amplitude", opt.amplitude);
    opt.n_max = c.integer("n_max", opt.n_max);
    opt.M = ctx.grid(opt.M);
    opt.observe = c.flag("observe", true);
    opt.workers = ctx.workers;
    c.finish();

    const auto rows = resonance_scan(phi, opt);
    const auto csv = write_file(ctx.out_dir, "resonance.csv",
                                to_text([&](std::ostream& os) { write_resonance_csv(os, rows); }));
    PlotPanel p{"first-order splitting vs parabola index", "j", "|λ₁,1 − λ₁,2|", {}, true};
    PlotSeries same{"same type", {}}, opposite{"opposite type", {}};
    int complex_count = 0;
    for (const auto& r : rows) {
        const double split = std::abs(r.prediction.lambda1[0] - r.prediction.lambda1[1]);
        (r.dp.same_type ? same : opposite).points.emplace_back(*r.dp.parabola, split);
        complex_count += r.prediction.complex_split ? 1 : 0;
    }
    p.series = {same, opposite};
    write_file(ctx.out_dir, "resonance.svg", svg_text({p}));
    print_summary({{"command", "resonance"}, {"diabolical_points", rows.size()},
                   {"complex_splits", complex_count}, {"csv", csv}});
    return 0;
}

int cmd_soliton_branch(Context& ctx) {
    Config& c = ctx.cfg;
    std::vector<int> ls{0, 1, 2, 3};
    if (c.has("l")) {
        const json& v = c.raw("l");
        ls.clear();
        if (v.is_number_integer())
            ls.push_back(v.get<int>());
        else if (v.is_array())
            for (const auto& e : v) {
                if (!e.is_number_integer()) throw InputError("'l' entries must be integers");
                ls.push_back(e.get<int>());
            }
        else
            throw InputError("'l' must be an integer or an array of integers");
    }
    const double X = c.number("X", 100.0);
    const int M = ctx.grid(static_cast<int>(std::ceil(20.0 * X)));
    BranchOptions bo;
    if (c.has("x0")) std::tie(bo.x0_min, bo.x0_max) = c.range("x0");
    bo.samples = c.integer("samples", bo.samples);
    const bool jordan = c.flag("jordan", true);
    c.finish();
    for (int l : ls)
        if (l < 0) throw InputError("'l' must be non-negative");

    std::vector<BoundStateBranch> branches(ls.size());
    parallel_for(ls.size(), ctx.workers, [&](std::size_t i) { branches[i] = bound_state_branch(ls[i], X, M, bo); });

    std::vector<SolitonRow> rows;
    json reports = json::array();
    PlotPanel pe{"ϵ(x0)", "x0", "ϵ", {}, false}, pl{"λ(x0)", "x0", "λ", {}, false};
    for (const auto& b : branches) {
        PlotSeries se{"l=" + std::to_string(b.l), {}}, sl = se;
        for (const auto& s : b.samples) {
            rows.push_back({b.l, s.x0, Complex(s.lambda, 0.0), Complex(s.epsilon, 0.0), s.localized, X, M});
            se.points.emplace_back(s.x0, s.epsilon);
            sl.points.emplace_back(s.x0, s.lambda);
        }
        pe.series.push_back(se);
        pl.series.push_back(sl);
        json rep{{"l", b.l}, {"samples", b.samples.size()}, {"epsilon_sign_changes", b.epsilon_sign_changes},
                 {"truncation", b.truncation}};
        if (b.x_J) {
            rep["x_J"] = *b.x_J;
            if (jordan) {
                const JordanReport jr = jordan_system_solve(b.l, *b.x_J, X, M);
                rep["kernel_residual"] = jr.kernel_residual;
                rep["xi1_residual"] = jr.xi1_residual;
            }
        } else {
            rep["x_J"] = nullptr;
        }
        reports.push_back(rep);
    }
    const auto csv = write_file(ctx.out_dir, "soliton_branch.csv",
                                to_text([&](std::ostream& os) { write_soliton_csv(os, rows); }));
    write_file(ctx.out_dir, "jordan.json", reports.dump(2) + "\n");
    write_file(ctx.out_dir, "soliton_branch.svg", svg_text({pe, pl}));
    print_summary({{"command", "soliton-branch"}, {"X", X}, {"M", M}, {"branches", reports}, {"csv", csv}});
    return 0;
}

int cmd_cutoff(Context& ctx) {
    Config& c = ctx.cfg;
    const double x0 = c.number("x0", 6.0);
    const int l = c.integer("l", 0);
    const std::vector<double> X = c.has("X") ? c.numbers("X", 3) : std::vector<double>{10, 20, 40};
    const int modes = c.integer("modes", 2);
    CutoffOptions opt;
    opt.density = c.number("density", opt.density);
    opt.workers = ctx.workers;
    const double strength = c.number("strength", 1.0);
    c.finish();

    const CutoffTable t = cutoff_study(unit_soliton(x0, strength), l, X, modes, opt);
    json list = json::array();
    PlotPanel p{"λ_n(X)", "X", "λ", {}, false};
    for (const CutoffMode& m : t.modes) {
        PlotSeries s{(m.sign == PencilSign::Plus ? "F+ n=" : "F- n=") + std::to_string(m.n), {}};
        for (std::size_t k = 0; k < X.size(); ++k) s.points.emplace_back(X[k], m.lambda[k].real());
        p.series.push_back(s);
        list.push_back({{"sign", static_cast<int>(m.sign)}, {"n", m.n},
                        {"exponent", m.exponent ? json(*m.exponent) : json(nullptr)},
                        {"max_relative_variation", m.max_relative_variation},
                        {"identity_lost", m.identity_lost}, {"overlap", m.overlap}});
    }
    const auto csv = write_file(ctx.out_dir, "cutoff.csv",
                                to_text([&](std::ostream& os) { write_cutoff_csv(os, t); }));
    write_file(ctx.out_dir, "cutoff.json", list.dump(2) + "\n");
    write_file(ctx.out_dir, "cutoff.svg", svg_text({p}));
    print_summary({{"command", "cutoff"}, {"modes", list}, {"csv", csv}});
    return 0;
}

int cmd_selftest(Context& ctx, const std::vector<std::string>& only_flag) {
    Config& c = ctx.cfg;
    AcceptanceOptions opt;
    opt.workers = ctx.workers;
    opt.only = only_flag;
    if (opt.only.empty() && c.has("only")) {
        const json& v = c.raw("only");
        if (!v.is_array()) throw InputError("'only' must be an array of criterion ids");
        for (const auto& e : v) opt.only.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    }
    c.mark("only");
    c.finish();
    const auto known = acceptance_ids();
    for (const auto& id : opt.only)
        if (std::find(known.begin(), known.end(), id) == known.end())
            throw InputError("unknown criterion id '" + id + "'");

    const auto results = run_acceptance(opt, [](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
    });
    json failed = json::array();
    for (const auto& r : results)
        if (!r.passed) failed.push_back(r.id);
    if (!failed.empty()) {
        std::cerr << json{{"error", "selftest"}, {"failed", failed}}.dump() << std::endl;
        return 1;
    }
    return 0;
}

void emit_error(const char* kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for spherically symmetric alpha^2-dynamo operators"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config;
    Overrides ov;
    std::optional<int> mesh_l, mesh_nmax;
    std::optional<double> mesh_amax;
    std::vector<std::string> only;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"spectrum", "parameter sweep with branch tracking and exceptional points"},
        {"triple", "triple-point search over the (zeta, C) quartic family"},
        {"mesh", "exact constant-alpha spectral mesh and diabolical points"},
        {"unfold", "first-order diabolical-point unfolding against direct eigensolves"},
        {"resonance", "diabolical-point resonance scan for a perturbation shape"},
        {"soliton-branch", "bound-state branch over the soliton position x0"},
        {"cutoff", "box-length dependence of the soliton pencil spectrum"},
        {"selftest", "run the acceptance suite"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON configuration file");
        sub->add_option("--M", ov.M, "grid size override");
        sub->add_option("--workers", ov.workers, "worker threads (default: KREINAMO_WORKERS)");
        sub->add_option("--out-dir", ov.out_dir, "output directory");
        if (name == "mesh") {
            sub->add_option("--l", mesh_l, "angular mode number");
            sub->add_option("--alpha0-max", mesh_amax, "largest alpha0");
            sub->add_option("--n-max", mesh_nmax, "largest radial index");
        }
        if (name == "selftest") sub->add_option("--only", only, "criterion ids to run");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("config", e.what());
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Context ctx = make_context(command, config, ov);
        if (command == "spectrum") return cmd_spectrum(ctx);
        if (command == "triple") return cmd_triple(ctx);
        if (command == "mesh") return cmd_mesh(ctx, mesh_l, mesh_amax, mesh_nmax);
        if (command == "unfold") return cmd_unfold(ctx);
        if (command == "resonance") return cmd_resonance(ctx);
        if (command == "soliton-branch") return cmd_soliton_branch(ctx);
        if (command == "cutoff") return cmd_cutoff(ctx);
        return cmd_selftest(ctx, only);
    } catch (const InputError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const NumericError& e) {
        emit_error("numeric", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("numeric", e.what());
        return 3;
    }
}
