#include "kreinamo/optimize.hpp"

#include "kreinamo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kreinamo {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n) throw InputError("simplex dimension mismatch");
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    NelderMeadResult r;
    std::vector<double> vals(n + 1);
    auto eval = [&](const std::vector<double>& x) {
        ++r.evaluations;
        const double v = f(x);
        return std::isnan(v) ? HUGE_VAL : v;
    };
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
    std::vector<std::size_t> order(n + 1);

    auto along = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
        std::vector<double> x(n);
        for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (p[k] - c[k]);
        return x;
    };

    while (r.evaluations < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
        if (diameter <= opt.x_tolerance ||
            std::abs(vals[worst] - vals[best]) <= opt.f_tolerance * (1.0 + std::abs(vals[best]))) {
            r.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;

        const auto xr = along(centroid, pts[worst], -1.0);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const auto xe = along(centroid, pts[worst], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const auto xc = along(centroid, outside ? xr : pts[worst], 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            pts[i] = along(pts[best], pts[i], 0.5);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    r.x = pts[static_cast<std::size_t>(it - vals.begin())];
    r.value = *it;
    return r;
}

}  // namespace kreinamo
