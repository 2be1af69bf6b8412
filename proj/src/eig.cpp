#include "kreinamo/eig.hpp"

#include "kreinamo/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace kreinamo {

bool is_real(Complex lambda, double tolerance) {
    return std::abs(lambda.imag()) <= tolerance * (1.0 + std::abs(lambda.real()));
}

SpectrumSample eig_general(const Eigen::MatrixXd& matrix, bool want_vectors) {
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    if (n < 1 || matrix.cols() != matrix.rows()) {
        throw InputError("eigensolver needs a non-empty square matrix");
    }
    if (!matrix.allFinite()) throw InputError("eigensolver input has non-finite entries");

    Eigen::MatrixXd a = matrix;  // column-major copy, overwritten by LAPACK
    std::vector<double> wr(n), wi(n), scale(n), rconde(n), rcondv(n);
    Eigen::MatrixXd vr(want_vectors ? n : 1, want_vectors ? n : 1);
    double dummy_vl = 0.0;
    double abnrm = 0.0;
    lapack_int ilo = 0, ihi = 0;

    const lapack_int info = LAPACKE_dgeevx(
        LAPACK_COL_MAJOR, 'B', 'N', want_vectors ? 'V' : 'N', 'N', n, a.data(), n, wr.data(),
        wi.data(), &dummy_vl, 1, vr.data(), want_vectors ? n : 1, &ilo, &ihi, scale.data(),
        &abnrm, rconde.data(), rcondv.data());
    if (info > 0) {
        throw NumericError("QR iteration failed to converge; eigenvalues " +
                           std::to_string(info) + ".." + std::to_string(n) +
                           " are unavailable");
    }
    if (info < 0) throw NumericError("dgeevx rejected argument " + std::to_string(-info));

    SpectrumSample s;
    s.values.resize(n);
    for (lapack_int k = 0; k < n; ++k) s.values[k] = {wr[k], wi[k]};

    if (want_vectors) {
        Eigen::MatrixXcd v(n, n);
        for (lapack_int k = 0; k < n; ++k) {
            if (wi[k] == 0.0) {
                v.col(k) = vr.col(k).cast<Complex>();
            } else {
                // LAPACK packs a conjugate pair as (re, im) in columns k, k+1.
                const Eigen::VectorXd re = vr.col(k);
                const Eigen::VectorXd im = vr.col(k + 1);
                for (lapack_int i = 0; i < n; ++i) {
                    v(i, k) = {re(i), im(i)};
                    v(i, k + 1) = {re(i), -im(i)};
                }
                ++k;
            }
        }
        for (lapack_int k = 0; k < n; ++k) v.col(k).normalize();
        s.vectors = std::move(v);
    }
    return s;
}

Complex richardson(Complex value_M, Complex value_2M) {
    return (4.0 * value_2M - value_M) / 3.0;
}

void sort_by_real_desc(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

namespace {

struct Candidate {
    double distance;
    int half_plane_mismatch;
    double re, im;  // of the current value, for deterministic tie breaks
    std::size_t prev, curr;
};

bool upper(Complex z) { return !std::signbit(z.imag()); }

/// Index of the conjugate partner of values[k] (itself for real values).
std::vector<std::size_t> conjugate_partners(const std::vector<Complex>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> partner(n);
    std::iota(partner.begin(), partner.end(), std::size_t{0});
    std::vector<bool> used(n, false);
    double scale = 0.0;
    for (const auto& v : values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * std::max(scale, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i] || std::abs(values[i].imag()) <= tol) continue;
        std::size_t best = n;
        double best_d = tol;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || used[j]) continue;
            const double d = std::abs(values[j] - std::conj(values[i]));
            if (d <= best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < n) {
            partner[i] = best;
            partner[best] = i;
            used[i] = used[best] = true;
        }
    }
    return partner;
}

}  // namespace

std::vector<std::size_t> pair_spectra(const std::vector<Complex>& previous,
                                      const std::vector<Complex>& current) {
    const std::size_t n = previous.size();
    if (current.size() != n) throw InputError("pair_spectra needs spectra of equal length");

    std::vector<Candidate> cand;
    cand.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cand.push_back({std::abs(previous[i] - current[j]),
                            upper(previous[i]) == upper(current[j]) ? 0 : 1, current[j].real(),
                            current[j].imag(), i, j});
        }
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.distance, a.half_plane_mismatch, a.re, a.im, a.prev) <
               std::tie(b.distance, b.half_plane_mismatch, b.re, b.im, b.prev);
    });

    constexpr std::size_t kFree = static_cast<std::size_t>(-1);
    std::vector<std::size_t> perm(n, kFree);
    std::vector<bool> taken(n, false);
    std::size_t assigned = 0;
    for (const auto& c : cand) {
        if (assigned == n) break;
        if (perm[c.prev] != kFree || taken[c.curr]) continue;
        perm[c.prev] = c.curr;
        taken[c.curr] = true;
        ++assigned;
    }

    // Enforce λ ↦ μ  ⇒  λ̄ ↦ μ̄ wherever both sides carry genuine pairs.
    const auto prev_partner = conjugate_partners(previous);
    const auto curr_partner = conjugate_partners(current);
    std::vector<std::size_t> where(n);
    for (std::size_t i = 0; i < n; ++i) where[perm[i]] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = prev_partner[i];
        if (ip == i || !upper(previous[i])) continue;
        const std::size_t j = perm[i];
        const std::size_t jp = curr_partner[j];
        if (jp == j || perm[ip] == jp) continue;
        // Swap so that ip ↦ jp.
        const std::size_t holder = where[jp];
        const std::size_t old = perm[ip];
        perm[ip] = jp;
        perm[holder] = old;
        where[jp] = ip;
        where[old] = holder;
    }
    return perm;
}

}  // namespace kreinamo
