#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace kreinamo {

using Complex = std::complex<double>;

struct SampleMeta {
    int M = 0;
    std::string profile_id;
    std::string bc;
    double parameter = 0.0;
};

struct SpectrumSample {
    std::vector<Complex> values;
    std::optional<Eigen::MatrixXcd> vectors;  // column k belongs to values[k]
    SampleMeta meta;
};

/// |Im λ| ≤ 1e−7 (1 + |Re λ|).
constexpr double kRealTolerance = 1e-7;
bool is_real(Complex lambda, double tolerance = kRealTolerance);

/// All eigenvalues of a dense real matrix (balanced Hessenberg QR via LAPACK
/// dgeevx). Right eigenvectors, unit 2-norm, on request.
SpectrumSample eig_general(const Eigen::MatrixXd& matrix, bool want_vectors = false);

/// Second-order Richardson extrapolation from grid sizes M and 2M.
Complex richardson(Complex value_M, Complex value_2M);

/// Bijection perm with perm[i] = index into `current` paired with previous[i].
/// Greedy over globally sorted distances; conjugate pairs map to conjugate pairs.
std::vector<std::size_t> pair_spectra(const std::vector<Complex>& previous,
                                      const std::vector<Complex>& current);

/// Sort by descending real part, then descending imaginary part.
void sort_by_real_desc(std::vector<Complex>& values);

}  // namespace kreinamo
