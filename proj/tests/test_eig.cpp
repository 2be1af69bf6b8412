#include "doctest.h"

#include "kreinamo/eig.hpp"
#include "kreinamo/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace kreinamo;

TEST_CASE("rotation generator has eigenvalues +/- i") {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, -1, 0;
    auto v = eig_general(A).values;
    sort_by_real_desc(v);
    CHECK(std::abs(v[0] - Complex(0, 1)) < 1e-14);
    CHECK(std::abs(v[1] - Complex(0, -1)) < 1e-14);
}

TEST_CASE("triangular matrix eigenvalues are the diagonal") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) A(i, j) = (i == j) ? -1.0 - i : 0.3 * (i + j);
    auto v = eig_general(A).values;
    sort_by_real_desc(v);
    for (int i = 0; i < 5; ++i) CHECK(v[static_cast<std::size_t>(i)].real() == doctest::Approx(-1.0 - i));
}

TEST_CASE("eigenvectors satisfy A v = lambda v for random matrices") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int t = 0; t < 5; ++t) {
        Eigen::MatrixXd A(12, 12);
        for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
        const SpectrumSample s = eig_general(A, true);
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            const Eigen::VectorXcd v = s.vectors->col(static_cast<Eigen::Index>(k));
            CHECK(v.norm() == doctest::Approx(1.0));
            CHECK((A.cast<Complex>() * v - s.values[k] * v).norm() < 1e-10 * A.norm());
        }
    }
}

TEST_CASE("eigensolver rejects bad input") {
    CHECK_THROWS_AS(eig_general(Eigen::MatrixXd(2, 3)), InputError);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    A(0, 1) = std::nan("");
    CHECK_THROWS_AS(eig_general(A), InputError);
}

TEST_CASE("realness test is relative") {
    CHECK(is_real(Complex(1e6, 1e-3)));
    CHECK_FALSE(is_real(Complex(1.0, 1e-3)));
}

TEST_CASE("richardson removes the h^2 term exactly") {
    const Complex L(-3.0, 0.5), a(2.0, -1.0);
    const double M = 40.0;
    CHECK(std::abs(richardson(L + a / (M * M), L + a / (4 * M * M)) - L) < 1e-14);
}

TEST_CASE("pairing recovers a shuffled, slightly moved spectrum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<Complex> prev;
        for (int i = 0; i < 15; ++i) prev.emplace_back(u(rng), i % 3 == 0 ? 0.0 : u(rng));
        std::vector<std::size_t> shuffle(prev.size());
        std::iota(shuffle.begin(), shuffle.end(), 0);
        std::shuffle(shuffle.begin(), shuffle.end(), rng);
        std::vector<Complex> cur(prev.size());
        for (std::size_t i = 0; i < prev.size(); ++i) cur[shuffle[i]] = prev[i] + Complex(1e-6, -1e-6);
        const auto perm = pair_spectra(prev, cur);
        for (std::size_t i = 0; i < prev.size(); ++i) CHECK(perm[i] == shuffle[i]);
    }
}

TEST_CASE("pairing keeps conjugate pairs on conjugate partners") {
    const std::vector<Complex> prev{{-1.0, 0.01}, {-1.0, -0.01}, {-3.0, 0.0}};
    const std::vector<Complex> cur{{-1.0, -0.02}, {-3.0, 0.0}, {-1.0, 0.02}};
    const auto perm = pair_spectra(prev, cur);
    CHECK(perm[0] == 2);
    CHECK(perm[1] == 0);
    CHECK(perm[2] == 1);
}
