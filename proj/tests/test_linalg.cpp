#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mixea/linalg.hpp"
#include "oracles.hpp"

using namespace mixea;

namespace {

DenseMatrix random_matrix(std::size_t n, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = u(g);
    }
    return a;
}

std::vector<double> flat(const DenseMatrix& a) { return {a.data(), a.data() + a.rows() * a.cols()}; }

}  // namespace

TEST_CASE("LU solve matches the Gauss-Jordan oracle for every block size") {
    std::mt19937_64 g(1);
    for (std::size_t n : {1u, 2u, 7u, 63u, 64u, 65u, 150u}) {
        const auto a = random_matrix(n, g);
        std::vector<double> b(n);
        for (auto& x : b) x = std::uniform_real_distribution<double>(-5, 5)(g);
        const auto want = oracle::solve(flat(a), b, n);
        for (std::size_t block : {1u, 7u, 64u}) {
            CAPTURE(n);
            CAPTURE(block);
            LuDecomposition lu(a, block);
            REQUIRE_FALSE(lu.singular());
            const auto x = lu.solve(b);
            REQUIRE(x.size() == n);
            for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("LU residual is small on a diagonally dominant system") {
    std::mt19937_64 g(2);
    const std::size_t n = 300;
    auto a = random_matrix(n, g);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += n;
    std::vector<double> b(n, 1.0);
    const auto x = LuDecomposition(a).solve(b);
    const auto ax = multiply(a.view(), x);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(ax[i] - 1.0) < 1e-12);
}

TEST_CASE("LU pivots rows and reports singular matrices") {
    DenseMatrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    LuDecomposition lu(a);
    CHECK(lu.row_swaps() == 1);
    const auto x = lu.solve(std::vector<double>{2.0, 3.0});
    CHECK(x == std::vector<double>{3.0, 2.0});

    DenseMatrix s(3, 3, 1.0);
    LuDecomposition ls(s);
    CHECK(ls.singular());
    CHECK(ls.solve(std::vector<double>{1, 1, 1}).empty());
}

TEST_CASE("power iteration: trivial cases") {
    DenseMatrix zero(1, 1, 0.0);
    auto r0 = power_iteration_radius(zero.view());
    CHECK(r0.converged);
    CHECK(r0.value == 0.0);

    DenseMatrix one(1, 1, 0.9);
    auto r1 = power_iteration_radius(one.view());
    CHECK(r1.converged);
    CHECK(r1.value == doctest::Approx(0.9).epsilon(1e-14));

    auto r2 = power_iteration_radius(DenseMatrix().view());
    CHECK(r2.converged);
    CHECK(r2.value == 0.0);
}

TEST_CASE("power iteration finds the dominant eigenvalue of a triangular matrix") {
    DenseMatrix t(3, 3);
    t(0, 0) = 0.5;
    t(1, 0) = 0.2;
    t(1, 1) = 0.8;
    t(2, 1) = 0.1;
    t(2, 2) = 0.3;
    auto r = power_iteration_radius(t.view());
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.8).epsilon(1e-11));
}

TEST_CASE("power iteration flags non-convergence instead of failing") {
    DenseMatrix t(2, 2);
    t(0, 1) = 2.0;
    t(1, 0) = 0.5;  // eigenvalues +-1, the iterate cycles with period 2
    auto r = power_iteration_radius(t.view(), 1e-12, 1000);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1000);
}

TEST_CASE("views, blocks and multiply") {
    DenseMatrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = double(i * 3 + j);
    }
    const auto b = a.block(1, 1, 2, 2);
    CHECK(b(0, 0) == 4.0);
    CHECK(b(1, 1) == 8.0);
    const auto c = copy_of(b);
    CHECK(c.rows() == 2);
    CHECK(c(1, 0) == 7.0);
    CHECK(multiply(a.view(), std::vector<double>{1, 1, 1}) == std::vector<double>{3, 12, 21});
    CHECK(DenseMatrix::identity(2)(1, 1) == 1.0);
}
