#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mixea/linalg.hpp"
#include "mixea/simd.hpp"

using namespace mixea;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

double abs_sum(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i]);
    return s;
}

struct BackendGuard {
    simd::Backend saved = simd::active_backend();
    ~BackendGuard() { simd::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar table is always available and selectable") {
    BackendGuard guard;
    CHECK(simd::set_backend(simd::Backend::scalar));
    CHECK(simd::active_backend() == simd::Backend::scalar);
    CHECK(std::string(simd::active().name) == "scalar");
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const auto* v = simd::avx2_kernels();
    if (v == nullptr) {
        MESSAGE("avx2 not available on this CPU; equivalence not exercised");
        return;
    }
    const auto& s = simd::scalar_kernels();
    std::mt19937_64 g(11);

    for (std::size_t n = 0; n <= 67; ++n) {
        CAPTURE(n);
        const auto a = random_vec(n, g);
        const auto b = random_vec(n, g);

        CHECK(std::fabs(v->dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= 1e-14 * (abs_sum(a, b) + 1));
        CHECK(std::fabs(v->sum(a.data(), n) - s.sum(a.data(), n)) <= 1e-14 * (n + 1));

        auto y1 = b, y2 = b;
        v->axpy(0.37, a.data(), y1.data(), n);
        s.axpy(0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        auto z1 = a, z2 = a;
        v->scale(-2.5, z1.data(), n);
        s.scale(-2.5, z2.data(), n);
        CHECK(z1 == z2);

        if (n > 0) {
            CHECK(v->max_value(a.data(), n) == s.max_value(a.data(), n));
            CHECK(v->max_abs(a.data(), n) == s.max_abs(a.data(), n));
            CHECK(v->max_abs_diff(a.data(), b.data(), n) == s.max_abs_diff(a.data(), b.data(), n));
        }
    }
}

TEST_CASE("avx2 gemm_sub agrees with the scalar reference on ragged shapes") {
    const auto* v = simd::avx2_kernels();
    if (v == nullptr) return;
    const auto& s = simd::scalar_kernels();
    std::mt19937_64 g(12);
    for (auto [m, n, k] : {std::tuple{1, 1, 1}, {3, 5, 2}, {4, 8, 4}, {5, 9, 7}, {17, 33, 13}, {64, 300, 64}, {70, 7, 3}}) {
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(k);
        const std::size_t lda = k + 3, ldb = n + 1, ldc = n + 5;
        const auto a = random_vec(m * lda, g);
        const auto b = random_vec(k * ldb, g);
        const auto c0 = random_vec(m * ldc, g);
        auto c1 = c0, c2 = c0;
        v->gemm_sub(m, n, k, a.data(), lda, b.data(), ldb, c1.data(), ldc);
        s.gemm_sub(m, n, k, a.data(), lda, b.data(), ldb, c2.data(), ldc);
        double worst = 0.0;
        for (std::size_t i = 0; i < c1.size(); ++i) worst = std::max(worst, std::fabs(c1[i] - c2[i]));
        CHECK(worst <= 1e-13 * k);
        // Padding columns must stay untouched.
        for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
            for (std::size_t j = n; j < ldc; ++j) CHECK(c1[i * ldc + j] == c0[i * ldc + j]);
        }
    }
}

TEST_CASE("LU solves agree across backends") {
    if (simd::avx2_kernels() == nullptr) return;
    BackendGuard guard;
    std::mt19937_64 g(13);
    const std::size_t n = 200;
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = std::uniform_real_distribution<double>(-1, 1)(g);
    }
    const auto b = random_vec(n, g);
    simd::set_backend(simd::Backend::scalar);
    const auto xs = LuDecomposition(a, 16).solve(b);
    simd::set_backend(simd::Backend::avx2);
    const auto xv = LuDecomposition(a, 16).solve(b);
    REQUIRE(xs.size() == n);
    REQUIRE(xv.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(xv[i] == doctest::Approx(xs[i]).epsilon(1e-9));
}
