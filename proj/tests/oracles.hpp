// Independent reference computations shared by the tests. Nothing here calls
// into the library's solvers.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Expected generations for single-bit-flip OneMax from level i: sum_{j=i}^{n-1} n/(n-j).
inline double coupon_collector(int n, int i) {
    double t = 0.0;
    for (int j = i; j < n; ++j) t += double(n) / double(n - j);
    return t;
}

inline double per_bit_entry(int n, double p, std::uint32_t x, std::uint32_t y) {
    const int h = std::popcount(x ^ y);
    return std::pow(p, h) * std::pow(1.0 - p, n - h);
}

/// P(level i -> level j) for independent flips with rate p, by direct convolution
/// over the number of ones cleared (a) and zeros set (b).
inline double level_step(int n, double p, int i, int j) {
    auto choose = [](int m, int k) { return std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0)); };
    double s = 0.0;
    for (int a = 0; a <= i; ++a) {
        const int b = j - i + a;
        if (b < 0 || b > n - i) continue;
        s += choose(i, a) * choose(n - i, b) * std::pow(p, a + b) * std::pow(1 - p, n - a - b);
    }
    return s;
}

/// Gauss-Jordan with full pivoting on a copy; returns x with A x = b.
inline std::vector<double> solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
    std::vector<std::size_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            for (std::size_t j = k; j < n; ++j) {
                if (std::fabs(a[i * n + j]) > best) {
                    best = std::fabs(a[i * n + j]);
                    pr = i;
                    pc = j;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pr * n + j]);
        std::swap(b[k], b[pr]);
        for (std::size_t i = 0; i < n; ++i) std::swap(a[i * n + k], a[i * n + pc]);
        std::swap(col[k], col[pc]);
        const double piv = a[k * n + k];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a[i * n + k] / piv;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[col[k]] = b[k] / a[k * n + k];
    return x;
}

/// Random strategy table: each row is pure on a random operator with
/// probability 1/3, otherwise normalized exponential weights.
inline std::vector<double> random_table(std::size_t dim, std::size_t kappa, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> t(dim * kappa, 0.0);
    for (std::size_t x = 0; x < dim; ++x) {
        double* row = t.data() + x * kappa;
        if (u(g) < 1.0 / 3.0) {
            row[std::uniform_int_distribution<std::size_t>(0, kappa - 1)(g)] = 1.0;
            continue;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < kappa; ++k) total += row[k] = e(g);
        for (std::size_t k = 0; k < kappa; ++k) row[k] /= total;
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < kappa; ++k) s += row[k];
        row[kappa - 1] = std::max(0.0, 1.0 - s);
    }
    return t;
}

}  // namespace oracle
