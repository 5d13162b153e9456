#include <algorithm>
#include <cmath>

#include "mixea/simd.hpp"

namespace mixea::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double max_value_scalar(const double* x, std::size_t n) {
    double best = x[0];
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, x[i]);
    return best;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::fabs(x[i]));
    return best;
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::fabs(x[i] - y[i]));
    return best;
}

void gemm_sub_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                     const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * ldc;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * lda + p];
            if (aip == 0.0) continue;
            const double* bp = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] -= aip * bp[j];
        }
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels table{
        Backend::scalar, "scalar",     dot_scalar,          axpy_scalar,    scale_scalar,
        sum_scalar,      max_value_scalar, max_abs_scalar, max_abs_diff_scalar, gemm_sub_scalar,
    };
    return table;
}

}  // namespace mixea::simd
