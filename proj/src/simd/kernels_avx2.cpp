// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "mixea/simd.hpp"

namespace mixea::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double max_value_avx2(const double* x, std::size_t n) {
    if (n < 4) {
        double best = x[0];
        for (std::size_t i = 1; i < n; ++i) best = std::max(best, x[i]);
        return best;
    }
    __m256d best = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(x + i));
    double b = hmax(best);
    for (; i < n; ++i) b = std::max(b, x[i]);
    return b;
}

double max_abs_avx2(const double* x, std::size_t n) {
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) best = _mm256_max_pd(best, abs_pd(_mm256_loadu_pd(x + i)));
    double b = hmax(best);
    for (; i < n; ++i) b = std::max(b, std::fabs(x[i]));
    return b;
}

double max_abs_diff_avx2(const double* x, const double* y, std::size_t n) {
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        best = _mm256_max_pd(best, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i))));
    }
    double b = hmax(best);
    for (; i < n; ++i) b = std::max(b, std::fabs(x[i] - y[i]));
    return b;
}

// 4x8 register tile: eight accumulators, two B loads and four broadcasts per k step.
inline void tile_4x8(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb,
                     double* c, std::size_t ldc) {
    double* c0 = c;
    double* c1 = c + ldc;
    double* c2 = c + 2 * ldc;
    double* c3 = c + 3 * ldc;
    __m256d c00 = _mm256_loadu_pd(c0), c01 = _mm256_loadu_pd(c0 + 4);
    __m256d c10 = _mm256_loadu_pd(c1), c11 = _mm256_loadu_pd(c1 + 4);
    __m256d c20 = _mm256_loadu_pd(c2), c21 = _mm256_loadu_pd(c2 + 4);
    __m256d c30 = _mm256_loadu_pd(c3), c31 = _mm256_loadu_pd(c3 + 4);
    for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * ldb;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d ar = _mm256_broadcast_sd(a + p);
        c00 = _mm256_fnmadd_pd(ar, b0, c00);
        c01 = _mm256_fnmadd_pd(ar, b1, c01);
        ar = _mm256_broadcast_sd(a + lda + p);
        c10 = _mm256_fnmadd_pd(ar, b0, c10);
        c11 = _mm256_fnmadd_pd(ar, b1, c11);
        ar = _mm256_broadcast_sd(a + 2 * lda + p);
        c20 = _mm256_fnmadd_pd(ar, b0, c20);
        c21 = _mm256_fnmadd_pd(ar, b1, c21);
        ar = _mm256_broadcast_sd(a + 3 * lda + p);
        c30 = _mm256_fnmadd_pd(ar, b0, c30);
        c31 = _mm256_fnmadd_pd(ar, b1, c31);
    }
    _mm256_storeu_pd(c0, c00);
    _mm256_storeu_pd(c0 + 4, c01);
    _mm256_storeu_pd(c1, c10);
    _mm256_storeu_pd(c1 + 4, c11);
    _mm256_storeu_pd(c2, c20);
    _mm256_storeu_pd(c2 + 4, c21);
    _mm256_storeu_pd(c3, c30);
    _mm256_storeu_pd(c3 + 4, c31);
}

// Single row of C against a column range of B.
inline void row_sub(std::size_t n, std::size_t k, const double* a, const double* b, std::size_t ldb, double* c) {
    for (std::size_t p = 0; p < k; ++p) {
        const double ap = a[p];
        if (ap != 0.0) axpy_avx2(-ap, b + p * ldb, c, n);
    }
}

void gemm_sub_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                   const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    // Column chunks keep the k x chunk slab of B resident in L2 across row tiles.
    constexpr std::size_t kChunk = 256;
    for (std::size_t j0 = 0; j0 < n; j0 += kChunk) {
        const std::size_t jn = std::min(kChunk, n - j0);
        const std::size_t jv = jn - jn % 8;
        std::size_t i = 0;
        for (; i + 4 <= m; i += 4) {
            const double* ai = a + i * lda;
            double* ci = c + i * ldc + j0;
            for (std::size_t j = 0; j < jv; j += 8) tile_4x8(k, ai, lda, b + j0 + j, ldb, ci + j, ldc);
            if (jv < jn) {
                for (std::size_t r = 0; r < 4; ++r) {
                    row_sub(jn - jv, k, ai + r * lda, b + j0 + jv, ldb, ci + r * ldc + jv);
                }
            }
        }
        for (; i < m; ++i) row_sub(jn, k, a + i * lda, b + j0, ldb, c + i * ldc + j0);
    }
}

}  // namespace

const Kernels& avx2_kernel_table() {
    static const Kernels table{
        Backend::avx2, "avx2",       dot_avx2,          axpy_avx2,    scale_avx2,
        sum_avx2,      max_value_avx2, max_abs_avx2, max_abs_diff_avx2, gemm_sub_avx2,
    };
    return table;
}

}  // namespace mixea::simd
