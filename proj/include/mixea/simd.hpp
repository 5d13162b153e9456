#pragma once

// Data-parallel kernels behind the dense linear algebra.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at startup from the CPU
// feature bits; MIXEA_SIMD=scalar|avx2 in the environment overrides it.
// Variants agree to rounding, not bit-for-bit: the vector versions reassociate
// sums and fuse multiply-adds.

#include <cstddef>
#include <span>

namespace mixea::simd {

enum class Backend { scalar, avx2 };

struct Kernels {
    Backend backend;
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // n must be > 0.
    double (*max_value)(const double* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
    // max_i |x_i - y_i|
    double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
    // C[m x n] -= A[m x k] * B[k x n], all row-major with leading dimensions.
    void (*gemm_sub)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                     const double* b, std::size_t ldb, double* c, std::size_t ldc);
};

const Kernels& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const Kernels* avx2_kernels();

const Kernels& active();
Backend active_backend();

// Returns false (and leaves the selection unchanged) if the backend is unavailable.
bool set_backend(Backend backend);

const char* backend_name(Backend backend);

// Convenience wrappers over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double max_value(std::span<const double> x) { return active().max_value(x.data(), x.size()); }

inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    return active().max_abs_diff(x.data(), y.data(), x.size());
}

}  // namespace mixea::simd
