#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mixea {

/// Read-only strided window into a row-major matrix.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t stride = 0;

    double operator()(std::size_t i, std::size_t j) const { return data[i * stride + j]; }
    std::span<const double> row(std::size_t i) const { return {data + i * stride, cols}; }
    bool square() const { return rows == cols; }
};

/// Owning row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    MatrixView view() const { return {data_.data(), rows_, cols_, cols_}; }
    MatrixView block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
        return {data_.data() + row0 * cols_ + col0, rows, cols, cols_};
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix copy_of(MatrixView view);

/// y = A x
std::vector<double> multiply(MatrixView a, std::span<const double> x);

/// LU factorization with partial (row) pivoting, PA = LU, blocked so the
/// trailing update runs through the SIMD gemm kernel.
class LuDecomposition {
public:
    explicit LuDecomposition(DenseMatrix a, std::size_t block = 64);

    /// True when a zero pivot was met; solve() then returns an empty vector.
    bool singular() const { return singular_; }
    std::size_t size() const { return lu_.rows(); }
    std::size_t row_swaps() const { return swaps_; }

    std::vector<double> solve(std::span<const double> b) const;

    const DenseMatrix& packed() const { return lu_; }
    std::span<const std::size_t> pivots() const { return pivots_; }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> pivots_;
    std::size_t swaps_ = 0;
    bool singular_ = false;
};

struct PowerIterationResult {
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Dominant-eigenvalue modulus of a nonnegative square matrix by repeated
/// multiplication from the all-ones vector with sup-norm normalization.
///
/// Converged means the iterate moved by at most `tol` in sup norm and the
/// geometric tail estimated from the last two steps is also below `tol`.
/// Slow (near-defective) cases run out of iterations and come back with
/// converged = false; that is a flag, not an error.
PowerIterationResult power_iteration_radius(MatrixView t, double tol = 1e-12,
                                            std::size_t max_iters = 1'000'000);

}  // namespace mixea
