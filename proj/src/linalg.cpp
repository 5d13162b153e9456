#include "mixea/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "mixea/simd.hpp"

namespace mixea {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix copy_of(MatrixView view) {
    DenseMatrix m(view.rows, view.cols);
    for (std::size_t i = 0; i < view.rows; ++i) {
        const auto src = view.row(i);
        std::copy(src.begin(), src.end(), m.row(i).begin());
    }
    return m;
}

std::vector<double> multiply(MatrixView a, std::span<const double> x) {
    if (x.size() != a.cols) throw std::invalid_argument("multiply: dimension mismatch");
    std::vector<double> y(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) y[i] = simd::dot(a.row(i), x);
    return y;
}

LuDecomposition::LuDecomposition(DenseMatrix a, std::size_t block) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    block = std::max<std::size_t>(block, 1);
    pivots_.resize(n);
    const auto& k = simd::active();
    double* base = lu_.data();

    for (std::size_t k0 = 0; k0 < n; k0 += block) {
        const std::size_t kb = std::min(block, n - k0);
        const std::size_t kend = k0 + kb;

        // Panel: unblocked right-looking elimination restricted to columns [k0, kend).
        for (std::size_t col = k0; col < kend; ++col) {
            std::size_t piv = col;
            double best = std::fabs(lu_(col, col));
            for (std::size_t i = col + 1; i < n; ++i) {
                const double v = std::fabs(lu_(i, col));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            pivots_[col] = piv;
            if (piv != col) {
                std::swap_ranges(lu_.row(col).begin(), lu_.row(col).end(), lu_.row(piv).begin());
                ++swaps_;
            }
            const double pivot = lu_(col, col);
            if (pivot == 0.0) {
                singular_ = true;
                continue;
            }
            const double inv = 1.0 / pivot;
            const double* urow = base + col * n + col + 1;
            const std::size_t width = kend - col - 1;
            for (std::size_t i = col + 1; i < n; ++i) {
                double& l = lu_(i, col);
                if (l == 0.0) continue;
                l *= inv;
                if (width > 0) k.axpy(-l, urow, base + i * n + col + 1, width);
            }
        }

        if (kend == n) break;

        // U12 = L11^{-1} A12 (unit lower triangular solve on the block row).
        const std::size_t trailing = n - kend;
        for (std::size_t r = k0 + 1; r < kend; ++r) {
            double* dst = base + r * n + kend;
            for (std::size_t p = k0; p < r; ++p) {
                const double l = lu_(r, p);
                if (l != 0.0) k.axpy(-l, base + p * n + kend, dst, trailing);
            }
        }

        // A22 -= L21 U12
        k.gemm_sub(trailing, trailing, kb, base + kend * n + k0, n, base + k0 * n + kend, n,
                   base + kend * n + kend, n);
    }
}

std::vector<double> LuDecomposition::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("LU solve: dimension mismatch");
    if (singular_) return {};
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (pivots_[i] != i) std::swap(x[i], x[pivots_[i]]);
    }
    const auto& k = simd::active();
    const double* base = lu_.data();
    for (std::size_t i = 1; i < n; ++i) x[i] -= k.dot(base + i * n, x.data(), i);
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t tail = n - ii - 1;
        const double s = tail > 0 ? k.dot(base + ii * n + ii + 1, x.data() + ii + 1, tail) : 0.0;
        x[ii] = (x[ii] - s) / lu_(ii, ii);
    }
    return x;
}

PowerIterationResult power_iteration_radius(MatrixView t, double tol, std::size_t max_iters) {
    if (!t.square()) throw std::invalid_argument("power iteration: matrix must be square");
    PowerIterationResult out;
    const std::size_t n = t.rows;
    if (n == 0) {
        out.converged = true;
        return out;
    }
    const auto& k = simd::active();
    // Nonzero column span per row; zeros outside it contribute nothing.
    std::vector<std::size_t> lo(n, 0), hi(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = t.data + i * t.stride;
        std::size_t a = 0, b = n;
        while (a < n && r[a] == 0.0) ++a;
        while (b > a && r[b - 1] == 0.0) --b;
        lo[i] = a;
        hi[i] = b;
    }
    std::vector<double> v(n, 1.0);
    std::vector<double> w(n);
    double prev_step = -1.0;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = hi[i] > lo[i] ? k.dot(t.data + i * t.stride + lo[i], v.data() + lo[i], hi[i] - lo[i]) : 0.0;
        }
        const double norm = k.max_abs(w.data(), n);
        out.iterations = it;
        out.value = norm;
        if (norm == 0.0) {
            // Nilpotent on the reachable support.
            out.converged = true;
            return out;
        }
        k.scale(1.0 / norm, w.data(), n);
        const double step = k.max_abs_diff(w.data(), v.data(), n);
        std::swap(v, w);
        if (step == 0.0) {
            out.converged = true;
            return out;
        }
        if (step <= tol && prev_step > 0.0) {
            const double ratio = step / prev_step;
            if (ratio < 1.0 && step * ratio / (1.0 - ratio) <= tol) {
                out.converged = true;
                return out;
            }
        }
        prev_step = step;
    }
    return out;
}

}  // namespace mixea
