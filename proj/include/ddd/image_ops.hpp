#pragma once

#include <cmath>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

namespace detail {

/* Half-sample symmetric reflection of t into [0, n). */
inline long reflect_index(long t, long n) {
    while (t < 0 || t >= n) {
        if (t < 0) t = -t - 1;
        if (t >= n) t = 2 * n - 1 - t;
    }
    return t;
}

/* 1-D correlation with a symmetric kernel along rows or columns under
 * half-sample symmetric padding.  With this padding the 1-D matrix is
 * symmetric and doubly stochastic for a normalized symmetric kernel:
 * each row sums to 1 by construction, and B = B^T gives unit column sums,
 * so ||B||_1 = ||B||_inf = 1 and ||B||_2 <= 1. */
inline Tensor convolve_axis(const Tensor& x, const std::vector<double>& kernel, bool along_cols) {
    const long r = static_cast<long>(kernel.size() - 1) / 2;
    Tensor out(x.rows(), x.cols());
    if (along_cols) {
        for (long i = 0; i < x.rows(); ++i)
            for (long j = 0; j < x.cols(); ++j) {
                double s = 0.0;
                for (long k = -r; k <= r; ++k)
                    s += kernel[static_cast<std::size_t>(k + r)] * x.at(i, reflect_index(j + k, x.cols()));
                out.at(i, j) = s;
            }
    } else {
        for (long j = 0; j < x.cols(); ++j)
            for (long i = 0; i < x.rows(); ++i) {
                double s = 0.0;
                for (long k = -r; k <= r; ++k)
                    s += kernel[static_cast<std::size_t>(k + r)] * x.at(reflect_index(i + k, x.rows()), j);
                out.at(i, j) = s;
            }
    }
    return out;
}

} // namespace detail

/* Separable 2-D Gaussian blur with unit-sum sampled kernel and reflective
 * (half-sample symmetric) boundary.  The kernel is even and each 1-D factor
 * matrix is symmetric under this padding, so the operator is self-adjoint
 * and its 2-norm is at most 1; constants are preserved exactly. */
inline LinearOperator gaussian_blur(long rows, long cols, int kernel_size = 9, double variance = 10.0) {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw DomainError("gaussian_blur: kernel_size must be odd and positive");
    if (rows < kernel_size || cols < kernel_size) throw DimensionError("gaussian_blur: image smaller than kernel");
    const int r = (kernel_size - 1) / 2;
    std::vector<double> kernel(static_cast<std::size_t>(kernel_size));
    double sum = 0.0;
    for (int k = -r; k <= r; ++k) {
        const double w = std::exp(-static_cast<double>(k) * k / (2.0 * variance));
        kernel[static_cast<std::size_t>(k + r)] = w;
        sum += w;
    }
    for (auto& w : kernel) w /= sum;

    LinearOperator op;
    op.domain_rows = op.range_rows = rows;
    op.domain_cols = op.range_cols = cols;
    auto blur = [kernel, rows, cols](const Tensor& x) {
        if (x.rows() != rows || x.cols() != cols) throw DimensionError("gaussian_blur: shape mismatch");
        return detail::convolve_axis(detail::convolve_axis(x, kernel, true), kernel, false);
    };
    op.apply = blur;
    op.adjoint = blur;
    op.norm_upper = 1.0;
    return op;
}

/* Forward differences with Neumann boundary: channel 0 (first `rows` rows of
 * the output) holds horizontal differences x[i,j+1]-x[i,j] with last column
 * zero; channel 1 holds vertical differences with last row zero.  The
 * adjoint accumulates the transposed stencil; ||grad||^2 <= 8. */
inline LinearOperator grad_2d(long rows, long cols) {
    if (rows < 2 || cols < 2) throw DimensionError("grad_2d: image must be at least 2x2");
    LinearOperator op;
    op.domain_rows = rows;
    op.domain_cols = cols;
    op.range_rows = 2 * rows;
    op.range_cols = cols;
    op.apply = [rows, cols](const Tensor& x) {
        if (x.rows() != rows || x.cols() != cols) throw DimensionError("grad_2d: shape mismatch");
        Tensor p(2 * rows, cols);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j + 1 < cols; ++j) p.at(i, j) = x.at(i, j + 1) - x.at(i, j);
        for (long i = 0; i + 1 < rows; ++i)
            for (long j = 0; j < cols; ++j) p.at(rows + i, j) = x.at(i + 1, j) - x.at(i, j);
        return p;
    };
    op.adjoint = [rows, cols](const Tensor& p) {
        if (p.rows() != 2 * rows || p.cols() != cols) throw DimensionError("grad_2d adjoint: shape mismatch");
        Tensor x(rows, cols);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j + 1 < cols; ++j) {
                x.at(i, j + 1) += p.at(i, j);
                x.at(i, j) -= p.at(i, j);
            }
        for (long i = 0; i + 1 < rows; ++i)
            for (long j = 0; j < cols; ++j) {
                x.at(i + 1, j) += p.at(rows + i, j);
                x.at(i, j) -= p.at(rows + i, j);
            }
        return x;
    };
    op.norm_upper = std::sqrt(8.0);
    return op;
}

/* Negative adjoint of grad_2d on a stacked 2-channel field. */
inline Tensor div_2d(const Tensor& p) {
    if (p.rows() % 2 != 0) throw DimensionError("div_2d: field must have 2*rows rows");
    const long rows = p.rows() / 2, cols = p.cols();
    Tensor x(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j + 1 < cols; ++j) {
            x.at(i, j + 1) -= p.at(i, j);
            x.at(i, j) += p.at(i, j);
        }
    for (long i = 0; i + 1 < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            x.at(i + 1, j) -= p.at(rows + i, j);
            x.at(i, j) += p.at(rows + i, j);
        }
    return x;
}

} // namespace ddd
