#pragma once

#include <cmath>

#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

namespace detail {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

/* One analysis level along the leading `m` entries of each row/column pair:
 * averages land in the first half, details in the second. */
inline void haar_rows_fwd(Tensor& x, long m, long active_cols) {
    for (long j = 0; j < active_cols; ++j) {
        Tensor tmp(m);
        for (long i = 0; i < m / 2; ++i) {
            const double a = x.at(2 * i, j), b = x.at(2 * i + 1, j);
            tmp[i] = (a + b) * inv_sqrt2;
            tmp[m / 2 + i] = (a - b) * inv_sqrt2;
        }
        for (long i = 0; i < m; ++i) x.at(i, j) = tmp[i];
    }
}

inline void haar_rows_inv(Tensor& x, long m, long active_cols) {
    for (long j = 0; j < active_cols; ++j) {
        Tensor tmp(m);
        for (long i = 0; i < m / 2; ++i) {
            const double a = x.at(i, j), d = x.at(m / 2 + i, j);
            tmp[2 * i] = (a + d) * inv_sqrt2;
            tmp[2 * i + 1] = (a - d) * inv_sqrt2;
        }
        for (long i = 0; i < m; ++i) x.at(i, j) = tmp[i];
    }
}

inline void haar_cols_fwd(Tensor& x, long m, long active_rows) {
    for (long i = 0; i < active_rows; ++i) {
        Tensor tmp(m);
        for (long j = 0; j < m / 2; ++j) {
            const double a = x.at(i, 2 * j), b = x.at(i, 2 * j + 1);
            tmp[j] = (a + b) * inv_sqrt2;
            tmp[m / 2 + j] = (a - b) * inv_sqrt2;
        }
        for (long j = 0; j < m; ++j) x.at(i, j) = tmp[j];
    }
}

inline void haar_cols_inv(Tensor& x, long m, long active_rows) {
    for (long i = 0; i < active_rows; ++i) {
        Tensor tmp(m);
        for (long j = 0; j < m / 2; ++j) {
            const double a = x.at(i, j), d = x.at(i, m / 2 + j);
            tmp[2 * j] = (a + d) * inv_sqrt2;
            tmp[2 * j + 1] = (a - d) * inv_sqrt2;
        }
        for (long j = 0; j < m; ++j) x.at(i, j) = tmp[j];
    }
}

} // namespace detail

/* Orthonormal multilevel Haar analysis; adjoint is the exact inverse.
 * 1-D when cols == 1 (levels act on rows); otherwise the standard 2-D
 * quadrant layout, recursing on the low-low block.  Each level is a product
 * of 2x2 rotations scaled by 1/sqrt(2), so the whole transform is orthogonal
 * and norm_upper = 1 exactly. */
inline LinearOperator haar_transform(long rows, long cols, int levels) {
    if (levels < 1) throw DomainError("haar_transform: levels must be >= 1");
    const long div = 1L << levels;
    if (rows % div != 0) throw DimensionError("haar_transform: rows not divisible by 2^levels");
    if (cols != 1 && cols % div != 0) throw DimensionError("haar_transform: cols not divisible by 2^levels");

    LinearOperator op;
    op.domain_rows = op.range_rows = rows;
    op.domain_cols = op.range_cols = cols;
    const bool two_d = cols > 1;

    op.apply = [rows, cols, levels, two_d](const Tensor& x) {
        if (x.rows() != rows || x.cols() != cols) throw DimensionError("haar_transform: shape mismatch");
        Tensor c = x;
        long mr = rows, mc = cols;
        for (int l = 0; l < levels; ++l) {
            detail::haar_rows_fwd(c, mr, two_d ? mc : 1);
            if (two_d) detail::haar_cols_fwd(c, mc, mr);
            mr /= 2;
            if (two_d) mc /= 2;
        }
        return c;
    };
    op.adjoint = [rows, cols, levels, two_d](const Tensor& c) {
        if (c.rows() != rows || c.cols() != cols) throw DimensionError("haar_transform adjoint: shape mismatch");
        Tensor x = c;
        long mr = rows >> levels, mc = two_d ? (cols >> levels) : cols;
        for (int l = 0; l < levels; ++l) {
            mr *= 2;
            if (two_d) mc *= 2;
            if (two_d) detail::haar_cols_inv(x, mc, mr);
            detail::haar_rows_inv(x, mr, two_d ? mc : 1);
        }
        return x;
    };
    op.norm_upper = 1.0;
    return op;
}

} // namespace ddd
