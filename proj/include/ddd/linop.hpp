#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "ddd/errors.hpp"
#include "ddd/rng.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

/* Forward/adjoint pair with a cached operator-norm upper bound and the
 * shapes of its domain (x side) and range (y side).  norm_upper must always
 * dominate the true norm; it is either exact from construction (identity,
 * orthogonal transforms, unit-sum convolutions) or set by power_norm. */
struct LinearOperator {
    std::function<Tensor(const Tensor&)> apply;
    std::function<Tensor(const Tensor&)> adjoint;
    double norm_upper = 0.0;
    long domain_rows = 0;
    long domain_cols = 1;
    long range_rows = 0;
    long range_cols = 1;

    Tensor domain_zero() const { return Tensor(domain_rows, domain_cols); }
    Tensor range_zero() const { return Tensor(range_rows, range_cols); }
};

inline LinearOperator identity_op(long rows, long cols = 1) {
    LinearOperator op;
    op.apply = [](const Tensor& x) { return x; };
    op.adjoint = [](const Tensor& x) { return x; };
    op.norm_upper = 1.0;
    op.domain_rows = op.range_rows = rows;
    op.domain_cols = op.range_cols = cols;
    return op;
}

/* Dense matrix operator; M is (m x k), mapping length-k vectors to length-m.
 * norm_upper starts at the Frobenius norm (always an upper bound); call
 * power_norm for a tight estimate. */
inline LinearOperator matrix_op(const Tensor& M) {
    const long m = M.rows(), k = M.cols();
    LinearOperator op;
    op.domain_rows = k;
    op.domain_cols = 1;
    op.range_rows = m;
    op.range_cols = 1;
    op.apply = [M, m, k](const Tensor& x) {
        if (x.size() != k) throw DimensionError("matrix_op apply: length mismatch");
        Tensor y(m);
        for (long i = 0; i < m; ++i) {
            double s = 0.0;
            for (long j = 0; j < k; ++j) s += M.at(i, j) * x[j];
            y[i] = s;
        }
        return y;
    };
    op.adjoint = [M, m, k](const Tensor& y) {
        if (y.size() != m) throw DimensionError("matrix_op adjoint: length mismatch");
        Tensor x(k);
        for (long j = 0; j < k; ++j) {
            double s = 0.0;
            for (long i = 0; i < m; ++i) s += M.at(i, j) * y[i];
            x[j] = s;
        }
        return x;
    };
    op.norm_upper = std::sqrt(M.dot(M));
    return op;
}

/* Operator norm by power iteration on A*A from a seeded gaussian start.
 * The estimate ||A v_k|| over normalized v_k is the square root of a
 * Rayleigh quotient of the PSD matrix A*A, hence nondecreasing in k.
 * The returned and cached value carries a 1.01 safety factor on top of the
 * raw estimate; zero operator yields 0. */
inline double power_norm(LinearOperator& op, int iters, std::uint64_t seed) {
    if (iters < 1) throw DomainError("power_norm: iters must be >= 1");
    Rng rng(seed);
    Tensor v = Tensor::random_gaussian(op.domain_rows, op.domain_cols, rng);
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v *= 1.0 / nv;

    double est = 0.0;
    for (int i = 0; i < iters; ++i) {
        const Tensor w = op.apply(v);
        est = w.norm();
        if (est == 0.0) break;
        Tensor z = op.adjoint(w);
        const double nz = z.norm();
        if (nz == 0.0) break;
        z *= 1.0 / nz;
        v = std::move(z);
    }
    const double bound = est * 1.01;
    op.norm_upper = bound;
    return bound;
}

} // namespace ddd
