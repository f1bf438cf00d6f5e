#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ddd/convex.hpp"
#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/regularizer.hpp"
#include "ddd/solver.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

namespace detail {

inline Tensor matvec(const Tensor& M, const Tensor& v, bool transpose) {
    const long m = M.rows(), k = M.cols();
    if (!transpose) {
        if (static_cast<long>(v.size()) != k) throw DimensionError("matvec: length mismatch");
        Tensor out(m);
        for (long i = 0; i < m; ++i) {
            double s = 0.0;
            for (long j = 0; j < k; ++j) s += M.at(i, j) * v[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = s;
        }
        return out;
    }
    if (static_cast<long>(v.size()) != m) throw DimensionError("matvec: length mismatch");
    Tensor out(k);
    for (long j = 0; j < k; ++j) {
        double s = 0.0;
        for (long i = 0; i < m; ++i) s += M.at(i, j) * v[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

/* Gram matrices of a dense M (m x k). */
inline Tensor gram_mt_m(const Tensor& M) {
    const long m = M.rows(), k = M.cols();
    Tensor G(k, k);
    for (long a = 0; a < k; ++a)
        for (long b = a; b < k; ++b) {
            double s = 0.0;
            for (long i = 0; i < m; ++i) s += M.at(i, a) * M.at(i, b);
            G.at(a, b) = G.at(b, a) = s;
        }
    return G;
}

inline Tensor gram_m_mt(const Tensor& M) {
    const long m = M.rows(), k = M.cols();
    Tensor H(m, m);
    for (long a = 0; a < m; ++a)
        for (long b = a; b < m; ++b) {
            double s = 0.0;
            for (long j = 0; j < k; ++j) s += M.at(a, j) * M.at(b, j);
            H.at(a, b) = H.at(b, a) = s;
        }
    return H;
}

} // namespace detail

/* Cyclic Jacobi eigen-decomposition of a symmetric matrix S = V diag(w) V^T.
 * V holds orthonormal eigenvectors in its columns.  Quadratic convergence
 * makes the sweep cap generous for the n <= 64 sizes this is used at. */
inline void jacobi_eig(const Tensor& S_in, Tensor& V, std::vector<double>& w) {
    const long n = S_in.rows();
    if (S_in.cols() != n) throw DimensionError("jacobi_eig: matrix must be square");
    Tensor S = S_in;
    double scale = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            if (std::fabs(S.at(i, j) - S.at(j, i)) > 1e-12 * (1.0 + std::fabs(S.at(i, j))))
                throw DomainError("jacobi_eig: matrix is not symmetric");
            scale = std::max(scale, std::fabs(S.at(i, j)));
        }

    V = Tensor(n, n);
    for (long i = 0; i < n; ++i) V.at(i, i) = 1.0;

    const double stop = 1e-15 * std::max(1.0, scale) * static_cast<double>(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (long p = 0; p < n; ++p)
            for (long q = p + 1; q < n; ++q) off = std::max(off, std::fabs(S.at(p, q)));
        if (off <= stop) break;

        for (long p = 0; p < n; ++p)
            for (long q = p + 1; q < n; ++q) {
                const double apq = S.at(p, q);
                if (std::fabs(apq) <= stop * 1e-2) continue;
                const double theta = (S.at(q, q) - S.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = S.at(p, p), aqq = S.at(q, q);
                S.at(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                S.at(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                S.at(p, q) = S.at(q, p) = 0.0;
                for (long k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = S.at(k, p), akq = S.at(k, q);
                    S.at(k, p) = S.at(p, k) = c * akp - s * akq;
                    S.at(k, q) = S.at(q, k) = s * akp + c * akq;
                }
                for (long k = 0; k < n; ++k) {
                    const double vkp = V.at(k, p), vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - s * vkq;
                    V.at(k, q) = s * vkp + c * vkq;
                }
            }
    }

    w.assign(static_cast<std::size_t>(n), 0.0);
    for (long i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = S.at(i, i);
}

namespace detail {

/* x = S^+ b through an eigen-decomposition of symmetric PSD S; eigenvalues
 * below rel_tol * max|w| are treated as exact zeros. */
inline Tensor pinv_apply(const Tensor& S, const Tensor& b, double rel_tol = 1e-12) {
    Tensor V;
    std::vector<double> w;
    jacobi_eig(S, V, w);
    double wmax = 0.0;
    for (double wi : w) wmax = std::max(wmax, std::fabs(wi));
    const double cut = rel_tol * wmax;

    const long n = S.rows();
    Tensor x(n);
    for (long i = 0; i < n; ++i) {
        if (std::fabs(w[static_cast<std::size_t>(i)]) <= cut) continue;
        double vb = 0.0;
        for (long k = 0; k < n; ++k) vb += V.at(k, i) * b[static_cast<std::size_t>(k)];
        const double coef = vb / w[static_cast<std::size_t>(i)];
        for (long k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += coef * V.at(k, i);
    }
    return x;
}

} // namespace detail

struct OracleSolution {
    Tensor x_dagger;
    Tensor u_dagger;
    bool has_u = false;
    std::string method; // "pinv" | "highacc_dual"
};

/* Reference solution of the limit problem: the R-minimal point among the
 * minimizers of the data fit, for attainable data (A x = y solvable).
 *
 * Squared-norm R admits the closed form x = A^T (A A^T)^+ y with the dual
 * point u = -(A A^T)^+ y; any other strongly convex R goes through a
 * high-accuracy gradient descent on the limit dual
 *     d(u) = R*(-A^T u) + <y, u>,
 * whose gradient is y - A grad R*(-A^T u), with exact curvature constants
 * taken from the eigenvalues of M^T M.  Non-convergence or an unattainable
 * datum raises OracleFailure rather than returning a wrong certificate. */
inline OracleSolution oracle_solve(const Tensor& M, const Tensor& y, const Regularizer& R) {
    const long m = M.rows(), k = M.cols();
    if (m > 64 || k > 64) throw DomainError("oracle_solve: dimension cap is 64");
    if (static_cast<long>(y.size()) != m) throw DimensionError("oracle_solve: y length mismatch");

    OracleSolution sol;
    if (R.kind == "squared_norm") {
        const Tensor H = detail::gram_m_mt(M);
        const Tensor hy = detail::pinv_apply(H, y);
        sol.u_dagger = -hy;
        sol.x_dagger = detail::matvec(M, hy, true);
        sol.has_u = true;
        sol.method = "pinv";
    } else {
        const Tensor G = detail::gram_mt_m(M);
        Tensor V;
        std::vector<double> w;
        jacobi_eig(G, V, w);
        double wmax = 0.0;
        for (double wi : w) wmax = std::max(wmax, wi);
        if (wmax <= 0.0) throw OracleFailure("oracle_solve: zero operator");
        const double step = R.sigma_r / wmax;

        Tensor u(m);
        Tensor x = R.grad_conj(-detail::matvec(M, u, true));
        bool done = false;
        for (long it = 0; it < 1000000; ++it) {
            Tensor g = y - detail::matvec(M, x, false);
            if (g.norm() <= 1e-12) {
                done = true;
                break;
            }
            u.axpy(-step, g);
            x = R.grad_conj(-detail::matvec(M, u, true));
        }
        if (!done) throw OracleFailure("oracle_solve: high-accuracy dual run did not reach gradient norm 1e-12");
        sol.u_dagger = u;
        sol.x_dagger = x;
        sol.has_u = true;
        sol.method = "highacc_dual";
    }

    const double feas = dist(detail::matvec(M, sol.x_dagger, false), y);
    if (feas > 1e-8 * (1.0 + y.norm()))
        throw OracleFailure("oracle_solve: datum not attainable, feasibility residual " + std::to_string(feas));
    return sol;
}

/* Partial sum of sum_{n >= N} m*(r lambda_n) / lambda_n over the supplied
 * (finite, positive) schedule prefix, truncated once a term drops below
 * 1e-15.  An infinite term means r lambda_n left the domain of m*, which the
 * caller's choice of N was supposed to rule out. */
inline double tail_sum(const ConditioningModulus& m, double r, const std::vector<double>& lambdas, std::size_t N) {
    if (N >= lambdas.size()) throw DomainError("tail_sum: N beyond schedule prefix");
    if (r < 0.0) throw DomainError("tail_sum: r must be nonnegative");
    double sum = 0.0;
    for (std::size_t n = N; n < lambdas.size(); ++n) {
        const double lam = lambdas[n];
        if (!(lam > 0.0)) throw DomainError("tail_sum: lambdas must be positive");
        const xreal t = m.eval_conj(r * lam);
        if (!t.finite()) throw PreconditionViolation("tail_sum: m*(r lambda_n) = +inf at n = " + std::to_string(n));
        const double term = t.value() / lam;
        sum += term;
        if (term < 1e-15) break;
    }
    return sum;
}

/* Rate constant C with C^2 = ||u_N - u+||^2 / (tau sigma_R)
 * + (2/sigma_R) sum_{n>=N} m*(||u+|| lambda_n) / lambda_n; the iterates then
 * obey ||x_n - x+|| <= C / sqrt(n - N) past N. */
inline double rate_constant(const Tensor& u_N, const Tensor& u_dagger, double tau, double sigma_r,
                            const ConditioningModulus& m, const std::vector<double>& lambdas, std::size_t N) {
    if (!(tau > 0.0) || !(sigma_r > 0.0)) throw DomainError("rate_constant: tau and sigma_r must be positive");
    const double head = dist(u_N, u_dagger);
    const double c2 = head * head / (tau * sigma_r) + 2.0 / sigma_r * tail_sum(m, u_dagger.norm(), lambdas, N);
    return std::sqrt(c2);
}

/* Distance bound sqrt(2 (d_limit(u) - inf_d) / sigma_R) on ||x - x+|| for
 * x = grad R*(-A^T u).  A gap below -1e-12 means inf_d is inconsistent with
 * the supplied point and is surfaced as an error; smaller negative values
 * are rounding and clamp to zero.  +inf dual value yields +inf (valid). */
inline double primal_gap_bound(const Tensor& u, const LinearOperator& A, const Regularizer& R, const Tensor& y,
                               double inf_d) {
    const xreal d = dual_value_limit(u, A, R, y);
    if (!d.finite()) return std::numeric_limits<double>::infinity();
    double gap = d.value() - inf_d;
    if (gap < -1e-12)
        throw PreconditionViolation("primal_gap_bound: negative gap " + std::to_string(gap) +
                                    ", inf_d inconsistent");
    if (gap < 0.0) gap = 0.0;
    return std::sqrt(2.0 * gap / R.sigma_r);
}

struct EnergyCheck {
    double max_violation = -std::numeric_limits<double>::infinity();
    long checked = 0;
};

/* Per-iteration energy estimate, probed at a fixed dual point u:
 *     (1/2tau) ||u_{n+1} - u||^2 - (1/2tau) ||u_n - u||^2
 *         <= d_n(u) - d_n(u_{n+1}),
 * with d_n the dual objective under the lambda of step n.  Returns the
 * largest left-minus-right margin over the run (negative means the estimate
 * held everywhere).  Steps where d_n(u) = +inf hold trivially and are
 * skipped; d_n(u_{n+1}) is finite by construction of the prox step. */
inline EnergyCheck energy_estimate_check(const LinearOperator& A, const Regularizer& R, const DataFit& D,
                                         const Schedule& schedule, long iters, const Tensor& u_probe) {
    EnergyCheck out;
    RunOptions opt;
    opt.max_iters = iters;
    opt.record_dual = false;
    opt.on_step = [&](const SolverState& prev, const SolverState& next) {
        const double lam = next.lambda_n;
        const xreal du = dual_value(u_probe, lam, A, R, D);
        if (!du.finite()) return;
        const xreal dnext = dual_value(next.u, lam, A, R, D);
        if (!dnext.finite()) throw OracleFailure("energy_estimate_check: d_n(u_{n+1}) is +inf");
        const double lhs =
            (dist(next.u, u_probe) * dist(next.u, u_probe) - dist(prev.u, u_probe) * dist(prev.u, u_probe)) /
            (2.0 * next.tau);
        const double rhs = du.value() - dnext.value();
        out.max_violation = std::max(out.max_violation, lhs - rhs);
        ++out.checked;
    };
    run(A, R, D, schedule, opt);
    return out;
}

/* Largest increase of consecutive recorded dual values d_n(u_{n+1}); a
 * nonpositive result certifies the dissipativity property on that run. */
inline double dissipativity_max_increase(const RunTrace& trace) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
        const TraceRow& a = trace.rows[i];
        const TraceRow& b = trace.rows[i + 1];
        if (!a.has_dual || !b.has_dual) throw DomainError("dissipativity_max_increase: run lacks dual values");
        if (b.dual.is_inf()) return std::numeric_limits<double>::infinity();
        if (a.dual.is_inf()) continue;
        worst = std::max(worst, b.dual.value() - a.dual.value());
    }
    return worst;
}

} // namespace ddd
