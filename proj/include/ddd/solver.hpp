#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "ddd/convex.hpp"
#include "ddd/datafit.hpp"
#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/regularizer.hpp"
#include "ddd/schedule.hpp"
#include "ddd/tensor.hpp"
#include "ddd/trace.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* Iterates of the diagonal dual descent box.  u lives in the range of A
 * (dual variable), x in its domain; x always equals grad R*(-A^T u) for the
 * u it was derived from, i.e. after a step x holds x_n while u holds u_{n+1}. */
struct SolverState {
    Tensor u;
    Tensor x;
    Tensor w;
    long n = 0;
    double lambda_n = 0.0;
    double tau = 0.0;
};

/* L = ||A||^2 / sigma_r + lambda0 / sigma_psi, with lambda0/inf = 0 for
 * indicator-type psi. */
inline double step_constant(double normA, double sigma_r, double lambda0, double sigma_psi) {
    if (!(sigma_r > 0.0)) throw DomainError("step_constant: sigma_r must be positive");
    if (!(lambda0 > 0.0)) throw DomainError("step_constant: lambda0 must be positive");
    if (normA < 0.0) throw DomainError("step_constant: normA must be nonnegative");
    const double smooth = std::isinf(sigma_psi) ? 0.0 : lambda0 / sigma_psi;
    return normA * normA / sigma_r + smooth;
}

/* One application of the three-line box under the given lambda:
 *   x_n     = grad R*(-A^T u_n)
 *   w_{n+1} = u_n + tau A x_n - tau grad psi*(lambda u_n)
 *   u_{n+1} = w_{n+1} - tau prox_{(tau lambda)^{-1} phi}(w_{n+1} / tau)
 * tau = 0 is a degenerate test-only step and leaves the state unchanged.
 * lambda = 0 is admissible only when phi = delta_0 (the third line is then
 * the identity), which the frozen test schedule exploits. */
inline void iterate_in_place(SolverState& s, const LinearOperator& A, const Regularizer& R, const DataFit& D,
                             double lambda) {
    if (s.tau == 0.0) return;
    if (!(s.tau > 0.0)) throw DomainError("iterate: tau must be nonnegative");
    if (lambda < 0.0) throw DomainError("iterate: lambda must be nonnegative");
    if (lambda == 0.0 && !D.phi_is_zero) throw DomainError("iterate: lambda = 0 requires phi = delta_0");

    Tensor minus_atu = A.adjoint(s.u);
    minus_atu *= -1.0;
    s.x = R.grad_conj(minus_atu);

    Tensor lam_u = s.u;
    lam_u *= lambda;
    s.w = s.u;
    s.w.axpy(s.tau, A.apply(s.x));
    s.w.axpy(-s.tau, D.grad_psi_conj(lam_u));

    if (D.phi_is_zero) {
        s.u = s.w;
    } else {
        Tensor scaled = s.w;
        scaled *= 1.0 / s.tau;
        const double alpha = 1.0 / (s.tau * lambda);
        s.u = s.w;
        s.u.axpy(-s.tau, D.prox_phi(alpha, scaled));
    }
    s.lambda_n = lambda;
    s.n += 1;
}

inline SolverState iterate(const SolverState& s, const LinearOperator& A, const Regularizer& R, const DataFit& D,
                           const Schedule& schedule) {
    if (schedule.exhausted()) throw DomainError("iterate: schedule exhausted");
    SolverState next = s;
    iterate_in_place(next, A, R, D, schedule.current());
    return next;
}

/* d_lambda(u) = R*(-A^T u) + D*(lambda u) / lambda. */
inline xreal dual_value(const Tensor& u, double lambda, const LinearOperator& A, const Regularizer& R,
                        const DataFit& D) {
    if (!(lambda > 0.0)) throw DomainError("dual_value: lambda must be positive");
    Tensor minus_atu = A.adjoint(u);
    minus_atu *= -1.0;
    const xreal rstar = conj_value_via_grad(R.value, R.grad_conj, minus_atu);
    Tensor lam_u = u;
    lam_u *= lambda;
    return rstar + (1.0 / lambda) * D.conj_value(lam_u);
}

/* Limiting dual objective d_inf(u) = R*(-A^T u) + <y_bar, u>. */
inline xreal dual_value_limit(const Tensor& u, const LinearOperator& A, const Regularizer& R, const Tensor& y_bar) {
    Tensor minus_atu = A.adjoint(u);
    minus_atu *= -1.0;
    const xreal rstar = conj_value_via_grad(R.value, R.grad_conj, minus_atu);
    return rstar + xreal(y_bar.dot(u));
}

struct RunOptions {
    long max_iters = 1000;
    Tensor u0;                // empty means 0 in the range of A
    bool record_dual = true;  // d_n(u_{n+1}) per row; forced on for warm restart
    bool capture_x = false;   // keep x_n per iteration (x_traj[n] matches trace row n)
    bool capture_wall = false;
    /* Called after each step; prev holds u_n (with x_{n-1}), next holds
     * u_{n+1} with x_n and the lambda just used. */
    std::function<void(const SolverState& prev, const SolverState& next)> on_step;
    std::function<bool(const SolverState& next)> stop_when;
};

struct RunResult {
    RunTrace trace;
    SolverState final_state;
    std::vector<Tensor> x_traj;
};

/* Orchestrates the box over a schedule.
 *
 * Warm restart: the grid index advances when the relative change of
 * d_lambda between consecutive iterates falls below eps_wr, both values
 * being evaluated under the segment's lambda; an infinite value on either
 * side defers the test.  On advance the reference value is re-evaluated
 * under the new lambda so the next comparison stays within one segment.
 * The dual variable itself is carried across segments unchanged. */
inline RunResult run(const LinearOperator& A, const Regularizer& R, const DataFit& D, Schedule schedule,
                     const RunOptions& opt = {}) {
    const bool warm = schedule.kind() == Schedule::Kind::warm_restart;
    const bool want_dual = opt.record_dual || warm;

    RunResult res;
    SolverState& s = res.final_state;
    s.u = opt.u0.empty() ? A.range_zero() : opt.u0;
    if (s.u.rows() != A.range_rows || s.u.cols() != A.range_cols)
        throw DimensionError("run: u0 shape does not match the range of A");
    s.x = A.domain_zero();
    s.w = s.u;

    /* lambda0 = 0 only happens for the frozen test schedule; the smooth term
     * of L vanishes there just as it does for sigma_psi = inf. */
    const double lambda0 = schedule.lambda0();
    const double L = lambda0 > 0.0 ? step_constant(A.norm_upper, R.sigma_r, lambda0, D.sigma_psi)
                                   : step_constant(A.norm_upper, R.sigma_r, 1.0, std::numeric_limits<double>::infinity());
    s.tau = 1.0 / L;

    xreal prev_dual = 0.0;
    bool have_prev = false;
    if (warm) {
        prev_dual = dual_value(s.u, schedule.current(), A, R, D);
        have_prev = true;
    }

    for (long it = 0; it < opt.max_iters && !schedule.exhausted(); ++it) {
        const double lambda = schedule.current();
        const SolverState prev = opt.on_step ? s : SolverState{};
        const auto t0 = opt.capture_wall ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{};

        iterate_in_place(s, A, R, D, lambda);

        if (!s.u.all_finite() || !s.w.all_finite() || !s.x.all_finite())
            throw DivergenceError("run: non-finite iterate at n = " + std::to_string(s.n - 1), std::move(res.trace));

        TraceRow row;
        row.n = s.n - 1;
        row.lambda = lambda;
        if (want_dual) {
            row.dual = dual_value(s.u, lambda, A, R, D);
            row.has_dual = true;
        }
        if (opt.capture_wall) {
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        res.trace.rows.push_back(row);
        if (opt.capture_x) res.x_traj.push_back(s.x);
        if (opt.on_step) opt.on_step(prev, s);

        if (warm) {
            if (have_prev && schedule.warm_rule_fires(prev_dual, row.dual)) {
                schedule.advance();
                if (!schedule.exhausted()) {
                    prev_dual = dual_value(s.u, schedule.current(), A, R, D);
                    have_prev = true;
                }
            } else {
                prev_dual = row.dual;
                have_prev = true;
            }
        } else if (schedule.per_iteration_advance()) {
            schedule.advance();
        }

        if (opt.stop_when && opt.stop_when(s)) break;
    }
    return res;
}

} // namespace ddd
