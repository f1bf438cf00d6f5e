#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ddd/convex.hpp"
#include "ddd/errors.hpp"
#include "ddd/tensor.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* Data-fit term D(.;y) split as an infimal convolution psi_y # phi_y with
 * psi_y strongly convex.  The solver touches the split only through
 * grad_psi_conj and prox_phi; value/conj_value/modulus feed duality gaps and
 * the conditioning certificates.
 *
 * sigma_psi = +inf encodes psi_y = delta_{y-slot} (indicator of 0 after the
 * shift), which is sigma-strongly convex for every sigma; the step constant
 * uses the convention lambda0 / inf = 0.  phi_is_zero marks phi_y = delta_0,
 * collapsing the third solver line to u <- w. */
struct DataFit {
    std::string kind;
    Tensor y;
    double sigma_psi = 1.0;
    bool phi_is_zero = false;
    std::function<Tensor(const Tensor&)> grad_psi_conj;
    std::function<Tensor(double, const Tensor&)> prox_phi;
    std::function<xreal(const Tensor&)> value;
    std::function<xreal(const Tensor&)> conj_value;
    ConditioningModulus modulus;
};

namespace detail {

/* Dual feasibility tolerance for indicator constraints.  The third solver
 * line produces u with ||lambda u||_inf <= 1 up to a few ulps of rounding
 * (tau * (1/(tau lambda)) need not be exactly 1/lambda in floating point);
 * treating the constraint exactly would turn those ulps into spurious +inf
 * dual values. */
inline constexpr double feas_tol = 1e-12;

inline xreal box_indicator(double t, double radius) {
    return std::fabs(t) <= radius * (1.0 + feas_tol) ? xreal(0.0) : xreal::inf();
}

} // namespace detail

/* D(u;y) = (1/2)||u - y||^2:  psi_y = (1/2)||.-y||^2, phi_y = delta_0. */
inline DataFit square_loss(const Tensor& y) {
    DataFit df;
    df.kind = "square";
    df.y = y;
    df.sigma_psi = 1.0;
    df.phi_is_zero = true;
    df.grad_psi_conj = [y](const Tensor& u) {
        Tensor r = u;
        r += y;
        return r;
    };
    df.prox_phi = [y](double, const Tensor& u) {
        u.require_same_shape(y, "square_loss prox: shape mismatch");
        return Tensor(y.rows(), y.cols());
    };
    df.value = [y](const Tensor& u) -> xreal {
        Tensor r = u;
        r -= y;
        return 0.5 * r.dot(r);
    };
    /* D* = psi* + phi* = <y,v> + (1/2)||v||^2. */
    df.conj_value = [y](const Tensor& v) -> xreal { return y.dot(v) + 0.5 * v.dot(v); };
    df.modulus.eval = [](double t) { return 0.5 * t * t; };
    df.modulus.eval_conj = [](double t) -> xreal { return 0.5 * t * t; };
    df.modulus.p = 2.0;
    df.modulus.gamma = 1.0;
    df.modulus.eps = std::numeric_limits<double>::infinity();
    return df;
}

/* D(u;y) = ||u - y||_1:  psi_y = delta_0 (shifted), phi_y = ||.-y||_1. */
inline DataFit l1_loss(const Tensor& y) {
    DataFit df;
    df.kind = "l1";
    df.y = y;
    df.sigma_psi = std::numeric_limits<double>::infinity();
    df.phi_is_zero = false;
    df.grad_psi_conj = [y](const Tensor& u) {
        u.require_same_shape(y, "l1_loss grad_psi_conj: shape mismatch");
        return Tensor(y.rows(), y.cols());
    };
    df.prox_phi = [y](double alpha, const Tensor& u) {
        Tensor r = u;
        r -= y;
        r = soft_threshold(r, alpha);
        r += y;
        return r;
    };
    df.value = [y](const Tensor& u) -> xreal {
        Tensor r = u;
        r -= y;
        return r.norm1();
    };
    /* D*(v) = <y,v> + indicator(||v||_inf <= 1). */
    df.conj_value = [y](const Tensor& v) -> xreal {
        if (v.norm_inf() > 1.0 + detail::feas_tol) return xreal::inf();
        return y.dot(v);
    };
    df.modulus.eval = [](double t) { return std::fabs(t); };
    df.modulus.eval_conj = [](double t) -> xreal { return detail::box_indicator(t, 1.0); };
    df.modulus.p = 1.0;
    df.modulus.gamma = 1.0;
    df.modulus.eps = std::numeric_limits<double>::infinity();
    return df;
}

/* D(u;y) = KL(y, u) = sum y_j ln(y_j/u_j) - y_j + u_j on u > 0:
 * psi_y = delta_0 (shifted), phi_y = KL(y, .).
 *
 * Modulus of the appendix growth lemma, with c = d * ||y||_inf:
 *   m(t)  = |t| - c ln(1 + |t|/c)
 *   m*(t) = -c (|t| + ln(1 - |t|)) on |t| < 1, +inf outside.
 * m(t) < t^2/(2c) strictly away from 0 (the Taylor remainder of
 * ln(1+s) is negative), so the curvature constant 1/c certifies no ball;
 * gamma = 1/(2c) on eps = c does: m(c)/c^2 = (1 - ln 2) >= 1/4 and
 * m(t)/t^2 is decreasing. */
inline DataFit kl_loss(const Tensor& y) {
    for (long i = 0; i < y.size(); ++i)
        if (!(y[i] > 0.0)) throw DomainError("kl_loss: datum must be strictly positive");
    DataFit df;
    df.kind = "kl";
    df.y = y;
    df.sigma_psi = std::numeric_limits<double>::infinity();
    df.phi_is_zero = false;
    df.grad_psi_conj = [y](const Tensor& u) {
        u.require_same_shape(y, "kl_loss grad_psi_conj: shape mismatch");
        return Tensor(y.rows(), y.cols());
    };
    /* prox_{alpha KL(y,.)}(u)_j = (u_j - alpha + sqrt((u_j-alpha)^2 + 4 alpha y_j))/2,
     * always > 0; clamped at 1e-300 against underflow. */
    df.prox_phi = [y](double alpha, const Tensor& u) {
        u.require_same_shape(y, "kl_loss prox: shape mismatch");
        Tensor r = u;
        for (long j = 0; j < r.size(); ++j) {
            const double t = u[j] - alpha;
            double p = 0.5 * (t + std::sqrt(t * t + 4.0 * alpha * y[j]));
            if (p < 1e-300) p = 1e-300;
            r[j] = p;
        }
        return r;
    };
    df.value = [y](const Tensor& u) -> xreal {
        u.require_same_shape(y, "kl_loss value: shape mismatch");
        double s = 0.0;
        for (long j = 0; j < u.size(); ++j) {
            if (!(u[j] > 0.0)) return xreal::inf();
            s += y[j] * std::log(y[j] / u[j]) - y[j] + u[j];
        }
        return s;
    };
    /* D*(v) = sum -y_j ln(1 - v_j) on v < 1, +inf outside. */
    df.conj_value = [y](const Tensor& v) -> xreal {
        v.require_same_shape(y, "kl_loss conj_value: shape mismatch");
        double s = 0.0;
        for (long j = 0; j < v.size(); ++j) {
            if (1.0 - v[j] <= 0.0) return xreal::inf();
            s += -y[j] * std::log1p(-v[j]);
        }
        return s;
    };
    const double c = static_cast<double>(y.size()) * y.norm_inf();
    df.modulus.eval = [c](double t) {
        const double a = std::fabs(t);
        return a - c * std::log1p(a / c);
    };
    df.modulus.eval_conj = [c](double t) -> xreal {
        const double a = std::fabs(t);
        if (a >= 1.0) return xreal::inf();
        return -c * (a + std::log1p(-a));
    };
    df.modulus.p = 2.0;
    df.modulus.gamma = 1.0 / (2.0 * c);
    df.modulus.eps = c;
    return df;
}

/* D(u;y) = sum h_sigma(u_j - y_j) (Huber):
 * psi_y = (1/(2 sigma))||.-y||^2 (so sigma_psi = 1/sigma), phi_y = ||.||_1.
 * The infimal convolution ||.||_1 # (1/(2 sigma))||.-y||^2 evaluates
 * componentwise to h_sigma(u_j - y_j). */
inline DataFit huber_loss(const Tensor& y, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("huber_loss: sigma must be positive");
    DataFit df;
    df.kind = "huber";
    df.y = y;
    df.sigma_psi = 1.0 / sigma;
    df.phi_is_zero = false;
    /* psi*(u) = <y,u> + (sigma/2)||u||^2, grad = y + sigma u. */
    df.grad_psi_conj = [y, sigma](const Tensor& u) {
        Tensor r = u;
        r *= sigma;
        r += y;
        return r;
    };
    df.prox_phi = [](double alpha, const Tensor& u) { return soft_threshold(u, alpha); };
    df.value = [y, sigma](const Tensor& u) -> xreal {
        u.require_same_shape(y, "huber_loss value: shape mismatch");
        double s = 0.0;
        for (long j = 0; j < u.size(); ++j) s += huber_scalar(u[j] - y[j], sigma);
        return s;
    };
    /* D* = psi* + phi* = <y,v> + (sigma/2)||v||^2 + indicator(||v||_inf <= 1). */
    df.conj_value = [y, sigma](const Tensor& v) -> xreal {
        if (v.norm_inf() > 1.0 + detail::feas_tol) return xreal::inf();
        return y.dot(v) + 0.5 * sigma * v.dot(v);
    };
    df.modulus.eval = [sigma](double t) { return huber_scalar(t, sigma); };
    df.modulus.eval_conj = [sigma](double t) -> xreal {
        return detail::box_indicator(t, 1.0) + xreal(0.5 * sigma * t * t);
    };
    df.modulus.p = 2.0;
    df.modulus.gamma = 1.0 / sigma;
    df.modulus.eps = sigma;
    return df;
}

/* D(u;y) = a1 ||u-y||_1 + (a2/2)||u-y||^2, taken whole as psi_y
 * (sigma_psi = a2) with phi_y = delta_0.
 *
 * Radial modulus m = a1 h_{a2/a1}; its conjugate by the scaling rule
 * (a f)*(t) = a f*(t/a) is m*(t) = indicator(|t| <= a1) + a2 t^2 / (2 a1^2),
 * giving gamma = a1^2/a2 on eps = a2/a1. */
inline DataFit l1l2_loss(const Tensor& y, double a1, double a2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("l1l2_loss: weights must be positive");
    DataFit df;
    df.kind = "l1l2";
    df.y = y;
    df.sigma_psi = a2;
    df.phi_is_zero = true;
    /* grad psi*(u) = y + soft(u/a2, a1/a2) = y + soft(u, a1)/a2. */
    df.grad_psi_conj = [y, a1, a2](const Tensor& u) {
        Tensor r = soft_threshold(u, a1);
        r *= 1.0 / a2;
        r += y;
        return r;
    };
    df.prox_phi = [y](double, const Tensor& u) {
        u.require_same_shape(y, "l1l2_loss prox: shape mismatch");
        return Tensor(y.rows(), y.cols());
    };
    df.value = [y, a1, a2](const Tensor& u) -> xreal {
        Tensor r = u;
        r -= y;
        return a1 * r.norm1() + 0.5 * a2 * r.dot(r);
    };
    /* psi*(v) = <y,v> + sum ((|v_j| - a1)_+)^2 / (2 a2). */
    df.conj_value = [y, a1, a2](const Tensor& v) -> xreal {
        v.require_same_shape(y, "l1l2_loss conj_value: shape mismatch");
        double s = y.dot(v);
        for (long j = 0; j < v.size(); ++j) {
            const double e = std::fabs(v[j]) - a1;
            if (e > 0.0) s += e * e / (2.0 * a2);
        }
        return s;
    };
    df.modulus.eval = [a1, a2](double t) { return a1 * huber_scalar(t, a2 / a1); };
    df.modulus.eval_conj = [a1, a2](double t) -> xreal {
        return detail::box_indicator(t, a1) + xreal(a2 * t * t / (2.0 * a1 * a1));
    };
    df.modulus.p = 2.0;
    df.modulus.gamma = a1 * a1 / a2;
    df.modulus.eps = a2 / a1;
    return df;
}

inline xreal datafit_conj_value(const DataFit& df, const Tensor& v) { return df.conj_value(v); }

} // namespace ddd
