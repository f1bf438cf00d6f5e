#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ddd/convex.hpp"
#include "ddd/errors.hpp"
#include "ddd/image_ops.hpp"
#include "ddd/linop.hpp"
#include "ddd/rng.hpp"
#include "ddd/tensor.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* sigma_r-strongly convex regularizer exposing its value and the conjugate
 * gradient grad R* (single-valued and (1/sigma_r)-Lipschitz by strong
 * convexity).  The solver only ever calls grad_conj; value feeds dual
 * objectives through conj_value_via_grad. */
struct Regularizer {
    std::string kind;
    double sigma_r = 1.0;
    std::function<xreal(const Tensor&)> value;
    std::function<Tensor(const Tensor&)> grad_conj;

    struct InnerCfg {
        int iters = 50;
        double tol = 1e-6;
    };
    InnerCfg inner_cfg; // meaningful for the TV inner loop only
};

/* R = (1/2)||.||^2:  grad R* = identity. */
inline Regularizer squared_norm() {
    Regularizer r;
    r.kind = "squared_norm";
    r.sigma_r = 1.0;
    r.value = [](const Tensor& x) -> xreal { return 0.5 * x.dot(x); };
    r.grad_conj = [](const Tensor& v) { return v; };
    return r;
}

/* R(x) = mu ||W x||_1 + (sigma/2) ||x||^2 for orthogonal W:
 * grad R*(v) = W^T soft(W v / sigma, mu / sigma). */
inline Regularizer l1_analysis(const LinearOperator& W, double mu, double sigma) {
    if (!(mu > 0.0) || !(sigma > 0.0)) throw DomainError("l1_analysis: mu and sigma must be positive");
    /* Orthogonality check: isometry and W^T W = Id on seeded probes. */
    Rng rng(0x11a5);
    for (int k = 0; k < 3; ++k) {
        const Tensor x = Tensor::random_gaussian(W.domain_rows, W.domain_cols, rng);
        const Tensor wx = W.apply(x);
        if (std::fabs(wx.norm() - x.norm()) > 1e-8 * (1.0 + x.norm()) || dist(W.adjoint(wx), x) > 1e-8 * (1.0 + x.norm()))
            throw DomainError("l1_analysis: W fails the isometry test");
    }
    Regularizer r;
    r.kind = "haar_l1";
    r.sigma_r = sigma;
    r.value = [W, mu, sigma](const Tensor& x) -> xreal {
        return mu * W.apply(x).norm1() + 0.5 * sigma * x.dot(x);
    };
    r.grad_conj = [W, mu, sigma](const Tensor& v) {
        Tensor c = W.apply(v);
        c *= 1.0 / sigma;
        c = soft_threshold(c, mu / sigma);
        return W.adjoint(c);
    };
    return r;
}

namespace detail {

/* prox of beta ||grad .||_1 at z via projected gradient on the dual field:
 * maximize over ||p||_inf <= beta of -(1/2)||z + div p||^2; the primal
 * recovery is x = z + div p.  ||div||^2 <= 8 justifies the fixed 1/8 step.
 * Stops at iters or when ||p_k+1 - p_k|| / max(1, ||p_k||) < tol. */
inline Tensor tv_prox(const Tensor& z, double beta, int iters, double tol) {
    const LinearOperator G = grad_2d(z.rows(), z.cols());
    Tensor p(2 * z.rows(), z.cols());
    for (int k = 0; k < iters; ++k) {
        Tensor x = z + div_2d(p);
        Tensor g = G.apply(x);
        Tensor p_next = p;
        p_next.axpy(0.125, g);
        for (long i = 0; i < p_next.size(); ++i) {
            if (p_next[i] > beta) p_next[i] = beta;
            if (p_next[i] < -beta) p_next[i] = -beta;
        }
        const double change = dist(p_next, p);
        const double scale = std::max(1.0, p.norm());
        p = p_next;
        if (change / scale < tol) break;
    }
    return z + div_2d(p);
}

} // namespace detail

/* R(x) = mu ||x||_TV + (sigma/2)||x||^2 with anisotropic TV on the grad_2d
 * stencil:  grad R*(v) = prox of (mu/sigma)||grad .||_1 at v/sigma, computed
 * by the inner dual loop above.  Inexact by construction; the budget is part
 * of the regularizer so runs stay reproducible. */
inline Regularizer tv_quad(double mu, double sigma, int inner_iters = 50, double inner_tol = 1e-6) {
    if (!(mu > 0.0) || !(sigma > 0.0)) throw DomainError("tv_quad: mu and sigma must be positive");
    if (inner_iters < 1) throw DomainError("tv_quad: inner_iters must be >= 1");
    Regularizer r;
    r.kind = "tv_quad";
    r.sigma_r = sigma;
    r.inner_cfg = {inner_iters, inner_tol};
    r.value = [mu, sigma](const Tensor& x) -> xreal {
        const LinearOperator G = grad_2d(x.rows(), x.cols());
        return mu * G.apply(x).norm1() + 0.5 * sigma * x.dot(x);
    };
    r.grad_conj = [mu, sigma, inner_iters, inner_tol](const Tensor& v) {
        Tensor z = v;
        z *= 1.0 / sigma;
        return detail::tv_prox(z, mu / sigma, inner_iters, inner_tol);
    };
    return r;
}

} // namespace ddd
