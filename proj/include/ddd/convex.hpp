#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "ddd/errors.hpp"
#include "ddd/tensor.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* Scalar soft threshold: prox of a|.| at x. */
inline double soft_threshold(double x, double a) {
    if (x > a) return x - a;
    if (x < -a) return x + a;
    return 0.0;
}

inline Tensor soft_threshold(const Tensor& x, double a) {
    Tensor r = x;
    for (long i = 0; i < r.size(); ++i) r[i] = soft_threshold(r[i], a);
    return r;
}

/* Huber function h_sigma: t^2/(2 sigma) on |t| <= sigma, |t| - sigma/2 outside.
 * Equals the infimal convolution of |.| with (1/(2 sigma))(.)^2. */
inline double huber_scalar(double t, double sigma) {
    const double a = std::fabs(t);
    if (a <= sigma) return t * t / (2.0 * sigma);
    return a - sigma / 2.0;
}

/* Growth certificate for a convex function around its minimizer:
 * m even, m(0) = 0, m(t) > 0 elsewhere, and m(t) >= (gamma/p)|t|^p for
 * |t| < eps.  eval_conj is the one-dimensional conjugate m*. */
struct ConditioningModulus {
    std::function<double(double)> eval;
    std::function<xreal(double)> eval_conj;
    double p = 2.0;
    double gamma = 1.0;
    double eps = 1.0;
};

/* Brute-force scalar prox: argmin_x alpha*f(x) + (x-u)^2/2 by golden-section
 * search on [u - 10(1+alpha), u + 10(1+alpha)].  The quadratic term makes the
 * objective strictly convex, hence strictly unimodal, so golden section
 * converges without derivative information.  Extended-valued f is handled by
 * first bisecting the bracket endpoints onto the effective domain.
 *
 * This is the reference oracle the closed-form proxes are tested against; it
 * must stay independent of them. */
template <class F>
double prox_scalar_bruteforce(F&& f, double alpha, double u, double tol = 1e-8) {
    if (!(alpha > 0.0)) throw DomainError("prox_scalar_bruteforce: alpha must be positive");
    double lo = u - 10.0 * (1.0 + alpha);
    double hi = u + 10.0 * (1.0 + alpha);

    auto g = [&](double x) -> xreal {
        xreal fx = f(x);
        if (!fx.finite()) return xreal::inf();
        return xreal(alpha * fx.value() + 0.5 * (x - u) * (x - u));
    };

    /* A finite anchor inside the effective domain. */
    double seed = u;
    if (!g(seed).finite()) {
        bool found = false;
        const int grid = 4096;
        for (int i = 0; i <= grid; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / grid;
            if (g(x).finite()) {
                seed = x;
                found = true;
                break;
            }
        }
        if (!found) throw DomainError("prox_scalar_bruteforce: objective infinite on the whole search interval");
    }

    /* Pull an infinite endpoint onto the domain boundary. */
    auto shrink = [&](double bad) {
        double good = seed;
        for (int i = 0; i < 128; ++i) {
            const double mid = 0.5 * (bad + good);
            if (g(mid).finite())
                good = mid;
            else
                bad = mid;
        }
        return good;
    };
    if (!g(lo).finite()) lo = shrink(lo);
    if (!g(hi).finite()) hi = shrink(hi);

    const double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    xreal gc = g(c), gd = g(d);
    for (int it = 0; it < 400 && (b - a) > tol; ++it) {
        if (gc <= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - invphi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + invphi * (b - a);
            gd = g(d);
        }
    }
    return 0.5 * (a + b);
}

/* f*(v) via the Fenchel-Young equality at x = grad f*(v):
 * f*(v) = <v, x> - f(x).  Exact whenever grad_f_conj is the exact conjugate
 * gradient; f(x) = +inf propagates as +inf. */
template <class FV, class GC>
xreal conj_value_via_grad(FV&& f_value, GC&& grad_f_conj, const Tensor& v) {
    const Tensor x = grad_f_conj(v);
    const xreal fx = f_value(x);
    if (!fx.finite()) return xreal::inf();
    return xreal(v.dot(x) - fx.value());
}

/* Moreau identity residual || prox_f(x) + prox_{f*}(x) - x ||.
 * Zero for every x when the two proxes form a conjugate pair at unit scale. */
template <class P, class PC>
double moreau_check(P&& prox_f, PC&& prox_f_conj, const Tensor& x) {
    const Tensor a = prox_f(x);
    const Tensor b = prox_f_conj(x);
    Tensor r = a;
    r += b;
    r -= x;
    return r.norm();
}

} // namespace ddd
