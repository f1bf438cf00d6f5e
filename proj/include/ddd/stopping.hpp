#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/rng.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

/* Ground-truth gap (1/d) ||x - x_true||, d = pixel count. */
inline double gtg(const Tensor& x, const Tensor& x_true) {
    x.require_same_shape(x_true, "gtg: shape mismatch");
    return dist(x, x_true) / static_cast<double>(x.size());
}

inline std::vector<double> gtg_curve(const std::vector<Tensor>& traj, const Tensor& x_true) {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& x : traj) out.push_back(gtg(x, x_true));
    return out;
}

struct StopReport {
    long chosen_n = 0;
    std::string criterion; // "gtg" | "sure" | "fixed"
    std::vector<double> curve;
    long smoothing_window = 0; // sure only
};

struct SureResult {
    std::vector<double> curve;
    double epsilon = 0.0;
};

/* SURE(x_n) = (1/d)||A x_n - y_hat||^2 + (2 sigma^2 / d) <A D_n, xi>.
 *
 * The derivative term D_n is a finite difference between the given
 * trajectory and a twin produced by rerunning the whole algorithm on
 * y_hat + eps*xi; prox maps are only piecewise differentiable, so a twin run
 * replaces exact forward-mode differentiation.  xi is standard normal from
 * xi_seed and eps = 1e-4 (1 + ||y_hat||) / ||xi||.  The curve stops at the
 * shorter of the two trajectories (schedules with data-dependent advances
 * may not produce equal lengths). */
inline SureResult sure(const std::vector<Tensor>& x_traj,
                       const std::function<std::vector<Tensor>(const Tensor&)>& rerun, const LinearOperator& A,
                       const Tensor& y_hat, double sigma2, std::uint64_t xi_seed) {
    if (sigma2 < 0.0) throw DomainError("sure: sigma2 must be nonnegative");
    Rng rng(xi_seed);
    const Tensor xi = Tensor::random_gaussian(y_hat.rows(), y_hat.cols(), rng);
    const double eps = 1e-4 * (1.0 + y_hat.norm()) / xi.norm();

    Tensor y_pert = y_hat;
    y_pert.axpy(eps, xi);
    const std::vector<Tensor> twin = rerun(y_pert);

    const std::size_t len = std::min(x_traj.size(), twin.size());
    const double d = static_cast<double>(y_hat.size());
    SureResult res;
    res.epsilon = eps;
    res.curve.reserve(len);
    for (std::size_t n = 0; n < len; ++n) {
        Tensor resid = A.apply(x_traj[n]);
        resid -= y_hat;
        Tensor D = twin[n];
        D -= x_traj[n];
        D *= 1.0 / eps;
        const double value = resid.dot(resid) / d + (2.0 * sigma2 / d) * A.apply(D).dot(xi);
        res.curve.push_back(value);
    }
    return res;
}

/* Index minimizing the slope magnitude of the smoothed curve.
 *
 * Smoothing: symmetric moving average over [i - w/2, i + w/2], truncated at
 * the boundaries.  Slopes: central differences of the smoothed curve.
 * Admissible indices exclude the first `window` entries (initial transient)
 * and the endpoints (no central slope there); ties break toward the latest
 * index.  The selection is invariant under adding a constant to the curve. */
inline long select_by_min_slope(const std::vector<double>& curve, long window = 10) {
    if (window < 1) throw ConfigError("select_by_min_slope: window must be >= 1");
    const long n = static_cast<long>(curve.size());
    if (n < 2 * window) throw ConfigError("select_by_min_slope: curve shorter than 2*window");

    const long h = window / 2;
    std::vector<double> smooth(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const long lo = std::max(0L, i - h), hi = std::min(n - 1, i + h);
        double s = 0.0;
        for (long j = lo; j <= hi; ++j) s += curve[static_cast<std::size_t>(j)];
        smooth[static_cast<std::size_t>(i)] = s / static_cast<double>(hi - lo + 1);
    }

    long best = -1;
    double best_mag = 0.0;
    for (long i = std::max(1L, window); i <= n - 2; ++i) {
        const double slope = 0.5 * (smooth[static_cast<std::size_t>(i + 1)] - smooth[static_cast<std::size_t>(i - 1)]);
        const double mag = std::fabs(slope);
        if (best < 0 || mag <= best_mag) {
            best = i;
            best_mag = mag;
        }
    }
    if (best < 0) throw ConfigError("select_by_min_slope: no admissible index");
    return best;
}

struct TheoreticalStop {
    double t = 0.0;
    long n = 0;
};

/* Stopping time from the early-stopping root equation: with alpha = beta*theta
 * and C1 = b / (2 a (1 + alpha)), solve
 *     eta(t) = t^alpha (t - T)^(3/2) = C1 / delta
 * on (T, inf).  eta is continuous, strictly increasing, and onto (0, inf),
 * so bisection applies; the bracket is tightened essentially to machine
 * precision (well past the required 1e-10 relative tolerance) so the residual
 * identity |eta(t) delta - C1| <= 1e-9 C1 holds even near t = T where eta is
 * steep.  n = ceil(t). */
inline TheoreticalStop theoretical_stop(double delta, double beta, double theta, double a, double b, double T) {
    if (!(delta > 0.0) || !(beta > 0.0) || theta < 0.0 || !(a > 0.0) || !(b > 0.0) || T < 0.0)
        throw DomainError("theoretical_stop: parameters out of range");
    const double alpha = beta * theta;
    const double c1 = b / (2.0 * a * (1.0 + alpha));
    const double target = c1 / delta;

    auto eta = [&](double t) { return std::pow(t, alpha) * std::pow(t - T, 1.5); };

    double lo = T;
    double hi = T + 1.0;
    while (eta(hi) < target) hi = T + 2.0 * (hi - T);
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (eta(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    TheoreticalStop out;
    out.t = 0.5 * (lo + hi);
    out.n = static_cast<long>(std::ceil(out.t));
    return out;
}

} // namespace ddd
