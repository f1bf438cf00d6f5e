#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ddd/datafit.hpp"
#include "ddd/errors.hpp"
#include "ddd/linop.hpp"
#include "ddd/regularizer.hpp"
#include "ddd/rng.hpp"
#include "ddd/schedule.hpp"
#include "ddd/solver.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

struct NoiseSpec {
    enum class Kind { none, gaussian, salt_pepper, poisson, mixed };
    Kind kind = Kind::none;
    double variance = 0.0;  // gaussian / mixed
    double intensity = 0.0; // salt_pepper / mixed, fraction of pixels hit
    double peak = 1.0;      // poisson: counts at intensity 1
    std::uint64_t seed = 0;

    static NoiseSpec none_spec() { return {}; }
    static NoiseSpec gaussian_spec(double variance, std::uint64_t seed) {
        NoiseSpec s;
        s.kind = Kind::gaussian;
        s.variance = variance;
        s.seed = seed;
        return s;
    }
    static NoiseSpec salt_pepper_spec(double intensity, std::uint64_t seed) {
        NoiseSpec s;
        s.kind = Kind::salt_pepper;
        s.intensity = intensity;
        s.seed = seed;
        return s;
    }
    static NoiseSpec poisson_spec(double peak, std::uint64_t seed) {
        NoiseSpec s;
        s.kind = Kind::poisson;
        s.peak = peak;
        s.seed = seed;
        return s;
    }
    static NoiseSpec mixed_spec(double variance, double intensity, std::uint64_t seed) {
        NoiseSpec s;
        s.kind = Kind::mixed;
        s.variance = variance;
        s.intensity = intensity;
        s.seed = seed;
        return s;
    }
};

namespace detail {

inline void check_unit_range(const Tensor& y, const char* what) {
    for (long i = 0; i < y.size(); ++i)
        if (!(y[i] >= 0.0 && y[i] <= 1.0)) throw DomainError(std::string(what) + ": datum must lie in [0,1]");
}

/* Overwrites exactly round(intensity*d) distinct entries with 0 or 1.
 * Positions come from a partial Fisher-Yates pass, then one fair bit per
 * hit pixel, in that order; both streams draw from the same generator so
 * the corruption pattern is a pure function of (y, intensity, seed). */
inline void salt_pepper_in_place(Tensor& y, double intensity, Rng& rng) {
    const std::size_t d = y.size();
    const auto hits = static_cast<std::size_t>(std::llround(intensity * static_cast<double>(d)));
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    for (std::size_t i = 0; i < hits; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(d - i)));
        std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < hits; ++i) y[idx[i]] = (rng.next_u64() & 1u) ? 1.0 : 0.0;
}

} // namespace detail

/* Corrupts y per spec; y itself is never modified.  salt_pepper and poisson
 * require y in [0,1] (image convention).  mixed applies gaussian then
 * salt-and-pepper from a single generator stream. */
inline Tensor apply_noise(const Tensor& y, const NoiseSpec& spec) {
    if (spec.variance < 0.0) throw DomainError("apply_noise: variance must be nonnegative");
    if (spec.intensity < 0.0 || spec.intensity > 1.0) throw DomainError("apply_noise: intensity must lie in [0,1]");
    if (!(spec.peak > 0.0)) throw DomainError("apply_noise: peak must be positive");

    Tensor out = y;
    Rng rng(spec.seed);
    switch (spec.kind) {
    case NoiseSpec::Kind::none: break;
    case NoiseSpec::Kind::gaussian: {
        const double sd = std::sqrt(spec.variance);
        for (long i = 0; i < out.size(); ++i) out[i] += sd * rng.gaussian();
        break;
    }
    case NoiseSpec::Kind::salt_pepper:
        detail::check_unit_range(y, "apply_noise(salt_pepper)");
        detail::salt_pepper_in_place(out, spec.intensity, rng);
        break;
    case NoiseSpec::Kind::poisson:
        detail::check_unit_range(y, "apply_noise(poisson)");
        for (long i = 0; i < out.size(); ++i)
            out[i] = static_cast<double>(rng.poisson(spec.peak * out[i])) / spec.peak;
        break;
    case NoiseSpec::Kind::mixed: {
        const double sd = std::sqrt(spec.variance);
        for (long i = 0; i < out.size(); ++i) out[i] += sd * rng.gaussian();
        detail::salt_pepper_in_place(out, spec.intensity, rng);
        break;
    }
    }
    return out;
}

/* Certified data perturbation: psi_y(z) <= psi_y_hat(z) + delta ||z||^theta
 * + const, uniformly in z, by the loss-specific closed form below. */
struct PerturbationCert {
    double delta = 0.0;
    double theta = 0.0;
    std::string loss_kind;
};

/* Closed-form (delta, theta) per loss family:
 *   square, huber, l1, l1l2:  delta = ||y - y_hat||, theta = 0
 *   kl:                       delta = ||sqrt(y) - sqrt(y_hat)||, theta = 1/2
 * kl requires both data strictly positive. */
inline PerturbationCert measure_delta(const std::string& loss_kind, const Tensor& y, const Tensor& y_hat) {
    y.require_same_shape(y_hat, "measure_delta: shape mismatch");
    PerturbationCert cert;
    cert.loss_kind = loss_kind;
    if (loss_kind == "square" || loss_kind == "huber" || loss_kind == "l1" || loss_kind == "l1l2") {
        cert.delta = dist(y, y_hat);
        cert.theta = 0.0;
    } else if (loss_kind == "kl") {
        double s = 0.0;
        for (long i = 0; i < y.size(); ++i) {
            if (!(y[i] > 0.0) || !(y_hat[i] > 0.0)) throw DomainError("measure_delta(kl): data must be positive");
            const double r = std::sqrt(y[i]) - std::sqrt(y_hat[i]);
            s += r * r;
        }
        cert.delta = std::sqrt(s);
        cert.theta = 0.5;
    } else {
        throw ConfigError("measure_delta: unknown loss kind '" + loss_kind + "'");
    }
    return cert;
}

struct StabilityReport {
    std::vector<double> gap;   // ||x_n - x_n^noisy||
    std::vector<double> bound; // certified envelope at each n
    double delta = 0.0;
    double theta = 0.0;
    double tau = 0.0;
};

/* Runs the iteration twice, on the clean and on the perturbed datum, with
 * shared u0 = 0, step size, and lambda sequence, and reports the realized
 * primal gap next to its certified envelope
 *     (delta / ||A||) * (n + tau^(theta-1) * sum_{k<n} lambda_k^(-theta)).
 * The norm constant is the operator's stored upper bound; the step size is
 * derived from the same bound, which keeps the envelope valid.  Schedules
 * with data-dependent advances would break the shared-lambda premise, so
 * only deterministic schedules are accepted. */
inline StabilityReport stability_twin_run(const LinearOperator& A, const Regularizer& R, const DataFit& clean,
                                          const DataFit& noisy, const Schedule& schedule, long n_iters) {
    if (clean.kind != noisy.kind) throw ConfigError("stability_twin_run: data-fit kinds differ");
    if (schedule.kind() == Schedule::Kind::warm_restart)
        throw ConfigError("stability_twin_run: schedule must be deterministic (vanilla or polynomial)");
    if (n_iters < 1) throw DomainError("stability_twin_run: n_iters must be >= 1");

    const PerturbationCert cert = measure_delta(clean.kind, clean.y, noisy.y);

    RunOptions opt;
    opt.max_iters = n_iters;
    opt.record_dual = false;
    opt.capture_x = true;
    const RunResult clean_run = run(A, R, clean, schedule, opt);
    const RunResult noisy_run = run(A, R, noisy, schedule, opt);

    StabilityReport rep;
    rep.delta = cert.delta;
    rep.theta = cert.theta;
    rep.tau = clean_run.final_state.tau;

    const std::size_t len = std::min(clean_run.x_traj.size(), noisy_run.x_traj.size());
    const double norm_a = A.norm_upper;
    const double tau_pow = std::pow(rep.tau, cert.theta - 1.0);
    double lambda_sum = 0.0; // sum over k < n of lambda_k^(-theta)
    rep.gap.reserve(len);
    rep.bound.reserve(len);
    for (std::size_t n = 0; n < len; ++n) {
        rep.gap.push_back(dist(clean_run.x_traj[n], noisy_run.x_traj[n]));
        rep.bound.push_back(cert.delta / norm_a * (static_cast<double>(n) + tau_pow * lambda_sum));
        const double lam = clean_run.trace.rows[n].lambda;
        lambda_sum += std::pow(lam, -cert.theta);
    }
    return rep;
}

} // namespace ddd
