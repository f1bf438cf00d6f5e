#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ddd/convex.hpp"
#include "ddd/datafit.hpp"
#include "ddd/diagnostics.hpp"
#include "ddd/generators.hpp"
#include "ddd/haar.hpp"
#include "ddd/harness.hpp"
#include "ddd/image_ops.hpp"
#include "ddd/noise.hpp"
#include "ddd/solver.hpp"
#include "ddd/stopping.hpp"

namespace ddd {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline VerifyCheck vcheck(const std::string& name, const std::function<std::string()>& body) {
    VerifyCheck c;
    c.name = name;
    try {
        c.detail = body();
        c.passed = true;
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = e.what();
    }
    return c;
}

inline void vrequire(bool ok, const std::string& msg) {
    if (!ok) throw OracleFailure(msg);
}

} // namespace detail

/* Quick self-contained diagnostics battery behind the `verify` subcommand.
 * Each check recomputes its own reference; a throw anywhere is a failure of
 * that row only. */
inline std::vector<VerifyCheck> verify_all() {
    using detail::vcheck;
    using detail::vrequire;
    std::vector<VerifyCheck> out;

    out.push_back(vcheck("prox closed forms match brute force", [] {
        Rng rng(11);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double y = rng.uniform(-2.0, 2.0), u = rng.uniform(-4.0, 4.0), al = rng.uniform(0.1, 3.0);
            const double closed = y + soft_threshold(u - y, al);
            const double brute = prox_scalar_bruteforce([y](double t) { return xreal(std::fabs(t - y)); }, al, u);
            worst = std::max(worst, std::fabs(closed - brute));
        }
        vrequire(worst <= 1e-6, "l1 prox mismatch " + std::to_string(worst));
        return "max err " + std::to_string(worst);
    }));

    out.push_back(vcheck("moreau decomposition residual", [] {
        const double mu = 0.7;
        auto prox_f = [mu](const Tensor& x) { return soft_threshold(x, mu); };
        auto prox_fc = [mu](const Tensor& x) {
            Tensor r = x;
            for (long i = 0; i < r.size(); ++i) r[i] = std::max(-mu, std::min(mu, r[i]));
            return r;
        };
        Rng rng(12);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const Tensor x = Tensor::random_gaussian(6, 1, rng);
            worst = std::max(worst, moreau_check(prox_f, prox_fc, x));
        }
        vrequire(worst <= 1e-10, "residual " + std::to_string(worst));
        return "max residual " + std::to_string(worst);
    }));

    out.push_back(vcheck("blur is self-adjoint and nonexpansive", [] {
        const LinearOperator B = gaussian_blur(16, 16, 5, 2.0);
        Rng rng(13);
        const Tensor x = Tensor::random_gaussian(16, 16, rng);
        const Tensor y = Tensor::random_gaussian(16, 16, rng);
        const double lhs = B.apply(x).dot(y), rhs = x.dot(B.adjoint(y));
        vrequire(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)), "adjoint mismatch");
        vrequire(B.apply(x).norm() <= x.norm() * (1.0 + 1e-12), "norm bound violated");
        return "ok";
    }));

    out.push_back(vcheck("multilevel transform is orthogonal", [] {
        const LinearOperator W = haar_transform(16, 16, 2);
        Rng rng(14);
        const Tensor x = Tensor::random_gaussian(16, 16, rng);
        const Tensor wx = W.apply(x);
        vrequire(std::fabs(wx.norm() - x.norm()) <= 1e-12 * (1.0 + x.norm()), "not isometric");
        vrequire(dist(W.adjoint(wx), x) <= 1e-12 * (1.0 + x.norm()), "inverse mismatch");
        return "ok";
    }));

    const Tensor small_truth = generate_blocks(8, 8, 21);
    const LinearOperator small_blur = gaussian_blur(8, 8, 5, 2.0);
    const Tensor small_y = small_blur.apply(small_truth);

    out.push_back(vcheck("energy estimate (probe u = 0)", [&] {
        const EnergyCheck ec = energy_estimate_check(small_blur, squared_norm(), square_loss(small_y),
                                                     Schedule::polynomial(1.0, 1.0), 150, Tensor(8, 8));
        vrequire(ec.checked > 0 && ec.max_violation <= 1e-9, "violation " + std::to_string(ec.max_violation));
        return "max violation " + std::to_string(ec.max_violation);
    }));

    out.push_back(vcheck("dissipativity of recorded dual values", [&] {
        RunOptions opt;
        opt.max_iters = 150;
        const RunResult r = run(small_blur, squared_norm(), square_loss(small_y), Schedule::polynomial(1.0, 1.0), opt);
        const double worst = dissipativity_max_increase(r.trace);
        vrequire(worst <= 1e-9, "increase " + std::to_string(worst));
        return "max increase " + std::to_string(worst);
    }));

    out.push_back(vcheck("frozen schedule reduces to the classical linear iteration", [] {
        Rng rng(15);
        Tensor M(5, 4);
        for (long i = 0; i < M.size(); ++i) M[i] = rng.gaussian();
        LinearOperator A = matrix_op(M);
        power_norm(A, 100, 16);
        const Tensor z = Tensor::random_gaussian(4, 1, rng);
        const Tensor y = A.apply(z);

        RunOptions opt;
        opt.max_iters = 100;
        opt.record_dual = false;
        opt.capture_x = true;
        const RunResult r = run(A, squared_norm(), square_loss(y), Schedule::frozen(0.0), opt);
        const double tau = r.final_state.tau;

        Tensor x(4);
        double worst = 0.0;
        for (std::size_t n = 0; n < r.x_traj.size(); ++n) {
            worst = std::max(worst, dist(x, r.x_traj[n]));
            x.axpy(-tau, A.adjoint(A.apply(x) - y));
        }
        vrequire(worst <= 1e-12, "deviation " + std::to_string(worst));
        return "max deviation " + std::to_string(worst);
    }));

    out.push_back(vcheck("stability envelope on a twin run", [&] {
        const Tensor noisy = apply_noise(small_y, NoiseSpec::gaussian_spec(1e-4, 17));
        const StabilityReport rep = stability_twin_run(small_blur, squared_norm(), l1_loss(small_y), l1_loss(noisy),
                                                       Schedule::polynomial(1.0, 1.0), 200);
        double worst = -1e300;
        for (std::size_t n = 0; n < rep.gap.size(); ++n) worst = std::max(worst, rep.gap[n] - rep.bound[n]);
        vrequire(worst <= 1e-9, "excess " + std::to_string(worst));
        return "max excess " + std::to_string(worst);
    }));

    out.push_back(vcheck("tail sum matches the geometric closed form", [] {
        ConditioningModulus m = square_loss(Tensor{0.0}).modulus;
        const double lam0 = 0.8, rho = 0.5, r = 1.3;
        std::vector<double> lambdas;
        double v = lam0;
        for (int i = 0; i < 200; ++i) {
            lambdas.push_back(v);
            v *= rho;
        }
        const std::size_t N = 3;
        const double got = tail_sum(m, r, lambdas, N);
        const double want = r * r / 2.0 * lam0 * std::pow(rho, static_cast<double>(N)) / (1.0 - rho);
        vrequire(std::fabs(got - want) <= 1e-9 * want, "got " + std::to_string(got));
        return "ok";
    }));

    out.push_back(vcheck("stopping-time residual identity", [] {
        const double delta = 1e-3, beta = 1.5, theta = 0.5, a = 1.0, b = 6e5, T = 3.0;
        const TheoreticalStop ts = theoretical_stop(delta, beta, theta, a, b, T);
        const double alpha = beta * theta;
        const double c1 = b / (2.0 * a * (1.0 + alpha));
        const double eta = std::pow(ts.t, alpha) * std::pow(ts.t - T, 1.5);
        vrequire(std::fabs(eta * delta - c1) <= 1e-9 * c1, "residual too large");
        return "ok";
    }));

    out.push_back(vcheck("oracle routes agree on a quadratic problem", [] {
        Rng rng(18);
        Tensor M(3, 2);
        for (long i = 0; i < M.size(); ++i) M[i] = rng.gaussian();
        const Tensor y = detail::matvec(M, Tensor{1.0, 2.0}, false);
        const OracleSolution a = oracle_solve(M, y, squared_norm());
        Regularizer relabeled = squared_norm();
        relabeled.kind = "squared_norm_highacc";
        const OracleSolution b = oracle_solve(M, y, relabeled);
        vrequire(dist(a.x_dagger, b.x_dagger) <= 1e-6, "routes disagree");
        return "pinv vs highacc dist " + std::to_string(dist(a.x_dagger, b.x_dagger));
    }));

    out.push_back(vcheck("identical seeds give identical traces", [] {
        ExperimentConfig cfg;
        cfg.problem = "blocks";
        cfg.rows = cfg.cols = 16;
        cfg.kernel_size = 5;
        cfg.loss = "l1";
        cfg.schedule = "vanilla_exp";
        cfg.lambda_max = 5.0;
        cfg.lambda_min = 0.5;
        cfg.schedule_steps = 30;
        cfg.noise = "salt_pepper";
        cfg.noise_intensity = 0.2;
        cfg.max_iters = 30;
        cfg.seed = 7;
        const ExperimentResult r1 = run_experiment(cfg);
        const ExperimentResult r2 = run_experiment(cfg);
        vrequire(trace_to_csv(r1.main_run.trace) == trace_to_csv(r2.main_run.trace), "traces differ");
        return "ok";
    }));

    return out;
}

inline bool run_verify(std::ostream& os) {
    const std::vector<VerifyCheck> checks = verify_all();
    bool all = true;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "\n";
        all = all && c.passed;
    }
    os << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all;
}

} // namespace ddd
