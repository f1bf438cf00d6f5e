// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here, next to the checks that use them.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ddd/datafit.hpp"
#include "ddd/diagnostics.hpp"
#include "ddd/errors.hpp"
#include "ddd/generators.hpp"
#include "ddd/harness.hpp"
#include "ddd/image_ops.hpp"
#include "ddd/linop.hpp"
#include "ddd/noise.hpp"
#include "ddd/regularizer.hpp"
#include "ddd/rng.hpp"
#include "ddd/schedule.hpp"
#include "ddd/solver.hpp"
#include "ddd/stopping.hpp"
#include "ddd/tensor.hpp"
#include "oracles.hpp"

using ddd::DataFit;
using ddd::LinearOperator;
using ddd::Regularizer;
using ddd::Rng;
using ddd::RunOptions;
using ddd::Schedule;
using ddd::Tensor;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& msg) {
  std::printf("C%02d %s %s\n", id, ok ? "PASS" : "FAIL", msg.c_str());
  if (!ok) ++g_failures;
}

void note(const std::string& msg) { std::printf("     note: %s\n", msg.c_str()); }

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

Tensor figure_matrix() {
  Tensor M(2, 2);
  M.at(0, 0) = 1.0;
  M.at(0, 1) = 1.0;
  M.at(1, 0) = 1.0;
  M.at(1, 1) = 0.0;
  return M;
}

LinearOperator figure_operator() {
  LinearOperator A = ddd::matrix_op(figure_matrix());
  ddd::power_norm(A, 200, 0x706f77);
  return A;
}

// Dense matrix of a small operator, columns = images of basis vectors.
Tensor densify(const LinearOperator& A) {
  const long d = A.range_rows * A.range_cols;
  Tensor M(d, d);
  for (long j = 0; j < d; ++j) {
    Tensor e(A.range_rows, A.range_cols);
    e[j] = 1.0;
    Tensor col = A.apply(e);
    for (long i = 0; i < d; ++i) M.at(i, j) = col[i];
  }
  return M;
}

Tensor reshape(const Tensor& flat, long rows, long cols) {
  Tensor out(rows, cols);
  for (long i = 0; i < out.size(); ++i) out[i] = flat[i];
  return out;
}

// Golden-section minimizer for strictly unimodal scalar functions.
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 160; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// argmin_t alpha*f(t) + (t-u)^2/2, matching the prox convention of the fits.
double brute_prox(const std::function<double(double)>& f, double alpha, double u, double lo,
                  double hi) {
  return golden_min([&](double t) { return alpha * f(t) + 0.5 * (t - u) * (t - u); }, lo, hi);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/* ------------------------------------------------------------------ C1 */

void c01_figure_reproduction() {
  const LinearOperator A = figure_operator();
  const Tensor y{2.0, 1.0};
  const Tensor x_opt = ddd::oracle_solve(figure_matrix(), y, ddd::squared_norm()).x_dagger;

  const auto t0 = std::chrono::steady_clock::now();
  RunOptions opt;
  opt.max_iters = 100000;
  opt.record_dual = false;
  opt.stop_when = [&](const ddd::SolverState& s) { return ddd::dist(s.x, x_opt) <= 1e-6; };
  auto res = ddd::run(A, ddd::squared_norm(), ddd::square_loss(y), Schedule::polynomial(1.0, 1.0),
                      opt);
  const double wall = seconds_since(t0);
  const long iters = static_cast<long>(res.trace.rows.size());
  const double final_dist = ddd::dist(res.final_state.x, x_opt);

  const bool ok = final_dist <= 1e-6 && iters <= 100000 && wall < 1.0;
  report(1, ok,
         fmt("figure-1 dist to (1,1) after %ld iters: %.3e (target 1e-6 within 1e5 iters, %.2fs)",
             iters, final_dist, wall));
  if (!ok) {
    RunOptions ext = opt;
    ext.max_iters = 1200000;
    const auto t1 = std::chrono::steady_clock::now();
    auto far = ddd::run(A, ddd::squared_norm(), ddd::square_loss(y),
                        Schedule::polynomial(1.0, 1.0), ext);
    note(fmt("blocked by the schedule bias, not the solver: the level-lambda minimizer sits "
             "||lambda (A^T A + lambda I)^-1 x+|| ~= lambda_n = 1/(n+1) away from x+, so the "
             "first 1e-6 crossing is near n=1e6; this run reaches it at n=%ld (%.2fs)",
             static_cast<long>(far.trace.rows.size()) - 1, seconds_since(t1)));
  }
}

/* ------------------------------------------------------------- C2 + C3 */

struct RegRun {
  std::string name;
  LinearOperator A;
  Regularizer R;
  DataFit fit;
  Schedule sched;
  long iters;
  Tensor u_dagger;  // range shape
};

std::vector<RegRun> regression_suite() {
  std::vector<RegRun> runs;
  const Tensor y{2.0, 1.0};
  const Tensor fig_u{-1.0, 0.0};

  runs.push_back({"fig-square", figure_operator(), ddd::squared_norm(), ddd::square_loss(y),
                  Schedule::polynomial(1.0, 1.0), 1000, fig_u});
  runs.push_back({"fig-l1", figure_operator(), ddd::squared_norm(), ddd::l1_loss(y),
                  Schedule::vanilla_exp(5.0, 0.5, 400), 400, fig_u});
  runs.push_back({"fig-huber", figure_operator(), ddd::squared_norm(), ddd::huber_loss(y, 0.5),
                  Schedule::polynomial(1.0, 1.0), 500, fig_u});
  runs.push_back({"fig-kl", figure_operator(), ddd::squared_norm(), ddd::kl_loss(y),
                  Schedule::polynomial(1.0, 1.0), 300, fig_u});

  const Tensor truth = ddd::generate_blocks(8, 8, 11);

  LinearOperator B = ddd::gaussian_blur(8, 8, 5, 2.0);
  const Tensor y8 = B.apply(truth);
  const Tensor M8 = densify(B);

  Regularizer sq = ddd::squared_norm();
  const Tensor u8_pinv = reshape(ddd::oracle_solve(M8, reshape(y8, 64, 1), sq).u_dagger, 8, 8);
  runs.push_back({"img-square", B, sq, ddd::square_loss(y8), Schedule::vanilla_exp(5.0, 0.5, 200),
                  200, u8_pinv});
  runs.push_back({"img-warm-square", B, sq, ddd::square_loss(y8),
                  Schedule::warm_restart_log(5.0, 0.5, 10, 1e-3), 200, u8_pinv});

  /* The haar run uses a milder blur: its reference dual point comes from the
   * high-accuracy gradient oracle, which needs a decently conditioned Gram. */
  LinearOperator B3 = ddd::gaussian_blur(8, 8, 3, 0.5);
  const Tensor y3 = B3.apply(truth);
  Regularizer haar = ddd::l1_analysis(ddd::haar_transform(8, 8, 2), 0.3, 1.0);
  // The oracle works on flat vectors; adapt the image-shaped grad_conj.
  Regularizer haar_flat = haar;
  haar_flat.grad_conj = [haar](const Tensor& v) {
    return reshape(haar.grad_conj(reshape(v, 8, 8)), 64, 1);
  };
  const Tensor u3_haar =
      reshape(ddd::oracle_solve(densify(B3), reshape(y3, 64, 1), haar_flat).u_dagger, 8, 8);
  /* lambda_min 0.1 lets the schedule undercut 1/||u3_haar||_inf, so the l1
   * box admits the reference probe on a nonempty tail of the run. */
  runs.push_back({"img-haar-l1", B3, haar, ddd::l1_loss(y3), Schedule::vanilla_exp(5.0, 0.1, 200),
                  200, u3_haar});
  return runs;
}

void c02_energy_estimate(const std::vector<RegRun>& runs) {
  double worst = -1e300;
  std::string worst_name;
  bool all_checked = true;
  for (const auto& r : runs) {
    const Tensor zero(r.A.range_rows, r.A.range_cols);
    for (const Tensor& probe : {zero, r.u_dagger}) {
      auto chk = ddd::energy_estimate_check(r.A, r.R, r.fit, r.sched, r.iters, probe);
      if (chk.checked == 0) all_checked = false;
      if (chk.max_violation > worst) {
        worst = chk.max_violation;
        worst_name = r.name;
      }
    }
  }
  report(2, all_checked && worst <= 1e-9,
         fmt("energy estimate at u=0 and u=u+ over %zu runs: worst slack %.3e (%s, tol 1e-9)",
             runs.size(), worst, worst_name.c_str()));
}

void c03_dissipativity(const std::vector<RegRun>& runs) {
  double worst = -1e300;
  std::string worst_name;
  for (const auto& r : runs) {
    RunOptions opt;
    opt.max_iters = r.iters;
    auto res = ddd::run(r.A, r.R, r.fit, r.sched, opt);
    const double inc = ddd::dissipativity_max_increase(res.trace);
    if (inc > worst) {
      worst = inc;
      worst_name = r.name;
    }
  }
  report(3, worst <= 1e-9,
         fmt("dual values nonincreasing over %zu runs: worst increase %.3e (%s, tol 1e-9)",
             runs.size(), worst, worst_name.c_str()));
}

/* ------------------------------------------------------------- C4 + C5 */

void c04_c05_rate_checks() {
  const LinearOperator A = figure_operator();
  const Tensor y{2.0, 1.0};
  const Tensor x_dag{1.0, 1.0};
  const Tensor u_dag{-1.0, 0.0};
  const long total = 10001;

  struct Loss {
    std::string name;
    DataFit fit;
  };
  const std::vector<Loss> losses{{"square", ddd::square_loss(y)},
                                 {"huber", ddd::huber_loss(y, 0.5)},
                                 {"l1", ddd::l1_loss(y)}};

  bool env_ok = true, decay_ok = true;
  std::string env_msg, decay_msg;
  for (const auto& L : losses) {
    Schedule sched = Schedule::polynomial(1.0, 1.5);
    std::vector<double> dists;
    Tensor u1;
    RunOptions opt;
    opt.max_iters = total;
    opt.record_dual = false;
    opt.on_step = [&](const ddd::SolverState&, const ddd::SolverState& next) {
      dists.push_back(ddd::dist(next.x, x_dag));
      if (next.n == 1) u1 = next.u;
    };
    const auto t0 = std::chrono::steady_clock::now();
    auto res = ddd::run(A, ddd::squared_norm(), L.fit, sched, opt);
    const double wall = seconds_since(t0);

    const auto lambdas = sched.materialize(100000);
    std::size_t N = 0;
    while (N < 10 &&
           !L.fit.modulus.eval_conj(u_dag.norm() * lambdas[N] * (1.0 + 1e-6)).finite())
      ++N;
    const Tensor uN = N == 0 ? Tensor(2) : u1;
    const double C = ddd::rate_constant(uN, u_dag, res.final_state.tau, 1.0, L.fit.modulus,
                                        lambdas, N);

    double worst_excess = -1e300;
    long worst_n = 0;
    for (long n = static_cast<long>(N) + 1; n <= 10000; ++n) {
      const double env = C / std::sqrt(static_cast<double>(n) - static_cast<double>(N));
      const double excess = dists[static_cast<std::size_t>(n)] - env;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst_n = n;
      }
    }
    (void)wall;
    if (worst_excess > 1e-12) {
      env_ok = false;
      env_msg += fmt(" [%s worst excess %.3e at n=%ld]", L.name.c_str(), worst_excess, worst_n);
    } else {
      env_msg += fmt(" [%s C=%.2f margin %.1e]", L.name.c_str(), C, -worst_excess);
    }

    const double early = std::sqrt(100.0) * dists[100];
    const double late = std::sqrt(10000.0) * dists[10000];
    const bool drop = early > 0.0 && late <= 0.1 * early;
    if (!drop) decay_ok = false;
    decay_msg += fmt(" [%s sqrt(n)*dist %.2e -> %.2e]", L.name.c_str(), early, late);
  }
  report(4, env_ok, "rate envelope C/sqrt(n-N) on square/huber/l1:" + env_msg);
  report(5, decay_ok, "sqrt(n)-scaled error falls below 10% from n=1e2 to n=1e4:" + decay_msg);
}

/* ------------------------------------------------------------------ C6 */

void c06_stability() {
  const LinearOperator A = figure_operator();
  const Regularizer R = ddd::squared_norm();
  const Tensor y{2.0, 1.0};

  double worst = -1e300;
  std::string worst_tag;
  bool thetas_ok = true;
  for (double s : {1.0, 0.5, 0.25}) {
    const Tensor y_l1 = y + Tensor{0.08 * s, -0.06 * s};
    auto rep = ddd::stability_twin_run(A, R, ddd::l1_loss(y), ddd::l1_loss(y_l1),
                                       Schedule::polynomial(1.0, 1.0), 10000);
    if (rep.theta != 0.0) thetas_ok = false;
    for (std::size_t n = 0; n < rep.gap.size(); ++n) {
      const double excess = rep.gap[n] - rep.bound[n];
      if (excess > worst) {
        worst = excess;
        worst_tag = fmt("l1 s=%.2f n=%zu", s, n);
      }
    }

    const Tensor y_kl = y + Tensor{0.04 * s, 0.02 * s};
    auto repk = ddd::stability_twin_run(A, R, ddd::kl_loss(y), ddd::kl_loss(y_kl),
                                        Schedule::polynomial(1.0, 1.0), 10000);
    if (repk.theta != 0.5) thetas_ok = false;
    for (std::size_t n = 0; n < repk.gap.size(); ++n) {
      const double excess = repk.gap[n] - repk.bound[n];
      if (excess > worst) {
        worst = excess;
        worst_tag = fmt("kl s=%.2f n=%zu", s, n);
      }
    }
  }
  report(6, thetas_ok && worst <= 1e-12,
         fmt("twin-run gap within (delta/||A||)(n + tau^(theta-1) sum lambda^-theta) at all "
             "n<=1e4, 3 amplitudes x {l1, kl}: worst excess %.3e (%s)",
             worst, worst_tag.c_str()));
}

/* ------------------------------------------------------------------ C7 */

void c07_early_stopping_exponent() {
  const double beta = 1.5, theta = 0.5;
  std::vector<double> log_delta, log_t;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    auto ts = ddd::theoretical_stop(delta, beta, theta, 1.0, 6e7, 3.0);
    log_delta.push_back(std::log(delta));
    log_t.push_back(std::log(ts.t));
  }
  const double slope = oracle::fit_slope(log_delta, log_t);
  const double predicted = -2.0 / (3.0 + 2.0 * beta * theta);
  const bool slope_ok = std::fabs(slope - predicted) <= 1e-3;

  const fs::path dir = "/tmp/ddd_acceptance/c07";
  fs::remove_all(dir);
  auto cfg = ddd::parse_config(nlohmann::json{{"problem", "blocks"},
                                              {"rows", 16},
                                              {"cols", 16},
                                              {"kernel_size", 5},
                                              {"noise", "gaussian"},
                                              {"noise_variance", 0.01},
                                              {"schedule", "vanilla_exp"},
                                              {"lambda_max", 5.0},
                                              {"lambda_min", 0.05},
                                              {"schedule_steps", 200},
                                              {"max_iters", 200},
                                              {"seed", 3},
                                              {"delta_sweep", {1.0, 0.5, 0.25}}});
  ddd::cli_semiconvergence(cfg, dir.string());
  bool sweep_ok = false;
  {
    std::ifstream in(dir / "sweep.json");
    nlohmann::json sweep;
    if (in) {
      in >> sweep;
      sweep_ok = sweep.value("nondecreasing_as_delta_decreases", false);
    }
  }
  fs::remove_all(dir);

  report(7, slope_ok && sweep_ok,
         fmt("stopping-time slope %.6f vs -2/(3+2*beta*theta)=%.6f (tol 1e-3); empirical n_bar "
             "nondecreasing as delta falls: %s",
             slope, predicted, sweep_ok ? "yes" : "no"));
}

/* ------------------------------------------------------------------ C8 */

void c08_prox_oracles() {
  double worst = 0.0;
  std::string worst_tag;
  auto track = [&](double err, const char* tag) {
    if (err > worst) {
      worst = err;
      worst_tag = tag;
    }
  };

  Rng rng(0xBADC0DE);
  for (int i = 0; i < 100; ++i) {
    const double yv = rng.uniform(-4.0, 4.0);
    const double u = rng.uniform(-8.0, 8.0);
    const double alpha = rng.uniform(0.05, 5.0);
    const double lib = ddd::l1_loss(Tensor{yv}).prox_phi(alpha, Tensor{u})[0];
    const double ref =
        brute_prox([yv](double t) { return std::fabs(t - yv); }, alpha, u, -20.0, 20.0);
    track(std::fabs(lib - ref), "soft-threshold");
  }

  for (int i = 0; i < 100; ++i) {
    const double yv = rng.uniform(0.1, 6.0);
    const double u = rng.uniform(-6.0, 6.0);
    const double alpha = rng.uniform(0.05, 5.0);
    const double lib = ddd::kl_loss(Tensor{yv}).prox_phi(alpha, Tensor{u})[0];
    const double ref = brute_prox(
        [yv](double t) { return yv * std::log(yv / t) - yv + t; }, alpha, u, 1e-12, 40.0);
    track(std::fabs(lib - ref), "kl");
  }

  for (int i = 0; i < 100; ++i) {
    const double yv = rng.uniform(-4.0, 4.0);
    const double u = rng.uniform(-8.0, 8.0);
    const double alpha = rng.uniform(0.05, 5.0);
    const double lib = ddd::huber_loss(Tensor{yv}, 0.3).prox_phi(alpha, Tensor{u})[0];
    const double ref = brute_prox([](double t) { return std::fabs(t); }, alpha, u, -20.0, 20.0);
    track(std::fabs(lib - ref), "huber");
  }

  for (int i = 0; i < 100; ++i) {
    const double za = rng.uniform(-2.0, 2.0);
    const double zb = rng.uniform(-2.0, 2.0);
    const double beta = rng.uniform(0.05, 1.5);
    Regularizer tv = ddd::tv_quad(beta, 1.0, 200000, 1e-15);
    Tensor z(2, 2);
    z.at(0, 0) = za;
    z.at(0, 1) = za;
    z.at(1, 0) = zb;
    z.at(1, 1) = zb;
    const Tensor x = tv.grad_conj(z);
    // Constant-column input reduces to a two-pixel 1-D problem: the jump is
    // prox of 2*beta*|.| at zb-za and the column mean is preserved.
    const double jump = brute_prox([](double t) { return std::fabs(t); }, 2.0 * beta, zb - za,
                                   -10.0, 10.0);
    const double a_ref = 0.5 * (za + zb) - 0.5 * jump;
    const double b_ref = 0.5 * (za + zb) + 0.5 * jump;
    double err = 0.0;
    err = std::max(err, std::fabs(x.at(0, 0) - a_ref));
    err = std::max(err, std::fabs(x.at(0, 1) - a_ref));
    err = std::max(err, std::fabs(x.at(1, 0) - b_ref));
    err = std::max(err, std::fabs(x.at(1, 1) - b_ref));
    track(err, "tv-1d");
  }

  report(8, worst <= 1e-6,
         fmt("prox vs brute-force minimizer, 100 seeded samples per operator: worst |diff| "
             "%.3e (%s, tol 1e-6)",
             worst, worst_tag.c_str()));
}

/* ------------------------------------------------------------------ C9 */

void c09_conditioning() {
  struct Entry {
    std::string name;
    DataFit fit;     // 2-D build for growth sampling
    DataFit fit_1d;  // 1-D build for the conjugate grid check
    bool positive;
  };
  const Tensor y2{1.0, 0.5};
  std::vector<Entry> entries;
  entries.push_back({"square", ddd::square_loss(y2), ddd::square_loss(Tensor{0.7}), false});
  entries.push_back({"l1", ddd::l1_loss(y2), ddd::l1_loss(Tensor{0.3}), false});
  entries.push_back({"kl", ddd::kl_loss(y2), ddd::kl_loss(Tensor{1.0}), true});
  entries.push_back({"huber", ddd::huber_loss(y2, 0.3), ddd::huber_loss(Tensor{0.5}, 0.3), false});
  entries.push_back(
      {"l1l2", ddd::l1l2_loss(y2, 0.4, 2.0), ddd::l1l2_loss(Tensor{0.2}, 0.4, 2.0), false});

  Rng rng(0x9E0);
  double worst_growth = -1e300;
  std::string worst_growth_name;
  for (const auto& e : entries) {
    for (int i = 0; i < 1000; ++i) {
      Tensor u(2);
      for (long j = 0; j < 2; ++j)
        u[j] = e.positive ? rng.uniform(0.01, 8.0) : rng.uniform(-8.0, 8.0);
      const auto val = e.fit.value(u);
      if (!val.finite()) continue;
      const double gap = e.fit.modulus.eval(ddd::dist(u, e.fit.y)) - val.value();
      if (gap > worst_growth) {
        worst_growth = gap;
        worst_growth_name = e.name;
      }
    }
  }

  double worst_conj = 0.0;
  std::string worst_conj_name;
  for (const auto& e : entries) {
    const auto& m = e.fit_1d.modulus;
    for (double s : {0.0, 0.2, 0.5, 0.9}) {
      const auto direct = m.eval_conj(s);
      const double grid = oracle::grid_sup_conj_1d(
          [&m](double t) { return ddd::xreal(m.eval(t)); }, s, -40.0, 40.0, 400001);
      if (!direct.finite()) continue;
      const double err = std::fabs(direct.value() - grid) / (1.0 + std::fabs(direct.value()));
      if (err > worst_conj) {
        worst_conj = err;
        worst_conj_name = e.name + fmt(" s=%.1f", s);
      }
    }
  }

  report(9, worst_growth <= 1e-9 && worst_conj <= 1e-4,
         fmt("loss >= modulus on 1000 samples x 5 losses (worst m-D gap %.3e, %s); conjugates "
             "vs grid sup (worst rel err %.3e, %s, tol 1e-4)",
             worst_growth, worst_growth_name.c_str(), worst_conj, worst_conj_name.c_str()));
}

/* ----------------------------------------------------------------- C10 */

void c10_semiconvergence() {
  const fs::path dir = "/tmp/ddd_acceptance/c10";
  fs::remove_all(dir);
  auto cfg = ddd::parse_config(nlohmann::json{{"problem", "blocks"},
                                              {"loss", "l1"},
                                              {"regularizer", "haar_l1"},
                                              {"reg_mu", 0.1},
                                              {"noise", "salt_pepper"},
                                              {"noise_intensity", 0.35},
                                              {"schedule", "vanilla_exp"},
                                              {"lambda_max", 10.0},
                                              {"lambda_min", 0.1},
                                              {"schedule_steps", 1000},
                                              {"max_iters", 1000},
                                              {"stopping", "gtg"},
                                              {"seed", 1}});
  const auto t0 = std::chrono::steady_clock::now();
  auto sum = ddd::cli_semiconvergence(cfg, dir.string());
  const double wall = seconds_since(t0);
  fs::remove_all(dir);

  report(10, sum.interior && wall < 60.0,
         fmt("64x64 deblurring, 35%% salt&pepper, l1 + haar-l1: GTG min %.3e at n=%ld of %ld "
             "(interior: %s, %.1fs < 60s)",
             sum.gtg_min, sum.n_bar, sum.iterations, sum.interior ? "yes" : "no", wall));
  note(fmt("order-of-magnitude log: min GTG %.1e on the shipped desk-scale problem", sum.gtg_min));
}

/* ----------------------------------------------------------------- C11 */

void c11_determinism() {
  const fs::path base = "/tmp/ddd_acceptance/c11";
  fs::remove_all(base);
  auto cfg = ddd::parse_config(nlohmann::json{{"problem", "blocks"},
                                              {"rows", 16},
                                              {"cols", 16},
                                              {"kernel_size", 5},
                                              {"loss", "l1"},
                                              {"regularizer", "haar_l1"},
                                              {"reg_mu", 0.1},
                                              {"haar_levels", 2},
                                              {"noise", "salt_pepper"},
                                              {"noise_intensity", 0.35},
                                              {"schedule", "vanilla_exp"},
                                              {"lambda_max", 10.0},
                                              {"lambda_min", 0.1},
                                              {"schedule_steps", 200},
                                              {"max_iters", 200},
                                              {"stopping", "gtg"},
                                              {"seed", 1}});
  ddd::cli_solve(cfg, (base / "a").string());
  ddd::cli_solve(cfg, (base / "b").string());

  bool ok = true;
  std::string first_diff;
  for (const char* name : {"trace.csv", "metadata.json", "stop_report.json", "truth.pgm",
                           "datum_clean.pgm", "datum_noisy.pgm", "recon_final.pgm"}) {
    if (slurp(base / "a" / name) != slurp(base / "b" / name)) {
      ok = false;
      if (first_diff.empty()) first_diff = name;
    }
  }
  fs::remove_all(base);
  report(11, ok,
         ok ? "identical config and seed give byte-identical CSV, JSON, and PGM artifacts"
            : fmt("rerun artifacts differ, first mismatch: %s", first_diff.c_str()));
}

}  // namespace

int main() {
  c01_figure_reproduction();
  const auto suite = regression_suite();
  c02_energy_estimate(suite);
  c03_dissipativity(suite);
  c04_c05_rate_checks();
  c06_stability();
  c07_early_stopping_exponent();
  c08_prox_oracles();
  c09_conditioning();
  c10_semiconvergence();
  c11_determinism();
  std::printf("acceptance: %d/11 criteria passed\n", 11 - g_failures);
  return g_failures;
}
