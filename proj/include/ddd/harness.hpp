#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddd/config.hpp"
#include "ddd/datafit.hpp"
#include "ddd/generators.hpp"
#include "ddd/haar.hpp"
#include "ddd/image_ops.hpp"
#include "ddd/linop.hpp"
#include "ddd/noise.hpp"
#include "ddd/pgm.hpp"
#include "ddd/regularizer.hpp"
#include "ddd/schedule.hpp"
#include "ddd/solver.hpp"
#include "ddd/stopping.hpp"
#include "ddd/trace.hpp"
#include "ddd/version.hpp"

namespace ddd {

/* Everything a run needs, assembled from one config.  Derived seeds:
 * ground truth uses cfg.seed, noise cfg.seed+1, the SURE probe cfg.seed+2,
 * so the three random ingredients never share a stream. */
struct Problem {
    LinearOperator A;
    Tensor x_true;
    Tensor y_clean; // A x_true, plus the background term for the kl loss
    Tensor y_noisy;
    DataFit fit;       // loss on y_noisy (what the run sees)
    DataFit fit_clean; // loss on y_clean (twin runs, certificates)
    Regularizer reg;
    Schedule schedule = Schedule::polynomial(1.0, 1.0);
    PerturbationCert cert;
    bool is_image = false;
    Tensor x_opt; // known solution of the clean problem (figure1 only)
    bool has_x_opt = false;
};

namespace detail {

inline DataFit make_fit(const ExperimentConfig& cfg, const Tensor& y) {
    if (cfg.loss == "square") return square_loss(y);
    if (cfg.loss == "l1") return l1_loss(y);
    if (cfg.loss == "kl") return kl_loss(y);
    if (cfg.loss == "huber") return huber_loss(y, cfg.huber_sigma);
    return l1l2_loss(y, cfg.l1l2_a1, cfg.l1l2_a2);
}

inline Regularizer make_reg(const ExperimentConfig& cfg, long rows, long cols) {
    if (cfg.regularizer == "squared_norm") return squared_norm();
    if (cfg.regularizer == "haar_l1")
        return l1_analysis(haar_transform(rows, cols, cfg.haar_levels), cfg.reg_mu, cfg.reg_sigma);
    return tv_quad(cfg.reg_mu, cfg.reg_sigma, cfg.tv_inner_iters, cfg.tv_inner_tol);
}

inline Schedule make_schedule(const ExperimentConfig& cfg) {
    if (cfg.schedule == "vanilla_exp") return Schedule::vanilla_exp(cfg.lambda_max, cfg.lambda_min, cfg.schedule_steps);
    if (cfg.schedule == "polynomial") return Schedule::polynomial(cfg.lambda0, cfg.beta);
    return Schedule::warm_restart_log(cfg.lambda_max, cfg.lambda_min, cfg.warm_grid_size, cfg.eps_wr);
}

inline void clamp_floor(Tensor& t, double floor) {
    for (long i = 0; i < t.size(); ++i) t[i] = std::max(t[i], floor);
}

inline NoiseSpec make_noise(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.seed + 1;
    if (cfg.noise == "gaussian") return NoiseSpec::gaussian_spec(cfg.noise_variance, seed);
    if (cfg.noise == "salt_pepper") return NoiseSpec::salt_pepper_spec(cfg.noise_intensity, seed);
    if (cfg.noise == "poisson") return NoiseSpec::poisson_spec(cfg.noise_peak, seed);
    if (cfg.noise == "mixed") return NoiseSpec::mixed_spec(cfg.noise_variance, cfg.noise_intensity, seed);
    return NoiseSpec::none_spec();
}

} // namespace detail

inline Problem build_problem(const ExperimentConfig& cfg) {
    Problem p;
    if (cfg.problem == "figure1") {
        Tensor M(2, 2);
        M.at(0, 0) = 1.0;
        M.at(0, 1) = 1.0;
        M.at(1, 0) = 1.0;
        M.at(1, 1) = 0.0;
        p.A = matrix_op(M);
        power_norm(p.A, 200, 0x706f77);
        p.x_true = Tensor{1.0, 1.0};
        p.x_opt = Tensor{1.0, 1.0};
        p.has_x_opt = true;
    } else {
        if (cfg.problem == "image") {
            const PgmImage img = read_pgm(cfg.image_path);
            p.x_true = img.pixels;
        } else {
            p.x_true = generate_image(cfg.problem, cfg.rows, cfg.cols, cfg.seed);
        }
        p.A = cfg.blur ? gaussian_blur(p.x_true.rows(), p.x_true.cols(), cfg.kernel_size, cfg.blur_variance)
                       : identity_op(p.x_true.rows(), p.x_true.cols());
        p.is_image = true;
    }

    p.y_clean = p.A.apply(p.x_true);
    p.y_noisy = apply_noise(p.y_clean, detail::make_noise(cfg));
    if (cfg.loss == "kl") {
        /* Counting data convention: a constant background keeps both data
         * strictly positive; noise is drawn before the shift so the [0,1]
         * precondition of the samplers applies to the blurred image. */
        for (long i = 0; i < p.y_clean.size(); ++i) p.y_clean[i] += cfg.kl_background;
        for (long i = 0; i < p.y_noisy.size(); ++i) p.y_noisy[i] += cfg.kl_background;
        detail::clamp_floor(p.y_noisy, 1e-6);
    }

    p.fit = detail::make_fit(cfg, p.y_noisy);
    p.fit_clean = detail::make_fit(cfg, p.y_clean);
    p.reg = detail::make_reg(cfg, p.x_true.rows(), p.x_true.cols());
    p.schedule = detail::make_schedule(cfg);
    p.cert = measure_delta(cfg.loss, p.y_clean, p.y_noisy);
    return p;
}

struct ExperimentResult {
    ExperimentConfig cfg;
    Problem prob;
    RunResult main_run;
    std::vector<double> gtg_values;
    std::vector<double> dist_opt_values;
    SureResult sure_res;
    bool has_sure = false;
    long n_bar = -1;
    long n_hat = -1;
    StopReport report;
};

/* Runs the configured experiment.  GTG and distance-to-solution curves are
 * accumulated during the run; trajectories are only materialized when the
 * SURE twin needs them, guarded by a dimension * iterations budget. */
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool force_sure = false) {
    ExperimentResult res;
    res.cfg = cfg;
    res.prob = build_problem(cfg);
    Problem& p = res.prob;

    const bool want_sure = force_sure || cfg.stopping == "sure";
    if (want_sure) {
        const double budget = static_cast<double>(cfg.max_iters) * static_cast<double>(p.x_true.size());
        if (budget > 2e7)
            throw ConfigError("sure stopping keeps two full trajectories; reduce max_iters (budget "
                              "max_iters * dim <= 2e7)");
    }

    RunOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.record_dual = true;
    opt.capture_x = want_sure;
    opt.on_step = [&](const SolverState&, const SolverState& next) {
        res.gtg_values.push_back(gtg(next.x, p.x_true));
        if (p.has_x_opt) res.dist_opt_values.push_back(dist(next.x, p.x_opt));
    };
    if (cfg.stop_dist_opt > 0.0 && p.has_x_opt) {
        const Tensor target = p.x_opt;
        const double tol = cfg.stop_dist_opt;
        opt.stop_when = [target, tol](const SolverState& s) { return dist(s.x, target) <= tol; };
    }

    res.main_run = run(p.A, p.reg, p.fit, p.schedule, opt);
    const long len = static_cast<long>(res.main_run.trace.rows.size());

    res.n_bar = static_cast<long>(
        std::min_element(res.gtg_values.begin(), res.gtg_values.end()) - res.gtg_values.begin());

    if (want_sure) {
        RunOptions twin_opt = opt;
        twin_opt.on_step = nullptr;
        twin_opt.stop_when = opt.stop_when;
        auto rerun = [&](const Tensor& y_pert) {
            Tensor yp = y_pert;
            if (cfg.loss == "kl") detail::clamp_floor(yp, 1e-6);
            const DataFit fit_pert = detail::make_fit(cfg, yp);
            return run(p.A, p.reg, fit_pert, p.schedule, twin_opt).x_traj;
        };
        res.sure_res = sure(res.main_run.x_traj, rerun, p.A, p.y_noisy, cfg.sure_sigma2, cfg.seed + 2);
        res.has_sure = true;
        res.n_hat = select_by_min_slope(res.sure_res.curve, cfg.smoothing_window);
    }

    res.report.criterion = cfg.stopping;
    if (cfg.stopping == "gtg") {
        res.report.chosen_n = res.n_bar;
        res.report.curve = res.gtg_values;
    } else if (cfg.stopping == "sure") {
        res.report.chosen_n = res.n_hat;
        res.report.curve = res.sure_res.curve;
        res.report.smoothing_window = cfg.smoothing_window;
    } else {
        res.report.chosen_n = len - 1;
    }
    return res;
}

namespace detail {

/* Checkpoint indices: five log-spaced points of [1, last] plus the selector
 * picks, deduplicated. */
inline std::set<long> checkpoint_indices(long last, long n_bar, long n_hat) {
    std::set<long> idx;
    if (last < 0) return idx;
    for (int k = 0; k <= 4; ++k) {
        const double v = std::pow(static_cast<double>(std::max(1L, last)), static_cast<double>(k) / 4.0);
        idx.insert(std::min(last, static_cast<long>(std::llround(v))));
    }
    if (n_bar >= 0) idx.insert(std::min(last, n_bar));
    if (n_hat >= 0) idx.insert(std::min(last, n_hat));
    return idx;
}

inline std::string iter_name(long n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "recon_iter_%06ld.pgm", n);
    return buf;
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["problem"] = c.problem;
    if (!c.image_path.empty()) j["image_path"] = c.image_path;
    j["rows"] = c.rows;
    j["cols"] = c.cols;
    j["blur"] = c.blur;
    j["kernel_size"] = c.kernel_size;
    j["blur_variance"] = c.blur_variance;
    j["loss"] = c.loss;
    j["huber_sigma"] = c.huber_sigma;
    j["l1l2_a1"] = c.l1l2_a1;
    j["l1l2_a2"] = c.l1l2_a2;
    j["kl_background"] = c.kl_background;
    j["regularizer"] = c.regularizer;
    j["reg_mu"] = c.reg_mu;
    j["reg_sigma"] = c.reg_sigma;
    j["haar_levels"] = c.haar_levels;
    j["tv_inner_iters"] = c.tv_inner_iters;
    j["tv_inner_tol"] = c.tv_inner_tol;
    j["schedule"] = c.schedule;
    j["lambda_max"] = c.lambda_max;
    j["lambda_min"] = c.lambda_min;
    j["schedule_steps"] = c.schedule_steps;
    j["lambda0"] = c.lambda0;
    j["beta"] = c.beta;
    j["warm_grid_size"] = c.warm_grid_size;
    j["eps_wr"] = c.eps_wr;
    j["noise"] = c.noise;
    j["noise_variance"] = c.noise_variance;
    j["noise_intensity"] = c.noise_intensity;
    j["noise_peak"] = c.noise_peak;
    j["stopping"] = c.stopping;
    j["sure_sigma2"] = c.sure_sigma2;
    j["smoothing_window"] = c.smoothing_window;
    j["max_iters"] = c.max_iters;
    j["stop_dist_opt"] = c.stop_dist_opt;
    j["seed"] = c.seed;
    if (!c.delta_sweep.empty()) j["delta_sweep"] = c.delta_sweep;
    return j;
}

} // namespace detail

inline void write_artifacts(const ExperimentResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    RunTrace trace = res.main_run.trace;
    const std::size_t len = trace.rows.size();
    trace.set_gtg(res.gtg_values);
    if (!res.dist_opt_values.empty()) trace.set_dist_opt(res.dist_opt_values);
    if (res.has_sure) {
        std::vector<double> padded = res.sure_res.curve;
        padded.resize(len, std::numeric_limits<double>::quiet_NaN());
        trace.set_sure(padded);
    }
    write_trace_csv(trace, (out / "trace.csv").string());

    nlohmann::json stop;
    stop["criterion"] = res.report.criterion;
    stop["chosen_n"] = res.report.chosen_n;
    stop["smoothing_window"] = res.report.smoothing_window;
    stop["curve"] = res.report.curve;
    detail::write_json(stop, out / "stop_report.json");

    nlohmann::json meta;
    meta["config"] = detail::config_json(res.cfg);
    meta["delta"] = res.prob.cert.delta;
    meta["theta"] = res.prob.cert.theta;
    meta["tau"] = res.main_run.final_state.tau;
    meta["L"] = 1.0 / res.main_run.final_state.tau;
    meta["norm_upper"] = res.prob.A.norm_upper;
    meta["iterations"] = len;
    meta["n_bar"] = res.n_bar;
    meta["n_hat"] = res.n_hat;
    meta["chosen_n"] = res.report.chosen_n;
    meta["criterion"] = res.report.criterion;
    meta["sure_epsilon"] = res.has_sure ? res.sure_res.epsilon : 0.0;
    meta["library_version"] = library_version;
    detail::write_json(meta, out / "metadata.json");

    if (res.prob.is_image && len > 0) {
        write_pgm((out / "truth.pgm").string(), res.prob.x_true);
        write_pgm((out / "datum_clean.pgm").string(), res.prob.y_clean);
        write_pgm((out / "datum_noisy.pgm").string(), res.prob.y_noisy);

        const long last = static_cast<long>(len) - 1;
        const std::set<long> wanted = detail::checkpoint_indices(last, res.n_bar, res.n_hat);
        std::map<long, Tensor> shots;
        if (!res.main_run.x_traj.empty()) {
            for (long n : wanted) shots.emplace(n, res.main_run.x_traj[static_cast<std::size_t>(n)]);
        } else {
            /* The metrics run kept no trajectory; replay it (deterministic)
             * and keep only the checkpoint frames. */
            RunOptions opt;
            opt.max_iters = res.cfg.max_iters;
            opt.record_dual = false;
            opt.on_step = [&](const SolverState&, const SolverState& next) {
                const long n = next.n - 1;
                if (wanted.count(n)) shots.emplace(n, next.x);
            };
            if (res.cfg.stop_dist_opt > 0.0 && res.prob.has_x_opt) {
                const Tensor target = res.prob.x_opt;
                const double tol = res.cfg.stop_dist_opt;
                opt.stop_when = [target, tol](const SolverState& s) { return dist(s.x, target) <= tol; };
            }
            run(res.prob.A, res.prob.reg, res.prob.fit, res.prob.schedule, opt);
        }
        for (const auto& [n, x] : shots) write_pgm((out / detail::iter_name(n)).string(), x);
        const auto last_it = shots.find(last);
        write_pgm((out / "recon_final.pgm").string(),
                  last_it != shots.end() ? last_it->second : res.main_run.final_state.x);
    }
}

inline ExperimentResult cli_solve(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentResult res = run_experiment(cfg);
    write_artifacts(res, out_dir);
    return res;
}

namespace detail {

inline ExperimentConfig scale_noise(const ExperimentConfig& base, double s) {
    ExperimentConfig c = base;
    c.delta_sweep.clear();
    c.noise_variance = base.noise_variance * s * s;
    c.noise_intensity = std::min(1.0, base.noise_intensity * s);
    c.noise_peak = base.noise_peak / (s * s);
    if (c.sure_sigma2 >= 0.0 && (c.noise == "gaussian" || c.noise == "mixed")) c.sure_sigma2 = c.noise_variance;
    return c;
}

} // namespace detail

struct SemiconvSummary {
    long n_bar = 0;
    double gtg_min = 0.0;
    bool interior = false;
    long iterations = 0;
};

/* Semiconvergence study: records the GTG curve, its argmin, and whether the
 * minimum is interior (outside the first/last 5% of iterations).  With a
 * delta_sweep the noise amplitude is rescaled per entry (variance scales
 * quadratically, hit fraction linearly, Poisson peak inversely
 * quadratically, keeping realized delta roughly proportional) and the
 * argmins are checked for monotonicity against the realized deltas. */
inline SemiconvSummary cli_semiconvergence(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const ExperimentResult res = cli_solve(cfg, out_dir);
    const long len = static_cast<long>(res.main_run.trace.rows.size());
    const long margin = static_cast<long>(std::ceil(0.05 * static_cast<double>(len)));

    SemiconvSummary sum;
    sum.n_bar = res.n_bar;
    sum.gtg_min = res.gtg_values[static_cast<std::size_t>(res.n_bar)];
    sum.interior = res.n_bar >= margin && res.n_bar <= len - 1 - margin;
    sum.iterations = len;

    nlohmann::json j;
    j["n_bar"] = sum.n_bar;
    j["gtg_min"] = sum.gtg_min;
    j["interior"] = sum.interior;
    j["iterations"] = sum.iterations;
    detail::write_json(j, fs::path(out_dir) / "semiconv.json");

    if (!cfg.delta_sweep.empty()) {
        std::vector<double> deltas;
        std::vector<long> n_bars;
        for (std::size_t i = 0; i < cfg.delta_sweep.size(); ++i) {
            const ExperimentConfig sub = detail::scale_noise(cfg, cfg.delta_sweep[i]);
            const ExperimentResult r = cli_solve(sub, (fs::path(out_dir) / ("sweep_" + std::to_string(i))).string());
            deltas.push_back(r.prob.cert.delta);
            n_bars.push_back(r.n_bar);
        }
        /* n_bar must not decrease as delta decreases. */
        std::vector<std::size_t> order(deltas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deltas[a] > deltas[b]; });
        bool nondecreasing = true;
        for (std::size_t i = 1; i < order.size(); ++i)
            if (n_bars[order[i]] < n_bars[order[i - 1]]) nondecreasing = false;

        nlohmann::json sweep;
        sweep["scales"] = cfg.delta_sweep;
        sweep["delta"] = deltas;
        sweep["n_bar"] = n_bars;
        sweep["nondecreasing_as_delta_decreases"] = nondecreasing;
        detail::write_json(sweep, fs::path(out_dir) / "sweep.json");
    }
    return sum;
}

struct CompareRow {
    std::string method;
    long iterations = 0;
    long n_bar = 0;
    double gtg_n_bar = 0.0;
    long n_hat = 0;
    double gtg_n_hat = 0.0;
};

namespace detail {

inline void require_shared_problem(const ExperimentConfig& a, const ExperimentConfig& b) {
    const bool ok = a.problem == b.problem && a.image_path == b.image_path && a.rows == b.rows && a.cols == b.cols &&
                    a.blur == b.blur && a.kernel_size == b.kernel_size && a.blur_variance == b.blur_variance &&
                    a.loss == b.loss && a.noise == b.noise && a.noise_variance == b.noise_variance &&
                    a.noise_intensity == b.noise_intensity && a.noise_peak == b.noise_peak && a.seed == b.seed;
    if (!ok) throw ConfigError("cli_compare: configs must share problem, loss, noise, and seed");
}

inline CompareRow compare_row(const ExperimentResult& r) {
    CompareRow row;
    row.method = r.cfg.schedule;
    row.iterations = static_cast<long>(r.main_run.trace.rows.size());
    row.n_bar = r.n_bar;
    row.gtg_n_bar = r.gtg_values[static_cast<std::size_t>(r.n_bar)];
    row.n_hat = r.n_hat;
    row.gtg_n_hat = r.gtg_values[static_cast<std::size_t>(r.n_hat)];
    return row;
}

} // namespace detail

/* Schedule comparison on one shared problem: vanilla grid versus warm
 * restart (or any two schedule setups over the same data).  Emits CSV and
 * markdown tables with the iteration counts and the GTG values at the
 * curve argmin and at the SURE pick. */
inline std::vector<CompareRow> cli_compare(const ExperimentConfig& cfg_a, const ExperimentConfig& cfg_b,
                                           const std::string& out_dir) {
    namespace fs = std::filesystem;
    detail::require_shared_problem(cfg_a, cfg_b);
    fs::create_directories(out_dir);

    const ExperimentResult ra = run_experiment(cfg_a, true);
    const ExperimentResult rb = run_experiment(cfg_b, true);
    write_artifacts(ra, (fs::path(out_dir) / "method_a").string());
    write_artifacts(rb, (fs::path(out_dir) / "method_b").string());

    const std::vector<CompareRow> rows{detail::compare_row(ra), detail::compare_row(rb)};

    std::string csv = "method,iterations,n_bar,gtg_n_bar,n_hat,gtg_n_hat\n";
    for (const auto& r : rows)
        csv += r.method + "," + std::to_string(r.iterations) + "," + std::to_string(r.n_bar) + "," +
               detail::format_double(r.gtg_n_bar) + "," + std::to_string(r.n_hat) + "," +
               detail::format_double(r.gtg_n_hat) + "\n";
    std::ofstream cf(fs::path(out_dir) / "compare.csv", std::ios::binary);
    if (!cf) throw ConfigError("cannot write compare.csv");
    cf << csv;

    std::string md = "| method | iterations | n_bar | GTG(x_n_bar) | n_hat | GTG(x_n_hat) |\n";
    md += "|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
        md += "| " + r.method + " | " + std::to_string(r.iterations) + " | " + std::to_string(r.n_bar) + " | " +
              detail::format_double(r.gtg_n_bar) + " | " + std::to_string(r.n_hat) + " | " +
              detail::format_double(r.gtg_n_hat) + " |\n";
    std::ofstream mf(fs::path(out_dir) / "compare.md", std::ios::binary);
    if (!mf) throw ConfigError("cannot write compare.md");
    mf << md;
    return rows;
}

/* Derives the vanilla/warm pair from one base config. */
inline std::vector<CompareRow> cli_compare_single(const ExperimentConfig& base, const std::string& out_dir) {
    ExperimentConfig a = base;
    a.schedule = "vanilla_exp";
    ExperimentConfig b = base;
    b.schedule = "warm_restart";
    return cli_compare(a, b, out_dir);
}

inline ExperimentResult cli_sure(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    ExperimentResult res = run_experiment(cfg, true);
    write_artifacts(res, out_dir);

    nlohmann::json j;
    j["epsilon"] = res.sure_res.epsilon;
    j["n_hat"] = res.n_hat;
    j["sigma2"] = res.cfg.sure_sigma2;
    j["curve"] = res.sure_res.curve;
    detail::write_json(j, fs::path(out_dir) / "sure.json");
    return res;
}

} // namespace ddd
