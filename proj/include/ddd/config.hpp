#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddd/errors.hpp"

namespace ddd {

/* One flat JSON document drives every experiment.  Unknown keys are
 * rejected rather than ignored so a typo cannot silently fall back to a
 * default.  Keys "schedule", "max_iters", and "stop_dist_opt" get
 * problem-specific defaults for the 2-D toy (see resolve_figure1). */
struct ExperimentConfig {
    std::string problem; // blocks | bumps | checkerboard | figure1 | image
    std::string image_path;
    long rows = 64, cols = 64;
    bool blur = true;
    int kernel_size = 9;
    double blur_variance = 10.0;

    std::string loss = "square"; // square | l1 | kl | huber | l1l2
    double huber_sigma = 0.1;
    double l1l2_a1 = 1.0, l1l2_a2 = 1.0;
    double kl_background = 0.05;

    std::string regularizer = "squared_norm"; // squared_norm | haar_l1 | tv_quad
    double reg_mu = 0.1;
    double reg_sigma = 1.0;
    int haar_levels = 3;
    int tv_inner_iters = 50;
    double tv_inner_tol = 1e-6;

    std::string schedule = "vanilla_exp"; // vanilla_exp | polynomial | warm_restart
    double lambda_max = 10.0, lambda_min = 0.1;
    long schedule_steps = 1000;
    double lambda0 = 1.0, beta = 1.0;
    long warm_grid_size = 30;
    double eps_wr = 1e-5;

    std::string noise = "none"; // none | gaussian | salt_pepper | poisson | mixed
    double noise_variance = 0.01;
    double noise_intensity = 0.35;
    double noise_peak = 255.0;

    std::string stopping = "fixed"; // fixed | gtg | sure
    double sure_sigma2 = -1.0;      // negative: resolved from the noise model
    long smoothing_window = 10;

    long max_iters = 1000;
    double stop_dist_opt = 0.0; // early exit on ||x_n - x_opt||; figure1 only
    std::uint64_t seed = 1;
    std::vector<double> delta_sweep; // noise-amplitude scales for semiconv
};

namespace detail {

inline void expect(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

template <class T> T as(const nlohmann::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::as;
    using detail::expect;
    expect(j.is_object(), "config root must be a JSON object");

    ExperimentConfig c;
    std::set<std::string> seen;
    for (const auto& [key, v] : j.items()) {
        seen.insert(key);
        if (key == "problem") c.problem = as<std::string>(v, key);
        else if (key == "image_path") c.image_path = as<std::string>(v, key);
        else if (key == "rows") c.rows = as<long>(v, key);
        else if (key == "cols") c.cols = as<long>(v, key);
        else if (key == "blur") c.blur = as<bool>(v, key);
        else if (key == "kernel_size") c.kernel_size = as<int>(v, key);
        else if (key == "blur_variance") c.blur_variance = as<double>(v, key);
        else if (key == "loss") c.loss = as<std::string>(v, key);
        else if (key == "huber_sigma") c.huber_sigma = as<double>(v, key);
        else if (key == "l1l2_a1") c.l1l2_a1 = as<double>(v, key);
        else if (key == "l1l2_a2") c.l1l2_a2 = as<double>(v, key);
        else if (key == "kl_background") c.kl_background = as<double>(v, key);
        else if (key == "regularizer") c.regularizer = as<std::string>(v, key);
        else if (key == "reg_mu") c.reg_mu = as<double>(v, key);
        else if (key == "reg_sigma") c.reg_sigma = as<double>(v, key);
        else if (key == "haar_levels") c.haar_levels = as<int>(v, key);
        else if (key == "tv_inner_iters") c.tv_inner_iters = as<int>(v, key);
        else if (key == "tv_inner_tol") c.tv_inner_tol = as<double>(v, key);
        else if (key == "schedule") c.schedule = as<std::string>(v, key);
        else if (key == "lambda_max") c.lambda_max = as<double>(v, key);
        else if (key == "lambda_min") c.lambda_min = as<double>(v, key);
        else if (key == "schedule_steps") c.schedule_steps = as<long>(v, key);
        else if (key == "lambda0") c.lambda0 = as<double>(v, key);
        else if (key == "beta") c.beta = as<double>(v, key);
        else if (key == "warm_grid_size") c.warm_grid_size = as<long>(v, key);
        else if (key == "eps_wr") c.eps_wr = as<double>(v, key);
        else if (key == "noise") c.noise = as<std::string>(v, key);
        else if (key == "noise_variance") c.noise_variance = as<double>(v, key);
        else if (key == "noise_intensity") c.noise_intensity = as<double>(v, key);
        else if (key == "noise_peak") c.noise_peak = as<double>(v, key);
        else if (key == "stopping") c.stopping = as<std::string>(v, key);
        else if (key == "sure_sigma2") c.sure_sigma2 = as<double>(v, key);
        else if (key == "smoothing_window") c.smoothing_window = as<long>(v, key);
        else if (key == "max_iters") c.max_iters = as<long>(v, key);
        else if (key == "stop_dist_opt") c.stop_dist_opt = as<double>(v, key);
        else if (key == "seed") c.seed = as<std::uint64_t>(v, key);
        else if (key == "delta_sweep") c.delta_sweep = as<std::vector<double>>(v, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }

    expect(seen.count("problem") == 1, "config requires a 'problem' key");
    const std::set<std::string> problems{"blocks", "bumps", "checkerboard", "figure1", "image"};
    expect(problems.count(c.problem) == 1, "unknown problem '" + c.problem + "'");
    if (c.problem == "image") expect(!c.image_path.empty(), "problem 'image' requires image_path");

    if (c.problem == "figure1") {
        // The 2-D toy defaults to the decaying-lambda run to its known solution.
        if (!seen.count("schedule")) c.schedule = "polynomial";
        if (!seen.count("lambda0")) c.lambda0 = 1.0;
        if (!seen.count("beta")) c.beta = 1.0;
        if (!seen.count("max_iters")) c.max_iters = 2000000;
        if (!seen.count("stop_dist_opt")) c.stop_dist_opt = 1e-6;
    }

    expect(c.rows >= 1 && c.cols >= 1, "rows/cols must be positive");
    expect(c.kernel_size >= 1 && c.kernel_size % 2 == 1, "kernel_size must be odd and positive");
    expect(c.blur_variance > 0.0, "blur_variance must be positive");

    const std::set<std::string> losses{"square", "l1", "kl", "huber", "l1l2"};
    expect(losses.count(c.loss) == 1, "unknown loss '" + c.loss + "'");
    expect(c.huber_sigma > 0.0, "huber_sigma must be positive");
    expect(c.l1l2_a1 > 0.0 && c.l1l2_a2 > 0.0, "l1l2 parameters must be positive");
    if (c.loss == "kl") expect(c.kl_background > 0.0, "kl loss requires a positive kl_background");

    const std::set<std::string> regs{"squared_norm", "haar_l1", "tv_quad"};
    expect(regs.count(c.regularizer) == 1, "unknown regularizer '" + c.regularizer + "'");
    expect(c.reg_mu >= 0.0, "reg_mu must be nonnegative");
    expect(c.reg_sigma > 0.0, "reg_sigma must be positive");
    expect(c.haar_levels >= 1, "haar_levels must be >= 1");
    expect(c.tv_inner_iters >= 1, "tv_inner_iters must be >= 1");
    expect(c.tv_inner_tol > 0.0, "tv_inner_tol must be positive");

    const std::set<std::string> schedules{"vanilla_exp", "polynomial", "warm_restart"};
    expect(schedules.count(c.schedule) == 1, "unknown schedule '" + c.schedule + "'");
    expect(c.lambda_min > 0.0 && c.lambda_max >= c.lambda_min, "need lambda_max >= lambda_min > 0");
    expect(c.schedule_steps >= 1, "schedule_steps must be >= 1");
    expect(c.lambda0 > 0.0, "lambda0 must be positive");
    expect(c.beta >= 0.0, "beta must be nonnegative");
    expect(c.warm_grid_size >= 1, "warm_grid_size must be >= 1");
    expect(c.eps_wr > 0.0, "eps_wr must be positive");

    const std::set<std::string> noises{"none", "gaussian", "salt_pepper", "poisson", "mixed"};
    expect(noises.count(c.noise) == 1, "unknown noise '" + c.noise + "'");
    expect(c.noise_variance >= 0.0, "noise_variance must be nonnegative");
    expect(c.noise_intensity >= 0.0 && c.noise_intensity <= 1.0, "noise_intensity must lie in [0,1]");
    expect(c.noise_peak > 0.0, "noise_peak must be positive");

    const std::set<std::string> stops{"fixed", "gtg", "sure"};
    expect(stops.count(c.stopping) == 1, "unknown stopping '" + c.stopping + "'");
    expect(c.smoothing_window >= 1, "smoothing_window must be >= 1");
    if (c.sure_sigma2 < 0.0)
        c.sure_sigma2 = (c.noise == "gaussian" || c.noise == "mixed") ? c.noise_variance : 0.0;

    expect(c.max_iters >= 1, "max_iters must be >= 1");
    expect(c.stop_dist_opt >= 0.0, "stop_dist_opt must be nonnegative");
    if (c.stop_dist_opt > 0.0)
        expect(c.problem == "figure1", "stop_dist_opt needs a known solution (problem 'figure1')");
    for (double s : c.delta_sweep) expect(s > 0.0, "delta_sweep entries must be positive");
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

} // namespace ddd
