#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddd/config.hpp"
#include "ddd/harness.hpp"
#include "ddd/trace.hpp"
#include "ddd/verify.hpp"
#include "ddd/version.hpp"

namespace {

ddd::ExperimentConfig load_with_overrides(const std::string& path, const CLI::Option* seed_opt, std::uint64_t seed,
                                          const CLI::Option* iters_opt, long max_iters) {
    ddd::ExperimentConfig cfg = ddd::load_config(path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (iters_opt->count() > 0) {
        if (max_iters < 1) throw ddd::ConfigError("--max-iters must be >= 1");
        cfg.max_iters = max_iters;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diagonal dual descent for linear inverse problems"};
    app.set_version_flag("--version", std::string(ddd::library_version));
    app.require_subcommand(1);

    std::string config_path, config2_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    long max_iters = 0;

    auto* solve = app.add_subcommand("solve", "run one experiment and write its artifacts");
    auto* semiconv = app.add_subcommand("semiconv", "record the ground-truth-gap curve and its argmin");
    auto* compare = app.add_subcommand("compare", "vanilla grid vs warm restart on one problem");
    auto* sure_cmd = app.add_subcommand("sure", "run with the SURE selector and store its curve");
    auto* verify = app.add_subcommand("verify", "run the built-in diagnostics battery");

    CLI::Option *seed_opt = nullptr, *iters_opt = nullptr;
    for (CLI::App* sub : {solve, semiconv, compare, sure_cmd}) {
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (default ./out)");
        seed_opt = sub->add_option("--seed", seed, "override the config seed");
        iters_opt = sub->add_option("--max-iters", max_iters, "override the iteration budget");
    }
    compare->add_option("--config2", config2_path, "second config (default: derived warm-restart variant)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return ddd::run_verify(std::cout) ? 0 : 1;

        const ddd::ExperimentConfig cfg =
            load_with_overrides(config_path, seed_opt, seed, iters_opt, max_iters);

        if (solve->parsed()) {
            const ddd::ExperimentResult res = ddd::cli_solve(cfg, out_dir);
            std::cout << "iterations " << res.main_run.trace.rows.size() << ", chosen_n " << res.report.chosen_n
                      << ", artifacts in " << out_dir << "\n";
        } else if (semiconv->parsed()) {
            const ddd::SemiconvSummary s = ddd::cli_semiconvergence(cfg, out_dir);
            std::cout << "n_bar " << s.n_bar << ", gtg_min " << s.gtg_min << ", interior "
                      << (s.interior ? "true" : "false") << "\n";
        } else if (compare->parsed()) {
            std::vector<ddd::CompareRow> rows;
            if (config2_path.empty()) {
                rows = ddd::cli_compare_single(cfg, out_dir);
            } else {
                ddd::ExperimentConfig cfg2 =
                    load_with_overrides(config2_path, seed_opt, seed, iters_opt, max_iters);
                rows = ddd::cli_compare(cfg, cfg2, out_dir);
            }
            for (const auto& r : rows)
                std::cout << r.method << ": iterations " << r.iterations << ", n_bar " << r.n_bar << ", n_hat "
                          << r.n_hat << "\n";
        } else if (sure_cmd->parsed()) {
            const ddd::ExperimentResult res = ddd::cli_sure(cfg, out_dir);
            std::cout << "n_hat " << res.n_hat << ", epsilon " << res.sure_res.epsilon << "\n";
        }
        return 0;
    } catch (const ddd::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
