#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* lambda_n sequence driving the diagonal iteration.  Always positive and
 * nonincreasing (frozen(0) excepted; see below).
 *
 *   vanilla_exp:  exactly N_v values, log-uniform from lambda_max down to
 *                 lambda_min; the run stops when they are consumed.
 *   polynomial:   lambda_n = lambda0 / (n+1)^beta, never exhausted.
 *   warm_restart: a log-uniform grid of N_wr values; the grid index advances
 *                 only when the relative dual-value change falls below
 *                 eps_wr (the rule is applied by run(), which owns the dual
 *                 values); exhausted after the last grid point fires.
 *   frozen:       constant lambda, never exhausted.  Test support only; it
 *                 admits lambda = 0 so a pure-Landweber trajectory can be
 *                 produced for the finite-difference derivative oracle.
 *
 * The object is a cursor: current() reads lambda_n, advance() moves on.
 * run() copies its schedule, so one Schedule value can seed many runs. */
class Schedule {
public:
    enum class Kind { vanilla_exp, polynomial, warm_restart, frozen };

    static Schedule vanilla_exp(double lambda_max, double lambda_min, long n_v) {
        check_range(lambda_max, lambda_min);
        if (n_v < 1) throw ConfigError("vanilla_exp: n_v must be >= 1");
        Schedule s;
        s.kind_ = Kind::vanilla_exp;
        s.lambda_max_ = lambda_max;
        s.lambda_min_ = lambda_min;
        s.count_ = n_v;
        return s;
    }

    static Schedule polynomial(double lambda0, double beta) {
        if (!(lambda0 > 0.0)) throw ConfigError("polynomial: lambda0 must be positive");
        if (beta < 0.0) throw ConfigError("polynomial: beta must be nonnegative");
        Schedule s;
        s.kind_ = Kind::polynomial;
        s.lambda_max_ = lambda0;
        s.beta_ = beta;
        return s;
    }

    static Schedule warm_restart(std::vector<double> grid, double eps_wr) {
        if (grid.empty()) throw ConfigError("warm_restart: empty grid");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0.0)) throw ConfigError("warm_restart: grid must be positive");
            if (i > 0 && grid[i] > grid[i - 1]) throw ConfigError("warm_restart: grid must be nonincreasing");
        }
        if (!(eps_wr > 0.0)) throw ConfigError("warm_restart: eps_wr must be positive");
        Schedule s;
        s.kind_ = Kind::warm_restart;
        s.grid_ = std::move(grid);
        s.eps_wr_ = eps_wr;
        return s;
    }

    /* Log-uniform grid between the endpoints, matching the vanilla spacing. */
    static Schedule warm_restart_log(double lambda_max, double lambda_min, long n_wr, double eps_wr) {
        check_range(lambda_max, lambda_min);
        if (n_wr < 1) throw ConfigError("warm_restart_log: n_wr must be >= 1");
        std::vector<double> grid(static_cast<std::size_t>(n_wr));
        for (long i = 0; i < n_wr; ++i) grid[static_cast<std::size_t>(i)] = log_point(lambda_max, lambda_min, i, n_wr);
        return warm_restart(std::move(grid), eps_wr);
    }

    static Schedule frozen(double lambda) {
        if (lambda < 0.0) throw ConfigError("frozen: lambda must be nonnegative");
        Schedule s;
        s.kind_ = Kind::frozen;
        s.lambda_max_ = lambda;
        return s;
    }

    Kind kind() const { return kind_; }
    double eps_wr() const { return eps_wr_; }

    /* First value; fixes L = ||A||^2/sigma_R + lambda0/sigma_psi. */
    double lambda0() const {
        switch (kind_) {
            case Kind::warm_restart: return grid_.front();
            default: return lambda_max_;
        }
    }

    bool exhausted() const {
        switch (kind_) {
            case Kind::vanilla_exp: return index_ >= count_;
            case Kind::warm_restart: return index_ >= static_cast<long>(grid_.size());
            default: return false;
        }
    }

    double current() const {
        switch (kind_) {
            case Kind::vanilla_exp: return log_point(lambda_max_, lambda_min_, index_, count_);
            case Kind::polynomial: return lambda_max_ / std::pow(static_cast<double>(index_) + 1.0, beta_);
            case Kind::warm_restart: return grid_[static_cast<std::size_t>(index_)];
            case Kind::frozen: return lambda_max_;
        }
        return lambda_max_;
    }

    /* vanilla/polynomial move every iteration; warm_restart moves only when
     * run() fires the dual-change rule; frozen never moves. */
    void advance() {
        if (kind_ != Kind::frozen) ++index_;
    }

    bool per_iteration_advance() const { return kind_ == Kind::vanilla_exp || kind_ == Kind::polynomial; }

    /* Warm-restart rule on consecutive dual values under the current lambda;
     * +inf on either side defers the test. */
    bool warm_rule_fires(xreal d_prev, xreal d_cur) const {
        if (!d_prev.finite() || !d_cur.finite()) return false;
        if (std::isinf(eps_wr_)) return true;
        return std::fabs(d_cur.value() - d_prev.value()) < eps_wr_ * std::fabs(d_cur.value());
    }

    /* Prefix of the emitted sequence for stateless kinds; the warm-restart
     * sequence is data-dependent and cannot be materialized a priori. */
    std::vector<double> materialize(long count) const {
        if (kind_ == Kind::warm_restart) throw ConfigError("materialize: warm_restart schedules are data-dependent");
        std::vector<double> out;
        for (long n = 0; n < count; ++n) {
            if (kind_ == Kind::vanilla_exp && n >= count_) break;
            switch (kind_) {
                case Kind::vanilla_exp: out.push_back(log_point(lambda_max_, lambda_min_, n, count_)); break;
                case Kind::polynomial: out.push_back(lambda_max_ / std::pow(static_cast<double>(n) + 1.0, beta_)); break;
                default: out.push_back(lambda_max_); break;
            }
        }
        return out;
    }

private:
    static void check_range(double lambda_max, double lambda_min) {
        if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
            throw ConfigError("schedule: need lambda_max >= lambda_min > 0");
    }

    /* lambda_max * (lambda_min/lambda_max)^(i/(n-1)), the log-uniform grid;
     * a single-point grid sits at lambda_max. */
    static double log_point(double lambda_max, double lambda_min, long i, long n) {
        if (n <= 1) return lambda_max;
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        return lambda_max * std::pow(lambda_min / lambda_max, t);
    }

    Kind kind_ = Kind::polynomial;
    double lambda_max_ = 1.0;
    double lambda_min_ = 1.0;
    double beta_ = 0.0;
    double eps_wr_ = std::numeric_limits<double>::infinity();
    long count_ = 0;
    long index_ = 0;
    std::vector<double> grid_;
};

} // namespace ddd
