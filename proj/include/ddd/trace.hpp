#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/xreal.hpp"

namespace ddd {

/* One row per executed iteration.  dual is d_n(u_{n+1}), evaluated under the
 * lambda used by that step; +inf is a legitimate value early in constrained
 * runs.  The metric columns are NaN until a selector fills them.  wall_ms is
 * measured but never serialized: emitted artifacts must be byte-identical
 * across reruns, so the CSV leaves that column empty. */
struct TraceRow {
    long n = 0;
    double lambda = 0.0;
    bool has_dual = false;
    xreal dual = 0.0;
    double gtg = std::numeric_limits<double>::quiet_NaN();
    double dist_opt = std::numeric_limits<double>::quiet_NaN();
    double sure = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = std::numeric_limits<double>::quiet_NaN();
};

struct RunTrace {
    std::vector<TraceRow> rows;

    long iterations() const { return static_cast<long>(rows.size()); }

    void set_gtg(const std::vector<double>& curve) { fill(&TraceRow::gtg, curve); }
    void set_dist_opt(const std::vector<double>& curve) { fill(&TraceRow::dist_opt, curve); }
    void set_sure(const std::vector<double>& curve) { fill(&TraceRow::sure, curve); }

private:
    void fill(double TraceRow::* field, const std::vector<double>& curve) {
        if (static_cast<long>(curve.size()) != iterations())
            throw DimensionError("trace metric curve length does not match iteration count");
        for (std::size_t i = 0; i < curve.size(); ++i) rows[i].*field = curve[i];
    }
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string trace_to_csv(const RunTrace& trace) {
    std::string out = "n,lambda,dual_value,gtg,dist_opt,sure,wall_ms\n";
    for (const auto& r : trace.rows) {
        out += std::to_string(r.n);
        out += ',';
        out += detail::format_double(r.lambda);
        out += ',';
        out += r.has_dual ? detail::format_double(r.dual.v) : "";
        out += ',';
        out += detail::format_double(r.gtg);
        out += ',';
        out += detail::format_double(r.dist_opt);
        out += ',';
        out += detail::format_double(r.sure);
        out += ',';
        /* wall_ms intentionally blank; see above. */
        out += '\n';
    }
    return out;
}

inline void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("trace: cannot write " + path);
    out << trace_to_csv(trace);
    if (!out) throw ConfigError("trace: write failed for " + path);
}

/* Divergence carries the rows recorded before the blow-up so the harness can
 * still dump them for inspection. */
struct DivergenceError : Error {
    RunTrace partial;
    DivergenceError(const std::string& msg, RunTrace t) : Error(msg), partial(std::move(t)) {}
};

} // namespace ddd
