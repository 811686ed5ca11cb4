#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "pythag/arith.hpp"
#include "pythag/errors.hpp"
#include "pythag/lattice.hpp"
#include "pythag/parallel.hpp"
#include "pythag/singular.hpp"
#include "pythag/weights.hpp"

namespace pythag {

enum class YPolicy { M_over_log3, fixed };
enum class ReportFormat { csv, jsonl };

/// Configuration of a sweep run.
struct RunConfig {
    std::vector<u64> n_list;
    double m_exponent = 0.9;
    YPolicy y_policy = YPolicy::M_over_log3;
    double Y_fixed = 1.0; ///< used when y_policy is fixed
    u64 seed = 0;
    unsigned threads = 1;
    std::string output_path;
    ReportFormat format = ReportFormat::csv;
    /// When false, wall_ms is written as 0 so that reports are byte-identical across runs.
    bool record_timing = true;
};

/// One row of the sweep report.
struct SweepRecord {
    u64 n = 0;
    double M = 0, Y = 0;
    double measured = 0;  ///< all-signs weighted count
    double predicted = 0; ///< main term (32/pi) P(n) log n M phi_hat(0)
    double ratio = 0;
    std::string p_n;      ///< P(n) as num/den
    long long wall_ms = 0;
    std::string error;    ///< empty on success
};

/// Y = M / log^3 n clamped to [1, M], or the fixed value (which must lie in [1, M]).
inline double sweep_Y(const RunConfig& cfg, u64 n, double M) {
    if (cfg.y_policy == YPolicy::fixed) {
        if (!(cfg.Y_fixed >= 1.0 && cfg.Y_fixed <= M))
            throw BadWindow("fixed Y = " + std::to_string(cfg.Y_fixed) + " is outside [1, M]");
        return cfg.Y_fixed;
    }
    const double l = std::log(static_cast<double>(n));
    return std::clamp(M / (l * l * l), 1.0, M);
}

/// Measure and predict one n. Failures are captured in the record.
inline SweepRecord sweep_one(const RunConfig& cfg, u64 n) {
    SweepRecord r;
    r.n = n;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (n == 0 || n % 2 == 0) throw EvenInput("sweep: n must be odd, got " + std::to_string(n));
        r.M = std::pow(static_cast<double>(n), cfg.m_exponent);
        if (!(r.M >= 1.0 && r.M <= static_cast<double>(n)))
            throw BadWindow("sweep: M = n^" + std::to_string(cfg.m_exponent) + " is outside [1, n]");
        r.Y = sweep_Y(cfg, n, r.M);
        WeightSystem w = build_weight_system(static_cast<long long>(n), r.M, r.Y);
        r.measured = all_signs_count(w);
        r.p_n = to_fraction_string(singular_series(n).value);
        r.predicted = main_term_predict(n, r.M, canonical_phi_hat0());
        r.ratio = r.measured / r.predicted;
    } catch (const std::exception& e) {
        r.error = e.what();
        r.measured = r.predicted = r.ratio = std::nan("");
    }
    if (cfg.record_timing)
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                        .count();
    return r;
}

/// Run the sweep over cfg.n_list on a pool of cfg.threads workers. Records come back
/// in n_list order regardless of scheduling.
inline std::vector<SweepRecord> run_sweep(const RunConfig& cfg) {
    return parallel_map(cfg.n_list.size(), std::max(1u, cfg.threads),
                        [&](std::size_t i) { return sweep_one(cfg, cfg.n_list[i]); });
}

/// Fixed 12-significant-digit rendering used by every report.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline constexpr const char* report_header = "n,M,Y,measured,predicted,ratio,P_n,wall_ms";

/// Render records as CSV (with header) or JSON lines.
inline std::string render_report(const std::vector<SweepRecord>& records, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << report_header << '\n';
        for (const auto& r : records)
            out << r.n << ',' << format_real(r.M) << ',' << format_real(r.Y) << ',' << format_real(r.measured) << ','
                << format_real(r.predicted) << ',' << format_real(r.ratio) << ',' << r.p_n << ',' << r.wall_ms
                << '\n';
        return out.str();
    }
    // JSON numbers go through the same 12-digit rounding; non-finite values become null.
    auto num = [](double x) -> nlohmann::json {
        if (!std::isfinite(x)) return nullptr;
        return std::stod(format_real(x));
    };
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["n"] = r.n;
        j["M"] = num(r.M);
        j["Y"] = num(r.Y);
        j["measured"] = num(r.measured);
        j["predicted"] = num(r.predicted);
        j["ratio"] = num(r.ratio);
        j["P_n"] = r.p_n;
        j["wall_ms"] = r.wall_ms;
        if (!r.error.empty()) j["error"] = r.error;
        out << j.dump() << '\n';
    }
    return out.str();
}

/// Write `content` to `path` through a temporary file in the same directory and a
/// rename, so readers never observe a partially written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open temporary file " + tmp.string() + " for " + path);
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

/// Write the report to cfg.output_path in cfg.format.
inline void emit_report(const std::vector<SweepRecord>& records, const RunConfig& cfg) {
    if (cfg.output_path.empty()) throw IoError("emit_report: no output path given");
    write_file_atomic(cfg.output_path, render_report(records, cfg.format));
}

} // namespace pythag
