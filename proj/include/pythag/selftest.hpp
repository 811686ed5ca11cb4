#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pythag/arith.hpp"
#include "pythag/expsum.hpp"
#include "pythag/harness.hpp"
#include "pythag/lattice.hpp"
#include "pythag/singular.hpp"
#include "pythag/transform.hpp"
#include "pythag/weights.hpp"

namespace pythag {

/// Outcome of one acceptance criterion.
struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
    double time_limit = 0; ///< seconds; 0 means no limit
};

struct SelftestOptions {
    unsigned threads = 1;
    u64 seed = 0;
    std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

namespace detail {

struct Window {
    long long n;
    double M, Y;
};

inline const std::vector<Window>& desk_windows() {
    static const std::vector<Window> w = {{9, 4, 2}, {15, 8, 4}, {105, 32, 8}};
    return w;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

/// Time `body`, which fills passed/detail, and apply the time limit.
inline CheckResult timed_check(int id, std::string name, double limit, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.time_limit = limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0 && r.seconds > limit) {
        r.passed = false;
        r.detail += " [time limit " + format_real(limit) + " s exceeded]";
    }
    return r;
}

} // namespace detail

/// 1. S = 2 S1 to 1e-12 relative on the desk windows.
inline CheckResult check_s_equals_2s1(const SelftestOptions& o) {
    return detail::timed_check(1, "S = 2 S1", 5.0, [&](CheckResult& r) {
        double worst = 0;
        for (auto [n, M, Y] : detail::desk_windows()) {
            auto w = build_weight_system(n, M, Y);
            worst = std::max(worst, detail::rel_diff(smoothed_sum_S(w, o.threads), 2.0 * smoothed_sum_S1(w, o.threads)));
        }
        r.passed = worst <= 1e-12;
        r.detail = "max rel diff " + format_real(worst);
    });
}

/// 2. S1 = S1_sharp + S1_flat and S1_sharp_minus <= S1_sharp <= S1_sharp_plus.
inline CheckResult check_decomposition_sandwich(const SelftestOptions& o) {
    return detail::timed_check(2, "S1 = sharp + flat, sandwich", 0, [&](CheckResult& r) {
        double worst = 0;
        bool order = true;
        for (auto [n, M, Y] : detail::desk_windows()) {
            auto w = build_weight_system(n, M, Y);
            auto s = s1_split_direct(w);
            worst = std::max(worst, detail::rel_diff(s.sharp + s.flat, smoothed_sum_S1(w, o.threads)));
            order = order && s.sharp_minus <= s.sharp && s.sharp <= s.sharp_plus && s.flat_minus <= s.flat &&
                    s.flat <= s.flat_plus;
        }
        r.passed = order && worst <= 1e-12;
        r.detail = "max rel diff " + format_real(worst) + (order ? ", order holds" : ", ORDER VIOLATED");
    });
}

/// 3. The divisor chain reproduces the direct S1_sharp_minus to 1e-9 relative.
inline CheckResult check_chain(const SelftestOptions& o) {
    return detail::timed_check(3, "chain = direct S1 sharp minus", 60.0, [&](CheckResult& r) {
        double worst = 0;
        for (auto [n, M, Y] : detail::desk_windows()) {
            auto w = build_weight_system(n, M, Y);
            worst = std::max(worst, detail::rel_diff(s1_sharp_minus_chain(w, ChainVariant::exact, o.threads),
                                                     s1_sharp_pm_direct(w, Sandwich::minus)));
        }
        r.passed = worst <= 1e-9;
        r.detail = "max rel diff " + format_real(worst);
    });
}

/// 4. Poisson identity t_poisson = t_direct at n = 15, all-ones chain, safety 10.
inline CheckResult check_poisson(const SelftestOptions&) {
    return detail::timed_check(4, "Poisson identity", 120.0, [&](CheckResult& r) {
        auto w = build_weight_system(15, 8, 4);
        double worst = 0;
        for (int mu : {1, 2})
            for (int nu : {1, 2})
                for (i64 a2 : {1, 3, 5}) {
                    TParams p;
                    p.mu = mu;
                    p.nu = nu;
                    p.alpha2 = a2;
                    worst = std::max(worst, detail::rel_diff(t_poisson(w, p, 10.0).total, t_direct(w, p)));
                }
        r.passed = worst <= 1e-6;
        r.detail = "12 cases, max rel diff " + format_real(worst);
    });
}

/// The five parameter points used for the Jacobian identity.
inline std::vector<std::pair<detail::Window, TParams>> jacobian_points() {
    std::vector<std::pair<detail::Window, TParams>> pts;
    TParams p;
    pts.push_back({{15, 8, 4}, p});
    p.mu = 2;
    pts.push_back({{15, 8, 4}, p});
    p = {};
    p.alpha2 = 3;
    p.nu = 2;
    pts.push_back({{15, 8, 4}, p});
    bool have_beta = false, have_m = false;
    for (const auto& c : enumerate_chain(105)) {
        if (!have_beta && c.e == 3 && c.g == 3 && c.beta1 == 3) {
            TParams q;
            q.chain = c;
            pts.push_back({{105, 32, 8}, q});
            have_beta = true;
        }
        if (!have_m && c.m1 == 5 && c.e == 1) {
            TParams q;
            q.chain = c;
            pts.push_back({{105, 32, 8}, q});
            have_m = true;
        }
    }
    return pts;
}

/// 5. (x, y) and (sigma, tau) quadratures of I(0,0) agree to 1e-8 relative.
inline CheckResult check_jacobian(const SelftestOptions&) {
    return detail::timed_check(5, "Jacobian identity", 0, [&](CheckResult& r) {
        double worst = 0;
        auto pts = jacobian_points();
        for (const auto& [win, p] : pts) {
            auto w = build_weight_system(win.n, win.M, win.Y);
            worst = std::max(worst, detail::rel_diff(fourier_integral_I(w, p, 0, 0).real_part, i00_sigma_tau(w, p)));
        }
        r.passed = pts.size() == 5 && worst <= 1e-8;
        r.detail = std::to_string(pts.size()) + " points, max rel diff " + format_real(worst);
    });
}

/// 6. Weil slack >= 0 for c <= 300, |a|, |b| <= 50.
inline CheckResult check_weil(const SelftestOptions& o) {
    return detail::timed_check(6, "Weil bound", 60.0, [&](CheckResult& r) {
        auto mins = parallel_map(300, o.threads, [](std::size_t i) {
            KloostermanContext ctx(i + 1);
            double m = 1e300;
            for (i64 a = -50; a <= 50; ++a)
                for (i64 b = -50; b <= 50; ++b) m = std::min(m, weil_margin(ctx, a, b).slack);
            return m;
        });
        double worst = *std::min_element(mins.begin(), mins.end());
        r.passed = worst >= 0.0;
        r.detail = "3060300 sums, min slack " + format_real(worst);
    });
}

/// 7. Ramanujan closed form equals the direct sum for q <= 200, |n| <= 200.
inline CheckResult check_ramanujan(const SelftestOptions&) {
    return detail::timed_check(7, "Ramanujan closed form", 0, [&](CheckResult& r) {
        long bad = 0;
        for (u64 q = 1; q <= 200; ++q)
            for (i64 n = -200; n <= 200; ++n)
                if (ramanujan(q, n) != ramanujan_direct(q, n)) ++bad;
        r.passed = bad == 0;
        r.detail = std::to_string(bad) + " mismatches in 80200 pairs";
    });
}

/// 8. P(n): general = square-free product, known values, 0 < P(n) <= 1.
inline CheckResult check_singular_series(const SelftestOptions&) {
    return detail::timed_check(8, "singular series", 0, [&](CheckResult& r) {
        long mismatches = 0, out_of_range = 0;
        for (u64 n = 1; n <= 10000; n += 2) {
            ExactRational v = singular_series(n).value;
            if (v <= 0 || v > 1) ++out_of_range;
            if (factorize(n).squarefree() && v != singular_series_squarefree(n).value) ++mismatches;
        }
        const bool known = singular_series(3).value == ExactRational(17, 18) &&
                           singular_series(15).value == ExactRational(1241, 1350);
        r.passed = mismatches == 0 && out_of_range == 0 && known;
        r.detail = std::to_string(mismatches) + " formula mismatches, " + std::to_string(out_of_range) +
                   " out of (0,1], known values " + (known ? "ok" : "WRONG");
    });
}

/// 9. Perron partial sum: |error| <= 5 Z^{-1/2} at (1,1) and |error| non-increasing in Z.
inline CheckResult check_perron(const SelftestOptions&) {
    return detail::timed_check(9, "Perron partial sum", 30.0, [&](CheckResult& r) {
        const double Zs[] = {1e2, 1e3, 1e4, 1e5};
        bool ok = true;
        std::ostringstream d;
        const char* sep = "";
        for (auto [b1, b2] : std::vector<std::pair<u64, u64>>{{1, 1}, {3, 1}, {1, 5}, {3, 5}}) {
            double prev = 1e300;
            d << sep << "(" << b1 << "," << b2 << "):";
            for (double Z : Zs) {
                double e = std::abs(phi_partial_sum_check(b1, b2, Z).error);
                d << ' ' << format_real(e);
                if (e > prev) ok = false;
                if (b1 == 1 && b2 == 1 && e > 5.0 / std::sqrt(Z)) ok = false;
                prev = e;
            }
            sep = "; ";
        }
        r.passed = ok;
        r.detail = d.str();
    });
}

/// 10. Loop and factorization two-square representations agree.
inline CheckResult check_two_squares(const SelftestOptions& o) {
    return detail::timed_check(10, "two-square oracle equivalence", 0, [&](CheckResult& r) {
        long bad = 0;
        for (u64 N = 0; N <= 100000; ++N)
            if (two_square_reps_loop(N) != two_square_reps_factor(N)) ++bad;
        std::mt19937_64 rng(o.seed);
        std::uniform_int_distribution<u64> dist(0, 1000000000000ULL);
        for (int i = 0; i < 1000; ++i) {
            u64 N = dist(rng);
            if (two_square_reps_loop(N) != two_square_reps_factor(N)) ++bad;
        }
        const bool r25 = two_square_reps(25).size() == 12;
        r.passed = bad == 0 && r25;
        r.detail = std::to_string(bad) + " mismatches, r2(25) = " + std::to_string(two_square_reps(25).size());
    });
}

/// Twenty odd square-free integers starting at `start`.
inline std::vector<u64> squarefree_odd_run(u64 start, std::size_t count) {
    std::vector<u64> out;
    for (u64 n = start | 1; out.size() < count; n += 2)
        if (factorize(n).squarefree()) out.push_back(n);
    return out;
}

/// 11. Sweep over 20 odd square-free n near 1e5: byte-identical reports, finite positive ratios.
inline CheckResult check_sweep(const SelftestOptions& o) {
    return detail::timed_check(11, "sweep determinism", 600.0, [&](CheckResult& r) {
        RunConfig cfg;
        cfg.n_list = squarefree_odd_run(100001, 20);
        cfg.m_exponent = 0.9;
        cfg.threads = o.threads;
        cfg.seed = o.seed;
        cfg.record_timing = false;
        const auto dir = o.scratch_dir;
        cfg.output_path = (dir / "pythag_sweep_a.csv").string();
        auto first = run_sweep(cfg);
        emit_report(first, cfg);
        cfg.output_path = (dir / "pythag_sweep_b.csv").string();
        emit_report(run_sweep(cfg), cfg);
        auto slurp = [](const std::filesystem::path& p) {
            std::ifstream f(p, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(f), {});
        };
        const std::string a = slurp(dir / "pythag_sweep_a.csv"), b = slurp(dir / "pythag_sweep_b.csv");
        std::filesystem::remove(dir / "pythag_sweep_a.csv");
        std::filesystem::remove(dir / "pythag_sweep_b.csv");
        bool ratios = first.size() == 20;
        double lo = 1e300, hi = 0;
        for (const auto& rec : first) {
            if (!rec.error.empty() || !std::isfinite(rec.ratio) || !(rec.ratio > 0)) ratios = false;
            lo = std::min(lo, rec.ratio);
            hi = std::max(hi, rec.ratio);
        }
        r.passed = ratios && a == b && !a.empty();
        r.detail = std::string(a == b ? "identical" : "DIFFERENT") + " reports, ratio range [" + format_real(lo) +
                   ", " + format_real(hi) + "]";
    });
}

/// Every acceptance criterion in order.
inline std::vector<CheckResult> run_selftest(const SelftestOptions& o = {}) {
    return {check_s_equals_2s1(o), check_decomposition_sandwich(o), check_chain(o), check_poisson(o),
            check_jacobian(o),     check_weil(o),                   check_ramanujan(o), check_singular_series(o),
            check_perron(o),       check_two_squares(o),            check_sweep(o)};
}

} // namespace pythag
