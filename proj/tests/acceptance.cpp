// Acceptance runner: one PASS/FAIL line per criterion. Each criterion runs the
// library's self-check and, where a brute-force reference exists, cross-checks
// the library against the oracles from oracles.hpp as well.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pythag/selftest.hpp"

using namespace pythag;

namespace {

struct OracleCheck {
    bool passed;
    std::string detail;
};

using Oracle = std::function<OracleCheck()>;

double rel(double a, double b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

OracleCheck oracle_smoothed_sums() {
    double worst = 0;
    for (auto [n, M, Y] : {std::tuple{9LL, 4.0, 2.0}, std::tuple{15LL, 8.0, 4.0}, std::tuple{105LL, 32.0, 8.0}}) {
        auto w = build_weight_system(n, M, Y);
        worst = std::max({worst, rel(smoothed_sum_S(w), oracle::smoothed_sum(w, false)),
                          rel(smoothed_sum_S1(w), oracle::smoothed_sum(w, true))});
    }
    return {worst <= 1e-12, "oracle rel diff " + format_real(worst)};
}

OracleCheck oracle_split() {
    double worst = 0;
    for (auto [n, M, Y] : {std::tuple{9LL, 4.0, 2.0}, std::tuple{15LL, 8.0, 4.0}, std::tuple{105LL, 32.0, 8.0}}) {
        auto w = build_weight_system(n, M, Y);
        auto s = s1_split_direct(w);
        auto o = oracle::split_sums(w);
        for (auto [a, b] : {std::pair{s.sharp, o.sharp}, std::pair{s.flat, o.flat},
                            std::pair{s.sharp_minus, o.sharp_minus}, std::pair{s.sharp_plus, o.sharp_plus}})
            worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
    }
    return {worst <= 1e-12, "oracle diff " + format_real(worst)};
}

OracleCheck oracle_chain() {
    bool ok = true;
    std::string d;
    for (i64 n : {9, 15, 105}) {
        const std::size_t lib = enumerate_chain(n).size(), ref = oracle::chain_count(n);
        ok = ok && lib == ref;
        d += std::to_string(n) + ":" + std::to_string(lib) + "/" + std::to_string(ref) + " ";
    }
    auto w = build_weight_system(105, 32, 8);
    const double direct_gap = rel(s1_sharp_pm_direct(w, Sandwich::minus), oracle::split_sums(w).sharp_minus);
    ok = ok && direct_gap <= 1e-12;
    return {ok, "chain sizes " + d + "direct vs oracle " + format_real(direct_gap)};
}

OracleCheck oracle_t_direct() {
    auto w = build_weight_system(15, 8, 4);
    double worst = 0;
    for (int mu : {1, 2})
        for (int nu : {1, 2})
            for (i64 a2 : {1, 3, 5}) {
                TParams p{ChainIndex{}, mu, nu, a2};
                worst = std::max(worst, std::abs(t_direct(w, p) - oracle::t_box(w, p)) / (1 + oracle::t_box(w, p)));
            }
    return {worst <= 1e-12, "t_direct vs box oracle " + format_real(worst)};
}

OracleCheck oracle_kloosterman() {
    double worst = 0;
    for (u64 c = 1; c <= 30; ++c)
        for (i64 a = -5; a <= 5; ++a)
            for (i64 b = -5; b <= 5; ++b)
                worst = std::max(worst, std::abs(kloosterman(a, b, c).real_part - oracle::kloosterman(a, b, c).real()));
    return {worst <= 1e-9, "Kloosterman vs oracle " + format_real(worst)};
}

OracleCheck oracle_ramanujan() {
    long bad = 0;
    for (u64 q = 1; q <= 60; ++q)
        for (i64 n = -60; n <= 60; ++n)
            if (std::llround(oracle::kloosterman(0, n, q).real()) != ramanujan(q, n)) ++bad;
    return {bad == 0, std::to_string(bad) + " oracle mismatches"};
}

OracleCheck oracle_singular() {
    long bad = 0;
    for (u64 n = 1; n <= 999; n += 2)
        if (singular_series(n).value != oracle::singular_series(n)) ++bad;
    return {bad == 0, std::to_string(bad) + " nested-oracle mismatches"};
}

OracleCheck oracle_perron() {
    double worst = 0;
    for (auto [b1, b2] : std::vector<std::pair<u64, u64>>{{1, 1}, {3, 1}, {1, 5}, {3, 5}})
        for (u64 Z : {100, 1000, 10000, 100000})
            worst = std::max(worst, std::abs(phi_partial_sum_check(b1, b2, static_cast<double>(Z)).direct -
                                             static_cast<double>(oracle::perron_direct(b1, b2, Z))));
    return {worst <= 1e-13, "direct sum vs sieve oracle " + format_real(worst)};
}

OracleCheck oracle_two_squares() {
    long bad = 0;
    for (u64 N = 0; N <= 3000; ++N)
        if (two_square_reps(N) != oracle::two_squares(N)) ++bad;
    return {bad == 0, std::to_string(bad) + " scan-oracle mismatches"};
}

OracleCheck oracle_sweep_record() {
    RunConfig cfg;
    cfg.n_list = {105};
    auto r = run_sweep(cfg).at(0);
    auto w = build_weight_system(105, r.M, r.Y);
    long double expect = 0;
    for (long long x3 = 0; x3 <= 2 * r.M; x3 += 2)
        expect += w.phi3(static_cast<double>(x3)) *
                  static_cast<long double>(oracle::two_squares(static_cast<u64>(105 * 105 + x3 * x3)).size());
    const double d = rel(r.measured, static_cast<double>(expect));
    return {d <= 1e-12, "all-signs vs oracle " + format_real(d)};
}

} // namespace

int main() {
    SelftestOptions opts;
    struct Criterion {
        std::function<CheckResult(const SelftestOptions&)> check;
        Oracle oracle;
    };
    const std::vector<Criterion> criteria = {
        {check_s_equals_2s1, oracle_smoothed_sums}, {check_decomposition_sandwich, oracle_split},
        {check_chain, oracle_chain},                {check_poisson, oracle_t_direct},
        {check_jacobian, nullptr},                  {check_weil, oracle_kloosterman},
        {check_ramanujan, oracle_ramanujan},        {check_singular_series, oracle_singular},
        {check_perron, oracle_perron},              {check_two_squares, oracle_two_squares},
        {check_sweep, oracle_sweep_record},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        CheckResult r = c.check(opts);
        if (c.oracle) {
            try {
                OracleCheck o = c.oracle();
                r.passed = r.passed && o.passed;
                r.detail += "; " + o.detail;
            } catch (const std::exception& e) {
                r.passed = false;
                r.detail += std::string("; oracle exception: ") + e.what();
            }
        }
        if (!r.passed) ++failures;
        std::printf("%s criterion %2d  %-32s %s (%.2f s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        if (r.time_limit > 0) std::printf(", limit %.0f s", r.time_limit);
        std::printf(")\n");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
