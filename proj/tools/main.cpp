// Command-line front end: factor, kloosterman, count, singular-series, perron-check,
// verify-chain, verify-poisson, sweep and selftest.
//
// Results go to standard output as JSON (or the CSV / JSON-lines report for sweep).
// The exit status is 0 iff every requested verification passed; otherwise a JSON
// failure summary is written to standard error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pythag/arith.hpp"
#include "pythag/expsum.hpp"
#include "pythag/harness.hpp"
#include "pythag/lattice.hpp"
#include "pythag/selftest.hpp"
#include "pythag/singular.hpp"
#include "pythag/transform.hpp"
#include "pythag/weights.hpp"

using namespace pythag;
using json = nlohmann::ordered_json;

namespace {

/// Collects failed verifications for the stderr summary.
struct Failures {
    json items = json::array();
    void add(const std::string& check, const std::string& detail) { items.push_back({{"check", check}, {"detail", detail}}); }
    bool empty() const { return items.empty(); }
};

struct Window {
    long long n = 15;
    double M = 0, Y = 0;

    /// Defaults: M = n/2 rounded, Y = M/2.
    WeightSystem build() const {
        const double m = M > 0 ? M : std::max(1.0, std::round(static_cast<double>(n) / 2.0));
        const double y = Y > 0 ? Y : std::max(1.0, m / 2.0);
        return build_weight_system(n, m, y);
    }
};

void add_window_options(CLI::App* app, Window& w) {
    app->add_option("--n", w.n, "odd n")->required();
    app->add_option("--M", w.M, "window size M (default n/2 rounded)");
    app->add_option("--Y", w.Y, "ramp length Y (default M/2)");
}

std::vector<u64> read_n_list(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read n list " + path);
    std::vector<u64> out;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream in(line);
        u64 v;
        while (in >> v) out.push_back(v);
    }
    return out;
}

json window_json(const WeightSystem& w) { return {{"n", w.n()}, {"M", w.M()}, {"Y", w.Y()}, {"X", w.X()}}; }

double rel(double a, double b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed counting of x1^2 + x2^2 - x3^2 = n^2 and numerical checks of its transformations"};
    app.fallthrough(); // global options may also follow the subcommand
    app.require_subcommand(1);
    unsigned threads = 1;
    u64 seed = 0;
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", seed, "seed for randomized parameter choices");

    // factor
    u64 factor_n = 0;
    auto* factor_cmd = app.add_subcommand("factor", "prime factorization and multiplicative functions");
    factor_cmd->add_option("--n", factor_n, "positive integer")->required()->check(CLI::PositiveNumber);

    // kloosterman
    i64 ka = 0, kb = 0;
    u64 kc = 1;
    auto* kl_cmd = app.add_subcommand("kloosterman", "S(a, b; c) and its Weil margin");
    kl_cmd->add_option("--a", ka)->required();
    kl_cmd->add_option("--b", kb)->required();
    kl_cmd->add_option("--c", kc)->required()->check(CLI::PositiveNumber);

    // count
    Window count_win;
    auto* count_cmd = app.add_subcommand("count", "smoothed sums S, S1 and the sharp/flat pieces");
    add_window_options(count_cmd, count_win);

    // singular-series
    u64 ss_n = 1;
    auto* ss_cmd = app.add_subcommand("singular-series", "exact singular series P(n)");
    ss_cmd->add_option("--n", ss_n, "odd n")->required();

    // perron-check
    u64 beta1 = 1, beta2 = 1;
    std::vector<double> zs;
    auto* perron_cmd = app.add_subcommand("perron-check", "partial sum of phi(a beta2)/(a^2 beta2) against its asymptotic");
    perron_cmd->add_option("--beta1", beta1);
    perron_cmd->add_option("--beta2", beta2);
    perron_cmd->add_option("--Z", zs, "one or more cutoffs (default 1e2 1e3 1e4 1e5)");

    // verify-chain
    Window chain_win;
    auto* chain_cmd = app.add_subcommand("verify-chain", "divisor-chain S1 sharp minus against direct evaluation");
    add_window_options(chain_cmd, chain_win);

    // verify-poisson
    Window pois_win;
    double safety = 10.0;
    int fuzz = 0;
    auto* pois_cmd = app.add_subcommand("verify-poisson", "Poisson/Kloosterman expansion of T against the direct sum");
    add_window_options(pois_cmd, pois_win);
    pois_cmd->add_option("--safety", safety, "truncation multiplier on the negligibility cutoffs")->check(CLI::Range(1.0, 1e6));
    pois_cmd->add_option("--fuzz", fuzz, "extra random (chain index, mu, nu, alpha2) cases drawn from --seed");

    // sweep
    RunConfig cfg;
    std::vector<u64> sweep_n;
    std::string n_list_path, y_policy = "M_over_log3", format = "csv";
    double fixed_Y = 0;
    bool no_timing = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "measured versus predicted counts over a list of n");
    sweep_cmd->add_option("--n", sweep_n, "odd n (repeatable)");
    sweep_cmd->add_option("--n-list", n_list_path, "file with one n per line");
    sweep_cmd->add_option("--m-exp", cfg.m_exponent, "M = n^m_exp")->check(CLI::Range(0.0, 1.0));
    sweep_cmd->add_option("--y-policy", y_policy)->check(CLI::IsMember({"M_over_log3", "fixed"}));
    sweep_cmd->add_option("--Y", fixed_Y, "Y for --y-policy fixed");
    sweep_cmd->add_option("--out", cfg.output_path, "report path (default: standard output)");
    sweep_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "jsonl"}));
    sweep_cmd->add_flag("--no-timing", no_timing, "write wall_ms as 0 for byte-reproducible reports");

    // selftest
    auto* self_cmd = app.add_subcommand("selftest", "run the full acceptance property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; malformed arguments count as usage errors.
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Failures failures;
    try {
        if (*factor_cmd) {
            auto f = factorize(factor_n);
            auto m = mult_funcs(factor_n);
            json factors = json::array();
            for (const auto& pp : f.factors) factors.push_back({pp.prime, pp.exponent});
            std::cout << json{{"n", factor_n}, {"factors", factors}, {"mu", m.mu}, {"phi", m.phi}, {"tau", m.tau},
                              {"sigma_minus1", to_fraction_string(m.sigma_minus1)}}
                             .dump()
                      << "\n";
        } else if (*kl_cmd) {
            auto v = kloosterman(ka, kb, kc);
            auto wm = weil_margin(ka, kb, kc);
            std::cout << json{{"a", ka}, {"b", kb}, {"c", kc}, {"value", v.real_part}, {"residual_imag", v.residual_imag},
                              {"weil_bound", wm.bound}, {"slack", wm.slack}}
                             .dump()
                      << "\n";
            if (std::abs(v.residual_imag) > 1e-9 * static_cast<double>(kc))
                failures.add("kloosterman", "imaginary residual " + format_real(v.residual_imag));
        } else if (*count_cmd) {
            auto w = count_win.build();
            auto s = s1_split_direct(w);
            const double S = smoothed_sum_S(w, threads), S1 = smoothed_sum_S1(w, threads);
            json out = window_json(w);
            out.update(json{{"S", S},
                            {"S1", S1},
                            {"S1_sharp", s.sharp},
                            {"S1_flat", s.flat},
                            {"S1_sharp_minus", s.sharp_minus},
                            {"S1_sharp_plus", s.sharp_plus},
                            {"S1_flat_minus", s.flat_minus},
                            {"S1_flat_plus", s.flat_plus},
                            {"all_signs", all_signs_count(w, threads)},
                            {"solutions_in_support", enumerate_solutions(w).triples.size()}});
            std::cout << out.dump(2) << "\n";
            if (rel(S, 2 * S1) > 1e-12) failures.add("S = 2 S1", format_real(rel(S, 2 * S1)));
            if (rel(s.sharp + s.flat, S1) > 1e-12) failures.add("S1 = sharp + flat", format_real(rel(s.sharp + s.flat, S1)));
            if (!(s.sharp_minus <= s.sharp && s.sharp <= s.sharp_plus)) failures.add("sandwich", "order violated");
        } else if (*ss_cmd) {
            auto P = singular_series(ss_n);
            json out{{"n", ss_n}, {"P_n", to_fraction_string(P.value)}, {"value", P.value.convert_to<double>()}};
            if (factorize(ss_n).squarefree()) {
                const bool same = singular_series_squarefree(ss_n).value == P.value;
                out["squarefree_product_agrees"] = same;
                if (!same) failures.add("singular-series", "product form differs for n = " + std::to_string(ss_n));
            }
            std::cout << out.dump() << "\n";
        } else if (*perron_cmd) {
            if (zs.empty()) zs = {1e2, 1e3, 1e4, 1e5};
            json rows = json::array();
            for (double Z : zs) {
                auto c = phi_partial_sum_check(beta1, beta2, Z);
                rows.push_back({{"beta1", c.beta1}, {"beta2", c.beta2}, {"Z", c.Z}, {"direct", c.direct},
                                {"predicted", c.predicted}, {"error", c.error}, {"bound_5_over_sqrtZ", 5.0 / std::sqrt(Z)}});
                if (std::abs(c.error) > 5.0 / std::sqrt(Z))
                    failures.add("perron-check", "|error| above 5/sqrt(Z) at Z = " + format_real(Z));
            }
            std::cout << rows.dump(2) << "\n";
        } else if (*chain_cmd) {
            auto w = chain_win.build();
            const double direct = s1_sharp_pm_direct(w, Sandwich::minus);
            const double exact = s1_sharp_minus_chain(w, ChainVariant::exact, threads);
            const double published = s1_sharp_minus_chain(w, ChainVariant::as_published, threads);
            json out = window_json(w);
            out.update(json{{"chain_indices", enumerate_chain(w.n()).size()},
                            {"direct", direct},
                            {"chain_exact", exact},
                            {"chain_as_published", published},
                            {"rel_error_exact", rel(exact, direct)},
                            {"rel_error_as_published", rel(published, direct)}});
            std::cout << out.dump(2) << "\n";
            if (rel(exact, direct) > 1e-9) failures.add("verify-chain", "exact chain differs by " + format_real(rel(exact, direct)));
        } else if (*pois_cmd) {
            auto w = pois_win.build();
            std::vector<TParams> cases;
            for (int mu : {1, 2})
                for (int nu : {1, 2})
                    for (i64 a2 : {1, 3, 5}) cases.push_back({ChainIndex{}, mu, nu, a2});
            if (fuzz > 0) {
                auto chain = enumerate_chain(w.n());
                std::mt19937_64 rng(seed);
                for (int i = 0; i < fuzz;) {
                    TParams p{chain[rng() % chain.size()], 1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2),
                              1 + 2 * static_cast<i64>(rng() % 4)};
                    if (std::gcd(p.alpha2, 2 * p.chain.beta1) != 1) continue;
                    cases.push_back(p);
                    ++i;
                }
            }
            json rows = json::array();
            for (const auto& p : cases) {
                auto r = t_poisson(w, p, safety);
                const double d = t_direct(w, p);
                const double e = std::abs(r.total - d) / (std::abs(d) + 1e-30);
                rows.push_back({{"chain", p.chain.str()}, {"mu", p.mu}, {"nu", p.nu}, {"alpha2", p.alpha2},
                                {"t_direct", d}, {"t_poisson", r.total}, {"T00", r.t00}, {"T01", r.t01}, {"T10", r.t10},
                                {"T11", r.t11}, {"W", r.W}, {"L", r.L}, {"rel_error", e}});
                if (e > 1e-6) failures.add("verify-poisson", p.chain.str() + " mu=" + std::to_string(p.mu) + " nu=" +
                                                                 std::to_string(p.nu) + " alpha2=" + std::to_string(p.alpha2) +
                                                                 " rel error " + format_real(e));
            }
            std::cout << rows.dump(2) << "\n";
        } else if (*sweep_cmd) {
            cfg.n_list = sweep_n;
            if (!n_list_path.empty()) {
                auto extra = read_n_list(n_list_path);
                cfg.n_list.insert(cfg.n_list.end(), extra.begin(), extra.end());
            }
            cfg.y_policy = y_policy == "fixed" ? YPolicy::fixed : YPolicy::M_over_log3;
            cfg.Y_fixed = fixed_Y;
            cfg.format = format == "jsonl" ? ReportFormat::jsonl : ReportFormat::csv;
            cfg.threads = threads;
            cfg.seed = seed;
            cfg.record_timing = !no_timing;
            auto records = run_sweep(cfg);
            if (cfg.output_path.empty())
                std::cout << render_report(records, cfg.format);
            else
                emit_report(records, cfg);
            for (const auto& r : records) {
                if (!r.error.empty())
                    failures.add("sweep", "n = " + std::to_string(r.n) + ": " + r.error);
                else if (!(std::isfinite(r.ratio) && r.ratio > 0))
                    failures.add("sweep", "n = " + std::to_string(r.n) + ": ratio not finite and positive");
            }
        } else if (*self_cmd) {
            SelftestOptions opts;
            opts.threads = threads;
            opts.seed = seed;
            for (const auto& r : run_selftest(opts)) {
                std::printf("%s criterion %2d  %-32s %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                            r.detail.c_str(), r.seconds);
                std::fflush(stdout);
                if (!r.passed) failures.add("criterion " + std::to_string(r.id), r.detail);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"status", "error"}, {"error", e.what()}}.dump() << "\n";
        return 2;
    }
    if (!failures.empty()) {
        std::cerr << json{{"status", "failed"}, {"failures", failures.items}}.dump() << "\n";
        return 1;
    }
    return 0;
}
