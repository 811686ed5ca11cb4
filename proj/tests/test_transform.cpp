#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pythag/transform.hpp"

using namespace pythag;

namespace {

double rel(double a, double b) { return std::abs(a - b) / (std::abs(b) + 1e-30); }

const ChainIndex* find_index(const std::vector<ChainIndex>& chain, i64 e, i64 g, i64 beta1, i64 m1) {
    for (const auto& c : chain)
        if (c.e == e && c.g == g && c.beta1 == beta1 && c.m1 == m1) return &c;
    return nullptr;
}

} // namespace

TEST(Chain, SmallCases) {
    auto one = enumerate_chain(1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], ChainIndex{});
    for (const auto& c : enumerate_chain(7)) {
        EXPECT_TRUE(c.e == 1 || c.e == 7);
        if (c.e == 7) {
            EXPECT_TRUE(c.g == 1 || c.g == 7);
            EXPECT_EQ(c.v1 * c.v2 * c.m1 * c.m2, 1);
        }
    }
    EXPECT_THROW(enumerate_chain(4), BadParams);
}

TEST(Chain, CountMatchesBruteForceFilter) {
    for (i64 n : {1, 3, 7, 9, 15, 45, 105}) {
        auto chain = enumerate_chain(n);
        EXPECT_EQ(chain.size(), oracle::chain_count(n)) << n;
        std::set<ChainIndex> unique(chain.begin(), chain.end());
        EXPECT_EQ(unique.size(), chain.size());
        for (const auto& c : chain) {
            EXPECT_TRUE(chain_index_valid(n, c)) << c.str();
            auto k = abcde(n, c);
            EXPECT_EQ(k.E * c.m1 * c.m2 * c.v1 * c.v2 * c.s * c.e, 2 * n);
        }
    }
    EXPECT_EQ(enumerate_chain(15).size(), 49u);
    EXPECT_EQ(enumerate_chain(105).size(), 343u);
}

TEST(Chain, ConstantsAndValidation) {
    ChainIndex bad{2, 1, 1, 1, 1, 1, 1, 1, 1};
    EXPECT_FALSE(chain_index_valid(15, bad));
    EXPECT_THROW(abcde(15, ChainIndex{7, 1, 1, 1, 1, 1, 1, 1, 1}), BadParams);
    auto k = abcde(105, ChainIndex{});
    EXPECT_EQ(k.A, 1);
    EXPECT_EQ(k.E, 210);
    TParams p;
    p.alpha2 = 2;
    EXPECT_THROW(validate_tparams(15, p), BadParams);
    p.alpha2 = 3;
    p.mu = 3;
    EXPECT_THROW(validate_tparams(15, p), BadParams);
}

TEST(Chain, EqualsDirectSharpMinus) {
    struct Case {
        long long n;
        double M, Y;
    };
    for (auto c : {Case{9, 4, 2}, Case{15, 8, 4}, Case{105, 32, 8}, Case{1, 1, 1}, Case{45, 20, 5}}) {
        auto w = build_weight_system(c.n, c.M, c.Y);
        const double direct = s1_sharp_pm_direct(w, Sandwich::minus);
        EXPECT_LE(rel(s1_sharp_minus_chain(w), direct), 1e-9) << c.n;
        EXPECT_LE(rel(s1_sharp_chain(w, ChainVariant::exact, Sandwich::plus, 2),
                      s1_sharp_pm_direct(w, Sandwich::plus)),
                  1e-9)
            << c.n;
    }
}

TEST(Chain, PublishedVariantOvercountsAt105) {
    auto w = build_weight_system(105, 32, 8);
    EXPECT_NEAR(s1_sharp_minus_chain(w, ChainVariant::exact), 2.91274363877368, 1e-9);
    EXPECT_NEAR(s1_sharp_minus_chain(w, ChainVariant::as_published), 2.63629059214412, 1e-9);
    auto v = build_weight_system(15, 8, 4);
    EXPECT_NEAR(s1_sharp_minus_chain(v, ChainVariant::as_published), 0.716531310573789, 1e-12);
}

TEST(TDirect, MatchesBoxOracleAndGolden) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    EXPECT_NEAR(t_direct(w, p), 9.653359130662, 1e-9);
    for (int mu : {1, 2})
        for (int nu : {1, 2})
            for (i64 a2 : {1, 3, 5}) {
                TParams q{ChainIndex{}, mu, nu, a2};
                EXPECT_NEAR(t_direct(w, q), oracle::t_box(w, q), 1e-12 * (1 + oracle::t_box(w, q)));
            }
    auto w105 = build_weight_system(105, 32, 8);
    auto chain = enumerate_chain(105);
    for (std::size_t i = 0; i < chain.size(); i += 7) {
        TParams q{chain[i], 1, 2, 1};
        EXPECT_NEAR(t_direct(w105, q), oracle::t_box(w105, q), 1e-12 * (1 + std::abs(oracle::t_box(w105, q))));
    }
}

TEST(TDirect, EmptySupportIsZero) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    p.alpha2 = 101; // alpha2 B exceeds 2X + 2M for every x >= 1
    EXPECT_EQ(t_direct(w, p), 0.0);
}

TEST(TDirect, SignedSumReproducesChainBlock) {
    for (auto [n, M, Y] : {std::tuple{15LL, 8.0, 4.0}, std::tuple{105LL, 32.0, 8.0}}) {
        auto w = build_weight_system(n, M, Y);
        int nonzero = 0;
        for (const auto& c : enumerate_chain(n))
            for (i64 a2 = 1; a2 <= 7; a2 += 2) {
                if (std::gcd(a2, 2 * c.beta1) != 1) continue;
                double T = 0;
                for (int mu : {1, 2})
                    for (int nu : {1, 2}) T += ((mu + nu) % 2 ? -1.0 : 1.0) * t_direct(w, TParams{c, mu, nu, a2});
                const double block = chain_block(w, c, a2, ChainVariant::as_published);
                ASSERT_NEAR(T, block, 1e-12 * (1 + std::abs(block))) << c.str() << " alpha2 = " << a2;
                if (block != 0.0) ++nonzero;
            }
        EXPECT_GT(nonzero, 0);
    }
}

TEST(Poisson, MatchesDirectAtSafety10) {
    auto w = build_weight_system(15, 8, 4);
    for (int mu : {1, 2})
        for (int nu : {1, 2})
            for (i64 a2 : {1, 3, 5}) {
                TParams p{ChainIndex{}, mu, nu, a2};
                auto r = t_poisson(w, p, 10.0);
                const double direct = t_direct(w, p);
                EXPECT_LE(rel(r.total, direct), 1e-6) << mu << nu << a2;
                // Partition bookkeeping: the four (w, l) blocks add up to the full series.
                EXPECT_NEAR(r.t00 + r.t01 + r.t10 + r.t11, r.total, 1e-12 * (1 + std::abs(r.total)));
                EXPECT_NEAR(r.total_direct_kernel, r.total, 1e-9 * (1 + std::abs(r.total)));
                EXPECT_LE(std::abs(r.imag_residual), 1e-9 * (1 + std::abs(r.total)));
                EXPECT_LE(r.ramanujan_mismatch, 1e-9);
            }
}

TEST(Poisson, ModulusOneIsPlainPoisson) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    auto r = t_poisson(w, p, 10.0);
    EXPECT_EQ(r.ramanujan_mismatch, 0.0);
    EXPECT_LE(rel(r.total, t_direct(w, p)), 1e-6);
}

TEST(Poisson, DoublingSafetyIsStable) {
    auto w = build_weight_system(15, 8, 4);
    for (i64 a2 : {1, 3, 5}) {
        TParams p{ChainIndex{}, 1, 1, a2};
        const double a = t_poisson(w, p, 10.0).total, b = t_poisson(w, p, 20.0).total;
        EXPECT_LE(rel(b, a), 1e-8) << a2;
    }
    EXPECT_THROW(t_poisson(w, TParams{}, 0.5), BadParams);
}

TEST(Poisson, NontrivialChainIndex) {
    auto w = build_weight_system(15, 8, 4);
    auto chain = enumerate_chain(15);
    const ChainIndex* c = find_index(chain, 3, 3, 1, 1);
    ASSERT_NE(c, nullptr);
    for (int mu : {1, 2}) {
        TParams p{*c, mu, 1, 1};
        const double direct = t_direct(w, p);
        EXPECT_LE(rel(t_poisson(w, p, 10.0).total, direct), 1e-6);
    }
}

TEST(FourierIntegral, TrivialBound) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    const double i00 = fourier_integral_I(w, p, 0, 0).real_part;
    EXPECT_GT(i00, 0.0);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> d(-5, 5);
    for (int i = 0; i < 20; ++i) {
        const i64 a = d(rng), b = d(rng);
        auto v = fourier_integral_I(w, p, a, b);
        EXPECT_LE(std::hypot(v.real_part, v.imag_part), i00 * (1 + 1e-12)) << a << "," << b;
    }
}

TEST(FourierIntegral, NegligibleBeyondCutoff) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    const double i00 = fourier_integral_I(w, p, 0, 0).real_part;
    const i64 W = poisson_cutoffs(w, p, 10.0).first; // ten times the n^eps-cutoff, n^eps = 32
    for (auto [a, b] : {std::pair<i64, i64>{W + 1, 0}, {-(W + 1), 0}, {W + 1, 3}}) {
        auto v = fourier_integral_I(w, p, a, b);
        EXPECT_LT(std::hypot(v.real_part, v.imag_part), 1e-8 * i00) << a << "," << b;
    }
}

TEST(Jacobian, XYEqualsSigmaTau) {
    auto w15 = build_weight_system(15, 8, 4);
    auto w105 = build_weight_system(105, 32, 8);
    auto chain = enumerate_chain(105);
    std::vector<std::pair<const WeightSystem*, TParams>> pts = {
        {&w15, TParams{}}, {&w15, TParams{ChainIndex{}, 2, 1, 1}}, {&w15, TParams{ChainIndex{}, 1, 2, 3}}};
    pts.push_back({&w105, TParams{*find_index(chain, 3, 3, 3, 1), 1, 1, 1}});
    pts.push_back({&w105, TParams{*find_index(chain, 1, 1, 1, 5), 1, 1, 1}});
    for (const auto& [w, p] : pts) {
        const double xy = fourier_integral_I(*w, p, 0, 0).real_part;
        const double st = i00_sigma_tau(*w, p);
        EXPECT_GT(xy, 0.0) << p.chain.str();
        EXPECT_LE(rel(xy, st), 1e-8) << p.chain.str();
    }
}

TEST(Jacobian, RootSelectionBackSubstitutes) {
    // Points satisfy sigma^2 < n^2 + tau^2 so the square root in the back substitution is real.
    auto w = build_weight_system(15, 8, 4);
    for (const TParams& p : {TParams{}, TParams{ChainIndex{}, 2, 2, 3}})
        for (double sigma : {3.0, 10.0, 14.0})
            for (double tau : {9.0, 12.5, 15.0}) EXPECT_LT(ysol_residual(w, p, sigma, tau), 1e-9);
}

TEST(I00, RatioReportedNotAsserted) {
    auto w = build_weight_system(15, 8, 4);
    TParams p;
    auto chk = i00_identity_check(w, p);
    EXPECT_TRUE(std::isfinite(chk.ratio));
    EXPECT_GT(chk.ratio, 0.0);
    EXPECT_NEAR(chk.rhs_main, 2 * M_PI * canonical_phi_hat0() * 8 / g_constant(p), 1e-12);
    TParams q = p;
    q.mu = 2; // doubles G
    EXPECT_NEAR(i00_identity_check(w, q).rhs_main, 0.5 * chk.rhs_main, 1e-12);
    // The ratio drifts towards 1/4 as Y/M shrinks and stays bounded.
    double prev = 0;
    for (double Y : {4.0, 2.0, 1.0}) {
        double r = i00_identity_check(build_weight_system(15, 8, Y), p).ratio;
        EXPECT_GT(r, prev);
        EXPECT_LT(r, 0.25);
        prev = r;
    }
    EXPECT_GT(prev, 0.23);
}
