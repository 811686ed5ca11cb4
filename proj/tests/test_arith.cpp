#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pythag/arith.hpp"

using namespace pythag;

TEST(Factorize, SmallExamples) {
    EXPECT_TRUE(factorize(1).factors.empty());
    auto f12 = factorize(12);
    ASSERT_EQ(f12.factors.size(), 2u);
    EXPECT_EQ(f12.factors[0], (PrimePower{2, 2}));
    EXPECT_EQ(f12.factors[1], (PrimePower{3, 1}));
    auto p = factorize(104729);
    ASSERT_EQ(p.factors.size(), 1u);
    EXPECT_EQ(p.factors[0], (PrimePower{104729, 1}));
    EXPECT_TRUE(oracle::is_prime(104729));
}

TEST(Factorize, MatchesTrialDivision) {
    for (u64 n = 1; n <= 20000; ++n) {
        auto f = factorize(n);
        auto o = oracle::factor(n);
        ASSERT_EQ(f.factors.size(), o.size()) << n;
        for (std::size_t i = 0; i < o.size(); ++i) {
            EXPECT_EQ(f.factors[i].prime, o[i].first) << n;
            EXPECT_EQ(f.factors[i].exponent, o[i].second) << n;
        }
    }
}

TEST(Factorize, RoundTripUpToOneMillion) {
    for (u64 n = 1; n <= 1000000; ++n) ASSERT_EQ(factorize(n).recompose(), n) << n;
}

TEST(Factorize, RoundTripRandom60Bit) {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 1000; ++i) {
        u64 n = (rng() >> 4) | 1ULL << 59;
        auto f = factorize(n);
        ASSERT_EQ(f.recompose(), n) << n;
        u64 last = 0;
        for (const auto& pp : f.factors) {
            EXPECT_GT(pp.prime, last);
            EXPECT_GE(pp.exponent, 1);
            EXPECT_TRUE(detail::is_prime_u64(pp.prime)) << pp.prime;
            last = pp.prime;
        }
    }
}

TEST(Factorize, HardSemiprimesAndPrimePowers) {
    const u64 p = 4294967291ULL, q = 4294967279ULL; // primes just below 2^32
    auto f = factorize(p * q);
    ASSERT_EQ(f.factors.size(), 2u);
    EXPECT_EQ(f.factors[0].prime, q);
    EXPECT_EQ(f.factors[1].prime, p);
    auto g = factorize(1000003ULL * 1000003ULL * 1000003ULL);
    ASSERT_EQ(g.factors.size(), 1u);
    EXPECT_EQ(g.factors[0], (PrimePower{1000003, 3}));
    EXPECT_EQ(factorize((1ULL << 63)).factors[0], (PrimePower{2, 63}));
}

TEST(Divisors, Examples) {
    EXPECT_EQ(divisors(1), std::vector<u64>{1});
    EXPECT_EQ(divisors(12), (std::vector<u64>{1, 2, 3, 4, 6, 12}));
    EXPECT_EQ(divisors(101), (std::vector<u64>{1, 101}));
    for (u64 n = 1; n <= 3000; ++n) ASSERT_EQ(divisors(n), oracle::divisors(n)) << n;
}

TEST(MultFuncs, Examples) {
    auto one = mult_funcs(1);
    EXPECT_EQ(one.mu, 1);
    EXPECT_EQ(one.phi, 1u);
    EXPECT_EQ(one.tau, 1u);
    EXPECT_EQ(one.sigma_minus1, ExactRational(1));
    auto m12 = mult_funcs(12);
    EXPECT_EQ(m12.mu, 0);
    EXPECT_EQ(m12.phi, 4u);
    EXPECT_EQ(m12.tau, 6u);
    EXPECT_EQ(m12.sigma_minus1, ExactRational(7, 3));
    auto m30 = mult_funcs(30);
    EXPECT_EQ(m30.mu, -1);
    EXPECT_EQ(m30.phi, 8u);
    EXPECT_EQ(m30.tau, 8u);
    EXPECT_EQ(m30.sigma_minus1, ExactRational(12, 5));
}

TEST(MultFuncs, MatchOracles) {
    for (u64 n = 1; n <= 2000; ++n) {
        auto m = mult_funcs(n);
        ASSERT_EQ(m.mu, oracle::mobius(n)) << n;
        ASSERT_EQ(m.phi, oracle::phi(n)) << n;
        ASSERT_EQ(m.tau, oracle::divisors(n).size()) << n;
        ASSERT_EQ(m.sigma_minus1, oracle::sigma_minus1(n)) << n;
    }
}

TEST(MultFuncs, DivisorSumIdentities) {
    for (u64 n = 1; n <= 10000; ++n) {
        long mu_sum = 0;
        u64 phi_sum = 0;
        for (u64 d : divisors(n)) {
            mu_sum += mobius(d);
            phi_sum += euler_phi(d);
        }
        ASSERT_EQ(mu_sum, n == 1 ? 1 : 0) << n;
        ASSERT_EQ(phi_sum, n) << n;
    }
}

TEST(MultFuncs, Multiplicative) {
    for (u64 m = 1; m <= 200; ++m)
        for (u64 n = 1; n <= 200; ++n) {
            if (std::gcd(m, n) != 1) continue;
            auto a = mult_funcs(m), b = mult_funcs(n), ab = mult_funcs(m * n);
            ASSERT_EQ(ab.mu, a.mu * b.mu);
            ASSERT_EQ(ab.phi, a.phi * b.phi);
            ASSERT_EQ(ab.tau, a.tau * b.tau);
            ASSERT_EQ(ab.sigma_minus1, a.sigma_minus1 * b.sigma_minus1);
        }
}

TEST(ModInverse, Examples) {
    EXPECT_EQ(mod_inverse(3, 7), 5u);
    for (u64 m = 2; m <= 50; ++m) EXPECT_EQ(mod_inverse(1, m), 1u);
    EXPECT_EQ(mod_inverse(5, 1), 0u);
    EXPECT_THROW(mod_inverse(2, 4), NotInvertible);
    EXPECT_EQ(mod_inverse(-3, 7), 2u); // -3 * 2 = -6 = 1 mod 7
}

TEST(ModInverse, ExhaustiveSmall) {
    for (u64 m = 2; m <= 300; ++m)
        for (i64 a = -300; a <= 300; ++a) {
            if (std::gcd(static_cast<u64>(std::llabs(a)), m) != 1) {
                EXPECT_THROW(mod_inverse(a, m), NotInvertible);
                continue;
            }
            u64 x = mod_inverse(a, m);
            ASSERT_LT(x, m);
            ASSERT_EQ(mod_floor(a * static_cast<i64>(x), m), 1u) << a << " mod " << m;
        }
}

TEST(Arith, SquareRootsAndOverflow) {
    for (u64 r : {0ULL, 1ULL, 2ULL, 3037000499ULL, 4294967295ULL}) {
        EXPECT_EQ(isqrt(r * r), r);
        EXPECT_TRUE(is_square(r * r));
        if (r > 1) {
            EXPECT_FALSE(is_square(r * r + 1));
        }
    }
    EXPECT_EQ(isqrt(~0ULL), 4294967295ULL);
    EXPECT_THROW(checked_mul(1LL << 40, 1LL << 40), Overflow);
    EXPECT_EQ(checked_mul(-7, 6), -42);
    EXPECT_EQ(to_fraction_string(ExactRational(6, 4)), "3/2");
    EXPECT_EQ(to_fraction_string(ExactRational(1)), "1/1");
}
