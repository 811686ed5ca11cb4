#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pythag/errors.hpp"

namespace pythag {

/// Arbitrary-precision integer and rational used for exact arithmetic.
using BigInt = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Render an exact rational as "num/den" (denominator always printed).
inline std::string to_fraction_string(const ExactRational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

struct PrimePower {
    u64 prime;
    int exponent;
    bool operator==(const PrimePower&) const = default;
};

/// Prime-power decomposition of a positive integer, primes ascending.
struct Factorization {
    u64 value = 1;
    std::vector<PrimePower> factors;

    /// Product of prime^exponent; equals value for a well-formed factorization.
    u64 recompose() const {
        u64 r = 1;
        for (const auto& pp : factors)
            for (int i = 0; i < pp.exponent; ++i) r *= pp.prime;
        return r;
    }

    bool squarefree() const {
        return std::all_of(factors.begin(), factors.end(),
                           [](const PrimePower& pp) { return pp.exponent == 1; });
    }
};

/// Floor of the square root, exact for every 64-bit input.
inline u64 isqrt(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// True when n is a perfect square; the root is written to *root if given.
inline bool is_square(u64 n, u64* root = nullptr) {
    u64 r = isqrt(n);
    if (root) *root = r;
    return r * r == n;
}

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin for all 64-bit integers.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Pollard rho with Brent cycle detection; returns a nontrivial factor of composite n.
inline u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        constexpr u64 m = 128;
        while (g == 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            while (k < r && g == 1) {
                ys = y;
                u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            }
            r <<= 1;
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void trial_divide(u64& n, u64 limit, std::vector<PrimePower>& out) {
    auto take = [&](u64 p) {
        if (n % p) return;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    };
    take(2);
    take(3);
    for (u64 p = 5; p <= limit && p * p <= n; p += 6) {
        take(p);
        take(p + 2);
    }
}

inline void split_large(u64 n, std::vector<u64>& primes) {
    if (n == 1) return;
    if (n < 1000000) {
        std::vector<PrimePower> pp;
        trial_divide(n, 1000, pp);
        for (auto& f : pp)
            for (int i = 0; i < f.exponent; ++i) primes.push_back(f.prime);
        if (n > 1) primes.push_back(n);
        return;
    }
    if (is_prime_u64(n)) {
        primes.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    split_large(d, primes);
    split_large(n / d, primes);
}

} // namespace detail

/// Prime factorization of 1 <= n <= 2^63.
///
/// Values below 10^6 are handled by trial division alone; larger cofactors left
/// after removing primes below 1000 are split by Pollard-Brent and certified by
/// deterministic Miller-Rabin.
inline Factorization factorize(u64 n) {
    if (n == 0) throw Error("factorize: argument must be positive");
    Factorization f;
    f.value = n;
    u64 rest = n;
    detail::trial_divide(rest, 1000, f.factors);
    if (rest > 1) {
        std::vector<u64> primes;
        detail::split_large(rest, primes);
        std::sort(primes.begin(), primes.end());
        for (u64 p : primes) {
            if (!f.factors.empty() && f.factors.back().prime == p)
                ++f.factors.back().exponent;
            else
                f.factors.push_back({p, 1});
        }
    }
    return f;
}

/// All positive divisors of a factored integer, ascending.
inline std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> d{1};
    for (const auto& pp : f.factors) {
        std::size_t base = d.size();
        u64 pk = 1;
        for (int e = 1; e <= pp.exponent; ++e) {
            pk *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

inline std::vector<u64> divisors(u64 n) { return divisors(factorize(n)); }

/// Mobius, Euler phi, divisor count and sigma_{-1} of one integer.
struct MultFuncs {
    int mu;
    u64 phi;
    u64 tau;
    ExactRational sigma_minus1;
};

inline int mobius(const Factorization& f) {
    if (!f.squarefree()) return 0;
    return (f.factors.size() % 2 == 0) ? 1 : -1;
}

inline int mobius(u64 n) { return mobius(factorize(n)); }

inline u64 euler_phi(const Factorization& f) {
    u64 r = 1;
    for (const auto& pp : f.factors) {
        r *= pp.prime - 1;
        for (int e = 1; e < pp.exponent; ++e) r *= pp.prime;
    }
    return r;
}

inline u64 euler_phi(u64 n) { return euler_phi(factorize(n)); }

inline u64 divisor_count(const Factorization& f) {
    u64 r = 1;
    for (const auto& pp : f.factors) r *= static_cast<u64>(pp.exponent + 1);
    return r;
}

inline u64 divisor_count(u64 n) { return divisor_count(factorize(n)); }

inline MultFuncs mult_funcs(u64 n) {
    Factorization f = factorize(n);
    // sigma_{-1}(n) = prod over p^e || n of (1 + 1/p + ... + 1/p^e).
    ExactRational s = 1;
    for (const auto& pp : f.factors) {
        BigInt num = 0, pk = 1;
        for (int e = 0; e <= pp.exponent; ++e) {
            num += pk;
            if (e < pp.exponent) pk *= pp.prime;
        }
        s *= ExactRational(num, pk);
    }
    return {mobius(f), euler_phi(f), divisor_count(f), s};
}

/// Inverse of a modulo m in [0, m); returns 0 for m = 1.
inline u64 mod_inverse(i64 a, u64 m) {
    if (m == 0) throw Error("mod_inverse: modulus must be positive");
    if (m == 1) return 0;
    i128 mm = static_cast<i128>(m);
    i128 r0 = static_cast<i128>(a) % mm;
    if (r0 < 0) r0 += mm;
    i128 r1 = mm, s0 = 1, s1 = 0;
    // Invariant: r_i = s_i * a (mod m).
    while (r1 != 0) {
        i128 q = r0 / r1;
        i128 t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1)
        throw NotInvertible("mod_inverse: gcd(" + std::to_string(a) + ", " + std::to_string(m) +
                            ") > 1");
    i128 x = s0 % mm;
    if (x < 0) x += mm;
    return static_cast<u64>(x);
}

/// Non-negative residue of a modulo m.
inline u64 mod_floor(i64 a, u64 m) {
    i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<u64>(r);
}

/// Product that throws Overflow instead of wrapping.
inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow("integer product exceeds 64 bits");
    return r;
}

} // namespace pythag
