#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pythag/arith.hpp"
#include "pythag/errors.hpp"
#include "pythag/parallel.hpp"
#include "pythag/quadrature.hpp"
#include "pythag/weights.hpp"

namespace pythag {

/// One solution of x1^2 + x2^2 - x3^2 = n^2.
struct Triple {
    i64 x1, x2, x3;
    bool operator==(const Triple&) const = default;
};

using TwoSquareRep = std::pair<i64, i64>;

/// All signed (x1, x2) with x1^2 + x2^2 = N, by a two-pointer scan up to sqrt(N).
inline std::vector<TwoSquareRep> two_square_reps_loop(u64 N) {
    std::vector<TwoSquareRep> out;
    u64 y = isqrt(N);
    for (u64 x = 0; x <= y; ++x) {
        u64 rest = N - x * x;
        while (y * y > rest) --y;
        if (y * y != rest || x > y) continue;
        const i64 a = static_cast<i64>(x), b = static_cast<i64>(y);
        for (auto [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
            for (int su : {1, -1}) {
                if (u == 0 && su == -1) continue;
                for (int sv : {1, -1}) {
                    if (v == 0 && sv == -1) continue;
                    out.emplace_back(su * u, sv * v);
                }
            }
            if (a == b) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace detail {

struct Gaussian {
    i128 re, im;
};

inline Gaussian gmul(Gaussian a, Gaussian b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

/// For a prime p = 1 mod 4, the (a, b) with a^2 + b^2 = p, a > b > 0 (Hermite-Serret).
inline std::pair<u64, u64> prime_two_squares(u64 p) {
    u64 x = 0;
    for (u64 c = 2;; ++c) {
        if (powmod(c, (p - 1) / 2, p) == p - 1) {
            x = powmod(c, (p - 1) / 4, p);
            break;
        }
    }
    u64 a = p, b = x;
    const u64 limit = isqrt(p);
    while (b > limit) {
        u64 r = a % b;
        a = b;
        b = r;
    }
    u64 other = isqrt(p - b * b);
    return {std::max(b, other), std::min(b, other)};
}

} // namespace detail

/// Number of signed representations r2(N) from the prime factorization of N > 0.
inline u64 r2_count(const Factorization& f) {
    u64 r = 4;
    for (const auto& pp : f.factors) {
        if (pp.prime % 4 == 1)
            r *= static_cast<u64>(pp.exponent + 1);
        else if (pp.prime % 4 == 3 && pp.exponent % 2 == 1)
            return 0;
    }
    return r;
}

/// All signed (x1, x2) with x1^2 + x2^2 = N, built from Gaussian-integer factorization.
inline std::vector<TwoSquareRep> two_square_reps_factor(u64 N) {
    if (N == 0) return {{0, 0}};
    Factorization f = factorize(N);
    if (r2_count(f) == 0) return {};
    std::vector<detail::Gaussian> acc{{1, 0}};
    for (const auto& pp : f.factors) {
        std::vector<detail::Gaussian> next;
        if (pp.prime == 2) {
            for (auto z : acc) {
                for (int e = 0; e < pp.exponent; ++e) z = detail::gmul(z, {1, 1});
                next.push_back(z);
            }
        } else if (pp.prime % 4 == 3) {
            i128 scale = 1;
            for (int e = 0; e < pp.exponent / 2; ++e) scale *= pp.prime;
            for (auto z : acc) next.push_back({z.re * scale, z.im * scale});
        } else {
            auto [a, b] = detail::prime_two_squares(pp.prime);
            detail::Gaussian pi{static_cast<i128>(a), static_cast<i128>(b)};
            detail::Gaussian pibar{static_cast<i128>(a), -static_cast<i128>(b)};
            for (int k = 0; k <= pp.exponent; ++k) {
                detail::Gaussian factor{1, 0};
                for (int i = 0; i < k; ++i) factor = detail::gmul(factor, pi);
                for (int i = k; i < pp.exponent; ++i) factor = detail::gmul(factor, pibar);
                for (auto z : acc) next.push_back(detail::gmul(z, factor));
            }
        }
        acc = std::move(next);
    }
    std::vector<TwoSquareRep> out;
    out.reserve(4 * acc.size());
    for (auto z : acc) {
        detail::Gaussian u = z;
        for (int k = 0; k < 4; ++k) {
            out.emplace_back(static_cast<i64>(u.re), static_cast<i64>(u.im));
            u = {-u.im, u.re};
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Default representation routine: the factorization-based one.
inline std::vector<TwoSquareRep> two_square_reps(u64 N) { return two_square_reps_factor(N); }

namespace detail {

/// Even integers in the closed window [lo, hi].
inline std::vector<i64> even_in_window(double lo, double hi) {
    std::vector<i64> xs;
    i64 first = static_cast<i64>(std::ceil(lo));
    if (first % 2) ++first;
    for (i64 x3 = first; static_cast<double>(x3) <= hi; x3 += 2) xs.push_back(x3);
    return xs;
}

inline u64 checked_norm(i64 n, i64 x3) {
    const u64 limit = (u64{1} << 63) - 1;
    u128 N = static_cast<u128>(n) * n + static_cast<u128>(x3) * x3;
    if (N > limit) throw Overflow("n^2 + x3^2 exceeds 2^63 at x3 = " + std::to_string(x3));
    return static_cast<u64>(N);
}

/// Sum fn(x3) over even x3 in [lo, hi], split into fixed chunks of
/// consecutive x3 so that the reduction order is independent of `threads`.
template <typename F>
double sum_over_x3(unsigned threads, F&& fn, double lo, double hi) {
    std::vector<i64> xs = even_in_window(lo, hi);
    constexpr std::size_t chunk = 256;
    std::size_t tasks = (xs.size() + chunk - 1) / chunk;
    auto partial = parallel_map(tasks, threads, [&](std::size_t t) {
        KahanSum<double> s;
        for (std::size_t i = t * chunk; i < std::min(xs.size(), (t + 1) * chunk); ++i) s += fn(xs[i]);
        return s.value();
    });
    KahanSum<double> total;
    for (double p : partial) total += p;
    return total.value();
}

template <bool OddX2Only>
double smoothed_sum_impl(const WeightSystem& w, unsigned threads, double lo, double hi) {
    const i64 n = w.n();
    return sum_over_x3(
        threads,
        [&](i64 x3) {
            double p3 = w.phi3(static_cast<double>(x3));
            if (p3 == 0.0) return 0.0;
            u64 N = checked_norm(n, x3);
            KahanSum<double> s;
            for (auto [x1, x2] : two_square_reps(N)) {
                if (OddX2Only && (x2 % 2 == 0)) continue;
                double p = w.phi1(static_cast<double>(x1));
                if (p == 0.0) continue;
                s += p * w.phi1(static_cast<double>(x2)) * p3;
            }
            return s.value();
        },
        lo, hi);
}

} // namespace detail

/// S: sum over x1^2 + x2^2 - x3^2 = n^2 with 2 | x3 of phi1(x1) phi2(x2) phi3(x3).
///
/// The x3 scan window defaults to the phi3 support; widening it must not change the value.
inline double smoothed_sum_S(const WeightSystem& w, unsigned threads = 1) {
    return detail::smoothed_sum_impl<false>(w, threads, w.M(), 2.0 * w.M());
}

/// S with an explicit x3 scan window [lo, hi] (used to test window completeness).
inline double smoothed_sum_S_window(const WeightSystem& w, double lo, double hi, unsigned threads = 1) {
    return detail::smoothed_sum_impl<false>(w, threads, lo, hi);
}

/// S1: the same sum restricted to x2 odd (x1 is then even).
inline double smoothed_sum_S1(const WeightSystem& w, unsigned threads = 1) {
    return detail::smoothed_sum_impl<true>(w, threads, w.M(), 2.0 * w.M());
}

/// Explicit solution list inside the x3 window and the weight supports.
struct SolutionSet {
    long long n;
    std::pair<double, double> window;
    std::vector<Triple> triples;
};

inline SolutionSet enumerate_solutions(const WeightSystem& w) {
    SolutionSet set{w.n(), {w.M(), 2.0 * w.M()}, {}};
    for (i64 x3 : detail::even_in_window(w.M(), 2.0 * w.M())) {
        if (w.phi3(static_cast<double>(x3)) == 0.0) continue;
        for (auto [x1, x2] : two_square_reps(detail::checked_norm(w.n(), x3))) {
            if (w.phi1(static_cast<double>(x1)) > 0.0 && w.phi1(static_cast<double>(x2)) > 0.0)
                set.triples.push_back({x1, x2, x3});
        }
    }
    return set;
}

/// S1 split according to a1 = (a, n-2c) versus a2 = (a, n+2c).
struct SharpFlatSums {
    double sharp = 0;       ///< indicator a1 > a2
    double flat = 0;        ///< indicator a2 >= a1
    double sharp_minus = 0; ///< phi_minus(a1/a2)
    double sharp_plus = 0;  ///< phi_plus(a1/a2)
    double flat_minus = 0;  ///< phi_minus(a2/a1)
    double flat_plus = 0;   ///< phi_plus(a2/a1)
};

/// Evaluate the sharp/flat pieces of S1 directly from the (c, a) parameterization:
/// x1 = 2c, a = x2 + x3 runs over odd divisors of (n-2c)(n+2c), b = N/a = x2 - x3.
inline SharpFlatSums s1_split_direct(const WeightSystem& w) {
    const i64 n = w.n();
    KahanSum<double> sharp, flat, sm, sp, fm, fp;
    for (i64 c = 1; static_cast<double>(2 * c) < 2.0 * w.X(); ++c) {
        double p1 = w.phi1(static_cast<double>(2 * c));
        if (p1 == 0.0) continue;
        const i64 lo = n - 2 * c, hi = n + 2 * c;
        const i64 N = checked_mul(lo, hi);
        for (u64 au : divisors(static_cast<u64>(std::llabs(N)))) {
            if (au % 2 == 0) continue;
            const i64 a = static_cast<i64>(au);
            const i64 b = N / a;
            // a and b are odd with ab = n^2 - 4c^2 = 1 mod 4, so x3 = (a-b)/2 is even.
            const double x2 = static_cast<double>((a + b) / 2);
            const double x3 = static_cast<double>((a - b) / 2);
            double wt = p1 * w.phi1(x2) * w.phi3(x3);
            if (wt == 0.0) continue;
            const u64 a1 = std::gcd(au, static_cast<u64>(std::llabs(lo)));
            const u64 a2 = std::gcd(au, static_cast<u64>(std::llabs(hi)));
            const double r = static_cast<double>(a1) / static_cast<double>(a2);
            if (a1 > a2)
                sharp += wt;
            else
                flat += wt;
            sm += wt * WeightSystem::phi_minus(r);
            sp += wt * WeightSystem::phi_plus(r);
            fm += wt * WeightSystem::phi_minus(1.0 / r);
            fp += wt * WeightSystem::phi_plus(1.0 / r);
        }
    }
    return {sharp.value(), flat.value(), sm.value(), sp.value(), fm.value(), fp.value()};
}

enum class Sandwich { minus, plus };

/// S1^{sharp,-} or S1^{sharp,+} from the direct parameterization.
inline double s1_sharp_pm_direct(const WeightSystem& w, Sandwich sign) {
    auto s = s1_split_direct(w);
    return sign == Sandwich::minus ? s.sharp_minus : s.sharp_plus;
}

/// S1^{flat,-} or S1^{flat,+} from the direct parameterization.
inline double s1_flat_pm_direct(const WeightSystem& w, Sandwich sign) {
    auto s = s1_split_direct(w);
    return sign == Sandwich::minus ? s.flat_minus : s.flat_plus;
}

/// Theorem-normalized count: sum over even x3 of phi3(x3) r2(n^2 + x3^2), all signs.
inline double all_signs_count(const WeightSystem& w, unsigned threads = 1) {
    const i64 n = w.n();
    return detail::sum_over_x3(
        threads,
        [&](i64 x3) {
            double p3 = w.phi3(static_cast<double>(x3));
            if (p3 == 0.0) return 0.0;
            u64 N = detail::checked_norm(n, x3);
            return static_cast<double>(r2_count(factorize(N))) * p3;
        },
        w.M(), 2.0 * w.M());
}

} // namespace pythag
