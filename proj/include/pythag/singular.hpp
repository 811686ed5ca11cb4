#pragma once

#include <cmath>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "pythag/arith.hpp"
#include "pythag/errors.hpp"
#include "pythag/quadrature.hpp"

namespace pythag {

/// Euler-Mascheroni constant to 30 significant digits.
inline constexpr long double euler_gamma = 0.577215664901532860606512090082L;
/// -zeta'(2)/zeta(2) = sum over all primes p of log p / (p^2 - 1), 30 significant digits.
inline constexpr long double log_prime_over_p2m1_all = 0.569960993094532806399864360020L;
inline constexpr long double pi_l = 3.14159265358979323846264338328L;

enum class SeriesMethod { general, squarefree_product };

/// P(n) as an exact rational together with the formula that produced it.
struct SingularSeries {
    u64 n;
    ExactRational value;
    SeriesMethod via;
};

/// P(n) from the nested (f, g) divisor sum.
///
/// P(n) = sum over f | n, g | n/f of 1/(fg) times, with h = n/(fg):
///   prod over p | h, p not | g of (1 - 2/p)
///   prod over p | g, p not | h of (1 - (p-1)/(p(p+1)))
///   prod over p | g, p | h     of (1 - 2/p - (p-1)/(p(p+1))).
inline SingularSeries singular_series(u64 n) {
    if (n == 0 || n % 2 == 0) throw EvenInput("singular_series: n must be odd, got " + std::to_string(n));
    Factorization fn = factorize(n);
    std::vector<u64> primes;
    for (const auto& pp : fn.factors) primes.push_back(pp.prime);
    ExactRational total = 0;
    for (u64 f : divisors(fn)) {
        for (u64 g : divisors(n / f)) {
            const u64 h = n / (f * g);
            ExactRational term(1, BigInt(f) * g);
            for (u64 p : primes) {
                const bool in_h = h % p == 0, in_g = g % p == 0;
                const BigInt P = p;
                if (in_h && !in_g)
                    term *= ExactRational(P - 2, P);
                else if (in_g && !in_h)
                    term *= 1 - ExactRational(P - 1, P * (P + 1));
                else if (in_g && in_h)
                    term *= 1 - ExactRational(2, P) - ExactRational(P - 1, P * (P + 1));
            }
            total += term;
        }
    }
    return {n, total, SeriesMethod::general};
}

/// P(n) = prod over p | n of (1 - (p-1)/(p^2 (p+1))) for odd square-free n.
inline SingularSeries singular_series_squarefree(u64 n) {
    if (n == 0 || n % 2 == 0) throw EvenInput("singular_series_squarefree: n must be odd, got " + std::to_string(n));
    Factorization fn = factorize(n);
    if (!fn.squarefree()) throw NotSquarefree("singular_series_squarefree: " + std::to_string(n) + " is not square-free");
    ExactRational value = 1;
    for (const auto& pp : fn.factors) {
        const BigInt P = pp.prime;
        value *= 1 - ExactRational(P - 1, P * P * (P + 1));
    }
    return {n, value, SeriesMethod::squarefree_product};
}

/// True when M lies in the window n^{7/8} <= M <= n where the theorem applies.
inline bool main_term_in_range(u64 n, double M) {
    return M >= std::pow(static_cast<double>(n), 0.875) && M <= static_cast<double>(n);
}

/// Main term (32/pi) P(n) log(n) M phi_hat0 for the all-signs count with 2 | x3.
///
/// A warning is written to `warn` when M is outside the theorem's range.
inline double main_term_predict(u64 n, double M, double phi_hat0, std::ostream* warn = nullptr) {
    if (warn && !main_term_in_range(n, M))
        *warn << "warning: M = " << M << " is outside [n^{7/8}, n] for n = " << n << "\n";
    double P = singular_series(n).value.convert_to<double>();
    return 32.0 / static_cast<double>(pi_l) * P * std::log(static_cast<double>(n)) * M * phi_hat0;
}

/// Comparison of the partial sum of phi(a beta2)/(a^2 beta2) with its asymptotic.
struct PerronCheck {
    u64 beta1;
    u64 beta2;
    double Z;
    double direct;
    double predicted;
    double error;
};

namespace detail {

inline std::vector<u64> distinct_primes(u64 n) {
    std::vector<u64> ps;
    for (const auto& pp : factorize(n).factors) ps.push_back(pp.prime);
    return ps;
}

} // namespace detail

/// Leading constant Pi(1) = (6/pi^2) prod over p | 2 beta1 beta2 of (1 + 1/p)^{-1}.
inline long double perron_pi_constant(u64 beta1, u64 beta2) {
    long double v = 6.0L / (pi_l * pi_l);
    for (u64 p : detail::distinct_primes(2 * beta1 * beta2)) v /= 1.0L + 1.0L / p;
    return v;
}

/// Sigma(1) = sum over p | 2 beta1 of log p/(p-1) + sum over p not | 2 beta1 beta2 of log p/(p^2-1).
///
/// The infinite prime sum is the closed-form constant -zeta'(2)/zeta(2) minus the
/// finitely many excluded primes.
inline long double perron_sigma_constant(u64 beta1, u64 beta2) {
    long double v = log_prime_over_p2m1_all;
    for (u64 p : detail::distinct_primes(2 * beta1)) v += std::log(static_cast<long double>(p)) / (p - 1);
    for (u64 p : detail::distinct_primes(2 * beta1 * beta2))
        v -= std::log(static_cast<long double>(p)) / (static_cast<long double>(p) * p - 1);
    return v;
}

/// Sum over alpha <= Z with (alpha, 2 beta1) = 1 of phi(alpha beta2)/(alpha^2 beta2),
/// compared with Pi(1) (Sigma(1) + gamma + log Z).
inline PerronCheck phi_partial_sum_check(u64 beta1, u64 beta2, double Z) {
    if (beta1 == 0 || beta1 % 2 == 0 || !factorize(beta1).squarefree())
        throw BadCoprimality("phi_partial_sum_check: beta1 must be odd and square-free");
    if (beta2 == 0 || !factorize(beta2).squarefree() || std::gcd(beta2, 2 * beta1) != 1)
        throw BadCoprimality("phi_partial_sum_check: beta2 must be square-free and coprime to 2*beta1");
    if (!(Z >= 2.0)) throw BadCoprimality("phi_partial_sum_check: Z must be at least 2");
    const u64 zmax = static_cast<u64>(std::floor(Z));
    // Euler phi up to zmax by sieve.
    std::vector<u64> phi(zmax + 1);
    std::iota(phi.begin(), phi.end(), u64{0});
    for (u64 p = 2; p <= zmax; ++p)
        if (phi[p] == p)
            for (u64 k = p; k <= zmax; k += p) phi[k] -= phi[k] / p;
    const u64 phi_b2 = euler_phi(beta2);
    KahanSum<long double> sum;
    for (u64 a = 1; a <= zmax; ++a) {
        if (std::gcd(a, 2 * beta1) != 1) continue;
        // phi(a beta2) = phi(a) phi(beta2) g / phi(g) with g = gcd(a, beta2).
        const u64 g = std::gcd(a, beta2);
        long double ph = static_cast<long double>(phi[a]) * phi_b2 * g / euler_phi(g);
        sum += ph / (static_cast<long double>(a) * a * beta2);
    }
    const long double predicted = perron_pi_constant(beta1, beta2) *
                                  (perron_sigma_constant(beta1, beta2) + euler_gamma + std::log(static_cast<long double>(Z)));
    const double direct = static_cast<double>(sum.value());
    return {beta1, beta2, Z, direct, static_cast<double>(predicted),
            static_cast<double>(sum.value() - predicted)};
}

} // namespace pythag
