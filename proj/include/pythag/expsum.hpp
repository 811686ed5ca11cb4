#pragma once

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "pythag/arith.hpp"
#include "pythag/errors.hpp"

namespace pythag {

/// Value of a Kloosterman sum: the real part plus the leftover imaginary part,
/// which must vanish up to rounding because gamma and -gamma pair up.
struct KloostermanValue {
    double real_part;
    u64 modulus;
    double residual_imag;
};

/// Precomputed tables for repeated Kloosterman sums to one modulus c.
class KloostermanContext {
public:
    explicit KloostermanContext(u64 c) : c_(c) {
        if (c == 0) throw Error("kloosterman: modulus must be positive");
        cos_.resize(c);
        sin_.resize(c);
        for (u64 k = 0; k < c; ++k) {
            // Reduce the angle to [-pi, pi] before evaluating for better symmetry.
            double frac = static_cast<double>(k) / static_cast<double>(c);
            if (frac > 0.5) frac -= 1.0;
            cos_[k] = std::cos(2.0 * M_PI * frac);
            sin_[k] = std::sin(2.0 * M_PI * frac);
        }
        for (u64 g = 0; g < c; ++g) {
            if (std::gcd(g, c) == 1) {
                units_.push_back(g);
                inverses_.push_back(mod_inverse(static_cast<i64>(g), c));
            }
        }
        if (c == 1) {
            units_ = {0};
            inverses_ = {0};
        }
    }

    u64 modulus() const { return c_; }
    std::size_t unit_count() const { return units_.size(); }

    /// S(a, b; c) by direct summation over the invertible residues.
    KloostermanValue operator()(i64 a, i64 b) const {
        const u64 ar = mod_floor(a, c_), br = mod_floor(b, c_);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < units_.size(); ++i) {
            u64 k = (static_cast<u128>(ar) * units_[i] + static_cast<u128>(br) * inverses_[i]) % c_;
            re += cos_[k];
            im += sin_[k];
        }
        return {re, c_, im};
    }

    /// cos(2 pi k / c) and sin(2 pi k / c) from the tables.
    double cos_at(u64 k) const { return cos_[k % c_]; }
    double sin_at(u64 k) const { return sin_[k % c_]; }

private:
    u64 c_;
    std::vector<double> cos_, sin_;
    std::vector<u64> units_, inverses_;
};

/// S(a, b; c) = sum over invertible gamma mod c of e((a gamma + b conj(gamma)) / c).
inline KloostermanValue kloosterman(i64 a, i64 b, u64 c) { return KloostermanContext(c)(a, b); }

/// Ramanujan sum c_q(n) by direct summation of roots of unity, rounded to the nearest integer.
///
/// Throws if the floating sum is not within 1e-6 of an integer.
inline i64 ramanujan_direct(u64 q, i64 n) {
    KloostermanValue v = kloosterman(0, n, q);
    double r = std::round(v.real_part);
    if (std::abs(v.real_part - r) > 1e-6 || std::abs(v.residual_imag) > 1e-6)
        throw Error("ramanujan_direct: sum is not an integer for q = " + std::to_string(q));
    return static_cast<i64>(r);
}

/// Ramanujan sum c_q(n) = S(0, n; q) = mu(q/(n,q)) phi(q) / phi(q/(n,q)).
inline i64 ramanujan(u64 q, i64 n) {
    if (q == 0) throw Error("ramanujan: modulus must be positive");
    u64 d = std::gcd(static_cast<u64>(std::llabs(n)), q);
    if (d == 0) d = q;
    u64 r = q / d;
    i64 value = static_cast<i64>(mobius(r)) * static_cast<i64>(euler_phi(q) / euler_phi(r));
#ifndef NDEBUG
    assert(value == ramanujan_direct(q, n));
#endif
    return value;
}

/// Result of comparing |S(a,b;c)| with d(c) sqrt(gcd(a,b,c)) sqrt(c).
struct WeilMargin {
    double bound;
    double value;
    double slack;
};

inline WeilMargin weil_margin(const KloostermanContext& ctx, i64 a, i64 b) {
    const u64 c = ctx.modulus();
    u64 g = std::gcd(std::gcd(static_cast<u64>(std::llabs(a)), static_cast<u64>(std::llabs(b))), c);
    double bound = static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(g)) *
                   std::sqrt(static_cast<double>(c));
    double value = std::abs(ctx(a, b).real_part);
    WeilMargin m{bound, value, bound - value};
    if (m.slack < -1e-6)
        throw WeilViolation("Weil bound violated at (a, b, c) = (" + std::to_string(a) + ", " +
                            std::to_string(b) + ", " + std::to_string(c) + ")");
    return m;
}

inline WeilMargin weil_margin(i64 a, i64 b, u64 c) { return weil_margin(KloostermanContext(c), a, b); }

} // namespace pythag
