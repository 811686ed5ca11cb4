#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "pythag/arith.hpp"
#include "pythag/errors.hpp"
#include "pythag/expsum.hpp"
#include "pythag/lattice.hpp"
#include "pythag/quadrature.hpp"
#include "pythag/weights.hpp"

namespace pythag {

/// The nine divisor parameters (e, g, s, v1, v2, beta1, beta2, m1, m2) of the chain.
struct ChainIndex {
    i64 e = 1, g = 1, s = 1, v1 = 1, v2 = 1, beta1 = 1, beta2 = 1, m1 = 1, m2 = 1;
    bool operator==(const ChainIndex&) const = default;
    bool operator<(const ChainIndex& o) const {
        return std::tie(e, g, s, v1, v2, beta1, beta2, m1, m2) <
               std::tie(o.e, o.g, o.s, o.v1, o.v2, o.beta1, o.beta2, o.m1, o.m2);
    }
    /// mu(m1 beta1 v2 s) mu(m2 beta2 v1 s).
    int mobius_weight() const {
        return mobius(static_cast<u64>(m1 * beta1 * v2 * s)) * mobius(static_cast<u64>(m2 * beta2 * v1 * s));
    }
    std::string str() const {
        return "(e=" + std::to_string(e) + ", g=" + std::to_string(g) + ", s=" + std::to_string(s) +
               ", v1=" + std::to_string(v1) + ", v2=" + std::to_string(v2) + ", beta1=" + std::to_string(beta1) +
               ", beta2=" + std::to_string(beta2) + ", m1=" + std::to_string(m1) + ", m2=" + std::to_string(m2) + ")";
    }
};

namespace detail {
inline bool divides(i64 d, i64 n) { return d != 0 && n % d == 0; }
inline i64 igcd(i64 a, i64 b) { return std::gcd(a, b); }
} // namespace detail

/// Check every divisibility and coprimality invariant of a chain index for n.
inline bool chain_index_valid(i64 n, const ChainIndex& c) {
    using detail::divides;
    using detail::igcd;
    if (!divides(c.e, n) || !divides(c.g, c.e) || !divides(c.s, c.g)) return false;
    const i64 gs = c.g / c.s;
    if (!divides(c.v1, gs) || !divides(c.v2, gs) || igcd(c.v1, c.v2) != 1) return false;
    if (!divides(c.e * c.s, n) || !divides(c.v1 * c.v2, n / (c.e * c.s))) return false;
    if (igcd(c.beta2 * c.v1, c.beta1 * c.v2) != 1) return false;
    if (!divides(c.beta2, gs / c.v1) || !divides(c.beta1, gs / c.v2)) return false;
    const i64 rest = n / (c.e * c.s * c.v1 * c.v2);
    if (!divides(c.m1 * c.m2, rest) || igcd(c.m1, c.m2) != 1) return false;
    if (igcd(c.m1, c.g / (c.beta1 * c.v2 * c.s)) != 1) return false;
    if (igcd(c.m2, c.g / (c.beta2 * c.v1 * c.s)) != 1) return false;
    return true;
}

/// Every chain index for odd n, in lexicographic order, each exactly once.
inline std::vector<ChainIndex> enumerate_chain(i64 n) {
    if (n <= 0 || n % 2 == 0) throw BadParams("enumerate_chain: n must be odd and positive");
    std::vector<ChainIndex> out;
    auto divs = [](i64 m) {
        std::vector<i64> d;
        for (u64 x : divisors(static_cast<u64>(m))) d.push_back(static_cast<i64>(x));
        return d;
    };
    for (i64 e : divs(n))
        for (i64 g : divs(e))
            for (i64 s : divs(g)) {
                if (n % (e * s)) continue;
                const i64 gs = g / s;
                for (i64 v1 : divs(gs))
                    for (i64 v2 : divs(gs)) {
                        if (std::gcd(v1, v2) != 1 || (n / (e * s)) % (v1 * v2)) continue;
                        for (i64 beta2 : divs(gs / v1))
                            for (i64 beta1 : divs(gs / v2)) {
                                if (std::gcd(beta2 * v1, beta1 * v2) != 1) continue;
                                const i64 rest = n / (e * s * v1 * v2);
                                for (i64 m1 : divs(rest))
                                    for (i64 m2 : divs(rest / m1)) {
                                        ChainIndex c{e, g, s, v1, v2, beta1, beta2, m1, m2};
                                        if (chain_index_valid(n, c)) out.push_back(c);
                                    }
                            }
                    }
            }
    return out;
}

/// The constants A..E attached to a chain index; E = 2n/(m1 m2 v1 v2 s e) is integral.
struct ABCDE {
    i64 A, B, C, D, E;
};

inline ABCDE abcde(i64 n, const ChainIndex& c) {
    const i64 core = checked_mul(checked_mul(c.m1 * c.m2, c.v1 * c.v2), c.s * c.e);
    if ((2 * n) % core != 0) throw BadParams("abcde: E is not integral for " + c.str());
    return {checked_mul(c.beta1, core), checked_mul(c.m1 * c.m2 * c.v1 * c.v2 * c.e, c.g), c.beta1 * c.s,
            checked_mul(checked_mul(core, c.beta1 * c.beta1), c.s), 2 * n / core};
}

/// Whether the chain uses the coprimality (alpha1 v1 m2, alpha2 v2 m1) = 1 that the
/// rearrangement requires (exact), or only the conditions of the commonly quoted
/// form of the chain (as_published), which overcounts.
enum class ChainVariant { exact, as_published };

/// Sum over alpha1 and k of the chain summand for one chain index and one alpha2,
/// without the Mobius weight. Returns 0 when alpha2 is not admissible.
inline double chain_block(const WeightSystem& w, const ChainIndex& c, i64 alpha2,
                          ChainVariant variant = ChainVariant::exact, Sandwich sign = Sandwich::minus) {
    const i64 n = w.n();
    const ABCDE k = abcde(n, c);
    if (std::gcd(alpha2, 2 * c.beta1) != 1) return 0.0;
    if (variant == ChainVariant::exact && (std::gcd(alpha2 * c.v2, c.m2) != 1 || std::gcd(alpha2 * c.v2, c.v1) != 1))
        return 0.0;
    const i64 q = checked_mul(alpha2, c.beta2);
    const double Y = w.Y(), X = w.X(), M = w.M();
    const double amin = M + 0.5 * Y, amax = 2.0 * X + 2.0 * M;
    const double two_g_alpha2 = 2.0 * static_cast<double>(c.g) * alpha2;
    KahanSum<double> total;
    for (i64 a1 = 1; static_cast<double>(a1 * alpha2 * k.B) < amax; a1 += 2) {
        const double a = static_cast<double>(a1 * alpha2 * k.B);
        if (a <= amin) continue;
        if (std::gcd(a1, q) != 1) continue;
        if (variant == ChainVariant::exact &&
            (std::gcd(a1 * c.v1, alpha2 * c.v2) != 1 || std::gcd(a1 * c.v1, c.m1) != 1))
            continue;
        const double ratio = static_cast<double>(a1 * c.v1 * c.m2) / static_cast<double>(alpha2 * c.v2 * c.m1);
        const double f4 = sign == Sandwich::minus ? WeightSystem::phi_minus(ratio) : WeightSystem::phi_plus(ratio);
        if (f4 == 0.0) continue;
        // k = r0 (mod q) and k odd; q is odd, so this is one class modulo 2q.
        const i64 r0 = static_cast<i64>(mod_floor(-static_cast<i64>(
                                                      (static_cast<i128>(k.E) * mod_inverse(a1 * c.beta1, q)) % q),
                                                  q));
        const i64 step = 2 * q;
        const i64 cls = (r0 % 2 != 0) ? r0 : r0 + q; // odd representative of the class mod 2q
        const double step_a = static_cast<double>(a1) * k.A;
        const i64 klo = static_cast<i64>(std::floor((0.5 * Y - n) / step_a)) - 1;
        const i64 khi = static_cast<i64>(std::ceil((2.0 * X - n) / step_a)) + 1;
        i64 k0 = klo + static_cast<i64>(mod_floor(cls - klo, static_cast<u64>(step)));
        for (i64 kk = k0; kk <= khi; kk += step) {
            const double F1 = static_cast<double>(n + kk * a1 * k.A);
            const double p1 = w.phi1(F1);
            if (p1 == 0.0) continue;
            const double t = (2.0 * n * kk * k.C + static_cast<double>(kk) * kk * a1 * k.D) / two_g_alpha2;
            const double F2 = 0.5 * a - t, F3 = 0.5 * a + t;
            total += p1 * w.phi1(F2) * w.phi3(F3) * f4;
        }
    }
    return total.value();
}

/// Admissible alpha2 for a chain index are below this bound (alpha2 B < 2X + 2M).
inline i64 chain_alpha2_limit(const WeightSystem& w, const ChainIndex& c) {
    const ABCDE k = abcde(w.n(), c);
    return static_cast<i64>(std::ceil((2.0 * w.X() + 2.0 * w.M()) / static_cast<double>(k.B)));
}

/// S1^{sharp,-} (or S1^{sharp,+}) evaluated through the full divisor chain.
inline double s1_sharp_chain(const WeightSystem& w, ChainVariant variant = ChainVariant::exact,
                             Sandwich sign = Sandwich::minus, unsigned threads = 1) {
    auto chain = enumerate_chain(w.n());
    auto partial = parallel_map(chain.size(), threads, [&](std::size_t i) {
        const ChainIndex& c = chain[i];
        const int mu = c.mobius_weight();
        if (mu == 0) return 0.0;
        KahanSum<double> s;
        const i64 lim = chain_alpha2_limit(w, c);
        for (i64 alpha2 = 1; alpha2 <= lim; ++alpha2) s += chain_block(w, c, alpha2, variant, sign);
        return mu * s.value();
    });
    KahanSum<double> total;
    for (double p : partial) total += p;
    return total.value();
}

inline double s1_sharp_minus_chain(const WeightSystem& w, ChainVariant variant = ChainVariant::exact,
                                   unsigned threads = 1) {
    return s1_sharp_chain(w, variant, Sandwich::minus, threads);
}

/// Everything that parameterizes T_{mu,nu}: the chain index, mu, nu in {1, 2} and alpha2.
struct TParams {
    ChainIndex chain;
    int mu = 1;
    int nu = 1;
    i64 alpha2 = 1;
};

inline void validate_tparams(i64 n, const TParams& p) {
    if (!chain_index_valid(n, p.chain)) throw BadParams("TParams: invalid chain index " + p.chain.str());
    if ((p.mu != 1 && p.mu != 2) || (p.nu != 1 && p.nu != 2)) throw BadParams("TParams: mu and nu must be 1 or 2");
    if (p.alpha2 < 1 || std::gcd(p.alpha2, 2 * p.chain.beta1) != 1)
        throw BadParams("TParams: alpha2 must be positive and coprime to 2*beta1");
    (void)abcde(n, p.chain);
}

/// Upper limit 2 sqrt(X) / (v2 m1 sqrt(e g)) on alpha2 relevant for the main term.
inline double alpha2_main_term_limit(const WeightSystem& w, const ChainIndex& c) {
    return 2.0 * std::sqrt(w.X()) / (static_cast<double>(c.v2 * c.m1) * std::sqrt(static_cast<double>(c.e * c.g)));
}

/// G = mu nu m1 m2 v1 v2 beta1 s e.
inline double g_constant(const TParams& p) {
    const ChainIndex& c = p.chain;
    return static_cast<double>(p.mu * p.nu) * static_cast<double>(c.m1 * c.m2 * c.v1 * c.v2 * c.beta1 * c.s * c.e);
}

/// The smooth function Phi_{mu,nu}(x, y) whose lattice sum is T_{mu,nu}:
///   F1 = n + mu nu A x y,
///   F2, F3 = alpha2 mu B x / 2 -+ (2 n nu C y + mu nu^2 D x y^2) / (2 g alpha2),
///   F4 = mu v1 m2 x / (alpha2 v2 m1),
/// and Phi_{mu,nu} = phi1(F1) phi2(F2) phi3(F3) phi_minus(F4).
class TKernel {
public:
    TKernel(const WeightSystem& w, const TParams& p) : w_(w), p_(p) {
        validate_tparams(w.n(), p);
        k_ = abcde(w.n(), p.chain);
        const double n = static_cast<double>(w.n());
        const double mu = p.mu, nu = p.nu, a2 = static_cast<double>(p.alpha2), g = static_cast<double>(p.chain.g);
        cA_ = mu * nu * k_.A;
        cB_ = 0.5 * a2 * mu * k_.B;
        c1_ = n * nu * k_.C / (g * a2);
        c2_ = mu * nu * nu * k_.D / (2.0 * g * a2);
        c4_ = mu * p.chain.v1 * p.chain.m2 / (a2 * p.chain.v2 * p.chain.m1);
        q_ = checked_mul(p.alpha2, p.chain.beta2);
    }

    const WeightSystem& weights() const { return w_; }
    const TParams& params() const { return p_; }
    const ABCDE& constants() const { return k_; }
    i64 modulus() const { return q_; }

    double F1(double x, double y) const { return static_cast<double>(w_.n()) + cA_ * x * y; }
    double t(double x, double y) const { return c1_ * y + c2_ * x * y * y; }
    double F2(double x, double y) const { return cB_ * x - t(x, y); }
    double F3(double x, double y) const { return cB_ * x + t(x, y); }
    double F4(double x) const { return c4_ * x; }

    /// Phi_{mu,nu}(x, y) given the row factor phi_minus(F4(x)).
    double eval(double x, double y, double row_factor) const {
        const double tt = t(x, y);
        const double f3 = w_.phi3(cB_ * x + tt);
        if (f3 == 0.0) return 0.0;
        const double f1 = w_.phi1(static_cast<double>(w_.n()) + cA_ * x * y);
        if (f1 == 0.0) return 0.0;
        return f1 * f3 * w_.phi1(cB_ * x - tt) * row_factor;
    }
    double row_factor(double x) const { return WeightSystem::phi_minus(F4(x)); }
    double operator()(double x, double y) const { return eval(x, y, row_factor(x)); }

    /// Interval containing the x-support: F2 + F3 in (M + Y/2, 2X + 2M) and F4 > 1.
    std::pair<double, double> x_support() const {
        const double lo = std::max((w_.M() + 0.5 * w_.Y()) / (2.0 * cB_), 1.0 / c4_);
        const double hi = (2.0 * w_.X() + 2.0 * w_.M()) / (2.0 * cB_);
        return {lo, std::max(lo, hi)};
    }

    /// Interval containing the y-support of the row at x > 0: F1 in (Y/2, 2X) and
    /// t below min(2M - a/2, a/2 - Y/2), a = F2 + F3 (the sublevel set of the convex t).
    std::pair<double, double> y_support(double x) const {
        const double n = static_cast<double>(w_.n());
        double lo = (0.5 * w_.Y() - n) / (cA_ * x), hi = (2.0 * w_.X() - n) / (cA_ * x);
        const double half_a = cB_ * x;
        const double thi = std::min(2.0 * w_.M() - half_a, half_a - 0.5 * w_.Y());
        const double qa = c2_ * x, disc = c1_ * c1_ + 4.0 * qa * thi;
        if (disc <= 0.0) return {0.0, 0.0};
        const double sq = std::sqrt(disc);
        lo = std::max(lo, (-c1_ - sq) / (2.0 * qa));
        hi = std::min(hi, (-c1_ + sq) / (2.0 * qa));
        if (!(hi > lo)) return {0.0, 0.0};
        return {lo, hi};
    }

    /// Residue class of y for integer x coprime to q: y = -E (mu nu x beta1)^{-1} (mod q).
    i64 y_class(i64 x) const {
        if (q_ == 1) return 0;
        const i64 inv = static_cast<i64>(mod_inverse(checked_mul(p_.mu * p_.nu * p_.chain.beta1, x), q_));
        return static_cast<i64>(mod_floor(-static_cast<i64>((static_cast<i128>(k_.E) * inv) % q_), q_));
    }

    /// b = -E (mu nu beta1)^{-1} mod q, so that the Kloosterman sum is S(w, l b; q).
    i64 dual_factor() const {
        if (q_ == 1) return 0;
        const i64 inv = static_cast<i64>(mod_inverse(p_.mu * p_.nu * p_.chain.beta1, q_));
        return static_cast<i64>(mod_floor(-static_cast<i64>((static_cast<i128>(k_.E) * inv) % q_), q_));
    }

private:
    WeightSystem w_;
    TParams p_;
    ABCDE k_{};
    double cA_ = 0, cB_ = 0, c1_ = 0, c2_ = 0, c4_ = 0;
    i64 q_ = 1;
};

/// T_{mu,nu}: sum over integers alpha1 coprime to alpha2 beta2 and k = -E (mu nu alpha1 beta1)^{-1}
/// (mod alpha2 beta2) of Phi_{mu,nu}(alpha1, k); loops bounded by the weight supports.
inline double t_direct(const WeightSystem& w, const TParams& p) {
    TKernel K(w, p);
    const i64 q = K.modulus();
    auto [xlo, xhi] = K.x_support();
    KahanSum<double> total;
    for (i64 x = static_cast<i64>(std::floor(xlo)); static_cast<double>(x) <= xhi; ++x) {
        if (x <= 0 || std::gcd(x, q) != 1) continue;
        const double xd = static_cast<double>(x);
        const double rf = K.row_factor(xd);
        if (rf == 0.0) continue;
        auto [ylo, yhi] = K.y_support(xd);
        if (!(yhi > ylo)) continue;
        const i64 r = K.y_class(x);
        const i64 start = static_cast<i64>(std::floor(ylo)) - 1;
        i64 y = start + static_cast<i64>(mod_floor(r - start, static_cast<u64>(q)));
        for (; static_cast<double>(y) <= yhi + 1.0; y += q) total += K.eval(xd, static_cast<double>(y), rf);
    }
    return total.value();
}

/// Real and imaginary part of a Fourier integral.
struct FourierValue {
    double real_part;
    double imag_part;
};

/// I(w, l) = double integral of Phi_{mu,nu}(x, y) e(-(w x + l y)/(alpha2 beta2)) by nested
/// adaptive quadrature over the support box.
inline FourierValue fourier_integral_I(const WeightSystem& w, const TParams& p, i64 wfreq, i64 lfreq,
                                       const QuadratureOptions& opts = {}) {
    TKernel K(w, p);
    const double q = static_cast<double>(K.modulus());
    auto [xlo, xhi] = K.x_support();
    auto ylo = [&](double x) { return K.y_support(x).first; };
    auto yhi = [&](double x) { return K.y_support(x).second; };
    if (wfreq == 0 && lfreq == 0) {
        double v = integrate_2d([&](double x, double y) { return K(x, y); }, xlo, xhi, ylo, yhi, opts);
        return {v, 0.0};
    }
    auto f = [&](double x, double y) {
        const double ang = -2.0 * M_PI * (static_cast<double>(wfreq) * x + static_cast<double>(lfreq) * y) / q;
        return std::polar(K(x, y), ang);
    };
    std::complex<double> v = integrate_2d(f, xlo, xhi, ylo, yhi, opts);
    return {v.real(), v.imag()};
}

/// Outcome of the dual (Poisson) evaluation of T_{mu,nu}, split by whether w and l vanish.
struct PoissonResult {
    double total = 0;
    double t00 = 0, t01 = 0, t10 = 0, t11 = 0; ///< (w = 0 ?, l = 0 ?) partitions
    double total_direct_kernel = 0;            ///< same series summed without the split
    double imag_residual = 0;                  ///< imaginary part of the series (must vanish)
    i64 W = 0, L = 0;                          ///< truncation |w| <= W, |l| <= L
    std::size_t samples = 0;                   ///< integrand evaluations
    double ramanujan_mismatch = 0;             ///< max |S(0,b;q) - closed form| over b
};

/// Stand-in for the n^eps factor of the negligibility cutoffs.
inline constexpr double default_cutoff_kappa = 32.0;

/// Cutoffs W = safety kappa m1 m2 v1 v2 e g beta2 alpha2^2 / Y and L = safety kappa beta1 beta2 s n / (g Y).
inline std::pair<i64, i64> poisson_cutoffs(const WeightSystem& w, const TParams& p, double safety,
                                           double kappa = default_cutoff_kappa) {
    const ChainIndex& c = p.chain;
    const double base_w = static_cast<double>(c.m1 * c.m2 * c.v1 * c.v2 * c.e * c.g * c.beta2) *
                          static_cast<double>(p.alpha2 * p.alpha2) / w.Y();
    const double base_l = static_cast<double>(c.beta1 * c.beta2 * c.s) * static_cast<double>(w.n()) /
                          (static_cast<double>(c.g) * w.Y());
    return {static_cast<i64>(std::ceil(safety * kappa * base_w)), static_cast<i64>(std::ceil(safety * kappa * base_l))};
}

namespace detail {

/// Smallest 5-smooth integer >= n (FFT-friendly length).
inline std::size_t fft_length(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

/// Process-wide cache of real-to-complex FFTW plans keyed by length.
class FftPlans {
public:
    static fftw_plan get(int n) {
        static FftPlans cache;
        std::lock_guard<std::mutex> lock(cache.mutex_);
        auto it = cache.plans_.find(n);
        if (it != cache.plans_.end()) return it->second;
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        cache.plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<int, fftw_plan> plans_;
};

/// sum_{j = j0}^{j1} exp(-i theta j), computed from the Dirichlet kernel.
inline std::complex<double> geometric_sum(i64 j0, i64 j1, double theta) {
    if (j1 < j0) return 0.0;
    const double count = static_cast<double>(j1 - j0 + 1);
    const double centre = 0.5 * static_cast<double>(j0 + j1);
    const double half = 0.5 * theta;
    const double s = std::sin(half);
    double mag;
    if (std::abs(s) < 1e-12) {
        // theta is (numerically) a multiple of 2 pi: use the limit of the ratio.
        mag = count * std::cos(half * count) / std::cos(half);
        return std::polar(1.0, -theta * centre) * mag;
    }
    mag = std::sin(half * count) / s;
    return std::polar(1.0, -theta * centre) * mag;
}

} // namespace detail

/// T_{mu,nu} from the dual series
///   (alpha2 beta2)^{-2} sum_{|w| <= W} sum_{|l| <= L} S(w, -l E (mu nu beta1)^{-1}; alpha2 beta2) I(w, l),
/// truncated at `safety` times the negligibility cutoffs.
///
/// All I(w, l) are obtained at once: each x-row of a uniform grid is sampled in y and
/// transformed by one FFT whose period is a multiple of q, which yields the y-Fourier
/// coefficients at every l/q; the w-sum of Kloosterman sums against e(-w x/q) is folded
/// into a closed-form kernel per residue class of l, and the x-integral is the
/// trapezoid rule (spectrally accurate because the integrand vanishes smoothly at the
/// ends). Sample rates are tied to the cutoffs: 2.5 W/q per unit x and 2.5 L/q per unit y.
inline PoissonResult t_poisson(const WeightSystem& w, const TParams& p, double safety = 10.0,
                               double kappa = default_cutoff_kappa) {
    if (!(safety >= 1.0)) throw BadParams("t_poisson: safety must be at least 1");
    TKernel K(w, p);
    const i64 q = K.modulus();
    const double qd = static_cast<double>(q);
    auto [Wc, Lc] = poisson_cutoffs(w, p, safety, kappa);
    PoissonResult res;
    res.W = Wc;
    res.L = Lc;

    // Kloosterman table S[a][r] = S(a, r b; q) for a, r mod q.
    KloostermanContext ctx(static_cast<u64>(q));
    const i64 b = K.dual_factor();
    std::vector<double> S(static_cast<std::size_t>(q * q));
    for (i64 a = 0; a < q; ++a)
        for (i64 r = 0; r < q; ++r) {
            KloostermanValue kv = ctx(a, static_cast<i64>((static_cast<i128>(r) * b) % q));
            S[a * q + r] = kv.real_part;
        }
    for (i64 r = 0; r < q; ++r) {
        const i64 br = static_cast<i64>((static_cast<i128>(r) * b) % q);
        res.ramanujan_mismatch =
            std::max(res.ramanujan_mismatch, std::abs(S[r] - static_cast<double>(ramanujan(static_cast<u64>(q), br))));
    }

    auto [xlo, xhi] = K.x_support();
    if (!(xhi > xlo)) return res;
    const double rate_x = std::max(2.5 * static_cast<double>(Wc) / qd, 16.0);
    const double rate_y = std::max(2.5 * static_cast<double>(Lc) / qd, 16.0);
    const std::size_t nx = static_cast<std::size_t>(std::ceil((xhi - xlo) * rate_x)) + 1;
    const double hx = (xhi - xlo) / static_cast<double>(nx);

    // j-ranges of w = a + q j with |w| <= W for each residue a.
    std::vector<std::pair<i64, i64>> jr(static_cast<std::size_t>(q));
    for (i64 a = 0; a < q; ++a) {
        const i64 j0 = static_cast<i64>(std::ceil((-static_cast<double>(Wc) - a) / qd));
        const i64 j1 = static_cast<i64>(std::floor((static_cast<double>(Wc) - a) / qd));
        jr[a] = {j0, j1};
    }

    KahanSum<double> a00, a01, a10, a11, full, imag;
    std::vector<std::complex<double>> Kr(q), Knz(q);
    std::vector<double> buf;
    std::vector<std::complex<double>> spec;
    for (std::size_t i = 1; i < nx; ++i) {
        const double x = xlo + hx * static_cast<double>(i);
        const double rf = K.row_factor(x);
        if (rf == 0.0) continue;
        auto [ylo, yhi] = K.y_support(x);
        if (!(yhi > ylo)) continue;
        // Period P: a multiple of q covering the support; N samples at spacing P/N.
        const i64 m = std::max<i64>(1, static_cast<i64>(std::ceil((yhi - ylo) / qd)));
        const double P = static_cast<double>(m) * qd;
        std::size_t N = detail::fft_length(static_cast<std::size_t>(std::ceil(P * rate_y)));
        while (static_cast<double>(Lc) * static_cast<double>(m) >= 0.5 * static_cast<double>(N))
            N = detail::fft_length(N + 1);
        const double h = P / static_cast<double>(N);
        double* in = fftw_alloc_real(N);
        fftw_complex* out = fftw_alloc_complex(N / 2 + 1);
        const std::size_t last = std::min<std::size_t>(N, static_cast<std::size_t>(std::ceil((yhi - ylo) / h)) + 1);
        for (std::size_t j = 0; j < N; ++j) in[j] = j < last ? K.eval(x, ylo + h * static_cast<double>(j), rf) : 0.0;
        res.samples += last;
        fftw_execute_dft_r2c(detail::FftPlans::get(static_cast<int>(N)), in, out);

        // Kernel K_r(x) = sum_{|w| <= W} S(w, r b; q) e(-w x / q) per residue r of l.
        const double theta = 2.0 * M_PI * x;
        std::vector<std::complex<double>> D(q);
        for (i64 a = 0; a < q; ++a)
            D[a] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(a) * x / qd) *
                   detail::geometric_sum(jr[a].first, jr[a].second, theta);
        for (i64 r = 0; r < q; ++r) {
            std::complex<double> kr = 0.0;
            for (i64 a = 0; a < q; ++a) kr += S[a * q + r] * D[a];
            Kr[r] = kr;
            Knz[r] = kr - S[r]; // remove the w = 0 term
        }

        // G(l) = h e(-l ylo / q) F[l m]; G(-l) = conj(G(l)).
        const std::complex<double> step = std::polar(1.0, -2.0 * M_PI * ylo / qd);
        std::complex<double> phase = 1.0;
        double r00 = 0, r01 = 0, r10 = 0, r11 = 0, rfull = 0, rim = 0;
        for (i64 l = 0; l <= Lc; ++l) {
            const std::size_t idx = static_cast<std::size_t>(l * m);
            const std::complex<double> F(out[idx][0], out[idx][1]);
            const std::complex<double> G = h * phase * F;
            phase *= step;
            const i64 rp = l % q, rn = (q - rp) % q;
            if (l == 0) {
                r00 += (G * S[0]).real();
                r10 += (G * Knz[0]).real();
                rfull += (G * Kr[0]).real();
                rim += (G * Kr[0]).imag();
            } else {
                const std::complex<double> Gc = std::conj(G);
                r01 += (G * S[rp] + Gc * S[rn]).real();
                r11 += (G * Knz[rp] + Gc * Knz[rn]).real();
                const std::complex<double> both = G * Kr[rp] + Gc * Kr[rn];
                rfull += both.real();
                rim += both.imag();
            }
        }
        a00 += hx * r00;
        a01 += hx * r01;
        a10 += hx * r10;
        a11 += hx * r11;
        full += hx * rfull;
        imag += hx * rim;
        fftw_free(in);
        fftw_free(out);
    }
    const double norm = 1.0 / (qd * qd);
    res.t00 = norm * a00.value();
    res.t01 = norm * a01.value();
    res.t10 = norm * a10.value();
    res.t11 = norm * a11.value();
    res.total = res.t00 + res.t01 + res.t10 + res.t11;
    res.total_direct_kernel = norm * full.value();
    res.imag_residual = norm * imag.value();
    return res;
}

/// I(0,0) through the change of variables sigma = F2, tau = F3:
///   I(0,0) = (1/G) int int phi1(F1) phi2(sigma) phi3(tau) phi_minus(F4) / F1 dsigma dtau,
/// F1 = sqrt(n^2 - sigma^2 + tau^2), x = (sigma + tau)/(alpha2 mu B). The substitution
/// sigma = rho sin(theta), rho = sqrt(n^2 + tau^2), turns dsigma / F1 into dtheta.
inline double i00_sigma_tau(const WeightSystem& w, const TParams& p, const QuadratureOptions& opts = {}) {
    TKernel K(w, p);
    const double n = static_cast<double>(w.n());
    const double half_y = 0.5 * w.Y();
    const double scale_x = 1.0 / (static_cast<double>(p.alpha2) * p.mu * static_cast<double>(K.constants().B));
    auto integrand = [&](double tau, double theta) {
        const double rho = std::sqrt(n * n + tau * tau);
        const double sigma = rho * std::sin(theta), f1 = rho * std::cos(theta);
        const double v = w.phi3(tau) * w.phi1(f1) * w.phi1(sigma);
        if (v == 0.0) return 0.0;
        return v * WeightSystem::phi_minus(K.F4((sigma + tau) * scale_x));
    };
    auto lo = [&](double tau) { return std::asin(std::min(1.0, half_y / std::sqrt(n * n + tau * tau))); };
    auto hi = [&](double tau) { return std::acos(std::min(1.0, half_y / std::sqrt(n * n + tau * tau))); };
    return integrate_2d(integrand, w.M(), 2.0 * w.M(), lo, hi, opts) / g_constant(p);
}

/// Back-substitute the root y = (F1 - n)/(mu nu A x), F1 = +sqrt(n^2 - sigma^2 + tau^2),
/// into F2 and F3; returns max(|F2 - sigma|/|sigma|, |F3 - tau|/|tau|).
inline double ysol_residual(const WeightSystem& w, const TParams& p, double sigma, double tau) {
    TKernel K(w, p);
    const double n = static_cast<double>(w.n());
    const double x = (sigma + tau) / (static_cast<double>(p.alpha2) * p.mu * static_cast<double>(K.constants().B));
    const double f1 = std::sqrt(n * n - sigma * sigma + tau * tau);
    const double y = (f1 - n) / (static_cast<double>(p.mu * p.nu) * static_cast<double>(K.constants().A) * x);
    return std::max(std::abs(K.F2(x, y) - sigma) / std::abs(sigma), std::abs(K.F3(x, y) - tau) / std::abs(tau));
}

/// Quadrature value of I(0,0) against the closed-form main term 2 pi phi_hat(0) M / G.
struct I00Check {
    double lhs;
    double rhs_main;
    double ratio;
};

inline I00Check i00_identity_check(const WeightSystem& w, const TParams& p, const QuadratureOptions& opts = {}) {
    const double lhs = fourier_integral_I(w, p, 0, 0, opts).real_part;
    const double rhs = 2.0 * M_PI * canonical_phi_hat0() * w.M() / g_constant(p);
    return {lhs, rhs, lhs / rhs};
}

} // namespace pythag
