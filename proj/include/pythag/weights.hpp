#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pythag/errors.hpp"
#include "pythag/quadrature.hpp"

namespace pythag {

/// The canonical bump Phi(x) = exp(1 - 1/(1 - (2x-3)^2)) on (1, 2), zero outside.
inline double bump(double x) {
    double t = 2.0 * x - 3.0;
    double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / d);
}

namespace detail {

/// Tabulated normalized integral of the bump, interpolated by quintic Hermite
/// polynomials using the exact first and second derivatives at the nodes.
class SmoothstepTable {
public:
    static constexpr int panels = 4096;

    static const SmoothstepTable& instance() {
        static const SmoothstepTable table;
        return table;
    }

    /// Values for u > 1/2 come from the symmetry S(u) = 1 - S(1 - u), and the far
    /// lower tail from a Laplace-type representation that stays accurate and monotone
    /// where the density varies by many orders of magnitude across one panel.
    double operator()(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        if (u > 0.5) return 1.0 - lower(1.0 - u);
        return lower(u);
    }

    /// Boundary below which the tail representation is used.
    static constexpr double tail_edge = 1.0 / 16.0;

    /// Normalization: integral of exp(-1/(4u(1-u))) over [0, 1].
    double total() const { return total_; }

    /// Unnormalized density exp(-1/(4u(1-u))) and its derivative.
    static double density(double u) {
        double q = 4.0 * u * (1.0 - u);
        return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    }
    static double density_prime(double u) {
        double q = u * (1.0 - u);
        if (q <= 0.0) return 0.0;
        return density(u) * (1.0 - 2.0 * u) / (4.0 * q * q);
    }

private:
    struct Node {
        double v, d, s; // value, h*S', h^2*S''
    };

    static constexpr int laguerre_order = 64;

    double lower(double u) const {
        if (u < tail_edge) return tail_scale_ * tail(u);
        return hermite(u);
    }

    double hermite(double u) const {
        double pos = u * panels;
        int i = std::min(static_cast<int>(pos), panels - 1);
        double t = pos - i;
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        double h3 = 0.5 * t3 - t4 + 0.5 * t5;
        double h4 = -4 * t3 + 7 * t4 - 3 * t5;
        double h5 = 10 * t3 - 15 * t4 + 6 * t5;
        const Node& a = nodes_[i];
        const Node& b = nodes_[i + 1];
        // Interpolate the increment over the panel so the node value is not re-rounded.
        return a.v + (h1 * a.d + h2 * a.s + h3 * b.s + h4 * b.d + h5 * (b.v - a.v));
    }

    /// Unnormalized integral of the density over [0, u] for u <= 1/2. With
    /// p = 1/(4u(1-u)) the substitution p -> p + s gives
    ///   e^{-p} * integral_0^inf e^{-s} / (4 (p+s)^2 sqrt(1 - 1/(p+s))) ds,
    /// evaluated by Gauss-Laguerre. Every quadrature term decreases in p, so the
    /// result increases in u.
    double tail(double u) const {
        const double p = 1.0 / (4.0 * u * (1.0 - u));
        double acc = 0.0;
        for (int k = laguerre_order - 1; k >= 0; --k) {
            double q = p + lag_x_[k];
            acc += lag_w_[k] / (4.0 * q * q * std::sqrt(1.0 - 1.0 / q));
        }
        return std::exp(-p) * acc;
    }

    /// Gauss-Laguerre nodes and weights by Newton iteration on the three-term recurrence.
    void build_laguerre() {
        const int n = laguerre_order;
        double z = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == 0) z = 3.0 / (1.0 + 2.4 * n);
            else if (i == 1) z += 15.0 / (1.0 + 2.5 * n);
            else z += (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1)) * (z - lag_x_[i - 2]);
            double pp = 0.0, p2 = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0;
                p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1);
                }
                pp = n * (p1 - p2) / z;
                double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) <= 1e-15 * z) break;
            }
            lag_x_[i] = z;
            lag_w_[i] = -1.0 / (pp * n * p2);
        }
    }

    SmoothstepTable() {
        const double h = 1.0 / panels;
        std::vector<double> cum(panels + 1, 0.0);
        KahanSum<long double> acc;
        auto fn = [](double u) { return density(u); };
        for (int i = 0; i < panels; ++i) {
            auto [piece, err] = gk15<double>(fn, i * h, (i + 1) * h);
            (void)err;
            acc += piece;
            cum[i + 1] = static_cast<double>(acc.value());
        }
        total_ = cum[panels];
        for (int i = 0; i <= panels; ++i) {
            double u = i * h;
            nodes_[i] = {cum[i] / total_, h * density(u) / total_, h * h * density_prime(u) / total_};
        }
        nodes_[panels].v = 1.0;
        build_laguerre();
        // Match the tail to the table at the junction so the two pieces join continuously.
        tail_scale_ = hermite(tail_edge) / tail(tail_edge);
    }

    std::array<Node, panels + 1> nodes_{};
    std::array<double, laguerre_order> lag_x_{}, lag_w_{};
    double total_ = 0.0;
    double tail_scale_ = 0.0;
};

} // namespace detail

/// Smooth monotone step: 0 for u <= 0, 1 for u >= 1, the normalized bump integral between.
inline double smoothstep(double u) { return detail::SmoothstepTable::instance()(u); }

/// The weight functions attached to a window (n, M, Y), with X = 2M + n.
///
/// phi1 rises on [Y/2, Y], equals 1 on [Y, X] and falls on [X, 2X]; phi2 is phi1;
/// phi3(x) = bump(x/M); phi_minus and phi_plus are the even minorant and majorant
/// of the indicator of |x| > 1.
class WeightSystem {
public:
    WeightSystem(long long n, double M, double Y) : n_(n), M_(M), Y_(Y), X_(2.0 * M + n) {}

    long long n() const { return n_; }
    double M() const { return M_; }
    double Y() const { return Y_; }
    double X() const { return X_; }

    double phi1(double x) const {
        if (x <= 0.5 * Y_ || x >= 2.0 * X_) return 0.0;
        if (x < Y_) return smoothstep((x - 0.5 * Y_) / (0.5 * Y_));
        if (x <= X_) return 1.0;
        return 1.0 - smoothstep((x - X_) / X_);
    }
    double phi2(double x) const { return phi1(x); }
    double phi3(double x) const { return bump(x / M_); }

    static double phi_minus(double x) { return smoothstep(std::abs(x) - 1.0); }
    static double phi_plus(double x) { return smoothstep(2.0 * std::abs(x) - 1.0); }

    /// Open support interval of phi1 (and phi2).
    std::pair<double, double> support1() const { return {0.5 * Y_, 2.0 * X_}; }
    /// Open support interval of phi3.
    std::pair<double, double> support3() const { return {M_, 2.0 * M_}; }

private:
    long long n_;
    double M_, Y_, X_;
};

/// Validate a window and build its weight system.
inline WeightSystem build_weight_system(long long n, double M, double Y) {
    if (n <= 0 || n % 2 == 0)
        throw BadWindow("build_weight_system: n must be odd and positive, got " + std::to_string(n));
    if (!(M >= 1.0 && M <= static_cast<double>(n)))
        throw BadWindow("build_weight_system: need 1 <= M <= n, got M = " + std::to_string(M));
    if (!(Y >= 1.0 && Y <= M))
        throw BadWindow("build_weight_system: need 1 <= Y <= M, got Y = " + std::to_string(Y));
    return WeightSystem(n, M, Y);
}

/// Integral of f over its support interval [a, b] to absolute accuracy 1e-10.
template <typename F>
double fourier_zero(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    return integrate(std::forward<F>(f), a, b, opts);
}

/// Integral of the canonical bump over [1, 2].
inline double canonical_phi_hat0() {
    static const double value = fourier_zero(bump, 1.0, 2.0);
    return value;
}

/// One row of the derivative report: j and sup |phi1^{(j)}| * Y^j.
struct DerivativeBound {
    int j;
    double scaled_sup;
};

namespace detail {

inline double central_difference(const WeightSystem& w, int j, double x, double h) {
    auto f = [&](double t) { return w.phi1(t); };
    double fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x), fp1 = f(x + h), fp2 = f(x + 2 * h);
    switch (j) {
    case 0:
        return f0;
    case 1:
        return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    case 2:
        return (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
    case 3:
        return (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
    case 4:
        return (fp2 - 4 * fp1 + 6 * f0 - 4 * fm1 + fm2) / (h * h * h * h);
    default:
        throw Error("derivative order out of range");
    }
}

} // namespace detail

/// Estimate sup |phi1^{(j)}| * Y^j for j = 0..j_max by five-point central differences.
///
/// The step is h = Y * eps^{1/(j+2)}; the sample grid covers both ramps densely
/// plus the plateau. The scaled values should not depend on Y.
inline std::vector<DerivativeBound> derivative_bound_report(const WeightSystem& w, int j_max,
                                                            int samples_per_ramp = 4000) {
    if (j_max < 1 || j_max > 4) throw Error("derivative_bound_report: j_max must be in [1, 4]");
    const double eps = std::numeric_limits<double>::epsilon();
    const double Y = w.Y(), X = w.X();
    std::vector<DerivativeBound> out;
    for (int j = 0; j <= j_max; ++j) {
        double h = Y * std::pow(eps, 1.0 / (j + 2));
        double sup = 0.0;
        auto scan = [&](double a, double b) {
            for (int i = 0; i <= samples_per_ramp; ++i) {
                double x = a + (b - a) * i / samples_per_ramp;
                sup = std::max(sup, std::abs(detail::central_difference(w, j, x, h)));
            }
        };
        scan(0.5 * Y - 2 * h, Y + 2 * h);
        scan(X - 2 * h, 2 * X + 2 * h);
        if (j == 0) sup = std::max(sup, w.phi1(0.5 * (Y + X)));
        out.push_back({j, sup * std::pow(Y, j)});
    }
    return out;
}

} // namespace pythag
