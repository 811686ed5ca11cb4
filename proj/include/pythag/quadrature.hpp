#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "pythag/errors.hpp"

namespace pythag {

/// Neumaier-compensated accumulator; keeps long sums accurate to a few ulps.
template <typename T = double>
class KahanSum {
public:
    void add(T x) {
        T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    KahanSum& operator+=(T x) {
        add(x);
        return *this;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_ = 0;
    T comp_ = 0;
};

/// Tolerances and limits for the adaptive integrators.
struct QuadratureOptions {
    double abs_tol = 1e-10;
    std::size_t node_budget = 1000000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename V>
double magnitude(const V& v) {
    return std::abs(v);
}

template <typename V, typename F>
std::pair<V, double> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V fc = f(c);
    V kron = fc * gk_wk[7];
    V gauss = fc * gk_wg[3];
    for (int i = 0; i < 7; ++i) {
        double dx = h * gk_x[i];
        V f1 = f(c - dx), f2 = f(c + dx);
        kron += (f1 + f2) * gk_wk[i];
        if (i % 2 == 1) gauss += (f1 + f2) * gk_wg[i / 2];
    }
    kron *= h;
    gauss *= h;
    return {kron, magnitude(V(kron - gauss))};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below opts.abs_tol. Works for real and complex integrands.
/// Throws QuadratureFailure if the node budget is exhausted first. The number of
/// integrand evaluations is added to *nodes when given.
template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opts = {},
               std::size_t* nodes = nullptr) {
    using V = std::decay_t<decltype(f(a))>;
    if (!(b > a)) return V{};
    struct Piece {
        double a, b;
        V value;
        double err;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    std::size_t used = 0;
    auto eval = [&](double lo, double hi) {
        auto [v, e] = detail::gk15<V>(f, lo, hi);
        used += 15;
        return Piece{lo, hi, v, e};
    };
    heap.push(eval(a, b));
    double total_err = heap.top().err;
    while (total_err > opts.abs_tol) {
        if (used + 30 > opts.node_budget)
            throw QuadratureFailure("adaptive quadrature: node budget of " +
                                    std::to_string(opts.node_budget) +
                                    " exhausted with error estimate " + std::to_string(total_err));
        Piece p = heap.top();
        heap.pop();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            // Interval can no longer be split in double precision.
            throw QuadratureFailure("adaptive quadrature: interval underflow near " +
                                    std::to_string(p.a));
        }
        Piece l = eval(p.a, mid), r = eval(mid, p.b);
        total_err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        if (total_err <= opts.abs_tol) {
            // Recompute the sum of error estimates to avoid drift from the running update.
            double check = 0;
            auto copy = heap;
            while (!copy.empty()) {
                check += copy.top().err;
                copy.pop();
            }
            total_err = check;
        }
    }
    if (nodes) *nodes += used;
    // Sum pieces in a fixed order (by left endpoint) for run-to-run reproducibility.
    std::vector<Piece> pieces;
    pieces.reserve(heap.size());
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    V sum{};
    if constexpr (std::is_same_v<V, double>) {
        KahanSum<double> k;
        for (const auto& p : pieces) k += p.value;
        sum = k.value();
    } else {
        KahanSum<double> re, im;
        for (const auto& p : pieces) {
            re += p.value.real();
            im += p.value.imag();
        }
        sum = V(re.value(), im.value());
    }
    return sum;
}

/// Iterated adaptive integration of f(x, y) over x in [xa, xb], y in [ylo(x), yhi(x)].
///
/// Each inner integral and the outer one are separate adaptive integrations, each
/// with opts.node_budget. The inner tolerance is scaled by the x-length so that the
/// accumulated inner error stays within half of the requested absolute tolerance.
/// The total number of evaluations is added to *nodes when given.
template <typename F, typename Lo, typename Hi>
auto integrate_2d(F&& f, double xa, double xb, Lo&& ylo, Hi&& yhi,
                  const QuadratureOptions& opts = {}, std::size_t* nodes = nullptr) {
    using V = std::decay_t<decltype(f(xa, xa))>;
    std::size_t used = 0;
    QuadratureOptions inner = opts;
    inner.abs_tol = 0.5 * opts.abs_tol / std::max(1.0, xb - xa);
    auto row = [&](double x) -> V {
        double a = ylo(x), b = yhi(x);
        if (!(b > a)) return V{};
        return integrate([&](double y) { return f(x, y); }, a, b, inner, &used);
    };
    QuadratureOptions outer = opts;
    outer.abs_tol = 0.5 * opts.abs_tol;
    auto result = integrate(row, xa, xb, outer, &used);
    if (nodes) *nodes += used;
    return result;
}

} // namespace pythag
