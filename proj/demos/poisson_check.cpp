// Compare the direct lattice sum T_{mu,nu} with its Poisson/Kloosterman expansion
// at n = 15 for the all-ones chain index.

#include <cstdio>

#include "pythag/transform.hpp"

int main() {
    auto w = pythag::build_weight_system(15, 8, 4);
    for (pythag::i64 alpha2 : {1, 3, 5}) {
        pythag::TParams p;
        p.alpha2 = alpha2;
        const double direct = pythag::t_direct(w, p);
        auto r = pythag::t_poisson(w, p, 10.0);
        std::printf("alpha2 = %lld: direct %.12g, Poisson %.12g (W = %lld, L = %lld)\n", static_cast<long long>(alpha2),
                    direct, r.total, static_cast<long long>(r.W), static_cast<long long>(r.L));
        std::printf("  T00 %.6g  T01 %.6g  T10 %.6g  T11 %.6g\n", r.t00, r.t01, r.t10, r.t11);
    }
    auto chk = pythag::i00_identity_check(w, pythag::TParams{});
    std::printf("I(0,0) = %.10g, 2 pi phi_hat(0) M / G = %.10g, ratio %.6f\n", chk.lhs, chk.rhs_main, chk.ratio);
}
