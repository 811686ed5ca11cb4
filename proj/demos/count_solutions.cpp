// Count the smoothed solutions of x1^2 + x2^2 - x3^2 = n^2 for a small window and
// show the identities S = 2 S1 and S1 = S1_sharp + S1_flat.

#include <cstdio>

#include "pythag/lattice.hpp"

int main() {
    auto w = pythag::build_weight_system(105, 32, 8);
    auto set = pythag::enumerate_solutions(w);
    std::printf("n = %lld, M = %g, Y = %g: %zu solutions inside the weight supports\n", w.n(), w.M(), w.Y(),
                set.triples.size());
    for (std::size_t i = 0; i < set.triples.size() && i < 5; ++i) {
        const auto& t = set.triples[i];
        std::printf("  (%lld, %lld, %lld)\n", static_cast<long long>(t.x1), static_cast<long long>(t.x2),
                    static_cast<long long>(t.x3));
    }
    const double S = pythag::smoothed_sum_S(w), S1 = pythag::smoothed_sum_S1(w);
    auto split = pythag::s1_split_direct(w);
    std::printf("S = %.12g, 2 S1 = %.12g\n", S, 2 * S1);
    std::printf("S1 = %.12g = sharp %.12g + flat %.12g\n", S1, split.sharp, split.flat);
    std::printf("sandwich: %.12g <= %.12g <= %.12g\n", split.sharp_minus, split.sharp, split.sharp_plus);
}
