// Exact singular series P(n) for a few odd n, and the main-term prediction it feeds.

#include <cmath>
#include <cstdio>

#include "pythag/singular.hpp"
#include "pythag/weights.hpp"

int main() {
    for (pythag::u64 n : {1, 3, 9, 15, 105, 225, 100003}) {
        auto P = pythag::singular_series(n);
        const double M = std::pow(static_cast<double>(n), 0.9);
        std::printf("P(%llu) = %s ~ %.12f, main term at M = n^0.9: %.6g\n", static_cast<unsigned long long>(n),
                    pythag::to_fraction_string(P.value).c_str(), P.value.convert_to<double>(),
                    pythag::main_term_predict(n, std::max(1.0, M), pythag::canonical_phi_hat0()));
    }
    auto c = pythag::phi_partial_sum_check(1, 1, 1e5);
    std::printf("Perron check (1, 1, Z = 1e5): direct %.12f, predicted %.12f, error %.3g\n", c.direct, c.predicted,
                c.error);
}
