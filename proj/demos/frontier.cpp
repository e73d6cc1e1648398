// Where does the main bound start beating |X||Y|?  For |X| = |Y| = p^alpha
// on the full torus the crossover sits at alpha(k) = (3k+2)/(4k+2); this
// prints the frontier and the bound-to-trivial ratio on both sides of it,
// then one exact panel at a small prime for scale.

#include <expsum/bounds.hpp>
#include <expsum/sums.hpp>

#include <cstdio>

using namespace expsum;

int main() {
    std::printf("crossover exponent alpha(k) = (3k+2)/(4k+2)\n\n");
    std::printf("  k   alpha(k)    ratio at alpha-0.02   at alpha   at alpha+0.02\n");
    const long double p = 1e6L;
    for (int k = 1; k <= 6; ++k) {
        const long double alpha = nontriviality_threshold(k);
        const auto ratio = [&](long double e) {
            BoundParams P;
            P.size_x = std::pow(p, e);
            P.size_y = P.size_x;
            P.p = p;
            P.T = p;  // full torus
            P.k = k;
            return double(evaluate_bound(BoundId::cor1, P) /
                          (P.size_x * P.size_y));
        };
        std::printf("  %d   %.6Lf   %18.4f   %8.4f   %12.4f\n", k, alpha,
                    ratio(alpha - 0.02L), ratio(alpha), ratio(alpha + 0.02L));
    }

    std::printf("\nexact panel at p = 1009, T = p-1, X = Y = full torus:\n");
    const auto ctx = make_prime_context(1009);
    const auto elem = element_of_order(ctx, 1008);
    const auto full = subset_full(1008);
    const auto spec = make_sum_spec(ctx, elem, 1, full, full, 1);
    const double exact = w_sum(spec, 2);
    for (int k = 1; k <= 3; ++k) {
        auto s = spec;
        s.k = k;
        const auto rep = compare_all_with_exact(s, exact);
        std::printf("  k=%d  exact=%.6g  theorem1=%.6g  ratio=%.4g\n", k,
                    rep.exact, double(rep.values.at(BoundId::theorem1)),
                    double(rep.ratios.at(BoundId::theorem1)));
    }
    return 0;
}
