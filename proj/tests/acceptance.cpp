// Acceptance gate: one check per numbered criterion, one line each.
// Runs against the installed library only; the reference oracle is the
// naive evaluator in oracles.hpp.

#include <expsum/verify.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace expsum;

namespace {

struct Outcome {
    bool pass = false;
    std::string note;
};

std::string cat_counter(const char* what, u64 n) {
    return std::to_string(n) + " " + what;
}

// 1. Exact engine vs naive double-loop oracle, mixed gamma sources.
Outcome criterion_oracle_equivalence() {
    const std::vector<u64> ps = {101, 499, 1009};
    std::mt19937_64 gen(101);
    for (int i = 0; i < 50; ++i) {
        const u64 p = ps[i % ps.size()];
        const auto ctx = make_prime_context(p);
        const auto& divs = ctx.divisors_of_p_minus_1;
        const u64 T = (i % 2 == 0) ? p - 1 : divs[uniform_below(gen, divs.size())];
        const auto elem = element_of_order(ctx, T);
        const u64 sx = 1 + uniform_below(gen, 50);
        const u64 sy = 1 + uniform_below(gen, 50);
        const auto X = subset_random(p - 1, sx, gen());
        auto Y = subset_random(p - 1, sy, gen());
        if (i % 3 == 1) {
            Y = with_unimodular_gamma(std::move(Y), gen());
        } else if (i % 3 == 2) {
            std::vector<std::complex<double>> gs;
            for (u64 y : Y.elements)
                gs.push_back(std::polar(0.7, 0.31 * double(y)));
            Y = make_weighted_subset(Y.modulus, Y.elements, gs);
        }
        const u64 a = 1 + uniform_below(gen, p - 1);
        const auto spec = make_sum_spec(ctx, elem, a, X, Y, 1);
        const double fast = w_sum(spec, 1 + i % 3);
        const double naive = oracle::w(spec);
        if (std::abs(fast - naive) > 1e-9 * std::max(1.0, naive))
            return {false, "mismatch at p=" + std::to_string(p) +
                               " instance " + std::to_string(i)};
    }
    return {true, "50 instances vs naive oracle, 1e-9 relative"};
}

// 2. S(v_1..v_2k) = p-1 for every degenerate tuple.
Outcome criterion_degenerate_identity() {
    u64 tuples = 0;
    for (u64 p : detail::primes_up_to(101)) {
        const auto ctx = make_prime_context(p);
        for (u64 d : {u64(1), u64(2)}) {
            if ((p - 1) % d != 0) continue;
            const auto basket = build_prime_basket((p - 1) / d, 4);
            for (int k = 1; k <= 3; ++k) {
                if (u64(k) >= p) continue;
                std::vector<std::size_t> idx(std::size_t(k), 0);
                while (true) {
                    std::vector<u64> head(std::size_t(k), 0);
                    for (std::size_t i = 0; i < head.size(); ++i)
                        head[i] = basket.primes[idx[i]];
                    std::vector<u64> perm = head;
                    std::sort(perm.begin(), perm.end());
                    do {
                        std::vector<u64> v = head;
                        v.insert(v.end(), perm.begin(), perm.end());
                        const u64 a = (tuples % 3 == 0) ? p - 1 : 1;
                        const u64 t = (tuples % 5 == 0 && p > 2) ? 2 : 1;
                        const auto s = complete_sum_S(v, a, t, d, ctx);
                        ++tuples;
                        if (std::abs(s - std::complex<double>(double(p - 1))) >
                            1e-6)
                            return {false,
                                    "S != p-1 at p=" + std::to_string(p) +
                                        " v=" + detail::tuple_str(v)};
                    } while (std::next_permutation(perm.begin(), perm.end()));
                    std::size_t i = 0;
                    for (; i < idx.size(); ++i) {
                        if (++idx[i] < basket.primes.size()) break;
                        idx[i] = 0;
                    }
                    if (i == idx.size()) break;
                }
            }
        }
    }
    return {true, cat_counter("degenerate tuples, p <= 101", tuples)};
}

// 3. Weil bound on every non-degenerate tuple, exhaustive small corpus.
Outcome criterion_weil() {
    const auto sweep =
        detail::weil_sweep(detail::primes_up_to(211), 5, 2, {1, 2}, false, 2);
    if (!sweep.counterexample.empty())
        return {false, sweep.counterexample};
    return {true, cat_counter("tuples, zero violations", sweep.tuples)};
}

// 4. Congruence solution count is exactly ell.
Outcome criterion_congruence() {
    const auto out = detail::check_congruence_exact(VerifyScale::full, 1);
    return {out.pass, out.detail};
}

// 5. The 1/|V| representation identity.
Outcome criterion_representation() {
    const std::vector<u64> ps = {13, 31, 101, 499};
    std::mt19937_64 gen(105);
    for (int i = 0; i < 100; ++i) {
        const u64 p = ps[i % ps.size()];
        const auto ctx = make_prime_context(p);
        const u64 n = p - 1;
        const auto& divs = ctx.divisors_of_p_minus_1;
        const u64 d = divs[uniform_below(gen, divs.size())];
        const u64 m = n / d;
        std::vector<u64> units;
        for (u64 y = 0; y < m; ++y)
            if (std::gcd(y, m) == 1 || m == 1) units.push_back(y);
        std::shuffle(units.begin(), units.end(), gen);
        units.resize(std::min<std::size_t>(units.size(),
                                           1 + uniform_below(gen, 8)));
        std::sort(units.begin(), units.end());
        const GcdLayer layer{d, m, units};
        const auto basket = build_prime_basket(m, 2 + uniform_below(gen, 5));
        const u64 t = divs[uniform_below(gen, divs.size())];
        const u64 a = 1 + uniform_below(gen, p - 1);
        const u64 x = uniform_below(gen, n);
        const double phase = 0.05 * double(1 + uniform_below(gen, 60));
        const auto gamma = [phase](u64 y) {
            return std::polar(0.9, phase * double(y));
        };
        const auto sides =
            uv_representation_check(layer, basket, gamma, a, t, d, ctx, x);
        if (std::abs(sides.lhs - sides.rhs) >
            1e-9 * std::max(1.0, std::abs(sides.lhs)))
            return {false, "sides differ at p=" + std::to_string(p) +
                               " d=" + std::to_string(d) +
                               " instance " + std::to_string(i)};
    }
    return {true, "100 instances, both sides to 1e-9 relative"};
}

// 6. W <= sum of layer sums; layers partition Y.
Outcome criterion_decomposition() {
    const std::vector<u64> ps = {13, 31, 101, 499};
    std::mt19937_64 gen(106);
    for (int i = 0; i < 100; ++i) {
        const u64 p = ps[i % ps.size()];
        const auto ctx = make_prime_context(p);
        const u64 n = p - 1;
        const auto& divs = ctx.divisors_of_p_minus_1;
        const u64 T = divs[uniform_below(gen, divs.size())];
        const auto elem = element_of_order(ctx, T);
        const u64 cap = std::min<u64>(50, n);
        const auto X = subset_random(n, 1 + uniform_below(gen, cap), gen());
        const auto Y = with_unimodular_gamma(
            subset_random(n, 1 + uniform_below(gen, cap), gen()), gen());
        const u64 a = 1 + uniform_below(gen, p - 1);
        const double w = w_sum(make_sum_spec(ctx, elem, a, X, Y, 1));
        const auto layers = gcd_decompose(Y, ctx);
        std::size_t total = 0;
        double rsum = 0.0;
        for (const auto& [d, layer] : layers) {
            total += layer.size();
            rsum += r_sum(ctx, elem, a, d, X, layer.elements,
                          gamma_from_subset(Y));
        }
        if (total != Y.size())
            return {false, "layer sizes do not add up at p=" +
                               std::to_string(p)};
        if (w > rsum + 1e-6)
            return {false, "w exceeds layer sum at p=" + std::to_string(p) +
                               " T=" + std::to_string(T)};
    }
    return {true, "100 instances, w <= sum of layer sums"};
}

// 7. Powers g^{nx} and z^{gcd(n,p-1)} run the same residues.
Outcome criterion_residues() {
    const auto out = detail::check_residue_equivalence(VerifyScale::full, 1);
    return {out.pass, out.detail};
}

// 8. Lifted sum = ((p-1)/T)^2 times the base sum.
Outcome criterion_lift() {
    const auto out = detail::check_lift_scaling(VerifyScale::full, 1);
    return {out.pass, out.detail};
}

// 9. Formula identities: theorem1 at the full torus is cor1; the
// nontriviality exponent is (3k+2)/(4k+2) and tends to 3/4.
Outcome criterion_formulas() {
    std::mt19937_64 gen(109);
    for (int i = 0; i < 100; ++i) {
        BoundParams P;
        P.size_x = 1 + double(gen() % 1000000);
        P.size_y = 1 + double(gen() % 1000000);
        P.p = 2 + double(gen() % (u64(1) << 40));
        P.T = P.p;
        P.k = 1 + int(gen() % 10);
        const long double t1 = evaluate_bound(BoundId::theorem1, P);
        const long double c1 = evaluate_bound(BoundId::cor1, P);
        if (std::abs(t1 - c1) > 1e-12L * std::max(t1, c1))
            return {false, "theorem1 != cor1 at draw " + std::to_string(i)};
    }
    for (int k = 1; k <= 1000; ++k) {
        const long double expect =
            (3.0L * k + 2.0L) / (4.0L * k + 2.0L);
        if (std::abs(nontriviality_threshold(k) - expect) > 1e-18L)
            return {false, "threshold formula wrong at k=" + std::to_string(k)};
    }
    if (std::abs(double(nontriviality_threshold(1000)) - 0.75) >= 1e-3)
        return {false, "threshold limit misses 3/4"};
    // Semantic boundary: at |X| = |Y| = p^alpha(k), T = p, cor1 meets the
    // trivial bound; above it the bound wins, below it the trivial wins.
    for (int k = 1; k <= 5; ++k) {
        const long double alpha = nontriviality_threshold(k);
        const long double p = 1e6L;
        const auto bound_at = [&](long double e) {
            BoundParams P;
            P.size_x = std::pow(p, e);
            P.size_y = P.size_x;
            P.p = p;
            P.T = p;
            P.k = k;
            return evaluate_bound(BoundId::cor1, P) /
                   (P.size_x * P.size_y);
        };
        if (std::abs(bound_at(alpha) - 1.0L) > 1e-6L)
            return {false, "boundary not at alpha for k=" + std::to_string(k)};
        if (bound_at(alpha + 0.02L) >= 1.0L || bound_at(alpha - 0.02L) <= 1.0L)
            return {false, "boundary not separating at k=" + std::to_string(k)};
    }
    return {true, "cor1 identity, threshold formula, 3/4 limit, boundary"};
}

// 10. Below the T-threshold the theorem bound dominates |X||Y|.
Outcome criterion_trivial_chain() {
    const auto out = detail::check_threshold_chain(VerifyScale::full, 1);
    return {out.pass, out.detail};
}

// 11. The headline sweep: ratios finite, exact within the trivial bound.
Outcome criterion_sweep_report() {
    const auto cfg = parse_config(
        R"({"k":[1,2,3],"seed":20260817,)"
        R"("sweep":{"p":[101,499,1009,4999],"densities":[0.75,0.9,"full"]}})");
    const auto rec = run_experiment(cfg, 2);
    if (rec.cells.size() != 36)
        return {false, cat_counter("cells, expected 36", rec.cells.size())};
    for (const auto& cell : rec.cells) {
        if (!cell.ok)
            return {false, "cell failed: " + cell.error};
        const auto& r = cell.report;
        for (const auto& [id, ratio] : r.ratios)
            if (!std::isfinite(double(ratio)))
                return {false, std::string("non-finite ratio for ") +
                                   to_string(id)};
        if (r.exact >
            double(r.size_x) * double(r.size_y) * (1 + 1e-9))
            return {false, "exact exceeds trivial at p=" +
                               std::to_string(r.p)};
    }
    const auto csv = render_csv(rec);
    std::ofstream out("acceptance_sweep.csv");
    out << csv;
    if (!out)
        return {false, "could not write acceptance_sweep.csv"};
    u64 lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    if (lines != 37)
        return {false, cat_counter("csv lines, expected 37", lines)};
    return {true, "36 cells, ratios finite, csv written"};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
    double budget_seconds;  // 0: no cap stated
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "oracle equivalence", criterion_oracle_equivalence, 10},
        {2, "degenerate S = p-1", criterion_degenerate_identity, 30},
        {3, "weil bound, exhaustive", criterion_weil, 300},
        {4, "congruence count = ell", criterion_congruence, 0},
        {5, "uv representation identity", criterion_representation, 0},
        {6, "layer decomposition bound", criterion_decomposition, 0},
        {7, "residue system equality", criterion_residues, 0},
        {8, "lift scaling identity", criterion_lift, 0},
        {9, "bound formula identities", criterion_formulas, 0},
        {10, "below-threshold chain", criterion_trivial_chain, 0},
        {11, "empirical ratio sweep", criterion_sweep_report, 600},
    };

    bool all = true;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        bool pass = out.pass;
        std::string note = out.note;
        if (pass && c.budget_seconds > 0 && secs > c.budget_seconds) {
            pass = false;
            note += " [over time budget]";
        }
        all = all && pass;
        std::printf("[%s] criterion %2d: %-28s (%6.1fs) %s\n",
                    pass ? "PASS" : "FAIL", c.id, c.name, secs, note.c_str());
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES PRESENT");
    return all ? 0 : 1;
}
