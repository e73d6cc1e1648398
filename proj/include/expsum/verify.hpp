#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "experiment.hpp"
#include "proof.hpp"
#include "sums.hpp"

namespace expsum {

// Self-check registry: every library invariant is re-verified here from
// scratch, at two scales. Smoke keeps within a minute single-threaded;
// full runs the exhaustive small-prime corpora.

enum class VerifyScale { smoke, full };

inline std::optional<VerifyScale> verify_scale_from_string(
    const std::string& s) {
    if (s == "smoke") return VerifyScale::smoke;
    if (s == "full") return VerifyScale::full;
    return std::nullopt;
}

struct CheckOutcome {
    bool pass = true;
    std::string detail;  // counterexample on failure, note otherwise
};

struct CheckResult {
    std::string module;
    std::string invariant;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifySummary {
    VerifyScale scale = VerifyScale::smoke;
    std::vector<CheckResult> checks;
    bool all_pass = true;
    double seconds = 0.0;
};

namespace detail {

template <class... A>
std::string cat(A&&... a) {
    std::ostringstream o;
    (o << ... << a);
    return o.str();
}

inline std::string tuple_str(const std::vector<u64>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> ps;
    for (u64 n = 2; n <= limit; ++n)
        if (is_prime(n)) ps.push_back(n);
    return ps;
}

inline CheckOutcome fail(std::string detail) {
    return {false, std::move(detail)};
}

// --- ring checks ---------------------------------------------------------

inline CheckOutcome check_element_orders(VerifyScale scale, unsigned) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{7, 13, 101, 199, 211}
                                    : primes_up_to(211);
    u64 pairs = 0;
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        for (u64 T : ctx.divisors_of_p_minus_1) {
            const auto elem = element_of_order(ctx, T);
            if (multiplicative_order(elem.lambda, ctx) != T)
                return fail(cat("order mismatch at p=", p, " T=", T));
            ++pairs;
        }
    }
    return {true, cat(pairs, " (p,T) pairs")};
}

inline CheckOutcome check_pow_iteration(VerifyScale scale, unsigned) {
    const u64 B = scale == VerifyScale::smoke ? 40 : 100;
    const u64 E = scale == VerifyScale::smoke ? 25 : 50;
    for (u64 m = 1; m <= B; ++m) {
        for (u64 b = 0; b <= B; ++b) {
            u64 expect = 1 % m;
            for (u64 e = 0; e <= E; ++e) {
                if (pow_mod(b, e, m) != expect)
                    return fail(cat("pow_mod(", b, ",", e, ",", m, ") != ",
                                    expect));
                expect = mul_mod(expect, b % m, m);
            }
        }
    }
    return {true, cat("b,m <= ", B, ", e <= ", E)};
}

inline CheckOutcome check_totient_partition(VerifyScale, unsigned) {
    const auto sum_over_divisors = [](u64 n) {
        u64 sum = 0;
        for (u64 d : divisors_from(factorize(n))) sum += euler_phi(d);
        return sum;
    };
    for (u64 n = 1; n <= 2000; ++n)
        if (sum_over_divisors(n) != n)
            return fail(cat("totient sum mismatch at n=", n));
    for (u64 p : primes_up_to(211))
        if (sum_over_divisors(p - 1) != p - 1)
            return fail(cat("totient sum mismatch at p-1 for p=", p));
    return {true, "n <= 2000 and all p <= 211"};
}

inline CheckOutcome check_factor_roundtrip(VerifyScale scale, unsigned) {
    const auto verify_one = [](u64 n) -> bool {
        const auto fs = factorize(n);
        if (product_of(fs) != n) return false;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (!is_prime(fs[i].prime) || fs[i].exponent == 0) return false;
            if (i > 0 && fs[i - 1].prime >= fs[i].prime) return false;
        }
        return true;
    };
    if (scale == VerifyScale::full) {
        for (u64 n = 1; n <= 1000000; ++n)
            if (!verify_one(n)) return fail(cat("factorization broken at n=", n));
        return {true, "all n <= 10^6"};
    }
    for (u64 n = 1; n <= 20000; ++n)
        if (!verify_one(n)) return fail(cat("factorization broken at n=", n));
    std::mt19937_64 gen(2024);
    for (int i = 0; i < 500; ++i) {
        const u64 n = 1 + uniform_below(gen, 1000000);
        if (!verify_one(n)) return fail(cat("factorization broken at n=", n));
    }
    return {true, "n <= 20000 plus 500 samples <= 10^6"};
}

// --- sum engine checks ---------------------------------------------------

inline CheckOutcome check_unit_circle(VerifyScale, unsigned) {
    const std::vector<u64> ms = {1, 2, 3, 7, 101, 4096, 65536, 1000003};
    for (u64 m : ms) {
        const i64 im = static_cast<i64>(m);
        const std::vector<i64> zs = {0,      1,      im - 1, im,     im + 1,
                                     2 * im + 5, -1, -im,    -3 * im + 2};
        for (i64 z : zs) {
            const auto r = unit_root(m, z);
            if (std::abs(std::abs(r) - 1.0) > 1e-12)
                return fail(cat("|e_m| off circle at m=", m, " z=", z));
            if (unit_root(m, z + im) != r || unit_root(m, z - im) != r)
                return fail(cat("periodicity broken at m=", m, " z=", z));
        }
    }
    return {true, cat(ms.size(), " moduli, signed arguments")};
}

inline CheckOutcome check_triangle_bound(VerifyScale scale, unsigned threads) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{101, 499}
                                    : std::vector<u64>{101, 499, 1009};
    const int draws = scale == VerifyScale::smoke ? 12 : 60;
    std::mt19937_64 gen(31);
    for (int i = 0; i < draws; ++i) {
        const u64 p = ps[uniform_below(gen, ps.size())];
        const auto ctx = make_prime_context(p);
        const auto& divs = ctx.divisors_of_p_minus_1;
        const u64 T = divs[uniform_below(gen, divs.size())];
        const auto elem = element_of_order(ctx, T);
        const u64 cap = std::min<u64>(80, p - 1);
        const u64 sx = 1 + uniform_below(gen, cap);
        const u64 sy = 1 + uniform_below(gen, cap);
        const auto X = subset_random(p - 1, sx, gen());
        const auto Y = with_unimodular_gamma(subset_random(p - 1, sy, gen()),
                                             gen());
        const u64 a = 1 + uniform_below(gen, p - 1);
        const double w =
            w_sum(make_sum_spec(ctx, elem, a, X, Y, 1), threads);
        if (w < 0.0 || w > double(sx) * double(sy) * (1 + 1e-9))
            return fail(cat("triangle bound broken at p=", p, " T=", T,
                            " |X|=", sx, " |Y|=", sy, " w=", w));
    }
    return {true, cat(draws, " seeded draws")};
}

inline CheckOutcome check_conjugate_pair(VerifyScale scale, unsigned threads) {
    const int draws = scale == VerifyScale::smoke ? 8 : 30;
    std::mt19937_64 gen(32);
    for (int i = 0; i < draws; ++i) {
        const u64 p = (i % 2 == 0) ? 101 : 499;
        const auto ctx = make_prime_context(p);
        const auto elem = element_of_order(ctx, p - 1);
        const auto X = subset_random(p - 1, 1 + uniform_below(gen, 40), gen());
        const auto Y = subset_random(p - 1, 1 + uniform_below(gen, 40), gen());
        const u64 a = 1 + uniform_below(gen, p - 1);
        const double wa = w_sum(make_sum_spec(ctx, elem, a, X, Y, 1), threads);
        const double wb =
            w_sum(make_sum_spec(ctx, elem, p - a, X, Y, 1), threads);
        if (std::abs(wa - wb) > 1e-9 * std::max(1.0, wa))
            return fail(cat("conjugate mismatch at p=", p, " a=", a, ": ", wa,
                            " vs ", wb));
    }
    return {true, cat(draws, " (a, p-a) pairs with gamma = 1")};
}

inline CheckOutcome check_degenerate_complete_sums(VerifyScale scale,
                                                   unsigned) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{7, 31, 101}
                                    : primes_up_to(101);
    const u64 ell = scale == VerifyScale::smoke ? 3 : 4;
    const int k_max = scale == VerifyScale::smoke ? 2 : 3;
    const std::vector<u64> ds = scale == VerifyScale::smoke
                                    ? std::vector<u64>{1}
                                    : std::vector<u64>{1, 2};
    u64 tuples = 0;
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        for (u64 d : ds) {
            if ((p - 1) % d != 0) continue;
            const auto basket = build_prime_basket((p - 1) / d, ell);
            for (int k = 1; k <= k_max; ++k) {
                if (u64(k) >= p) continue;
                const std::size_t half = std::size_t(k);
                std::vector<std::size_t> idx(half, 0);
                while (true) {
                    std::vector<u64> head(half);
                    for (std::size_t i = 0; i < half; ++i)
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
                            return fail(cat("S != p-1 at p=", p, " d=", d,
                                            " t=", t, " v=", tuple_str(v)));
                    } while (std::next_permutation(perm.begin(), perm.end()));
                    std::size_t i = 0;
                    for (; i < half; ++i) {
                        if (++idx[i] < basket.primes.size()) break;
                        idx[i] = 0;
                    }
                    if (i == half) break;
                }
            }
        }
    }
    return {true, cat(tuples, " degenerate tuples")};
}

inline CheckOutcome check_moment_expansion(VerifyScale scale, unsigned) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{13, 31}
                                    : std::vector<u64>{13, 31, 101};
    std::mt19937_64 gen(33);
    u64 instances = 0;
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        const auto gamma_host =
            with_unimodular_gamma(subset_full(p - 1), gen());
        const auto gamma = gamma_from_subset(gamma_host);
        for (u64 d : {u64(1), u64(2)}) {
            if ((p - 1) % d != 0) continue;
            const u64 m = (p - 1) / d;
            std::vector<u64> units;
            for (u64 y = 0; y < m; ++y)
                if (std::gcd(y, m) == 1 || m == 1) units.push_back(y);
            if (units.empty()) continue;
            const auto basket = build_prime_basket(m, 3);
            for (int k : {1, 2}) {
                if (u64(k) >= p) continue;
                std::vector<u64> layer = units;
                std::shuffle(layer.begin(), layer.end(), gen);
                layer.resize(std::min<std::size_t>(layer.size(), 4));
                const u64 u = units[uniform_below(gen, units.size())];
                const auto mres = moment_M_u(u, basket.primes, layer, gamma,
                                             3 % p, 1, d, k, ctx);
                ++instances;
                if (std::abs(mres.direct - mres.expanded) >
                    1e-6 * std::max(1.0, std::abs(mres.direct)))
                    return fail(cat("moment mismatch at p=", p, " d=", d,
                                    " k=", k, " u=", u, ": ", mres.direct,
                                    " vs ", mres.expanded));
            }
        }
    }
    return {true, cat(instances, " moment instances, both routes")};
}

inline CheckOutcome check_order_robustness(VerifyScale, unsigned threads) {
    const auto ctx = make_prime_context(499);
    const auto elem = element_of_order(ctx, 498);
    std::mt19937_64 gen(34);
    const auto canon = with_unimodular_gamma(subset_random(498, 60, 77), 78);
    const double reference =
        w_sum(make_sum_spec(ctx, elem, 5, canon, canon, 1), threads);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<std::size_t> order(canon.elements.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), gen);
        std::vector<u64> elems;
        std::vector<std::complex<double>> gam;
        for (std::size_t i : order) {
            elems.push_back(canon.elements[i]);
            gam.push_back(canon.gamma[i]);
        }
        const auto shuffled = make_weighted_subset(498, elems, gam);
        const double w =
            w_sum(make_sum_spec(ctx, elem, 5, shuffled, shuffled, 1), threads);
        if (w != reference)
            return fail(cat("storage order changed w_sum: ", w, " vs ",
                            reference));
    }
    return {true, "3 shuffles, bitwise equal"};
}

// --- proof machinery checks ----------------------------------------------

inline CheckOutcome check_layer_partition(VerifyScale scale, unsigned) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{101, 499, 1009}
                                    : primes_up_to(1009);
    std::mt19937_64 gen(35);
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        std::vector<WeightedSubset> ys;
        ys.push_back(subset_random(p - 1, std::min<u64>(200, p - 1), gen()));
        if (p <= 101) ys.push_back(subset_full(p - 1));
        for (const auto& Y : ys) {
            const auto layers = gcd_decompose(Y, ctx);
            std::size_t total = 0;
            std::vector<u64> rebuilt;
            for (const auto& [d, layer] : layers) {
                if (layer.modulus != (p - 1) / d)
                    return fail(cat("layer modulus wrong at p=", p, " d=", d));
                for (u64 e : layer.elements) {
                    if (layer.modulus > 1 && std::gcd(e, layer.modulus) != 1)
                        return fail(cat("non-unit layer element at p=", p,
                                        " d=", d, " e=", e));
                    rebuilt.push_back(d * e);
                }
                total += layer.size();
            }
            if (total != Y.size())
                return fail(cat("layer sizes do not add up at p=", p));
            std::sort(rebuilt.begin(), rebuilt.end());
            if (rebuilt != Y.elements)
                return fail(cat("layers do not reconstruct Y at p=", p));
        }
    }
    return {true, cat(ps.size(), " primes, partition and reconstruction")};
}

inline CheckOutcome check_congruence_exact(VerifyScale scale, unsigned) {
    const u64 M = scale == VerifyScale::smoke ? 60 : 210;
    const u64 L = scale == VerifyScale::smoke ? 8 : 20;
    u64 cases = 0;
    for (u64 m = 1; m <= M; ++m) {
        const auto full = build_prime_basket(m, L);
        for (u64 ell = 1; ell <= L; ++ell) {
            const PrimeBasketV basket{
                m, ell,
                {full.primes.begin(),
                 full.primes.begin() + static_cast<std::ptrdiff_t>(ell)}};
            for (u64 y = 0; y < m; ++y) {
                if (std::gcd(y, m) != 1 && m > 1) continue;
                if (count_congruence_solutions(y, basket, m) != ell)
                    return fail(cat("count != ell at m=", m, " ell=", ell,
                                    " y=", y));
                ++cases;
            }
        }
    }
    return {true, cat(cases, " (y, modulus, basket) cases")};
}

inline CheckOutcome check_decomposition_bound(VerifyScale scale,
                                              unsigned threads) {
    std::vector<std::pair<u64, u64>> pts = {{101, 100}, {101, 20}, {499, 498}};
    if (scale == VerifyScale::full) {
        pts.insert(pts.end(), {{13, 12},
                               {13, 4},
                               {31, 30},
                               {31, 6},
                               {499, 249},
                               {499, 166}});
    }
    std::mt19937_64 gen(36);
    for (const auto& [p, T] : pts) {
        const auto ctx = make_prime_context(p);
        const auto elem = element_of_order(ctx, T);
        for (int rep = 0; rep < 2; ++rep) {
            const u64 n = p - 1;
            const auto X = subset_random(n, std::min<u64>(50, n), gen());
            const auto Y = with_unimodular_gamma(
                subset_random(n, std::min<u64>(50, n), gen()), gen());
            const u64 a = 1 + uniform_below(gen, p - 1);
            const double w =
                w_sum(make_sum_spec(ctx, elem, a, X, Y, 1), threads);
            const auto layers = gcd_decompose(Y, ctx);
            std::size_t total = 0;
            double rsum = 0.0;
            for (const auto& [d, layer] : layers) {
                total += layer.size();
                rsum += r_sum(ctx, elem, a, d, X, layer.elements,
                              gamma_from_subset(Y), threads);
            }
            if (total != Y.size())
                return fail(cat("layer total != |Y| at p=", p));
            if (w > rsum + 1e-6)
                return fail(cat("w exceeds layer sum at p=", p, " T=", T,
                                ": ", w, " > ", rsum));
        }
    }
    return {true, cat(pts.size(), " (p,T) points, 2 draws each")};
}

inline CheckOutcome check_residue_equivalence(VerifyScale scale, unsigned) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{7, 13, 31, 101}
                                    : primes_up_to(101);
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        for (u64 n = 1; n < p; ++n)
            if (!residue_system_check(n, ctx))
                return fail(cat("residue systems differ at p=", p, " n=", n));
    }
    return {true, cat(ps.size(), " primes, every exponent")};
}

inline CheckOutcome check_lift_scaling(VerifyScale scale, unsigned threads) {
    const std::vector<u64> ps = scale == VerifyScale::smoke
                                    ? std::vector<u64>{7, 13}
                                    : std::vector<u64>{7, 13, 101};
    std::mt19937_64 gen(37);
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        for (u64 T : ctx.divisors_of_p_minus_1) {
            const auto bx =
                subset_random(T, std::max<u64>(1, T / 2), gen()).elements;
            const auto by =
                subset_random(T, std::max<u64>(1, T / 2), gen()).elements;
            const double phase = 0.1 * double(1 + uniform_below(gen, 50));
            const auto gamma = [T, phase](u64 y) {
                return std::polar(1.0, phase * double(y % T));
            };
            const auto pair =
                lift_identity_check(ctx, T, 1 + uniform_below(gen, p - 1), bx,
                                    by, gamma, 1, threads);
            const double expect =
                double(pair.copies) * double(pair.copies) * pair.w_base;
            if (std::abs(pair.w_lifted - expect) >
                1e-9 * std::max(1.0, pair.w_lifted))
                return fail(cat("lift scaling broken at p=", p, " T=", T,
                                ": ", pair.w_lifted, " vs ", expect));
        }
    }
    return {true, cat(ps.size(), " primes, every divisor T")};
}

inline CheckOutcome check_basket_growth(VerifyScale scale, unsigned) {
    std::vector<u64> ells = {5, 10, 20};
    if (scale == VerifyScale::full) ells.push_back(50);
    long double worst = 0.0L;
    u64 worst_m = 0, worst_ell = 0;
    for (u64 m : {u64(6), u64(30), u64(100), u64(210), u64(498), u64(1008)}) {
        for (u64 ell : ells) {
            const auto basket = build_prime_basket(m, ell);
            if (basket.primes.size() != ell)
                return fail(cat("basket size wrong at m=", m, " ell=", ell));
            for (std::size_t i = 0; i < basket.primes.size(); ++i) {
                const u64 q = basket.primes[i];
                if (!is_prime(q) || (m > 1 && std::gcd(q, m) != 1))
                    return fail(cat("bad basket prime ", q, " at m=", m));
                if (i > 0 && basket.primes[i - 1] >= q)
                    return fail(cat("basket not increasing at m=", m));
            }
            const long double c =
                static_cast<long double>(basket.primes.back()) /
                (static_cast<long double>(ell) *
                 std::log(static_cast<long double>(ell) *
                          static_cast<long double>(m)));
            if (c > worst) {
                worst = c;
                worst_m = m;
                worst_ell = ell;
            }
        }
    }
    return {true, cat("max empirical growth constant ", double(worst), " at m=",
                      worst_m, " ell=", worst_ell, " (reported, not asserted)")};
}

// --- bound catalog checks ------------------------------------------------

inline CheckOutcome check_theorem1_cor1(VerifyScale, unsigned) {
    std::mt19937_64 gen(38);
    for (int i = 0; i < 100; ++i) {
        BoundParams P;
        P.size_x = 1 + double(gen() % 1000000);
        P.size_y = 1 + double(gen() % 1000000);
        P.p = 2 + double(gen() % (u64(1) << 40));
        P.T = P.p;  // full torus
        P.k = 1 + int(gen() % 10);
        const long double t1 = evaluate_bound(BoundId::theorem1, P);
        const long double c1 = evaluate_bound(BoundId::cor1, P);
        if (std::abs(t1 - c1) > 1e-12L * std::max(t1, c1))
            return fail(cat("theorem1 != cor1 at k=", P.k, " p=",
                            double(P.p)));
    }
    return {true, "100 draws, k <= 10, 1e-12 relative"};
}

inline CheckOutcome check_cor2_consistency(VerifyScale, unsigned) {
    std::mt19937_64 gen(39);
    for (u64 p : {u64(101), u64(499)}) {
        const auto ctx = make_prime_context(p);
        for (u64 T : ctx.divisors_of_p_minus_1) {
            if (T == 1 || T == p - 1) continue;
            for (int k : {1, 2, 3}) {
                const long double copies =
                    static_cast<long double>(p - 1) / T;
                BoundParams L;
                L.size_x = copies * (1 + double(gen() % T));
                L.size_y = copies * (1 + double(gen() % T));
                L.p = double(p);
                L.T = double(T);
                L.k = k;
                BoundParams B = L;
                B.size_x /= copies;
                B.size_y /= copies;
                const long double lifted =
                    evaluate_bound(BoundId::theorem1, L) / (copies * copies);
                const long double base = evaluate_bound(BoundId::cor2, B);
                const long double residual = std::pow(
                    L.p / (L.p - 1), 1.0L / (2 * k) + 1.0L / (2 * k + 2));
                if (std::abs(lifted - base * residual) > 1e-9L * base)
                    return fail(cat("cor2 mismatch at p=", p, " T=", T,
                                    " k=", k));
            }
        }
    }
    return {true, "all proper divisors of p-1 at p in {101, 499}"};
}

struct WeilSweep {
    u64 tuples = 0;
    u64 distinct_polys = 0;
    std::string counterexample;  // empty when no violation found
};

// Exhaustive Weil comparison over basket tuples. The fault switch models a
// checker whose degeneracy guard was deleted: the degree is then read off
// the collapsed polynomial, which is empty for a degenerate tuple, so the
// bound collapses to zero while |S| = p-1. Every degenerate tuple must then
// surface as a counterexample; the switch exists so the suite's own failure
// path can be exercised.
inline WeilSweep weil_sweep(const std::vector<u64>& ps, u64 ell, int k_max,
                            const std::vector<u64>& ds,
                            bool treat_degenerate_as_valid,
                            unsigned threads = 1) {
    WeilSweep out;
    for (u64 p : ps) {
        const auto ctx = make_prime_context(p);
        const UnitRootTable table(p);
        std::map<std::map<u64, long long>, std::complex<double>> cache;
        for (u64 d : ds) {
            if ((p - 1) % d != 0) continue;
            const auto basket = build_prime_basket((p - 1) / d, ell);
            for (u64 T : ctx.divisors_of_p_minus_1) {
                const u64 t = (p - 1) / T;
                for (int k = 1; k <= k_max; ++k) {
                    if (u64(k) >= p) continue;
                    const std::size_t arity = 2 * std::size_t(k);
                    std::vector<std::size_t> idx(arity, 0);
                    std::vector<u64> v(arity);
                    while (true) {
                        for (std::size_t i = 0; i < arity; ++i)
                            v[i] = basket.primes[idx[i]];
                        ++out.tuples;
                        const auto poly = collapse_exponents(v, t, d, p);
                        if (!poly.degenerate || treat_degenerate_as_valid) {
                            std::complex<double> S;
                            const auto it = cache.find(poly.coeffs);
                            if (it != cache.end()) {
                                S = it->second;
                            } else {
                                S = complete_sum_S(v, 1, t, d, ctx, table,
                                                   threads);
                                cache.emplace(poly.coeffs, S);
                                ++out.distinct_polys;
                            }
                            const long double bound =
                                poly.degenerate ? 0.0L
                                                : weil_bound_sparse(v, t, d, p);
                            if (std::abs(S) >
                                double(bound) * (1 + 1e-9) + 1e-9) {
                                out.counterexample =
                                    cat("p=", p, " d=", d, " t=", t,
                                        " v=", tuple_str(v),
                                        " |S|=", std::abs(S),
                                        " bound=", double(bound));
                                return out;
                            }
                        }
                        std::size_t i = 0;
                        for (; i < arity; ++i) {
                            if (++idx[i] < basket.primes.size()) break;
                            idx[i] = 0;
                        }
                        if (i == arity) break;
                    }
                }
            }
        }
    }
    return out;
}

inline CheckOutcome check_weil_exhaustive(VerifyScale scale,
                                          unsigned threads) {
    const auto ps = scale == VerifyScale::smoke
                        ? std::vector<u64>{7, 13, 31, 61}
                        : primes_up_to(211);
    const u64 ell = scale == VerifyScale::smoke ? 3 : 5;
    const auto ds = scale == VerifyScale::smoke ? std::vector<u64>{1}
                                                : std::vector<u64>{1, 2};
    const auto sweep = weil_sweep(ps, ell, 2, ds, false, threads);
    if (!sweep.counterexample.empty())
        return fail(cat("Weil bound violated: ", sweep.counterexample));
    return {true, cat(sweep.tuples, " tuples, ", sweep.distinct_polys,
                      " distinct polynomials, zero violations")};
}

inline CheckOutcome check_nontriviality_range(VerifyScale, unsigned) {
    long double prev = 1.0L;
    for (int k = 1; k <= 1000; ++k) {
        const long double a = nontriviality_threshold(k);
        if (a <= 0.75L || a > 5.0L / 6)
            return fail(cat("threshold out of range at k=", k));
        if (a >= prev && k > 1)
            return fail(cat("threshold not decreasing at k=", k));
        prev = a;
    }
    return {true, "k <= 1000 inside (3/4, 5/6], strictly decreasing"};
}

inline CheckOutcome check_threshold_chain(VerifyScale, unsigned) {
    std::mt19937_64 gen(40);
    int below = 0, attempts = 0;
    while (below < 1000 && attempts < 50000) {
        ++attempts;
        u64 p = 101 + 2 * uniform_below(gen, 10000);
        if (!is_prime(p)) continue;
        const long double x = 1 + double(uniform_below(gen, p - 1));
        const long double y = 1 + double(uniform_below(gen, p - 1));
        const long double T = 1 + double(uniform_below(gen, 30));
        const int k = 1 + int(uniform_below(gen, 3));
        const auto r = trivial_regime_check(x, y, double(p), T, k);
        if (!r.below_threshold) continue;
        ++below;
        if (r.bound_value < r.trivial_value * (1 - 1e-9L))
            return fail(cat("chain violated at p=", double(p), " |X|=",
                            double(x), " |Y|=", double(y), " T=", double(T),
                            " k=", k));
    }
    if (below < 1000)
        return fail(cat("only ", below, " below-threshold draws found"));
    return {true, "1000 below-threshold draws, bound >= |X||Y|"};
}

// --- CLI plumbing checks --------------------------------------------------

inline const char* verify_sweep_config() {
    return R"({"k":[1,2],"seed":17,"gamma":{"kind":"random","seed":4},)"
           R"("sweep":{"p":[101],"densities":[0.7,"full"],"T":["max",20]}})";
}

inline CheckOutcome check_csv_determinism(VerifyScale, unsigned) {
    const auto cfg = parse_config(verify_sweep_config());
    const auto c1 = render_csv(run_experiment(cfg, 1));
    const auto c2 = render_csv(run_experiment(cfg, 1));
    const auto c3 = render_csv(run_experiment(cfg, 2));
    if (c1 != c2) return fail("repeat run changed the CSV");
    if (c1 != c3) return fail("thread count changed the CSV");
    return {true, cat(c1.size(), " bytes, identical across runs and threads")};
}

inline CheckOutcome check_emit_trivial_guard(VerifyScale, unsigned) {
    const auto cfg = parse_config(verify_sweep_config());
    const auto rec = run_experiment(cfg, 1);
    const auto csv = render_csv(rec);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    u64 rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != 18)
            return fail(cat("row has ", fields.size(), " columns: ", line));
        const double sx = std::stod(fields[3]);
        const double sy = std::stod(fields[4]);
        const double exact = std::stod(fields[5]);
        if (exact > sx * sy * (1 + 1e-9))
            return fail(cat("row exceeds trivial bound: ", line));
    }
    u64 ok_cells = 0;
    for (const auto& cell : rec.cells)
        if (cell.ok) ++ok_cells;
    if (rows != ok_cells)
        return fail(cat(rows, " rows vs ", ok_cells, " successful cells"));
    return {true, cat(rows, " rows within the trivial bound")};
}

inline CheckOutcome check_config_snapshot(VerifyScale, unsigned) {
    const auto cfg = parse_config(verify_sweep_config());
    const auto rec = run_experiment(cfg, 1);
    if (!(rec.config == cfg)) return fail("record snapshot differs from config");
    if (serialize_config(rec.config) != serialize_config(cfg))
        return fail("snapshot serialization differs");
    if (!(parse_config(serialize_config(cfg)) == cfg))
        return fail("config does not round-trip");
    return {true, "snapshot and round trip are the identity"};
}

}  // namespace detail

inline VerifySummary run_verification_suite(VerifyScale scale,
                                            unsigned threads = 1) {
    using Fn = CheckOutcome (*)(VerifyScale, unsigned);
    struct Entry {
        const char* module;
        const char* invariant;
        Fn fn;
    };
    static const Entry registry[] = {
        {"ring", "element-order", detail::check_element_orders},
        {"ring", "pow-iteration", detail::check_pow_iteration},
        {"ring", "totient-partition", detail::check_totient_partition},
        {"ring", "factor-roundtrip", detail::check_factor_roundtrip},
        {"sums", "unit-circle", detail::check_unit_circle},
        {"sums", "triangle-bound", detail::check_triangle_bound},
        {"sums", "conjugate-pair", detail::check_conjugate_pair},
        {"sums", "degenerate-complete-sum",
         detail::check_degenerate_complete_sums},
        {"sums", "moment-expansion", detail::check_moment_expansion},
        {"sums", "order-robustness", detail::check_order_robustness},
        {"proof", "layer-partition", detail::check_layer_partition},
        {"proof", "congruence-count", detail::check_congruence_exact},
        {"proof", "decomposition-bound", detail::check_decomposition_bound},
        {"proof", "residue-equivalence", detail::check_residue_equivalence},
        {"proof", "lift-scaling", detail::check_lift_scaling},
        {"proof", "basket-growth", detail::check_basket_growth},
        {"bounds", "theorem1-cor1-identity", detail::check_theorem1_cor1},
        {"bounds", "cor2-consistency", detail::check_cor2_consistency},
        {"bounds", "weil-exhaustive", detail::check_weil_exhaustive},
        {"bounds", "nontriviality-range", detail::check_nontriviality_range},
        {"bounds", "threshold-chain", detail::check_threshold_chain},
        {"cli", "csv-determinism", detail::check_csv_determinism},
        {"cli", "emit-trivial-guard", detail::check_emit_trivial_guard},
        {"cli", "config-snapshot", detail::check_config_snapshot},
    };

    using clock = std::chrono::steady_clock;
    VerifySummary summary;
    summary.scale = scale;
    const auto start = clock::now();
    for (const Entry& entry : registry) {
        const auto t0 = clock::now();
        CheckResult r;
        r.module = entry.module;
        r.invariant = entry.invariant;
        try {
            const CheckOutcome out = entry.fn(scale, threads);
            r.pass = out.pass;
            r.detail = out.detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = detail::cat("exception: ", e.what());
        }
        r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        summary.all_pass = summary.all_pass && r.pass;
        summary.checks.push_back(std::move(r));
    }
    summary.seconds =
        std::chrono::duration<double>(clock::now() - start).count();
    return summary;
}

inline std::string to_text(const VerifySummary& summary) {
    std::ostringstream out;
    std::size_t passed = 0;
    for (const CheckResult& r : summary.checks) {
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.module << '.'
            << r.invariant;
        char buf[32];
        std::snprintf(buf, sizeof buf, " (%.2fs)", r.seconds);
        out << buf;
        if (!r.detail.empty()) out << ": " << r.detail;
        out << '\n';
        if (r.pass) ++passed;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " in %.1fs\n", summary.seconds);
    out << "verification "
        << (summary.scale == VerifyScale::smoke ? "smoke" : "full") << ": "
        << passed << '/' << summary.checks.size() << " checks passed" << buf;
    return out.str();
}

}  // namespace expsum
