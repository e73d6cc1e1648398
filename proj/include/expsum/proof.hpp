#pragma once

// Combinatorial constructions underlying the layer decomposition and the
// moment argument: gcd layers of Y, baskets of primes coprime to the layer
// modulus, the uv congruence representation with its counting identities,
// residue-system equivalence, the ell selection with its admissibility
// windows, and the order-T lifting between Z_T and Z_{p-1}.

#include <expsum/ring.hpp>
#include <expsum/sums.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace expsum {

// Layer L_d: elements y with gcd(dy, p-1) = d, stored as y/d. They live
// in Z_{(p-1)/d} and are coprime to that modulus.
struct GcdLayer {
    u64 d = 1;
    u64 modulus = 1;  // (p-1)/d
    std::vector<u64> elements;

    std::size_t size() const { return elements.size(); }

    // The delta indicator over Z_modulus.
    bool contains(u64 y) const {
        return std::binary_search(elements.begin(), elements.end(), y);
    }
};

// Splits Y by d = gcd(y, p-1). Convention gcd(0, n) = n: the element 0
// lands in layer d = p-1 as the single element of Z_1. Every y lands in
// exactly one layer, so layer sizes sum to |Y|.
inline std::map<u64, GcdLayer> gcd_decompose(const WeightedSubset& Y,
                                             const PrimeContext& ctx) {
    const u64 n = ctx.p_minus_1();
    if (Y.modulus != n)
        throw std::domain_error("gcd_decompose: Y must live in Z_{p-1}");
    std::map<u64, GcdLayer> layers;
    for (u64 y : Y.elements) {
        const u64 d = std::gcd(y, n);  // gcd(0, n) = n
        auto& layer = layers[d];
        if (layer.elements.empty()) {
            layer.d = d;
            layer.modulus = n / d;
        }
        layer.elements.push_back(y / d);  // ascending since Y is sorted
    }
    return layers;
}

// The first ell primes coprime to the modulus, in increasing order.
struct PrimeBasketV {
    u64 modulus = 1;
    u64 ell = 0;
    std::vector<u64> primes;
};

inline PrimeBasketV build_prime_basket(u64 modulus, u64 ell) {
    if (modulus == 0) throw std::domain_error("prime basket: zero modulus");
    if (ell == 0) throw std::domain_error("prime basket: ell must be positive");
    PrimeBasketV basket;
    basket.modulus = modulus;
    basket.ell = ell;
    basket.primes.reserve(std::size_t(ell));
    for (u64 q = 2; basket.primes.size() < ell; ++q)
        if (std::gcd(q, modulus) == 1 && is_prime(q)) basket.primes.push_back(q);
    return basket;
}

// Number of pairs (u, v) with u a unit mod `modulus`, v in the basket,
// and uv = y. Each v fixes u = y v^{-1} uniquely, so the count is ell;
// the pairs are still checked one by one rather than assumed.
inline u64 count_congruence_solutions(u64 y, const PrimeBasketV& basket,
                                      u64 modulus) {
    if (modulus == 0)
        throw std::domain_error("congruence count: zero modulus");
    if (basket.modulus != modulus)
        throw std::domain_error("congruence count: basket modulus mismatch");
    const u64 yr = y % modulus;
    if (std::gcd(yr, modulus) != 1)
        throw std::domain_error("congruence count: y not coprime to modulus");
    u64 count = 0;
    for (u64 v : basket.primes) {
        const u64 vr = v % modulus;
        const u64 u = mul_mod(yr, inv_mod(vr, modulus), modulus);
        if (std::gcd(u, modulus) == 1 && mul_mod(u, vr, modulus) == yr) ++count;
    }
    return count;
}

// Both sides of the 1/|V| representation identity at one x: the layer
// inner sum on the left, the (u, v) double sum divided by ell on the
// right. They agree because every y in L_d has exactly ell
// representations y = uv.
struct RepresentationSides {
    std::complex<double> lhs;
    std::complex<double> rhs;
};

template <class GammaF>
RepresentationSides uv_representation_check(const GcdLayer& layer,
                                            const PrimeBasketV& basket,
                                            GammaF&& gamma, u64 a, u64 t,
                                            u64 d, const PrimeContext& ctx,
                                            u64 x) {
    if (layer.d != d)
        throw std::domain_error("representation check: layer/d mismatch");
    if (basket.modulus != layer.modulus)
        throw std::domain_error("representation check: basket modulus mismatch");
    const u64 p = ctx.p;
    const u64 n = ctx.p_minus_1();
    if (d == 0 || n % d != 0)
        throw std::domain_error("representation check: d must divide p-1");
    const u64 m = layer.modulus;
    const u64 a_mod = a % p;
    const u64 tdx = mul_mod(mul_mod(t, d, n), x, n);

    ComplexAccumulator lhs;
    for (u64 y : layer.elements) {
        const u64 arg = mul_mod(a_mod, pow_mod(ctx.g, mul_mod(tdx, y, n), p), p);
        lhs.add(gamma(d * y) * unit_root(p, i64(arg)));
    }

    ComplexAccumulator rhs;
    for (u64 u = 0; u < m; ++u) {
        if (std::gcd(u, m) != 1) continue;
        for (u64 v : basket.primes) {
            const u64 y = mul_mod(u, v % m, m);
            if (!layer.contains(y)) continue;
            const u64 arg =
                mul_mod(a_mod, pow_mod(ctx.g, mul_mod(tdx, y, n), p), p);
            rhs.add(gamma(d * y) * unit_root(p, i64(arg)));
        }
    }

    const double inv_ell = 1.0 / double(basket.primes.size());
    return {lhs.value(), rhs.value() * inv_ell};
}

// Counting identity behind the representation: the (u, v) double loop
// hits the layer exactly ell * |L_d| times.
struct CountingSides {
    u64 lhs = 0;
    u64 rhs = 0;
};

inline CountingSides counting_identity_check(const GcdLayer& layer,
                                             const PrimeBasketV& basket) {
    if (basket.modulus != layer.modulus)
        throw std::domain_error("counting check: basket modulus mismatch");
    const u64 m = layer.modulus;
    u64 lhs = 0;
    for (u64 u = 0; u < m; ++u) {
        if (std::gcd(u, m) != 1) continue;
        for (u64 v : basket.primes)
            if (layer.contains(mul_mod(u, v % m, m))) ++lhs;
    }
    return {lhs, basket.ell * u64(layer.size())};
}

// True iff {g^{nx} : x in Z_{p-1}} and {z^d : z in Z_p*} coincide as
// multisets, where d = gcd(n, p-1). Both walks have p-1 steps.
inline bool residue_system_check(u64 n_exp, const PrimeContext& ctx) {
    const u64 p = ctx.p;
    const u64 n = ctx.p_minus_1();
    if (n_exp == 0 || n_exp > n)
        throw std::domain_error("residue system check: need 1 <= n <= p-1");
    const u64 d = std::gcd(n_exp, n);
    std::vector<u64> via_g, via_z;
    via_g.reserve(std::size_t(n));
    via_z.reserve(std::size_t(n));
    for (u64 x = 0; x < n; ++x)
        via_g.push_back(pow_mod(ctx.g, mul_mod(n_exp, x, n), p));
    for (u64 z = 1; z < p; ++z) via_z.push_back(pow_mod(z, d, p));
    std::sort(via_g.begin(), via_g.end());
    std::sort(via_z.begin(), via_z.end());
    return via_g == via_z;
}

// The basket size ell = [p^{(2k+1)/(2k+2)} / (d |L_d|^{k/(k+1)} t^{1/(k+1)}
// (log p)^{1/(k+1)})], with its two admissibility windows:
// log p < ell < p^{(2k+1)/(2k+2)} and d < T p^{-1/2} (log p)^{-4k}.
// Logs are natural throughout. Values outside the windows are still
// returned; admissible just records whether the analytic regime holds.
struct EllChoice {
    u64 ell = 0;
    bool admissible = false;
    bool lower_ok = false;  // ell > log p
    bool upper_ok = false;  // ell < p^{(2k+1)/(2k+2)}
    bool d_ok = false;      // d < T p^{-1/2} (log p)^{-4k}
    long double ell_real = 0;
    long double lower_edge = 0;
    long double upper_edge = 0;
    long double d_cap = 0;
};

inline EllChoice ell_choice(u64 d, u64 layer_size, u64 t, int k,
                            const PrimeContext& ctx) {
    const u64 p = ctx.p;
    const u64 n = ctx.p_minus_1();
    if (layer_size == 0)
        throw std::domain_error("ell_choice: empty layer");
    if (k < 1) throw std::domain_error("ell_choice: k must be positive");
    if (d == 0 || n % d != 0)
        throw std::domain_error("ell_choice: d must divide p-1");
    if (t == 0 || n % t != 0)
        throw std::domain_error("ell_choice: t must divide p-1");

    const long double lp = std::log(static_cast<long double>(p));
    const long double kk = static_cast<long double>(k);
    const long double top = (2 * kk + 1) / (2 * kk + 2);

    EllChoice out;
    out.lower_edge = lp;
    out.upper_edge = std::exp(top * lp);
    const long double log_ell =
        top * lp - std::log(static_cast<long double>(d)) -
        (kk / (kk + 1)) * std::log(static_cast<long double>(layer_size)) -
        (1 / (kk + 1)) * std::log(static_cast<long double>(t)) -
        (1 / (kk + 1)) * std::log(lp);
    out.ell_real = std::exp(log_ell);
    out.ell = out.ell_real < 1 ? 0 : u64(std::floor(out.ell_real));

    const u64 T = n / t;
    out.d_cap = std::exp(std::log(static_cast<long double>(T)) - 0.5L * lp -
                         4 * kk * std::log(lp));
    out.lower_ok = static_cast<long double>(out.ell) > out.lower_edge;
    out.upper_ok = static_cast<long double>(out.ell) < out.upper_edge;
    out.d_ok = static_cast<long double>(d) < out.d_cap;
    out.admissible = out.lower_ok && out.upper_ok && out.d_ok;
    return out;
}

// Union of the shifts base + rT over r = 1..(p-1)/T, reduced mod p-1.
// Distinct base points in Z_T lift to disjoint fibers, so the union has
// exactly (p-1)|base|/T elements.
struct LiftResult {
    std::vector<u64> lifted;
    u64 copies = 1;  // (p-1)/T
};

inline LiftResult lift_set(const std::vector<u64>& base, u64 T,
                           const PrimeContext& ctx) {
    const u64 n = ctx.p_minus_1();
    if (T == 0 || n % T != 0)
        throw std::domain_error("lift_set: T must divide p-1");
    LiftResult out;
    out.copies = n / T;
    out.lifted.reserve(base.size() * std::size_t(out.copies));
    for (u64 x : base) {
        if (x >= T) throw std::domain_error("lift_set: base element not in Z_T");
        for (u64 r = 1; r <= out.copies; ++r)
            out.lifted.push_back((x + r * T) % n);
    }
    std::sort(out.lifted.begin(), out.lifted.end());
    out.lifted.erase(std::unique(out.lifted.begin(), out.lifted.end()),
                     out.lifted.end());
    if (out.lifted.size() != base.size() * std::size_t(out.copies))
        throw std::logic_error("lift_set: fiber collision");
    return out;
}

// Evaluates W on the lifted sets and on the base sets with the same
// order-T element. Because lambda^{xy} only depends on x, y mod T, the
// lifted value equals ((p-1)/T)^2 times the base value; both numbers are
// returned for the caller to compare. gamma must be constant on every
// lift fiber y + sT.
struct LiftedPair {
    double w_lifted = 0.0;
    double w_base = 0.0;
    u64 copies = 1;
};

template <class GammaF>
LiftedPair lift_identity_check(const PrimeContext& ctx, u64 T, u64 a,
                               const std::vector<u64>& base_x,
                               const std::vector<u64>& base_y, GammaF&& gamma,
                               int k = 1, unsigned threads = 1) {
    const u64 n = ctx.p_minus_1();
    const auto elem = element_of_order(ctx, T);
    const LiftResult lx = lift_set(base_x, T, ctx);
    const LiftResult ly = lift_set(base_y, T, ctx);

    for (u64 y : base_y) {
        const std::complex<double> base_val = gamma(y % n);
        for (u64 r = 1; r <= ly.copies; ++r) {
            const std::complex<double> val = gamma((y + r * T) % n);
            if (val != base_val)
                throw std::domain_error(
                    "lift_identity_check: gamma not constant on lift fibers");
        }
    }

    auto weighted = [&](const std::vector<u64>& elems, u64 modulus) {
        std::vector<std::complex<double>> gs;
        gs.reserve(elems.size());
        for (u64 y : elems) gs.push_back(gamma(y % n));
        return make_weighted_subset(modulus, elems, std::move(gs));
    };

    LiftedPair out;
    out.copies = lx.copies;
    const auto base_spec =
        make_sum_spec(ctx, elem, a, subset_ones(T, base_x), weighted(base_y, T), k);
    out.w_base = w_sum(base_spec, threads);
    const auto lifted_spec = make_sum_spec(
        ctx, elem, a, subset_ones(n, lx.lifted), weighted(ly.lifted, n), k);
    out.w_lifted = w_sum(lifted_spec, threads);
    return out;
}

}  // namespace expsum
