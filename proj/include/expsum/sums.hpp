#pragma once

// Exact complex evaluation of the double sums W_a, the layer sums R_a,
// the complete sums S(v_1..v_{2k}) over Z_p*, and the moments M_u.
// All values are exact modular integers fed through compensated
// double-precision accumulation; tolerances quoted by callers (1e-9
// relative at <= 1e7 terms) follow from the N * 2^-48 error budget.

#include <expsum/accumulator.hpp>
#include <expsum/parallel.hpp>
#include <expsum/ring.hpp>
#include <expsum/rng.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

namespace expsum {

// Coefficients are allowed to brush the unit circle from above by this
// much, so exp(i*theta) in doubles always validates.
inline constexpr double kGammaSlack = 1e-12;

// Subset of a residue ring with one complex weight per element.
// Elements are kept strictly increasing; weights stay aligned.
struct WeightedSubset {
    u64 modulus = 1;
    std::vector<u64> elements;
    std::vector<std::complex<double>> gamma;

    std::size_t size() const { return elements.size(); }

    bool contains(u64 y) const {
        return std::binary_search(elements.begin(), elements.end(), y);
    }

    std::complex<double> gamma_of(u64 y) const {
        const auto it = std::lower_bound(elements.begin(), elements.end(), y);
        if (it == elements.end() || *it != y)
            throw std::domain_error("gamma_of: element not in subset");
        return gamma[std::size_t(it - elements.begin())];
    }
};

// Canonicalizes (sorts) the element/weight pairs and enforces the
// invariants: residues in range, no duplicates, |gamma| <= 1 + 1e-12.
inline WeightedSubset make_weighted_subset(
    u64 modulus, std::vector<u64> elements,
    std::vector<std::complex<double>> gamma) {
    if (modulus == 0) throw std::domain_error("weighted subset: zero modulus");
    if (elements.size() != gamma.size())
        throw std::domain_error("weighted subset: weight count mismatch");
    std::vector<std::size_t> order(elements.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return elements[a] < elements[b]; });
    WeightedSubset ws;
    ws.modulus = modulus;
    ws.elements.reserve(elements.size());
    ws.gamma.reserve(elements.size());
    for (std::size_t i : order) {
        const u64 y = elements[i];
        if (y >= modulus)
            throw std::domain_error("weighted subset: element out of range");
        if (!ws.elements.empty() && ws.elements.back() == y)
            throw std::domain_error("weighted subset: duplicate element");
        if (std::abs(gamma[i]) > 1.0 + kGammaSlack)
            throw std::domain_error("weighted subset: |gamma| exceeds 1");
        ws.elements.push_back(y);
        ws.gamma.push_back(gamma[i]);
    }
    return ws;
}

inline WeightedSubset subset_ones(u64 modulus, std::vector<u64> elements) {
    std::vector<std::complex<double>> ones(elements.size(), {1.0, 0.0});
    return make_weighted_subset(modulus, std::move(elements), std::move(ones));
}

// The full ring Z_modulus with unit weights.
inline WeightedSubset subset_full(u64 modulus) {
    std::vector<u64> all(modulus);
    for (u64 i = 0; i < modulus; ++i) all[std::size_t(i)] = i;
    return subset_ones(modulus, std::move(all));
}

// `count` distinct elements drawn from Z_modulus, unit weights.
inline WeightedSubset subset_random(u64 modulus, u64 count, u64 seed) {
    std::mt19937_64 gen(seed);
    return subset_ones(modulus, sample_distinct(gen, std::min(count, modulus), modulus));
}

// Replaces the weights with seeded unimodular values exp(2*pi*i*theta).
inline WeightedSubset with_unimodular_gamma(WeightedSubset ws, u64 seed) {
    std::mt19937_64 gen(seed);
    for (auto& g : ws.gamma) {
        const double theta = 2.0 * std::numbers::pi_v<double> * uniform_unit(gen);
        g = {std::cos(theta), std::sin(theta)};
    }
    return ws;
}

// exp(2*pi*i*z/m) with the argument reduced to [0, m) before any
// floating-point work, so the value is exactly periodic in z.
inline std::complex<double> unit_root(u64 m, i64 z) {
    if (m == 0) throw std::domain_error("unit_root: zero modulus");
    i64 r = z % i64(m);
    if (r < 0) r += i64(m);
    const double angle =
        2.0 * std::numbers::pi_v<double> * double(r) / double(m);
    return {std::cos(angle), std::sin(angle)};
}

// Precomputed roots e_m(0..m-1); entries are bit-identical to unit_root,
// so table and direct paths are interchangeable.
class UnitRootTable {
  public:
    explicit UnitRootTable(u64 m) : m_(m) {
        if (m == 0) throw std::domain_error("unit root table: zero modulus");
        vals_.reserve(std::size_t(m));
        for (u64 r = 0; r < m; ++r) vals_.push_back(unit_root(m, i64(r)));
    }

    u64 modulus() const { return m_; }
    std::complex<double> operator()(u64 reduced) const {
        return vals_[std::size_t(reduced)];
    }

  private:
    u64 m_;
    std::vector<std::complex<double>> vals_;
};

// Largest modulus for which evaluators build a root table on their own.
inline constexpr u64 kUnitTableMax = u64(1) << 20;

// One exact double-sum instance: lambda of order T, coefficient a
// coprime to p, subsets X and Y over Z_{p-1} (or both over Z_T in the
// lifted pathway), and the moment index k.
struct SumSpec {
    PrimeContext ctx;
    OrderedElement elem;
    u64 a = 1;
    WeightedSubset X;
    WeightedSubset Y;
    int k = 1;
};

inline SumSpec make_sum_spec(PrimeContext ctx, OrderedElement elem, u64 a,
                             WeightedSubset X, WeightedSubset Y, int k = 1) {
    const u64 p = ctx.p;
    if (a % p == 0) throw std::domain_error("sum spec: a not coprime to p");
    if (X.modulus != Y.modulus)
        throw std::domain_error("sum spec: X and Y moduli differ");
    if (X.modulus != ctx.p_minus_1() && X.modulus != elem.T)
        throw std::domain_error("sum spec: modulus is neither p-1 nor T");
    if (k < 1) throw std::domain_error("sum spec: k must be positive");
    if (p <= u64(k)) throw std::domain_error("sum spec: requires p > k");
    SumSpec s;
    s.ctx = std::move(ctx);
    s.elem = elem;
    s.a = a % p;
    s.X = std::move(X);
    s.Y = std::move(Y);
    s.k = k;
    return s;
}

namespace detail {

// Inner sum over the sorted subset Y at fixed base mu = lambda^x. Powers
// mu^y advance by the gap between consecutive elements, which is exact
// integer arithmetic, so the value equals the per-term pow_mod route.
template <class RootF>
std::complex<double> inner_eval(const WeightedSubset& Y, u64 mu, u64 a_mod,
                                u64 p, RootF&& root) {
    ComplexAccumulator acc;
    u64 prev = 0;
    u64 cur = 1;
    bool first = true;
    for (std::size_t i = 0; i < Y.elements.size(); ++i) {
        const u64 y = Y.elements[i];
        if (first) {
            cur = pow_mod(mu, y, p);
            first = false;
        } else {
            const u64 gap = y - prev;
            cur = (gap == 1) ? mul_mod(cur, mu, p)
                             : mul_mod(cur, pow_mod(mu, gap, p), p);
        }
        prev = y;
        acc.add(Y.gamma[i] * root(mul_mod(a_mod, cur, p)));
    }
    return acc.value();
}

template <class InnerBaseF, class RootF>
double outer_abs_sum(const WeightedSubset& X, const WeightedSubset& Y,
                     u64 a_mod, u64 p, unsigned threads,
                     InnerBaseF&& base_of_x, RootF&& root) {
    return chunked_reduce(
               X.elements.size(), threads, KahanAccumulator{},
               [&](std::size_t b, std::size_t e) {
                   KahanAccumulator part;
                   for (std::size_t i = b; i < e; ++i) {
                       const u64 mu = base_of_x(X.elements[i]);
                       part.add(std::abs(inner_eval(Y, mu, a_mod, p, root)));
                   }
                   return part;
               },
               [](KahanAccumulator& acc, const KahanAccumulator& part) {
                   acc.combine(part);
               })
        .value();
}

// Runs fn with a shared root table when p is small enough, otherwise
// with the direct evaluator; both paths produce identical bits.
template <class Fn>
auto with_root_source(u64 p, bool table_worthwhile, Fn&& fn) {
    if (p <= kUnitTableMax && table_worthwhile) {
        const UnitRootTable table(p);
        return fn([&table](u64 r) { return table(r); });
    }
    return fn([p](u64 r) { return unit_root(p, i64(r)); });
}

}  // namespace detail

// Inner factor of W_a at one x: sum over y in Y of gamma(y) e_p(a lambda^{xy}).
inline std::complex<double> inner_sum(const SumSpec& spec, u64 x) {
    const u64 p = spec.ctx.p;
    const u64 mu = pow_mod(spec.elem.lambda, x, p);
    return detail::inner_eval(spec.Y, mu, spec.a, p,
                              [p](u64 r) { return unit_root(p, i64(r)); });
}

// W_a(gamma; T; X, Y) = sum over x in X of |inner_sum(x)|.
inline double w_sum(const SumSpec& spec, unsigned threads = 1) {
    const u64 p = spec.ctx.p;
    const bool amortized = spec.X.size() * spec.Y.size() >= std::size_t(p);
    return detail::with_root_source(p, amortized, [&](auto&& root) {
        return detail::outer_abs_sum(
            spec.X, spec.Y, spec.a, p, threads,
            [&](u64 x) { return pow_mod(spec.elem.lambda, x, p); }, root);
    });
}

// Layer sum R_a(gamma; d, X, L_d) = sum over x in X of
// |sum over y in L_d of gamma(dy) e_p(a g^{tdxy})|. The layer lives in
// Z_{(p-1)/d} and every element must be coprime to that modulus.
template <class GammaF>
double r_sum(const PrimeContext& ctx, const OrderedElement& elem, u64 a,
             u64 d, const WeightedSubset& X, const std::vector<u64>& layer,
             GammaF&& gamma, unsigned threads = 1) {
    const u64 p = ctx.p;
    const u64 n = ctx.p_minus_1();
    if (d == 0 || n % d != 0)
        throw std::domain_error("r_sum: d must divide p-1");
    const u64 layer_mod = n / d;
    std::vector<u64> ys = layer;
    std::sort(ys.begin(), ys.end());
    std::vector<std::complex<double>> gs;
    gs.reserve(ys.size());
    for (u64 y : ys) {
        if (y >= layer_mod)
            throw std::domain_error("r_sum: layer element out of range");
        if (std::gcd(y, layer_mod) != 1)
            throw std::domain_error("r_sum: layer element not coprime to (p-1)/d");
        gs.push_back(gamma(d * y));
    }
    const WeightedSubset L =
        make_weighted_subset(layer_mod, std::move(ys), std::move(gs));
    const u64 td = mul_mod(elem.t, d, n);
    const u64 a_mod = a % p;
    if (a_mod == 0) throw std::domain_error("r_sum: a not coprime to p");
    const bool amortized = X.size() * L.size() >= std::size_t(p);
    return detail::with_root_source(p, amortized, [&](auto&& root) {
        return detail::outer_abs_sum(
            X, L, a_mod, p, threads,
            [&](u64 x) { return pow_mod(ctx.g, mul_mod(td, x, n), p); }, root);
    });
}

// Net exponent multiset of e_p(a(z^{tdv_1}+...+z^{tdv_k}-z^{tdv_{k+1}}-...)).
// Exponents are reduced mod p-1 (valid on Z_p*); the unreduced degree
// factors t, d, max_v are kept for the Weil-bound side.
struct CollapsedPoly {
    std::map<u64, long long> coeffs;  // reduced exponent -> net coefficient
    bool degenerate = false;          // all coefficients cancelled
    bool halves_permutation = false;  // unreduced multiset comparison
    bool collision = false;           // distinct v_i met at one reduced exponent
    u64 t = 1, d = 1, max_v = 1;
};

inline CollapsedPoly collapse_exponents(const std::vector<u64>& v, u64 t,
                                        u64 d, u64 p) {
    if (v.empty() || v.size() % 2 != 0)
        throw std::domain_error("collapse_exponents: tuple length must be 2k");
    if (t == 0 || d == 0)
        throw std::domain_error("collapse_exponents: t and d must be positive");
    if (p < 2) throw std::domain_error("collapse_exponents: p < 2");
    for (u64 vi : v)
        if (vi == 0)
            throw std::domain_error("collapse_exponents: v_i must be positive");
    const u64 n = p - 1;
    const std::size_t k = v.size() / 2;
    const u64 td = mul_mod(t, d, n);
    CollapsedPoly out;
    out.t = t;
    out.d = d;
    out.max_v = *std::max_element(v.begin(), v.end());
    std::map<u64, std::set<u64>> sources;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const u64 e = mul_mod(td, v[i], n);
        out.coeffs[e] += (i < k) ? 1 : -1;
        sources[e].insert(v[i]);
    }
    std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == 0; });
    out.degenerate = out.coeffs.empty();
    for (const auto& [e, vs] : sources)
        if (vs.size() > 1) out.collision = true;
    std::vector<u64> lo(v.begin(), v.begin() + std::ptrdiff_t(k));
    std::vector<u64> hi(v.begin() + std::ptrdiff_t(k), v.end());
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    out.halves_permutation = (lo == hi);
    return out;
}

namespace detail {

inline u64 eval_signed_poly(const CollapsedPoly& poly, u64 z, u64 p) {
    u64 acc = 0;
    for (const auto& [e, c] : poly.coeffs) {
        const u64 pw = pow_mod(z, e, p);
        if (c > 0)
            acc = add_mod(acc, mul_mod(u64(c), pw, p), p);
        else
            acc = add_mod(acc, p - mul_mod(u64(-c), pw, p), p);
    }
    return acc;
}

template <class RootF>
std::complex<double> complete_sum_eval(const CollapsedPoly& poly, u64 a_mod,
                                       u64 p, unsigned threads, RootF&& root) {
    return chunked_reduce(
               std::size_t(p - 1), threads, ComplexAccumulator{},
               [&](std::size_t b, std::size_t e) {
                   ComplexAccumulator part;
                   for (std::size_t i = b; i < e; ++i) {
                       const u64 z = u64(i) + 1;
                       const u64 f = eval_signed_poly(poly, z, p);
                       part.add(root(mul_mod(a_mod, f, p)));
                   }
                   return part;
               },
               [](ComplexAccumulator& acc, const ComplexAccumulator& part) {
                   acc.combine(part);
               })
        .value();
}

}  // namespace detail

// S(v_1..v_{2k}) = sum over z in Z_p* of e_p(a(z^{tdv_1}+..-z^{tdv_2k})).
// Always evaluated by the full z-loop; degenerate tuples come out at
// p-1 because the integrand is identically 1, not by shortcut.
inline std::complex<double> complete_sum_S(const std::vector<u64>& v, u64 a,
                                           u64 t, u64 d,
                                           const PrimeContext& ctx,
                                           unsigned threads = 1) {
    const u64 p = ctx.p;
    if (p <= v.size() / 2) throw std::domain_error("complete_sum_S: requires p > k");
    const CollapsedPoly poly = collapse_exponents(v, t, d, p);
    const u64 a_mod = a % p;
    return detail::with_root_source(p, /*table_worthwhile=*/p <= 4096,
                                    [&](auto&& root) {
                                        return detail::complete_sum_eval(
                                            poly, a_mod, p, threads, root);
                                    });
}

// Same sum, reusing a caller-held root table across many tuples.
inline std::complex<double> complete_sum_S(const std::vector<u64>& v, u64 a,
                                           u64 t, u64 d,
                                           const PrimeContext& ctx,
                                           const UnitRootTable& table,
                                           unsigned threads = 1) {
    const u64 p = ctx.p;
    if (p <= v.size() / 2) throw std::domain_error("complete_sum_S: requires p > k");
    if (table.modulus() != p)
        throw std::domain_error("complete_sum_S: table modulus mismatch");
    const CollapsedPoly poly = collapse_exponents(v, t, d, p);
    return detail::complete_sum_eval(poly, a % p, p, threads,
                                     [&table](u64 r) { return table(r); });
}

// Moment M_u evaluated two independent ways: the direct z-loop over
// |sum over v|^{2k}, and the 2k-fold tuple expansion into complete sums.
// Both are returned; they must agree to 1e-6 relative.
struct MomentResult {
    double direct = 0.0;
    double expanded = 0.0;
};

template <class GammaF>
MomentResult moment_M_u(u64 u, const std::vector<u64>& basket,
                        const std::vector<u64>& layer, GammaF&& gamma, u64 a,
                        u64 t, u64 d, int k, const PrimeContext& ctx) {
    const u64 p = ctx.p;
    const u64 n = ctx.p_minus_1();
    if (k < 1) throw std::domain_error("moment_M_u: k must be positive");
    if (p <= u64(k)) throw std::domain_error("moment_M_u: requires p > k");
    if (d == 0 || n % d != 0)
        throw std::domain_error("moment_M_u: d must divide p-1");
    const u64 modu = n / d;
    if (std::gcd(u % modu, modu) != 1)
        throw std::domain_error("moment_M_u: u not a unit mod (p-1)/d");
    std::vector<u64> sorted_layer = layer;
    std::sort(sorted_layer.begin(), sorted_layer.end());

    const u64 td = mul_mod(t, d, n);
    const u64 a_mod = a % p;
    const std::size_t ell = basket.size();
    std::vector<bool> active(ell, false);
    std::vector<std::complex<double>> gam(ell, {0.0, 0.0});
    std::vector<u64> expo(ell, 0);
    for (std::size_t j = 0; j < ell; ++j) {
        const u64 yrep = mul_mod(u % modu, basket[j] % modu, modu);
        active[j] = std::binary_search(sorted_layer.begin(), sorted_layer.end(),
                                       yrep);
        if (active[j]) gam[j] = gamma(d * yrep);
        expo[j] = mul_mod(td, basket[j], n);
    }

    MomentResult out;

    {  // direct route
        KahanAccumulator acc;
        for (u64 z = 1; z < p; ++z) {
            ComplexAccumulator inner;
            for (std::size_t j = 0; j < ell; ++j) {
                if (!active[j]) continue;
                const u64 arg = mul_mod(a_mod, pow_mod(z, expo[j], p), p);
                inner.add(gam[j] * unit_root(p, i64(arg)));
            }
            const double norm2 = std::norm(inner.value());
            double term = 1.0;
            for (int i = 0; i < k; ++i) term *= norm2;
            acc.add(term);
        }
        out.direct = acc.value();
    }

    {  // tuple expansion route
        ComplexAccumulator acc;
        std::vector<std::size_t> idx(std::size_t(2 * k), 0);
        std::vector<u64> tuple(std::size_t(2 * k), 0);
        if (ell > 0) {
            for (;;) {
                bool all_active = true;
                for (std::size_t pos = 0; pos < idx.size(); ++pos)
                    if (!active[idx[pos]]) { all_active = false; break; }
                if (all_active) {
                    std::complex<double> coeff{1.0, 0.0};
                    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
                        const auto g = gam[idx[pos]];
                        coeff *= (pos < std::size_t(k)) ? g : std::conj(g);
                        tuple[pos] = basket[idx[pos]];
                    }
                    acc.add(coeff * complete_sum_S(tuple, a, t, d, ctx));
                }
                std::size_t pos = 0;
                while (pos < idx.size() && ++idx[pos] == ell) idx[pos++] = 0;
                if (pos == idx.size()) break;
            }
        }
        out.expanded = acc.value().real();
    }

    const double scale = std::max(1.0, std::abs(out.direct));
    if (std::abs(out.direct - out.expanded) > 1e-6 * scale)
        throw std::runtime_error(
            "moment_M_u: direct and expanded evaluations disagree");
    return out;
}

// Adapter: weight lookup on a subset, for the gamma callables above.
inline auto gamma_from_subset(const WeightedSubset& ws) {
    return [&ws](u64 y) { return ws.gamma_of(y); };
}

}  // namespace expsum
