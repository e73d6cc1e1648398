#pragma once

// Closed-form bound catalog and regime analysis. Evaluation conventions,
// stamped on every report: implied constants are 1, o(1) terms are 0,
// logs are natural, and the full-torus case identifies T = p-1 with p
// (the formulas' asymptotic style). All formula arithmetic runs in
// long-double log domain so values stay finite up to p near 2^61.

#include <expsum/proof.hpp>
#include <expsum/ring.hpp>
#include <expsum/sums.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace expsum {

inline constexpr const char* kConventionStamp =
    "implied constants = 1; o(1) = 0; log = natural";

enum class BoundId {
    trivial,      // |X| |Y|
    theorem1,     // |X|^{1-1/2k} |Y|^{1-1/(2k+2)} p^{1/2k+3/(4k+4)} / T^{1/(2k+2)}
    cor1,         // theorem1 at full torus: p^{1/2k+1/(4k+4)}
    cor2,         // |X|^{1-1/2k} |Y|^{1-1/(2k+2)} T^{1/2k} p^{1/(4k+4)}
    oldcor_gar1,  // |X|^{1/2} |Y|^{1/2} T^{3/4} p^{1/8}
    fs_xy,        // |X|^{1/2} |Y|^{5/6} p^{5/8}
    fs_T,         // T^{11/6} p^{1/8}
    gar_78,       // |X|^{1/2} |Y|^{1/2} p^{7/8}
    gaka_34,      // |X|^{1/2} |Y|^{3/4} p^{7/8} / T^{1/4}
    weil_sparse,  // (t d max_v) p^{1/2}
};

inline const char* to_string(BoundId id) {
    switch (id) {
        case BoundId::trivial: return "trivial";
        case BoundId::theorem1: return "theorem1";
        case BoundId::cor1: return "cor1";
        case BoundId::cor2: return "cor2";
        case BoundId::oldcor_gar1: return "oldcor_gar1";
        case BoundId::fs_xy: return "fs_xy";
        case BoundId::fs_T: return "fs_T";
        case BoundId::gar_78: return "gar_78";
        case BoundId::gaka_34: return "gaka_34";
        case BoundId::weil_sparse: return "weil_sparse";
    }
    return "unknown";
}

struct BoundParams {
    long double size_x = 1;
    long double size_y = 1;
    long double p = 2;
    long double T = 1;
    int k = 1;
    long double t = 1, d = 1, max_v = 1;  // weil_sparse factors
};

inline long double evaluate_bound(BoundId id, const BoundParams& P) {
    if (P.size_x <= 0 || P.size_y <= 0 || P.p <= 0 || P.T <= 0 || P.t <= 0 ||
        P.d <= 0 || P.max_v <= 0)
        throw std::domain_error("evaluate_bound: nonpositive parameter");
    if (P.k < 1) throw std::domain_error("evaluate_bound: k must be positive");

    const long double lx = std::log(P.size_x);
    const long double ly = std::log(P.size_y);
    const long double lp = std::log(P.p);
    const long double lT = std::log(P.T);
    const long double k = P.k;

    long double le = 0;
    switch (id) {
        case BoundId::trivial:
            le = lx + ly;
            break;
        case BoundId::theorem1:
            le = (1 - 1 / (2 * k)) * lx + (1 - 1 / (2 * k + 2)) * ly +
                 (1 / (2 * k) + 3 / (4 * k + 4)) * lp - lT / (2 * k + 2);
            break;
        case BoundId::cor1:
            le = (1 - 1 / (2 * k)) * lx + (1 - 1 / (2 * k + 2)) * ly +
                 (1 / (2 * k) + 1 / (4 * k + 4)) * lp;
            break;
        case BoundId::cor2:
            le = (1 - 1 / (2 * k)) * lx + (1 - 1 / (2 * k + 2)) * ly +
                 lT / (2 * k) + lp / (4 * k + 4);
            break;
        case BoundId::oldcor_gar1:
            le = 0.5L * lx + 0.5L * ly + 0.75L * lT + 0.125L * lp;
            break;
        case BoundId::fs_xy:
            le = 0.5L * lx + (5.0L / 6) * ly + 0.625L * lp;
            break;
        case BoundId::fs_T:
            le = (11.0L / 6) * lT + 0.125L * lp;
            break;
        case BoundId::gar_78:
            le = 0.5L * lx + 0.5L * ly + 0.875L * lp;
            break;
        case BoundId::gaka_34:
            le = 0.5L * lx + 0.75L * ly + 0.875L * lp - 0.25L * lT;
            break;
        case BoundId::weil_sparse:
            le = std::log(P.t) + std::log(P.d) + std::log(P.max_v) + 0.5L * lp;
            break;
    }
    return std::exp(le);
}

// Weil bound (t d max v_i) sqrt(p) for a non-degenerate tuple. The
// degree is the UNREDUCED one: reduction mod p-1 only lowers exponents,
// so the reduced polynomial's degree never exceeds it.
inline long double weil_bound_sparse(const std::vector<u64>& v, u64 t, u64 d,
                                     u64 p) {
    const CollapsedPoly poly = collapse_exponents(v, t, d, p);
    if (poly.degenerate)
        throw std::domain_error(
            "weil_bound_sparse: degenerate tuple, exact value is p-1");
    BoundParams P;
    P.p = static_cast<long double>(p);
    P.t = static_cast<long double>(t);
    P.d = static_cast<long double>(d);
    P.max_v = static_cast<long double>(poly.max_v);
    return evaluate_bound(BoundId::weil_sparse, P);
}

// Threshold at which the main bound stops beating |X||Y|: below means
// T^{(2k+1)/(2k+2)} <= |X|^{1/2k} |Y|^{-1+1/(2k+2)} p^{3/2-1/2k-3/(4k+4)}.
// In that regime the main bound provably sits at or above |X||Y| (given
// sizes <= p), and this is re-verified numerically on every call.
struct TrivialRegime {
    bool below_threshold = false;
    long double bound_value = 0;
    long double trivial_value = 0;
};

inline TrivialRegime trivial_regime_check(long double size_x,
                                          long double size_y, long double p,
                                          long double T, int k) {
    if (size_x <= 0 || size_y <= 0 || p <= 0 || T <= 0 || k < 1)
        throw std::domain_error("trivial_regime_check: nonpositive parameter");
    if (size_x > p || size_y > p)
        throw std::domain_error("trivial_regime_check: set size exceeds p");
    const long double kk = k;
    const long double lhs = ((2 * kk + 1) / (2 * kk + 2)) * std::log(T);
    const long double rhs = std::log(size_x) / (2 * kk) +
                            (-1 + 1 / (2 * kk + 2)) * std::log(size_y) +
                            (1.5L - 1 / (2 * kk) - 3 / (4 * kk + 4)) *
                                std::log(p);
    BoundParams P;
    P.size_x = size_x;
    P.size_y = size_y;
    P.p = p;
    P.T = T;
    P.k = k;
    TrivialRegime out;
    out.below_threshold = lhs <= rhs;
    out.bound_value = evaluate_bound(BoundId::theorem1, P);
    out.trivial_value = evaluate_bound(BoundId::trivial, P);
    if (out.below_threshold &&
        out.bound_value < out.trivial_value * (1 - 1e-9L))
        throw std::logic_error(
            "trivial_regime_check: below-threshold chain violated");
    return out;
}

// Exponent alpha(k) = (3k+2)/(4k+2): the full-torus bound beats |X||Y|
// exactly when |X| = |Y| = p^alpha with alpha above this value. Strictly
// decreasing, from 5/6 at k = 1 toward the limit 3/4.
inline long double nontriviality_threshold(int k) {
    if (k < 1)
        throw std::domain_error("nontriviality_threshold: k must be positive");
    const long double kk = k;
    return (3 * kk + 2) / (4 * kk + 2);
}

// Smallest k in [1, k_max] minimizing the main bound; ties resolve to
// the smaller k.
struct BestK {
    int k = 1;
    long double value = 0;
};

inline BestK best_k(long double size_x, long double size_y, long double p,
                    long double T, int k_max) {
    if (k_max < 1) throw std::domain_error("best_k: k_max must be positive");
    BoundParams P;
    P.size_x = size_x;
    P.size_y = size_y;
    P.p = p;
    P.T = T;
    BestK best;
    for (int k = 1; k <= k_max; ++k) {
        P.k = k;
        const long double value = evaluate_bound(BoundId::theorem1, P);
        if (k == 1 || value < best.value) best = {k, value};
    }
    return best;
}

// Exact value of one instance next to every closed-form bound, with the
// regime flags. Empty X or Y short-circuits to zero values and ratios.
struct BoundReport {
    u64 p = 2;
    u64 T = 1;
    int k = 1;
    u64 size_x = 0;
    u64 size_y = 0;
    double exact = 0.0;
    std::map<BoundId, long double> values;
    std::map<BoundId, long double> ratios;
    bool below_threshold = false;
    bool t_threshold = false;   // T > p^{1/2} (log p)^{10k}
    bool admissible_ell = false;  // d=1 layer of Y admits a basket choice
};

// Variant taking a precomputed exact value: the exact sum does not depend
// on k, so sweeps over a k list reuse one w_sum evaluation per cell.
inline BoundReport compare_all_with_exact(const SumSpec& spec, double exact) {
    static constexpr BoundId kComparable[] = {
        BoundId::trivial, BoundId::theorem1,    BoundId::cor1,
        BoundId::cor2,    BoundId::oldcor_gar1, BoundId::fs_xy,
        BoundId::fs_T,    BoundId::gar_78,      BoundId::gaka_34,
    };

    BoundReport rep;
    rep.p = spec.ctx.p;
    rep.T = spec.elem.T;
    rep.k = spec.k;
    rep.size_x = spec.X.size();
    rep.size_y = spec.Y.size();
    rep.exact = exact;

    const long double lp = std::log(static_cast<long double>(rep.p));
    rep.t_threshold =
        static_cast<long double>(rep.T) >
        std::exp(0.5L * lp + 10.0L * rep.k * std::log(lp));

    if (rep.size_x == 0 || rep.size_y == 0) {
        for (BoundId id : kComparable) {
            rep.values[id] = 0;
            rep.ratios[id] = 0;
        }
        return rep;
    }

    BoundParams P;
    P.size_x = static_cast<long double>(rep.size_x);
    P.size_y = static_cast<long double>(rep.size_y);
    P.p = static_cast<long double>(rep.p);
    P.T = static_cast<long double>(rep.T);
    P.k = rep.k;
    for (BoundId id : kComparable) {
        const long double value = evaluate_bound(id, P);
        rep.values[id] = value;
        rep.ratios[id] = static_cast<long double>(rep.exact) / value;
    }

    if (rep.exact >
        double(rep.size_x) * double(rep.size_y) * (1.0 + 1e-9))
        throw std::logic_error("compare_all: exact exceeds the trivial bound");

    rep.below_threshold =
        trivial_regime_check(P.size_x, P.size_y, P.p, P.T, rep.k)
            .below_threshold;

    // Basket admissibility at the d = 1 layer of Y, lifted to Z_{p-1} first
    // when the instance lives on Z_T.
    const u64 n = spec.ctx.p_minus_1();
    std::vector<u64> ys = spec.Y.elements;
    if (spec.Y.modulus != n) ys = lift_set(ys, spec.elem.T, spec.ctx).lifted;
    u64 coprime = 0;
    for (u64 y : ys)
        if (std::gcd(y, n) == 1) ++coprime;
    if (coprime > 0) {
        rep.admissible_ell =
            ell_choice(1, coprime, spec.elem.t, rep.k, spec.ctx).admissible;
    }
    return rep;
}

inline BoundReport compare_all(const SumSpec& spec, unsigned threads = 1) {
    return compare_all_with_exact(spec, w_sum(spec, threads));
}

}  // namespace expsum
