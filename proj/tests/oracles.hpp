#pragma once

// Independent reference evaluators for the test suites. Deliberately
// naive: plain double accumulation, std::polar for roots, per-term
// double exponentiation with no stepping, no tables, no threading.

#include <expsum/ring.hpp>
#include <expsum/sums.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using expsum::u64;

inline std::complex<double> root(u64 m, u64 z) {
    return std::polar(1.0, 2.0 * std::numbers::pi_v<double> *
                               double(z % m) / double(m));
}

inline std::complex<double> inner(u64 p, u64 lambda, u64 a, u64 x,
                                  const std::vector<u64>& ys,
                                  const std::vector<std::complex<double>>& gs) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const u64 power = expsum::pow_mod(expsum::pow_mod(lambda, x, p), ys[i], p);
        s += gs[i] * root(p, expsum::mul_mod(a % p, power, p));
    }
    return s;
}

inline double w(u64 p, u64 lambda, u64 a, const std::vector<u64>& xs,
                const std::vector<u64>& ys,
                const std::vector<std::complex<double>>& gs) {
    double total = 0.0;
    for (u64 x : xs) total += std::abs(inner(p, lambda, a, x, ys, gs));
    return total;
}

inline double w(const expsum::SumSpec& spec) {
    return w(spec.ctx.p, spec.elem.lambda, spec.a, spec.X.elements,
             spec.Y.elements, spec.Y.gamma);
}

// R_a evaluated from its definition: base g^{td x y} with the exponent
// assembled stepwise mod p-1.
inline double r(const expsum::PrimeContext& ctx, u64 t, u64 a, u64 d,
                const std::vector<u64>& xs, const std::vector<u64>& layer,
                const std::vector<std::complex<double>>& gs) {
    const u64 p = ctx.p;
    const u64 n = p - 1;
    double total = 0.0;
    for (u64 x : xs) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t i = 0; i < layer.size(); ++i) {
            u64 e = expsum::mul_mod(t, d, n);
            e = expsum::mul_mod(e, x, n);
            e = expsum::mul_mod(e, layer[i], n);
            const u64 power = expsum::pow_mod(ctx.g, e, p);
            s += gs[i] * root(p, expsum::mul_mod(a % p, power, p));
        }
        total += std::abs(s);
    }
    return total;
}

}  // namespace oracle
