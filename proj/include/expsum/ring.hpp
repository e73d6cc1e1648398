#pragma once

// Exact integer arithmetic over the residue rings Z_p and Z_{p-1}:
// factorization, divisors, modular powers, multiplicative orders,
// primitive roots and unit groups. Everything fits 64-bit values with
// 128-bit intermediates; moduli are capped at 2^61.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace expsum {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Desk-scale cap: keeps every product of two residues inside u128 with room
// to spare and every divisor/exponent inside u64.
inline constexpr u64 kMaxPrime = u64(1) << 61;

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return u64(u128(a) * b % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    return (a >= m - b && b > 0) ? a - (m - b) : a + b;
}

// base^exp mod m by binary ladder, O(log exp) multiplications.
inline u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 0) throw std::domain_error("pow_mod: zero modulus");
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp != 0) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Modular inverse via extended Euclid; requires gcd(a, m) = 1.
inline u64 inv_mod(u64 a, u64 m) {
    if (m == 0) throw std::domain_error("inv_mod: zero modulus");
    if (m == 1) return 0;
    i64 t = 0, new_t = 1;
    i64 r = i64(m), new_r = i64(a % m);
    while (new_r != 0) {
        const i64 q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw std::domain_error("inv_mod: argument not coprime to modulus");
    return u64(t < 0 ? t + i64(m) : t);
}

namespace detail {

// Deterministic Miller-Rabin for n < 2^64 (fixed witness set).
inline bool miller_rabin(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace detail

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
        if (!detail::miller_rabin(n, a)) return false;
    return true;
}

struct Factor {
    u64 prime;
    int exponent;
    friend bool operator==(const Factor&, const Factor&) = default;
};

namespace detail {

// Pollard rho with Floyd cycle detection; deterministic given n (fixed
// start value and increment sequence). Returns a nontrivial factor of
// composite n.
inline u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto step = [&](u64 v) { return add_mod(mul_mod(v, v, n), c, n); };
        u64 x = 2, y = 2, d = 1;
        while (d == 1) {
            x = step(x);
            y = step(step(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

inline void factorize_into(u64 n, std::vector<u64>& primes) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    const u64 d = pollard_rho(n);
    factorize_into(d, primes);
    factorize_into(n / d, primes);
}

} // namespace detail

// Prime factorization, primes strictly increasing. Trial division up to 10^6
// with a Pollard-rho fallback for the remaining cofactor.
inline std::vector<Factor> factorize(u64 n) {
    if (n == 0) throw std::domain_error("factorize: zero input");
    std::vector<u64> primes;
    for (u64 q = 2; q <= 1000000 && q * q <= n; q += (q == 2 ? 1 : 2)) {
        while (n % q == 0) {
            primes.push_back(q);
            n /= q;
        }
    }
    detail::factorize_into(n, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<Factor> out;
    for (u64 q : primes) {
        if (!out.empty() && out.back().prime == q)
            ++out.back().exponent;
        else
            out.push_back({q, 1});
    }
    return out;
}

inline u64 product_of(const std::vector<Factor>& factors) {
    u64 n = 1;
    for (const auto& f : factors)
        for (int i = 0; i < f.exponent; ++i) n *= f.prime;
    return n;
}

// All divisors, ascending.
inline std::vector<u64> divisors_from(const std::vector<Factor>& factors) {
    std::vector<u64> divs{1};
    for (const auto& f : factors) {
        const std::size_t base = divs.size();
        u64 pw = 1;
        for (int e = 1; e <= f.exponent; ++e) {
            pw *= f.prime;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pw);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

inline u64 euler_phi(u64 n) {
    if (n == 0) throw std::domain_error("euler_phi: zero input");
    u64 phi = 1;
    for (const auto& f : factorize(n)) {
        u64 pk = f.prime;
        for (int i = 1; i < f.exponent; ++i) pk *= f.prime;
        phi *= pk - pk / f.prime;
    }
    return phi;
}

// A prime p together with the factorization and divisor list of p-1 and the
// smallest primitive root. Immutable after construction; safe to share.
struct PrimeContext {
    u64 p = 0;
    std::vector<Factor> factorization_of_p_minus_1;
    std::vector<u64> divisors_of_p_minus_1;
    u64 g = 0;

    u64 tau() const { return divisors_of_p_minus_1.size(); }
    u64 p_minus_1() const { return p - 1; }
};

// Smallest g >= 2 generating Z_p^*. For p = 2 the group is trivial and the
// degenerate value 1 is returned.
inline u64 find_primitive_root(u64 p) {
    if (!is_prime(p)) throw std::domain_error("find_primitive_root: not a prime");
    if (p == 2) return 1;
    const auto factors = factorize(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool primitive = true;
        for (const auto& f : factors) {
            if (pow_mod(g, (p - 1) / f.prime, p) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
    throw std::logic_error("find_primitive_root: no generator found");
}

inline PrimeContext make_prime_context(u64 p) {
    if (!is_prime(p)) throw std::domain_error("make_prime_context: " + std::to_string(p) + " is not prime");
    if (p >= kMaxPrime) throw std::domain_error("make_prime_context: prime exceeds the 2^61 cap");
    PrimeContext ctx;
    ctx.p = p;
    ctx.factorization_of_p_minus_1 = factorize(p - 1);
    ctx.divisors_of_p_minus_1 = divisors_from(ctx.factorization_of_p_minus_1);
    ctx.g = find_primitive_root(p);
    return ctx;
}

// Least T >= 1 with x^T = 1 mod p, found by peeling prime factors off p-1
// rather than scanning.
inline u64 multiplicative_order(u64 x, const PrimeContext& ctx) {
    if (x % ctx.p == 0) throw std::domain_error("multiplicative_order: argument divisible by p");
    u64 order = ctx.p - 1;
    for (const auto& f : ctx.factorization_of_p_minus_1) {
        for (int i = 0; i < f.exponent; ++i) {
            if (order % f.prime == 0 && pow_mod(x, order / f.prime, ctx.p) == 1)
                order /= f.prime;
            else
                break;
        }
    }
    return order;
}

// lambda = g^{(p-1)/T}, an element of exact order T, with t = (p-1)/T.
struct OrderedElement {
    u64 lambda = 1;
    u64 T = 1;
    u64 t = 1;
};

inline OrderedElement element_of_order(const PrimeContext& ctx, u64 T) {
    if (T == 0 || (ctx.p - 1) % T != 0)
        throw std::domain_error("element_of_order: T does not divide p-1");
    OrderedElement e;
    e.T = T;
    e.t = (ctx.p - 1) / T;
    e.lambda = pow_mod(ctx.g, e.t, ctx.p);
    if (ctx.p > 2 && multiplicative_order(e.lambda, ctx) != T)
        throw std::logic_error("element_of_order: order verification failed");
    return e;
}

} // namespace expsum
