// Prints, for a small prime p, one element of every multiplicative order
// T dividing p-1 together with the cofactor t = (p-1)/T.
#include <expsum/ring.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    expsum::u64 p = 1009;
    if (argc > 1) p = std::strtoull(argv[1], nullptr, 10);

    expsum::PrimeContext ctx;
    try {
        ctx = expsum::make_prime_context(p);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    std::printf("p = %llu, smallest primitive root g = %llu\n",
                static_cast<unsigned long long>(ctx.p),
                static_cast<unsigned long long>(ctx.g));
    std::printf("%12s %12s %12s\n", "T", "t=(p-1)/T", "lambda=g^t");
    for (expsum::u64 T : ctx.divisors_of_p_minus_1) {
        const auto el = expsum::element_of_order(ctx, T);
        std::printf("%12llu %12llu %12llu\n",
                    static_cast<unsigned long long>(el.T),
                    static_cast<unsigned long long>(el.t),
                    static_cast<unsigned long long>(el.lambda));
    }
    return 0;
}
