#pragma once

// Compensated (Kahan-Neumaier) accumulation for long real and complex
// sums. Error contract: after N additions of unit-magnitude terms the
// absolute error is at most N * 2^-48, far below the 1e-9 relative
// tolerances used by the verification suites.

#include <cmath>
#include <complex>

namespace expsum {

// Neumaier variant: also safe when the incoming term exceeds the running
// sum in magnitude.
struct KahanAccumulator {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double term) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }

    // Folds another accumulator in, preserving both compensation terms.
    void combine(const KahanAccumulator& other) {
        add(other.sum);
        compensation += other.compensation;
    }

    double value() const { return sum + compensation; }
};

struct ComplexAccumulator {
    KahanAccumulator re;
    KahanAccumulator im;

    void add(std::complex<double> term) {
        re.add(term.real());
        im.add(term.imag());
    }

    void add(double real_part, double imag_part) {
        re.add(real_part);
        im.add(imag_part);
    }

    void combine(const ComplexAccumulator& other) {
        re.combine(other.re);
        im.combine(other.im);
    }

    std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace expsum
