#include "crum/analytic/special.hpp"

#include "crum/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace crum {

cplx qpoch_inf(cplx a, cplx q) {
    if (!(std::abs(q) < 1.0)) {
        throw DomainError("q-Pochhammer symbol needs |q| < 1");
    }
    cplx r = 1.0;
    cplx t = a;
    for (int k = 0; k < 100000 && std::abs(t) >= 1e-17; ++k) {
        r *= 1.0 - t;
        t *= q;
    }
    return r;
}

cplx qpoch_finite(cplx a, cplx q, int n) {
    if (n < 0) {
        throw IndexError("finite q-Pochhammer symbol needs n >= 0");
    }
    cplx r = 1.0;
    cplx t = a;
    for (int k = 0; k < n; ++k) {
        r *= 1.0 - t;
        t *= q;
    }
    return r;
}

cplx complex_gamma(cplx z) {
    const double re = z.real();
    if (z.imag() == 0.0 && re <= 0.0 && re == std::floor(re)) {
        throw PoleError("gamma function pole at a non-positive integer");
    }
    if (re < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * z) * complex_gamma(1.0 - z));
    }
    static constexpr double g = 7.0;
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    const cplx zm = z - 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) {
        x += c[static_cast<size_t>(i)] / (zm + static_cast<double>(i));
    }
    const cplx t = zm + g + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::exp((zm + 0.5) * std::log(t) - t) * x;
}

cplx special_eval(SpecialKind kind, cplx a, cplx q, int n) {
    switch (kind) {
    case SpecialKind::qpoch_inf:
        return qpoch_inf(a, q);
    case SpecialKind::qpoch_finite:
        return qpoch_finite(a, q, n);
    case SpecialKind::complex_gamma:
        return complex_gamma(a);
    }
    throw CapabilityError("unknown special function");
}

} // namespace crum
