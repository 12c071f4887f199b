#pragma once

#include "crum/analytic/jet.hpp"

namespace crum {

enum class SpecialKind { qpoch_inf, qpoch_finite, complex_gamma };

/// (a; q)_infinity. Requires |q| < 1; the product stops once |a q^k| < 1e-17.
cplx qpoch_inf(cplx a, cplx q);
/// (a; q)_n = prod_{k<n} (1 - a q^k).
cplx qpoch_finite(cplx a, cplx q, int n);
/// Gamma function for complex argument (Lanczos, with reflection for Re z < 1/2).
cplx complex_gamma(cplx z);

/// Dispatch by kind. `a` is the argument of the Pochhammer symbols or z for the gamma function.
cplx special_eval(SpecialKind kind, cplx a, cplx q = 0.0, int n = 0);

} // namespace crum
