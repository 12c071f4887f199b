#pragma once

#include "crum/analytic/analytic_fn.hpp"

#include <functional>
#include <vector>

namespace crum {

enum class DomainKind { finite, half_line, full_line };
enum class QuadRule { gauss_legendre, double_exponential };

/// Integration domain and rule.
///
/// finite: [lo, hi]; half_line: [lo, inf); full_line: the real axis.
/// `margin` shrinks every finite endpoint inwards.
/// `points` is the initial Gauss-Legendre order, or the initial level count for
/// the double-exponential rule (0 picks a default).
struct QuadratureSpec {
    DomainKind kind = DomainKind::finite;
    double lo = 0.0;
    double hi = 1.0;
    QuadRule rule = QuadRule::double_exponential;
    int points = 0;
    double tolerance = 1e-10;
    double margin = 0.0;
    int max_refinements = 7;
};

struct QuadratureResult {
    cplx value = 0.0;
    double error = 0.0;
    /// sum of |w f| over the nodes; the scale against which errors are judged.
    double magnitude = 0.0;
    bool converged = false;
    /// Non-finite sums, or mass concentrated at the extreme nodes.
    bool diverged = false;
    int evaluations = 0;
};

/// Vector integrand: fills out[0..count) with the integrand values at x.
using VectorIntegrand = std::function<void(double x, std::vector<cplx>& out)>;

std::vector<QuadratureResult> integrate_many(const VectorIntegrand& f, int count,
                                             const QuadratureSpec& q);
QuadratureResult integrate(const std::function<cplx(double)>& f, const QuadratureSpec& q);

/// integral of conj(f) g over the domain; throws AccuracyError when refinement fails.
cplx inner_product(const AnalyticFn& f, const AnalyticFn& g, const QuadratureSpec& q);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace crum
