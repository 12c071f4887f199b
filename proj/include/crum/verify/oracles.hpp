#pragma once

#include "crum/analytic/analytic_fn.hpp"
#include "crum/analytic/quadrature.hpp"
#include "crum/families/family.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace crum {

/// k lowest eigenvalues of p^2 + U on [domain.lo, domain.hi] with Dirichlet ends,
/// from the 3-point finite-difference matrix, Richardson-extrapolated over N and 2N.
///
/// edge_power > 0 declares eigenfunctions behaving like x^edge_power at the lower edge,
/// which adds an h^(2 edge_power - 1) error term; a third grid removes it.
std::vector<double> grid_eigensolve(const std::function<double(double)>& u, Interval domain, int n,
                                    int k, double edge_power = 0.0);
std::vector<double> grid_eigensolve(const AnalyticFn& u, Interval domain, int n, int k,
                                    double edge_power = 0.0);

struct GramResult {
    Eigen::MatrixXcd matrix;
    /// max |G - G^H|.
    double hermiticity_defect = 0.0;
    /// largest quadrature error estimate over the entries.
    double max_error = 0.0;
    /// Indices of the input functions whose norm diverged; their rows are left at zero.
    std::vector<int> divergent;
};

/// Matrix of inner products <f_i, f_j>. Each function is evaluated once per node.
/// Functions with a divergent norm are flagged and excluded.
/// Throws AccuracyError when a convergent entry misses the tolerance.
GramResult gram_matrix(const std::vector<AnalyticFn>& fs, const QuadratureSpec& q);

/// Same, for functions given as a value callback: vals(x, out) fills out[0..count).
GramResult gram_matrix(const std::function<void(double, std::vector<cplx>&)>& vals, int count,
                       const QuadratureSpec& q);

/// Sign changes of a real function on an open uniform grid of `points` nodes in (lo, hi),
/// each refined by bisection. Exact zeros on the grid are skipped.
/// Samples below this fraction of the peak magnitude are ignored by count_nodes.
inline constexpr double kNodeNoiseFloor = 1e-9;

struct NodeScan {
    int count = 0;
    std::vector<double> locations;
};
NodeScan count_nodes(const std::function<double(double)>& f, Interval window, int points = 2001);

} // namespace crum
