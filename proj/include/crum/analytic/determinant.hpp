#pragma once

#include "crum/analytic/analytic_fn.hpp"

#include <Eigen/Dense>

#include <vector>

namespace crum {

struct DetResult {
    cplx value;
    /// max |U_ij| / max |A_ij| of the pivoted LU factorization.
    double growth = 1.0;
};

/// Determinant by partially pivoted LU. The empty matrix has determinant 1.
DetResult lu_determinant(Eigen::MatrixXcd a);

/// Determinant of a square matrix of jets, computed by elimination in jet arithmetic.
Jet jet_determinant(std::vector<std::vector<Jet>> m);

/// det(f_k^{(j)}(x)); 1 for an empty list.
cplx wronskian(const std::vector<AnalyticFn>& fs, cplx x);
DetResult wronskian_lu(const std::vector<AnalyticFn>& fs, cplx x);
/// Taylor jet of the Wronskian about x, to the given order.
Jet wronskian_jet(const std::vector<AnalyticFn>& fs, cplx x, int order);

/// i^{n(n-1)/2} det(f_k(x + i(n+1-2j)gamma/2)), j = 1..n; 1 for an empty list.
cplx casoratian(const std::vector<AnalyticFn>& fs, cplx x, double gamma);
DetResult casoratian_lu(const std::vector<AnalyticFn>& fs, cplx x, double gamma);
/// Same, with the functions given as a table of values: vals[j][k] = f_k(x + i(n+1-2(j+1))gamma/2).
DetResult casoratian_from_values(const Eigen::MatrixXcd& vals);

} // namespace crum
