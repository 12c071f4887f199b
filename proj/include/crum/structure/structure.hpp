#pragma once

#include "crum/analytic/analytic_fn.hpp"
#include "crum/dqm/chain.hpp"
#include "crum/families/family.hpp"
#include "crum/oqm/chain.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace crum::structure {

/// Fitted V^[1](x; lambda) = kappa V(x; lambda') (U^[1] = kappa U(x; lambda') for oQM).
struct ShapeFit {
    double kappa = 0.0;
    /// Imaginary part of the fitted kappa, kept for the report.
    double kappa_imag = 0.0;
    std::vector<cplx> lambda_prime;
    double max_residual = 0.0;
    int samples = 0;
    bool converged = false;
    /// converged, kappa > 0 and the residual within tolerance.
    bool shape_invariant = false;
};

/// Fits on 2 + |lambda| anchor points, then checks the samples; residuals are relative to
/// max(1, |V^[1]|). The oQM fit is Gauss-Newton in (kappa, lambda'); the dQM fit is linear
/// least squares on the numerator of V^[1] as a polynomial in e^{ix}, with lambda' read off
/// its roots.
ShapeFit shape_invariance_residual(const OqmFamilyPtr& fam, const std::vector<oqm::LevelPtr>& chain,
                                   const std::vector<double>& samples, double tolerance = 1e-8);
ShapeFit shape_invariance_residual(const DqmFamilyPtr& fam, const dqm::Chain& chain,
                                   const std::vector<cplx>& samples, double tolerance = 1e-7);

/// Orbit lambda^[0..n] of the fitted map with its kappa and E_1 values.
struct ShapeInvarianceData {
    std::string family;
    double kappa = 0.0;
    std::vector<FamilyPtr> orbit;
    std::vector<double> e1;
    std::vector<ShapeFit> fits;
};

/// Iterates the fit nmax times, refitting at each orbit point. Orbit members are built with
/// the family constraints enforced, so a violation raises ParameterError.
ShapeInvarianceData shape_invariance(const FamilyPtr& fam, int nmax);

/// sum_{s<n} kappa^s E_1(lambda^[s]).
double si_spectrum(const ShapeInvarianceData& sid, int n);

/// A(lambda^[0])dag ... A(lambda^[n-1])dag phi_0(x; lambda^[n]).
AnalyticFn si_eigenfunction(const ShapeInvarianceData& sid, int n);

/// max |r_k - mean r| / |mean r| for r_k = si_eigenfunction / phi_n at the sample points,
/// skipping points within 1e-6 of a node of phi_n.
double si_ratio_spread(const ShapeInvarianceData& sid, int n, const std::vector<double>& samples);

/// Applies both sides of A(l)A(l)dag = kappa A(l')dag A(l') + E_1(l) to test functions.
double shape_operator_residual(const ShapeInvarianceData& sid, const std::vector<double>& samples);

enum class EtaRelation { eta_affine, V1_from_eta, eta_level, Vs_product };

std::string eta_relation_name(EtaRelation r);

/// eta_affine: phi_1 / phi_0 against its least-squares fit a + b eta (any family).
/// V1_from_eta: V^[1](x + i g/2) = V(x) (eta(x - i g) - eta(x)) / (eta(x) - eta(x + i g)).
/// eta_level: phi^[s]_{s+1} / phi^[s]_s affine in eta^[s](x) = sum_k eta(x + i(2k - s)g/2), s <= depth.
/// Vs_product: V^[s](x + i s g/2) = V(x) prod_k (eta(x - i g) - eta(x + i k g)) / (eta(x) - eta(x + i(k+1)g)).
double eta_relation_residual(EtaRelation kind, const Family& fam, const dqm::Chain* chain,
                             const std::vector<cplx>& samples);

/// Large-c scaling of a difference potential:
/// V(x; c) = a (1 + i (g/c) w_1(x) + i (g/c)^2 w_2(x)) with shift g/c.
struct LimitScaling {
    double a = 1.0;
    double gamma = 1.0;
    AnalyticFn w1 = polynomial_fn({0.0, 1.0});
    AnalyticFn w2 = constant_fn(0.0);
    std::vector<double> c_values{10.0, 100.0, 1000.0};
};

enum class LimitMode { gamma_to_0, c_to_inf, casoratian_transfer };

std::string limit_mode_name(LimitMode m);

struct LimitTable {
    LimitMode mode;
    std::vector<double> parameter;
    std::vector<double> error;
    /// Order p of error ~ gamma^p or c^-p, by least squares on the logs.
    double slope = 0.0;
    bool monotone = true;
    /// The errors did not decrease steadily or sat at rounding level.
    bool inconclusive = false;
};

/// gamma^{-n(n-1)/2} W_g[fs](x) against W[fs](x), worst over the points.
LimitTable limit_gamma_to_0(const std::vector<AnalyticFn>& fs, const std::vector<double>& gammas,
                            const std::vector<double>& points);
/// (c / (sqrt(a) g)) A and (c^2 / (a g^2)) H on e^{-x^2/2} and x e^{-x^2/2} against
/// d/dx - W' and p^2 + W'^2 + W'' with W' = -Re w_1.
LimitTable limit_c_to_inf(const LimitScaling& sc, const std::vector<double>& points);
/// (c / g) times the depth-1 Casoratian formula against W[phi_0, phi_1] / phi_0 of the oQM limit.
LimitTable limit_casoratian_transfer(const LimitScaling& sc, const std::vector<double>& points);

/// Header "mode,parameter,max_error,fitted_slope" and one row per parameter.
void write_csv(std::ostream& os, const std::vector<LimitTable>& tables);

} // namespace crum::structure
