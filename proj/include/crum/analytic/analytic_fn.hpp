#pragma once

#include "crum/analytic/jet.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace crum {

/// Highest jet order served by closed-form recurrences.
inline constexpr int kMaxExactJetOrder = 32;
/// Highest jet order served by the Cauchy-circle fallback.
inline constexpr int kMaxNumericJetOrder = 12;

/// A complex-analytic function on the horizontal strip |Im x| <= strip_halfwidth.
///
/// Holds a value evaluator and optionally an exact jet evaluator. Cheap to copy;
/// the callables are shared.
class AnalyticFn {
public:
    using Eval = std::function<cplx(cplx)>;
    using JetEval = std::function<Jet(cplx, int)>;

    AnalyticFn();
    AnalyticFn(std::string label, Eval eval,
               double strip_halfwidth = std::numeric_limits<double>::infinity());
    /// Function known through its jets; the value is the zeroth coefficient.
    static AnalyticFn from_jet(std::string label, JetEval jet,
                               double strip_halfwidth = std::numeric_limits<double>::infinity());

    AnalyticFn& with_jet(JetEval jet);
    AnalyticFn& with_real(bool real);
    AnalyticFn& with_label(std::string label);
    AnalyticFn& with_strip(double strip_halfwidth);

    const std::string& label() const { return label_; }
    double strip_halfwidth() const { return strip_; }
    bool is_real() const { return real_; }
    bool has_exact_jet() const { return static_cast<bool>(jet_); }
    bool in_strip(cplx x) const;

    /// Value at x; throws DomainError outside the strip.
    cplx operator()(cplx x) const;
    /// Value without the strip check.
    cplx raw(cplx x) const { return eval_(x); }
    /// Taylor jet about x. Exact when available, Cauchy-circle otherwise.
    Jet jet(cplx x, int order) const;

private:
    void check(cplx x) const;

    std::string label_;
    Eval eval_;
    JetEval jet_;
    double strip_;
    bool real_ = false;
};

/// conj(f(conj(x))).
cplx star_eval(const AnalyticFn& f, cplx x);
Jet eval_jet(const AnalyticFn& f, cplx x, int order);
/// The function x -> conj(f(conj(x))).
AnalyticFn star(const AnalyticFn& f);

/// Builds a function from a jet-level expression; values come from order-0 jets.
AnalyticFn jet_function(std::string label, std::function<Jet(const Jet&)> expr,
                        double strip_halfwidth = std::numeric_limits<double>::infinity());

AnalyticFn constant_fn(cplx v);
/// Polynomial sum c_k x^k.
AnalyticFn polynomial_fn(std::vector<cplx> coeffs);

} // namespace crum
