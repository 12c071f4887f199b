#include "crum/analytic/analytic_fn.hpp"

#include "crum/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace crum {

namespace {

std::string point_text(cplx x) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << x.real() << (x.imag() < 0 ? " - " : " + ") << std::abs(x.imag()) << "i)";
    return os.str();
}

// Taylor coefficients from values on a circle of radius r about x.
Jet cauchy_jet(const AnalyticFn::Eval& f, cplx x, int order, double r) {
    const int m = std::max(32, 4 * (order + 1));
    std::vector<cplx> vals(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * std::numbers::pi * j / m;
        vals[static_cast<size_t>(j)] = f(x + std::polar(r, th));
    }
    std::vector<cplx> c(static_cast<size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double th = -2.0 * std::numbers::pi * j * k / m;
            s += vals[static_cast<size_t>(j)] * std::polar(1.0, th);
        }
        c[static_cast<size_t>(k)] = s / (static_cast<double>(m) * std::pow(r, k));
    }
    c[0] = f(x);
    return Jet(x, std::move(c));
}

} // namespace

AnalyticFn::AnalyticFn()
    : label_("zero"), eval_([](cplx) { return cplx(0.0); }),
      jet_([](cplx x, int k) { return Jet::constant(x, 0.0, k); }),
      strip_(std::numeric_limits<double>::infinity()), real_(true) {}

AnalyticFn::AnalyticFn(std::string label, Eval eval, double strip_halfwidth)
    : label_(std::move(label)), eval_(std::move(eval)), strip_(strip_halfwidth) {}

AnalyticFn AnalyticFn::from_jet(std::string label, JetEval jet, double strip_halfwidth) {
    auto j = std::make_shared<JetEval>(std::move(jet));
    AnalyticFn f(std::move(label), [j](cplx x) { return (*j)(x, 0).value(); }, strip_halfwidth);
    f.jet_ = [j](cplx x, int k) { return (*j)(x, k); };
    return f;
}

AnalyticFn& AnalyticFn::with_jet(JetEval jet) {
    jet_ = std::move(jet);
    return *this;
}

AnalyticFn& AnalyticFn::with_real(bool real) {
    real_ = real;
    return *this;
}

AnalyticFn& AnalyticFn::with_label(std::string label) {
    label_ = std::move(label);
    return *this;
}

AnalyticFn& AnalyticFn::with_strip(double strip_halfwidth) {
    strip_ = strip_halfwidth;
    return *this;
}

bool AnalyticFn::in_strip(cplx x) const {
    return std::abs(x.imag()) <= strip_ * (1.0 + 1e-12) + 1e-15;
}

void AnalyticFn::check(cplx x) const {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw DomainError(label_ + ": non-finite evaluation point");
    }
    if (!in_strip(x)) {
        std::ostringstream os;
        os << label_ << ": point " << point_text(x) << " outside strip |Im x| <= " << strip_;
        throw DomainError(os.str());
    }
}

cplx AnalyticFn::operator()(cplx x) const {
    check(x);
    return eval_(x);
}

Jet AnalyticFn::jet(cplx x, int order) const {
    if (order < 0) {
        throw CapabilityError(label_ + ": negative jet order");
    }
    check(x);
    if (jet_) {
        if (order > kMaxExactJetOrder) {
            throw CapabilityError(label_ + ": jet order " + std::to_string(order) +
                                  " beyond cap " + std::to_string(kMaxExactJetOrder));
        }
        return jet_(x, order);
    }
    if (order > kMaxNumericJetOrder) {
        throw CapabilityError(label_ + ": numeric jet order " + std::to_string(order) +
                              " beyond cap " + std::to_string(kMaxNumericJetOrder));
    }
    if (order == 0) {
        return Jet(x, {eval_(x)});
    }
    double r = std::min(0.1, strip_ / 2.0);
    r = std::min(r, strip_ - std::abs(x.imag()));
    if (!(r > 0.0)) {
        throw DomainError(label_ + ": no room for a differentiation circle at " + point_text(x));
    }
    return cauchy_jet(eval_, x, order, r);
}

cplx star_eval(const AnalyticFn& f, cplx x) { return std::conj(f(std::conj(x))); }

Jet eval_jet(const AnalyticFn& f, cplx x, int order) { return f.jet(x, order); }

AnalyticFn star(const AnalyticFn& f) {
    AnalyticFn g(f.label() + "*", [f](cplx x) { return std::conj(f.raw(std::conj(x))); },
                 f.strip_halfwidth());
    if (f.has_exact_jet()) {
        g.with_jet([f](cplx x, int k) {
            Jet j = f.jet(std::conj(x), k).conjugated();
            return j;
        });
    }
    g.with_real(f.is_real());
    return g;
}

AnalyticFn jet_function(std::string label, std::function<Jet(const Jet&)> expr,
                        double strip_halfwidth) {
    return AnalyticFn::from_jet(
        std::move(label), [expr](cplx x, int k) { return expr(Jet::variable(x, k)); },
        strip_halfwidth);
}

AnalyticFn constant_fn(cplx v) {
    AnalyticFn f("const", [v](cplx) { return v; });
    f.with_jet([v](cplx x, int k) { return Jet::constant(x, v, k); });
    f.with_real(v.imag() == 0.0);
    return f;
}

AnalyticFn polynomial_fn(std::vector<cplx> coeffs) {
    bool real = std::all_of(coeffs.begin(), coeffs.end(), [](cplx c) { return c.imag() == 0.0; });
    auto expr = [coeffs](const Jet& x) {
        Jet r = Jet::constant(x.anchor(), 0.0, x.order());
        for (size_t k = coeffs.size(); k-- > 0;) {
            r = r * x + coeffs[k];
        }
        return r;
    };
    AnalyticFn f = jet_function("poly", expr);
    f.with_real(real);
    return f;
}

} // namespace crum
