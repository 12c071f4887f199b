#include "crum/analytic/analytic_fn.hpp"
#include "crum/analytic/determinant.hpp"
#include "crum/analytic/quadrature.hpp"
#include "crum/analytic/special.hpp"
#include "crum/error.hpp"
#include "crum/families/family.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace crum;

namespace {

const cplx I(0.0, 1.0);

AnalyticFn gauss() {
    return jet_function("gauss", [](const Jet& x) { return exp(-0.5 * x * x); }).with_real(true);
}

AnalyticFn x_gauss() {
    return jet_function("xgauss", [](const Jet& x) { return x * exp(-0.5 * x * x); })
        .with_real(true);
}

// Generic function known only by value: exercises the Cauchy fallback.
AnalyticFn value_only(std::function<cplx(cplx)> f, double strip = 2.0) {
    return AnalyticFn("value-only", std::move(f), strip);
}

} // namespace

TEST_CASE("star_eval") {
    const AnalyticFn f("x^2+i", [](cplx x) { return x * x + I; });
    CHECK(std::abs(star_eval(f, 1.0) - cplx(1.0, -1.0)) < 1e-15);

    const AnalyticFn e("e^{ix}", [](cplx x) { return std::exp(I * x); });
    CHECK(std::abs(star_eval(e, I) - std::numbers::e) < 1e-14);

    const AnalyticFn r = polynomial_fn({1.0, -2.0, 0.5});
    for (double x : {-1.3, 0.0, 0.7, 2.2}) {
        CHECK(star_eval(r, x) == r(x));
    }
}

TEST_CASE("star of star is the identity at random strip points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-0.9, 0.9);
    const AnalyticFn f("mixed", [](cplx x) { return std::exp(I * x) * (x + 0.3 * I) / (2.0 + x * x); },
                       1.0);
    const AnalyticFn fs = star(star(f));
    for (int k = 0; k < 10; ++k) {
        const cplx x(re(rng), im(rng));
        CHECK(std::abs(fs(x) - f(x)) <= 1e-15 * (1.0 + std::abs(f(x))));
    }
}

TEST_CASE("strip violations raise domain errors naming the point") {
    const AnalyticFn f("narrow", [](cplx x) { return x; }, 0.5);
    CHECK_THROWS_AS(f(cplx(0.0, 0.6)), DomainError);
    CHECK_THROWS_AS(star_eval(f, cplx(0.1, -0.7)), DomainError);
    try {
        casoratian({f, f}, 0.0, 1.2);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("0.6") != std::string::npos);
    }
}

TEST_CASE("eval_jet on polynomials and the gaussian") {
    const Jet j = eval_jet(polynomial_fn({0.0, 0.0, 1.0}), 1.0, 2);
    CHECK(std::abs(j[0] - 1.0) < 1e-15);
    CHECK(std::abs(j[1] - 2.0) < 1e-15);
    CHECK(std::abs(j[2] - 1.0) < 1e-15);

    const Jet g = eval_jet(gauss(), 0.0, 2);
    CHECK(std::abs(g[0] - 1.0) < 1e-15);
    CHECK(std::abs(g[1]) < 1e-15);
    CHECK(std::abs(g[2] + 0.5) < 1e-15);
}

TEST_CASE("eval_jet of hermite phi_2 agrees with central differences") {
    const auto fam = make_family("hermite", {});
    const AnalyticFn p2 = fam->phi(2);
    const double x = 0.3;
    const Jet j = p2.jet(x, 3);
    auto f = [&](double t) { return p2(t); };
    // central differences, one Richardson step to remove the h^2 term
    auto rich = [](auto d, double h) { return (4.0 * d(h / 2) - d(h)) / 3.0; };
    const cplx d1 = rich([&](double h) { return (f(x + h) - f(x - h)) / (2 * h); }, 1e-3);
    const cplx d2 = rich([&](double h) { return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h); }, 1e-3);
    const cplx d3 = rich(
        [&](double h) {
            return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
        },
        1e-2);
    CHECK(std::abs(j.derivative_value(1) - d1) < 1e-6);
    CHECK(std::abs(j.derivative_value(2) - d2) < 1e-6);
    CHECK(std::abs(j.derivative_value(3) - d3) < 1e-6);
}

TEST_CASE("Cauchy fallback jets match exact jets") {
    const AnalyticFn exact = gauss();
    const AnalyticFn numeric = value_only([](cplx x) { return std::exp(-0.5 * x * x); });
    for (double x : {-0.7, 0.2, 1.4}) {
        const Jet a = exact.jet(x, 8), b = numeric.jet(x, 8);
        // rounding in the circle sum grows like eps k! / r^k with r = 0.1
        for (int k = 0; k <= 8; ++k) {
            double fact = 1.0;
            for (int j = 2; j <= k; ++j) {
                fact *= j;
            }
            const double tol = std::max(1e-10, 1e-14 * fact * std::pow(10.0, k));
            CHECK(std::abs(a.derivative_value(k) - b.derivative_value(k)) <=
                  tol * (1.0 + std::abs(a.derivative_value(k))));
        }
    }
    CHECK_THROWS_AS(numeric.jet(0.0, kMaxNumericJetOrder + 1), CapabilityError);
    CHECK_THROWS_AS(exact.jet(0.0, kMaxExactJetOrder + 1), CapabilityError);
}

TEST_CASE("jet arithmetic recurrences against closed forms") {
    const Jet x = Jet::variable(0.4, 6);
    const Jet s = sin(x), c = cos(x);
    const Jet one = s * s + c * c;
    CHECK(std::abs(one[0] - 1.0) < 1e-15);
    for (int k = 1; k <= 6; ++k) {
        CHECK(std::abs(one[k]) < 1e-15);
    }
    const Jet l = log(exp(x));
    for (int k = 0; k <= 6; ++k) {
        CHECK(std::abs(l[k] - x[k]) < 1e-14);
    }
    const Jet r = sqrt(x) * sqrt(x);
    for (int k = 0; k <= 6; ++k) {
        CHECK(std::abs(r[k] - x[k]) < 1e-14);
    }
    const Jet q = (x * x) / x;
    for (int k = 0; k <= 6; ++k) {
        CHECK(std::abs(q[k] - x[k]) < 1e-13);
    }
}

TEST_CASE("wronskian") {
    CHECK(wronskian({}, 0.3) == cplx(1.0));
    for (double x : {-2.0, 0.0, 1.5}) {
        CHECK(std::abs(wronskian({constant_fn(1.0), polynomial_fn({0.0, 1.0})}, x) - 1.0) < 1e-15);
    }
    CHECK(std::abs(wronskian({gauss(), x_gauss()}, 0.0) - 1.0) < 1e-15);
}

TEST_CASE("casoratian") {
    CHECK(casoratian({}, 0.3, 0.2) == cplx(1.0));
    const cplx w = casoratian({constant_fn(1.0), polynomial_fn({0.0, 1.0})}, 0.4, 0.3);
    CHECK(std::abs(w - 0.3) < 1e-15);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const AnalyticFn f1 = gauss(), f2 = polynomial_fn({0.2, -1.0, 0.3});
    for (int k = 0; k < 5; ++k) {
        const double x = u(rng);
        CHECK(std::abs(casoratian({f1, f2}, x, 0.25) + casoratian({f2, f1}, x, 0.25)) < 1e-14);
    }
}

TEST_CASE("determinant multilinearity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<AnalyticFn> base = {gauss(), x_gauss(), polynomial_fn({1.0, 0.5, -0.25})};
    for (int t = 0; t < 5; ++t) {
        const cplx c(u(rng), u(rng));
        const size_t k = static_cast<size_t>(t % 3);
        auto scaled = base;
        const AnalyticFn orig = base[k];
        scaled[k] = AnalyticFn::from_jet("scaled", [orig, c](cplx x, int o) { return orig.jet(x, o) * c; });
        const double x = u(rng);
        const cplx w0 = wronskian(base, x), w1 = wronskian(scaled, x);
        CHECK(std::abs(w1 - c * w0) <= 1e-13 * (1.0 + std::abs(w1)));
        const cplx c0 = casoratian(base, x, 0.3), c1 = casoratian(scaled, x, 0.3);
        CHECK(std::abs(c1 - c * c0) <= 1e-13 * (1.0 + std::abs(c1)));
    }
}

TEST_CASE("LU reports its growth factor") {
    Eigen::MatrixXcd m(2, 2);
    m << 1e-8, 1.0, 1.0, 1.0;
    const DetResult r = lu_determinant(m);
    CHECK(std::abs(r.value - (1e-8 - 1.0)) < 1e-15);
    CHECK(r.growth >= 1.0);
    CHECK(r.growth < 2.0);
}

TEST_CASE("inner products") {
    QuadratureSpec full;
    full.kind = DomainKind::full_line;
    full.tolerance = 1e-12;
    CHECK(std::abs(inner_product(gauss(), gauss(), full) - std::sqrt(std::numbers::pi)) < 1e-12);
    CHECK(std::abs(inner_product(gauss(), x_gauss(), full)) < 1e-14);

    QuadratureSpec gl = full;
    gl.rule = QuadRule::gauss_legendre;
    gl.points = 32;
    gl.kind = DomainKind::finite;
    gl.lo = -12.0;
    gl.hi = 12.0;
    gl.tolerance = 1e-10;
    CHECK(std::abs(inner_product(gauss(), gauss(), gl) - std::sqrt(std::numbers::pi)) < 1e-10);

    const AnalyticFn f("f", [](cplx x) { return std::exp(-x * x) * (1.0 + I * x); });
    const AnalyticFn g("g", [](cplx x) { return std::exp(-x * x / 3.0) * (x - 0.5 * I); });
    const cplx fg = inner_product(f, g, full), gf = inner_product(g, f, full);
    CHECK(std::abs(fg - std::conj(gf)) < 1e-14);
}

TEST_CASE("quadrature refinement and divergence") {
    QuadratureSpec q;
    q.kind = DomainKind::finite;
    q.lo = 0.0;
    q.hi = 1.0;
    q.tolerance = 1e-12;
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, q);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 2.0) < 1e-10);

    const auto d = integrate([](double x) { return 1.0 / (x * x); }, q);
    CHECK(d.diverged);

    QuadratureSpec full;
    full.kind = DomainKind::full_line;
    const AnalyticFn grow("grow", [](cplx x) { return std::exp(0.5 * x * x); });
    CHECK_THROWS_AS(inner_product(grow, grow, full), AccuracyError);
    try {
        inner_product(grow, grow, full);
    } catch (const AccuracyError& e) {
        CHECK(std::string(e.what()).find("diverges") != std::string::npos);
    }
}

TEST_CASE("askey-wilson ground states are orthogonal at two resolutions") {
    const auto fam = make_family("askey_wilson",
                                 ParamSet{{"a1", 0.0}, {"a2", 0.0}, {"a3", 0.0}, {"a4", 0.0}, {"q", 0.5}});
    QuadratureSpec q = fam->gram_quadrature();
    const cplx g01 = inner_product(fam->phi(0), fam->phi(1), q);
    CHECK(std::abs(g01) < 1e-10);
    q.points = 4;
    CHECK(std::abs(inner_product(fam->phi(0), fam->phi(1), q) - g01) < 1e-12);
}

TEST_CASE("special functions") {
    CHECK(qpoch_inf(0.0, 0.5) == cplx(1.0));
    // direct product with a tail far below double precision
    long double p = 1.0L;
    for (int k = 1; k < 200; ++k) {
        p *= 1.0L - std::pow(0.5L, k);
    }
    CHECK(std::abs(qpoch_inf(0.5, 0.5) - static_cast<double>(p)) < 1e-15);
    CHECK(std::abs(qpoch_inf(0.5, 0.5) - 0.2887880951) < 1e-10);
    CHECK(std::abs(qpoch_finite(0.5, 0.5, 2) - 0.375) < 1e-16);
    CHECK_THROWS_AS(qpoch_inf(0.1, 1.0), DomainError);

    CHECK(std::abs(complex_gamma(1.0) - 1.0) < 1e-14);
    CHECK(std::abs(complex_gamma(0.5) - std::sqrt(std::numbers::pi)) < 1e-14);
    for (double x : {0.3, 1.7, 4.5, 10.2, -2.5, -0.7}) {
        CHECK(std::abs(complex_gamma(x) - std::tgamma(x)) <= 1e-12 * std::abs(std::tgamma(x)));
    }
    // |Gamma(iy)|^2 = pi / (y sinh(pi y)), and Gamma(1/2 + iy) |^2 = pi / cosh(pi y)
    for (double y : {0.5, 3.0, 11.0, 20.0}) {
        const double m1 = std::norm(complex_gamma(cplx(0.0, y)));
        const double e1 = std::numbers::pi / (y * std::sinh(std::numbers::pi * y));
        CHECK(std::abs(m1 - e1) <= 1e-12 * e1);
        const double m2 = std::norm(complex_gamma(cplx(0.5, y)));
        const double e2 = std::numbers::pi / std::cosh(std::numbers::pi * y);
        CHECK(std::abs(m2 - e2) <= 1e-12 * e2);
    }
    // recurrence Gamma(z+1) = z Gamma(z) off the axis
    for (cplx z : {cplx(0.3, 2.0), cplx(-1.4, 5.0), cplx(2.5, -17.0)}) {
        CHECK(std::abs(complex_gamma(z + 1.0) - z * complex_gamma(z)) <= 1e-12 * std::abs(complex_gamma(z + 1.0)));
    }
    CHECK_THROWS_AS(complex_gamma(-3.0), PoleError);
    CHECK(std::abs(special_eval(SpecialKind::complex_gamma, 1.0) - 1.0) < 1e-14);
}
