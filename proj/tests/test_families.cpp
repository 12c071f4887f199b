#include "crum/analytic/special.hpp"
#include "crum/error.hpp"
#include "crum/families/family.hpp"
#include "crum/verify/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

using namespace crum;

namespace {

const cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

ParamSet aw_params() {
    ParamSet p;
    p.assign("a=(0.1+0.2i,0.1-0.2i,0.3,-0.4)");
    p.assign("q=0.6");
    return p;
}

std::vector<double> uniform_points(double lo, double hi, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> xs(static_cast<size_t>(n));
    for (auto& x : xs) {
        x = u(rng);
    }
    return xs;
}

// -f'' + U f via jets of the family's own eigenfunction and closed-form potential
cplx oqm_h(const OqmFamily& f, int n, double x) {
    const Jet j = f.phi_jet(n, x, 2);
    return -j.derivative_value(2) + f.potential_closed(x) * j[0];
}

} // namespace

TEST_CASE("hermite prepotential and potential") {
    const auto f = make_oqm_family("hermite", {});
    for (double x : uniform_points(-4, 4, 10, 1)) {
        CHECK(std::abs(f->prepotential()(x) + 0.5 * x * x) < 1e-14);
        CHECK(std::abs(f->potential()(x) - (x * x - 1.0)) < 1e-12);
    }
    CHECK(std::isinf(f->domain().lo));
    CHECK(std::isinf(f->domain().hi));
}

TEST_CASE("constraint violations name the inequality") {
    try {
        make_family("laguerre", ParamSet{{"g", 0.5}});
        FAIL("expected a parameter error");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("g > 1") != std::string::npos);
    }
    CHECK_THROWS_AS(make_family("jacobi", ParamSet{{"g", 1.0}}), ParameterError);
    CHECK_THROWS_AS(make_family("q_hermite", ParamSet{{"q", 1.5}}), ParameterError);
    CHECK_THROWS_AS(make_family("nonesuch", {}), ParameterError);
    CHECK_THROWS_AS(make_family("hermite", ParamSet{{"g", 2.0}}), ParameterError);

    ParamSet open;
    open.assign("a=(0.1+0.2i,0.1+0.2i,0.3,-0.4)");
    open.assign("q=0.5");
    try {
        make_family("askey_wilson", open);
        FAIL("expected a parameter error");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("as a set") != std::string::npos);
    }
    ParamSet big;
    big.assign("a=(1.2,0,0,0)");
    big.assign("q=0.5");
    CHECK_THROWS_AS(make_family("askey_wilson", big), ParameterError);
}

TEST_CASE("askey_wilson with vanishing a_j") {
    ParamSet p;
    p.assign("a=(0,0,0,0)");
    p.assign("q=0.5");
    const auto f = make_dqm_family("askey_wilson", p);
    for (double x : uniform_points(0.1, 3.0, 10, 2)) {
        const cplx e2 = std::exp(2.0 * I * x);
        const cplx expect = 1.0 / ((1.0 - e2) * (1.0 - 0.5 * e2));
        CHECK(std::abs(family_eval(*f, FamilyPart::V, 0, x) - expect) < 1e-13 * std::abs(expect));
    }
    CHECK(f->gamma() == doctest::Approx(std::log(0.5)));
}

TEST_CASE("energies against oracles") {
    const auto h = make_family("hermite", {});
    CHECK(family_eval(*h, FamilyPart::energy, 3).real() == doctest::Approx(6.0));
    const auto ev = grid_eigensolve([](double x) { return x * x - 1.0; }, {-10.0, 10.0}, 2000, 4);
    CHECK(std::abs(ev[3] - 6.0) < 1e-6);

    const auto qh = make_dqm_family("q_hermite", ParamSet{{"q", 0.5}});
    CHECK(std::abs(family_eval(*qh, FamilyPart::energy, 1).real() - 1.0) < 1e-14);
    // least-squares E from the difference equation at 10 points
    const AnalyticFn p1 = qh->phi(1);
    cplx num = 0.0;
    double den = 0.0;
    for (double x : uniform_points(0.2, 2.9, 10, 3)) {
        const cplx hp = qh->hamiltonian(p1, x);
        num += std::conj(p1(x)) * hp;
        den += std::norm(p1(x));
    }
    CHECK(std::abs(num.real() / den - 1.0) < 1e-10);

    const auto j = make_family("jacobi", ParamSet{{"g", 2.0}});
    CHECK(std::abs(family_eval(*j, FamilyPart::eta, 0, kPi / 2)) < 1e-15);
}

TEST_CASE("family_eval errors") {
    const auto h = make_family("hermite", {});
    CHECK_THROWS_AS(family_eval(*h, FamilyPart::phi_n, 33, 0.0), IndexError);
    CHECK_THROWS_AS(family_eval(*h, FamilyPart::energy, -1), IndexError);
    const auto aw = make_family("askey_wilson", aw_params());
    CHECK_THROWS_AS(family_eval(*aw, FamilyPart::phi_n, 2, cplx(1.0, 5.0)), DomainError);
}

TEST_CASE("norms against closed forms") {
    for (double g : {1.5, 2.0, 3.25}) {
        const double alpha = g - 0.5;
        const auto lag = make_family("laguerre", ParamSet{{"g", g}});
        const auto jac = make_family("jacobi", ParamSet{{"g", g}});
        for (int n = 0; n <= 4; ++n) {
            const double hl = 0.5 * std::tgamma(n + alpha + 1.0) / std::tgamma(n + 1.0);
            CHECK(std::abs(lag->norm(n) - hl) <= 1e-9 * hl);
            const double hj = std::pow(2.0, 2 * alpha + 1) * std::pow(std::tgamma(n + alpha + 1.0), 2) /
                              ((2 * n + 2 * alpha + 1) * std::tgamma(n + 1.0) *
                               std::tgamma(n + 2 * alpha + 1.0));
            CHECK(std::abs(jac->norm(n) - hj) <= 1e-9 * hj);
        }
    }
    const auto h = make_family("hermite", {});
    CHECK(std::abs(h->norm(3) - std::sqrt(kPi) * 6.0 / 8.0) < 1e-10);
}

TEST_CASE("property: orthogonality of the first seven eigenfunctions") {
    std::vector<FamilyPtr> fams = {make_family("hermite", {}),
                                   make_family("laguerre", ParamSet{{"g", 2.5}}),
                                   make_family("jacobi", ParamSet{{"g", 1.7}}),
                                   make_family("q_hermite", ParamSet{{"q", 0.5}}),
                                   make_family("askey_wilson", aw_params())};
    for (const auto& f : fams) {
        CAPTURE(f->name());
        std::vector<AnalyticFn> fs;
        for (int n = 0; n <= 6; ++n) {
            fs.push_back(f->phi(n));
        }
        const GramResult g = gram_matrix(fs, f->gram_quadrature());
        for (int i = 0; i <= 6; ++i) {
            CHECK(g.matrix(i, i).real() > 0.0);
            for (int k = 0; k <= 6; ++k) {
                if (i != k) {
                    const double scale = std::sqrt(g.matrix(i, i).real() * g.matrix(k, k).real());
                    CHECK(std::abs(g.matrix(i, k)) <= 1e-8 * scale);
                }
            }
        }
    }
}

TEST_CASE("property: eigen-residual at random points") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> gd(1.1, 5.0);
    for (int trial = 0; trial < 4; ++trial) {
        const double g = gd(rng);
        for (const char* name : {"laguerre", "jacobi"}) {
            const auto f = make_oqm_family(name, ParamSet{{"g", g}});
            const Interval w = f->sample_window();
            for (int n = 0; n <= 6; ++n) {
                for (double x : uniform_points(w.lo + 0.05 * w.width(), w.hi - 0.05 * w.width(), 20,
                                               trial * 10 + static_cast<unsigned>(n))) {
                    const cplx p = f->phi(n)(x);
                    const double scale = std::max(1.0, f->energy(n)) * std::max(std::abs(p), 1e-3);
                    CHECK(std::abs(oqm_h(*f, n, x) - f->energy(n) * p) <= 1e-8 * scale);
                }
            }
        }
    }
    const auto aw = make_dqm_family("askey_wilson", aw_params());
    for (int n = 0; n <= 6; ++n) {
        const AnalyticFn p = aw->phi(n);
        for (double x : uniform_points(0.15, 3.0, 20, 40 + static_cast<unsigned>(n))) {
            const double scale = std::max(1.0, std::abs(aw->energy(n))) * std::max(std::abs(p(x)), 1e-3);
            CHECK(std::abs(aw->hamiltonian(p, x) - aw->energy(n) * p(x)) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("property: eigenfunctions and eta are real functions") {
    const auto aw = make_dqm_family("askey_wilson", aw_params());
    const auto lag = make_family("laguerre", ParamSet{{"g", 2.2}});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> re(0.2, 2.9), im(-0.4, 0.4);
    for (int k = 0; k < 20; ++k) {
        const cplx x(re(rng), im(rng));
        for (int n : {0, 1, 4}) {
            const AnalyticFn p = aw->phi(n);
            CHECK(std::abs(star_eval(p, x) - p(x)) <= 1e-12 * std::abs(p(x)));
            const AnalyticFn l = lag->phi(n);
            CHECK(std::abs(star_eval(l, x) - l(x)) <= 1e-12 * std::abs(l(x)));
        }
        CHECK(std::abs(star_eval(aw->eta(), x) - aw->eta()(x)) < 1e-14);
    }
    for (double x : uniform_points(0.1, 3.0, 20, 11)) {
        CHECK(std::abs((aw->v(x) + aw->v_star(x)).imag()) < 1e-12);
    }
}

TEST_CASE("phi_n is phi_0 times a degree-n polynomial in eta") {
    const auto aw = make_dqm_family("askey_wilson", aw_params());
    const auto xs = uniform_points(0.2, 2.9, 12, 12);
    for (int n = 0; n <= 5; ++n) {
        // divided differences of P_n(eta) along eta: order n is constant, order n+1 vanishes
        std::vector<double> ys, ps;
        for (size_t k = 0; k <= static_cast<size_t>(n + 1); ++k) {
            ys.push_back(std::cos(xs[k]));
            ps.push_back((aw->phi(n)(xs[k]) / aw->phi(0)(xs[k])).real());
        }
        std::vector<double> d = ps;
        for (size_t lvl = 1; lvl < d.size(); ++lvl) {
            for (size_t k = d.size() - 1; k >= lvl; --k) {
                d[k] = (d[k] - d[k - 1]) / (ys[k] - ys[k - lvl]);
            }
        }
        CHECK(std::abs(d[static_cast<size_t>(n)] - 1.0) < 1e-7);
        CHECK(std::abs(d.back()) < 1e-6);
    }
}

TEST_CASE("virtual states") {
    const auto h = make_oqm_family("hermite", {});
    const AnalyticFn v = h->virtual_state();
    for (double x : uniform_points(-3, 3, 10, 13)) {
        CHECK(std::abs(v(x) - std::exp(0.5 * x * x)) < 1e-12 * std::exp(0.5 * x * x));
    }
    try {
        inner_product(v, v, h->virtual_quadrature());
        FAIL("expected divergence");
    } catch (const AccuracyError& e) {
        CHECK(std::string(e.what()).find("diverges") != std::string::npos);
    }

    const auto aw = make_dqm_family("askey_wilson", aw_params());
    const AnalyticFn w = aw->virtual_state();
    const double g = aw->gamma();
    for (double x : uniform_points(0.2, 2.9, 10, 14)) {
        // A-dagger f = i (sqrt(V) f(x - i gamma/2) - sqrt(V*) f(x + i gamma/2))
        const cplx a = I * (aw->sqrt_v(x) * w(x - I * g / 2.0) - aw->sqrt_v_star(x) * w(x + I * g / 2.0));
        CHECK(std::abs(a) <= 1e-8 * std::abs(w(x)));
    }
    const auto sh = aw->shifted_for_virtual();
    for (double x : uniform_points(0.2, 2.9, 5, 15)) {
        CHECK(std::abs(w(x) - std::sin(x) / sh->phi(0)(x)) < 1e-13 * std::abs(w(x)));
    }
}

TEST_CASE("parameter sets and descriptors") {
    ParamSet p = aw_params();
    CHECK(p.get("a1") == cplx(0.1, 0.2));
    CHECK(p.get("a4") == cplx(-0.4, 0.0));
    CHECK(ParamSet::from_json(p.to_json()).to_json() == p.to_json());
    CHECK(parse_complex("-0.2i") == cplx(0.0, -0.2));
    CHECK_THROWS_AS(parse_complex("abc"), ParameterError);

    const auto f = make_family("laguerre", ParamSet{{"g", 2.0}});
    const auto d = f->descriptor(8);
    CHECK(d["name"] == "laguerre");
    CHECK(d["nmax"] == 8);
    CHECK(d["domain"][0] == 0.0);
    CHECK(d["domain"][1] == "inf");
    CHECK(d["gamma"] == 0.0);
}

TEST_CASE("self-check report") {
    for (const auto& c : family_self_check(*make_family("askey_wilson", aw_params()))) {
        CAPTURE(c.name);
        CHECK(c.pass);
    }
    CHECK(family_catalog().size() == 5);
}
