#include "crum/error.hpp"
#include "crum/structure/structure.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace crum;
using namespace crum::structure;

namespace {

const cplx I{0.0, 1.0};

DqmFamilyPtr askey_wilson(const std::string& a = "(0.3,-0.2,0.1+0.2i,0.1-0.2i)", double q = 0.6) {
    ParamSet p;
    p.assign("a=" + a);
    p.set("q", q);
    return make_dqm_family("askey_wilson", p);
}

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> xs;
    for (int k = 0; k < n; ++k) {
        xs.push_back(lo + (hi - lo) * (k + 0.5) / n);
    }
    return xs;
}

std::vector<cplx> cgrid(double lo, double hi, int n, double im = 0.0) {
    std::vector<cplx> xs;
    for (double x : grid(lo, hi, n)) {
        xs.emplace_back(x, im);
    }
    return xs;
}

} // namespace

TEST_CASE("dQM shape-invariance fit") {
    SUBCASE("q-Hermite") {
        const auto fam = make_dqm_family("q_hermite", ParamSet{{"q", 0.5}});
        const auto chain = dqm::Chain::build(fam, 1, 3);
        auto xs = cgrid(0.2, 2.9, 20);
        for (cplx x : cgrid(0.2, 2.9, 10, 0.5 * fam->gamma())) {
            xs.push_back(x);
        }
        const ShapeFit fit = shape_invariance_residual(fam, *chain, xs);
        CHECK(fit.kappa == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(fit.max_residual <= 1e-8);
        CHECK(fit.shape_invariant);
        CHECK(fit.samples == 30);
    }
    SUBCASE("Askey-Wilson, kappa = 1/q and a' = a q^(1/2)") {
        const double q = 0.6;
        const auto fam = askey_wilson();
        const auto chain = dqm::Chain::build(fam, 1, 3);
        const ShapeFit fit = shape_invariance_residual(fam, *chain, cgrid(0.2, 2.9, 30));
        CHECK(fit.kappa == doctest::Approx(1.0 / q).epsilon(1e-9));
        CHECK(std::abs(fit.kappa_imag) <= 1e-9);
        CHECK(fit.max_residual <= 1e-7);
        CHECK(fit.shape_invariant);
        REQUIRE(fit.lambda_prime.size() == 4);
        for (cplx a : fam->shape_params()) {
            const cplx want = a * std::sqrt(q);
            double best = 1e300;
            for (cplx b : fit.lambda_prime) {
                best = std::min(best, std::abs(b - want));
            }
            CHECK(best <= 1e-8);
        }
    }
}

TEST_CASE("oQM shape-invariance fit") {
    const auto xs = grid(-3.0, 3.0, 30);
    SUBCASE("Hermite") {
        const auto fam = make_oqm_family("hermite", {});
        const auto fit = shape_invariance_residual(fam, oqm::build_chain(fam, 1, 2), xs);
        CHECK(fit.kappa == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(fit.lambda_prime.empty());
        CHECK(fit.max_residual <= 1e-8);
        CHECK(fit.shape_invariant);
    }
    for (const std::string name : {"laguerre", "jacobi"}) {
        CAPTURE(name);
        const auto fam = make_oqm_family(name, ParamSet{{"g", 2.5}});
        const Interval w = fam->sample_window();
        const auto fit = shape_invariance_residual(fam, oqm::build_chain(fam, 1, 2),
                                                   grid(w.lo + 0.05 * w.width(), w.hi - 0.05 * w.width(), 30));
        CHECK(fit.kappa == doctest::Approx(1.0).epsilon(1e-8));
        REQUIRE(fit.lambda_prime.size() == 1);
        CHECK(fit.lambda_prime[0].real() == doctest::Approx(3.5).epsilon(1e-8));
        CHECK(fit.shape_invariant);
    }
}

TEST_CASE("spectrum and eigenfunctions from shape invariance") {
    SUBCASE("q-Hermite example") {
        const auto sid = shape_invariance(make_dqm_family("q_hermite", ParamSet{{"q", 0.5}}), 8);
        CHECK(si_spectrum(sid, 0) == 0.0);
        CHECK(si_spectrum(sid, 2) == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(si_ratio_spread(sid, 2, grid(0.3, 2.8, 12)) <= 1e-8);
    }
    const std::vector<FamilyPtr> fams{make_dqm_family("q_hermite", ParamSet{{"q", 0.7}}), askey_wilson(),
                                      make_oqm_family("hermite", {}),
                                      make_oqm_family("laguerre", ParamSet{{"g", 1.8}})};
    for (const auto& fam : fams) {
        CAPTURE(fam->name());
        const auto sid = shape_invariance(fam, 8);
        CHECK(sid.orbit.size() == 9);
        for (int n = 0; n <= 8; ++n) {
            CHECK(std::abs(si_spectrum(sid, n) - fam->energy(n)) <= 1e-10 * std::max(1.0, fam->energy(n)));
        }
        const Interval w = fam->sample_window();
        const auto xs = grid(w.lo + 0.1 * w.width(), w.hi - 0.1 * w.width(), 11);
        CHECK(si_ratio_spread(sid, 3, xs) <= 1e-7);
        CHECK(shape_operator_residual(sid, xs) <= 1e-8);
    }
}

TEST_CASE("orbit longer than the tabulated range raises") {
    CHECK_THROWS_AS(shape_invariance(make_dqm_family("q_hermite", ParamSet{{"q", 0.5}}), 40), IndexError);
}

TEST_CASE("sinusoidal coordinate relations") {
    const auto aw = askey_wilson();
    const auto chain = dqm::Chain::build(aw, 2, 4);
    auto xs = cgrid(0.2, 2.9, 12);
    for (cplx x : cgrid(0.2, 2.9, 6, 0.25 * aw->gamma())) {
        xs.push_back(x);
    }
    CHECK(eta_relation_residual(EtaRelation::eta_affine, *aw, nullptr, xs) <= 1e-10);
    CHECK(eta_relation_residual(EtaRelation::V1_from_eta, *aw, chain.get(), xs) <= 1e-9);
    CHECK(eta_relation_residual(EtaRelation::eta_level, *aw, chain.get(), xs) <= 1e-8);
    CHECK(eta_relation_residual(EtaRelation::Vs_product, *aw, chain.get(), xs) <= 1e-7);

    const auto qh = make_dqm_family("q_hermite", ParamSet{{"q", 0.5}});
    const auto qc = dqm::Chain::build(qh, 1, 3);
    CHECK(eta_relation_residual(EtaRelation::V1_from_eta, *qh, qc.get(), xs) <= 1e-9);

    const auto herm = make_oqm_family("hermite", {});
    CHECK(eta_relation_residual(EtaRelation::eta_affine, *herm, nullptr, cgrid(-2, 2, 9)) <= 1e-10);
    CHECK_THROWS_AS(eta_relation_residual(EtaRelation::V1_from_eta, *herm, nullptr, xs), CapabilityError);
    CHECK_THROWS_AS(eta_relation_residual(EtaRelation::Vs_product, *aw, nullptr, xs), CapabilityError);
}

TEST_CASE("limit tables") {
    const auto pts = grid(-1.5, 1.5, 7);
    SUBCASE("Casoratian to Wronskian") {
        const std::vector<AnalyticFn> fs{
            jet_function("e", [](const Jet& x) { return exp(0.3 * x); }),
            jet_function("c", [](const Jet& x) { return cos(x); }),
            jet_function("g", [](const Jet& x) { return exp(-0.5 * x * x); }),
        };
        const auto t = limit_gamma_to_0(fs, {0.1, 0.05, 0.025}, pts);
        CHECK(t.monotone);
        CHECK_FALSE(t.inconclusive);
        CHECK(t.slope == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("polynomials are exact") {
        const auto t = limit_gamma_to_0({polynomial_fn({1.0}), polynomial_fn({0.0, 1.0})}, {0.1, 0.01}, pts);
        CHECK(t.inconclusive);
    }
    SUBCASE("operators converge") {
        LimitScaling sc;
        const auto t = limit_c_to_inf(sc, pts);
        CHECK(t.monotone);
        CHECK(t.error.back() < 1e-5);
        CHECK(t.slope == doctest::Approx(2.0).epsilon(0.05));
        sc.w2 = polynomial_fn({0.0, 0.0, 1.0});
        const auto t2 = limit_c_to_inf(sc, pts);
        CHECK(t2.slope == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("Casoratian formula transfers") {
        const auto t = limit_casoratian_transfer(LimitScaling{}, pts);
        CHECK(t.monotone);
        CHECK(t.error.back() < 1e-6);
        CHECK(t.slope == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("csv") {
        std::ostringstream os;
        write_csv(os, {limit_c_to_inf(LimitScaling{}, pts)});
        const std::string s = os.str();
        CHECK(s.rfind("mode,parameter,max_error,fitted_slope\n", 0) == 0);
        CHECK(std::count(s.begin(), s.end(), '\n') == 4);
        CHECK(s.find("c_to_inf,10,") != std::string::npos);
    }
}
