#include "crum/dqm/chain.hpp"
#include "crum/error.hpp"
#include "crum/verify/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crum;
using namespace crum::dqm;

namespace {

const cplx I{0.0, 1.0};

DqmFamilyPtr q_hermite(double q = 0.5) { return make_dqm_family("q_hermite", ParamSet{{"q", q}}); }

DqmFamilyPtr askey_wilson() {
    ParamSet p;
    p.assign("a=(0.3,-0.2,0.1+0.2i,0.1-0.2i)");
    p.assign("q=0.6");
    return make_dqm_family("askey_wilson", p);
}

std::vector<cplx> real_points(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.16, 2.98);
    std::vector<cplx> xs;
    for (int k = 0; k < n; ++k) {
        xs.emplace_back(u(rng), 0.0);
    }
    return xs;
}

std::vector<cplx> strip_points(int n, double height, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.16, 2.98), v(-height, height);
    std::vector<cplx> xs;
    for (int k = 0; k < n; ++k) {
        xs.emplace_back(u(rng), v(rng));
    }
    return xs;
}

double relerr(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST_CASE("free A and A-dagger on the base family") {
    for (const auto& fam : {q_hermite(), askey_wilson()}) {
        CAPTURE(fam->name());
        AnalyticFn sv("sqrtV", [fam](cplx x) { return fam->sqrt_v(x); }, fam->strip());
        const double g = fam->gamma();
        const AnalyticFn a0 = apply_A(sv, g, fam->phi(0));
        for (cplx x : real_points(10, 1)) {
            CHECK(std::abs(a0(x)) <= 1e-10 * std::max(1.0, std::abs(fam->phi(0)(x))));
        }
        for (int n = 1; n <= 4; ++n) {
            const AnalyticFn f = fam->phi(n);
            const AnalyticFn aa = apply_Adag(sv, g, apply_A(sv, g, f));
            for (cplx x : real_points(5, 2 + static_cast<unsigned>(n))) {
                CHECK(std::abs(aa(x) - fam->energy(n) * f(x)) <=
                      1e-8 * std::max(1.0, fam->energy(n)) * std::abs(f(x)));
            }
        }
        const AnalyticFn f = fam->phi(2), h = fam->phi(3);
        const AnalyticFn sum("f+2h", [f, h](cplx x) { return f(x) + 2.0 * h(x); }, fam->strip());
        const AnalyticFn af = apply_A(sv, g, f), ah = apply_A(sv, g, h), as = apply_A(sv, g, sum);
        for (cplx x : real_points(5, 9)) {
            CHECK(std::abs(as(x) - af(x) - 2.0 * ah(x)) <= 1e-12 * std::max(1.0, std::abs(as(x))));
        }
    }
}

TEST_CASE("adjointness of A and A-dagger") {
    const auto fam = q_hermite();
    AnalyticFn sv("sqrtV", [fam](cplx x) { return fam->sqrt_v(x); }, fam->strip());
    const double g = fam->gamma();
    const AnalyticFn f = fam->phi(2), h = fam->phi(1);
    const cplx lhs = inner_product(apply_A(sv, g, f), h, fam->gram_quadrature());
    const cplx rhs = inner_product(f, apply_Adag(sv, g, h), fam->gram_quadrature());
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("level-0 hamiltonian") {
    const auto chain = Chain::build(q_hermite(), 0, 4);
    const LevelPtr l0 = chain->level(0);
    for (cplx x : real_points(10, 3)) {
        CHECK(std::abs(l0->hamiltonian_apply(l0->phi(0), x)) < 1e-10);
        const cplx p1 = l0->phi(1)(x);
        CHECK(std::abs(l0->hamiltonian_apply(l0->phi(1), x) - p1) <= 1e-10 * std::max(1.0, std::abs(p1)));
        const AnalyticFn f = l0->phi(3);
        const cplx viaA = l0->apply_Adag(l0->apply_A(f))(x) + l0->energy() * f(x);
        CHECK(std::abs(l0->hamiltonian_apply(f, x) - viaA) <= 1e-10 * std::max(1.0, std::abs(viaA)));
    }
}

TEST_CASE("level 1 of q-Hermite") {
    const auto fam = q_hermite();
    const auto chain = Chain::build(fam, 1, 5);
    const LevelPtr l1 = chain->level(1);
    for (int n = 1; n <= 4; ++n) {
        const AnalyticFn f = l1->phi(n);
        for (cplx x : real_points(10, 4)) {
            CHECK(std::abs(l1->hamiltonian_apply(f, x) - fam->energy(n) * f(x)) <=
                  1e-8 * std::max(1.0, fam->energy(n)) * std::max(std::abs(f(x)), 1e-12));
        }
    }
    std::vector<AnalyticFn> fs;
    for (int n = 1; n <= 4; ++n) {
        fs.push_back(l1->phi(n));
    }
    const GramResult gram = gram_matrix(fs, fam->gram_quadrature());
    for (int i = 0; i < 4; ++i) {
        const int n = i + 1;
        const double expect = fam->energy(n) * fam->norm(n);
        CHECK(std::abs(gram.matrix(i, i) - expect) <= 1e-7 * expect);
        for (int k = 0; k < 4; ++k) {
            if (k != i) {
                CHECK(std::abs(gram.matrix(i, k)) <= 1e-7 * expect);
            }
        }
    }
    for (cplx x : strip_points(10, 0.3, 5)) {
        for (int n = 1; n <= 3; ++n) {
            const cplx v = l1->phi(n)(x);
            CHECK(std::abs(std::conj(l1->phi(n)(std::conj(x))) - v) <= 1e-10 * std::abs(v));
        }
    }
}

TEST_CASE("q-Hermite relations") {
    const auto chain = Chain::build(q_hermite(), 2, 5);
    const auto xs = real_points(20, 6);
    CHECK(relation_residual(Relation::quadratic, *chain, 1, xs).max_residual <= 1e-9);
    CHECK(relation_residual(Relation::linear, *chain, 1, xs).max_residual <= 1e-8);
    CHECK(relation_residual(Relation::step_determinant, *chain, 1, xs).max_residual <= 1e-9);
    for (cplx x : strip_points(10, 0.2, 7)) {
        const cplx a = chain->phi(1, 2, x), b = phi_via_casoratian(*chain, 1, 2, x);
        CHECK(relerr(a, b) <= 1e-8);
        CHECK(phi_via_casoratian(*chain, 0, 3, x) == chain->family().phi(3)(x));
    }
    const AnalyticFn d = downshift(*chain, 1, 2);
    for (cplx x : real_points(10, 8)) {
        CHECK(relerr(d(x), chain->family().phi(2)(x)) <= 1e-8);
    }
    CHECK_THROWS_AS(downshift(*chain, 1, 0), IndexError);
}

TEST_CASE("Askey-Wilson chain to depth 2") {
    const auto fam = askey_wilson();
    const auto chain = Chain::build(fam, 2, 6);
    const auto xs = real_points(20, 10);
    const auto zs = strip_points(10, 0.25, 11);
    for (int s = 0; s <= 2; ++s) {
        CAPTURE(s);
        CHECK(relation_residual(Relation::zero_mode, *chain, s, xs).max_residual <= 1e-8);
        CHECK(relation_residual(Relation::eigen, *chain, s, xs).max_residual <= 1e-8);
        CHECK(relation_residual(Relation::factorization, *chain, s, xs).max_residual <= 1e-8);
        CHECK(relation_residual(Relation::realness, *chain, s, zs).max_residual <= 1e-10);
        CHECK(relation_residual(Relation::casoratian_jacobi, *chain, s, zs).max_residual <= 1e-10);
        if (s >= 1) {
            CHECK(relation_residual(Relation::quadratic, *chain, s, xs).max_residual <= 1e-9);
            CHECK(relation_residual(Relation::linear, *chain, s, xs).max_residual <= 1e-8);
            CHECK(relation_residual(Relation::step_determinant, *chain, s, xs).max_residual <= 1e-9);
            CHECK(relation_residual(Relation::branch_anchor, *chain, s, xs).max_residual <= 1e-10);
        }
        if (s <= 1) {
            CHECK(relation_residual(Relation::intertwine, *chain, s, xs).max_residual <= 1e-8);
        }
    }
    CHECK(relation_residual(Relation::check_product, *chain, 2, xs).max_residual <= 1e-7);
    CHECK(relation_residual(Relation::casoratian_phi, *chain, 2, zs).max_residual <= 1e-7);
    for (cplx x : zs) {
        CHECK(relerr(chain->phi(2, 3, x), phi_via_casoratian(*chain, 2, 3, x)) <= 1e-7);
    }
    const AnalyticFn d = downshift(*chain, 2, 3);
    for (cplx x : real_points(10, 12)) {
        CHECK(relerr(d(x), chain->phi(1, 3, x)) <= 1e-7);
    }
}

TEST_CASE("casoratian identity on generic functions") {
    std::vector<AnalyticFn> fs = {constant_fn(1.0), polynomial_fn({0.0, 1.0})};
    const AnalyticFn f = polynomial_fn({0.0, 0.0, 1.0}), h = polynomial_fn({0.0, 0.0, 0.0, 1.0});
    CHECK(casoratian_jacobi_residual(fs, f, h, 0.7, 0.4) <= 1e-12);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx x(u(rng), 0.3 * u(rng));
        const double g = 0.2 + 0.5 * std::abs(u(rng));
        const AnalyticFn e = jet_function("exp", [](const Jet& t) { return exp(cplx(0.0, 1.0) * t); });
        CHECK(casoratian_jacobi_residual({constant_fn(1.0)}, e, f, x, g) <= 1e-12);
        CHECK(casoratian_jacobi_residual({}, e, h, x, g) <= 1e-12);
    }
}

TEST_CASE("chain errors") {
    CHECK_THROWS_AS(Chain::build(q_hermite(), 5, 6), CapabilityError);
    const auto chain = Chain::build(q_hermite(), 1, 3);
    CHECK_THROWS_AS(chain->level(2), IndexError);
    CHECK_THROWS_AS(chain->phi(1, 0, 0.5), IndexError);
    CHECK_THROWS_AS(chain->level(1)->phi(1)(cplx(1.0, 10.0)), DomainError);
    CHECK(chain->cache_size() > 0);
}

TEST_CASE("property: iso-spectrality on random Askey-Wilson parameters") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.45, 0.45), qd(0.3, 0.8);
    for (int trial = 0; trial < 3; ++trial) {
        const cplx c(u(rng), u(rng));
        ParamSet p;
        p.set("a1", c);
        p.set("a2", std::conj(c));
        p.set("a3", u(rng));
        p.set("a4", u(rng));
        p.set("q", qd(rng));
        const auto fam = make_dqm_family("askey_wilson", p);
        const auto chain = Chain::build(fam, 2, 5);
        for (int s = 0; s <= 2; ++s) {
            CAPTURE(p.to_string());
            CAPTURE(s);
            CHECK(relation_residual(Relation::eigen, *chain, s, real_points(8, 50 + trial)).max_residual <= 1e-8);
        }
    }
}
