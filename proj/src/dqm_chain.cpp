#include "crum/dqm/chain.hpp"

#include "crum/analytic/determinant.hpp"
#include "crum/error.hpp"
#include "crum/verify/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace crum::dqm {

namespace {

const cplx I{0.0, 1.0};

std::string text(cplx x) {
    std::ostringstream os;
    os.precision(10);
    os << x.real() << (x.imag() < 0 ? "-" : "+") << std::abs(x.imag()) << "i";
    return os.str();
}

double rel(cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

} // namespace

AnalyticFn apply_A(const AnalyticFn& sqrt_v, double gamma, const AnalyticFn& f) {
    const AnalyticFn sv = sqrt_v, svs = star(sqrt_v);
    const cplx h = 0.5 * I * gamma;
    return AnalyticFn("A(" + f.label() + ")",
                      [sv, svs, f, h](cplx x) {
                          return I * (svs(x - h) * f(x - h) - sv(x + h) * f(x + h));
                      },
                      std::min(sqrt_v.strip_halfwidth(), f.strip_halfwidth()) - std::abs(gamma) / 2.0)
        .with_real(f.is_real() && sqrt_v.is_real());
}

AnalyticFn apply_Adag(const AnalyticFn& sqrt_v, double gamma, const AnalyticFn& f) {
    const AnalyticFn sv = sqrt_v, svs = star(sqrt_v);
    const cplx h = 0.5 * I * gamma;
    return AnalyticFn("Adag(" + f.label() + ")",
                      [sv, svs, f, h](cplx x) {
                          return -I * (sv(x) * f(x - h) - svs(x) * f(x + h));
                      },
                      std::min(sqrt_v.strip_halfwidth(), f.strip_halfwidth()) - std::abs(gamma) / 2.0)
        .with_real(f.is_real() && sqrt_v.is_real());
}

// ---- Chain -------------------------------------------------------------------

size_t Chain::KeyHash::operator()(const Key& k) const {
    size_t h = std::hash<int>()(k.s) * 1000003u ^ std::hash<int>()(k.n);
    h = h * 1000003u ^ std::hash<uint64_t>()(std::bit_cast<uint64_t>(k.re));
    h = h * 1000003u ^ std::hash<uint64_t>()(std::bit_cast<uint64_t>(k.base));
    return h * 1000003u ^ std::hash<int>()(k.j);
}

Chain::Chain(DqmFamilyPtr family, int nmax)
    : family_(std::move(family)), nmax_(nmax), gamma_(family_->gamma()),
      delta_(gamma_ / (2.0 * kLatticeSteps)) {}

ChainPtr Chain::build(DqmFamilyPtr family, int depth, int nmax, int node_points, int depth_cap) {
    if (depth < 0) {
        throw IndexError("depth must be non-negative");
    }
    if (depth > depth_cap) {
        throw CapabilityError("depth " + std::to_string(depth) + " exceeds the cap " +
                              std::to_string(depth_cap) + " of the double-precision backend");
    }
    if (nmax < depth || nmax > kTabulatedN) {
        throw IndexError("nmax must lie in depth.." + std::to_string(kTabulatedN));
    }
    std::shared_ptr<Chain> c(new Chain(std::move(family), nmax));
    const Interval w = c->family_->node_window();
    for (int s = 1; s <= depth; ++s) {
        // the new ground state must keep one sign on the physical region
        const NodeScan scan = count_nodes(
            [&c, s](double x) { return c->phi_at(s, s, c->site(x)).real(); }, w, node_points);
        if (scan.count > 0) {
            std::ostringstream os;
            os << c->family_->name() << ": ground state of level " << s << " has " << scan.count
               << " node(s), first near x=" << scan.locations.front();
            throw ChainBreakError(os.str());
        }
        c->depth_ = s;
    }
    return c;
}

LevelPtr Chain::level(int s) const {
    check_level(s);
    return std::make_shared<Level>(shared_from_this(), s);
}

void Chain::check_level(int s) const {
    if (s < 0 || s > depth_) {
        throw IndexError("level " + std::to_string(s) + " not built (depth " +
                         std::to_string(depth_) + ")");
    }
}

void Chain::check_n(int s, int n) const {
    if (n < s || n > nmax_) {
        throw IndexError("level " + std::to_string(s) + " serves n in " + std::to_string(s) + ".." +
                         std::to_string(nmax_) + ", got n=" + std::to_string(n));
    }
}

Chain::Site Chain::site(cplx x) const {
    const double y = x.imag();
    const int j = static_cast<int>(std::lround(y / delta_));
    double base = y - j * delta_;
    if (std::abs(base) <= 1e-14 * std::max(1.0, std::abs(y))) {
        base = 0.0;
    }
    return {x.real(), base, j};
}

cplx Chain::point(const Site& p) const { return {p.re, p.base + p.j * delta_}; }

bool Chain::lookup(const std::unordered_map<Key, cplx, KeyHash>& m, const Key& k, cplx& out) const {
    std::lock_guard lock(mutex_);
    auto it = m.find(k);
    if (it == m.end()) {
        return false;
    }
    out = it->second;
    return true;
}

void Chain::store(std::unordered_map<Key, cplx, KeyHash>& m, const Key& k, cplx v) const {
    std::lock_guard lock(mutex_);
    m[k] = v;
}

size_t Chain::cache_size() const {
    std::lock_guard lock(mutex_);
    return phi_cache_.size() + z_cache_.size();
}

cplx Chain::phi_at(int s, int n, const Site& p) const {
    if (s == 0) {
        return family_->phi_raw(n, point(p));
    }
    const Key key{s, n, p.re, p.base, p.j};
    cplx v;
    if (lookup(phi_cache_, key, v)) {
        return v;
    }
    const int l = s - 1;
    const Site dn = shifted(p, -kLatticeSteps), up = shifted(p, kLatticeSteps);
    if (l == 0) {
        v = I * (family_->sqrt_v_star(point(dn)) * phi_at(0, n, dn) -
                 family_->sqrt_v(point(up)) * phi_at(0, n, up));
    } else {
        const cplx gd = phi_at(l, l, dn), gu = phi_at(l, l, up);
        if (gd == cplx(0.0) || gu == cplx(0.0)) {
            throw PoleError("ground state of level " + std::to_string(l) + " vanishes near " +
                            text(point(p)));
        }
        v = I * z_at(l, p) * (phi_at(l, n, dn) / gd - phi_at(l, n, up) / gu);
    }
    store(phi_cache_, key, v);
    return v;
}

cplx Chain::t_at(int l, const Site& p) const {
    if (l == 0) {
        const cplx x = point(p);
        return family_->sqrt_v(x) * family_->sqrt_v_star(x);
    }
    const cplx g = phi_at(l, l, p);
    return z_at(l, shifted(p, -kLatticeSteps)) * z_at(l, shifted(p, kLatticeSteps)) / (g * g);
}

cplx Chain::r_at(int s, const Site& p) const {
    return t_at(s - 1, p) * phi_at(s, s, shifted(p, -kLatticeSteps)) *
           phi_at(s, s, shifted(p, kLatticeSteps));
}

cplx Chain::z_at(int s, const Site& p) const {
    const Key key{s, -1, p.re, p.base, p.j};
    cplx v;
    if (lookup(z_cache_, key, v)) {
        return v;
    }
    const cplx r = r_at(s, p);
    if (p.j == 0 && p.base == 0.0) {
        if (!(r.real() > 0.0) || std::abs(r.imag()) > 1e-8 * std::abs(r)) {
            throw BranchError("square-root anchor of level " + std::to_string(s) +
                              " is not real positive at x=" + text(point(p)) + " (value " +
                              text(r) + ")");
        }
        v = std::sqrt(r.real());
    } else {
        const Site prev = p.j == 0 ? Site{p.re, 0.0, 0} : shifted(p, p.j > 0 ? -1 : 1);
        const cplx z0 = z_at(s, prev);
        const cplx ratio = r / (z0 * z0);
        if (std::abs(std::arg(ratio)) > 0.5 * std::numbers::pi) {
            throw BranchError("square root of level " + std::to_string(s) +
                              " jumps by more than pi/2 in argument near x=" + text(point(p)));
        }
        v = z0 * std::sqrt(ratio);
    }
    store(z_cache_, key, v);
    return v;
}

cplx Chain::s_at(int s, const Site& p) const {
    if (s == 0) {
        return family_->sqrt_v(point(p));
    }
    return z_at(s, shifted(p, -kLatticeSteps)) / phi_at(s, s, p);
}

cplx Chain::s_star_at(int s, const Site& p) const {
    if (s == 0) {
        return family_->sqrt_v_star(point(p));
    }
    return z_at(s, shifted(p, kLatticeSteps)) / phi_at(s, s, p);
}

cplx Chain::phi(int s, int n, cplx x) const {
    check_level(s);
    check_n(s, n);
    return phi_at(s, n, site(x));
}

cplx Chain::sqrt_v(int s, cplx x) const {
    check_level(s);
    return s_at(s, site(x));
}

cplx Chain::sqrt_v_star(int s, cplx x) const {
    check_level(s);
    return s_star_at(s, site(x));
}

cplx Chain::v(int s, cplx x) const {
    const cplx r = sqrt_v(s, x);
    return r * r;
}

cplx Chain::v_star(int s, cplx x) const {
    const cplx r = sqrt_v_star(s, x);
    return r * r;
}

cplx Chain::anchor_product(int s, cplx x) const {
    check_level(s);
    return t_at(s, site(x));
}

// ---- Level -------------------------------------------------------------------

AnalyticFn Level::phi(int n) const {
    if (n < s_ || n > chain_->nmax()) {
        throw IndexError("level " + std::to_string(s_) + " serves n in " + std::to_string(s_) +
                         ".." + std::to_string(chain_->nmax()) + ", got n=" + std::to_string(n));
    }
    auto c = chain_;
    const int s = s_;
    return AnalyticFn("phi^[" + std::to_string(s) + "]_" + std::to_string(n),
                      [c, s, n](cplx x) { return c->phi(s, n, x); }, c->family().strip())
        .with_real(true);
}

AnalyticFn Level::sqrt_v_fn() const {
    auto c = chain_;
    const int s = s_;
    return AnalyticFn("sqrtV^[" + std::to_string(s) + "]", [c, s](cplx x) { return c->sqrt_v(s, x); },
                      c->family().strip());
}

AnalyticFn Level::v_fn() const {
    auto c = chain_;
    const int s = s_;
    return AnalyticFn("V^[" + std::to_string(s) + "]", [c, s](cplx x) { return c->v(s, x); },
                      c->family().strip());
}

AnalyticFn Level::v_star_fn() const {
    auto c = chain_;
    const int s = s_;
    return AnalyticFn("V*^[" + std::to_string(s) + "]", [c, s](cplx x) { return c->v_star(s, x); },
                      c->family().strip());
}

AnalyticFn Level::apply_A(const AnalyticFn& f) const {
    auto c = chain_;
    const int s = s_;
    const cplx h = 0.5 * I * c->gamma();
    return AnalyticFn("A^[" + std::to_string(s) + "](" + f.label() + ")",
                      [c, s, f, h](cplx x) {
                          return I * (c->sqrt_v_star(s, x - h) * f(x - h) -
                                      c->sqrt_v(s, x + h) * f(x + h));
                      },
                      f.strip_halfwidth() - std::abs(h))
        .with_real(f.is_real());
}

AnalyticFn Level::apply_Adag(const AnalyticFn& f) const {
    auto c = chain_;
    const int s = s_;
    const cplx h = 0.5 * I * c->gamma();
    return AnalyticFn("A^[" + std::to_string(s) + "]dag(" + f.label() + ")",
                      [c, s, f, h](cplx x) {
                          return -I * (c->sqrt_v(s, x) * f(x - h) - c->sqrt_v_star(s, x) * f(x + h));
                      },
                      f.strip_halfwidth() - std::abs(h))
        .with_real(f.is_real());
}

AnalyticFn Level::hamiltonian(const AnalyticFn& f) const {
    auto self = shared_from_this();
    return AnalyticFn("H^[" + std::to_string(s_) + "](" + f.label() + ")",
                      [self, f](cplx x) { return self->hamiltonian_apply(f, x); },
                      f.strip_halfwidth() - std::abs(gamma()))
        .with_real(f.is_real());
}

cplx Level::hamiltonian_apply(const AnalyticFn& f, cplx x) const {
    const Chain& c = *chain_;
    const cplx g = I * c.gamma();
    const cplx sv = c.sqrt_v(s_, x), svs = c.sqrt_v_star(s_, x);
    return sv * c.sqrt_v_star(s_, x - g) * f(x - g) + svs * c.sqrt_v(s_, x + g) * f(x + g) -
           (sv * sv + svs * svs) * f(x) + energy() * f(x);
}

// ---- free operations ---------------------------------------------------------

AnalyticFn next_potential(const Chain& chain, int s) {
    if (s < 1) {
        throw IndexError("next_potential needs s >= 1");
    }
    return chain.level(s)->v_fn();
}

AnalyticFn downshift(const Chain& chain, int s, int n) {
    if (s < 1 || s > chain.depth()) {
        throw IndexError("downshift needs 1 <= s <= depth");
    }
    if (n < s) {
        throw IndexError("downshift needs n >= s (got n=" + std::to_string(n) +
                         ", s=" + std::to_string(s) + ")");
    }
    const LevelPtr lower = chain.level(s - 1);
    const double gap = chain.energy(n) - chain.energy(s - 1);
    const AnalyticFn a = lower->apply_Adag(chain.level(s)->phi(n));
    return AnalyticFn("downshift", [a, gap](cplx x) { return a(x) / gap; }, a.strip_halfwidth())
        .with_real(true);
}

cplx phi_via_casoratian(const Chain& chain, int s, int n, cplx x) {
    if (s < 0 || n < s) {
        throw IndexError("phi_via_casoratian needs n >= s >= 0");
    }
    const DqmFamily& fam = chain.family();
    if (s == 0) {
        return fam.phi(n)(x);
    }
    if (s - 1 > chain.depth()) {
        throw IndexError("phi_via_casoratian needs levels 0.." + std::to_string(s - 1));
    }
    const double g = chain.gamma();
    std::vector<AnalyticFn> fs;
    for (int k = 0; k < s; ++k) {
        fs.push_back(fam.phi(k));
    }
    const cplx den = casoratian(fs, x - 0.5 * I * g, g);
    if (den == cplx(0.0)) {
        throw PoleError("Casoratian denominator vanishes at " + text(x));
    }
    fs.push_back(fam.phi(n));
    cplx pre = 1.0;
    for (int l = 0; l < s; ++l) {
        pre *= chain.sqrt_v(l, x + 0.5 * I * g * static_cast<double>(s - l));
    }
    return pre * casoratian(fs, x, g) / den;
}

double casoratian_jacobi_residual(const std::vector<AnalyticFn>& fs, const AnalyticFn& f,
                                  const AnalyticFn& h, cplx x, double gamma) {
    auto with = [&fs](std::initializer_list<AnalyticFn> extra) {
        std::vector<AnalyticFn> v = fs;
        v.insert(v.end(), extra);
        return v;
    };
    const cplx up = x + 0.5 * I * gamma, dn = x - 0.5 * I * gamma;
    const cplx a = casoratian(with({f}), up, gamma), b = casoratian(with({h}), up, gamma);
    const cplx c = casoratian(with({f}), dn, gamma), d = casoratian(with({h}), dn, gamma);
    const cplx lhs = a * d - b * c;
    const cplx rhs = -I * casoratian(fs, x, gamma) * casoratian(with({f, h}), x, gamma);
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(a * d) + std::abs(b * c));
}

std::string relation_name(Relation r) {
    switch (r) {
    case Relation::zero_mode:
        return "zero_mode";
    case Relation::quadratic:
        return "quadratic";
    case Relation::linear:
        return "linear";
    case Relation::intertwine:
        return "intertwine";
    case Relation::step_determinant:
        return "step_determinant";
    case Relation::casoratian_jacobi:
        return "casoratian_jacobi";
    case Relation::check_product:
        return "check_product";
    case Relation::casoratian_phi:
        return "casoratian_phi";
    case Relation::eigen:
        return "eigen";
    case Relation::factorization:
        return "factorization";
    case Relation::realness:
        return "realness";
    case Relation::branch_anchor:
        return "branch_anchor";
    }
    return "unknown";
}

namespace {

std::vector<AnalyticFn> generic_functions() {
    return {
        constant_fn(1.0),
        polynomial_fn({0.0, 1.0}),
        jet_function("exp(ix)", [](const Jet& t) { return exp(I * t); }),
        polynomial_fn({0.0, 0.0, 1.0}),
        jet_function("exp(-ix)", [](const Jet& t) { return exp(-I * t); }),
        polynomial_fn({0.5, 0.0, 0.0, 1.0}),
    };
}

AnalyticFn probe() {
    return jet_function("probe", [](const Jet& t) { return 0.7 + 0.4 * cos(1.3 * t) + 0.1 * t; });
}

// phi^[k]_n divided by its sqrt(V) prefactor
cplx check_fn(const Chain& c, int k, int n, cplx x) {
    const double g = c.gamma();
    cplx d = 1.0;
    for (int l = 0; l < k; ++l) {
        d *= c.sqrt_v(l, x + 0.5 * I * g * static_cast<double>(k - l));
    }
    return c.phi(k, n, x) / d;
}

} // namespace

Residual relation_residual(Relation kind, const Chain& chain, int s, const std::vector<cplx>& samples) {
    const LevelPtr lv = chain.level(s);
    const DqmFamily& fam = chain.family();
    const double g = chain.gamma();
    const cplx h = 0.5 * I * g;
    Residual r;
    r.samples = static_cast<int>(samples.size());
    double worst = 0.0;
    auto need_lower = [&] {
        if (s < 1) {
            throw IndexError(relation_name(kind) + " relation needs s >= 1");
        }
    };

    switch (kind) {
    case Relation::zero_mode: {
        const AnalyticFn a = lv->apply_A(lv->ground());
        double sup = 0.0, err = 0.0;
        for (cplx x : samples) {
            sup = std::max(sup, std::abs(chain.phi(s, s, x)));
            err = std::max(err, std::abs(a(x)));
        }
        worst = err / std::max(sup, 1e-300);
        break;
    }
    case Relation::quadratic: {
        need_lower();
        for (cplx x : samples) {
            const cplx lhs = chain.v(s - 1, x - h) * chain.v_star(s - 1, x - h);
            const cplx rhs = chain.v(s, x) * chain.v_star(s, x - 2.0 * h);
            worst = std::max(worst, rel(lhs, rhs));
        }
        break;
    }
    case Relation::linear: {
        need_lower();
        const double de = chain.energy(s) - chain.energy(s - 1);
        for (cplx x : samples) {
            const cplx lhs = chain.v(s - 1, x + h) + chain.v_star(s - 1, x - h);
            const cplx rhs = chain.v(s, x) + chain.v_star(s, x) - de;
            worst = std::max(worst, rel(lhs, rhs));
        }
        break;
    }
    case Relation::intertwine: {
        const LevelPtr up = chain.level(s + 1);
        std::vector<AnalyticFn> probes{probe()};
        for (int n = s + 1; n <= std::min(chain.nmax(), s + 3); ++n) {
            probes.push_back(lv->phi(n));
        }
        for (const AnalyticFn& f : probes) {
            const AnalyticFn af = lv->apply_A(f);
            const AnalyticFn lhs = lv->apply_A(lv->hamiltonian(f));
            const AnalyticFn lhs2 = lv->apply_Adag(up->hamiltonian(af));
            for (cplx x : samples) {
                worst = std::max(worst, rel(lhs(x), up->hamiltonian_apply(af, x)));
                worst = std::max(worst, rel(lhs2(x), lv->hamiltonian_apply(lv->apply_Adag(af), x)));
            }
        }
        break;
    }
    case Relation::step_determinant: {
        need_lower();
        for (int n = s; n <= chain.nmax(); ++n) {
            for (cplx x : samples) {
                const cplx gd = chain.phi(s - 1, s - 1, x - h), gu = chain.phi(s - 1, s - 1, x + h);
                const cplx rhs = I * chain.sqrt_v(s - 1, x + h) / gd *
                                 (gu * chain.phi(s - 1, n, x - h) - chain.phi(s - 1, n, x + h) * gd);
                worst = std::max(worst, rel(chain.phi(s, n, x), rhs));
            }
        }
        break;
    }
    case Relation::casoratian_jacobi: {
        std::vector<AnalyticFn> fs;
        for (int k = 0; k < s; ++k) {
            fs.push_back(fam.phi(k));
        }
        const auto gen = generic_functions();
        const std::vector<AnalyticFn> gs(gen.begin(), gen.begin() + std::min<size_t>(s, gen.size()));
        for (cplx x : samples) {
            for (int n = s + 1; n <= std::min(chain.nmax(), s + 3); ++n) {
                worst = std::max(worst, casoratian_jacobi_residual(fs, fam.phi(s), fam.phi(n), x, g));
            }
            if (static_cast<size_t>(s) + 2 <= gen.size()) {
                worst = std::max(worst, casoratian_jacobi_residual(gs, gen[static_cast<size_t>(s)],
                                                                   gen[static_cast<size_t>(s) + 1], x, g));
            }
        }
        break;
    }
    case Relation::check_product: {
        std::vector<AnalyticFn> fs;
        for (int k = 0; k < s; ++k) {
            fs.push_back(fam.phi(k));
        }
        for (int n = s; n <= chain.nmax(); ++n) {
            auto all = fs;
            all.push_back(fam.phi(n));
            for (cplx x : samples) {
                const cplx lhs = casoratian(all, x, g);
                cplx rhs = check_fn(chain, s, n, x);
                for (int k = 0; k < s; ++k) {
                    rhs *= check_fn(chain, k, k, x + h * static_cast<double>(k - s));
                }
                worst = std::max(worst, std::abs(lhs - rhs) /
                                            std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
            }
        }
        break;
    }
    case Relation::casoratian_phi: {
        for (int n = s; n <= chain.nmax(); ++n) {
            for (cplx x : samples) {
                const cplx a = chain.phi(s, n, x), b = phi_via_casoratian(chain, s, n, x);
                worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
            }
        }
        break;
    }
    case Relation::eigen: {
        for (int n = s; n <= chain.nmax(); ++n) {
            const AnalyticFn f = lv->phi(n);
            const double e = chain.energy(n);
            double sup = 0.0, err = 0.0;
            for (cplx x : samples) {
                const cplx v = f(x);
                sup = std::max(sup, std::abs(v));
                err = std::max(err, std::abs(lv->hamiltonian_apply(f, x) - e * v));
            }
            worst = std::max(worst, err / (std::max(1.0, std::abs(e)) * std::max(sup, 1e-300)));
        }
        break;
    }
    case Relation::factorization: {
        for (int n = s; n <= chain.nmax(); ++n) {
            const AnalyticFn f = lv->phi(n);
            const AnalyticFn aa = lv->apply_Adag(lv->apply_A(f));
            for (cplx x : samples) {
                worst = std::max(worst, rel(lv->hamiltonian_apply(f, x), aa(x) + lv->energy() * f(x)));
            }
        }
        break;
    }
    case Relation::realness: {
        for (int n = s; n <= chain.nmax(); ++n) {
            double sup = 0.0, err = 0.0;
            for (cplx x : samples) {
                const cplx v = chain.phi(s, n, x);
                sup = std::max(sup, std::abs(v));
                err = std::max(err, std::abs(std::conj(chain.phi(s, n, std::conj(x))) - v));
            }
            worst = std::max(worst, err / std::max(sup, 1e-300));
        }
        break;
    }
    case Relation::branch_anchor: {
        need_lower();
        for (cplx x : samples) {
            const cplx t = chain.anchor_product(s - 1, x.real());
            const double bad = t.real() > 0.0 ? std::abs(t.imag()) / std::abs(t) : 1.0;
            worst = std::max(worst, bad);
        }
        break;
    }
    }
    r.max_residual = worst;
    return r;
}

} // namespace crum::dqm
