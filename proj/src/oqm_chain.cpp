#include "crum/oqm/chain.hpp"

#include "crum/analytic/determinant.hpp"
#include "crum/error.hpp"
#include "crum/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crum::oqm {

Level::Level(OqmFamilyPtr family, LevelPtr parent, int s, int nmax)
    : family_(std::move(family)), parent_(std::move(parent)), s_(s), nmax_(nmax) {}

LevelPtr Level::base(OqmFamilyPtr family, int nmax) {
    if (nmax < 0 || nmax > kTabulatedN) {
        throw IndexError("nmax must lie in 0.." + std::to_string(kTabulatedN));
    }
    return LevelPtr(new Level(std::move(family), nullptr, 0, nmax));
}

void Level::check_n(int n) const {
    if (n < s_ || n > nmax_) {
        throw IndexError("level " + std::to_string(s_) + " serves n in " + std::to_string(s_) +
                         ".." + std::to_string(nmax_) + ", got n=" + std::to_string(n));
    }
}

Jet Level::phi_jet(int n, cplx x, int order) const {
    check_n(n);
    if (s_ == 0) {
        return family_->phi_jet(n, x, order);
    }
    const Jet f = parent_->phi_jet(n, x, order + 1);
    return f.derivative() - parent_->wprime_jet(x, order) * f.truncated(order);
}

Jet Level::wprime_jet(cplx x, int order) const {
    if (s_ == 0) {
        return family_->wprime_jet(x, order);
    }
    const Jet g = phi_jet(s_, x, order + 1);
    return g.derivative() / g.truncated(order);
}

AnalyticFn Level::phi(int n) const {
    check_n(n);
    auto self = shared_from_this();
    return AnalyticFn::from_jet("phi^[" + std::to_string(s_) + "]_" + std::to_string(n),
                                [self, n](cplx x, int k) { return self->phi_jet(n, x, k); })
        .with_real(true);
}

AnalyticFn Level::wprime() const {
    auto self = shared_from_this();
    return AnalyticFn::from_jet("W'^[" + std::to_string(s_) + "]",
                                [self](cplx x, int k) { return self->wprime_jet(x, k); })
        .with_real(true);
}

AnalyticFn Level::potential() const {
    auto self = shared_from_this();
    return AnalyticFn::from_jet("U^[" + std::to_string(s_) + "]",
                                [self](cplx x, int k) {
                                    const Jet w = self->wprime_jet(x, k + 1);
                                    return w.truncated(k) * w.truncated(k) + w.derivative();
                                })
        .with_real(true);
}

AnalyticFn Level::apply_A(const AnalyticFn& f) const {
    auto self = shared_from_this();
    return AnalyticFn::from_jet("A^[" + std::to_string(s_) + "](" + f.label() + ")",
                                [self, f](cplx x, int k) {
                                    const Jet j = f.jet(x, k + 1);
                                    return j.derivative() - self->wprime_jet(x, k) * j.truncated(k);
                                })
        .with_real(f.is_real());
}

AnalyticFn Level::apply_Adag(const AnalyticFn& f) const {
    auto self = shared_from_this();
    return AnalyticFn::from_jet("A^[" + std::to_string(s_) + "]dag(" + f.label() + ")",
                                [self, f](cplx x, int k) {
                                    const Jet j = f.jet(x, k + 1);
                                    return -j.derivative() - self->wprime_jet(x, k) * j.truncated(k);
                                })
        .with_real(f.is_real());
}

AnalyticFn Level::hamiltonian(const AnalyticFn& f) const {
    auto self = shared_from_this();
    return AnalyticFn::from_jet("H^[" + std::to_string(s_) + "](" + f.label() + ")",
                                [self, f](cplx x, int k) {
                                    const Jet j = f.jet(x, k + 2);
                                    const Jet w = self->wprime_jet(x, k + 1);
                                    const Jet u = w.truncated(k) * w.truncated(k) + w.derivative();
                                    return -j.derivative().derivative() +
                                           (u + self->energy()) * j.truncated(k);
                                })
        .with_real(f.is_real());
}

cplx Level::hamiltonian_apply(const AnalyticFn& f, cplx x) const {
    const Jet j = f.jet(x, 2);
    const Jet w = wprime_jet(x, 1);
    const cplx u = w[0] * w[0] + w[1];
    return -j.derivative_value(2) + (u + energy()) * j[0];
}

double edge_cut(const OqmFamily& family, int s) {
    const auto sp = family.shape_params();
    if (s <= 0 || sp.empty()) {
        return 0.0;
    }
    return std::pow(1e-13, 1.0 / (sp.front() + 2.0 * s));
}

Interval trusted_window(const OqmFamily& family, int s, Interval window) {
    const double cut = edge_cut(family, s);
    const Interval d = family.domain();
    if (std::isfinite(d.lo) && window.lo < d.lo + cut) {
        window.lo = d.lo + cut;
    }
    if (std::isfinite(d.hi) && window.hi > d.hi - cut) {
        window.hi = d.hi - cut;
    }
    return window;
}

LevelPtr step_chain(const LevelPtr& prev, int grid_points) {
    const int s = prev->s() + 1;
    if (prev->nmax() < s) {
        throw IndexError("no eigenfunctions left for level " + std::to_string(s));
    }
    // the new ground state is A^[s-1] phi^[s-1]_s; check it for nodes before committing
    const AnalyticFn g = prev->apply_A(prev->phi(s));
    const NodeScan scan =
        count_nodes([&g](double x) { return g(x).real(); },
                    trusted_window(prev->family(), s, prev->family().node_window()), grid_points);
    if (scan.count > 0) {
        std::ostringstream os;
        os << prev->family().name() << ": ground state of level " << s << " has " << scan.count
           << " node(s), first near x=" << scan.locations.front();
        throw ChainBreakError(os.str());
    }
    return LevelPtr(new Level(prev->family_ptr(), prev, s, prev->nmax()));
}

std::vector<LevelPtr> build_chain(OqmFamilyPtr family, int depth, int nmax, int grid_points,
                                  int depth_cap) {
    if (depth < 0) {
        throw IndexError("depth must be non-negative");
    }
    if (depth > depth_cap) {
        throw CapabilityError("depth " + std::to_string(depth) + " exceeds the cap " +
                              std::to_string(depth_cap) + " of the double-precision backend");
    }
    std::vector<LevelPtr> chain{Level::base(std::move(family), nmax)};
    for (int s = 1; s <= depth; ++s) {
        chain.push_back(step_chain(chain.back(), grid_points));
    }
    return chain;
}

AnalyticFn downshift(const std::vector<LevelPtr>& chain, int s, int n) {
    if (s < 1 || s >= static_cast<int>(chain.size())) {
        throw IndexError("downshift needs 1 <= s <= depth");
    }
    if (n < s) {
        throw IndexError("downshift needs n >= s (got n=" + std::to_string(n) +
                         ", s=" + std::to_string(s) + ")");
    }
    const LevelPtr& lower = chain[static_cast<size_t>(s - 1)];
    const double gap = lower->family().energy(n) - lower->energy();
    const AnalyticFn up = chain[static_cast<size_t>(s)]->phi(n);
    const AnalyticFn a = lower->apply_Adag(up);
    return AnalyticFn::from_jet("downshift", [a, gap](cplx x, int k) { return a.jet(x, k) / cplx(gap); })
        .with_real(true);
}

cplx phi_via_wronskian(const OqmFamily& family, int s, int n, cplx x) {
    if (n < s || s < 0) {
        throw IndexError("phi_via_wronskian needs n >= s >= 0");
    }
    std::vector<AnalyticFn> fs;
    for (int k = 0; k < s; ++k) {
        fs.push_back(family.phi(k));
    }
    const cplx den = wronskian(fs, x);
    fs.push_back(family.phi(n));
    const cplx num = wronskian(fs, x);
    if (den == cplx(0.0)) {
        throw PoleError("Wronskian denominator vanishes");
    }
    return num / den;
}

std::string relation_name(Relation r) {
    switch (r) {
    case Relation::intertwine:
        return "intertwine";
    case Relation::riccati:
        return "riccati";
    case Relation::potential_wronskian:
        return "potential_wronskian";
    case Relation::factorization:
        return "factorization";
    case Relation::eigen:
        return "eigen";
    case Relation::zero_mode:
        return "zero_mode";
    case Relation::wronskian_product:
        return "wronskian_product";
    case Relation::wronskian_phi:
        return "wronskian_phi";
    }
    return "unknown";
}

AnalyticFn intertwining_probe(const OqmFamily& family) {
    const AnalyticFn g = family.phi(0);
    return AnalyticFn::from_jet("probe",
                                [g](cplx x, int k) {
                                    const Jet t = Jet::variable(x, k);
                                    return g.jet(x, k) * (0.7 + 0.4 * sin(1.3 * t));
                                })
        .with_real(true);
}

namespace {

double rel(cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs)); }

const LevelPtr& at(const std::vector<LevelPtr>& chain, int s) {
    if (s < 0 || s >= static_cast<int>(chain.size())) {
        throw IndexError("level " + std::to_string(s) + " not built");
    }
    return chain[static_cast<size_t>(s)];
}

} // namespace

Residual relation_residual(Relation kind, const std::vector<LevelPtr>& chain, int s,
                           const std::vector<double>& samples) {
    const LevelPtr& lv = at(chain, s);
    const OqmFamily& fam = lv->family();
    Residual r;
    r.samples = static_cast<int>(samples.size());
    double worst = 0.0;

    switch (kind) {
    case Relation::intertwine: {
        const LevelPtr& up = at(chain, s + 1);
        std::vector<AnalyticFn> probes{intertwining_probe(fam)};
        for (int n = s + 1; n <= lv->nmax(); ++n) {
            probes.push_back(lv->phi(n));
        }
        for (const AnalyticFn& f : probes) {
            const AnalyticFn lhs = lv->apply_A(lv->hamiltonian(f));
            const AnalyticFn rhs = up->hamiltonian(lv->apply_A(f));
            const AnalyticFn g = lv->apply_A(f);
            const AnalyticFn lhs2 = lv->apply_Adag(up->hamiltonian(g));
            const AnalyticFn rhs2 = lv->hamiltonian(lv->apply_Adag(g));
            for (double x : samples) {
                worst = std::max(worst, rel(lhs(x), rhs(x)));
                worst = std::max(worst, rel(lhs2(x), rhs2(x)));
            }
        }
        break;
    }
    case Relation::riccati: {
        if (s < 1) {
            throw IndexError("riccati relation needs s >= 1");
        }
        const LevelPtr& dn = at(chain, s - 1);
        const double de = lv->energy() - dn->energy();
        for (double x : samples) {
            const Jet w = lv->wprime_jet(x, 1), v = dn->wprime_jet(x, 1);
            const cplx lhs = w[0] * w[0] + w[1];
            const cplx rhs = v[0] * v[0] - v[1] - de;
            worst = std::max(worst, rel(lhs, rhs));
        }
        break;
    }
    case Relation::potential_wronskian: {
        std::vector<AnalyticFn> fs;
        for (int k = 0; k < s; ++k) {
            fs.push_back(fam.phi(k));
        }
        const AnalyticFn u = lv->potential();
        const AnalyticFn u0 = fam.potential();
        for (double x : samples) {
            const Jet lw = log(wronskian_jet(fs, x, 2));
            const cplx lhs = u(x) + lv->energy();
            const cplx rhs = u0(x) - 2.0 * lw.derivative_value(2);
            worst = std::max(worst, rel(lhs, rhs));
        }
        break;
    }
    case Relation::factorization: {
        for (int n = s; n <= lv->nmax(); ++n) {
            const AnalyticFn f = lv->phi(n);
            const AnalyticFn aa = lv->apply_Adag(lv->apply_A(f));
            AnalyticFn bb;
            if (s >= 1) {
                const LevelPtr& dn = at(chain, s - 1);
                bb = dn->apply_A(dn->apply_Adag(f));
            }
            for (double x : samples) {
                const cplx h = lv->hamiltonian_apply(f, x);
                worst = std::max(worst, rel(h, aa(x) + lv->energy() * f(x)));
                if (s >= 1) {
                    worst = std::max(worst, rel(h, bb(x) + at(chain, s - 1)->energy() * f(x)));
                }
            }
        }
        break;
    }
    case Relation::eigen: {
        for (int n = s; n <= lv->nmax(); ++n) {
            const AnalyticFn f = lv->phi(n);
            const double e = fam.energy(n);
            double sup = 0.0, err = 0.0;
            for (double x : samples) {
                const cplx v = f(x);
                sup = std::max(sup, std::abs(v));
                err = std::max(err, std::abs(lv->hamiltonian_apply(f, x) - e * v));
            }
            worst = std::max(worst, err / (std::max(1.0, std::abs(e)) * std::max(sup, 1e-300)));
        }
        break;
    }
    case Relation::zero_mode: {
        const AnalyticFn g = lv->ground();
        double sup = 0.0, err = 0.0;
        for (double x : samples) {
            const Jet j = g.jet(x, 1);
            sup = std::max(sup, std::abs(j[1]));
            err = std::max(err, std::abs(j[1] - lv->wprime_jet(x, 0)[0] * j[0]));
        }
        worst = err / std::max(1.0, sup);
        break;
    }
    case Relation::wronskian_product: {
        std::vector<AnalyticFn> fs;
        for (int k = 0; k < s; ++k) {
            fs.push_back(fam.phi(k));
        }
        for (int n = s; n <= lv->nmax(); ++n) {
            auto all = fs;
            all.push_back(fam.phi(n));
            for (double x : samples) {
                cplx prod = lv->phi(n)(x);
                for (int k = 0; k < s; ++k) {
                    prod *= at(chain, k)->phi(k)(x);
                }
                const cplx w = wronskian(all, x);
                const double scale = std::max({std::abs(w), std::abs(prod), 1e-300});
                worst = std::max(worst, std::abs(w - prod) / scale);
            }
        }
        break;
    }
    case Relation::wronskian_phi: {
        for (int n = s; n <= lv->nmax(); ++n) {
            const AnalyticFn f = lv->phi(n);
            for (double x : samples) {
                worst = std::max(worst, rel(f(x), phi_via_wronskian(fam, s, n, x)));
            }
        }
        break;
    }
    }
    r.max_residual = worst;
    return r;
}

} // namespace crum::oqm
