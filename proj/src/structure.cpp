#include "crum/structure/structure.hpp"

#include "crum/analytic/determinant.hpp"
#include "crum/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace crum::structure {

namespace {

const cplx I{0.0, 1.0};

double rel(cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

std::vector<double> spread(Interval w, int n) {
    const double lo = w.lo + 0.05 * w.width(), hi = w.hi - 0.05 * w.width();
    std::vector<double> xs(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        xs[static_cast<size_t>(k)] = lo + (hi - lo) * (k + 0.5) / n;
    }
    return xs;
}

std::vector<cplx> strip_spread(const DqmFamily& fam, int n) {
    const double h = 0.5 * fam.gamma();
    std::vector<cplx> out;
    const int per = n / 3;
    for (double shift : {0.0, h, -h}) {
        const int m = shift == 0.0 ? n - 2 * per : per;
        for (double x : spread(fam.sample_window(), m)) {
            out.emplace_back(x, shift);
        }
    }
    return out;
}

cplx snap(cplx v) {
    return {std::abs(v.real()) < 1e-13 ? 0.0 : v.real(), std::abs(v.imag()) < 1e-12 ? 0.0 : v.imag()};
}

// Pairs each root with its nearest conjugate and averages, so that a set closed under
// conjugation up to rounding comes out exactly closed.
std::vector<cplx> conjugate_closed(const std::vector<cplx>& roots) {
    std::vector<cplx> out;
    for (cplx r : roots) {
        cplx partner = r;
        double best = std::numeric_limits<double>::infinity();
        for (cplx t : roots) {
            if (std::abs(t - std::conj(r)) < best) {
                best = std::abs(t - std::conj(r));
                partner = t;
            }
        }
        out.push_back(snap(0.5 * (r + std::conj(partner))));
    }
    return out;
}

AnalyticFn oqm_adag(const OqmFamilyPtr& fam, const AnalyticFn& f) {
    return AnalyticFn::from_jet("Adag(" + f.label() + ")",
                                [fam, f](cplx x, int k) {
                                    const Jet j = f.jet(x, k + 1);
                                    return -j.derivative() - fam->wprime_jet(x, k) * j.truncated(k);
                                })
        .with_real(f.is_real());
}

AnalyticFn oqm_a(const OqmFamilyPtr& fam, const AnalyticFn& f) {
    return AnalyticFn::from_jet("A(" + f.label() + ")",
                                [fam, f](cplx x, int k) {
                                    const Jet j = f.jet(x, k + 1);
                                    return j.derivative() - fam->wprime_jet(x, k) * j.truncated(k);
                                })
        .with_real(f.is_real());
}

AnalyticFn sqrt_v_fn(const DqmFamilyPtr& fam) {
    return AnalyticFn("sqrtV", [fam](cplx x) { return fam->sqrt_v(x); }, fam->strip());
}

} // namespace

// ---- shape invariance ----------------------------------------------------------

ShapeFit shape_invariance_residual(const OqmFamilyPtr& fam, const std::vector<oqm::LevelPtr>& chain,
                                   const std::vector<double>& samples, double tolerance) {
    if (chain.size() < 2) {
        throw IndexError("shape invariance needs a depth-1 chain");
    }
    const AnalyticFn u1 = chain[1]->potential();
    std::vector<double> p = fam->shape_params();
    const size_t np = p.size();
    const auto anchors = spread(fam->sample_window(), static_cast<int>(2 + np));
    double kappa = 1.0;
    auto model = [&fam](const std::vector<double>& pp, double x) {
        return fam->with_shape_params(pp)->potential_closed(x).real();
    };

    ShapeFit fit;
    for (int it = 0; it < 60; ++it) {
        const Eigen::Index m = static_cast<Eigen::Index>(anchors.size());
        Eigen::MatrixXd j(m, static_cast<Eigen::Index>(1 + np));
        Eigen::VectorXd r(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double x = anchors[static_cast<size_t>(k)];
            const double u = model(p, x);
            r(k) = u1(x).real() - kappa * u;
            j(k, 0) = -u;
            for (size_t i = 0; i < np; ++i) {
                const double h = 1e-6 * std::max(1.0, std::abs(p[i]));
                auto hi = p, lo = p;
                hi[i] += h;
                lo[i] -= h;
                j(k, static_cast<Eigen::Index>(1 + i)) = -kappa * (model(hi, x) - model(lo, x)) / (2 * h);
            }
        }
        const Eigen::VectorXd d = j.colPivHouseholderQr().solve(-r);
        if (!d.allFinite()) {
            break;
        }
        kappa += d(0);
        for (size_t i = 0; i < np; ++i) {
            p[i] += d(static_cast<Eigen::Index>(1 + i));
        }
        if (d.norm() <= 1e-12 * (1.0 + std::abs(kappa))) {
            fit.converged = true;
            break;
        }
    }
    fit.kappa = kappa;
    for (double v : p) {
        fit.lambda_prime.emplace_back(v);
    }
    const auto target = fam->with_shape_params(p);
    for (double x : samples) {
        const double u = u1(x).real();
        fit.max_residual = std::max(fit.max_residual, rel(u, kappa * target->potential_closed(x).real()));
    }
    fit.samples = static_cast<int>(samples.size());
    fit.shape_invariant = fit.converged && kappa > 0.0 && fit.max_residual <= tolerance;
    return fit;
}

ShapeFit shape_invariance_residual(const DqmFamilyPtr& fam, const dqm::Chain& chain,
                                   const std::vector<cplx>& samples, double tolerance) {
    if (chain.depth() < 1) {
        throw IndexError("shape invariance needs a depth-1 chain");
    }
    const double q = fam->params().get_real("q");
    const size_t np = fam->shape_params().size();
    const auto anchors = spread(fam->sample_window(), static_cast<int>(2 + np));
    // numerator of V^[1] over the common denominator, as a polynomial in e^{ix}
    const Eigen::Index m = static_cast<Eigen::Index>(anchors.size());
    const Eigen::Index deg = np == 0 ? 0 : 4;
    Eigen::MatrixXcd a(m, deg + 1);
    Eigen::VectorXcd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const cplx x = anchors[static_cast<size_t>(k)];
        const cplx e = std::exp(I * x);
        if (np == 0) {
            a(k, 0) = fam->v(x);
            b(k) = chain.v(1, x);
            continue;
        }
        b(k) = chain.v(1, x) * (1.0 - e * e) * (1.0 - q * e * e);
        cplx pw = 1.0;
        for (Eigen::Index i = 0; i <= deg; ++i) {
            a(k, i) = pw;
            pw *= e;
        }
    }
    const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);

    ShapeFit fit;
    fit.kappa = c(0).real();
    fit.kappa_imag = c(0).imag();
    fit.converged = c.allFinite() && std::abs(c(0)) > 0.0;
    if (fit.converged && deg > 0) {
        // prod_j (1 - a'_j e) = 1 + (c1/c0) e + ... : the a'_j are the roots of t^4 + (c1/c0) t^3 + ...
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
        for (Eigen::Index i = 0; i < deg; ++i) {
            comp(0, i) = -c(i + 1) / c(0);
            if (i + 1 < deg) {
                comp(i + 1, i) = 1.0;
            }
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
        std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
        fit.lambda_prime = conjugate_closed(roots);
        fit.converged = es.info() == Eigen::Success;
    }
    if (!fit.converged) {
        return fit;
    }
    const auto target = fam->with_shape_params(fit.lambda_prime);
    for (cplx x : samples) {
        fit.max_residual = std::max(fit.max_residual, rel(chain.v(1, x), fit.kappa * target->v(x)));
    }
    fit.samples = static_cast<int>(samples.size());
    fit.shape_invariant = fit.kappa > 0.0 && std::abs(fit.kappa_imag) <= 1e-8 * fit.kappa &&
                          fit.max_residual <= tolerance;
    return fit;
}

ShapeInvarianceData shape_invariance(const FamilyPtr& fam, int nmax) {
    if (nmax < 0 || nmax > kTabulatedN) {
        throw IndexError("shape invariance orbit length out of range");
    }
    ShapeInvarianceData sid;
    sid.family = fam->name();
    sid.orbit.push_back(fam);
    FamilyOptions opts;
    opts.validate = false;
    for (int s = 0; s < nmax; ++s) {
        const FamilyPtr cur = sid.orbit.back();
        ShapeFit fit;
        ParamSet next;
        if (auto o = std::dynamic_pointer_cast<const OqmFamily>(cur)) {
            const auto chain = oqm::build_chain(o, 1, 2);
            fit = shape_invariance_residual(o, chain, spread(o->sample_window(), 30));
            if (!fit.lambda_prime.empty()) {
                next.set("g", fit.lambda_prime.front().real());
            }
        } else {
            const auto d = std::dynamic_pointer_cast<const DqmFamily>(cur);
            const auto chain = dqm::Chain::build(d, 1, 2);
            fit = shape_invariance_residual(d, *chain, strip_spread(*d, 30));
            for (size_t k = 0; k < fit.lambda_prime.size(); ++k) {
                next.set("a" + std::to_string(k + 1), fit.lambda_prime[k]);
            }
            next.set("q", d->params().get("q"));
        }
        sid.fits.push_back(fit);
        if (!fit.converged) {
            throw AccuracyError(cur->name() + ": shape-invariance fit did not converge at orbit step " +
                                    std::to_string(s),
                                fit.kappa, fit.max_residual);
        }
        sid.orbit.push_back(make_family(cur->name(), next, opts));
    }
    sid.kappa = sid.fits.empty() ? 1.0 : sid.fits.front().kappa;
    for (const auto& f : sid.orbit) {
        sid.e1.push_back(f->energy(1));
    }
    return sid;
}

double si_spectrum(const ShapeInvarianceData& sid, int n) {
    if (n < 0 || n >= static_cast<int>(sid.orbit.size())) {
        throw IndexError("si_spectrum: n outside the computed orbit");
    }
    double e = 0.0, k = 1.0;
    for (int s = 0; s < n; ++s) {
        e += k * sid.e1[static_cast<size_t>(s)];
        k *= sid.kappa;
    }
    return e;
}

AnalyticFn si_eigenfunction(const ShapeInvarianceData& sid, int n) {
    if (n < 0 || n >= static_cast<int>(sid.orbit.size())) {
        throw IndexError("si_eigenfunction: n outside the computed orbit");
    }
    AnalyticFn f = sid.orbit[static_cast<size_t>(n)]->phi(0);
    for (int s = n - 1; s >= 0; --s) {
        const FamilyPtr& fs = sid.orbit[static_cast<size_t>(s)];
        if (auto o = std::dynamic_pointer_cast<const OqmFamily>(fs)) {
            f = oqm_adag(o, f);
        } else {
            const auto d = std::dynamic_pointer_cast<const DqmFamily>(fs);
            f = dqm::apply_Adag(sqrt_v_fn(d), d->gamma(), f);
        }
    }
    return f;
}

double si_ratio_spread(const ShapeInvarianceData& sid, int n, const std::vector<double>& samples) {
    const AnalyticFn s = si_eigenfunction(sid, n);
    const AnalyticFn p = sid.orbit.front()->phi(n);
    std::vector<cplx> ps, ss;
    double peak = 0.0;
    for (double x : samples) {
        ps.push_back(p(x));
        ss.push_back(s(x));
        peak = std::max(peak, std::abs(ps.back()));
    }
    std::vector<cplx> rs;
    for (size_t k = 0; k < ps.size(); ++k) {
        if (std::abs(ps[k]) > 1e-6 * peak) {
            rs.push_back(ss[k] / ps[k]);
        }
    }
    if (rs.empty()) {
        throw PoleError("si_ratio_spread: phi_n vanishes at every sample");
    }
    cplx mean = 0.0;
    for (cplx r : rs) {
        mean += r;
    }
    mean /= static_cast<double>(rs.size());
    double worst = 0.0;
    for (cplx r : rs) {
        worst = std::max(worst, std::abs(r - mean));
    }
    return worst / std::abs(mean);
}

double shape_operator_residual(const ShapeInvarianceData& sid, const std::vector<double>& samples) {
    if (sid.orbit.size() < 2) {
        throw IndexError("shape_operator_residual needs one orbit step");
    }
    const FamilyPtr& l0 = sid.orbit[0];
    const FamilyPtr& l1 = sid.orbit[1];
    const double kappa = sid.kappa, e1 = sid.e1[0];
    std::vector<AnalyticFn> tests{l0->phi(1), l0->phi(2)};
    double worst = 0.0;
    if (auto o0 = std::dynamic_pointer_cast<const OqmFamily>(l0)) {
        const auto o1 = std::dynamic_pointer_cast<const OqmFamily>(l1);
        tests.push_back(jet_function("probe", [](const Jet& t) { return 0.7 + 0.4 * sin(1.3 * t); }));
        for (const AnalyticFn& f : tests) {
            const AnalyticFn lhs = oqm_a(o0, oqm_adag(o0, f));
            const AnalyticFn rhs = oqm_adag(o1, oqm_a(o1, f));
            for (double x : samples) {
                worst = std::max(worst, rel(lhs(x), kappa * rhs(x) + e1 * f(x)));
            }
        }
    } else {
        const auto d0 = std::dynamic_pointer_cast<const DqmFamily>(l0);
        const auto d1 = std::dynamic_pointer_cast<const DqmFamily>(l1);
        const double g = d0->gamma();
        const AnalyticFn s0 = sqrt_v_fn(d0), s1 = sqrt_v_fn(d1);
        tests.push_back(jet_function("probe", [](const Jet& t) { return 0.7 + 0.4 * cos(1.3 * t) + 0.1 * t; }));
        for (const AnalyticFn& f : tests) {
            const AnalyticFn lhs = dqm::apply_A(s0, g, dqm::apply_Adag(s0, g, f));
            const AnalyticFn rhs = dqm::apply_Adag(s1, g, dqm::apply_A(s1, g, f));
            for (double x : samples) {
                worst = std::max(worst, rel(lhs(x), kappa * rhs(x) + e1 * f(x)));
            }
        }
    }
    return worst;
}

// ---- sinusoidal coordinate ---------------------------------------------------

std::string eta_relation_name(EtaRelation r) {
    switch (r) {
    case EtaRelation::eta_affine:
        return "eta_affine";
    case EtaRelation::V1_from_eta:
        return "V1_from_eta";
    case EtaRelation::eta_level:
        return "eta_level";
    case EtaRelation::Vs_product:
        return "Vs_product";
    }
    return "unknown";
}

namespace {

// max |y - (a + b t)| / max(1, |y|) after a least-squares fit of (a, b)
double affine_residual(const std::vector<cplx>& t, const std::vector<cplx>& y) {
    const Eigen::Index m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXcd a(m, 2);
    Eigen::VectorXcd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        a(k, 0) = 1.0;
        a(k, 1) = t[static_cast<size_t>(k)];
        b(k) = y[static_cast<size_t>(k)];
    }
    const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        worst = std::max(worst, rel(b(k), c(0) + c(1) * a(k, 1)));
    }
    return worst;
}

} // namespace

double eta_relation_residual(EtaRelation kind, const Family& fam, const dqm::Chain* chain,
                             const std::vector<cplx>& samples) {
    if (kind == EtaRelation::eta_affine) {
        const AnalyticFn p0 = fam.phi(0), p1 = fam.phi(1), eta = fam.eta();
        std::vector<cplx> t, y;
        for (cplx x : samples) {
            t.push_back(eta(x));
            y.push_back(p1(x) / p0(x));
        }
        return affine_residual(t, y);
    }
    const auto* d = dynamic_cast<const DqmFamily*>(&fam);
    if (d == nullptr) {
        throw CapabilityError(eta_relation_name(kind) + " is defined for discrete families only");
    }
    if (chain == nullptr || chain->depth() < 1) {
        throw CapabilityError(eta_relation_name(kind) + " needs a chain of depth >= 1");
    }
    const double g = d->gamma();
    const cplx h = 0.5 * I * g;
    auto eta = [d](cplx x) { return d->eta_raw(x); };
    auto eta_s = [&eta, h](int s, cplx x) {
        cplx sum = 0.0;
        for (int k = 0; k <= s; ++k) {
            sum += eta(x + h * static_cast<double>(2 * k - s));
        }
        return sum;
    };
    double worst = 0.0;
    switch (kind) {
    case EtaRelation::V1_from_eta:
        for (cplx x : samples) {
            const cplx rhs = d->v(x) * (eta(x - 2.0 * h) - eta(x)) / (eta(x) - eta(x + 2.0 * h));
            worst = std::max(worst, rel(chain->v(1, x + h), rhs));
        }
        break;
    case EtaRelation::eta_level:
        for (int s = 1; s <= std::min(chain->depth(), chain->nmax() - 1); ++s) {
            std::vector<cplx> t, y;
            for (cplx x : samples) {
                t.push_back(eta_s(s, x));
                y.push_back(chain->phi(s, s + 1, x) / chain->phi(s, s, x));
            }
            worst = std::max(worst, affine_residual(t, y));
        }
        break;
    case EtaRelation::Vs_product:
        for (int s = 1; s <= chain->depth(); ++s) {
            for (cplx x : samples) {
                cplx rhs = d->v(x);
                for (int k = 0; k < s; ++k) {
                    rhs *= (eta(x - 2.0 * h) - eta(x + 2.0 * h * static_cast<double>(k))) /
                           (eta(x) - eta(x + 2.0 * h * static_cast<double>(k + 1)));
                }
                worst = std::max(worst, rel(chain->v(s, x + h * static_cast<double>(s)), rhs));
            }
        }
        break;
    case EtaRelation::eta_affine:
        break;
    }
    return worst;
}

// ---- limits --------------------------------------------------------------------

std::string limit_mode_name(LimitMode m) {
    switch (m) {
    case LimitMode::gamma_to_0:
        return "gamma_to_0";
    case LimitMode::c_to_inf:
        return "c_to_inf";
    case LimitMode::casoratian_transfer:
        return "casoratian_transfer";
    }
    return "unknown";
}

namespace {

// error ~ parameter^slope (gamma) or parameter^-slope (c)
void finish(LimitTable& t, bool toward_zero) {
    const size_t n = t.parameter.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double lx = std::log(t.parameter[k]);
        const double ly = std::log(std::max(t.error[k], std::numeric_limits<double>::min()));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double fit = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    t.slope = toward_zero ? fit : -fit;
    for (size_t k = 1; k < n; ++k) {
        const bool closer = toward_zero ? t.parameter[k] < t.parameter[k - 1]
                                        : t.parameter[k] > t.parameter[k - 1];
        if (closer != (t.error[k] < t.error[k - 1])) {
            t.monotone = false;
        }
    }
    const double floor = *std::min_element(t.error.begin(), t.error.end());
    t.inconclusive = !t.monotone || !(floor > 1e-14);
}

struct ScaledV {
    double a;
    double eps;
    AnalyticFn w1;
    AnalyticFn w2;
    cplx v(cplx x) const { return a * (1.0 + I * eps * w1(x) + I * eps * eps * w2(x)); }
    cplx vs(cplx x) const { return std::conj(v(std::conj(x))); }
};

const std::vector<AnalyticFn>& limit_tests() {
    static const std::vector<AnalyticFn> t{
        jet_function("gauss", [](const Jet& x) { return exp(-0.5 * x * x); }),
        jet_function("x gauss", [](const Jet& x) { return x * exp(-0.5 * x * x); }),
    };
    return t;
}

} // namespace

LimitTable limit_gamma_to_0(const std::vector<AnalyticFn>& fs, const std::vector<double>& gammas,
                            const std::vector<double>& points) {
    LimitTable t{LimitMode::gamma_to_0, gammas, {}};
    const int n = static_cast<int>(fs.size());
    for (double g : gammas) {
        double worst = 0.0;
        for (double x : points) {
            const cplx w = wronskian(fs, x);
            const cplx c = casoratian(fs, x, g) / std::pow(g, n * (n - 1) / 2);
            worst = std::max(worst, std::abs(c - w) / std::max(1.0, std::abs(w)));
        }
        t.error.push_back(worst);
    }
    finish(t, true);
    return t;
}

LimitTable limit_c_to_inf(const LimitScaling& sc, const std::vector<double>& points) {
    LimitTable t{LimitMode::c_to_inf, sc.c_values, {}};
    for (double c : sc.c_values) {
        const ScaledV sv{sc.a, sc.gamma / c, sc.w1, sc.w2};
        const cplx h = 0.5 * I * sv.eps;
        double worst = 0.0;
        for (const AnalyticFn& f : limit_tests()) {
            for (double x : points) {
                const Jet fj = f.jet(x, 2);
                const Jet wj = sc.w1.jet(x, 1);
                const double wp = -wj[0].real(), wpp = -wj[1].real();
                const cplx a_target = fj[1] - wp * fj[0];
                const cplx h_target = -fj.derivative_value(2) + (wp * wp + wpp) * fj[0];
                const cplx a_val = I * (std::sqrt(sv.vs(x - h)) * f(x - h) - std::sqrt(sv.v(x + h)) * f(x + h));
                const cplx h_val = std::sqrt(sv.v(x)) * std::sqrt(sv.vs(x - 2.0 * h)) * f(x - 2.0 * h) +
                                   std::sqrt(sv.vs(x)) * std::sqrt(sv.v(x + 2.0 * h)) * f(x + 2.0 * h) -
                                   (sv.v(x) + sv.vs(x)) * f(x);
                const cplx a_scaled = a_val / (std::sqrt(sc.a) * sv.eps);
                const cplx h_scaled = h_val / (sc.a * sv.eps * sv.eps);
                worst = std::max(worst, std::abs(a_scaled - a_target) / std::max(1.0, std::abs(a_target)));
                worst = std::max(worst, std::abs(h_scaled - h_target) / std::max(1.0, std::abs(h_target)));
            }
        }
        t.error.push_back(worst);
    }
    finish(t, false);
    return t;
}

LimitTable limit_casoratian_transfer(const LimitScaling& sc, const std::vector<double>& points) {
    LimitTable t{LimitMode::casoratian_transfer, sc.c_values, {}};
    const auto hermite = make_oqm_family("hermite", {});
    const std::vector<AnalyticFn> fs{hermite->phi(0), hermite->phi(1)};
    for (double c : sc.c_values) {
        const ScaledV sv{sc.a, sc.gamma / c, sc.w1, sc.w2};
        const cplx h = 0.5 * I * sv.eps;
        double worst = 0.0;
        for (double x : points) {
            const cplx target = oqm::phi_via_wronskian(*hermite, 1, 1, x);
            const cplx val = std::sqrt(sv.v(x + h)) * casoratian(fs, x, sv.eps) / fs[0](x - h);
            const cplx scaled = val / (std::sqrt(sc.a) * sv.eps);
            worst = std::max(worst, std::abs(scaled - target) / std::max(1.0, std::abs(target)));
        }
        t.error.push_back(worst);
    }
    finish(t, false);
    return t;
}

void write_csv(std::ostream& os, const std::vector<LimitTable>& tables) {
    os << "mode,parameter,max_error,fitted_slope\n";
    const auto old = os.precision(17);
    for (const auto& t : tables) {
        for (size_t k = 0; k < t.parameter.size(); ++k) {
            os << limit_mode_name(t.mode) << ',' << t.parameter[k] << ',' << t.error[k] << ','
               << t.slope << '\n';
        }
    }
    os.precision(old);
}

} // namespace crum::structure
