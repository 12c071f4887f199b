#include "crum/verify/suite.hpp"

#include "crum/analytic/determinant.hpp"
#include "crum/dqm/chain.hpp"
#include "crum/error.hpp"
#include "crum/oqm/chain.hpp"
#include "crum/structure/structure.hpp"
#include "crum/verify/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <typeinfo>

namespace crum::verify {

using nlohmann::json;

namespace {

const cplx I{0.0, 1.0};

/// Identities whose default differs from their class.
const std::map<std::string, double> kBuiltinTolerances{{"si_spectrum", 1e-10}};

std::string precision_name(Precision p) { return p == Precision::extended ? "extended" : "double"; }

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const ChainBreakError*>(&e)) return "ChainBreakError";
    if (dynamic_cast<const ParameterError*>(&e)) return "ParameterError";
    if (dynamic_cast<const BranchError*>(&e)) return "BranchError";
    if (dynamic_cast<const PoleError*>(&e)) return "PoleError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const IndexError*>(&e)) return "IndexError";
    if (dynamic_cast<const AccuracyError*>(&e)) return "AccuracyError";
    if (dynamic_cast<const CapabilityError*>(&e)) return "CapabilityError";
    return "Error";
}

json entry(double residual, int samples, double tol) {
    return {{"residual", std::isfinite(residual) ? json(residual) : json("non-finite")},
            {"samples", samples},
            {"tol", tol},
            {"pass", residual <= tol},
            {"checked", "at-samples"}};
}

json error_entry(const std::exception& e) {
    return {{"error", error_type(e)}, {"message", e.what()}, {"pass", false}};
}

json skipped(const std::string& reason) { return {{"skipped", reason}}; }

/// Runs one identity; index and capability errors mean "not applicable here".
template <class F>
json guarded(F&& f) {
    try {
        return f();
    } catch (const IndexError& e) {
        return skipped(e.what());
    } catch (const CapabilityError& e) {
        return skipped(e.what());
    } catch (const Error& e) {
        return error_entry(e);
    }
}

Interval grid_interval(const OqmFamily& f) {
    if (f.name() == "hermite") {
        return {-10.0, 10.0};
    }
    if (f.name() == "laguerre") {
        return {0.0, 10.0};
    }
    return f.domain();
}

double edge_power(const OqmFamily& f, int s) {
    const auto sp = f.shape_params();
    return sp.empty() ? 0.0 : sp.front() + s;
}

json gram_entry(const std::vector<AnalyticFn>& fs, const Family& fam, int s, int nmax, double tol,
                double margin = 0.0) {
    // Quadrature nodes close to the edges can underflow the ground state of a deep level,
    // where every phi^[s]_n vanishes with it.
    auto vals = [&fs](double x, std::vector<cplx>& out) {
        try {
            for (size_t k = 0; k < fs.size(); ++k) {
                out[k] = fs[k](x);
            }
        } catch (const PoleError&) {
            std::fill(out.begin(), out.end(), cplx(0.0));
        }
    };
    QuadratureSpec q = fam.gram_quadrature();
    q.margin = std::max(q.margin, margin);
    const GramResult g = gram_matrix(vals, static_cast<int>(fs.size()), q);
    const int m = static_cast<int>(fs.size());
    std::vector<double> d(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double e = fam.norm(s + i);
        for (int k = 0; k < s; ++k) {
            e *= fam.energy(s + i) - fam.energy(k);
        }
        d[static_cast<size_t>(i)] = e;
    }
    double dev = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double want = i == j ? d[static_cast<size_t>(i)] : 0.0;
            const double scale = std::sqrt(std::abs(d[static_cast<size_t>(i)] * d[static_cast<size_t>(j)]));
            dev = std::max(dev, std::abs(g.matrix(i, j) - want) / scale);
        }
    }
    json out = entry(dev, m * m, tol);
    out["checked"] = "quadrature";
    out["n_range"] = {s, nmax};
    out["hermiticity_defect"] = g.hermiticity_defect;
    out["quadrature_error"] = g.max_error;
    out["divergent"] = g.divergent;
    out["pass"] = out["pass"].get<bool>() && g.divergent.empty();
    return out;
}

json oqm_levels(const std::vector<oqm::LevelPtr>& chain, const RunConfig& cfg, const std::vector<double>& xs) {
    const auto& t = cfg.tolerances;
    const OqmFamily& fam = chain.front()->family();
    json levels = json::array();
    const std::vector<oqm::Relation> rels{oqm::Relation::intertwine,        oqm::Relation::riccati,
                                          oqm::Relation::potential_wronskian, oqm::Relation::factorization,
                                          oqm::Relation::eigen,             oqm::Relation::zero_mode,
                                          oqm::Relation::wronskian_product, oqm::Relation::wronskian_phi};
    for (int s = 0; s < static_cast<int>(chain.size()); ++s) {
        json lv{{"s", s}, {"E_s", fam.energy(s)}};
        json ids = json::object();
        for (auto r : rels) {
            const std::string name = oqm::relation_name(r);
            ids[name] = guarded([&] {
                const auto res = oqm::relation_residual(r, chain, s, xs);
                return entry(res.max_residual, res.samples, t.get(name, t.algebraic));
            });
        }
        lv["identities"] = ids;
        lv["gram"] = guarded([&] {
            std::vector<AnalyticFn> fs;
            for (int n = s; n <= cfg.nmax; ++n) {
                fs.push_back(chain[static_cast<size_t>(s)]->phi(n));
            }
            return gram_entry(fs, fam, s, cfg.nmax, t.get("gram", t.quadrature), oqm::edge_cut(fam, s));
        });
        if (s >= 1) {
            std::vector<AnalyticFn> fs;
            for (int k = 0; k <= s; ++k) {
                fs.push_back(fam.phi(k));
            }
            double growth = 1.0;
            for (double x : xs) {
                growth = std::max(growth, wronskian_lu(fs, x).growth);
            }
            lv["lu_growth"] = growth;
        }
        levels.push_back(lv);
    }
    return levels;
}

json dqm_levels(const dqm::Chain& chain, const RunConfig& cfg, const std::vector<cplx>& xs,
                const std::vector<double>& reals) {
    const auto& t = cfg.tolerances;
    const DqmFamily& fam = chain.family();
    json levels = json::array();
    const std::vector<dqm::Relation> rels{
        dqm::Relation::zero_mode,     dqm::Relation::quadratic,         dqm::Relation::linear,
        dqm::Relation::intertwine,    dqm::Relation::step_determinant,  dqm::Relation::casoratian_jacobi,
        dqm::Relation::check_product, dqm::Relation::casoratian_phi,    dqm::Relation::eigen,
        dqm::Relation::factorization, dqm::Relation::realness,          dqm::Relation::branch_anchor};
    for (int s = 0; s <= chain.depth(); ++s) {
        json lv{{"s", s}, {"E_s", fam.energy(s)}};
        json ids = json::object();
        for (auto r : rels) {
            const std::string name = dqm::relation_name(r);
            ids[name] = guarded([&] {
                const auto res = dqm::relation_residual(r, chain, s, xs);
                return entry(res.max_residual, res.samples, t.get(name, t.algebraic));
            });
        }
        lv["identities"] = ids;
        lv["gram"] = guarded([&] {
            const auto level = chain.level(s);
            std::vector<AnalyticFn> fs;
            for (int n = s; n <= cfg.nmax; ++n) {
                fs.push_back(level->phi(n));
            }
            return gram_entry(fs, fam, s, cfg.nmax, t.get("gram", t.quadrature));
        });
        if (s >= 1) {
            std::vector<AnalyticFn> fs;
            for (int k = 0; k <= s; ++k) {
                fs.push_back(fam.phi(k));
            }
            double growth = 1.0;
            for (double x : reals) {
                growth = std::max(growth, casoratian_lu(fs, x, fam.gamma()).growth);
            }
            lv["lu_growth"] = growth;
        }
        levels.push_back(lv);
    }
    return levels;
}

json oqm_oracle(const std::vector<oqm::LevelPtr>& chain, const RunConfig& cfg) {
    const OqmFamily& fam = chain.front()->family();
    const double tol = cfg.tolerances.get("grid_spectrum", cfg.tolerances.oracle);
    const Interval iv = grid_interval(fam);
    json out{{"method", "finite-difference grid, Richardson extrapolated"},
             {"interval", {iv.lo, iv.hi}},
             {"points", 2000}};
    const int k0 = std::min(cfg.nmax, 5) + 1;
    const auto ev = grid_eigensolve(fam.potential(), iv, 2000, k0, edge_power(fam, 0));
    double dev = 0.0;
    json rows = json::array();
    for (int n = 0; n < k0; ++n) {
        const double e = fam.energy(n);
        dev = std::max(dev, std::abs(ev[static_cast<size_t>(n)] - e) / std::max(1.0, std::abs(e)));
        rows.push_back({{"n", n}, {"grid", ev[static_cast<size_t>(n)]}, {"closed_form", e}});
    }
    out["spectrum"] = entry(dev, k0, tol);
    out["spectrum"]["checked"] = "oracle";
    out["spectrum"]["values"] = rows;
    if (chain.size() < 2) {
        out["iso_spectral"] = skipped("needs depth >= 1");
        return out;
    }
    // p^2 + U^[1] has eigenvalues E_n - E_1, n >= 1.
    const auto u1 = chain[1]->potential();
    const double e1 = fam.energy(1);
    const auto ev1 = grid_eigensolve(u1, iv, 2000, 3, edge_power(fam, 1));
    double dev1 = 0.0;
    json vals = json::array();
    for (int n = 1; n <= 3; ++n) {
        const double got = ev1[static_cast<size_t>(n - 1)] + e1;
        dev1 = std::max(dev1, std::abs(got - fam.energy(n)) / std::max(1.0, fam.energy(n)));
        vals.push_back(got);
    }
    out["iso_spectral"] = entry(dev1, 3, tol);
    out["iso_spectral"]["checked"] = "oracle";
    out["iso_spectral"]["values"] = vals;
    out["iso_spectral"]["ground_state_gap"] = ev1.front() + e1 - fam.energy(0);
    return out;
}

json virtual_state(const Family& fam, const std::vector<double>& xs, const Tolerances& t) {
    const AnalyticFn w = fam.virtual_state();
    double r = 0.0;
    if (const auto* o = dynamic_cast<const OqmFamily*>(&fam)) {
        for (double x : xs) {
            const Jet j = w.jet(x, 1);
            const cplx wp = o->wprime_jet(x, 0).value();
            r = std::max(r, std::abs(-j.derivative_value(1) - wp * j.value()) / std::abs(j.value()));
        }
    } else {
        const auto& d = dynamic_cast<const DqmFamily&>(fam);
        const double g = d.gamma();
        for (double x : xs) {
            const cplx a = I * (d.sqrt_v(x) * w(x - 0.5 * I * g) - d.sqrt_v_star(x) * w(x + 0.5 * I * g));
            r = std::max(r, std::abs(a) / std::abs(w(x)));
        }
    }
    json out;
    out["annihilated_by_Adag"] = entry(r, static_cast<int>(xs.size()), t.get("virtual_zero_mode", 1e-8));
    const QuadratureResult q = integrate([&w](double x) { return std::norm(w(x)); }, fam.virtual_quadrature());
    out["norm_diverges"] = q.diverged;
    if (!q.diverged) {
        out["norm"] = q.value.real();
    }
    return out;
}

json shape_section(const FamilyPtr& fam, const RunConfig& cfg, const std::vector<double>& reals) {
    const auto& t = cfg.tolerances;
    const auto sid = structure::shape_invariance(fam, cfg.nmax);
    const auto& fit = sid.fits.front();
    json lp = json::array();
    for (cplx v : fit.lambda_prime) {
        lp.push_back(complex_to_json(v));
    }
    json out{{"kappa", fit.kappa}, {"kappa_imag", fit.kappa_imag}, {"lambda_prime", lp}, {"converged", fit.converged}};
    out["fit"] = entry(fit.max_residual, fit.samples, t.get("shape_fit", t.algebraic));
    out["fit"]["pass"] = fit.converged && fit.kappa > 0.0 && fit.max_residual <= t.get("shape_fit", t.algebraic);
    double de = 0.0;
    for (int n = 0; n <= cfg.nmax; ++n) {
        const double e = fam->energy(n);
        de = std::max(de, std::abs(structure::si_spectrum(sid, n) - e) / std::max(1.0, std::abs(e)));
    }
    out["si_spectrum"] = entry(de, cfg.nmax + 1, t.get("si_spectrum", t.algebraic));
    double spread = 0.0;
    for (int n = 1; n <= std::min(cfg.nmax, 4); ++n) {
        spread = std::max(spread, structure::si_ratio_spread(sid, n, reals));
    }
    out["si_eigenfunction"] = entry(spread, static_cast<int>(reals.size()), t.get("si_eigenfunction", t.algebraic));
    out["operator"] = guarded([&] {
        std::vector<double> ten(reals.begin(), reals.begin() + std::min<size_t>(10, reals.size()));
        return entry(structure::shape_operator_residual(sid, ten), 3 * static_cast<int>(ten.size()),
                     t.get("shape_operator", t.algebraic));
    });
    return out;
}

json eta_section(const DqmFamily& fam, const dqm::Chain* chain, const RunConfig& cfg, const std::vector<cplx>& xs) {
    json out = json::object();
    for (auto k : {structure::EtaRelation::eta_affine, structure::EtaRelation::V1_from_eta,
                   structure::EtaRelation::eta_level, structure::EtaRelation::Vs_product}) {
        const std::string name = structure::eta_relation_name(k);
        out[name] = guarded([&] {
            return entry(structure::eta_relation_residual(k, fam, chain, xs), static_cast<int>(xs.size()),
                         cfg.tolerances.get(name, cfg.tolerances.algebraic));
        });
    }
    return out;
}

json limit_json(const structure::LimitTable& t) {
    const bool pass = !t.inconclusive && std::abs(t.slope - 1.0) <= 0.25;
    return {{"mode", structure::limit_mode_name(t.mode)},
            {"parameter", t.parameter},
            {"max_error", t.error},
            {"fitted_slope", t.slope},
            {"monotone", t.monotone},
            {"inconclusive", t.inconclusive},
            {"expected_slope", 1.0},
            {"slope_tol", 0.25},
            {"pass", pass}};
}

/// Every entry with a "pass" key, recursively.
bool all_pass(const json& j) {
    if (j.is_object()) {
        if (j.contains("pass") && j["pass"].is_boolean() && !j["pass"].get<bool>()) {
            return false;
        }
        for (const auto& [k, v] : j.items()) {
            if (!all_pass(v)) {
                return false;
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (!all_pass(v)) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

double Tolerances::get(const std::string& identity, double class_default) const {
    if (auto it = overrides.find(identity); it != overrides.end()) {
        return it->second;
    }
    if (auto it = kBuiltinTolerances.find(identity); it != kBuiltinTolerances.end()) {
        return it->second;
    }
    return class_default;
}

json RunConfig::to_json() const {
    json ov = json::object();
    for (const auto& [k, v] : tolerances.overrides) {
        ov[k] = v;
    }
    return {{"family", family},
            {"params", params.to_json()},
            {"depth", depth},
            {"nmax", nmax},
            {"samples", samples},
            {"tolerances",
             {{"algebraic", tolerances.algebraic},
              {"quadrature", tolerances.quadrature},
              {"oracle", tolerances.oracle},
              {"overrides", ov}}},
            {"precision", precision_name(precision)},
            {"out", out},
            {"csv", csv},
            {"seed", seed},
            {"limits", limits}};
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    try {
        c.family = j.at("family").get<std::string>();
        c.params = ParamSet::from_json(j.value("params", json::object()));
        c.depth = j.value("depth", c.depth);
        c.nmax = j.value("nmax", c.nmax);
        c.samples = j.value("samples", c.samples);
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            c.tolerances.algebraic = t.value("algebraic", c.tolerances.algebraic);
            c.tolerances.quadrature = t.value("quadrature", c.tolerances.quadrature);
            c.tolerances.oracle = t.value("oracle", c.tolerances.oracle);
            const json ov = t.value("overrides", json::object());
            for (const auto& [k, v] : ov.items()) {
                c.tolerances.overrides[k] = v.get<double>();
            }
        }
        const std::string p = j.value("precision", std::string("double"));
        if (p != "double" && p != "extended") {
            throw ParameterError("precision must be double or extended, got " + p);
        }
        c.precision = p == "extended" ? Precision::extended : Precision::double_;
        c.out = j.value("out", std::string());
        c.csv = j.value("csv", std::string());
        c.seed = j.value("seed", c.seed);
        c.limits = j.value("limits", false);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed run config: ") + e.what());
    }
    return c;
}

void apply_env(RunConfig& cfg) {
    if (const char* s = std::getenv("CRUM_SEED")) {
        try {
            cfg.seed = std::stoull(s);
        } catch (const std::exception&) {
            throw ParameterError(std::string("CRUM_SEED is not an unsigned integer: ") + s);
        }
    }
}

std::vector<double> real_samples(Interval window, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double lo = window.lo + 0.05 * window.width(), w = 0.9 * window.width();
    const double step = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<double> xs;
    for (int k = 0; k < count; ++k) {
        xs.push_back(lo + w * u);
        u = std::fmod(u + step, 1.0);
    }
    return xs;
}

std::vector<cplx> strip_samples(const DqmFamily& fam, int count, std::uint64_t seed) {
    std::vector<cplx> xs;
    for (double x : real_samples(fam.sample_window(), count, seed)) {
        xs.emplace_back(x, 0.0);
    }
    const double g = fam.gamma();
    std::uint64_t line_seed = seed;
    for (double im : {0.5 * g, -0.5 * g, g, -g}) {
        for (double x : real_samples(fam.sample_window(), count / 2, ++line_seed)) {
            xs.emplace_back(x, im);
        }
    }
    return xs;
}

json run_suite(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.precision == Precision::extended) {
        throw CapabilityError("extended precision is not available in this build");
    }
    if (cfg.depth < 0 || cfg.nmax < cfg.depth || cfg.nmax > kTabulatedN) {
        throw IndexError("need 0 <= depth <= nmax <= " + std::to_string(kTabulatedN));
    }
    json rep{{"schema", kReportSchema}, {"config", cfg.to_json()}, {"seed", cfg.seed}, {"depth", cfg.depth}};
    rep["params"] = cfg.params.to_json();
    json stages = json::array();
    auto finish = [&](json& r) {
        r["stages"] = stages;
        r["status"] = all_pass(r) ? "pass" : "fail";
        r["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    FamilyPtr fam;
    try {
        fam = make_family(cfg.family, cfg.params);
        stages.push_back({{"name", "construction"}, {"pass", true}});
    } catch (const CapabilityError&) {
        throw;
    } catch (const Error& e) {
        json st = error_entry(e);
        st["name"] = "construction";
        stages.push_back(st);
        rep["family"] = {{"name", cfg.family}};
        return finish(rep);
    }
    rep["family"] = fam->descriptor(cfg.nmax);
    rep["gamma"] = fam->gamma();

    const auto reals = real_samples(fam->sample_window(), cfg.samples, cfg.seed);
    json sampling{{"real", cfg.samples}, {"window_fraction", 0.9}, {"sequence", "golden-ratio"}};

    std::vector<oqm::LevelPtr> ochain;
    dqm::ChainPtr dchain;
    std::vector<cplx> cx;
    try {
        if (auto o = std::dynamic_pointer_cast<const OqmFamily>(fam)) {
            ochain = oqm::build_chain(o, cfg.depth, cfg.nmax);
            rep["levels"] = oqm_levels(ochain, cfg, reals);
        } else {
            const auto d = std::dynamic_pointer_cast<const DqmFamily>(fam);
            cx = strip_samples(*d, cfg.samples, cfg.seed);
            const double g = d->gamma();
            sampling["lines"] = {0.5 * g, -0.5 * g, g, -g};
            sampling["per_line"] = cfg.samples / 2;
            dchain = dqm::Chain::build(d, cfg.depth, cfg.nmax);
            rep["levels"] = dqm_levels(*dchain, cfg, cx, reals);
        }
        stages.push_back({{"name", "chain"}, {"pass", true}});
    } catch (const CapabilityError&) {
        throw;
    } catch (const Error& e) {
        json st = error_entry(e);
        st["name"] = "chain";
        stages.push_back(st);
    }
    rep["sampling"] = sampling;

    if (!ochain.empty()) {
        rep["oracle"] = guarded([&] { return oqm_oracle(ochain, cfg); });
    } else {
        rep["oracle"] = skipped("the finite-difference oracle applies to ordinary QM only; "
                                "discrete spectra are covered by the eigen identity");
    }
    rep["virtual_state"] = guarded([&] { return virtual_state(*fam, reals, cfg.tolerances); });
    if (cfg.depth >= 1) {
        rep["shape_invariance"] = guarded([&] { return shape_section(fam, cfg, reals); });
    } else {
        rep["shape_invariance"] = skipped("needs depth >= 1");
    }
    if (const auto d = std::dynamic_pointer_cast<const DqmFamily>(fam)) {
        rep["eta"] = dchain ? eta_section(*d, dchain.get(), cfg, cx) : skipped("chain stage failed");
    } else {
        rep["eta"] = skipped("the sinusoidal-coordinate relations are stated for discrete families");
    }
    if (cfg.limits) {
        const std::vector<double> pts(reals.begin(), reals.begin() + std::min<size_t>(10, reals.size()));
        rep["limits"] = guarded([&] {
            std::vector<AnalyticFn> fs;
            for (int k = 0; k <= std::min(cfg.nmax, 2); ++k) {
                fs.push_back(fam->phi(k));
            }
            json arr = json::array();
            arr.push_back(limit_json(structure::limit_gamma_to_0(fs, {1e-1, 1e-2, 1e-3}, pts)));
            arr.push_back(limit_json(structure::limit_c_to_inf(structure::LimitScaling{}, pts)));
            return arr;
        });
    }
    return finish(rep);
}

json strip_timing(json report) {
    report.erase("wall_time");
    return report;
}

} // namespace crum::verify
