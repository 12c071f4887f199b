#include "crum/families/family.hpp"

#include "crum/error.hpp"
#include "crum/verify/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace crum {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

double mag(cplx v) { return std::abs(v); }
double mag(const Jet& v) { return std::abs(v.value()); }

Jet lift(const Jet& x, cplx v) { return Jet::constant(x.anchor(), v, x.order()); }
cplx lift(cplx, cplx v) { return v; }

// ---- Hermite ---------------------------------------------------------------

template <class T>
T hermite_phi(int n, const T& x) {
    using std::exp;
    T h0 = lift(x, 1.0);
    T h1 = x;
    if (n == 0) {
        h1 = h0;
    }
    for (int k = 1; k < n; ++k) {
        T h2 = x * h1 - cplx(0.5 * k) * h0;
        h0 = h1;
        h1 = h2;
    }
    return exp(-0.5 * x * x) * h1;
}

class Hermite final : public OqmFamily {
public:
    Hermite() : OqmFamily(ParamSet{}) {}
    std::string name() const override { return "hermite"; }
    Interval domain() const override { return {-INFINITY, INFINITY}; }
    Interval sample_window() const override { return {-5.0, 5.0}; }
    Interval node_window() const override { return {-8.0, 8.0}; }
    QuadratureSpec gram_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::finite;
        q.lo = -14.0;
        q.hi = 14.0;
        q.tolerance = 1e-12;
        return q;
    }
    QuadratureSpec virtual_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::full_line;
        q.tolerance = 1e-10;
        return q;
    }
    double energy(int n) const override {
        check_index(n);
        return 2.0 * n;
    }
    Jet prepotential_jet(cplx x, int order) const override {
        const Jet t = Jet::variable(x, order);
        return -0.5 * t * t;
    }
    cplx potential_closed(cplx x) const override { return x * x - 1.0; }
    Jet phi_jet(int n, cplx x, int order) const override {
        check_index(n);
        return hermite_phi(n, Jet::variable(x, order));
    }
    AnalyticFn eta() const override {
        return jet_function("eta", [](const Jet& x) { return x; }).with_real(true);
    }
    AnalyticFn virtual_state() const override {
        return jet_function("virtual", [](const Jet& x) { return exp(0.5 * x * x); })
            .with_real(true);
    }
    std::vector<double> shape_params() const override { return {}; }
    std::shared_ptr<const OqmFamily> with_shape_params(const std::vector<double>&) const override {
        return std::make_shared<Hermite>();
    }
};

// ---- Laguerre --------------------------------------------------------------

template <class T>
T laguerre_phi(int n, double g, const T& x) {
    using std::exp;
    using std::pow;
    const double alpha = g - 0.5;
    const T y = x * x;
    T l0 = lift(x, 1.0);
    T l1 = (1.0 + alpha) - y;
    if (n == 0) {
        l1 = l0;
    }
    for (int k = 1; k < n; ++k) {
        T l2 = ((2.0 * k + 1.0 + alpha - y) * l1 - cplx(k + alpha) * l0) / cplx(k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return exp(-0.5 * y) * pow(x, g) * l1;
}

class Laguerre final : public OqmFamily {
public:
    explicit Laguerre(double g) : OqmFamily(ParamSet{{"g", g}}), g_(g) {}
    std::string name() const override { return "laguerre"; }
    Interval domain() const override { return {0.0, INFINITY}; }
    Interval sample_window() const override { return {0.0, 5.0}; }
    Interval node_window() const override { return {0.0, 8.0}; }
    QuadratureSpec gram_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::finite;
        q.lo = 0.0;
        q.hi = 14.0;
        q.tolerance = 1e-12;
        return q;
    }
    QuadratureSpec virtual_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::half_line;
        q.lo = 0.0;
        q.tolerance = 1e-10;
        return q;
    }
    double energy(int n) const override {
        check_index(n);
        return 4.0 * n;
    }
    Jet prepotential_jet(cplx x, int order) const override {
        const Jet t = Jet::variable(x, order);
        return -0.5 * t * t + g_ * log(t);
    }
    cplx potential_closed(cplx x) const override {
        return x * x + g_ * (g_ - 1.0) / (x * x) - (1.0 + 2.0 * g_);
    }
    Jet phi_jet(int n, cplx x, int order) const override {
        check_index(n);
        return laguerre_phi(n, g_, Jet::variable(x, order));
    }
    AnalyticFn eta() const override {
        return jet_function("eta", [](const Jet& x) { return x * x; }).with_real(true);
    }
    AnalyticFn virtual_state() const override {
        const double g = g_;
        return jet_function("virtual", [g](const Jet& x) { return exp(0.5 * x * x) * pow(x, -g); })
            .with_real(true);
    }
    std::vector<double> shape_params() const override { return {g_}; }
    std::shared_ptr<const OqmFamily> with_shape_params(const std::vector<double>& p) const override {
        return std::make_shared<Laguerre>(p.at(0));
    }

private:
    double g_;
};

// ---- Jacobi ----------------------------------------------------------------

template <class T>
T jacobi_phi(int n, double g, const T& x) {
    using std::cos;
    using std::pow;
    using std::sin;
    const double a = g - 0.5;
    const T y = cos(x);
    T p0 = lift(x, 1.0);
    T p1 = (a + 1.0) * y;
    if (n == 0) {
        p1 = p0;
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + 2.0 * a;
        const double num1 = (s + 1.0) * (s + 2.0) * s;
        const double num0 = 2.0 * (k + a) * (k + a) * (s + 2.0);
        const double den = 2.0 * (k + 1.0) * (k + 2.0 * a + 1.0) * s;
        T p2 = (num1 * y * p1 - cplx(num0) * p0) / cplx(den);
        p0 = p1;
        p1 = p2;
    }
    return pow(sin(x), g) * p1;
}

class Jacobi final : public OqmFamily {
public:
    explicit Jacobi(double g) : OqmFamily(ParamSet{{"g", g}}), g_(g) {}
    std::string name() const override { return "jacobi"; }
    Interval domain() const override { return {0.0, kPi}; }
    Interval sample_window() const override { return {0.0, kPi}; }
    Interval node_window() const override { return {0.0, kPi}; }
    QuadratureSpec gram_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::finite;
        q.lo = 0.0;
        q.hi = kPi;
        q.tolerance = 1e-12;
        return q;
    }
    QuadratureSpec virtual_quadrature() const override {
        QuadratureSpec q = gram_quadrature();
        q.tolerance = 1e-10;
        return q;
    }
    double energy(int n) const override {
        check_index(n);
        return n * (n + 2.0 * g_);
    }
    Jet prepotential_jet(cplx x, int order) const override {
        return g_ * log(sin(Jet::variable(x, order)));
    }
    cplx potential_closed(cplx x) const override {
        const cplx s = std::sin(x);
        return g_ * (g_ - 1.0) / (s * s) - g_ * g_;
    }
    Jet phi_jet(int n, cplx x, int order) const override {
        check_index(n);
        return jacobi_phi(n, g_, Jet::variable(x, order));
    }
    AnalyticFn eta() const override {
        return jet_function("eta", [](const Jet& x) { return cos(x); }).with_real(true);
    }
    AnalyticFn virtual_state() const override {
        const double g = g_;
        return jet_function("virtual", [g](const Jet& x) { return pow(sin(x), -g); })
            .with_real(true);
    }
    std::vector<double> shape_params() const override { return {g_}; }
    std::shared_ptr<const OqmFamily> with_shape_params(const std::vector<double>& p) const override {
        return std::make_shared<Jacobi>(p.at(0));
    }

private:
    double g_;
};

// ---- Askey-Wilson ----------------------------------------------------------

template <class T>
T aw_phi0(const T& x, const std::array<cplx, 4>& a, double q) {
    using std::exp;
    using std::sin;
    using std::sqrt;
    const T e = exp(I * x);
    const T ei = 1.0 / e;
    const T e2 = e * e;
    const T ei2 = ei * ei;
    const double big2 = std::max(mag(e2), mag(ei2));
    const double big1 = std::max(mag(e), mag(ei));
    T r = 2.0 * sin(x);
    for (double qk = q; qk * big2 >= 1e-17; qk *= q) {
        r = r * sqrt(1.0 - qk * e2) * sqrt(1.0 - qk * ei2);
    }
    for (const cplx aj : a) {
        for (cplx t = aj; std::abs(t) * big1 >= 1e-17; t *= q) {
            r = r / (sqrt(1.0 - t * e) * sqrt(1.0 - t * ei));
        }
    }
    return r;
}

class AskeyWilson final : public DqmFamily {
public:
    AskeyWilson(std::string name, std::array<cplx, 4> a, double q, ParamSet params, double strip)
        : DqmFamily(std::move(params), strip), name_(std::move(name)), a_(a), q_(q) {
        e1_ = a[0] + a[1] + a[2] + a[3];
        e3_ = a[0] * a[1] * a[2] + a[0] * a[1] * a[3] + a[0] * a[2] * a[3] + a[1] * a[2] * a[3];
        e4_ = a[0] * a[1] * a[2] * a[3];
        for (int n = 0; n <= kTabulatedN + 1; ++n) {
            rec_.push_back(compute_recurrence(n));
        }
    }

    std::string name() const override { return name_; }
    double gamma() const override { return std::log(q_); }
    Interval domain() const override { return {0.0, kPi}; }
    Interval sample_window() const override { return {0.0, kPi}; }
    Interval node_window() const override { return {0.0, kPi}; }
    QuadratureSpec gram_quadrature() const override {
        QuadratureSpec q;
        q.kind = DomainKind::finite;
        q.lo = 0.0;
        q.hi = kPi;
        q.margin = 1e-6;
        q.tolerance = 1e-12;
        return q;
    }
    QuadratureSpec virtual_quadrature() const override {
        QuadratureSpec q = gram_quadrature();
        q.tolerance = 1e-10;
        return q;
    }

    double energy(int n) const override {
        check_index(n);
        return ((std::pow(q_, -n) - 1.0) * (1.0 - e4_ * std::pow(q_, n - 1))).real();
    }

    cplx v(cplx x) const override {
        const cplx e = std::exp(I * x);
        cplx num = 1.0;
        for (const cplx aj : a_) {
            num *= 1.0 - aj * e;
        }
        return num / ((1.0 - e * e) * (1.0 - q_ * e * e));
    }

    cplx sqrt_v(cplx x) const override {
        const cplx e = std::exp(I * x);
        cplx num = 1.0;
        for (const cplx aj : a_) {
            if (aj != cplx(0.0)) {
                num *= std::sqrt(1.0 - aj * e);
            }
        }
        return num / (std::sqrt(1.0 - e * e) * std::sqrt(1.0 - q_ * e * e));
    }

    cplx phi_raw(int n, cplx x) const override {
        check_index(n);
        return aw_phi0(x, a_, q_) * poly(n, std::cos(x));
    }
    cplx eta_raw(cplx x) const override { return std::cos(x); }
    std::pair<double, double> recurrence(int n) const override {
        return rec_.at(static_cast<size_t>(n));
    }

    AnalyticFn virtual_state() const override {
        auto sh = std::static_pointer_cast<const AskeyWilson>(shifted_for_virtual());
        AnalyticFn f("virtual", [sh](cplx x) { return std::sin(x) / aw_phi0(x, sh->a_, sh->q_); },
                     strip_);
        f.with_jet([sh](cplx x, int k) {
            const Jet t = Jet::variable(x, k);
            return sin(t) / aw_phi0(t, sh->a_, sh->q_);
        });
        return f.with_real(true);
    }

    std::vector<cplx> shape_params() const override {
        if (name_ == "q_hermite") {
            return {};
        }
        return {a_.begin(), a_.end()};
    }

    std::shared_ptr<const DqmFamily> with_shape_params(const std::vector<cplx>& p) const override {
        std::array<cplx, 4> a{};
        for (size_t k = 0; k < std::min<size_t>(4, p.size()); ++k) {
            a[k] = p[k];
        }
        ParamSet ps;
        if (name_ != "q_hermite") {
            for (int k = 0; k < 4; ++k) {
                ps.set("a" + std::to_string(k + 1), a[static_cast<size_t>(k)]);
            }
        }
        ps.set("q", q_);
        return std::make_shared<AskeyWilson>(name_, a, q_, ps, strip_);
    }

    std::shared_ptr<const DqmFamily> shifted_for_virtual() const override {
        std::vector<cplx> p(a_.begin(), a_.end());
        for (auto& v : p) {
            v *= std::pow(q_, virtual_delta());
        }
        return with_shape_params(p);
    }
    double virtual_delta() const override { return 0.5; }

    Jet phi_jet(int n, cplx x, int order) const override {
        check_index(n);
        const Jet t = Jet::variable(x, order);
        return aw_phi0(t, a_, q_) * poly(n, cos(t));
    }

private:
    template <class T>
    T poly(int n, const T& y) const {
        T p0 = lift(y, 1.0);
        if (n == 0) {
            return p0;
        }
        T p1 = y - rec_[0].first;
        for (int k = 1; k < n; ++k) {
            const auto [b, c] = rec_[static_cast<size_t>(k)];
            T p2 = (y - b) * p1 - c * p0;
            p0 = p1;
            p1 = p2;
        }
        return p1;
    }

    std::pair<double, double> compute_recurrence(int n) const {
        const double q = q_;
        const double Q = std::pow(q, n);
        const cplx b = 0.5 * Q *
                       (-Q * Q * e4_ * (e3_ + q * e1_) + Q * (1.0 + q) * (e4_ * e1_ + q * e3_) -
                        q * (e3_ + q * e1_)) /
                       ((q * q - Q * Q * e4_) * (Q * Q * e4_ - 1.0));
        if (n == 0) {
            return {b.real(), 0.0};
        }
        const auto& [a0, a1, a2, a3] = a_;
        const double Qm = std::pow(q, n - 1);
        const cplx num = (1.0 - a0 * a1 * Qm) * (1.0 - a0 * a2 * Qm) * (1.0 - a0 * a3 * Qm) *
                         (1.0 - e4_ * std::pow(q, n - 2)) * (1.0 - Q) * (1.0 - a1 * a2 * Qm) *
                         (1.0 - a1 * a3 * Qm) * (1.0 - a2 * a3 * Qm);
        const cplx den = (1.0 - e4_ * std::pow(q, 2 * n - 3)) *
                         (1.0 - e4_ * std::pow(q, 2 * n - 2)) *
                         (1.0 - e4_ * std::pow(q, 2 * n - 2)) * (1.0 - e4_ * std::pow(q, 2 * n - 1));
        return {b.real(), 0.25 * (num / den).real()};
    }

    std::string name_;
    std::array<cplx, 4> a_;
    double q_;
    cplx e1_, e3_, e4_;
    std::vector<std::pair<double, double>> rec_;
};

// ---- validation --------------------------------------------------------------

std::vector<double> probe_points(Interval w, int count) {
    const double lo = w.lo + 0.05 * w.width();
    const double len = 0.9 * w.width();
    std::vector<double> xs;
    for (int k = 0; k < count; ++k) {
        xs.push_back(lo + len * (k + 0.5) / count);
    }
    return xs;
}

void require(bool ok, const std::string& family, const std::string& what) {
    if (!ok) {
        throw ParameterError(family + ": constraint violated: " + what);
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<FamilyCheck> oqm_checks(const OqmFamily& f) {
    std::vector<FamilyCheck> out;
    const auto xs = probe_points(f.sample_window(), 20);
    double r = 0.0;
    for (double x : xs) {
        const Jet w = f.prepotential_jet(x, 2);
        const cplx u = w.derivative_value(1) * w.derivative_value(1) + w.derivative_value(2);
        const cplx uc = f.potential_closed(x);
        r = std::max(r, std::abs(u - uc) / (1.0 + std::abs(uc)));
    }
    out.push_back({"potential_from_prepotential", r, 1e-10, r <= 1e-10});

    double worst = INFINITY;
    for (double x : probe_points(f.node_window(), 400)) {
        worst = std::min(worst, f.phi_jet(0, x, 0).value().real());
    }
    out.push_back({"ground_state_positive", worst, 0.0, worst > 0.0});

    Interval grid = f.domain();
    if (f.name() == "hermite") {
        grid = {-10.0, 10.0};
    } else if (f.name() == "laguerre") {
        grid = {0.0, 10.0};
    }
    const auto u = f.potential();
    const auto sp = f.shape_params();
    const auto ev = grid_eigensolve(u, grid, 2000, 6, sp.empty() ? 0.0 : sp.front());
    double de = 0.0;
    for (int n = 0; n < 6; ++n) {
        de = std::max(de, std::abs(ev[static_cast<size_t>(n)] - f.energy(n)));
    }
    out.push_back({"energy_oracle", de, 1e-5, de <= 1e-5});
    return out;
}

std::vector<FamilyCheck> dqm_checks(const DqmFamily& f) {
    std::vector<FamilyCheck> out;
    const double g = f.gamma();
    const auto xs = probe_points(f.domain(), 20);
    double zr = 0.0, rr = 0.0, vr = 0.0;
    for (double x : xs) {
        const cplx xm = x - I * g / 2.0, xp = x + I * g / 2.0;
        const cplx a = I * (f.sqrt_v_star(xm) * f.phi_raw(0, xm) - f.sqrt_v(xp) * f.phi_raw(0, xp));
        zr = std::max(zr, std::abs(a));
        const cplx s = f.v(x) + f.v_star(x);
        vr = std::max(vr, std::abs(s.imag()) / (1.0 + std::abs(s)));
        for (int n = 0; n <= 5; ++n) {
            const cplx p = f.phi_raw(n, x);
            rr = std::max(rr, std::abs(p.imag()) / (1.0 + std::abs(p)));
        }
    }
    out.push_back({"zero_mode", zr, 1e-10, zr <= 1e-10});
    out.push_back({"v_plus_vstar_real", vr, 1e-12, vr <= 1e-12});
    out.push_back({"eigenfunctions_real", rr, 1e-12, rr <= 1e-12});

    double worst = INFINITY;
    for (double x : probe_points(f.domain(), 400)) {
        worst = std::min(worst, f.phi_raw(0, x).real());
    }
    out.push_back({"ground_state_positive", worst, 0.0, worst > 0.0});

    const auto pts = probe_points(f.domain(), 10);
    double de = 0.0;
    for (int n = 0; n <= 5; ++n) {
        const AnalyticFn pn = f.phi(n);
        cplx num = 0.0;
        double den = 0.0;
        for (double x : pts) {
            const cplx p = pn(x);
            num += std::conj(p) * f.hamiltonian(pn, x);
            den += std::norm(p);
        }
        const double efit = num.real() / den;
        de = std::max(de, std::abs(efit - f.energy(n)) / std::max(1.0, std::abs(f.energy(n))));
    }
    out.push_back({"energy_oracle", de, 1e-8, de <= 1e-8});
    return out;
}

void run_validation(const Family& f) {
    for (const auto& c : family_self_check(f)) {
        if (!c.pass) {
            throw AccuracyError(f.name() + ": self-consistency check '" + c.name +
                                    "' failed (residual " + fmt(c.residual) + ")",
                                c.residual, c.tolerance);
        }
    }
}

std::array<cplx, 4> aw_params(const ParamSet& p, bool named_a) {
    std::array<cplx, 4> a{};
    if (!named_a) {
        return a;
    }
    for (int k = 0; k < 4; ++k) {
        a[static_cast<size_t>(k)] = p.get_or("a" + std::to_string(k + 1), 0.0);
    }
    return a;
}

void check_known(const std::string& family, const ParamSet& p,
                 const std::vector<std::string>& allowed) {
    for (const auto& [k, v] : p.entries()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw ParameterError(family + ": unknown parameter '" + k + "'");
        }
    }
}

} // namespace

// ---- Family ------------------------------------------------------------------

void Family::check_index(int n) const {
    if (n < 0 || n > kTabulatedN) {
        throw IndexError(name() + ": index n=" + std::to_string(n) + " outside 0.." +
                         std::to_string(kTabulatedN));
    }
}

double Family::norm(int n) const {
    check_index(n);
    {
        std::lock_guard lock(norm_mutex_);
        if (static_cast<size_t>(n) < norms_.size() && norms_[static_cast<size_t>(n)] > 0.0) {
            return norms_[static_cast<size_t>(n)];
        }
    }
    const AnalyticFn p = phi(n);
    const cplx h = inner_product(p, p, gram_quadrature());
    std::lock_guard lock(norm_mutex_);
    if (norms_.size() <= static_cast<size_t>(n)) {
        norms_.resize(static_cast<size_t>(n) + 1, 0.0);
    }
    norms_[static_cast<size_t>(n)] = h.real();
    return h.real();
}

nlohmann::json Family::descriptor(int nmax) const {
    const Interval d = domain();
    auto bound = [](double v) -> nlohmann::json {
        if (std::isinf(v)) {
            return v > 0 ? "inf" : "-inf";
        }
        return v;
    };
    return {{"name", name()},
            {"params", params().to_json()},
            {"gamma", gamma()},
            {"domain", nlohmann::json::array({bound(d.lo), bound(d.hi)})},
            {"nmax", nmax}};
}

// ---- OqmFamily ---------------------------------------------------------------

Jet OqmFamily::wprime_jet(cplx x, int order) const {
    return prepotential_jet(x, order + 1).derivative();
}

AnalyticFn OqmFamily::prepotential() const {
    auto self = this->self<OqmFamily>();
    return AnalyticFn::from_jet("W", [self](cplx x, int k) { return self->prepotential_jet(x, k); })
        .with_real(true);
}

AnalyticFn OqmFamily::potential() const {
    auto self = this->self<OqmFamily>();
    return AnalyticFn::from_jet("U",
                                [self](cplx x, int k) {
                                    const Jet w = self->prepotential_jet(x, k + 2);
                                    const Jet d1 = w.derivative();
                                    return d1 * d1 + d1.derivative();
                                })
        .with_real(true);
}

AnalyticFn OqmFamily::phi(int n) const {
    check_index(n);
    auto self = this->self<OqmFamily>();
    return AnalyticFn::from_jet("phi_" + std::to_string(n),
                                [self, n](cplx x, int k) { return self->phi_jet(n, x, k); })
        .with_real(true);
}

// ---- DqmFamily ---------------------------------------------------------------

AnalyticFn DqmFamily::v_fn() const {
    auto self = this->self<DqmFamily>();
    return AnalyticFn("V", [self](cplx x) { return self->v(x); }, strip_);
}

AnalyticFn DqmFamily::v_star_fn() const {
    auto self = this->self<DqmFamily>();
    return AnalyticFn("V*", [self](cplx x) { return self->v_star(x); }, strip_);
}

AnalyticFn DqmFamily::phi(int n) const {
    check_index(n);
    auto self = this->self<DqmFamily>();
    AnalyticFn f("phi_" + std::to_string(n), [self, n](cplx x) { return self->phi_raw(n, x); },
                 strip_);
    f.with_jet([self, n](cplx x, int k) { return self->phi_jet(n, x, k); });
    return f.with_real(true);
}

AnalyticFn DqmFamily::eta() const {
    auto self = this->self<DqmFamily>();
    AnalyticFn f("eta", [self](cplx x) { return self->eta_raw(x); }, INFINITY);
    f.with_jet([](cplx x, int k) { return cos(Jet::variable(x, k)); });
    return f.with_real(true);
}

cplx DqmFamily::hamiltonian(const AnalyticFn& f, cplx x) const {
    const double g = gamma();
    const cplx s = sqrt_v(x), ss = sqrt_v_star(x);
    const cplx xm = x - I * g, xp = x + I * g;
    return s * sqrt_v_star(xm) * f(xm) + ss * sqrt_v(xp) * f(xp) - (v(x) + v_star(x)) * f(x);
}

// ---- catalog -----------------------------------------------------------------

std::vector<FamilyInfo> family_catalog() {
    return {
        {"hermite", "oqm", "(none)", "none"},
        {"laguerre", "oqm", "g", "g > 1"},
        {"jacobi", "oqm", "g", "g > 1"},
        {"q_hermite", "dqm", "q", "0 < q < 1"},
        {"askey_wilson", "dqm", "a1,a2,a3,a4,q",
         "0 < q < 1, |a_j| < 1, {a_j*} = {a_j} as a set"},
    };
}

OqmFamilyPtr make_oqm_family(const std::string& name, const ParamSet& p, const FamilyOptions& opts) {
    std::shared_ptr<const OqmFamily> f;
    if (name == "hermite") {
        check_known(name, p, {});
        f = std::make_shared<Hermite>();
    } else if (name == "laguerre" || name == "jacobi") {
        check_known(name, p, {"g"});
        const double g = p.get_real("g");
        require(g > 1.0 && std::isfinite(g), name, "g > 1 (got g=" + fmt(g) + ")");
        if (name == "laguerre") {
            f = std::make_shared<Laguerre>(g);
        } else {
            f = std::make_shared<Jacobi>(g);
        }
    } else {
        throw ParameterError("unknown ordinary family '" + name + "'");
    }
    if (opts.validate) {
        run_validation(*f);
    }
    return f;
}

DqmFamilyPtr make_dqm_family(const std::string& name, const ParamSet& p, const FamilyOptions& opts) {
    const bool aw = name == "askey_wilson";
    if (!aw && name != "q_hermite") {
        throw ParameterError("unknown discrete family '" + name + "'");
    }
    check_known(name, p, aw ? std::vector<std::string>{"a1", "a2", "a3", "a4", "q"}
                            : std::vector<std::string>{"q"});
    const double q = p.get_real("q");
    require(q > 0.0 && q < 1.0, name, "0 < q < 1 (got q=" + fmt(q) + ")");
    const auto a = aw_params(p, aw);
    ParamSet ps;
    for (int k = 0; k < 4 && aw; ++k) {
        const cplx ak = a[static_cast<size_t>(k)];
        require(std::abs(ak) < 1.0, name,
                "|a" + std::to_string(k + 1) + "| < 1 (got |a" + std::to_string(k + 1) +
                    "|=" + fmt(std::abs(ak)) + ")");
        ps.set("a" + std::to_string(k + 1), ak);
    }
    if (aw) {
        // conjugation closure as a set: greedy matching of each a_j* to an unused a_k
        std::array<bool, 4> used{};
        for (int j = 0; j < 4; ++j) {
            int best = -1;
            double bd = INFINITY;
            for (int k = 0; k < 4; ++k) {
                const double d = std::abs(std::conj(a[static_cast<size_t>(j)]) - a[static_cast<size_t>(k)]);
                if (!used[static_cast<size_t>(k)] && d < bd) {
                    bd = d;
                    best = k;
                }
            }
            require(bd <= 1e-9, name, "{a1*,...,a4*} = {a1,...,a4} as a set");
            used[static_cast<size_t>(best)] = true;
        }
    }
    ps.set("q", q);
    const double strip = std::abs(std::log(q)) * (opts.depth + 1);
    auto f = std::make_shared<AskeyWilson>(name, a, q, ps, strip);
    if (opts.validate) {
        run_validation(*f);
    }
    return f;
}

FamilyPtr make_family(const std::string& name, const ParamSet& params, const FamilyOptions& opts) {
    if (name == "hermite" || name == "laguerre" || name == "jacobi") {
        return make_oqm_family(name, params, opts);
    }
    if (name == "q_hermite" || name == "askey_wilson") {
        return make_dqm_family(name, params, opts);
    }
    throw ParameterError("unknown family '" + name +
                         "' (expected hermite, laguerre, jacobi, q_hermite, askey_wilson)");
}

cplx family_eval(const Family& fam, FamilyPart part, int n, cplx x) {
    switch (part) {
    case FamilyPart::energy:
        return fam.energy(n);
    case FamilyPart::phi0:
        return fam.phi(0)(x);
    case FamilyPart::phi_n:
        return fam.phi(n)(x);
    case FamilyPart::eta:
        return fam.eta()(x);
    case FamilyPart::V:
    case FamilyPart::Vstar:
        if (auto d = dynamic_cast<const DqmFamily*>(&fam)) {
            return part == FamilyPart::V ? d->v_fn()(x) : d->v_star_fn()(x);
        }
        if (auto o = dynamic_cast<const OqmFamily*>(&fam)) {
            if (part == FamilyPart::V) {
                return o->potential()(x);
            }
            return std::conj(o->potential()(std::conj(x)));
        }
        break;
    }
    throw CapabilityError("family part not available");
}

std::vector<FamilyCheck> family_self_check(const Family& fam) {
    if (auto o = dynamic_cast<const OqmFamily*>(&fam)) {
        return oqm_checks(*o);
    }
    return dqm_checks(dynamic_cast<const DqmFamily&>(fam));
}

} // namespace crum
