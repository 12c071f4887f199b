#include "crum/analytic/quadrature.hpp"

#include "crum/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace crum {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Mapped {
    double x;
    double w;
    bool ok;
};

double sigmoid(double v) {
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

struct DeMap {
    DomainKind kind;
    double a, b;
    double tmax;

    Mapped operator()(double t) const {
        const double u = kHalfPi * std::sinh(t);
        const double du = kHalfPi * std::cosh(t);
        switch (kind) {
        case DomainKind::finite: {
            const double len = b - a;
            const double sl = sigmoid(2.0 * u);
            const double sr = sigmoid(-2.0 * u);
            const double x = t < 0.0 ? a + len * sl : b - len * sr;
            const double w = len * 2.0 * sl * sr * du;
            return {x, w, x > a && x < b && w > 0.0};
        }
        case DomainKind::half_line: {
            const double e = std::exp(u);
            return {a + e, e * du, std::isfinite(e) && a + e > a};
        }
        case DomainKind::full_line: {
            const double x = std::sinh(u);
            const double w = std::cosh(u) * du;
            return {x, w, std::isfinite(x) && std::isfinite(w)};
        }
        }
        return {0.0, 0.0, false};
    }
};

std::pair<double, double> endpoints(const QuadratureSpec& q) {
    double a = q.lo + q.margin;
    double b = q.hi - q.margin;
    if (q.kind == DomainKind::finite && !(b > a)) {
        throw DomainError("quadrature interval is empty after the endpoint margin");
    }
    return {a, b};
}

std::vector<QuadratureResult> integrate_de(const VectorIntegrand& f, int count,
                                           const QuadratureSpec& q) {
    auto [a, b] = endpoints(q);
    const DeMap map{q.kind, a, b, 4.0};
    const double tail_from = map.tmax - 0.25;
    const size_t m = static_cast<size_t>(count);

    std::vector<cplx> sum(m, 0.0), prev(m, 0.0), vals(m);
    std::vector<double> mag(m, 0.0), tail(m, 0.0);
    std::vector<QuadratureResult> out(m);
    int evaluations = 0;

    auto accumulate = [&](double t, double h) {
        const Mapped p = map(t);
        if (!p.ok) {
            return;
        }
        f(p.x, vals);
        ++evaluations;
        for (size_t i = 0; i < m; ++i) {
            const cplx c = vals[i] * (p.w * h);
            sum[i] += c;
            mag[i] += std::abs(c);
            if (std::abs(t) > tail_from) {
                tail[i] += std::abs(c);
            }
        }
    };

    const int first_check = q.points > 0 ? q.points : 2;
    double h = 0.5;
    for (int level = 0; level <= q.max_refinements + first_check; ++level) {
        if (level == 0) {
            const int nmax = static_cast<int>(std::floor(map.tmax / h));
            for (int k = -nmax; k <= nmax; ++k) {
                accumulate(k * h, h);
            }
        } else {
            h /= 2.0;
            for (size_t i = 0; i < m; ++i) {
                sum[i] *= 0.5;
                mag[i] *= 0.5;
                tail[i] *= 0.5;
            }
            const int nmax = static_cast<int>(std::floor(map.tmax / h));
            for (int k = -nmax; k <= nmax; ++k) {
                if (k % 2 != 0) {
                    accumulate(k * h, h);
                }
            }
        }
        bool all_done = level >= first_check;
        for (size_t i = 0; i < m; ++i) {
            QuadratureResult& r = out[i];
            r.value = sum[i];
            r.magnitude = mag[i];
            r.error = level == 0 ? mag[i] : std::abs(sum[i] - prev[i]);
            const bool finite = std::isfinite(sum[i].real()) && std::isfinite(sum[i].imag()) &&
                                std::isfinite(mag[i]);
            const double tail_frac = mag[i] > 0.0 ? tail[i] / mag[i] : 0.0;
            r.diverged = !finite || tail_frac > 1e-3;
            const double scale = std::max(mag[i], 1e-300);
            r.converged = !r.diverged && level >= first_check && r.error <= q.tolerance * scale &&
                          tail_frac <= q.tolerance;
            if (!r.converged && !r.diverged) {
                all_done = false;
            }
            prev[i] = sum[i];
        }
        if (all_done) {
            break;
        }
    }
    for (auto& r : out) {
        r.evaluations = evaluations;
    }
    return out;
}

Mapped gl_map(DomainKind kind, double a, double b, double s, double w) {
    switch (kind) {
    case DomainKind::finite:
        return {0.5 * (a + b) + 0.5 * (b - a) * s, 0.5 * (b - a) * w, true};
    case DomainKind::half_line:
        return {a + (1.0 + s) / (1.0 - s), w * 2.0 / ((1.0 - s) * (1.0 - s)), true};
    case DomainKind::full_line:
        return {s / (1.0 - s * s), w * (1.0 + s * s) / ((1.0 - s * s) * (1.0 - s * s)), true};
    }
    return {0.0, 0.0, false};
}

std::vector<QuadratureResult> integrate_gl(const VectorIntegrand& f, int count,
                                           const QuadratureSpec& q) {
    auto [a, b] = endpoints(q);
    const size_t m = static_cast<size_t>(count);
    std::vector<QuadratureResult> out(m);
    std::vector<cplx> prev(m, 0.0), vals(m);
    int n = q.points > 0 ? q.points : 16;
    int evaluations = 0;
    std::vector<double> xs, ws;
    for (int level = 0; level <= q.max_refinements; ++level, n *= 2) {
        gauss_legendre_nodes(n, xs, ws);
        std::vector<cplx> sum(m, 0.0);
        std::vector<double> mag(m, 0.0);
        for (size_t j = 0; j < xs.size(); ++j) {
            const Mapped p = gl_map(q.kind, a, b, xs[j], ws[j]);
            f(p.x, vals);
            ++evaluations;
            for (size_t i = 0; i < m; ++i) {
                sum[i] += vals[i] * p.w;
                mag[i] += std::abs(vals[i]) * p.w;
            }
        }
        bool all_done = level > 0;
        for (size_t i = 0; i < m; ++i) {
            QuadratureResult& r = out[i];
            r.value = sum[i];
            r.magnitude = mag[i];
            r.error = level == 0 ? mag[i] : std::abs(sum[i] - prev[i]);
            r.diverged = !(std::isfinite(sum[i].real()) && std::isfinite(sum[i].imag()));
            r.converged = !r.diverged && level > 0 && r.error <= q.tolerance * std::max(mag[i], 1e-300);
            if (!r.converged && !r.diverged) {
                all_done = false;
            }
            prev[i] = sum[i];
        }
        if (all_done) {
            break;
        }
    }
    for (auto& r : out) {
        r.evaluations = evaluations;
    }
    return out;
}

} // namespace

void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[static_cast<size_t>(i)] = wi;
        w[static_cast<size_t>(n - 1 - i)] = wi;
    }
}

std::vector<QuadratureResult> integrate_many(const VectorIntegrand& f, int count,
                                             const QuadratureSpec& q) {
    if (count <= 0) {
        return {};
    }
    return q.rule == QuadRule::double_exponential ? integrate_de(f, count, q)
                                                  : integrate_gl(f, count, q);
}

QuadratureResult integrate(const std::function<cplx(double)>& f, const QuadratureSpec& q) {
    return integrate_many([&f](double x, std::vector<cplx>& out) { out[0] = f(x); }, 1, q)[0];
}

cplx inner_product(const AnalyticFn& f, const AnalyticFn& g, const QuadratureSpec& q) {
    const QuadratureResult r =
        integrate([&](double x) { return std::conj(f(x)) * g(x); }, q);
    if (!r.converged) {
        std::ostringstream os;
        os << "inner product <" << f.label() << ", " << g.label() << "> "
           << (r.diverged ? "diverges" : "did not converge") << " (error estimate " << r.error
           << ")";
        throw AccuracyError(os.str(), r.value, r.error);
    }
    return r.value;
}

} // namespace crum
