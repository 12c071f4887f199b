#include "crum/verify/oracles.hpp"

#include "crum/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crum {

namespace {

// Eigenvalues of the tridiagonal (diag, constant off-diagonal e) below lambda, by Sturm count.
int count_below(const std::vector<double>& diag, double e, double lambda) {
    int count = 0;
    double d = INFINITY;
    for (double a : diag) {
        d = a - lambda - e * e / d;
        if (d == 0.0) {
            d = -1e-300;
        }
        if (d < 0.0) {
            ++count;
        }
    }
    return count;
}

std::vector<double> fd_eigenvalues(const std::function<double(double)>& u, Interval d, int n, int k) {
    const double h = d.width() / n;
    const double e = -1.0 / (h * h);
    std::vector<double> diag(static_cast<size_t>(n - 1));
    double lo = INFINITY, hi = -INFINITY;
    for (size_t i = 0; i < diag.size(); ++i) {
        const double x = d.lo + static_cast<double>(i + 1) * h;
        const double v = u(x);
        if (!std::isfinite(v)) {
            throw DomainError("potential is not finite at grid point " + std::to_string(x));
        }
        diag[i] = 2.0 / (h * h) + v;
        lo = std::min(lo, diag[i] - 2.0 * std::abs(e));
        hi = std::max(hi, diag[i] + 2.0 * std::abs(e));
    }
    std::vector<double> out(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        double a = j > 0 ? out[static_cast<size_t>(j - 1)] : lo, b = hi;
        while (b - a > 4e-16 * std::max({1.0, std::abs(a), std::abs(b)})) {
            const double c = 0.5 * (a + b);
            if (c == a || c == b) {
                break;
            }
            if (count_below(diag, e, c) > j) {
                b = c;
            } else {
                a = c;
            }
        }
        out[static_cast<size_t>(j)] = 0.5 * (a + b);
    }
    return out;
}

} // namespace

std::vector<double> grid_eigensolve(const std::function<double(double)>& u, Interval domain, int n,
                                    int k, double edge_power) {
    if (n < 200) {
        throw CapabilityError("grid eigensolver needs N >= 200");
    }
    if (!(std::isfinite(domain.lo) && std::isfinite(domain.hi)) || !(domain.hi > domain.lo)) {
        throw DomainError("grid eigensolver needs a finite interval");
    }
    if (k < 1 || k >= n / 2) {
        throw IndexError("grid eigensolver: k out of range");
    }
    auto extrapolate = [](const std::vector<double>& c, const std::vector<double>& f, double p) {
        const double r = std::pow(2.0, p);
        std::vector<double> out(c.size());
        for (size_t i = 0; i < out.size(); ++i) {
            out[i] = (r * f[i] - c[i]) / (r - 1.0);
        }
        return out;
    };
    const auto coarse = fd_eigenvalues(u, domain, n, k);
    const auto fine = fd_eigenvalues(u, domain, 2 * n, k);
    if (!(edge_power > 0.0)) {
        return extrapolate(coarse, fine, 2.0);
    }
    const auto finest = fd_eigenvalues(u, domain, 4 * n, k);
    const double p1 = std::min(2.0, 2.0 * edge_power - 1.0);
    const double p2 = p1 < 2.0 ? 2.0 : std::clamp(2.0 * edge_power - 1.0, 3.0, 4.0);
    return extrapolate(extrapolate(coarse, fine, p1), extrapolate(fine, finest, p1), p2);
}

std::vector<double> grid_eigensolve(const AnalyticFn& u, Interval domain, int n, int k,
                                    double edge_power) {
    return grid_eigensolve([&u](double x) { return u(x).real(); }, domain, n, k, edge_power);
}

GramResult gram_matrix(const std::function<void(double, std::vector<cplx>&)>& vals, int count,
                       const QuadratureSpec& q) {
    const int m = count;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    std::vector<cplx> fv(static_cast<size_t>(m));
    const auto res = integrate_many(
        [&](double x, std::vector<cplx>& out) {
            vals(x, fv);
            for (size_t p = 0; p < pairs.size(); ++p) {
                out[p] = std::conj(fv[static_cast<size_t>(pairs[p].first)]) *
                         fv[static_cast<size_t>(pairs[p].second)];
            }
        },
        static_cast<int>(pairs.size()), q);

    GramResult g;
    g.matrix = Eigen::MatrixXcd::Zero(m, m);
    std::vector<bool> bad(static_cast<size_t>(m), false);
    for (size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        if (i == j && res[p].diverged) {
            bad[static_cast<size_t>(i)] = true;
            g.divergent.push_back(i);
        }
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        if (bad[static_cast<size_t>(i)] || bad[static_cast<size_t>(j)]) {
            continue;
        }
        if (!res[p].converged) {
            std::ostringstream os;
            os << "Gram entry (" << i << "," << j << ") did not converge (error " << res[p].error
               << ")";
            throw AccuracyError(os.str(), res[p].value, res[p].error);
        }
        g.matrix(i, j) = res[p].value;
        g.matrix(j, i) = std::conj(res[p].value);
        g.max_error = std::max(g.max_error, res[p].error);
    }
    g.hermiticity_defect = (g.matrix - g.matrix.adjoint()).cwiseAbs().maxCoeff();
    return g;
}

GramResult gram_matrix(const std::vector<AnalyticFn>& fs, const QuadratureSpec& q) {
    return gram_matrix(
        [&fs](double x, std::vector<cplx>& out) {
            for (size_t i = 0; i < fs.size(); ++i) {
                out[i] = fs[i](x);
            }
        },
        static_cast<int>(fs.size()), q);
}

NodeScan count_nodes(const std::function<double(double)>& f, Interval w, int points) {
    NodeScan scan;
    const double h = w.width() / (points + 1);
    std::vector<double> xs(static_cast<size_t>(points)), vs(static_cast<size_t>(points));
    double vmax = 0.0;
    for (int i = 0; i < points; ++i) {
        xs[static_cast<size_t>(i)] = w.lo + (i + 1) * h;
        vs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
        if (std::isfinite(vs[static_cast<size_t>(i)])) {
            vmax = std::max(vmax, std::abs(vs[static_cast<size_t>(i)]));
        }
    }
    // values at rounding level relative to the peak carry no sign information
    const double floor = kNodeNoiseFloor * vmax;
    double px = 0.0, pv = 0.0;
    bool have = false;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i], v = vs[i];
        if (!(std::abs(v) > floor) || !std::isfinite(v)) {
            continue;
        }
        if (have && (v > 0.0) != (pv > 0.0)) {
            double a = px, b = x, fa = pv;
            for (int it = 0; it < 60 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
                const double c = 0.5 * (a + b);
                const double fc = f(c);
                if (fc == 0.0) {
                    a = b = c;
                    break;
                }
                if ((fc > 0.0) == (fa > 0.0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            scan.locations.push_back(0.5 * (a + b));
            ++scan.count;
        }
        px = x;
        pv = v;
        have = true;
    }
    return scan;
}

} // namespace crum
