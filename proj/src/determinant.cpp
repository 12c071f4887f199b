#include "crum/analytic/determinant.hpp"

#include "crum/error.hpp"

#include <cmath>
#include <utility>

namespace crum {

DetResult lu_determinant(Eigen::MatrixXcd a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) {
        throw Error("determinant of a non-square matrix");
    }
    if (n == 0) {
        return {1.0, 1.0};
    }
    const double amax = a.cwiseAbs().maxCoeff();
    cplx det = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        a.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
        p += k;
        if (p != k) {
            a.row(k).swap(a.row(p));
            det = -det;
        }
        const cplx piv = a(k, k);
        det *= piv;
        if (piv == cplx(0.0)) {
            return {0.0, 1.0};
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const cplx m = a(i, k) / piv;
            a.row(i).tail(n - k) -= m * a.row(k).tail(n - k);
        }
    }
    const double umax = a.triangularView<Eigen::Upper>().toDenseMatrix().cwiseAbs().maxCoeff();
    return {det, amax > 0.0 ? umax / amax : 1.0};
}

Jet jet_determinant(std::vector<std::vector<Jet>> m) {
    const size_t n = m.size();
    if (n == 0) {
        throw Error("jet determinant of an empty matrix");
    }
    Jet det = Jet::constant(m[0][0].anchor(), 1.0, m[0][0].order());
    for (size_t k = 0; k < n; ++k) {
        size_t p = k;
        for (size_t i = k + 1; i < n; ++i) {
            if (std::abs(m[i][k].value()) > std::abs(m[p][k].value())) {
                p = i;
            }
        }
        if (p != k) {
            std::swap(m[p], m[k]);
            det = -det;
        }
        if (m[k][k].value() == cplx(0.0)) {
            throw PoleError("singular jet matrix");
        }
        det = det * m[k][k];
        for (size_t i = k + 1; i < n; ++i) {
            const Jet f = m[i][k] / m[k][k];
            for (size_t j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] - f * m[k][j];
            }
        }
    }
    return det;
}

DetResult wronskian_lu(const std::vector<AnalyticFn>& fs, cplx x) {
    const int n = static_cast<int>(fs.size());
    Eigen::MatrixXcd a(n, n);
    for (int k = 0; k < n; ++k) {
        const Jet j = fs[static_cast<size_t>(k)].jet(x, n - 1);
        for (int r = 0; r < n; ++r) {
            a(r, k) = j.derivative_value(r);
        }
    }
    return lu_determinant(std::move(a));
}

cplx wronskian(const std::vector<AnalyticFn>& fs, cplx x) { return wronskian_lu(fs, x).value; }

Jet wronskian_jet(const std::vector<AnalyticFn>& fs, cplx x, int order) {
    const size_t n = fs.size();
    if (n == 0) {
        return Jet::constant(x, 1.0, order);
    }
    std::vector<std::vector<Jet>> m(n, std::vector<Jet>(n));
    for (size_t k = 0; k < n; ++k) {
        Jet d = fs[k].jet(x, order + static_cast<int>(n) - 1);
        for (size_t r = 0; r < n; ++r) {
            m[r][k] = d.truncated(order);
            d = d.derivative();
        }
    }
    return jet_determinant(std::move(m));
}

DetResult casoratian_from_values(const Eigen::MatrixXcd& vals) {
    const Eigen::Index n = vals.rows();
    DetResult r = lu_determinant(vals);
    // i^{n(n-1)/2}
    static const cplx powers[4] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};
    r.value *= powers[(n * (n - 1) / 2) % 4];
    return r;
}

DetResult casoratian_lu(const std::vector<AnalyticFn>& fs, cplx x, double gamma) {
    const int n = static_cast<int>(fs.size());
    Eigen::MatrixXcd a(n, n);
    for (int j = 1; j <= n; ++j) {
        const cplx xj = x + cplx(0.0, (n + 1 - 2 * j) * gamma / 2.0);
        for (int k = 0; k < n; ++k) {
            a(j - 1, k) = fs[static_cast<size_t>(k)](xj);
        }
    }
    return casoratian_from_values(a);
}

cplx casoratian(const std::vector<AnalyticFn>& fs, cplx x, double gamma) {
    return casoratian_lu(fs, x, gamma).value;
}

} // namespace crum
