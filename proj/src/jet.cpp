#include "crum/analytic/jet.hpp"

#include "crum/error.hpp"

#include <algorithm>
#include <utility>

namespace crum {

Jet::Jet(cplx anchor, std::vector<cplx> coeffs) : anchor_(anchor), c_(std::move(coeffs)) {
    if (c_.empty()) {
        throw Error("Jet needs at least one coefficient");
    }
}

Jet Jet::constant(cplx anchor, cplx v, int order) {
    std::vector<cplx> c(static_cast<size_t>(order) + 1, cplx(0.0));
    c[0] = v;
    return Jet(anchor, std::move(c));
}

Jet Jet::variable(cplx anchor, int order) {
    std::vector<cplx> c(static_cast<size_t>(order) + 1, cplx(0.0));
    c[0] = anchor;
    if (order >= 1) {
        c[1] = 1.0;
    }
    return Jet(anchor, std::move(c));
}

cplx Jet::derivative_value(int k) const {
    double f = 1.0;
    for (int j = 2; j <= k; ++j) {
        f *= j;
    }
    return c_[static_cast<size_t>(k)] * f;
}

Jet Jet::derivative() const {
    if (order() == 0) {
        return Jet(anchor_, {cplx(0.0)});
    }
    std::vector<cplx> d(c_.size() - 1);
    for (size_t k = 0; k < d.size(); ++k) {
        d[k] = c_[k + 1] * static_cast<double>(k + 1);
    }
    return Jet(anchor_, std::move(d));
}

Jet Jet::truncated(int order) const {
    const size_t n = std::min(c_.size(), static_cast<size_t>(order) + 1);
    return Jet(anchor_, std::vector<cplx>(c_.begin(), c_.begin() + static_cast<long>(n)));
}

Jet Jet::scaled(cplx s) const {
    Jet r = *this;
    cplx p = 1.0;
    for (auto& v : r.c_) {
        v *= p;
        p *= s;
    }
    return r;
}

cplx Jet::evaluate(cplx h) const {
    cplx r = 0.0;
    for (size_t k = c_.size(); k-- > 0;) {
        r = r * h + c_[k];
    }
    return r;
}

Jet Jet::conjugated() const {
    Jet r = *this;
    r.anchor_ = std::conj(anchor_);
    for (auto& v : r.c_) {
        v = std::conj(v);
    }
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) {
        v = -v;
    }
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    c_.resize(std::min(c_.size(), o.c_.size()));
    for (size_t k = 0; k < c_.size(); ++k) {
        c_[k] += o.c_[k];
    }
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    c_.resize(std::min(c_.size(), o.c_.size()));
    for (size_t k = 0; k < c_.size(); ++k) {
        c_[k] -= o.c_[k];
    }
    return *this;
}

Jet& Jet::operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
}

Jet& Jet::operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
}

Jet& Jet::operator+=(cplx v) {
    c_[0] += v;
    return *this;
}

Jet& Jet::operator-=(cplx v) {
    c_[0] -= v;
    return *this;
}

Jet& Jet::operator*=(cplx v) {
    for (auto& x : c_) {
        x *= v;
    }
    return *this;
}

Jet& Jet::operator/=(cplx v) {
    for (auto& x : c_) {
        x /= v;
    }
    return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order());
    std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0));
    for (int k = 0; k <= n; ++k) {
        cplx s = 0.0;
        for (int j = 0; j <= k; ++j) {
            s += a[j] * b[k - j];
        }
        c[static_cast<size_t>(k)] = s;
    }
    return Jet(a.anchor(), std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
    if (b[0] == cplx(0.0)) {
        throw PoleError("jet division by a function vanishing at the anchor");
    }
    const int n = std::min(a.order(), b.order());
    std::vector<cplx> c(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        cplx s = a[k];
        for (int j = 1; j <= k; ++j) {
            s -= b[j] * c[static_cast<size_t>(k - j)];
        }
        c[static_cast<size_t>(k)] = s / b[0];
    }
    return Jet(a.anchor(), std::move(c));
}

Jet operator+(Jet a, cplx v) { return a += v; }
Jet operator+(cplx v, Jet a) { return a += v; }
Jet operator-(Jet a, cplx v) { return a -= v; }
Jet operator-(cplx v, const Jet& a) { return (-a) += v; }
Jet operator*(Jet a, cplx v) { return a *= v; }
Jet operator*(cplx v, Jet a) { return a *= v; }
Jet operator/(Jet a, cplx v) { return a /= v; }

Jet operator/(cplx v, const Jet& a) {
    return Jet::constant(a.anchor(), v, a.order()) / a;
}

Jet exp(const Jet& a) {
    const int n = a.order();
    std::vector<cplx> b(static_cast<size_t>(n) + 1);
    b[0] = std::exp(a[0]);
    for (int k = 1; k <= n; ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) {
            s += static_cast<double>(j) * a[j] * b[static_cast<size_t>(k - j)];
        }
        b[static_cast<size_t>(k)] = s / static_cast<double>(k);
    }
    return Jet(a.anchor(), std::move(b));
}

Jet log(const Jet& a) {
    if (a[0] == cplx(0.0)) {
        throw PoleError("log of a jet vanishing at the anchor");
    }
    const int n = a.order();
    std::vector<cplx> b(static_cast<size_t>(n) + 1);
    b[0] = std::log(a[0]);
    for (int k = 1; k <= n; ++k) {
        cplx s = 0.0;
        for (int j = 1; j < k; ++j) {
            s += static_cast<double>(j) * b[static_cast<size_t>(j)] * a[k - j];
        }
        b[static_cast<size_t>(k)] = (a[k] - s / static_cast<double>(k)) / a[0];
    }
    return Jet(a.anchor(), std::move(b));
}

Jet pow(const Jet& a, double p) {
    const int n = a.order();
    std::vector<cplx> b(static_cast<size_t>(n) + 1, cplx(0.0));
    if (a[0] == cplx(0.0)) {
        if (p == 0.0) {
            b[0] = 1.0;
            return Jet(a.anchor(), std::move(b));
        }
        throw PoleError("power of a jet vanishing at the anchor");
    }
    b[0] = std::pow(a[0], p);
    for (int k = 1; k <= n; ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) {
            s += (p * j - (k - j)) * a[j] * b[static_cast<size_t>(k - j)];
        }
        b[static_cast<size_t>(k)] = s / (static_cast<double>(k) * a[0]);
    }
    return Jet(a.anchor(), std::move(b));
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

namespace {

std::pair<Jet, Jet> sincos(const Jet& a) {
    const int n = a.order();
    std::vector<cplx> s(static_cast<size_t>(n) + 1), c(static_cast<size_t>(n) + 1);
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= n; ++k) {
        cplx ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += static_cast<double>(j) * a[j] * c[static_cast<size_t>(k - j)];
            cc -= static_cast<double>(j) * a[j] * s[static_cast<size_t>(k - j)];
        }
        s[static_cast<size_t>(k)] = ss / static_cast<double>(k);
        c[static_cast<size_t>(k)] = cc / static_cast<double>(k);
    }
    return {Jet(a.anchor(), std::move(s)), Jet(a.anchor(), std::move(c))};
}

} // namespace

Jet sin(const Jet& a) { return sincos(a).first; }
Jet cos(const Jet& a) { return sincos(a).second; }

} // namespace crum
