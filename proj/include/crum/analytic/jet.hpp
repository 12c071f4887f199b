#pragma once

#include <complex>
#include <vector>

namespace crum {

using cplx = std::complex<double>;

/// Truncated Taylor series c_0 + c_1 t + ... + c_K t^K of a function about `anchor`,
/// with c_k = f^(k)(anchor) / k!.
///
/// Binary operations truncate to the smaller order of the two operands.
class Jet {
public:
    Jet() : anchor_(0.0), c_(1, cplx(0.0)) {}
    Jet(cplx anchor, std::vector<cplx> coeffs);

    /// Jet of the constant function v.
    static Jet constant(cplx anchor, cplx v, int order);
    /// Jet of the identity function x -> x.
    static Jet variable(cplx anchor, int order);

    cplx anchor() const { return anchor_; }
    int order() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx operator[](int k) const { return c_[static_cast<size_t>(k)]; }
    cplx& operator[](int k) { return c_[static_cast<size_t>(k)]; }

    cplx value() const { return c_[0]; }
    /// k-th derivative at the anchor, c_k k!.
    cplx derivative_value(int k) const;

    /// Jet of f' with order reduced by one (order 0 gives the zero jet).
    Jet derivative() const;
    Jet truncated(int order) const;
    /// Jet of t -> f(anchor + s t) in the variable t, i.e. coefficients c_k s^k.
    Jet scaled(cplx s) const;
    /// Evaluates the polynomial at anchor + h.
    cplx evaluate(cplx h) const;
    /// Coefficients of the conjugate function f* about conj(anchor).
    Jet conjugated() const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator+=(cplx v);
    Jet& operator-=(cplx v);
    Jet& operator*=(cplx v);
    Jet& operator/=(cplx v);

private:
    cplx anchor_;
    std::vector<cplx> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, cplx v);
Jet operator+(cplx v, Jet a);
Jet operator-(Jet a, cplx v);
Jet operator-(cplx v, const Jet& a);
Jet operator*(Jet a, cplx v);
Jet operator*(cplx v, Jet a);
Jet operator/(Jet a, cplx v);
Jet operator/(cplx v, const Jet& a);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

} // namespace crum
