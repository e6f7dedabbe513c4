#pragma once

#include <cmath>
#include <vector>

#include "zkflat/error.hpp"

namespace zkflat {

/// Univariate truncated Taylor series (jet): c[k] = f^(k)(x0) / k!.
///
/// Arithmetic propagates all coefficients up to the jet's degree, which gives
/// derivatives of exp/power/quotient compositions exact to roundoff.
class Jet {
public:
    Jet() = default;
    Jet(int degree, double value) : c_(static_cast<size_t>(degree) + 1, 0.0) { c_[0] = value; }

    /// Jet of the identity t -> t0 + (t - t0), optionally scaled (chain rule
    /// for affine arguments: inner_slope = d(arg)/dt).
    static Jet variable(int degree, double value, double inner_slope = 1.0) {
        Jet j(degree, value);
        if (degree >= 1) j.c_[1] = inner_slope;
        return j;
    }

    static Jet constant(int degree, double value) { return Jet(degree, value); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double value() const { return c_[0]; }
    double coeff(int k) const { return c_[static_cast<size_t>(k)]; }
    double& coeff(int k) { return c_[static_cast<size_t>(k)]; }

    /// k-th derivative: c[k] * k!.
    double derivative(int k) const {
        require(k <= degree(), "jet: derivative order exceeds degree");
        double f = 1.0;
        for (int m = 2; m <= k; ++m) f *= m;
        return c_[static_cast<size_t>(k)] * f;
    }

    bool finite() const {
        for (double v : c_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet out = a;
        for (int k = 0; k <= out.degree(); ++k) out.c_[k] += b.c_[k];
        return out;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet out = a;
        for (int k = 0; k <= out.degree(); ++k) out.c_[k] -= b.c_[k];
        return out;
    }
    friend Jet operator-(const Jet& a) {
        Jet out = a;
        for (double& v : out.c_) v = -v;
        return out;
    }
    friend Jet operator*(const Jet& a, double s) {
        Jet out = a;
        for (double& v : out.c_) v *= s;
        return out;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator+(const Jet& a, double s) {
        Jet out = a;
        out.c_[0] += s;
        return out;
    }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const int d = a.degree();
        Jet out(d, 0.0);
        for (int k = 0; k <= d; ++k) {
            double acc = 0.0;
            for (int m = 0; m <= k; ++m) acc += a.c_[m] * b.c_[k - m];
            out.c_[k] = acc;
        }
        return out;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        require(b.c_[0] != 0.0, "jet: division by zero value");
        const int d = a.degree();
        Jet out(d, 0.0);
        const double inv = 1.0 / b.c_[0];
        for (int k = 0; k <= d; ++k) {
            double acc = a.c_[k];
            for (int m = 1; m <= k; ++m) acc -= b.c_[m] * out.c_[k - m];
            out.c_[k] = acc * inv;
        }
        return out;
    }

private:
    std::vector<double> c_;
};

/// exp(u) by the standard convolution recurrence.
inline Jet jet_exp(const Jet& u) {
    const int d = u.degree();
    Jet out(d, std::exp(u.value()));
    for (int k = 1; k <= d; ++k) {
        double acc = 0.0;
        for (int m = 1; m <= k; ++m) acc += m * u.coeff(m) * out.coeff(k - m);
        out.coeff(k) = acc / k;
    }
    return out;
}

/// u^alpha for real alpha; requires u(x0) > 0.
inline Jet jet_pow(const Jet& u, double alpha) {
    require(u.value() > 0.0, "jet: pow needs positive base value");
    const int d = u.degree();
    Jet out(d, std::pow(u.value(), alpha));
    const double inv_u0 = 1.0 / u.value();
    for (int k = 1; k <= d; ++k) {
        double acc = 0.0;
        for (int m = 1; m <= k; ++m)
            acc += ((alpha + 1.0) * m - k) * u.coeff(m) * out.coeff(k - m);
        out.coeff(k) = acc * inv_u0 / k;
    }
    return out;
}

} // namespace zkflat
