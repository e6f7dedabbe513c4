#include "zkflat/gevrey.hpp"

#include <cmath>

namespace zkflat {

double factorial(int n) {
    require(n >= 0 && n <= 170, "factorial: out of double range");
    double f = 1.0;
    for (int m = 2; m <= n; ++m) f *= m;
    return f;
}

double binomial(int n, int k) {
    require(k >= 0 && k <= n, "binomial: invalid arguments");
    k = std::min(k, n - k);
    double acc = 1.0;
    for (int m = 1; m <= k; ++m) acc = acc * (n - k + m) / m;
    return acc;
}

double bump(const BumpParams& p, double rho) {
    if (rho <= 0.0) return 1.0;
    if (rho >= 1.0) return 0.0;
    const double sig = p.sigma();
    // phi = 1 / (1 + e^w), w = M((1-rho)^-sigma - rho^-sigma); evaluate the
    // branch that keeps the exponential below 1.
    const double w = p.steepness * (std::pow(1.0 - rho, -sig) - std::pow(rho, -sig));
    if (w <= 0.0) return 1.0 / (1.0 + std::exp(w));
    const double v = std::exp(-w);
    return v / (1.0 + v);
}

Jet bump_jet(const BumpParams& p, const Jet& rho) {
    const int deg = rho.degree();
    const double r0 = rho.value();
    if (r0 <= 0.0) return Jet::constant(deg, 1.0);
    if (r0 >= 1.0) return Jet::constant(deg, 0.0);
    const double sig = p.sigma();
    const Jet w = p.steepness * (jet_pow(1.0 - rho, -sig) - jet_pow(rho, -sig));
    Jet out;
    if (w.value() <= 0.0) {
        out = Jet::constant(deg, 1.0) / (jet_exp(w) + 1.0);
    } else {
        const Jet v = jet_exp(-w);
        out = v / (v + 1.0);
    }
    if (!out.finite()) throw Error("bump: jet arithmetic overflow near support edge");
    return out;
}

double bump_deriv(const BumpParams& p, double rho, int order) {
    require(order >= 0 && order <= p.p_max, "bump_deriv: order exceeds p_max");
    if (order == 0) return bump(p, rho);
    if (rho <= 0.0 || rho >= 1.0) return 0.0;
    return bump_jet(p, Jet::variable(order, rho)).derivative(order);
}

Jet step_jet(const BumpParams& p, double t, int degree) {
    const double span = p.t_final - p.tau;
    require(span > 0.0, "step: tau must be below T");
    const Jet rho = Jet::variable(degree, (t - p.tau) / span, 1.0 / span);
    return bump_jet(p, rho);
}

double step_deriv(const BumpParams& p, double t, int order) {
    require(order >= 0 && order <= p.p_max, "step_deriv: order exceeds p_max");
    if (order == 0) return bump(p, (t - p.tau) / (p.t_final - p.tau));
    return step_jet(p, t, order).derivative(order);
}

namespace {

// Plateau cutoff: 1 for |u| <= 1/2, 0 for |u| >= 1, Gevrey in between.
Jet plateau_jet(const BumpParams& cut, const Jet& u) {
    const int deg = u.degree();
    const double u0 = u.value();
    const double m0 = std::fabs(u0);
    if (m0 <= 0.5) return Jet::constant(deg, 1.0);
    if (m0 >= 1.0) return Jet::constant(deg, 0.0);
    const Jet m = u0 > 0.0 ? u : -u;
    return bump_jet(cut, 2.0 * m - 1.0);
}

} // namespace

Jet GevreyInterpolant::eval_jet(double x, int degree) const {
    const double xi0 = x - anchor_;
    Jet acc = Jet::constant(degree, 0.0);
    for (int q = 0; q < static_cast<int>(d_.size()); ++q) {
        if (d_[q] == 0.0) continue;
        const double rq = rho_[q];
        if (std::fabs(xi0) >= rq) continue;
        // d_q xi^q / q! as an explicit jet.
        Jet poly = Jet::constant(degree, 0.0);
        const double scale = d_[q] / factorial(q);
        for (int k = 0; k <= std::min(q, degree); ++k)
            poly.coeff(k) = scale * binomial(q, k) * std::pow(xi0, q - k);
        const Jet u = Jet::variable(degree, xi0 / rq, 1.0 / rq);
        acc = acc + poly * plateau_jet(cut_, u);
    }
    return acc;
}

double GevreyInterpolant::deriv(double x, int order) const {
    return eval_jet(x, order).derivative(order);
}

double GevreyInterpolant::growth_constant(const std::vector<double>& xs, int q_cap) const {
    double c = 0.0;
    for (double x : xs) {
        const Jet j = eval_jet(x, q_cap);
        for (int q = 0; q <= q_cap; ++q) {
            const double denom = std::pow(h_tilde_, q) * factorial(2 * q);
            c = std::max(c, std::fabs(j.derivative(q)) / denom);
        }
    }
    return c;
}

GevreyInterpolant borel_interpolate(const std::vector<double>& d, double h, double h_tilde,
                                    double anchor, double r) {
    require(!d.empty(), "interpolate: need at least d_0");
    require(h >= 0.0 && h_tilde > 0.0, "interpolate: growth constants must be positive");
    const double ee = std::exp(std::exp(-1.0));
    require(h_tilde > ee * h, "interpolate: H_tilde must exceed e^{1/e} H");

    GevreyInterpolant f;
    f.anchor_ = anchor;
    f.d_ = d;
    f.h_ = h;
    f.h_tilde_ = h_tilde;
    f.cut_ = BumpParams{1.5, 1.0, 0.0, 1.0, 64};

    double c = 0.0;
    for (int q = 0; q < static_cast<int>(d.size()); ++q) {
        if (d[q] == 0.0) continue;
        if (q > 0 && h == 0.0)
            throw Error("interpolate: nonzero d_q with H = 0 has no finite fit");
        const double denom = (q == 0 ? 1.0 : std::pow(h, q)) * factorial(2 * q);
        c = std::max(c, std::fabs(d[q]) / denom);
    }
    require(std::isfinite(c), "interpolate: growth fit is not finite");
    f.fitted_c_ = c;

    f.rho_.resize(d.size());
    for (size_t q = 0; q < d.size(); ++q) f.rho_[q] = r / (h_tilde * (q + 1.0));

    // Derivative matching at the anchor is structural (all cutoffs sit on
    // their plateau); verify anyway.
    const Jet at_anchor = f.eval_jet(anchor, f.q_max());
    for (int q = 0; q <= f.q_max(); ++q) {
        const double got = at_anchor.derivative(q);
        require(std::fabs(got - d[q]) <= 1e-8 * (1.0 + std::fabs(d[q])),
                "interpolate: derivative matching failed at construction");
    }
    return f;
}

} // namespace zkflat
