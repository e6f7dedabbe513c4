#pragma once

#include <vector>

#include "zkflat/jet.hpp"
#include "zkflat/params.hpp"

namespace zkflat {

/// Exact double factorials / binomials (arguments stay far below overflow).
double factorial(int n);
double binomial(int n, int k);

/// Parameters of the Gevrey switching bump phi_s.
///
/// phi_s(rho) = 1 for rho <= 0, 0 for rho >= 1, and
///   exp(-M/(1-rho)^sigma) / (exp(-M/rho^sigma) + exp(-M/(1-rho)^sigma))
/// in between, with sigma = 1/(s-1). The time profile is
/// phi_s((t - tau)/(T - tau)).
struct BumpParams {
    double s = 1.6;        // Gevrey order, in (1, 2)
    double steepness = 1.0; // M > 0
    double tau = 0.4;
    double t_final = 1.0;
    int p_max = 40; // highest derivative order served

    double sigma() const { return 1.0 / (s - 1.0); }

    static BumpParams from(const Params& p) {
        return BumpParams{p.gevrey_order, p.bump_steepness, p.tau, p.t_final, 40};
    }
};

/// phi_s at a point.
double bump(const BumpParams& p, double rho);

/// Jet of phi_s composed with the given argument jet (germ of the correct
/// piece; identically 0/1 germs outside (0,1)).
Jet bump_jet(const BumpParams& p, const Jet& rho);

/// p-th derivative of phi_s at rho (0 for rho outside (0,1) at any order).
double bump_deriv(const BumpParams& p, double rho, int order);

/// Jet of t -> phi_s((t - tau)/(T - tau)) at time t.
Jet step_jet(const BumpParams& p, double t, int degree);

/// n-th t-derivative of the time profile.
double step_deriv(const BumpParams& p, double t, int order);

/// Smooth function with prescribed derivatives d_q at an anchor point and
/// controlled Gevrey-2 growth: f(x) = sum_q d_q (x-anchor)^q/q! cut((x-anchor)/rho_q)
/// with plateau cutoffs cut (== 1 near 0), rho_q = r / (H_tilde (q+1)).
class GevreyInterpolant {
public:
    GevreyInterpolant() = default;

    double anchor() const { return anchor_; }
    int q_max() const { return static_cast<int>(d_.size()) - 1; }
    double fitted_c() const { return fitted_c_; }
    double growth_h() const { return h_; }
    double growth_h_tilde() const { return h_tilde_; }
    const std::vector<double>& prescribed() const { return d_; }

    Jet eval_jet(double x, int degree) const;
    double deriv(double x, int order) const;

    /// Largest |f^(q)(x)| / (H_tilde^q (2q)!) over the sample points, for
    /// q <= q_cap: the empirical constant of the growth bound.
    double growth_constant(const std::vector<double>& xs, int q_cap) const;

private:
    friend GevreyInterpolant borel_interpolate(const std::vector<double>&, double, double,
                                               double, double);
    double anchor_ = 0.0;
    std::vector<double> d_;
    std::vector<double> rho_;
    double h_ = 0.0, h_tilde_ = 0.0;
    double fitted_c_ = 0.0;
    BumpParams cut_;
};

/// Builds the interpolant anchored at `anchor`. Requires
/// |d_q| <= C H^q (2q)! for a finite fitted C and H_tilde > e^{1/e} H.
GevreyInterpolant borel_interpolate(const std::vector<double>& d, double h, double h_tilde,
                                    double anchor = 0.0, double r = 0.36787944117144233);

} // namespace zkflat
