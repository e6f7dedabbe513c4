#pragma once

#include <memory>
#include <vector>

#include "zkflat/basis.hpp"
#include "zkflat/cheb.hpp"
#include "zkflat/linalg.hpp"
#include "zkflat/params.hpp"

namespace zkflat {

/// Spatial operator of one transverse mode: f -> f''' + (a - lambda_j) f' on
/// Chebyshev nodes, plus the rows that enforce f(-1) = f(0) = f'(0) = 0.
struct ModeOperator {
    int j = 1;
    double lambda = 0.0;
    double mu = 0.0; // lambda_j - a
    std::vector<double> x;
    Mat d1, d2, d3;
    Mat l; // collocation of f''' + (a - lambda_j) f', no boundary rows
    int row_left = 0;   // node x = -1
    int row_right = 0;  // node x = 0
    int row_slope = 0;  // collocation row sacrificed to u'(0) = 0
};

ModeOperator build_mode_operator(int j, const Params& p, const std::vector<double>& x_nodes);

namespace detail {

/// Galerkin discretization of one mode in a polynomial basis that satisfies
/// f(-1) = f(0) = f'(0) = 0 exactly. The stiffness is assembled in its
/// structural form (skew part plus the exact rank-1 boundary term
/// phi'(-1) phi'(-1)/2), which keeps the trapezoidal step contractive in the
/// mass norm regardless of the Gram conditioning.
struct GalerkinMode {
    int n = 0;   // node count
    int dim = 0; // n - 3
    std::vector<double> x;
    Mat phi;                        // n x dim nodal basis values
    Mat mass;                       // dim x dim, symmetric positive definite
    Mat stiff;                      // dim x dim, skew + rank-1
    std::vector<double> slope_left; // phi_k'(-1)
    std::vector<double> w_load;     // int phi_k w dx,  w = -x^3
    std::vector<double> lw_load;    // int phi_k (Lw) dx
    std::vector<double> quad_x, quad_w;
    std::vector<std::vector<double>> phi_quad;  // dim rows of values at quad nodes
    std::vector<std::vector<double>> dphi_quad; // first-derivative values

    std::vector<double> project(const std::vector<double>& nodal) const;
    std::vector<double> to_nodal(const std::vector<double>& c) const;

    /// exp(-dt M^{-1} S): exact one-step propagator of the semi-discrete mode.
    Mat propagator(double dt) const;
    /// Propagator plus the Duhamel weight phi1(-dt M^{-1} S).
    void propagator_pair(double dt, Mat* exp_out, Mat* phi1_out) const;
    /// M^{-1} v.
    std::vector<double> mass_solve(const std::vector<double>& v) const;
};

GalerkinMode build_galerkin_mode(int nx, double a, double lambda);

} // namespace detail

/// Per-mode free evolution: snapshots of u_j(x, t_k) for all time nodes.
struct ModeEvolution {
    int j = 1;
    double lambda = 0.0;
    double a = 0.0;
    double dt = 0.0;
    double t_min = 0.0; // earliest time with derivative extraction
    std::vector<double> x;
    std::vector<double> snaps; // (nt+1) rows of nx values

    // free runs keep the Galerkin representation for exact energy budgets
    std::shared_ptr<const detail::GalerkinMode> scheme;
    std::vector<double> csnaps; // (nt+1) rows of scheme->dim coefficients

    int nx() const { return static_cast<int>(x.size()); }
    int nt() const { return static_cast<int>(snaps.size()) / nx() - 1; }
    const double* snapshot(int k) const { return snaps.data() + static_cast<size_t>(k) * nx(); }
    const double* coeff_snapshot(int k) const {
        return csnaps.data() + static_cast<size_t>(k) * scheme->dim;
    }
    double time(int k) const { return dt * k; }
    int time_index(double t) const;
};

/// Crank-Nicolson integration of du/dt = -(u''' + (a - lambda_j) u') with the
/// three homogeneous boundary rows. Initial samples are projected onto the
/// value constraints (L^2 data need not satisfy them).
ModeEvolution evolve_free_mode(const ModeOperator& op, const Params& p,
                               std::vector<double> u0_nodal);

/// All modes j = 1..j_max from per-mode initial traces.
std::vector<ModeEvolution> evolve_free(const std::vector<std::vector<double>>& u0_modes,
                                       const Params& p, int threads = 1);

/// f_j(t_k) = d^2/dx^2 u_j(0, t_k).
double trace_f(const ModeEvolution& ev, int k);

/// f_j^{(n)}(t_k) for n = 0..n_max via n applications of -(d^3/dx^3 +
/// (a-lambda) d/dx) in Chebyshev coefficient space. Coefficients below the
/// roundoff plateau are zeroed before differentiating; t_k must be >= t_min
/// when n_max >= 1. When noise_out is given it receives a bound on the
/// roundoff propagated through the same recurrences: values below their
/// noise bound carry no information.
std::vector<double> trace_f_derivs(const ModeEvolution& ev, int k, int n_max,
                                   std::vector<double>* noise_out = nullptr);

/// Chebyshev coefficients of the snapshot with the noise floor applied.
std::vector<double> snapshot_coeffs(const ModeEvolution& ev, int k);

struct EnergyReport {
    double identity_residual_rel = 0.0; // boundary dissipation identity
    double weighted_residual_rel = 0.0; // (x+1)-weighted identity
    double bc_max = 0.0;                // worst boundary value for t > 0
    bool norm_monotone = true;
    double initial_norm_sq = 0.0;
};

EnergyReport energy_report(const ModeEvolution& ev, const ModeOperator& op);

/// Measured Kato-smoothing diagnostic: log ||L^n u(t)|| for the requested
/// orders and times (reported only; the smoothing constants are not known).
struct SmoothingSample {
    int n;
    double t;
    double log_norm;
};
std::vector<SmoothingSample> measure_smoothing(const ModeEvolution& ev,
                                               const std::vector<int>& orders,
                                               const std::vector<double>& times);

} // namespace zkflat
