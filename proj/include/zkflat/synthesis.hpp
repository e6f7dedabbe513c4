#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "zkflat/basis.hpp"
#include "zkflat/freeflow.hpp"
#include "zkflat/genfun.hpp"
#include "zkflat/gevrey.hpp"

namespace zkflat {

/// Flat-output family z_j^{(i)}(t), i <= i_max, j <= j_max.
///
/// Null mode: z_j = phi_s((t-tau)/(T-tau)) f_j(t) with f-derivatives taken
/// from the stored free evolution; evaluation is restricted to time nodes.
/// Reach mode: z_j = h_j(t) (1 - phi_s(...)) with h_j a Gevrey interpolant
/// anchored at T; evaluation works at any t.
class FlatOutput {
public:
    enum class Kind { Null, Reach };

    Kind kind() const { return kind_; }
    int i_max() const { return i_max_; }
    int j_max() const { return j_max_; }
    const BumpParams& bump() const { return bump_; }
    double t_final() const { return bump_.t_final; }
    double tau() const { return bump_.tau; }

    /// Taylor jet of t -> z_j(t) at t, to the requested degree.
    Jet z_jet(int j, double t, int degree) const;

    /// z_j^{(i)}(t).
    double z(int j, int i, double t) const;

    /// Null mode only: the stored free evolutions (splice source).
    const std::vector<ModeEvolution>& evolutions() const;

    /// Null: f-derivative cap (orders beyond it are dropped from the
    /// Leibniz sum; their series weights are negligible).
    int deriv_cap() const { return n_d_; }

    /// Reach: prescribed terminal derivatives b_{i,j} (empty for null).
    const std::vector<GevreyInterpolant>& interpolants() const { return interp_; }

private:
    friend FlatOutput null_flat_output(std::vector<ModeEvolution>, const Params&, int);
    friend FlatOutput reach_flat_output(const struct ReachCoefficients&, const Params&);

    Kind kind_ = Kind::Null;
    int i_max_ = 0, j_max_ = 0, n_d_ = 12;
    BumpParams bump_;
    // null
    std::vector<ModeEvolution> evs_;
    std::vector<std::vector<double>> f_table_; // [j-1][k*(n_d+1) + n]; NaN below t_min
    // reach
    std::vector<GevreyInterpolant> interp_;
};

/// Null-control flat output from the free evolution of u0.
FlatOutput null_flat_output(std::vector<ModeEvolution> evs, const Params& p,
                            int deriv_cap = 12);

/// Expansion coefficients b_{i,j} of a reachable target.
struct ReachCoefficients {
    int i_max = 0, j_max = 0;
    std::vector<double> b; // [ (j-1)*(i_max+1) + i ]
    std::string source;

    double at(int i, int j) const { return b[static_cast<size_t>(j - 1) * (i_max + 1) + i]; }
    double& at(int i, int j) { return b[static_cast<size_t>(j - 1) * (i_max + 1) + i]; }
};

struct TargetTerm {
    int i = 0, j = 1;
    double beta = 0.0;
};

/// Target state u1: either a finite combination sum beta g_{i,j} e_j, or a
/// callable supplying mixed partials d_x^p d_y^q u1(x, y).
struct TargetSpec {
    std::vector<TargetTerm> terms;
    std::function<double(int p, int q, double x, double y)> partials;
    int max_p = -1, max_q = -1;

    bool is_exact() const { return !partials; }
    static TargetSpec exact(std::vector<TargetTerm> t);
    static TargetSpec callable(std::function<double(int, int, double, double)> fn, int max_p,
                               int max_q);
};

/// Mixed partials of an exact-combination target, from the series table.
std::function<double(int, int, double, double)> target_partials(const TargetSpec& target,
                                                                const GenFunTable& table,
                                                                const TransverseBasis& basis);

/// b_{i,j} = (-1)^i int_0^1 e_j d^2/dx^2 P^i u1(0, y) dy. Exact-combination
/// targets short-circuit to b_{i,j} = beta_{i,j}; callables go through the
/// binomial expansion of P^i and quadrature on the y grid.
ReachCoefficients reach_coefficients(const TargetSpec& target, const GenFunTable& table,
                                     const TransverseBasis& basis, const Params& p);

/// Interpolate h_j with h_j^{(i)}(T) = b_{i,j}, then z_j = h_j (1 - phi_s).
FlatOutput reach_flat_output(const ReachCoefficients& b, const Params& p);

/// Boundary control h(y, t) sampled on the grid, with per-mode views and an
/// optional analytic evaluator (value and time derivative).
struct ControlSignal {
    std::vector<double> y;
    std::vector<double> t;
    int j_max = 0;
    double tau = 0.0;
    std::string synthesis_type; // "null" | "reach" | "imported"
    std::vector<double> samples;     // (nt+1) x ny
    std::vector<double> mode_coeffs; // (nt+1) x j_max
    std::function<std::pair<double, double>(int j, double t)> mode_eval;

    double h(int k, int iy) const { return samples[static_cast<size_t>(k) * y.size() + iy]; }
    double mode(int k, int j) const {
        return mode_coeffs[static_cast<size_t>(k) * j_max + (j - 1)];
    }
};

/// State series u = sum g_{i,j}(x) z_j^{(i)}(t) e_j(y) on the tensor grid.
/// For a null flat output the [0, tau) part is the stored free evolution
/// (the series needs f-derivatives that do not exist at t = 0+).
Field assemble_state(const GenFunTable& table, const FlatOutput& z, const Grid& grid);

/// Raw series field from t_lo on (diagnostics; no splicing).
Field assemble_series_state(const GenFunTable& table, const FlatOutput& z, const Grid& grid,
                            double t_lo);

/// Sup-norm gap at one time node between the raw series and the stored free
/// evolution (null flat outputs only).
double splice_gap(const GenFunTable& table, const FlatOutput& z, const Grid& grid, double t);

/// Control trace h(y,t) = sum g_{i,j}(-1) z_j^{(i)}(t) e_j(y); identically 0
/// on [0, tau) for null synthesis.
ControlSignal assemble_control(const GenFunTable& table,
                               const std::shared_ptr<const FlatOutput>& z, const Grid& grid);

/// Envelope fit |z_j^{(i)}(t)| <= m_j (i!)^s_t / r^i over sampled nodes
/// (s_t = s for null, and the reach family is fitted as m_j (2i)!/r^{2i}).
struct FlatBoundFit {
    std::vector<double> m_j;  // per-mode envelope constants
    double r = 1.0;           // growth scale
    bool reach_form = false;  // (2i)!/r^{2i} instead of (i!)^s/r^i
    double s = 1.6;
    double sum_mj_exp = 0.0;  // sum m_j e^{sqrt(lambda_j)} (summability check)
};

FlatBoundFit fit_flat_bound(const FlatOutput& z, const Params& p,
                            const std::vector<double>& times);

/// Closed-form estimate of the dropped tail of the state/control series.
struct TruncationReport {
    double i_tail = 0.0;
    double j_tail = 0.0;
    double total = 0.0;
    double fitted_k = 0.0;   // j-tail envelope K e^{-beta j}
    double fitted_beta = 0.0;
    double cor_c = 0.0;      // empirical constant of the 1/(2i)! envelope
};

TruncationReport truncation_bound(const Params& p, const FlatBoundFit& fit, double cor_c);

/// Reachability-space diagnostics for a target: boundary structure of P^n u1
/// and the Gevrey-(2/3, 2/3) coefficient fit with its admissibility radius
/// R0 = (9(a+2))^{1/3} e^{1/(3e)}.
struct CompatReport {
    double max_boundary_violation = 0.0; // P^n u1 and d_x P^n u1 at x=0; P^n u1 at y=0,1
    double fitted_c = 0.0;
    double fitted_r1 = 0.0;
    double fitted_r2 = 0.0;
    double r0 = 0.0;
    bool structural_pass = false;
};

CompatReport check_compatibility(const TargetSpec& target, int n_max, const GenFunTable& table,
                                 const TransverseBasis& basis, const Params& p);

/// Samples of an exact-combination target on the grid.
Field target_field(const TargetSpec& target, const GenFunTable& table,
                   const TransverseBasis& basis, const Grid& grid);

} // namespace zkflat
