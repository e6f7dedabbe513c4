#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zkflat/freeflow.hpp"
#include "zkflat/synthesis.hpp"

namespace zkflat {

/// Controlled simulation output: per-mode snapshots of u_j(x, t) with the
/// boundary data already folded back in.
struct SimResult {
    Grid grid;
    std::vector<ModeEvolution> modes;
    std::vector<std::string> warnings;

    /// Full state u(x, y, t) on the tensor grid.
    Field state3d() const;
    /// State at one time node.
    Field state2d(int k) const;
    Field terminal() const;
};

/// One controlled mode: du/dt + u''' + (a - lambda_j) u' = forcing, with
/// u(-1,t) = h_j(t), u(0,t) = u'(0,t) = 0, via the cubic lifting w = -x^3.
/// h_mode returns (h_j(t), h_j'(t)).
ModeEvolution simulate_mode(const ModeOperator& op, const Params& p,
                            std::vector<double> u0_nodal,
                            const std::function<std::pair<double, double>(double)>& h_mode,
                            const std::function<double(double, double)>& forcing = nullptr);

/// Boundary-controlled run from a 2D initial state. Uses the control's
/// analytic per-mode evaluator when present, otherwise its samples with
/// finite-difference time derivatives (which then must share the time grid).
SimResult simulate_controlled(const Field& u0, const ControlSignal& h, const Params& p,
                              int threads = 1);

struct ResidualReport {
    double max_abs = 0.0;
    double scale = 0.0; // max |u|
};

/// Discretized residual of u_t + u_xxx + u_xyy + a u_x on interior nodes
/// (spectral or 4th-order in x, sine-exact in y, 4th-order centered in t).
ResidualReport pde_residual(const Field& u, const Params& p);

struct FieldComparison {
    double l2_error = 0.0;
    double sup_error = 0.0;
    double relative_l2 = 0.0; // denominator ||v||
};

FieldComparison compare_fields(const Field& u, const Field& v);

/// Per-mode initial traces from a 2D field (sine analysis along y per node).
std::vector<std::vector<double>> field_to_modes(const Field& u0, const TransverseBasis& basis);

} // namespace zkflat
