#pragma once

#include <memory>
#include <string>
#include <vector>

#include "zkflat/expr.hpp"
#include "zkflat/genfun.hpp"
#include "zkflat/simulator.hpp"
#include "zkflat/synthesis.hpp"

namespace zkflat {

Field field_from_expr(const Expr& e, const Grid& grid, const std::string& tag = "initial");

Grid window_t(const Grid& g, double t_lo, double t_hi);

/// Null-control pipeline: free flow -> flat output -> control -> independent
/// simulation -> terminal norms and diagnostics.
struct NullRun {
    Params params;
    Grid grid;
    double u0_norm = 0.0;
    double terminal_norm = 0.0;
    double terminal_rel = 0.0;
    double control_pre_tau_max = 0.0; // max |h| on [0, tau)
    double splice_gap = 0.0;          // sup gap series vs free flow at tau/2
    double splice_gap_rel = 0.0;
    double boundary_zero_max = 0.0;   // structural zeros of the series field
    ResidualReport series_residual;   // on [tau, T]
    FlatBoundFit fit;
    TruncationReport trunc;
    GenFunTable table;
    std::shared_ptr<const FlatOutput> flat;
    ControlSignal control;
    Field terminal;
    std::vector<EnergyReport> energies;
    std::vector<std::pair<double, double>> norm_history; // (t, ||u(t)||)
};

NullRun run_null(const Params& p, const Field& u0, int threads = 1);
NullRun run_null(const Params& p, const Expr& u0, int threads = 1);

/// Reachability pipeline: coefficients -> interpolants -> control ->
/// simulation from zero -> terminal match against the target.
struct ReachRun {
    Params params;
    Grid grid;
    ReachCoefficients coeffs;
    double interp_terminal_rel = 0.0; // max rel |z^{(i)}(T) - b_{i,j}|
    double initial_zero_max = 0.0;    // max |z^{(i)}(0)|
    double terminal_rel = 0.0;        // simulated vs target, relative L2
    double boundary_zero_max = 0.0;
    ResidualReport series_residual; // on [0, T]
    CompatReport compat;
    FlatBoundFit fit;
    TruncationReport trunc;
    GenFunTable table;
    std::shared_ptr<const FlatOutput> flat;
    ControlSignal control;
    Field terminal;
    Field target;
    std::vector<std::pair<double, double>> norm_history;
};

ReachRun run_reach(const Params& p, const TargetSpec& target, int threads = 1);

/// Free evolution with energy diagnostics.
struct FreeRun {
    Params params;
    std::vector<ModeEvolution> evs;
    std::vector<EnergyReport> energies;
    double worst_identity_rel = 0.0;
    double worst_weighted_rel = 0.0;
    double worst_bc = 0.0;
};

FreeRun run_free(const Params& p, const Field& u0, int threads = 1);

} // namespace zkflat
