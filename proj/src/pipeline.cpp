#include "zkflat/pipeline.hpp"

#include <cmath>

namespace zkflat {

Field field_from_expr(const Expr& e, const Grid& grid, const std::string& tag) {
    Field f = Field::zeros2d(grid, tag);
    for (int ix = 0; ix < grid.nx(); ++ix)
        for (int iy = 0; iy < grid.ny(); ++iy)
            f.at(ix, iy) = e.eval(grid.x[ix], grid.y[iy]);
    return f;
}

Grid window_t(const Grid& g, double t_lo, double t_hi) {
    Grid w = g;
    w.t.clear();
    for (double t : g.t)
        if (t >= t_lo - 1e-15 && t <= t_hi + 1e-15) w.t.push_back(t);
    require(w.t.size() >= 5, "window_t: too few time nodes in window");
    return w;
}

namespace {

std::vector<double> flat_sample_times(const Params& p, const FlatOutput& z) {
    // nodes spread over the active window, away from t_min
    std::vector<double> ts;
    const double dt = p.dt();
    const double lo = std::max(20.0 * dt, 0.05 * p.t_final);
    for (int m = 0; m <= 24; ++m) {
        double t = lo + (p.t_final - lo) * m / 24.0;
        t = std::round(t / dt) * dt;
        t = std::min(t, p.t_final);
        if (z.kind() == FlatOutput::Kind::Reach || t >= lo) ts.push_back(t);
    }
    return ts;
}

double structural_boundary_max(const GenFunTable& table) {
    double m = 0.0;
    for (int j = 1; j <= table.j_max; ++j)
        for (int i = 0; i <= table.i_max; ++i) {
            m = std::max(m, std::fabs(table.eval(i, j, 0.0, 0)));
            m = std::max(m, std::fabs(table.eval(i, j, 0.0, 1)));
        }
    return m;
}

} // namespace

NullRun run_null(const Params& p, const Field& u0, int threads) {
    p.validate();
    NullRun run;
    run.params = p;
    run.grid = Grid::make(p, AxisKind::Chebyshev);

    const TransverseBasis basis(p.j_max);
    run.u0_norm = l2_norm(u0);

    const std::vector<std::vector<double>> u0_modes = field_to_modes(u0, basis);
    std::vector<ModeEvolution> evs = evolve_free(u0_modes, p, threads);
    const std::vector<double> xnodes = cheb::nodes(p.nx);
    for (int j = 1; j <= p.j_max; ++j) {
        const ModeOperator op = build_mode_operator(j, p, xnodes);
        run.energies.push_back(energy_report(evs[j - 1], op));
    }

    auto flat = std::make_shared<FlatOutput>(null_flat_output(std::move(evs), p));
    run.flat = flat;
    run.table = build_table(p, basis, {}, threads);

    run.control = assemble_control(run.table, flat, run.grid);
    for (size_t k = 0; k < run.control.t.size(); ++k) {
        if (run.control.t[k] >= p.tau) break;
        for (size_t iy = 0; iy < run.control.y.size(); ++iy)
            run.control_pre_tau_max = std::max(
                run.control_pre_tau_max,
                std::fabs(run.control.h(static_cast<int>(k), static_cast<int>(iy))));
    }

    // independent verification
    const SimResult sim = simulate_controlled(u0, run.control, p, threads);
    run.terminal = sim.terminal();
    run.terminal_norm = l2_norm(run.terminal);
    run.terminal_rel = run.u0_norm > 0.0 ? run.terminal_norm / run.u0_norm : run.terminal_norm;
    const int stride = std::max(1, p.nt / 100);
    for (int k = 0; k < run.grid.nt(); k += stride)
        run.norm_history.emplace_back(run.grid.t[k], l2_norm(sim.state2d(k)));

    // splice check: the series must agree with the free flow at tau/2 (both
    // representations are valid there)
    const double t_splice = std::round(0.5 * p.tau / p.dt()) * p.dt();
    run.splice_gap = splice_gap(run.table, *flat, run.grid, t_splice);
    run.splice_gap_rel = run.u0_norm > 0.0 ? run.splice_gap / run.u0_norm : run.splice_gap;

    // series diagnostics on the active window; the field scale is that of the
    // whole assembled state (the spliced [0, tau) part carries the bulk)
    const Grid win = window_t(run.grid, p.tau, p.t_final);
    const Field series = assemble_series_state(run.table, *flat, win, -1.0);
    run.series_residual = pde_residual(series, p);
    run.series_residual.scale = std::max(run.series_residual.scale, run.u0_norm);
    run.boundary_zero_max = structural_boundary_max(run.table);

    run.fit = fit_flat_bound(*flat, p, flat_sample_times(p, *flat));
    const BoundReport br = check_bound(run.table, bound_samples(33));
    run.trunc = truncation_bound(p, run.fit, br.fitted_c);
    return run;
}

NullRun run_null(const Params& p, const Expr& u0, int threads) {
    const Grid grid = Grid::make(p, AxisKind::Chebyshev);
    return run_null(p, field_from_expr(u0, grid), threads);
}

ReachRun run_reach(const Params& p, const TargetSpec& target, int threads) {
    p.validate();
    ReachRun run;
    run.params = p;
    run.grid = Grid::make(p, AxisKind::Chebyshev);
    const TransverseBasis basis(p.j_max);

    run.table = build_table(p, basis, {}, threads);
    run.coeffs = reach_coefficients(target, run.table, basis, p);
    auto flat = std::make_shared<FlatOutput>(reach_flat_output(run.coeffs, p));
    run.flat = flat;

    // terminal interpolation and zero start, checked directly on z
    for (int j = 1; j <= p.j_max; ++j) {
        const Jet at_t = flat->z_jet(j, p.t_final, p.i_max);
        const Jet at_0 = flat->z_jet(j, 0.0, p.i_max);
        double fact = 1.0;
        for (int i = 0; i <= p.i_max; ++i) {
            if (i >= 2) fact *= i;
            const double b = run.coeffs.at(i, j);
            const double err = std::fabs(at_t.coeff(i) * fact - b);
            run.interp_terminal_rel =
                std::max(run.interp_terminal_rel, err / std::max(1e-30, std::fabs(b)));
            run.initial_zero_max = std::max(run.initial_zero_max,
                                            std::fabs(at_0.coeff(i) * fact));
        }
    }

    run.control = assemble_control(run.table, flat, run.grid);
    run.target = target.is_exact() ? target_field(target, run.table, basis, run.grid)
                                   : Field::zeros2d(run.grid, "target");
    if (!target.is_exact()) {
        for (int ix = 0; ix < run.grid.nx(); ++ix)
            for (int iy = 0; iy < run.grid.ny(); ++iy)
                run.target.at(ix, iy) =
                    target.partials(0, 0, run.grid.x[ix], run.grid.y[iy]);
    }

    const Field u0 = Field::zeros2d(run.grid, "initial");
    const SimResult sim = simulate_controlled(u0, run.control, p, threads);
    run.terminal = sim.terminal();
    run.terminal_rel = compare_fields(run.terminal, run.target).relative_l2;
    const int stride = std::max(1, p.nt / 100);
    for (int k = 0; k < run.grid.nt(); k += stride)
        run.norm_history.emplace_back(run.grid.t[k], l2_norm(sim.state2d(k)));

    const Field series = assemble_series_state(run.table, *flat, run.grid, -1.0);
    run.series_residual = pde_residual(series, p);
    run.boundary_zero_max = structural_boundary_max(run.table);

    run.compat = check_compatibility(target, std::min(4, p.i_max), run.table, basis, p);
    run.fit = fit_flat_bound(*flat, p, flat_sample_times(p, *flat));
    const BoundReport br = check_bound(run.table, bound_samples(33));
    run.trunc = truncation_bound(p, run.fit, br.fitted_c);
    return run;
}

FreeRun run_free(const Params& p, const Field& u0, int threads) {
    p.validate();
    FreeRun run;
    run.params = p;
    const TransverseBasis basis(p.j_max);
    run.evs = evolve_free(field_to_modes(u0, basis), p, threads);
    const std::vector<double> xnodes = cheb::nodes(p.nx);
    for (int j = 1; j <= p.j_max; ++j) {
        const ModeOperator op = build_mode_operator(j, p, xnodes);
        run.energies.push_back(energy_report(run.evs[j - 1], op));
        run.worst_identity_rel =
            std::max(run.worst_identity_rel, run.energies.back().identity_residual_rel);
        run.worst_weighted_rel =
            std::max(run.worst_weighted_rel, run.energies.back().weighted_residual_rel);
        run.worst_bc = std::max(run.worst_bc, run.energies.back().bc_max);
    }
    return run;
}

} // namespace zkflat
