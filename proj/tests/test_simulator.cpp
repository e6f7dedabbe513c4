#include <doctest.h>

#include <cmath>

#include "zkflat/pipeline.hpp"
#include "zkflat/simulator.hpp"

using namespace zkflat;

namespace {

Params sim_params(int nx = 48, int nt = 400) {
    Params p;
    p.a = 1.0;
    p.t_final = 0.5;
    p.tau = 0.2;
    p.j_max = 2;
    p.ny = 33;
    p.nx = nx;
    p.nt = nt;
    p.i_max = 6;
    return p;
}

ControlSignal zero_control(const Grid& g, int j_max) {
    ControlSignal cs;
    cs.y = g.y;
    cs.t = g.t;
    cs.j_max = j_max;
    cs.synthesis_type = "null";
    cs.samples.assign(g.t.size() * g.y.size(), 0.0);
    cs.mode_coeffs.assign(g.t.size() * static_cast<size_t>(j_max), 0.0);
    cs.mode_eval = [](int, double) { return std::make_pair(0.0, 0.0); };
    return cs;
}

} // namespace

TEST_CASE("zero control and zero state stay zero") {
    const Params p = sim_params(32, 60);
    const Grid g = Grid::make(p);
    const SimResult res = simulate_controlled(Field::zeros2d(g), zero_control(g, p.j_max), p);
    for (const ModeEvolution& ev : res.modes)
        for (double v : ev.snaps) CHECK(v == 0.0);
}

TEST_CASE("uncontrolled simulation equals the free evolution bitwise") {
    const Params p = sim_params(48, 200);
    const Grid g = Grid::make(p);
    const Expr e = Expr::parse("x*x*(x+1)*sin(pi*y) + 0.2*x*x*(x+1)*sin(2*pi*y)");
    const Field u0 = field_from_expr(e, g);
    const TransverseBasis basis(p.j_max);
    const std::vector<ModeEvolution> free = evolve_free(field_to_modes(u0, basis), p);
    const SimResult sim = simulate_controlled(u0, zero_control(g, p.j_max), p);
    for (int j = 0; j < p.j_max; ++j) {
        double worst = 0.0;
        for (size_t m = 0; m < free[j].snaps.size(); ++m)
            worst = std::max(worst, std::fabs(free[j].snaps[m] - sim.modes[j].snaps[m]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("mode decoupling: joint and single-mode runs agree bitwise") {
    Params p = sim_params(40, 100);
    p.j_max = 3;
    const Grid g = Grid::make(p);
    const Expr e = Expr::parse("x*x*(x+1)*(sin(pi*y) + 0.5*sin(2*pi*y) + 0.25*sin(3*pi*y))");
    const Field u0 = field_from_expr(e, g);
    const SimResult joint = simulate_controlled(u0, zero_control(g, p.j_max), p);

    const TransverseBasis basis(p.j_max);
    const std::vector<std::vector<double>> modes = field_to_modes(u0, basis);
    for (int j = 1; j <= p.j_max; ++j) {
        const ModeOperator op = build_mode_operator(j, p, g.x);
        const ModeEvolution single = simulate_mode(
            op, p, modes[j - 1], [](double) { return std::make_pair(0.0, 0.0); });
        for (size_t m = 0; m < single.snaps.size(); ++m)
            CHECK(single.snaps[m] == joint.modes[j - 1].snaps[m]);
    }
}

TEST_CASE("manufactured solution converges in dt") {
    // u*(x, t) = e^{-t} q(x), q = x^2(x+1): forcing = u*_t + L u*
    auto exact_err = [&](int nt) {
        const Params p = sim_params(48, nt);
        const std::vector<double> x = cheb::nodes(p.nx);
        const ModeOperator op = build_mode_operator(1, p, x);
        auto q = [](double v) { return v * v * (v + 1.0); };
        auto lq = [&](double v) {
            return 6.0 + (p.a - op.lambda) * (3.0 * v * v + 2.0 * v);
        };
        std::vector<double> u0(p.nx);
        for (int i = 0; i < p.nx; ++i) u0[i] = q(x[i]);
        const ModeEvolution ev = simulate_mode(
            op, p, u0, [](double) { return std::make_pair(0.0, 0.0); },
            [&](double xx, double tt) { return std::exp(-tt) * (lq(xx) - q(xx)); });
        double err = 0.0;
        const double* snap = ev.snapshot(p.nt);
        for (int i = 0; i < p.nx; ++i)
            err = std::max(err, std::fabs(snap[i] - std::exp(-p.t_final) * q(x[i])));
        return err;
    };
    const double e1 = exact_err(32);
    const double e2 = exact_err(64);
    CHECK(e2 <= e1 / 3.5);
}

TEST_CASE("pde residual separates solutions from non-solutions") {
    Params p = sim_params(48, 40);
    p.j_max = 1;
    const Grid g = Grid::make(p);
    const TransverseBasis basis(1);

    Field zero = Field::zeros3d(g);
    const ResidualReport rz = pde_residual(zero, p);
    CHECK(rz.max_abs == 0.0);

    // stationary single-term state solves the system
    const GenFunTable table = build_table(p, basis);
    Field station = Field::zeros3d(g);
    for (int k = 0; k < g.nt(); ++k)
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 0; iy < g.ny(); ++iy)
                station.at(k, ix, iy) = table.eval(0, 1, g.x[ix]) * basis.eval(1, g.y[iy]);
    const ResidualReport rs = pde_residual(station, p);
    CHECK(rs.max_abs <= 1e-7 * std::max(1.0, rs.scale));

    // a smooth non-solution is flagged (negative control)
    Field bogus = Field::zeros3d(g);
    for (int k = 0; k < g.nt(); ++k)
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 0; iy < g.ny(); ++iy)
                bogus.at(k, ix, iy) = std::sin(2.0 * g.x[ix]) *
                                      std::exp(-g.t[k]) * basis.eval(1, g.y[iy]);
    const ResidualReport rb = pde_residual(bogus, p);
    CHECK(rb.max_abs > 0.1 * rb.scale);
}

TEST_CASE("pde residual cross-validates on a uniform x grid") {
    Params p = sim_params(64, 40);
    p.j_max = 1;
    const Grid g = Grid::make(p, AxisKind::Uniform);
    const TransverseBasis basis(1);
    const GenFunTable table = build_table(p, basis);
    Field station = Field::zeros3d(g);
    for (int k = 0; k < g.nt(); ++k)
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 0; iy < g.ny(); ++iy)
                station.at(k, ix, iy) = table.eval(0, 1, g.x[ix]) * basis.eval(1, g.y[iy]);
    const ResidualReport rs = pde_residual(station, p);
    CHECK(rs.max_abs <= 1e-3 * std::max(1.0, rs.scale)); // 4th-order stencils
}

TEST_CASE("compare_fields conventions") {
    const Params p = sim_params(32, 20);
    const Grid g = Grid::make(p);
    const TransverseBasis basis(p.j_max);
    Field u = Field::zeros2d(g), v = Field::zeros2d(g);
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy) {
            u.at(ix, iy) = g.x[ix] * basis.eval(1, g.y[iy]);
            v.at(ix, iy) = u.at(ix, iy);
        }
    const FieldComparison same = compare_fields(u, v);
    CHECK(same.l2_error == 0.0);
    CHECK(same.sup_error == 0.0);

    // v = u + eps e_1 (constant in x): l2 error = eps
    const double eps = 1e-3;
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy) v.at(ix, iy) += eps * basis.eval(1, g.y[iy]);
    const FieldComparison shifted = compare_fields(v, u);
    CHECK(shifted.l2_error == doctest::Approx(eps).epsilon(1e-8));

    // zero vs target: relative error uses the target norm
    Field zero = Field::zeros2d(g);
    const FieldComparison rel = compare_fields(zero, u);
    CHECK(rel.relative_l2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("incompatible control raises a warning") {
    const Params p = sim_params(32, 40);
    const Grid g = Grid::make(p);
    ControlSignal cs = zero_control(g, p.j_max);
    cs.mode_eval = [](int, double) { return std::make_pair(1.0, 0.0); }; // h(0) = 1
    const SimResult res = simulate_controlled(Field::zeros2d(g), cs, p);
    CHECK(!res.warnings.empty());
}
