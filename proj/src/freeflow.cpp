#include "zkflat/freeflow.hpp"

#include <cmath>

#include "zkflat/threads.hpp"

namespace zkflat {

namespace {

constexpr double kCoeffFloor = 1e-14; // relative noise floor for derivatives

std::vector<double> lc_apply(const std::vector<double>& coeffs, double mu_minus) {
    // Coefficients of f''' + mu_minus * f' (mu_minus = a - lambda_j).
    const std::vector<double> d1 = cheb::diff_coeffs(coeffs);
    const std::vector<double> d3 = cheb::diff_coeffs(cheb::diff_coeffs(d1));
    std::vector<double> out(coeffs.size(), 0.0);
    for (size_t k = 0; k < out.size(); ++k) out[k] = d3[k] + mu_minus * d1[k];
    return out;
}

// phi_k = T_k + a T_{k+1} + b T_{k+2} + c T_{k+3} (mapped variable) with
// phi(-1) = phi(0) = phi'(0) = 0; the 3x3 system is always nonsingular.
void bc_combo(int k, double* abc) {
    double m[3][4] = {{std::pow(-1.0, k + 1), std::pow(-1.0, k + 2), std::pow(-1.0, k + 3),
                       -std::pow(-1.0, k)},
                      {1.0, 1.0, 1.0, -1.0},
                      {static_cast<double>((k + 1) * (k + 1)),
                       static_cast<double>((k + 2) * (k + 2)),
                       static_cast<double>((k + 3) * (k + 3)),
                       -static_cast<double>(k * k)}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        for (int c = 0; c < 4; ++c) std::swap(m[col][c], m[piv][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    for (int r = 0; r < 3; ++r) abc[r] = m[r][3] / m[r][r];
}

} // namespace

namespace detail {

std::vector<double> GalerkinMode::project(const std::vector<double>& nodal) const {
    // basis is L2-orthonormal: projection = inner products
    const std::vector<double> w = cheb::clenshaw_curtis_weights(n);
    std::vector<double> rhs(dim, 0.0);
    for (int k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += w[i] * phi(i, k) * nodal[i];
        rhs[k] = acc;
    }
    return rhs;
}

std::vector<double> GalerkinMode::to_nodal(const std::vector<double>& c) const {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < dim; ++k) acc += phi(i, k) * c[k];
        out[i] = acc;
    }
    return out;
}

std::vector<double> GalerkinMode::mass_solve(const std::vector<double>& v) const {
    return v; // orthonormal basis: mass is the identity
}

void GalerkinMode::propagator_pair(double dt, Mat* exp_out, Mat* phi1_out) const {
    Mat k(dim, dim);
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) k(r, c) = -dt * stiff(r, c);
    matrix_exponential(k, exp_out, phi1_out);
}

Mat GalerkinMode::propagator(double dt) const {
    Mat e;
    propagator_pair(dt, &e, nullptr);
    return e;
}

GalerkinMode build_galerkin_mode(int nx, double a, double lambda) {
    require(nx >= 16, "galerkin mode: need nx >= 16");
    GalerkinMode gm;
    gm.n = nx;
    gm.dim = nx - 3;
    gm.x = cheb::nodes(nx);
    const int nq = 2 * nx + 8;
    gm.quad_x = cheb::nodes(nq);
    gm.quad_w = cheb::clenshaw_curtis_weights(nq);
    const double mu_minus = a - lambda;

    // seed basis: banded Chebyshev combinations satisfying the BCs
    std::vector<std::vector<double>> coef(gm.dim, std::vector<double>(nx, 0.0));
    for (int k = 0; k < gm.dim; ++k) {
        double abc[3];
        bc_combo(k, abc);
        coef[k][k] = 1.0;
        coef[k][k + 1] = abc[0];
        coef[k][k + 2] = abc[1];
        coef[k][k + 3] = abc[2];
    }

    // L2-orthonormalize (two passes make the Gram the identity to roundoff);
    // the evolution generator is then dissipative in the Euclidean norm and
    // its exponential can be squared without transient blowup.
    auto eval_quad = [&](const std::vector<double>& cf, std::vector<double>& out) {
        for (int q = 0; q < nq; ++q) out[q] = cheb::eval(cf, gm.quad_x[q]);
    };
    std::vector<std::vector<double>> vals(gm.dim, std::vector<double>(nq));
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < gm.dim; ++k) eval_quad(coef[k], vals[k]);
        Mat gram(gm.dim, gm.dim);
        for (int r = 0; r < gm.dim; ++r)
            for (int c = r; c < gm.dim; ++c) {
                double m = 0.0;
                for (int q = 0; q < nq; ++q) m += gm.quad_w[q] * vals[r][q] * vals[c][q];
                gram(r, c) = m;
                gram(c, r) = m;
            }
        const Cholesky chol(gram);
        std::vector<std::vector<double>> next(gm.dim, std::vector<double>(nx, 0.0));
        std::vector<double> unit(gm.dim, 0.0);
        for (int k = 0; k < gm.dim; ++k) {
            std::fill(unit.begin(), unit.end(), 0.0);
            unit[k] = 1.0;
            const std::vector<double> col = chol.solve_upper(unit); // L^{-T} e_k
            for (int m = 0; m < gm.dim; ++m) {
                if (col[m] == 0.0) continue;
                for (int i = 0; i < nx; ++i) next[k][i] += col[m] * coef[m][i];
            }
        }
        coef = std::move(next);
    }

    gm.phi = Mat(nx, gm.dim);
    gm.phi_quad.assign(gm.dim, std::vector<double>(nq));
    gm.dphi_quad.assign(gm.dim, std::vector<double>(nq));
    gm.slope_left.resize(gm.dim);
    std::vector<std::vector<double>> lphi_quad(gm.dim, std::vector<double>(nq));
    for (int k = 0; k < gm.dim; ++k) {
        eval_quad(coef[k], gm.phi_quad[k]);
        eval_quad(lc_apply(coef[k], mu_minus), lphi_quad[k]);
        const std::vector<double> d1 = cheb::diff_coeffs(coef[k]);
        eval_quad(d1, gm.dphi_quad[k]);
        const std::vector<double> nodal = cheb::to_values(coef[k]);
        for (int i = 0; i < nx; ++i) gm.phi(i, k) = nodal[i];
        gm.slope_left[k] = cheb::eval(d1, -1.0);
    }

    gm.mass = Mat::identity(gm.dim);
    Mat raw_s(gm.dim, gm.dim);
    for (int r = 0; r < gm.dim; ++r)
        for (int c = 0; c < gm.dim; ++c) {
            double s = 0.0;
            for (int q = 0; q < nq; ++q)
                s += gm.quad_w[q] * gm.phi_quad[r][q] * lphi_quad[c][q];
            raw_s(r, c) = s;
        }
    // int phi (phi''' + mu phi') = skew(phi, phi) + phi'(-1) phi'(-1) / 2
    gm.stiff = Mat(gm.dim, gm.dim);
    for (int r = 0; r < gm.dim; ++r)
        for (int c = 0; c < gm.dim; ++c)
            gm.stiff(r, c) = 0.5 * (raw_s(r, c) - raw_s(c, r)) +
                             0.5 * gm.slope_left[r] * gm.slope_left[c];

    // loads of the lifting profile w = -x^3 and its operator image
    gm.w_load.resize(gm.dim);
    gm.lw_load.resize(gm.dim);
    for (int k = 0; k < gm.dim; ++k) {
        double aw = 0.0, alw = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double xq = gm.quad_x[q];
            const double w = -xq * xq * xq;
            const double lw = -6.0 + mu_minus * (-3.0 * xq * xq);
            aw += gm.quad_w[q] * gm.phi_quad[k][q] * w;
            alw += gm.quad_w[q] * gm.phi_quad[k][q] * lw;
        }
        gm.w_load[k] = aw;
        gm.lw_load[k] = alw;
    }
    return gm;
}

} // namespace detail

ModeOperator build_mode_operator(int j, const Params& p, const std::vector<double>& x_nodes) {
    require(j >= 1, "mode operator: j must be >= 1");
    require(static_cast<int>(x_nodes.size()) >= 16, "mode operator: need nx >= 16");
    ModeOperator op;
    op.j = j;
    const TransverseBasis basis(j);
    op.lambda = basis.lambda(j);
    op.mu = op.lambda - p.a;
    op.x = x_nodes;
    op.d1 = cheb::diff_matrix(op.x);
    op.d2 = op.d1 * op.d1;
    op.d3 = op.d2 * op.d1;
    const int n = static_cast<int>(op.x.size());
    op.l = Mat(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) op.l(r, c) = op.d3(r, c) + (p.a - op.lambda) * op.d1(r, c);
    op.row_left = 0;
    op.row_right = n - 1;
    op.row_slope = n - 2;
    return op;
}

int ModeEvolution::time_index(double t) const {
    const double pos = t / dt;
    const int k = static_cast<int>(std::lround(pos));
    require(k >= 0 && k <= nt() && std::fabs(pos - k) < 1e-9 * (1.0 + std::fabs(pos)),
            "mode evolution: requested time is not a node");
    return k;
}

ModeEvolution evolve_free_mode(const ModeOperator& op, const Params& p,
                               std::vector<double> u0_nodal) {
    const int n = static_cast<int>(op.x.size());
    require(static_cast<int>(u0_nodal.size()) == n, "evolve: initial trace size mismatch");
    const double dt = p.dt();

    auto gm = std::make_shared<detail::GalerkinMode>(detail::build_galerkin_mode(n, p.a,
                                                                                 op.lambda));
    // L^2 data enters through its projection onto the boundary-condition
    // subspace.
    std::vector<double> c = gm->project(u0_nodal);

    // dc/dt = -S c, advanced by the exact propagator: unresolved dispersive
    // content then leaves the domain at its true discrete rate instead of
    // being trapped by a time-stepping scheme.
    const Mat propagator = gm->propagator(dt);

    ModeEvolution ev;
    ev.j = op.j;
    ev.lambda = op.lambda;
    ev.a = p.a;
    ev.dt = dt;
    ev.t_min = 10.0 * dt;
    ev.x = op.x;
    ev.snaps.resize(static_cast<size_t>(p.nt + 1) * n);
    ev.scheme = gm;
    ev.csnaps.resize(static_cast<size_t>(p.nt + 1) * gm->dim);

    std::vector<double> nodal = gm->to_nodal(c);
    std::copy(nodal.begin(), nodal.end(), ev.snaps.begin());
    std::copy(c.begin(), c.end(), ev.csnaps.begin());
    for (int k = 1; k <= p.nt; ++k) {
        c = propagator.apply(c);
        nodal = gm->to_nodal(c);
        std::copy(nodal.begin(), nodal.end(), ev.snaps.begin() + static_cast<size_t>(k) * n);
        std::copy(c.begin(), c.end(), ev.csnaps.begin() + static_cast<size_t>(k) * gm->dim);
    }
    return ev;
}

std::vector<ModeEvolution> evolve_free(const std::vector<std::vector<double>>& u0_modes,
                                       const Params& p, int threads) {
    const std::vector<double> x = cheb::nodes(p.nx);
    std::vector<ModeEvolution> evs(u0_modes.size());
    parallel_for(static_cast<int>(u0_modes.size()), threads, [&](int jm1) {
        const ModeOperator op = build_mode_operator(jm1 + 1, p, x);
        evs[jm1] = evolve_free_mode(op, p, u0_modes[jm1]);
    });
    return evs;
}

std::vector<double> snapshot_coeffs(const ModeEvolution& ev, int k) {
    std::vector<double> vals(ev.snapshot(k), ev.snapshot(k) + ev.nx());
    std::vector<double> c = cheb::to_coeffs(vals);
    double peak = 0.0;
    for (double v : c) peak = std::max(peak, std::fabs(v));
    const double floor = kCoeffFloor * peak;
    for (double& v : c)
        if (std::fabs(v) < floor) v = 0.0;
    return c;
}

double trace_f(const ModeEvolution& ev, int k) {
    std::vector<double> c = snapshot_coeffs(ev, k);
    c = cheb::diff_coeffs(cheb::diff_coeffs(c));
    return cheb::eval_at_right(c);
}

std::vector<double> trace_f_derivs(const ModeEvolution& ev, int k, int n_max,
                                   std::vector<double>* noise_out) {
    require(n_max >= 0, "trace derivs: n_max must be >= 0");
    require(n_max == 0 || ev.time(k) >= ev.t_min - 1e-12 * ev.dt,
            "trace derivs: time below t_min (smoothing not yet effective)");
    std::vector<double> out(n_max + 1, 0.0);
    std::vector<double> c = snapshot_coeffs(ev, k);
    const double mu_minus = ev.a - ev.lambda;

    // Per-coefficient roundoff bound, pushed through the same (positive
    // weight) recurrences as the values.
    double peak = 0.0;
    for (double v : c) peak = std::max(peak, std::fabs(v));
    std::vector<double> err(c.size());
    for (size_t m = 0; m < c.size(); ++m)
        err[m] = std::max(kCoeffFloor * peak, 1e-12 * std::fabs(c[m]));
    auto lc_abs = [&](const std::vector<double>& e) {
        const std::vector<double> d1 = cheb::diff_coeffs(e);
        const std::vector<double> d3 = cheb::diff_coeffs(cheb::diff_coeffs(d1));
        std::vector<double> o(e.size());
        for (size_t m = 0; m < o.size(); ++m) o[m] = d3[m] + std::fabs(mu_minus) * d1[m];
        return o;
    };
    auto sum_abs_d2 = [](const std::vector<double>& e) {
        const std::vector<double> d2 = cheb::diff_coeffs(cheb::diff_coeffs(e));
        double acc = 0.0;
        for (double v : d2) acc += std::fabs(v);
        return acc;
    };

    if (noise_out) noise_out->assign(n_max + 1, 0.0);
    double sign = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        const std::vector<double> c2 = cheb::diff_coeffs(cheb::diff_coeffs(c));
        out[n] = sign * cheb::eval_at_right(c2);
        if (noise_out) (*noise_out)[n] = sum_abs_d2(err);
        if (n < n_max) {
            c = lc_apply(c, mu_minus);
            err = lc_abs(err);
            sign = -sign;
        }
    }
    return out;
}

EnergyReport energy_report(const ModeEvolution& ev, const ModeOperator& op) {
    require(ev.scheme != nullptr && !ev.csnaps.empty(),
            "energy report: needs a free evolution with its Galerkin data");
    const detail::GalerkinMode& gm = *ev.scheme;
    const int n = ev.nx();
    const int nt = ev.nt();
    const int dim = gm.dim;

    // Exact time integrals of the quadratic observables along the
    // semi-discrete flow: X_Q = int_0^dt e^{s K^T} Q e^{s K} ds.
    Mat kdt(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) kdt(r, c) = -ev.dt * gm.stiff(r, c);

    const int nq = static_cast<int>(gm.quad_x.size());
    auto gram = [&](auto&& f) {
        Mat q(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = r; c < dim; ++c) {
                double acc = 0.0;
                for (int m = 0; m < nq; ++m) acc += gm.quad_w[m] * f(r, m) * f(c, m);
                q(r, c) = acc;
                q(c, r) = acc;
            }
        return q;
    };
    Mat q_trace(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            q_trace(r, c) = gm.slope_left[r] * gm.slope_left[c];
    const Mat q_grad = gram([&](int k, int m) { return gm.dphi_quad[k][m]; });
    const Mat q_wplus = gram([&](int k, int m) {
        return gm.phi_quad[k][m] * std::sqrt(gm.quad_x[m] + 1.0);
    });

    const Mat x_trace = exp_weighted_gram(kdt, q_trace);
    const Mat x_grad = exp_weighted_gram(kdt, q_grad);
    const Mat x_mass = exp_weighted_gram(kdt, Mat::identity(dim));

    auto quad_form = [&](const Mat& q, const double* c) {
        double acc = 0.0;
        for (int r = 0; r < dim; ++r) {
            double row = 0.0;
            for (int cc = 0; cc < dim; ++cc) row += q(r, cc) * c[cc];
            acc += c[r] * row;
        }
        return acc;
    };
    auto norm_sq = [&](const double* c) {
        double acc = 0.0;
        for (int r = 0; r < dim; ++r) acc += c[r] * c[r];
        return acc;
    };

    EnergyReport rep;
    const double e0 = norm_sq(ev.coeff_snapshot(0));
    rep.initial_norm_sq = e0;
    const double scale = std::max(e0, 1e-300);

    double trace_int = 0.0, grad_int = 0.0, mass_int = 0.0;
    for (int k = 0; k < nt; ++k) {
        const double* c = ev.coeff_snapshot(k);
        trace_int += ev.dt * quad_form(x_trace, c);
        grad_int += ev.dt * quad_form(x_grad, c);
        mass_int += ev.dt * quad_form(x_mass, c);
    }

    // dissipation identity: ||u(T)||^2 + int_0^T |u'(-1)|^2 dt = ||u0||^2
    rep.identity_residual_rel =
        std::fabs(norm_sq(ev.coeff_snapshot(nt)) + trace_int - e0) / scale;

    // weighted identity: int (x+1)|u(T)|^2 + 3 int int |u'|^2 + (lambda-a) int int |u|^2
    //        = int (x+1)|u0|^2
    rep.weighted_residual_rel =
        std::fabs(quad_form(q_wplus, ev.coeff_snapshot(nt)) + 3.0 * grad_int +
                  (op.lambda - ev.a) * mass_int - quad_form(q_wplus, ev.coeff_snapshot(0))) /
        scale;

    double prev = e0;
    for (int k = 1; k <= nt; ++k) {
        const double ek = norm_sq(ev.coeff_snapshot(k));
        if (ek > prev * (1.0 + 1e-10) + 1e-300) rep.norm_monotone = false;
        prev = ek;
        const double* u = ev.snapshot(k);
        const double* slope_row = op.d1.row(op.row_right);
        double du0 = 0.0;
        for (int i = 0; i < n; ++i) du0 += slope_row[i] * u[i];
        rep.bc_max = std::max({rep.bc_max, std::fabs(u[op.row_left]),
                               std::fabs(u[op.row_right]), std::fabs(du0)});
    }
    return rep;
}

std::vector<SmoothingSample> measure_smoothing(const ModeEvolution& ev,
                                               const std::vector<int>& orders,
                                               const std::vector<double>& times) {
    const int n = ev.nx();
    const std::vector<double> wx = cheb::clenshaw_curtis_weights(n);
    std::vector<SmoothingSample> out;
    for (double t : times) {
        const int k = ev.time_index(t);
        std::vector<double> c = snapshot_coeffs(ev, k);
        int applied = 0;
        for (int target : orders) {
            while (applied < target) {
                c = lc_apply(c, ev.a - ev.lambda);
                ++applied;
            }
            const std::vector<double> vals = cheb::to_values(c);
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += wx[i] * vals[i] * vals[i];
            out.push_back({target, t, 0.5 * std::log(std::max(acc, 1e-300))});
        }
    }
    return out;
}

} // namespace zkflat
