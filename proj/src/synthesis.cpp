#include "zkflat/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zkflat/threads.hpp"

namespace zkflat {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// p-th derivative of a stored series at x (no order cap, unlike eval).
double series_deriv_eval(const PowerSeries& ps, double x, int p) {
    std::vector<double> c = ps.coeffs;
    for (int pass = 0; pass < p; ++pass) {
        if (c.size() <= 1) return 0.0;
        for (size_t n = 1; n < c.size(); ++n) c[n - 1] = c[n] * static_cast<double>(n);
        c.pop_back();
    }
    double acc = 0.0;
    for (size_t n = c.size(); n-- > 0;) acc = acc * x + c[n];
    return acc;
}

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// d^q/dy^q e_j(y) = sqrt(2) (j pi)^q sin(j pi y + q pi/2)
double basis_deriv(int j, int q, double y) {
    return kSqrt2 * std::pow(j * kPi, q) * std::sin(j * kPi * y + 0.5 * kPi * q);
}

} // namespace

Jet FlatOutput::z_jet(int j, double t, int degree) const {
    require(j >= 1 && j <= j_max_, "flat output: mode index out of range");
    if (kind_ == Kind::Reach) {
        const Jet h = interp_[j - 1].eval_jet(t, degree);
        const Jet g = 1.0 - step_jet(bump_, t, degree);
        return h * g;
    }
    const ModeEvolution& ev = evs_[j - 1];
    const int k = ev.time_index(t);
    const std::vector<double>& row = f_table_[j - 1];
    const int stride = n_d_ + 1;
    Jet f(degree, 0.0);
    for (int n = 0; n <= std::min(degree, n_d_); ++n) {
        const double fn = row[static_cast<size_t>(k) * stride + n];
        if (std::isnan(fn))
            throw Error("flat output: f-derivatives unavailable below t_min; use the "
                        "free-flow splice for early times");
        f.coeff(n) = fn / factorial(n);
    }
    const Jet phi = step_jet(bump_, t, degree);
    return phi * f;
}

double FlatOutput::z(int j, int i, double t) const {
    require(i >= 0 && i <= i_max_ + 1, "flat output: derivative order out of range");
    return z_jet(j, t, i).derivative(i);
}

const std::vector<ModeEvolution>& FlatOutput::evolutions() const {
    require(kind_ == Kind::Null, "flat output: evolutions only exist for null synthesis");
    return evs_;
}

FlatOutput null_flat_output(std::vector<ModeEvolution> evs, const Params& p, int deriv_cap) {
    require(static_cast<int>(evs.size()) >= p.j_max,
            "null flat output: need evolutions for all modes");
    FlatOutput z;
    z.kind_ = FlatOutput::Kind::Null;
    z.i_max_ = p.i_max;
    z.j_max_ = p.j_max;
    z.n_d_ = deriv_cap;
    z.bump_ = BumpParams::from(p);
    z.evs_ = std::move(evs);
    z.f_table_.resize(p.j_max);
    const int stride = deriv_cap + 1;
    std::vector<double> noise;
    for (int jm1 = 0; jm1 < p.j_max; ++jm1) {
        const ModeEvolution& ev = z.evs_[jm1];
        std::vector<double>& row = z.f_table_[jm1];
        row.assign(static_cast<size_t>(ev.nt() + 1) * stride, kNan);
        for (int k = 0; k <= ev.nt(); ++k) {
            if (ev.time(k) >= ev.t_min - 1e-12 * ev.dt) {
                std::vector<double> d = trace_f_derivs(ev, k, deriv_cap, &noise);
                // derivatives below their roundoff bound carry no signal;
                // their series weights are negligible, so drop them
                for (int n = 1; n <= deriv_cap; ++n)
                    if (std::fabs(d[n]) < 4.0 * noise[n]) d[n] = 0.0;
                std::copy(d.begin(), d.end(), row.begin() + static_cast<size_t>(k) * stride);
            } else {
                row[static_cast<size_t>(k) * stride] = trace_f(ev, k);
            }
        }
    }
    return z;
}

TargetSpec TargetSpec::exact(std::vector<TargetTerm> t) {
    TargetSpec s;
    s.terms = std::move(t);
    return s;
}

TargetSpec TargetSpec::callable(std::function<double(int, int, double, double)> fn, int max_p,
                                int max_q) {
    TargetSpec s;
    s.partials = std::move(fn);
    s.max_p = max_p;
    s.max_q = max_q;
    return s;
}

std::function<double(int, int, double, double)> target_partials(const TargetSpec& target,
                                                                const GenFunTable& table,
                                                                const TransverseBasis& basis) {
    require(target.is_exact(), "target_partials: expects an exact-combination target");
    (void)basis;
    const std::vector<TargetTerm> terms = target.terms;
    const GenFunTable* tbl = &table;
    return [terms, tbl](int p, int q, double x, double y) {
        double acc = 0.0;
        for (const TargetTerm& tm : terms)
            acc += tm.beta * series_deriv_eval(tbl->entry(tm.i, tm.j), x, p) *
                   basis_deriv(tm.j, q, y);
        return acc;
    };
}

ReachCoefficients reach_coefficients(const TargetSpec& target, const GenFunTable& table,
                                     const TransverseBasis& basis, const Params& p) {
    (void)table;
    ReachCoefficients rc;
    rc.i_max = p.i_max;
    rc.j_max = p.j_max;
    rc.b.assign(static_cast<size_t>(p.j_max) * (p.i_max + 1), 0.0);
    if (target.is_exact()) {
        rc.source = "exact-combination";
        for (const TargetTerm& tm : target.terms) {
            require(tm.i >= 0 && tm.i <= p.i_max && tm.j >= 1 && tm.j <= p.j_max,
                    "reach target: term outside table range");
            rc.at(tm.i, tm.j) += tm.beta;
        }
        return rc;
    }
    rc.source = "callable";
    require(target.max_p >= 3 * p.i_max + 2 && target.max_q >= 2 * p.i_max,
            "reach target: callable cannot supply the required derivative orders");
    Grid g = Grid::make(p, AxisKind::Chebyshev);
    const std::vector<double> wy = quadrature_weights(g.y, AxisKind::Uniform);
    for (int i = 0; i <= p.i_max; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        for (int j = 1; j <= p.j_max; ++j) {
            double acc = 0.0;
            for (size_t iy = 0; iy < g.y.size(); ++iy) {
                const double y = g.y[iy];
                double pi_val = 0.0;
                for (int n = 0; n <= i; ++n)
                    for (int m = 0; m <= n; ++m)
                        pi_val += binomial(i, n) * binomial(n, m) *
                                  std::pow(p.a, i - n) *
                                  target.partials(2 * m + i + 2, 2 * (n - m), 0.0, y);
                acc += wy[iy] * basis.eval(j, y) * pi_val;
            }
            rc.at(i, j) = sign * acc;
        }
    }
    return rc;
}

FlatOutput reach_flat_output(const ReachCoefficients& b, const Params& p) {
    require(b.i_max >= p.i_max && b.j_max >= p.j_max,
            "reach flat output: coefficient table too small");
    double c0 = 0.0;
    for (int j = 1; j <= p.j_max; ++j) c0 = std::max(c0, std::fabs(b.at(0, j)));
    if (c0 == 0.0) c0 = 1e-30;
    double h = 0.0;
    for (int j = 1; j <= p.j_max; ++j)
        for (int i = 1; i <= p.i_max; ++i) {
            const double v = std::fabs(b.at(i, j));
            if (v > 0.0)
                h = std::max(h, std::pow(v / (c0 * factorial(2 * i)), 1.0 / i));
        }
    const double ee = std::exp(std::exp(-1.0));
    const double h_tilde = (h == 0.0) ? 1.0 : h * ee * 1.25;

    FlatOutput z;
    z.kind_ = FlatOutput::Kind::Reach;
    z.i_max_ = p.i_max;
    z.j_max_ = p.j_max;
    z.bump_ = BumpParams::from(p);
    z.interp_.reserve(p.j_max);
    for (int j = 1; j <= p.j_max; ++j) {
        std::vector<double> d(p.i_max + 1);
        for (int i = 0; i <= p.i_max; ++i) d[i] = b.at(i, j);
        z.interp_.push_back(borel_interpolate(d, h, h_tilde, p.t_final));
    }
    return z;
}

namespace {

// Per-(j, t) inner sums S_j(x_i, t_k) = sum_i g_{i,j}(x) z_j^{(i)}(t_k).
struct SeriesEval {
    const GenFunTable* table;
    const FlatOutput* z;
    std::vector<std::vector<double>> gx; // [(j-1)*(i_max+1)+i][ix]

    SeriesEval(const GenFunTable& t, const FlatOutput& zz, const std::vector<double>& xs)
        : table(&t), z(&zz) {
        gx.resize(static_cast<size_t>(zz.j_max()) * (zz.i_max() + 1));
        for (int j = 1; j <= zz.j_max(); ++j)
            for (int i = 0; i <= zz.i_max(); ++i) {
                std::vector<double>& col = gx[static_cast<size_t>(j - 1) * (zz.i_max() + 1) + i];
                col.resize(xs.size());
                for (size_t ix = 0; ix < xs.size(); ++ix)
                    col[ix] = t.entry(i, j).eval(xs[ix]);
            }
    }

    // mode profile at time t: out[ix] = S_j(x_ix, t)
    void mode_profile(int j, double t, std::vector<double>& out) const {
        const Jet jet = z->z_jet(j, t, z->i_max());
        std::fill(out.begin(), out.end(), 0.0);
        double fact = 1.0;
        for (int i = 0; i <= z->i_max(); ++i) {
            if (i >= 2) fact *= i;
            const double zi = jet.coeff(i) * fact; // z^{(i)}
            if (zi == 0.0) continue;
            const std::vector<double>& col = gx[static_cast<size_t>(j - 1) * (z->i_max() + 1) + i];
            for (size_t ix = 0; ix < out.size(); ++ix) out[ix] += col[ix] * zi;
        }
    }
};

} // namespace

Field assemble_series_state(const GenFunTable& table, const FlatOutput& z, const Grid& grid,
                            double t_lo) {
    const TransverseBasis basis(z.j_max());
    SeriesEval se(table, z, grid.x);
    Field u = Field::zeros3d(grid, "state");
    std::vector<double> prof(grid.x.size());
    for (int k = 0; k < grid.nt(); ++k) {
        const double t = grid.t[k];
        if (t < t_lo) continue;
        for (int j = 1; j <= z.j_max(); ++j) {
            se.mode_profile(j, t, prof);
            for (int ix = 0; ix < grid.nx(); ++ix) {
                if (prof[ix] == 0.0) continue;
                for (int iy = 0; iy < grid.ny(); ++iy)
                    u.at(k, ix, iy) += prof[ix] * basis.eval(j, grid.y[iy]);
            }
        }
    }
    return u;
}

Field assemble_state(const GenFunTable& table, const FlatOutput& z, const Grid& grid) {
    if (z.kind() == FlatOutput::Kind::Reach)
        return assemble_series_state(table, z, grid, -1.0);

    // Null synthesis: the state on [0, tau) is the free evolution itself; the
    // series takes over where the bump starts acting.
    Field u = assemble_series_state(table, z, grid, z.tau());
    const TransverseBasis basis(z.j_max());
    for (int k = 0; k < grid.nt(); ++k) {
        const double t = grid.t[k];
        if (t >= z.tau()) continue;
        for (int j = 1; j <= z.j_max(); ++j) {
            const ModeEvolution& ev = z.evolutions()[j - 1];
            const int ek = ev.time_index(t);
            const double* snap = ev.snapshot(ek);
            std::vector<double> prof;
            if (static_cast<int>(grid.x.size()) == ev.nx() &&
                grid.x_kind == AxisKind::Chebyshev) {
                prof.assign(snap, snap + ev.nx());
            } else {
                prof = cheb::interpolate(ev.x, std::vector<double>(snap, snap + ev.nx()),
                                         grid.x);
            }
            for (int ix = 0; ix < grid.nx(); ++ix)
                for (int iy = 0; iy < grid.ny(); ++iy)
                    u.at(k, ix, iy) += prof[ix] * basis.eval(j, grid.y[iy]);
        }
    }
    return u;
}

double splice_gap(const GenFunTable& table, const FlatOutput& z, const Grid& grid, double t) {
    require(z.kind() == FlatOutput::Kind::Null, "splice gap: null synthesis only");
    const TransverseBasis basis(z.j_max());
    SeriesEval se(table, z, grid.x);
    std::vector<double> prof(grid.x.size());
    double gap = 0.0;
    std::vector<double> series_slice(grid.x.size() * grid.y.size(), 0.0);
    std::vector<double> sim_slice(grid.x.size() * grid.y.size(), 0.0);
    for (int j = 1; j <= z.j_max(); ++j) {
        se.mode_profile(j, t, prof);
        const ModeEvolution& ev = z.evolutions()[j - 1];
        const double* snap = ev.snapshot(ev.time_index(t));
        std::vector<double> simprof;
        if (static_cast<int>(grid.x.size()) == ev.nx() && grid.x_kind == AxisKind::Chebyshev)
            simprof.assign(snap, snap + ev.nx());
        else
            simprof = cheb::interpolate(ev.x, std::vector<double>(snap, snap + ev.nx()), grid.x);
        for (int ix = 0; ix < grid.nx(); ++ix)
            for (int iy = 0; iy < grid.ny(); ++iy) {
                const double e = basis.eval(j, grid.y[iy]);
                series_slice[ix * grid.ny() + iy] += prof[ix] * e;
                sim_slice[ix * grid.ny() + iy] += simprof[ix] * e;
            }
    }
    for (size_t m = 0; m < series_slice.size(); ++m)
        gap = std::max(gap, std::fabs(series_slice[m] - sim_slice[m]));
    return gap;
}

ControlSignal assemble_control(const GenFunTable& table,
                               const std::shared_ptr<const FlatOutput>& z, const Grid& grid) {
    const FlatOutput& zf = *z;
    const TransverseBasis basis(zf.j_max());
    const bool is_null = zf.kind() == FlatOutput::Kind::Null;

    // g_{i,j}(-1), the only spatial data the control needs.
    std::vector<std::vector<double>> g1(zf.j_max() + 1);
    for (int j = 1; j <= zf.j_max(); ++j) {
        g1[j].resize(zf.i_max() + 1);
        for (int i = 0; i <= zf.i_max(); ++i) g1[j][i] = table.entry(i, j).eval(-1.0);
    }

    ControlSignal cs;
    cs.y = grid.y;
    cs.t = grid.t;
    cs.j_max = zf.j_max();
    cs.tau = zf.tau();
    cs.synthesis_type = is_null ? "null" : "reach";
    cs.samples.assign(grid.t.size() * grid.y.size(), 0.0);
    cs.mode_coeffs.assign(grid.t.size() * static_cast<size_t>(zf.j_max()), 0.0);

    // node tables of h_j and dh_j/dt (from z^{(i+1)})
    auto hdot_modes = std::make_shared<std::vector<double>>(
        grid.t.size() * static_cast<size_t>(zf.j_max()), 0.0);
    for (size_t k = 0; k < grid.t.size(); ++k) {
        const double t = grid.t[k];
        if (is_null && t < zf.tau()) continue; // h = 0 before the switch
        for (int j = 1; j <= zf.j_max(); ++j) {
            const Jet jet = zf.z_jet(j, t, zf.i_max() + 1);
            double hj = 0.0, hdj = 0.0, fact = 1.0;
            for (int i = 0; i <= zf.i_max(); ++i) {
                if (i >= 2) fact *= i;
                hj += g1[j][i] * jet.coeff(i) * fact;
                hdj += g1[j][i] * jet.coeff(i + 1) * fact * (i + 1);
            }
            cs.mode_coeffs[k * zf.j_max() + (j - 1)] = hj;
            (*hdot_modes)[k * zf.j_max() + (j - 1)] = hdj;
            for (size_t iy = 0; iy < grid.y.size(); ++iy)
                cs.samples[k * grid.y.size() + iy] += hj * basis.eval(j, grid.y[iy]);
        }
    }

    std::shared_ptr<const FlatOutput> zp = z;
    const double tau = zf.tau();
    const auto h_nodes = std::make_shared<std::vector<double>>(cs.mode_coeffs);
    const std::vector<double> tvec = cs.t;
    const int jmax = cs.j_max;
    cs.mode_eval = [zp, g1, tau, is_null, h_nodes, hdot_modes, tvec,
                    jmax](int j, double t) -> std::pair<double, double> {
        if (is_null && t < tau) return {0.0, 0.0};
        const double dt = tvec[1] - tvec[0];
        const double pos = (t - tvec[0]) / dt;
        const int near = static_cast<int>(std::lround(pos));
        const bool on_node = near >= 0 && near < static_cast<int>(tvec.size()) &&
                             std::fabs(pos - near) < 1e-6;
        if (zp->kind() == FlatOutput::Kind::Reach || on_node) {
            if (on_node) {
                return {(*h_nodes)[static_cast<size_t>(near) * jmax + (j - 1)],
                        (*hdot_modes)[static_cast<size_t>(near) * jmax + (j - 1)]};
            }
            const int deg = zp->i_max() + 1;
            const Jet jet = zp->z_jet(j, t, deg);
            double h = 0.0, hdot = 0.0, fact = 1.0;
            for (int i = 0; i <= zp->i_max(); ++i) {
                if (i >= 2) fact *= i;
                h += g1[j][i] * jet.coeff(i) * fact;
                hdot += g1[j][i] * jet.coeff(i + 1) * fact * (i + 1);
            }
            return {h, hdot};
        }
        // null synthesis off-node: cubic Hermite between the node tables
        const int k0 = std::clamp(static_cast<int>(std::floor(pos)), 0,
                                  static_cast<int>(tvec.size()) - 2);
        const double th = pos - k0;
        const size_t i0 = static_cast<size_t>(k0) * jmax + (j - 1);
        const size_t i1 = i0 + jmax;
        const double h0 = (*h_nodes)[i0], h1 = (*h_nodes)[i1];
        const double d0 = (*hdot_modes)[i0] * dt, d1 = (*hdot_modes)[i1] * dt;
        const double t2 = th * th, t3 = t2 * th;
        const double h = (2 * t3 - 3 * t2 + 1) * h0 + (t3 - 2 * t2 + th) * d0 +
                         (-2 * t3 + 3 * t2) * h1 + (t3 - t2) * d1;
        const double hd = ((6 * t2 - 6 * th) * h0 + (3 * t2 - 4 * th + 1) * d0 +
                           (-6 * t2 + 6 * th) * h1 + (3 * t2 - 2 * th) * d1) /
                          dt;
        return {h, hd};
    };
    return cs;
}

FlatBoundFit fit_flat_bound(const FlatOutput& z, const Params& p,
                            const std::vector<double>& times) {
    FlatBoundFit fit;
    fit.reach_form = z.kind() == FlatOutput::Kind::Reach;
    fit.s = p.gevrey_order;
    const int im = z.i_max();
    const int jm = z.j_max();

    // peak |z^{(i)}_j| over the sampled times
    std::vector<std::vector<double>> peak(jm + 1, std::vector<double>(im + 1, 0.0));
    for (int j = 1; j <= jm; ++j)
        for (double t : times) {
            const Jet jet = z.z_jet(j, t, im);
            double fact = 1.0;
            for (int i = 0; i <= im; ++i) {
                if (i >= 2) fact *= i;
                peak[j][i] = std::max(peak[j][i], std::fabs(jet.coeff(i) * fact));
            }
        }

    // least squares for log R in  log|z| = log M_j + w(i) - i log R, with
    // w(i) = s log i! (null) or log (2i)! and slope 2i (reach)
    auto weight = [&](int i) { return fit.reach_form ? std::lgamma(2.0 * i + 1.0)
                                                     : fit.s * std::lgamma(i + 1.0); };
    auto islope = [&](int i) { return fit.reach_form ? 2.0 * i : static_cast<double>(i); };
    double num = 0.0, den = 0.0;
    for (int j = 1; j <= jm; ++j) {
        double su = 0.0, si = 0.0;
        int cnt = 0;
        for (int i = 0; i <= im; ++i) {
            if (peak[j][i] <= 0.0) continue;
            su += std::log(peak[j][i]) - weight(i);
            si += islope(i);
            ++cnt;
        }
        if (cnt < 2) continue;
        const double mu_u = su / cnt, mu_i = si / cnt;
        for (int i = 0; i <= im; ++i) {
            if (peak[j][i] <= 0.0) continue;
            const double du = std::log(peak[j][i]) - weight(i) - mu_u;
            const double di = islope(i) - mu_i;
            num += du * di;
            den += di * di;
        }
    }
    const double log_r = den > 0.0 ? -num / den : 0.0;
    fit.r = std::exp(std::clamp(log_r, -50.0, 50.0));

    // envelope correction: m_j makes the bound hold at every sample
    fit.m_j.assign(jm + 1, 0.0);
    const TransverseBasis basis(jm);
    fit.sum_mj_exp = 0.0;
    for (int j = 1; j <= jm; ++j) {
        double mj = 0.0;
        for (int i = 0; i <= im; ++i) {
            if (peak[j][i] <= 0.0) continue;
            mj = std::max(mj, std::exp(std::log(peak[j][i]) - weight(i) + islope(i) * log_r));
        }
        fit.m_j[j] = mj;
        fit.sum_mj_exp += mj * std::exp(std::sqrt(basis.lambda(j)));
    }
    return fit;
}

TruncationReport truncation_bound(const Params& p, const FlatBoundFit& fit, double cor_c) {
    TruncationReport rep;
    rep.cor_c = cor_c;
    const TransverseBasis basis(p.j_max);

    // series term envelope in i (after |g| <= C e^{sqrt(lambda)}/(2i)! and the
    // fitted z bound): reach gives r^{-2i} exactly; the null form decays even
    // faster and is summed by ratio.
    auto phi = [&](int i) {
        if (fit.reach_form) return std::pow(fit.r, -2.0 * i);
        return std::exp(fit.s * std::lgamma(i + 1.0) - std::lgamma(2.0 * i + 1.0) -
                        i * std::log(fit.r));
    };
    auto tail_from = [&](int start) {
        double term = phi(start);
        double acc = term;
        for (int i = start + 1; i < start + 200; ++i) {
            const double next = phi(i);
            acc += next;
            if (next < 1e-3 * term && next < 1e-300) break;
            term = next;
        }
        return acc;
    };

    const double sqrt2 = std::sqrt(2.0);
    for (int j = 1; j <= p.j_max; ++j)
        rep.i_tail += sqrt2 * cor_c * fit.m_j[j] * std::exp(std::sqrt(basis.lambda(j))) *
                      tail_from(p.i_max + 1);

    // j tail: fit m_j e^{sqrt(lambda_j)} <= K e^{-beta j} and sum the
    // geometric envelope past J_max.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (int j = 1; j <= p.j_max; ++j) {
        const double v = fit.m_j[j] * std::exp(std::sqrt(basis.lambda(j)));
        if (v <= 0.0) continue;
        const double lv = std::log(v);
        sx += j;
        sy += lv;
        sxx += static_cast<double>(j) * j;
        sxy += j * lv;
        ++cnt;
    }
    if (cnt >= 2 && sxx * cnt - sx * sx > 0.0) {
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        const double inter = (sy - slope * sx) / cnt;
        rep.fitted_beta = -slope;
        rep.fitted_k = std::exp(inter);
        if (rep.fitted_beta > 0.0) {
            const double q = std::exp(-rep.fitted_beta);
            rep.j_tail = sqrt2 * cor_c * rep.fitted_k * std::pow(q, p.j_max + 1) / (1.0 - q) *
                         tail_from(0);
        } else {
            rep.j_tail = std::numeric_limits<double>::infinity();
        }
    }
    rep.total = rep.i_tail + rep.j_tail;
    return rep;
}

CompatReport check_compatibility(const TargetSpec& target, int n_max, const GenFunTable& table,
                                 const TransverseBasis& basis, const Params& p) {
    CompatReport rep;
    rep.r0 = std::cbrt(9.0 * (p.a + 2.0)) * std::exp(1.0 / (3.0 * std::exp(1.0)));

    std::function<double(int, int, double, double)> d =
        target.is_exact() ? target_partials(target, table, basis) : target.partials;
    const int cap_p = target.is_exact() ? 3 * n_max + 3 : target.max_p;
    const int cap_q = target.is_exact() ? 2 * n_max + 2 : target.max_q;
    require(cap_p >= 3 * n_max + 1 && cap_q >= 2 * n_max,
            "compatibility: derivative orders unavailable for n_max");

    Grid g = Grid::make(p, AxisKind::Chebyshev);

    // P^n u1 via the binomial expansion, evaluated pointwise.
    auto pn = [&](int n, int extra_x, double x, double y) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k)
            for (int m = 0; m <= k; ++m)
                acc += binomial(n, k) * binomial(k, m) * std::pow(p.a, n - k) *
                       d(2 * m + n + extra_x, 2 * (k - m), x, y);
        return acc;
    };

    double scale = 0.0;
    for (double x : g.x)
        for (double y : g.y) scale = std::max(scale, std::fabs(d(0, 0, x, y)));

    for (int n = 0; n <= n_max; ++n) {
        for (double y : g.y) {
            rep.max_boundary_violation =
                std::max({rep.max_boundary_violation, std::fabs(pn(n, 0, 0.0, y)),
                          std::fabs(pn(n, 1, 0.0, y))});
        }
        for (double x : g.x) {
            rep.max_boundary_violation =
                std::max({rep.max_boundary_violation, std::fabs(pn(n, 0, x, 0.0)),
                          std::fabs(pn(n, 0, x, 1.0))});
        }
    }
    rep.structural_pass = rep.max_boundary_violation <= 1e-9 * std::max(1.0, scale);

    // Gevrey-(2/3, 2/3) envelope fit over a modest derivative range.
    const int fit_p = std::min(cap_p, 10), fit_q = std::min(cap_q, 10);
    double s1 = 0.0, sp = 0.0, sq = 0.0, spp = 0.0, sqq = 0.0, spq = 0.0;
    double sv = 0.0, svp = 0.0, svq = 0.0;
    for (int pp = 0; pp <= fit_p; ++pp)
        for (int qq = 0; qq <= fit_q; ++qq) {
            double amax = 0.0;
            for (double x : g.x)
                for (double y : g.y) amax = std::max(amax, std::fabs(d(pp, qq, x, y)));
            if (amax <= 0.0) continue;
            const double v = std::log(amax) - (2.0 / 3.0) * (std::lgamma(pp + 1.0) +
                                                             std::lgamma(qq + 1.0));
            s1 += 1.0;
            sp += pp;
            sq += qq;
            spp += static_cast<double>(pp) * pp;
            sqq += static_cast<double>(qq) * qq;
            spq += static_cast<double>(pp) * qq;
            sv += v;
            svp += v * pp;
            svq += v * qq;
        }
    // normal equations for v ~ c - p log R1 - q log R2
    const double a11 = s1, a12 = -sp, a13 = -sq;
    const double a22 = spp, a23 = spq, a33 = sqq;
    const double b1 = sv, b2 = -svp, b3 = -svq;
    const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                       a13 * (a12 * a23 - a22 * a13);
    if (std::fabs(det) > 1e-12) {
        const double c = (b1 * (a22 * a33 - a23 * a23) - a12 * (b2 * a33 - a23 * b3) +
                          a13 * (b2 * a23 - a22 * b3)) /
                         det;
        const double lr1 = (a11 * (b2 * a33 - a23 * b3) - b1 * (a12 * a33 - a23 * a13) +
                            a13 * (a12 * b3 - b2 * a13)) /
                           det;
        const double lr2 = (a11 * (a22 * b3 - b2 * a23) - a12 * (a12 * b3 - b2 * a13) +
                            b1 * (a12 * a23 - a22 * a13)) /
                           det;
        rep.fitted_c = std::exp(c);
        rep.fitted_r1 = std::exp(lr1);
        rep.fitted_r2 = std::exp(lr2);
    }
    return rep;
}

Field target_field(const TargetSpec& target, const GenFunTable& table,
                   const TransverseBasis& basis, const Grid& grid) {
    require(target.is_exact(), "target_field: expects an exact-combination target");
    Field u = Field::zeros2d(grid, "target");
    for (const TargetTerm& tm : target.terms) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const double gx = table.entry(tm.i, tm.j).eval(grid.x[ix]);
            for (int iy = 0; iy < grid.ny(); ++iy)
                u.at(ix, iy) += tm.beta * gx * basis.eval(tm.j, grid.y[iy]);
        }
    }
    return u;
}

} // namespace zkflat
