"""Smoke tests for the python bindings (fast, coarse grids)."""

import math

import pytest

import zkflat


def small_params(**kw):
    args = dict(a=1.0, t_final=0.5, tau=0.2, s=1.6, m=1.0,
                i_max=5, j_max=2, nx=32, ny=33, nt=200)
    args.update(kw)
    return zkflat.Params(**args)


def test_basis_and_transforms():
    basis = zkflat.make_basis(3)
    assert basis.lam(1) == pytest.approx(math.pi ** 2, rel=1e-14)
    assert basis.eval(1, 0.0) == 0.0
    assert basis.eval(2, 0.25) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    y = [k / 32 for k in range(33)]
    f = [basis.eval(2, yy) for yy in y]
    c = zkflat.sine_analyze(f, y, basis)
    assert c[1] == pytest.approx(1.0, abs=1e-12)
    assert abs(c[0]) < 1e-12 and abs(c[2]) < 1e-12
    back = zkflat.sine_synthesize(c, y, basis)
    assert max(abs(a - b) for a, b in zip(back, f)) < 1e-12


def test_table_bounds_and_json():
    p = small_params(i_max=6, j_max=3)
    table = zkflat.build_table(p)
    rep = zkflat.check_bound(table, samples=51)
    assert rep["pass"]
    assert 0.0 < rep["max_ratio"] <= 1.0
    # cauchy data and the degenerate closed form
    assert table.eval(0, 1, 0.0) == 0.0
    assert table.eval(0, 1, 0.0, 2) == pytest.approx(1.0, abs=1e-14)
    back = zkflat.table_from_json(table.to_json())
    assert back.to_json() == table.to_json()


def test_bump_partition_and_step():
    for rho in [-0.2, 0.1, 0.33, 0.5, 0.77, 1.3]:
        assert zkflat.bump(rho) + zkflat.bump(1.0 - rho) == pytest.approx(1.0, abs=1e-14)
    assert zkflat.bump_deriv(-0.5, 3) == 0.0
    p = small_params()
    assert zkflat.step_deriv(p, 0.05, 1) == 0.0  # before the switch
    assert zkflat.step_deriv(p, 0.05, 0) == 1.0


def test_interpolant_matches_prescription():
    d = [1.0, -0.4, 0.25]
    f = zkflat.borel_interpolate(d, 0.3, 0.6, anchor=1.0)
    for q, dq in enumerate(d):
        assert f.deriv(1.0, q) == pytest.approx(dq, abs=1e-10)


def test_null_pipeline():
    out = zkflat.run_null(small_params(), "x*(x+1)*sin(pi*y)")
    assert out["control_pre_tau_max"] <= 1e-12
    assert out["terminal_rel"] <= 1e-3
    assert out["splice_gap_rel"] <= 1e-2
    h = out["control"]["h"]
    assert len(h) == 201 and len(h[0]) == 33


def test_reach_pipeline():
    out = zkflat.run_reach(small_params(), [(0, 1, 1.0), (1, 2, 0.3)])
    assert out["terminal_rel"] <= 1e-3
    assert out["interp_terminal_rel"] <= 1e-8
    assert out["initial_zero_max"] <= 1e-12
    coeffs = {(i, j): b for i, j, b in out["coefficients"]}
    assert coeffs[(0, 1)] == pytest.approx(1.0)
    assert coeffs[(1, 2)] == pytest.approx(0.3)
    assert len(coeffs) == 2


def test_free_energy_identity():
    out = zkflat.run_free(small_params(nx=48), "x*x*(x+1)*sin(pi*y)")
    assert out["worst_identity_rel"] <= 1e-6
    assert out["worst_bc"] <= 1e-10


def test_invalid_params_raise():
    with pytest.raises(Exception):
        zkflat.Params(tau=2.0, t_final=1.0)
