"""Fokker-Planck solver and the closed-form solution."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardedge import fp
from hardedge.errors import DomainError, GridTooCoarse, InstabilityDetected, SingularInput


def closed(kappa):
    return lambda t, x: fp.gumbel_eval(kappa, t, x)


@pytest.fixture(scope="module")
def small():
    return fp.solve_fp(1.0, 1.0, fp.FPGrid.geometric(n_x=64, n_t=64))


@pytest.fixture(scope="module")
def tiny():
    return fp.solve_fp(1.0, 1.0, fp.FPGrid.geometric(n_x=32, n_t=32))


def test_grid_validation():
    with pytest.raises(ValueError):
        fp.FPGrid(np.geomspace(0.1, 1, 10), np.geomspace(5, 0.1, 20))
    with pytest.raises(ValueError):
        fp.FPGrid(np.linspace(0.0, 1, 20), np.geomspace(5, 0.1, 20))
    with pytest.raises(ValueError):
        fp.FPGrid(np.geomspace(0.1, 1, 20), np.geomspace(0.1, 5, 20))
    with pytest.raises(ValueError):
        fp.FPGrid(np.linspace(0.1, 1, 20), np.geomspace(5, 0.1, 20)).log_step


def test_solver_validation():
    g = fp.FPGrid.geometric(n_x=16, n_t=16)
    with pytest.raises(ValueError):
        fp.solve_fp(0.0, 1.0, g)
    with pytest.raises(ValueError):
        fp.solve_fp(1.0, 1.0, g, scheme="spectral")


def test_closed_form_agreement(small):
    # [DERIVED] closed-form comparison on a coarse grid
    assert fp.compare_fields(small, closed(1.0))["sup"] <= 1e-3


def test_refinement_improves(tiny, small):
    d32 = fp.compare_fields(tiny, closed(1.0))["sup"]
    d64 = fp.compare_fields(small, closed(1.0))["sup"]
    assert d32 / d64 >= 1.8


def test_initial_slice_is_one():
    # [TRIVIAL] with no warm-up the first slice is the initial condition
    g = fp.FPGrid.geometric(n_x=24, n_t=24)
    sol = fp.solve_fp(1.0, 1.0, g, t_inf=g.t_nodes[0])
    assert np.all(sol.F[0] == 1.0)


def test_field_bounds_and_monotonicity(small):
    F = small.F
    assert F.min() >= -1e-8 and F.max() <= 1 + 1e-6
    assert np.all(np.diff(F, axis=1) >= -1e-3)


def test_mass_loss_at_small_x(small):
    # [DERIVED] F at fixed small x decreases toward 0 as t decreases
    col = small.F[:, 3]
    assert np.all(np.diff(col) <= 1e-9)
    assert col[-1] < 1e-10


def test_generic_beta_runs():
    sol = fp.solve_fp(2.0, 0.5, fp.FPGrid.geometric(n_x=32, n_t=32))
    assert np.all(np.isfinite(sol.F))
    assert "Neumann" in sol.meta["right_boundary"]
    assert np.all(np.diff(sol.F, axis=1) >= -1e-3)


def test_inner_ratio():
    from scipy.special import gammaincc

    # shape 1 is the closed-form case
    assert fp._inner_ratio(1.0, 3.0, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert fp._inner_ratio(1.5, 3.0, 2.0) == pytest.approx(gammaincc(1.5, 3.0) / gammaincc(1.5, 2.0))
    # deep inside the layer the asymptotic form takes over
    assert fp._inner_ratio(1.5, 900.0, 880.0) == pytest.approx((900 / 880) ** 0.5 * math.exp(-20), rel=1e-3)


def test_left_boundary_insensitive_to_x_min():
    # moving x_min from 0.05 to 0.0125 at the same log step leaves F unchanged
    xs = np.geomspace(0.2, 6.0, 15)
    fields = []
    for x_min, n in [(0.05, 64), (0.0125, 80)]:
        g = fp.FPGrid.geometric(x_min=x_min, n_x=n, n_t=32)
        sol = fp.solve_fp(2.0, 0.5, g)
        fields.append(np.array([np.interp(np.log(xs), np.log(g.x_nodes), row) for row in sol.F]))
    assert np.max(np.abs(fields[0] - fields[1])) <= 2e-3


def test_upwind_scheme_is_first_order():
    g = fp.FPGrid.geometric(n_x=32, n_t=32)
    up = fp.compare_fields(fp.solve_fp(1.0, 1.0, g, scheme="upwind"), closed(1.0))["sup"]
    fit = fp.compare_fields(fp.solve_fp(1.0, 1.0, g), closed(1.0))["sup"]
    assert up > fit


def test_step_check_records_change():
    sol = fp.solve_fp(1.0, 1.0, fp.FPGrid.geometric(n_x=24, n_t=24), check_steps=True)
    assert sol.meta["step_halving_change"] <= 10 * 1e-8


def test_step_check_detects_sensitivity(monkeypatch):
    real = fp.integrate_ivp

    def jittery(f, s0, y0, s1, tol, s_eval=None, max_step=None):
        traj = real(f, s0, y0, s1, tol, s_eval, max_step)
        traj.states = traj.states + 1e3 * tol.rel_tol
        return traj

    monkeypatch.setattr(fp, "integrate_ivp", jittery)
    with pytest.raises(GridTooCoarse):
        fp.solve_fp(1.0, 1.0, fp.FPGrid.geometric(n_x=24, n_t=24), check_steps=True)


def test_instability_detector():
    with pytest.raises(InstabilityDetected):
        fp.solve_fp(1.0, 1.0, fp.FPGrid.geometric(n_x=32, n_t=32), tol=1.0)


def test_gumbel_examples():
    assert fp.gumbel_eval(1.0, 1.0, 1.0) == pytest.approx(math.exp(-2), rel=1e-15)
    assert fp.gumbel_eval(1.0, 1.0, 1.0) == pytest.approx(0.1353352832, abs=1e-10)
    assert fp.gumbel_eval(2.0, 1.0, 2.0) == pytest.approx(0.3678794412, abs=1e-10)
    # [TRIVIAL] boundary behaviour
    assert fp.gumbel_eval(1.0, 1.0, 1e-4) < 1e-300
    assert fp.gumbel_eval(1.0, 1e12, 1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        fp.gumbel_eval(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        fp.gumbel_eval(1.0, 1.0, -1.0)


def test_gumbel_partner_examples():
    assert fp.gumbel_partner(1.0, 1.2, 0.8, 1.0, 3.0) == 0.0
    assert fp.gumbel_partner(1.0, 1.2, 0.8, -1.0, 1.0) == pytest.approx(fp.gumbel_eval(1.0, 1.2, 0.8))
    with pytest.raises(SingularInput):
        fp.gumbel_partner(1.0, 1.2, 0.8, 0.0, 0.0)


def test_aux_residual_examples():
    res = fp.gumbel_aux_residuals(1.0, 1.0, 1.0)
    assert max(abs(v) for v in res.values()) <= 1e-12
    d = fp.gumbel_derivatives(1.0, 1.0, 1.0)
    assert d["Ft"] / d["Fx"] == pytest.approx(1 * (1 + 1) / 1, rel=1e-10)
    # [DERIVED] mismatched parameter
    assert abs(fp.gumbel_aux_residuals(1.0, 1.0, 1.0, a=1.5)["fp"]) >= 1e-3


@given(st.floats(0.3, 4), st.floats(0.2, 5), st.floats(0.2, 5))
def test_aux_residuals_vanish(kappa, t, x):
    res = fp.gumbel_aux_residuals(kappa, t, x)
    scale = max(1.0, *(abs(v) for v in fp.gumbel_derivatives(kappa, t, x).values())) * (1 + x * x + 1 / t) ** 2
    assert abs(res["fp"]) <= 1e-12 * scale
    assert abs(res["transport"]) <= 1e-12 * scale
    assert abs(res["second"]) <= 1e-12 * scale
    assert abs(res["ratio"]) <= 1e-10 * (1 + x * (x + kappa) / (kappa * t))


def test_aux_residuals_against_finite_differences():
    kappa, t, x, h = 1.3, 0.9, 1.4, 1e-5
    d = fp.gumbel_derivatives(kappa, t, x)
    f = lambda tt, xx: fp.gumbel_eval(kappa, tt, xx)
    assert d["Ft"] == pytest.approx((f(t + h, x) - f(t - h, x)) / (2 * h), rel=1e-8)
    assert d["Fx"] == pytest.approx((f(t, x + h) - f(t, x - h)) / (2 * h), rel=1e-8)
    assert d["Fxx"] == pytest.approx((f(t, x + h) - 2 * f(t, x) + f(t, x - h)) / h ** 2, rel=1e-4)


def test_compare_fields(tiny):
    ident = lambda t, x: tiny.F
    assert fp.compare_fields(tiny, ident) == {"sup": 0.0, "l2": 0.0, "scale": 1.0}
    half = fp.compare_fields(tiny, lambda t, x: 2 * tiny.F, normalize=True)
    assert half["scale"] == pytest.approx(0.5) and half["sup"] <= 1e-14
    with pytest.raises(ValueError):
        fp.compare_fields(tiny, lambda t, x: np.full_like(t, np.nan))


def test_field_csv(tiny, tmp_path):
    path = tmp_path / "field.csv"
    fp.write_field_csv(tiny, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "t,x,F"
    assert len(lines) == 1 + 32 * 32
    t0, x0, f0 = map(float, lines[1].split(","))
    assert (t0, x0, f0) == (tiny.grid.t_nodes[0], tiny.grid.x_nodes[0], tiny.F[0, 0])
