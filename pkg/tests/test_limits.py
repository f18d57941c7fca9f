"""Hard-to-soft scaling maps and convergence to the soft-edge objects."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardedge import limits
from hardedge.errors import DomainError

INF = limits.ScaleMap(math.inf)


def test_scale_map_basics():
    m = limits.ScaleMap(8.0)
    assert m.cbrt == pytest.approx(2.0) and m.eps == pytest.approx(0.5) and m.a == 16.0
    assert m.power(Fraction(8, 3)) == pytest.approx(256.0)
    assert m.power(Fraction(-2, 3)) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        m.power(Fraction(1, 2))
    with pytest.raises(ValueError):
        limits.ScaleMap(0.0)
    assert INF.is_limit and INF.eps == 0.0


def test_to_hard_coords_examples():
    # [DERIVED] alpha = 8 at the window centre
    assert limits.to_hard_coords(limits.ScaleMap(8.0), 0.0, 0.0) == pytest.approx((8.0, 1 / 64))
    with pytest.raises(DomainError):
        limits.to_hard_coords(limits.ScaleMap(8.0), 0.0, -4.0)


@given(st.floats(1.0, 1e6))
def test_window_centre(alpha):
    x, t = limits.to_hard_coords(limits.ScaleMap(alpha), 0.0, 0.0)
    assert x == pytest.approx(alpha) and t == pytest.approx(alpha ** -2)


@given(st.floats(10.0, 1e5))
def test_to_hard_coords_injective_on_window(alpha):
    m = limits.ScaleMap(alpha)
    w = np.linspace(-2, 2, 9)
    xs, ts = limits.to_hard_coords(m, w, w)
    assert np.all(np.diff(xs) > 0) and np.all(np.diff(ts) > 0) and np.all(ts > 0)


def test_exponent_bookkeeping():
    E = limits.EXPONENTS
    # [PAPER] scaling dimensions of y and r
    assert (E["Delta_y"], E["Delta_r"]) == (Fraction(8, 3), Fraction(-2, 3))
    # [TRIVIAL] the operator prefactor: alpha^(-2/3) alpha^(8/3) = alpha^2
    assert E["d_dx"] + E["d_dt"] == 2
    assert all(isinstance(v, Fraction) and (3 * v).denominator == 1 for v in E.values())


def test_scale_hard_functions_examples():
    m = limits.ScaleMap(1e3)
    # [TRIVIAL] leading-order r
    assert limits.scale_hard_functions(m, {"r": -1.0}, "thm1a")["r"] == 0.0
    # [DERIVED] round trip of the q scaling
    out = limits.scale_hard_functions(m, {"q": 0.36706 / m.cbrt}, "thm2")
    assert out["q"] == pytest.approx(0.36706, rel=1e-14)
    with pytest.raises(ValueError):
        limits.scale_hard_functions(m, {"q": 1.0}, "thm4")
    with pytest.raises(ValueError):
        limits.scale_hard_functions(m, {"w": 1.0}, "thm1a")
    with pytest.raises(DomainError):
        limits.scale_hard_functions(m, {"q": math.inf}, "thm2")


def test_scale_hard_functions_inverts_y_map():
    m = limits.ScaleMap(500.0)
    y1 = 0.7
    y_hard = -m.alpha ** 3 * (1 - y1 / m.cbrt)
    assert limits.scale_hard_functions(m, {"y": y_hard}, "thm1a")["y"] == pytest.approx(y1, rel=1e-10)


def test_scaled_state_round_trip(hm):
    m = limits.ScaleMap(1e3)
    sc = limits.ScaledBeta2(m, hm)
    t, q, y, phi = sc.hard_state(0.0)
    assert (t, q) == pytest.approx((m.alpha ** -2, float(hm.q_at(0.0)) / m.cbrt))
    soft = limits.scale_hard_functions(m, {"y": y, "q": q}, "thm1a")
    assert soft["y"] == pytest.approx(float(hm.qp_at(0.0) / hm.q_at(0.0)), rel=1e-10)
    assert soft["q"] == pytest.approx(float(hm.q_at(0.0)), rel=1e-12)
    # gauged and plain phi differ by exp(s/eps)
    s = 1.0
    plain, gauged = sc.hard_state(s)[3], sc.hard_state(s, gauged=True)[3]
    assert gauged == pytest.approx(plain * math.exp(s / m.eps), rel=1e-10)
    b4 = limits.ScaledBeta4(m, hm)
    t4, q4, qp4, sp, sm = b4.hard_state(0.5)
    assert sp * sm == pytest.approx(1 - q4 * q4, rel=1e-9)


def test_alpha_infinity_fixtures(hm):
    # [DERIVED] the exact limit data satisfy the limiting system
    assert limits.limit_ode_residuals(INF, hm)["max"] <= 1e-6
    # [TRIVIAL] direct assembly at alpha = inf
    assert limits.limit_pair_distance(INF, "thm4", hm) <= 1e-6
    assert limits.limit_pair_distance(INF, "thm5", hm) == 0.0


def test_residuals_decrease(hm):
    # [DERIVED] sweep; only the limit is claimed, so only monotone decrease is asserted
    r2 = limits.limit_ode_residuals(limits.ScaleMap(1e2), hm)
    r3 = limits.limit_ode_residuals(limits.ScaleMap(1e3), hm)
    assert r3["max"] < r2["max"]
    assert r3["r1_vs_hm"] < r2["r1_vs_hm"]
    assert set(r2) >= {"beta2_y", "beta2_r", "beta4_pii", "r1_vs_hm", "max"}


@pytest.mark.parametrize("which", ["thm4", "thm5"])
def test_pair_distance_decreases(hm, which):
    d2 = limits.limit_pair_distance(limits.ScaleMap(1e2), which, hm, n=5)
    d3 = limits.limit_pair_distance(limits.ScaleMap(1e3), which, hm, n=5)
    assert d3 < d2


def test_gauge_ablation_diverges(hm):
    # [DERIVED] dropping the exponential gauge blows the distance up
    m = limits.ScaleMap(1e3)
    with_gauge = limits.limit_pair_distance(m, "thm4", hm, n=5)
    without = limits.limit_pair_distance(m, "thm4", hm, n=5, gauge=False)
    assert without > 1e3 * with_gauge


def test_pair_distance_validation(hm):
    with pytest.raises(ValueError):
        limits.limit_pair_distance(INF, "thm1a", hm)


def test_report_json(hm, tmp_path):
    rep = limits.sweep_report([1e2, 1e3, math.inf], hm)
    assert rep["monotone"] == {"ode": True, "thm4": True, "thm5": True}
    assert rep["records"][-1]["alpha"] == "inf"
    path = tmp_path / "sweep.json"
    limits.write_report(rep, path)
    text = path.read_text()
    back = json.loads(text)
    assert back["exponents"]["Delta_y"] == "8/3"
    assert text == json.dumps(back, indent=2, sort_keys=True) + "\n"
