"""Painleve III systems of the hard edge.

Two coupled first-order families (A and B) for the pair (q, y), the
second-order PIII equations they imply, the beta = 4 Tracy-Widom type
equation for q with the auxiliary functions S+ and S-, and the algebraic
bridges between y, r = -1 + 2 q**2 and the cross-parameter partner.

Family A at parameter a is the same system as family B at 1 - a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularInput
from .num_core import Tolerances, Trajectory, integrate_ivp

GUARD = 1e-13

__all__ = [
    "PIIIParams",
    "CoupledState",
    "SPMState",
    "piii_rhs",
    "standard_form",
    "from_standard_form",
    "standard_residual",
    "coupled_rhs",
    "h_aux",
    "tw_rhs",
    "r_of_q",
    "q_of_r",
    "r_from_y",
    "y_from_r",
    "r_y_system_b_rhs",
    "r_equation_residual",
    "spm_rhs",
    "h0_eval",
    "cross_a_partner",
    "solve_coupled",
    "solve_tw",
    "tangent_second_derivative",
    "coupled_piii_residual",
]


@dataclass(frozen=True)
class PIIIParams:
    family: str = "A"
    a: float = 0.0
    sign: int = -1

    def __post_init__(self):
        if self.family not in ("A", "B"):
            raise ValueError("family must be 'A' or 'B'")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not math.isfinite(self.a):
            raise ValueError("a must be finite")

    def coefficients(self) -> tuple[float, float]:
        """(c2, c4) in y'' = ... + c2 y**2/t + c4/t**4 - 1/(t**6 y)."""
        c, a = self.sign, self.a
        if self.family == "A":
            return -c * a, c * (a - 1)
        return c * (a - 1), -c * a


@dataclass(frozen=True)
class CoupledState:
    t: float
    q: float
    y: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")


@dataclass(frozen=True)
class SPMState:
    t: float
    s_plus: float
    s_minus: float


def _check_t(t):
    if abs(t) < GUARD:
        raise SingularInput(f"t={t} is too close to 0")


def _check_y(y):
    if abs(y) < GUARD:
        raise SingularInput(f"y={y} is too close to 0")


def _check_q(q):
    if abs(q * q - 1) < GUARD:
        raise SingularInput(f"q**2={q * q} is too close to 1")


def piii_rhs(params: PIIIParams, t: float, y: float, yp: float) -> float:
    """y'' of the selected PIII variant."""
    _check_t(t)
    _check_y(y)
    c2, c4 = params.coefficients()
    return yp * yp / y - yp / t + y ** 3 + c2 * y * y / t + c4 / t ** 4 - 1 / (t ** 6 * y)


def standard_form(t: float, y: float, yp: float | None = None):
    """Map (t, y[, y']) to (xi, z[, z']) with xi = t**-1/2 and y = xi**3 z."""
    if not t > GUARD:
        raise SingularInput("standard form needs t > 0")
    xi = t ** -0.5
    z = y * t ** 1.5
    if yp is None:
        return xi, z
    # dy/dt = -(xi**3/2) (3 xi**2 z + xi**3 z')
    zp = (-2 * yp / xi ** 3 - 3 * xi ** 2 * z) / xi ** 3
    return xi, z, zp


def from_standard_form(xi: float, z: float, zp: float | None = None):
    if not xi > GUARD:
        raise SingularInput("inverse standard form needs xi > 0")
    t = xi ** -2
    y = xi ** 3 * z
    if zp is None:
        return t, y
    return t, y, -0.5 * xi ** 3 * (3 * xi ** 2 * z + xi ** 3 * zp)


def standard_residual(params: PIIIParams, xi: float, z: float, zp: float, zpp: float) -> float:
    if not xi > GUARD:
        raise SingularInput("xi must be positive")
    _check_y(z)
    c2, c4 = params.coefficients()
    rhs = zp * zp / z - zp / xi + 4 * z ** 3 + 4 * c2 * z * z / xi + 4 * c4 / xi - 4 / z
    return zpp - rhs


def coupled_rhs(params: PIIIParams, state: CoupledState) -> tuple[float, float]:
    """(q', y') of the coupled system of the selected family."""
    t, q, y = state.t, state.q, state.y
    _check_t(t)
    _check_y(y)
    a = params.a
    base = q * (q * q - 1) / (t * t * y)
    if params.family == "A":
        qp = (base - 0.5 * (a - 1) * q) / t
        yp = (2 * q * q - 1 - t ** 3 * y * y - (a + 1) * t * t * y) / t ** 3
    else:
        qp = (base + 0.5 * a * q) / t
        yp = (2 * q * q - 1 - t ** 3 * y * y + (a - 2) * t * t * y) / t ** 3
    return qp, yp


def h_aux(params: PIIIParams, t: float, q: float, y: float) -> float:
    _check_t(t)
    _check_y(y)
    base = (q * q - 1) / (t * t * y)
    if params.family == "A":
        return base - (params.a - 1)
    return base + params.a


def tw_rhs(a: float, t: float, q: float, qp: float) -> float:
    """q'' from t(q^2-1)(tq')' = q(tq')^2 + q^3(q^2-2)/t + (1/t - a^2/4) q."""
    _check_t(t)
    _check_q(q)
    tq = t * qp
    num = q * tq * tq + q ** 3 * (q * q - 2) / t + (1 / t - a * a / 4) * q
    return (num / (t * (q * q - 1)) - qp) / t


def r_of_q(q: float) -> float:
    return -1 + 2 * q * q


def q_of_r(r: float) -> float:
    """Nonnegative root of r = -1 + 2 q**2."""
    if r < -1:
        raise DomainError(f"r={r} < -1 has no real q")
    return math.sqrt((r + 1) / 2)


def r_from_y(a: float, t: float, y: float, yp: float) -> float:
    return t ** 3 * (yp + y * y) + (a + 1) * t * t * y


def y_from_r(a: float, t: float, r: float, rp: float) -> float:
    den = t * t * (t * rp + (a - 1) * (r + 1))
    if abs(den) < GUARD:
        raise SingularInput("t r' + (a-1)(r+1) vanishes")
    return (r * r - 1) / den


def r_y_system_b_rhs(a: float, t: float, r: float, y: float) -> tuple[float, float]:
    """(r', y') from t(t^2 y)' = r - t^3 y^2 + a t^2 y and t r' = (r^2-1)/(t^2 y) + a(r+1)."""
    _check_t(t)
    _check_y(y)
    rp = ((r * r - 1) / (t * t * y) + a * (r + 1)) / t
    yp = (r - t ** 3 * y * y + (a - 2) * t * t * y) / t ** 3
    return rp, yp


def r_equation_residual(family: str, a: float, t: float, r: float, rp: float, rpp: float) -> float:
    """Residual of the second-order r equation.

    t(r^2-1)(tr')' - r(tr')^2 - (r^2-1)^2/t + c^2 (r+1)^2 with c = a - 1 for
    family A and c = a for family B.
    """
    _check_t(t)
    c = a - 1 if family == "A" else a
    tr = t * rp
    return t * (r * r - 1) * (rp + t * rpp) - r * tr * tr - (r * r - 1) ** 2 / t + c * c * (r + 1) ** 2


def spm_rhs(a: float, t: float, q: float, qp: float, s: SPMState) -> tuple[float, float]:
    _check_t(t)
    _check_q(q)
    den = q * q - 1
    common = q * qp / den
    shift = a * q / (2 * t * den)
    return s.s_plus * (common + shift), s.s_minus * (common - shift)


def h0_eval(a: float, t: float, q: float, qp: float) -> float:
    _check_t(t)
    _check_q(q)
    tq2 = (2 * t * qp) ** 2
    return (-(tq2 - a * a) / (4 * (q * q - 1)) + q * q / t + a * (a - 2) / 4) / (2 * t)


def cross_a_partner(t: float, a: float, q: float, y: float) -> tuple[float, float]:
    """(q**2, y) of the partner solution at parameter 1 - a.

    Solves y(a) y(1-a) = -1/t^3 and q(a)^2/y(a) + q(1-a)^2/y(1-a) = 0.
    ``a`` is accepted for symmetry; the map does not depend on it.
    """
    _check_t(t)
    _check_y(y)
    return q * q / (t ** 3 * y * y), -1 / (t ** 3 * y)


# Trajectory helpers ----------------------------------------------------------

def solve_coupled(params: PIIIParams, t0: float, q0: float, y0: float, t1: float,
                  phi0: float = 1.0, tol: Tolerances | None = None, s_eval=None) -> Trajectory:
    """Integrate (q, y, phi) with phi'/phi = y.  State columns: q, y, phi."""

    def rhs(t, v):
        qp, yp = coupled_rhs(params, CoupledState(t, v[0], v[1]))
        return np.array([qp, yp, v[1] * v[2]])

    traj = integrate_ivp(rhs, t0, [q0, y0, phi0], t1, tol or Tolerances(1e-12, 1e-12), s_eval)
    traj.meta.update(kind="coupled", family=params.family, a=params.a)
    return traj


def solve_tw(a: float, t0: float, q0: float, qp0: float, t1: float,
             s_plus0: float = 1.0, tol: Tolerances | None = None, s_eval=None) -> Trajectory:
    """Integrate (q, q', S+, S-) with S- seeded so that S+ S- = 1 - q**2."""
    _check_q(q0)
    if s_plus0 == 0:
        raise SingularInput("S+ must be seeded nonzero")
    s_minus0 = (1 - q0 * q0) / s_plus0

    def rhs(t, v):
        q, qp = v[0], v[1]
        sp, sm = spm_rhs(a, t, q, qp, SPMState(t, v[2], v[3]))
        return np.array([qp, tw_rhs(a, t, q, qp), sp, sm])

    traj = integrate_ivp(rhs, t0, [q0, qp0, s_plus0, s_minus0], t1,
                         tol or Tolerances(1e-12, 1e-12), s_eval)
    traj.meta.update(kind="tw", a=a)
    return traj


def tangent_second_derivative(rhs, t: float, state, h: float = 1e-5) -> np.ndarray:
    """d/dt of rhs(t, X(t)) by a central difference along the tangent line.

    (rhs(t+h, X+hX') - rhs(t-h, X-hX')) / 2h with X' = rhs(t, X) is
    second-order accurate and needs no dense interpolation.
    """
    X = np.asarray(state, dtype=float)
    Xp = np.asarray(rhs(t, X), dtype=float)
    return (np.asarray(rhs(t + h, X + h * Xp)) - np.asarray(rhs(t - h, X - h * Xp))) / (2 * h)


def coupled_piii_residual(params: PIIIParams, traj: Trajectory, ts) -> float:
    """Sup over ``ts`` of |y'' - piii_rhs| along a coupled trajectory."""

    def rhs(t, v):
        return np.array(coupled_rhs(params, CoupledState(t, v[0], v[1])))

    worst = 0.0
    for t in ts:
        X = traj(t)[:2]
        yp = rhs(t, X)[1]
        ypp = tangent_second_derivative(rhs, t, X)[1]
        worst = max(worst, abs(ypp - piii_rhs(params, t, X[1], yp)))
    return worst
