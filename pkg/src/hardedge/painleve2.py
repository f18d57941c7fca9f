"""Painleve II pieces of the soft-edge limit.

The Hastings-McLeod solution is found by shooting from an Airy seed at a
large positive anchor: scaling the seed by c < 1 gives solutions that
cross zero, c > 1 solutions that blow up, and the separatrix between the
two is bisected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState, RangeError, ShootingFailed, StepLimitExceeded
from .num_core import Tolerances, Trajectory, airy_ai, integrate_ivp

__all__ = [
    "pii_rhs",
    "PIITable",
    "HMSolution",
    "solve_hastings_mcleod",
    "u_check",
    "p34_residual",
    "gambier_residual",
    "gambier_partner",
    "table_from_trajectory",
]

CBRT2 = 2.0 ** (1.0 / 3.0)


def pii_rhs(t: float, q: float, nu: float = 0.0) -> float:
    """q'' = t q + 2 q**3 + nu."""
    return t * q + 2 * q ** 3 + nu


@dataclass(frozen=True)
class PIITable:
    """Tabulated solution on an increasing grid with Hermite interpolation."""

    grid: np.ndarray
    q: np.ndarray
    qp: np.ndarray
    traj: Trajectory | None = None

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(t < lo - 1e-12) or np.any(t > hi + 1e-12):
            raise RangeError(f"t outside table range [{lo}, {hi}]")
        return np.clip(t, lo, hi)

    def state(self, t):
        t = self._check(t)
        if self.traj is None:
            return np.stack([np.interp(t, self.grid, self.q), np.interp(t, self.grid, self.qp)], -1)
        return self.traj(t)

    def q_at(self, t):
        return self.state(t)[..., 0]

    def qp_at(self, t):
        return self.state(t)[..., 1]


@dataclass(frozen=True)
class HMSolution(PIITable):
    """Hastings-McLeod table: grid, q, q', u = q'^2 - t q^2 - q^4."""

    u: np.ndarray = None
    c: float = 1.0
    anchor: float = 8.0

    def u_at(self, t):
        s = self.state(t)
        t = np.asarray(t, dtype=float)
        return s[..., 1] ** 2 - t * s[..., 0] ** 2 - s[..., 0] ** 4


def table_from_trajectory(traj: Trajectory, grid: np.ndarray) -> PIITable:
    grid = np.sort(np.asarray(grid, dtype=float))
    st = traj(grid)
    return PIITable(grid, st[:, 0], st[:, 1], traj)


def _pii_system(t, v):
    return np.array([v[1], pii_rhs(t, v[0])])


def _classify(c, anchor, seed, t_shoot, tol):
    """'under' (crosses zero), 'over' (blows up) or 'reached'."""
    t0, y = anchor, c * np.asarray(seed)
    while t0 > t_shoot:
        t1 = max(t0 - 0.5, t_shoot)
        try:
            with np.errstate(all="ignore"):
                y = integrate_ivp(_pii_system, t0, y, t1, tol).final
        except (NonFiniteState, StepLimitExceeded, OverflowError, FloatingPointError):
            return "over"
        if y[0] < 0:
            return "under"
        if y[0] > math.sqrt(max(-t1, 0.0) / 2) + 1.0:
            return "over"
        t0 = t1
    return "reached"


def solve_hastings_mcleod(t_min: float = -8.0, t_max: float = 8.0, tol: Tolerances | None = None,
                          step: float = 0.01, anchor: float | None = None,
                          max_iter: int = 200) -> HMSolution:
    """Tabulate the Hastings-McLeod solution q ~ Ai(t) on [t_min, t_max]."""
    if not t_min < 0 < t_max:
        raise ValueError("need t_min < 0 < t_max")
    if t_max < 6:
        raise ValueError("t_max must be at least 6")
    tol = tol or Tolerances(1e-20, 1e-13, max_steps=500_000)
    anchor = max(t_max, 8.0) if anchor is None else max(anchor, t_max, 8.0)
    seed = airy_ai(anchor)
    # shooting past t_min makes the separatrix sharp to machine precision
    t_shoot = min(t_min, -10.0)
    lo, hi = 1.0 - 0.05, 1.0 + 0.05
    if _classify(lo, anchor, seed, t_shoot, tol) != "under" or _classify(hi, anchor, seed, t_shoot, tol) != "over":
        raise ShootingFailed("Airy scaling factor is not bracketed")
    c = 0.5 * (lo + hi)
    for _ in range(max_iter):
        c = 0.5 * (lo + hi)
        if c in (lo, hi):
            break
        kind = _classify(c, anchor, seed, t_shoot, tol)
        if kind == "reached":
            break
        if kind == "under":
            lo = c
        else:
            hi = c
    else:
        raise ShootingFailed("bisection did not converge")

    n = int(round((t_max - t_min) / step))
    grid = np.linspace(t_min, t_max, n + 1)
    try:
        traj = integrate_ivp(_pii_system, anchor, c * np.asarray(seed), t_min, tol, s_eval=grid)
    except (NonFiniteState, StepLimitExceeded) as exc:
        raise ShootingFailed(f"final trajectory does not reach t_min: {exc}") from exc
    st = traj(grid)
    q, qp = st[:, 0], st[:, 1]
    if np.any(q <= 0):
        raise ShootingFailed("final trajectory is not positive on the table")
    u = qp ** 2 - grid * q ** 2 - q ** 4
    traj.meta.update(kind="hastings-mcleod", c=c)
    return HMSolution(grid, q, qp, traj, u=u, c=c, anchor=anchor)


def u_check(hm: HMSolution) -> float:
    """Sup over interior nodes of |u' + q^2| with u' by finite differences.

    Fourth-order stencils on uniform grids (one-sided next to the ends),
    three-point central differences otherwise.
    """
    t, u, q = np.asarray(hm.grid), np.asarray(hm.u), np.asarray(hm.q)
    if len(t) < 3:
        return 0.0
    h = np.diff(t)
    up = np.empty(len(t) - 2)
    up[:] = (u[2:] - u[:-2]) / (t[2:] - t[:-2])
    uniform = np.allclose(h, h[0], rtol=1e-9, atol=0)
    if uniform and len(t) >= 5:
        up[1:-1] = (-u[4:] + 8 * u[3:-1] - 8 * u[1:-3] + u[:-4]) / (12 * h[0])
        up[0] = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h[0])
        up[-1] = (3 * u[-1] + 10 * u[-2] - 18 * u[-3] + 6 * u[-4] - u[-5]) / (12 * h[0])
    return float(np.max(np.abs(up + q[1:-1] ** 2)))


def p34_residual(t, r, rp, rpp):
    """2 r r'' - r'^2 - 4 t r^2 - 4 r^3."""
    return 2 * r * rpp - rp * rp - 4 * t * r * r - 4 * r ** 3


def gambier_residual(t, q0: PIITable, qhalf: PIITable, eps: int):
    """Left minus right of 2^(1/3) eps q0(tau)^2 = qh' + eps qh^2 + eps t / 2,
    tau = -2^(-1/3) t.

    ``qhalf`` solves q'' = t q + 2 q^3 - eps/2.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    t = np.asarray(t, dtype=float)
    tau = -t / CBRT2
    left = CBRT2 * eps * q0.q_at(tau) ** 2
    right = qhalf.qp_at(t) + eps * qhalf.q_at(t) ** 2 + eps * t / 2
    return left - right


def gambier_partner(q0: PIITable, eps: int, t_anchor: float, t_lo: float, t_hi: float,
                    step: float = 0.01, tol: Tolerances | None = None) -> PIITable:
    """Build the partner by integrating the Gambier relation as a Riccati ODE.

    The seed at ``t_anchor`` is -eps 2^(-1/3) q0'(tau)/q0(tau), the only
    value compatible with a Painleve II partner.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    tol = tol or Tolerances(1e-13, 1e-13)

    def rhs(t, v):
        tau = -t / CBRT2
        return np.array([CBRT2 * eps * q0.q_at(tau) ** 2 - eps * v[0] ** 2 - eps * t / 2])

    grid = np.linspace(t_lo, t_hi, int(round((t_hi - t_lo) / step)) + 1)
    t_anchor = float(grid[np.argmin(np.abs(grid - t_anchor))])
    tau_a = -t_anchor / CBRT2
    seed = -eps * q0.qp_at(tau_a) / (CBRT2 * q0.q_at(tau_a))
    values = {t_anchor: seed}
    for side in (grid[grid < t_anchor], grid[grid > t_anchor]):
        if len(side):
            end = float(side[0] if side[0] < t_anchor else side[-1])
            tr = integrate_ivp(rhs, t_anchor, [seed], end, tol, s_eval=side)
            values.update(zip(tr.s.tolist(), tr.states[:, 0].tolist()))
    qg = np.array([values[float(g)] for g in grid])
    qpg = np.array([rhs(g, [v])[0] for g, v in zip(grid, qg)])
    return PIITable(grid, qg, qpg, None)
