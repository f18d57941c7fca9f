"""Shared numerical substrate: adaptive ODE integration, finite differences,
dual numbers and the Airy function."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteState, NonFiniteValue, StepLimitExceeded

__all__ = [
    "Tolerances",
    "Trajectory",
    "integrate_ivp",
    "fd_partial",
    "Dual",
    "airy_ai",
    "airy_asymptotic",
]


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 200_000
    fd_step: float = 1e-5

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.abs_tol * factor, self.rel_tol * factor,
                          self.max_steps, self.fd_step)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Trajectory:
    """Accepted nodes of an integration with cubic Hermite dense output.

    ``s`` is monotone in the integration direction; ``states`` and
    ``derivs`` have shape (n_nodes, dim).
    """

    s: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    n_rhs: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def direction(self) -> int:
        return 1 if self.s[-1] >= self.s[0] else -1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def _locate(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = min(self.s[0], self.s[-1]), max(self.s[0], self.s[-1])
        if np.any(s < lo - 1e-12 * max(1.0, abs(lo))) or np.any(s > hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError(f"requested point outside trajectory span [{lo}, {hi}]")
        n = len(self.s)
        if self.direction > 0:
            return s, np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, n - 2)
        j = np.clip(np.searchsorted(self.s[::-1], s, side="right") - 1, 0, n - 2)
        return s, n - 2 - j

    def _hermite(self, s, order):
        s, i = self._locate(s)
        s0, s1 = self.s[i], self.s[i + 1]
        h = s1 - s0
        th = ((s - s0) / h)[..., None]
        y0, y1 = self.states[i], self.states[i + 1]
        f0, f1 = self.derivs[i], self.derivs[i + 1]
        h = h[..., None]
        if order == 0:
            h00 = (1 + 2 * th) * (1 - th) ** 2
            h10 = th * (1 - th) ** 2
            h01 = th ** 2 * (3 - 2 * th)
            h11 = th ** 2 * (th - 1)
            return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
        d00 = 6 * th * (th - 1) / h
        d10 = (1 - th) * (1 - 3 * th)
        d01 = -d00
        d11 = th * (3 * th - 2)
        return d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1

    def __call__(self, s):
        """Dense state at ``s`` (scalar or array)."""
        if len(self.s) == 1:
            return np.broadcast_to(self.states[0], np.shape(s) + self.states.shape[1:]).copy()
        return self._hermite(s, 0)

    def derivative(self, s):
        """Derivative of the Hermite interpolant at ``s``."""
        return self._hermite(s, 1)


def _initial_step(f, s0, y0, f0, direction, span, atol, rtol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(f(s0 + direction * h0, y1), dtype=float)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def integrate_ivp(
    f: Callable[[float, np.ndarray], np.ndarray],
    s0: float,
    y0: Sequence[float],
    s1: float,
    tol: Tolerances | None = None,
    s_eval: Sequence[float] | None = None,
    max_step: float | None = None,
) -> Trajectory:
    """Integrate ``y' = f(s, y)`` from ``s0`` to ``s1`` with Dormand-Prince 5(4).

    Steps are clipped so that every point of ``s_eval`` is an accepted node.
    Raises StepLimitExceeded or NonFiniteState instead of returning a
    truncated trajectory.
    """
    tol = tol or Tolerances()
    atol, rtol = tol.abs_tol, tol.rel_tol
    y = np.array(y0, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"non-finite initial state at s={s0}")
    direction = 1.0 if s1 >= s0 else -1.0
    span = abs(s1 - s0)
    fy = np.asarray(f(s0, y), dtype=float).ravel()
    n_rhs = 1
    if not np.all(np.isfinite(fy)):
        raise NonFiniteState(f"non-finite derivative at s={s0}")
    ss, ys, fs = [float(s0)], [y.copy()], [fy.copy()]
    if span == 0.0:
        return Trajectory(np.array(ss), np.array(ys), np.array(fs), n_rhs)

    stops = [float(s1)]
    if s_eval is not None:
        pts = np.asarray(s_eval, dtype=float)
        pts = pts[(direction * (pts - s0) > 0) & (direction * (s1 - pts) > 0)]
        stops = sorted(set(pts.tolist()) | {float(s1)}, key=lambda p: direction * p)
    hmax = span if max_step is None else min(max_step, span)
    h = min(_initial_step(f, s0, y, fy, direction, span, atol, rtol), hmax)
    n_rhs += 1
    s = float(s0)
    k = np.empty((7, y.size))
    steps = 0
    for target in stops:
        while direction * (target - s) > 0:
            steps += 1
            if steps > tol.max_steps:
                raise StepLimitExceeded(f"step limit {tol.max_steps} reached at s={s}")
            remaining = abs(target - s)
            last = h >= remaining * (1 - 1e-12)
            if last:
                h = remaining
            k[0] = fy
            # non-finite stages are caught below and shrink the step
            with np.errstate(invalid="ignore", over="ignore"):
                for i in range(1, 7):
                    yi = y + direction * h * (np.asarray(_A[i]) @ k[:i])
                    k[i] = np.asarray(f(s + direction * h * _C[i], yi), dtype=float).ravel()
                ynew = y + direction * h * (_B5[:6] @ k[:6])
                err = direction * h * (_E @ k)
            n_rhs += 6
            if not np.all(np.isfinite(ynew)) or not np.all(np.isfinite(k[6])):
                h *= 0.25
                if h < 1e-14 * max(1.0, abs(s)):
                    raise NonFiniteState(f"non-finite state near s={s}")
                continue
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
            en = float(np.sqrt(np.mean((err / scale) ** 2)))
            if en <= 1.0:
                s = target if last else s + direction * h
                y = ynew
                fy = k[6].copy()
                ss.append(s)
                ys.append(y.copy())
                fs.append(fy.copy())
                fac = 10.0 if en == 0 else min(10.0, 0.9 * en ** -0.2)
                h = min(h * max(fac, 0.2), hmax) if not last else h
            else:
                h *= max(0.2, 0.9 * en ** -0.2)
                if h < 1e-14 * max(1.0, abs(s)):
                    raise StepLimitExceeded(f"step size underflow at s={s}")
    return Trajectory(np.array(ss), np.array(ys), np.array(fs), n_rhs)


def fd_partial(fn: Callable, s: float, h: float = 1e-4):
    """Central difference ``(fn(s+h) - fn(s-h)) / 2h``.

    Works for anything supporting subtraction and division by a float,
    e.g. floats, arrays or Matrix2.
    """
    if not h > 0:
        raise ValueError("step must be positive")
    val = (fn(s + h) - fn(s - h)) / (2 * h)
    arr = np.asarray(val.to_array() if hasattr(val, "to_array") else val, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"non-finite difference at s={s}")
    return val


class Dual:
    """Forward-mode dual number ``val + der*e`` with ``e**2 = 0``."""

    __slots__ = ("val", "der")

    def __init__(self, val, der=0.0):
        self.val = val
        self.der = der

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    @staticmethod
    def _lift(o):
        return o if isinstance(o, Dual) else Dual(o, 0.0)

    def __add__(self, o):
        o = self._lift(o)
        return Dual(self.val + o.val, self.der + o.der)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        return Dual(self.val - o.val, self.der - o.der)

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Dual(self.val * o.val, self.der * o.val + self.val * o.der)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        return Dual(self.val / o.val, (self.der * o.val - self.val * o.der) / (o.val * o.val))

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise TypeError("dual exponents are not supported")
        if n == 0:
            return Dual(1.0, 0.0)
        return Dual(self.val ** n, n * self.val ** (n - 1) * self.der)

    def exp(self):
        e = math.exp(self.val)
        return Dual(e, e * self.der)

    def log(self):
        return Dual(math.log(self.val), self.der / self.val)

    def sqrt(self):
        r = math.sqrt(self.val)
        return Dual(r, self.der / (2 * r))


def value_of(z):
    return z.val if isinstance(z, Dual) else z


def deriv_of(z):
    return z.der if isinstance(z, Dual) else 0.0


# Airy function --------------------------------------------------------------

AIRY_ANCHOR = 8.0


def airy_asymptotic(s: float) -> tuple[float, float]:
    """Ai(s), Ai'(s) from the large-argument asymptotic series (s >= 8)."""
    if s < AIRY_ANCHOR:
        raise ValueError("asymptotic series is only used for s >= 8")
    zeta = 2.0 / 3.0 * s ** 1.5
    u, v = 1.0, 1.0
    su, sv = 1.0, 1.0
    prev = math.inf
    for k in range(1, 60):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = u / zeta ** k
        if term > prev or term < 1e-18:
            break
        prev = term
        sign = (-1) ** k
        su += sign * term
        sv += sign * v / zeta ** k
    pre = math.exp(-zeta) / (2 * math.sqrt(math.pi))
    return pre * su / s ** 0.25, -pre * sv * s ** 0.25


def _airy_rhs(s, w):
    return np.array([w[1], s * w[0]])


def airy_ai(s, anchor: float = AIRY_ANCHOR, tol: Tolerances | None = None):
    """Ai(s) and Ai'(s).

    For s >= anchor the asymptotic series is used directly; otherwise
    w'' = s w is integrated downward from the anchor, the direction in
    which the Ai solution is stable.
    """
    tol = tol or Tolerances(1e-12, 1e-13)
    anchor = max(float(anchor), AIRY_ANCHOR)
    scalar = np.ndim(s) == 0
    sv = np.atleast_1d(np.asarray(s, dtype=float))
    if not np.all(np.isfinite(sv)):
        raise ValueError("Airy argument must be finite")
    ai = np.empty_like(sv)
    aip = np.empty_like(sv)
    hi = sv >= anchor
    for i in np.flatnonzero(hi):
        ai[i], aip[i] = airy_asymptotic(sv[i])
    lo = ~hi
    if np.any(lo):
        # integrate Ai/Ai(anchor) so absolute tolerances stay meaningful
        a0, ap0 = airy_asymptotic(anchor)
        pts = np.unique(sv[lo])
        traj = integrate_ivp(_airy_rhs, anchor, [1.0, ap0 / a0], float(pts.min()), tol, s_eval=pts)
        lookup = dict(zip(traj.s.tolist(), traj.states * a0))
        for i in np.flatnonzero(lo):
            w = lookup[float(sv[i])]
            ai[i], aip[i] = w[0], w[1]
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip
