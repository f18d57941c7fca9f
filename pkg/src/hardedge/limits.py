"""Hard-to-soft edge transition.

With alpha = a/2 and eps = alpha^(-1/3) the soft window (s, x) maps to
t_hard = alpha^-2 (1 + eps^2 s), x_hard = alpha (1 + eps x).  Hard
solutions at a = 2 alpha are not integrated in hard variables (the
relevant quantities differ by ~alpha^3 from their leading parts);
instead the hard ODEs are rewritten exactly in the scaled unknowns

    beta = 2:  y_hard = -alpha^3 (1 - eps y1), r_hard = -1 + eps^2 r1,
               phi_hard = exp(-s/eps) phi_s,
    beta = 4:  q_hard = eps Q,

which reduce to the Painleve II system as eps -> 0.  The rewritten
systems are seeded at s = 0 from Hastings-McLeod data and integrated
outward, then mapped back to hard variables to build the hard Lax pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import lax
from .errors import DomainError
from .num_core import Tolerances, integrate_ivp
from .painleve2 import HMSolution, pii_rhs, solve_hastings_mcleod

__all__ = [
    "ScaleMap",
    "EXPONENTS",
    "to_hard_coords",
    "scale_hard_functions",
    "ScaledBeta2",
    "ScaledBeta4",
    "limit_ode_residuals",
    "limit_pair_distance",
    "sweep_report",
    "write_report",
]

# scaling dimensions, exact thirds
EXPONENTS = {
    "d_dx": Fraction(-2, 3),
    "d_dt": Fraction(8, 3),
    "L": Fraction(-2, 3),
    "B": Fraction(8, 3),
    "Delta_y": Fraction(8, 3),
    "Delta_r": Fraction(-2, 3),
    "q": Fraction(-1, 3),
    "F": Fraction(-2, 3),
}


@dataclass(frozen=True)
class ScaleMap:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def is_limit(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def cbrt(self) -> float:
        return self.alpha ** (1.0 / 3.0)

    @property
    def eps(self) -> float:
        return 0.0 if self.is_limit else 1.0 / self.cbrt

    def power(self, k: Fraction) -> float:
        """alpha**k for k in thirds, as an integer power of alpha^(1/3)."""
        k = Fraction(k)
        if (3 * k).denominator != 1:
            raise ValueError("exponents are multiples of 1/3")
        return self.cbrt ** int(3 * k)

    @property
    def a(self) -> float:
        return 2 * self.alpha


def to_hard_coords(m: ScaleMap, x_soft, t_soft):
    x_soft = np.asarray(x_soft, dtype=float)
    t_soft = np.asarray(t_soft, dtype=float)
    x = m.alpha * (1 + x_soft / m.cbrt)
    t = (1 + t_soft * m.power(Fraction(-2, 3))) / m.alpha ** 2
    if np.any(t <= 0):
        raise DomainError("window maps to t_hard <= 0")
    if x.ndim == 0:
        return float(x), float(t)
    return x, t


def scale_hard_functions(m: ScaleMap, hard: dict, which: str, t_soft=0.0) -> dict:
    """Undo the hard-to-soft substitutions for whichever of
    y, r, q, phi, F, G are present in ``hard``."""
    if which not in ("thm1a", "thm1b", "thm2"):
        raise ValueError("which must be thm1a, thm1b or thm2")
    c = m.cbrt
    a3 = m.alpha ** 3
    out = {}
    for key, val in hard.items():
        val = np.asarray(val, dtype=float)
        if key == "y":
            res = c * (1 + val / a3) if which == "thm1a" else c * (val / a3 - 1)
        elif key == "r":
            res = m.power(Fraction(2, 3)) * (val + 1)
        elif key == "q":
            res = c * val
        elif key == "phi":
            res = np.exp(c * t_soft) * val
        elif key == "F":
            res = m.power(Fraction(2, 3)) * val
        elif key == "G":
            if which == "thm1a":
                res = np.exp(-c * t_soft) * val
            elif which == "thm1b":
                res = np.exp(-t_soft / c) * val
            else:
                res = m.power(Fraction(2, 3)) * val
        else:
            raise ValueError(f"unknown hard quantity {key!r}")
        if not np.all(np.isfinite(res)):
            raise DomainError(f"non-finite scaled {key}")
        out[key] = float(res) if res.ndim == 0 else res
    return out


# Exact scaled hard systems ---------------------------------------------------

def _beta2_rhs(eps):
    def rhs(s, v):
        y1, r1 = v[0], v[1]
        T = 1 + eps * eps * s
        u = 1 - eps * y1
        w = T * T * y1 - eps * s * (2 + eps * eps * s)
        dy1 = (r1 - w * w + s * T ** 3 * u * u + eps * T * T * u) / T ** 3
        dr1 = r1 * (2 * w - eps * r1 + eps * eps * T * T * u) / (T ** 3 * u)
        return np.array([dy1, dr1, y1])

    return rhs


def _beta4_rhs(eps):
    e2 = eps * eps

    def rhs(s, v):
        Q, Qs, sp, sm = v
        T = 1 + e2 * s
        den = e2 * Q * Q - 1
        inner = (e2 * Q * T * T * Qs * Qs + Q ** 3 * (e2 * Q * Q - 2) / T - Q * s / T) / (T * den)
        Qss = (inner - e2 * Qs) / T
        common = e2 * Q * Qs / den
        shift = Q / (T * den)
        return np.array([Qs, Qss, sp * (common + shift), sm * (common - shift)])

    return rhs


class _Scaled:
    def __init__(self, m: ScaleMap, rhs, seed, s_lo, s_hi, tol):
        self.m = m
        self.rhs = rhs
        self.trajs = [integrate_ivp(rhs, 0.0, seed, end, tol) for end in (s_lo, s_hi) if end != 0]

    def __call__(self, s):
        for tr in self.trajs:
            lo, hi = sorted((tr.s[0], tr.s[-1]))
            if lo - 1e-12 <= s <= hi + 1e-12:
                return tr(min(max(s, lo), hi))
        raise ValueError(f"s={s} outside the integrated window")

    def deriv(self, s):
        return self.rhs(s, self(s))


class ScaledBeta2(_Scaled):
    """Family A at a = 2 alpha in the scaled unknowns (y1, r1, ln|phi_s|)."""

    def __init__(self, m: ScaleMap, hm: HMSolution, s_lo=-2.0, s_hi=2.0, tol=None):
        q, qp = hm.state(0.0)
        seed = [qp / q, 2 * q * q, math.log(q)]
        super().__init__(m, _beta2_rhs(m.eps), seed, s_lo, s_hi, tol or Tolerances(1e-13, 1e-12))

    def hard_state(self, s, gauged: bool = False):
        """(t_hard, q_hard, y_hard, phi); phi_s = -q at s = 0.

        ``gauged`` returns phi_s = exp(s/eps) phi_hard in place of
        phi_hard.  Off-diagonal entries of the beta = 2 pair are
        proportional to phi or 1/phi, so this equals conjugating the pair
        by diag(1, exp(s/eps)) without forming exponentially small numbers.
        """
        e = self.m.eps
        y1, r1, lphi = self(s)
        t = e ** 6 * (1 + e * e * s)
        y = -(1 - e * y1) / e ** 9
        q = e * math.sqrt(max(r1, 0.0) / 2)
        phi = -math.exp(lphi if gauged else lphi - s / e)
        return t, q, y, phi


class ScaledBeta4(_Scaled):
    """Tracy-Widom type equation at a = 2 alpha in the unknowns (Q, Q', S+, S-)."""

    def __init__(self, m: ScaleMap, hm: HMSolution, s_lo=-2.0, s_hi=2.0, tol=None):
        q, qp = hm.state(0.0)
        seed = [q, qp, 1.0, 1 - m.eps ** 2 * q * q]
        super().__init__(m, _beta4_rhs(m.eps), seed, s_lo, s_hi, tol or Tolerances(1e-13, 1e-12))

    def hard_state(self, s):
        """(t_hard, q_hard, q'_hard, S+, S-)."""
        e = self.m.eps
        Q, Qs, sp, sm = self(s)
        return e ** 6 * (1 + e * e * s), e * Q, Qs / e ** 7, sp, sm


@lru_cache(maxsize=2)
def default_hm() -> HMSolution:
    return solve_hastings_mcleod(-8.0, 8.0)


def _window(n=9, lo=-2.0, hi=2.0):
    return np.linspace(lo, hi, n)


def _fd(values, h):
    """Fourth-order first derivative at interior nodes of a uniform table."""
    v = np.asarray(values)
    return (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)


def limit_ode_residuals(m: ScaleMap, hm: HMSolution | None = None, s_lo=-2.0, s_hi=2.0) -> dict:
    """Residuals of y1' = r1 - y1^2 + s, r1' = 2 y1 r1 and Q'' = s Q + 2 Q^3
    evaluated on scaled hard data; also sup |r1 - 2 q_HM^2|.

    For alpha = inf the Hastings-McLeod table itself is used (y1 = q'/q,
    r1 = 2 q^2) with derivatives by finite differences.
    """
    hm = hm or default_hm()
    if m.is_limit:
        h = 0.01
        s = np.arange(s_lo - 2 * h, s_hi + 2.5 * h, h)
        st = hm.state(s)
        q, qp = st[:, 0], st[:, 1]
        y1, r1 = qp / q, 2 * q * q
        core = slice(2, -2)
        dy1, dr1, dqp = _fd(y1, h), _fd(r1, h), _fd(qp, h)
        sc = s[core]
        res_y = dy1 - (r1[core] - y1[core] ** 2 + sc)
        res_r = dr1 - 2 * y1[core] * r1[core]
        res_q = dqp - pii_rhs(sc, q[core])
        gap = np.zeros(1)
    else:
        b2 = ScaledBeta2(m, hm, s_lo, s_hi)
        b4 = ScaledBeta4(m, hm, s_lo, s_hi)
        s = _window(41, s_lo, s_hi)
        res_y, res_r, res_q, gap = [], [], [], []
        for si in s:
            y1, r1, _ = b2(si)
            dy1, dr1, _ = b2.deriv(si)
            res_y.append(dy1 - (r1 - y1 * y1 + si))
            res_r.append(dr1 - 2 * y1 * r1)
            Q = b4(si)
            res_q.append(b4.deriv(si)[1] - pii_rhs(si, Q[0]))
            gap.append(r1 - 2 * float(hm.q_at(si)) ** 2)
    out = {
        "beta2_y": float(np.max(np.abs(res_y))),
        "beta2_r": float(np.max(np.abs(res_r))),
        "beta4_pii": float(np.max(np.abs(res_q))),
        "r1_vs_hm": float(np.max(np.abs(gap))),
    }
    out["max"] = max(out["beta2_y"], out["beta2_r"], out["beta4_pii"])
    return out


def _limit_thm4_pair(hm: HMSolution, s, x):
    """Scaled beta = 2 pair in its alpha -> inf form with y = q'/q, phi = -q."""
    q, qp = (float(v) for v in hm.state(s))
    y, phi, q2 = qp / q, -q, q * q
    u = q2 * (y * y - s - q2)
    L = lax.Matrix2(q2, (x + y) * phi, q2 * (x - y) / phi, x * x - s - q2)
    B = lax.Matrix2(u, -phi, -q2 / phi, u - x)
    return L, B


def limit_pair_distance(m: ScaleMap, which: str, hm: HMSolution | None = None, n: int = 9,
                        s_lo=-2.0, s_hi=2.0, x_lo=-2.0, x_hi=2.0, gauge: bool = True) -> float:
    """Sup over the (s, x) window of max-abs entry distances between the
    scaled hard pair and the soft pair (thm4: beta = 2, thm5: beta = 4).

    ``gauge=False`` drops the exponential eigenvector gauge of the beta = 2
    route, which should make the distance blow up.
    """
    if which not in ("thm4", "thm5"):
        raise ValueError("which must be thm4 or thm5")
    hm = hm or default_hm()
    ss, xs = _window(n, s_lo, s_hi), _window(n, x_lo, x_hi)
    if which == "thm4":
        soft = lax.assemble_soft_thm4(hm)
    else:
        spm = lax.soft_spm(hm, s_lo, s_hi)
        soft = lax.assemble_soft_thm5(hm, spm)
    if m.is_limit:
        if which == "thm5":
            return 0.0
        return max(max((_limit_thm4_pair(hm, s, x)[0] - soft.L(s, x)).norm(),
                       (_limit_thm4_pair(hm, s, x)[1] - soft.B(s, x)).norm()) for s in ss for x in xs)

    e = m.eps
    scaled = ScaledBeta2(m, hm, s_lo, s_hi) if which == "thm4" else ScaledBeta4(m, hm, s_lo, s_hi)
    worst = 0.0
    for s in ss:
        hs = scaled.hard_state(s, gauged=gauge) if which == "thm4" else scaled.hard_state(s)
        t_h, state = hs[0], hs[1:]
        if which == "thm4":
            hard = lax.assemble_thm1a(m.a, lambda t, st=state: st)
        else:
            hard = lax.assemble_thm2(m.a, lambda t, st=state: st)
        for x in xs:
            x_h, _ = to_hard_coords(m, x, 0.0)
            Lh, Bh = hard.L(t_h, x_h), hard.B(t_h, x_h)
            if which == "thm4":
                # conjugation by diag(eps^2, 1); the exponential part of the
                # gauge is already inside phi
                d1 = e * e
                shift = 1 / e if gauge else 0.0
                Ls = lax.Matrix2(Lh.a11, Lh.a12 / d1, Lh.a21 * d1, Lh.a22) / (e * e)
                Bs = lax.Matrix2(Bh.a11, Bh.a12 / d1, Bh.a21 * d1, Bh.a22) * e ** 8
                Bs = Bs - lax.Matrix2(0.0, 0.0, 0.0, shift)
            else:
                Ls, Bs = Lh / (e * e), Bh * e ** 8
            d = max((Ls - soft.L(s, x)).norm(), (Bs - soft.B(s, x)).norm())
            if not math.isfinite(d):
                return math.inf
            worst = max(worst, d)
    return worst


def sweep_report(alphas=(1e2, 1e3, 1e4), hm: HMSolution | None = None) -> dict:
    hm = hm or default_hm()
    records = []
    for alpha in alphas:
        m = ScaleMap(float(alpha))
        rec = {"alpha": alpha if math.isfinite(alpha) else "inf", "eps": m.eps}
        rec["ode_residuals"] = limit_ode_residuals(m, hm)
        rec["pair_distance"] = {w: limit_pair_distance(m, w, hm) for w in ("thm4", "thm5")}
        records.append(rec)
    finite = [r for r in records if r["alpha"] != "inf"]

    def decreasing(vals):
        return all(b < a for a, b in zip(vals, vals[1:]))

    return {
        "exponents": {k: str(v) for k, v in EXPONENTS.items()},
        "records": records,
        "monotone": {
            "ode": decreasing([r["ode_residuals"]["max"] for r in finite]),
            "thm4": decreasing([r["pair_distance"]["thm4"] for r in finite]),
            "thm5": decreasing([r["pair_distance"]["thm5"] for r in finite]),
        },
    }


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
