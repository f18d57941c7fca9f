"""Explicit Lax pairs, the zero-curvature and Fokker-Planck compatibility
residuals, and eigenvector propagation.

Every pair is stored through its Laurent coefficients in x,
L = sum_k L_k x**k and B = sum_k B_k x**k, whose entries are functions
of (t, state).  x-derivatives are exact; the t-derivative of L is
obtained with dual numbers pushed through the ODE right-hand side that
drives the state, so residuals are limited only by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import painleve3 as p3
from .errors import ConstraintViolated, SingularInput
from .num_core import Dual, Tolerances, fd_partial, integrate_ivp
from .painleve2 import HMSolution, pii_rhs

__all__ = [
    "Matrix2",
    "EigvecState",
    "LaxAssembly",
    "assemble_thm1a",
    "assemble_thm1b",
    "assemble_thm2",
    "assemble_thm3",
    "assemble_soft_thm4",
    "assemble_soft_thm5",
    "SoftSPM",
    "soft_spm",
    "zero_curvature_residual",
    "fp_compat_matrix",
    "propagate_eigvec",
    "antidiag_identity_residual",
]


@dataclass(frozen=True)
class Matrix2:
    a11: object
    a12: object
    a21: object
    a22: object

    @classmethod
    def identity(cls, s=1.0):
        return cls(s, 0.0, 0.0, s)

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, 0.0)

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def map(self, fn):
        return Matrix2(*(fn(e) for e in self.entries()))

    def __add__(self, o):
        return Matrix2(*(p + q for p, q in zip(self.entries(), o.entries())))

    def __sub__(self, o):
        return Matrix2(*(p - q for p, q in zip(self.entries(), o.entries())))

    def __neg__(self):
        return self.map(lambda e: -e)

    def __mul__(self, s):
        if isinstance(s, Matrix2):
            return self @ s
        return self.map(lambda e: e * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.map(lambda e: e / s)

    def __matmul__(self, o):
        return Matrix2(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )

    def comm(self, o):
        return self @ o - o @ self

    def anticomm(self, o):
        return self @ o + o @ self

    def trace(self):
        return self.a11 + self.a22

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def apply(self, v):
        return np.array([self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]])

    def to_array(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    def norm(self):
        """Max-abs entry."""
        return float(np.max(np.abs(self.to_array())))

    def top_row(self):
        return max(abs(self.a11), abs(self.a12))


@dataclass(frozen=True)
class EigvecState:
    F: float
    G: float

    def __post_init__(self):
        if not (np.isfinite(self.F) and np.isfinite(self.G)):
            raise ValueError("eigenvector state must be finite")


def _dual_part(m: Matrix2) -> Matrix2:
    return m.map(lambda e: e.der if isinstance(e, Dual) else 0.0)


def _real_part(m: Matrix2) -> Matrix2:
    return m.map(lambda e: e.val if isinstance(e, Dual) else e)


class LaxAssembly:
    """A Lax pair given by Laurent coefficients in x.

    ``source(t)`` returns (state, dstate); ``l_coeffs(t, state)`` and
    ``b_coeffs(t, state, dstate)`` return {power: Matrix2}.  ``edge`` is
    'hard' or 'soft' and selects the default compatibility operator.
    """

    def __init__(self, name: str, edge: str, source: Callable, l_coeffs: Callable,
                 b_coeffs: Callable, kappa: float | None = None, a: float | None = None,
                 scale_exponents: tuple | None = None):
        self.name = name
        self.edge = edge
        self.source = source
        self.l_coeffs = l_coeffs
        self.b_coeffs = b_coeffs
        self.kappa = kappa
        self.a = a
        self.scale_exponents = scale_exponents

    def pole_structure(self, t: float) -> dict:
        st, dst = self.source(t)
        return {"L": self.l_coeffs(t, st), "B": self.b_coeffs(t, st, dst)}

    @staticmethod
    def _sum(coeffs: dict, x: float, deriv: bool = False) -> Matrix2:
        if x == 0 and any(k < 0 for k in coeffs):
            raise SingularInput("pair has a pole at x = 0")
        out = Matrix2.zero()
        for k, c in coeffs.items():
            if deriv:
                if k != 0:
                    out = out + c * (k * x ** (k - 1))
            else:
                out = out + c * x ** k
        return out

    def L(self, t, x) -> Matrix2:
        st, _ = self.source(t)
        return self._sum(self.l_coeffs(t, st), x)

    def dLdx(self, t, x) -> Matrix2:
        st, _ = self.source(t)
        return self._sum(self.l_coeffs(t, st), x, deriv=True)

    def dLdt(self, t, x) -> Matrix2:
        st, dst = self.source(t)
        if dst is None:
            return fd_partial(lambda s: self.L(s, x), t)
        td = Dual(t, 1.0)
        sd = [Dual(v, d) for v, d in zip(st, dst)]
        return _dual_part(self._sum(self.l_coeffs(td, sd), x))

    def B(self, t, x) -> Matrix2:
        st, dst = self.source(t)
        return self._sum(self.b_coeffs(t, st, dst), x)

    def dBdx(self, t, x) -> Matrix2:
        st, dst = self.source(t)
        return self._sum(self.b_coeffs(t, st, dst), x, deriv=True)


def zero_curvature_residual(asm: LaxAssembly, t: float, x: float) -> Matrix2:
    """dL/dt - dB/dx - [B, L]."""
    L = asm.L(t, x)
    B = asm.B(t, x)
    return asm.dLdt(t, x) - asm.dBdx(t, x) - B.comm(L)


def fp_compat_matrix(asm: LaxAssembly, kappa: float, a: float | None, t: float, x: float,
                     mode: str | None = None) -> Matrix2:
    """Action of the Fokker-Planck operator on the eigenvector, as a matrix.

    hard: kappa t B + x^2 (L_x + L^2) + (a x - x^2 - 1/t) L
    soft: kappa B + L_x + L^2 + (t - x^2) L
    The first row must vanish for F to solve the equation.
    """
    mode = mode or asm.edge
    if mode not in ("hard", "soft"):
        raise ValueError("mode must be 'hard' or 'soft'")
    if mode == "hard" and (x == 0 or t <= 0):
        raise SingularInput("hard-edge operator needs t > 0 and x != 0")
    L = asm.L(t, x)
    B = asm.B(t, x)
    second = asm.dLdx(t, x) + L @ L
    if mode == "hard":
        return B * (kappa * t) + second * (x * x) + L * (a * x - x * x - 1 / t)
    return B * kappa + second + L * (t - x * x)


# beta = 2 pairs -------------------------------------------------------------

def _coupled_source(params: p3.PIIIParams, data: Callable):
    def source(t):
        q, y, phi = (float(v) for v in np.asarray(data(t), dtype=float)[:3])
        if abs(phi) < p3.GUARD:
            raise SingularInput("phi vanishes")
        qp, yp = p3.coupled_rhs(params, p3.CoupledState(t, q, y))
        return (q, y, phi), (qp, yp, y * phi)

    return source


def assemble_thm1a(a: float, data: Callable, h_offset: float = 0.0) -> LaxAssembly:
    """Hard-edge pair for beta = 2 driven by family A data (q, y, phi).

    ``data(t)`` returns (q, y, phi); h is built from them.  ``h_offset``
    exists only to inject defects in tests.
    """

    def h_of(t, q2, y):
        return (q2 - 1) / (t * t * y) - (a - 1) + h_offset

    def l_coeffs(t, s):
        q, y, phi = s
        q2 = q * q
        h = h_of(t, q2, y)
        return {
            -2: Matrix2(q2 / t, t * y * phi, -q2 * (q2 - 1) / (t ** 3 * y * phi), (1 - q2) / t),
            -1: Matrix2(0.0, phi, q2 * h / (t * t * y * phi), 1.0 - a),
            0: Matrix2(0.0, 0.0, 0.0, 1.0),
        }

    def b_coeffs(t, s, ds):
        q, y, phi = s
        q2 = q * q
        h = h_of(t, q2, y)
        return {
            0: Matrix2.identity(q2 / t ** 2 - q2 * h / (t ** 3 * y)),
            -1: Matrix2(q2 / t ** 2, y * phi, -q2 * (q2 - 1) / (t ** 4 * y * phi), (1 - q2) / t ** 2),
        }

    return LaxAssembly("thm1a", "hard", _coupled_source(p3.PIIIParams("A", a), data),
                       l_coeffs, b_coeffs, kappa=1.0, a=a)


def assemble_thm1b(a: float, data: Callable, h_offset: float = 0.0) -> LaxAssembly:
    """Hard-edge pair for beta = 2 driven by family B data (q, y, phi)."""

    def h_of(t, q2, y):
        return (q2 - 1) / (t * t * y) + a + h_offset

    def l_coeffs(t, s):
        q, y, phi = s
        q2 = q * q
        h = h_of(t, q2, y)
        return {
            -2: Matrix2(0.0, 0.0, 0.0, 1 / t),
            -1: Matrix2(0.0, phi, q2 * h / (t * t * y * phi), -a),
            0: Matrix2(q2, -t * t * y * phi, q2 * (q2 - 1) / (t * t * y * phi), 1 - q2),
        }

    def b_coeffs(t, s, ds):
        q, y, phi = s
        q2 = q * q
        h = h_of(t, q2, y)
        scalar = q2 / t ** 2 - q2 * h / (t ** 3 * y)
        return {
            0: Matrix2(scalar, phi / t, q2 * h / (t ** 3 * y * phi), scalar - a / t),
            -1: Matrix2(0.0, 0.0, 0.0, 1 / t ** 2),
        }

    return LaxAssembly("thm1b", "hard", _coupled_source(p3.PIIIParams("B", a), data),
                       l_coeffs, b_coeffs, kappa=1.0, a=a)


# beta = 4 pair --------------------------------------------------------------

def assemble_thm2(a: float, data: Callable, literal_b_factor: bool = False) -> LaxAssembly:
    """Hard-edge pair for beta = 4 driven by (q, q', S+, S-).

    The off-diagonal x^0 entries of B carry 1/(4t(q^2-1)); this is the
    value zero curvature requires.  ``literal_b_factor=True`` uses
    1/(2t(q^2-1)) instead, kept to demonstrate that it fails.
    """
    fac = 2.0 if literal_b_factor else 4.0

    def source(t):
        q, qp, sp, sm = (float(v) for v in np.asarray(data(t), dtype=float)[:4])
        spd, smd = p3.spm_rhs(a, t, q, qp, p3.SPMState(t, sp, sm))
        return (q, qp, sp, sm), (qp, p3.tw_rhs(a, t, q, qp), spd, smd)

    def l_coeffs(t, s):
        q, qp, sp, sm = s
        den = q * q - 1
        return {
            -2: Matrix2(1 + q, sp, sm, 1 - q) / (2 * t),
            -1: Matrix2(-a / 2, (2 * t * qp + a) * sp / (2 * den), -(2 * t * qp - a) * sm / (2 * den), -a / 2),
            0: Matrix2(1 - q, sp, sm, 1 + q) / 2,
        }

    def b_coeffs(t, s, ds):
        q, qp, sp, sm = s
        den = q * q - 1
        h0 = p3.h0_eval(a, t, q, qp)
        return {
            -1: Matrix2(1 + q, sp, sm, 1 - q) / (2 * t * t),
            0: Matrix2(h0, (2 * t * qp + a) * sp / (fac * t * den),
                       -(2 * t * qp - a) * sm / (fac * t * den), h0),
        }

    return LaxAssembly("thm2", "hard", source, l_coeffs, b_coeffs, kappa=2.0, a=a)


# closed-form pair -----------------------------------------------------------

def assemble_thm3(kappa: float, r: Callable, phi: Callable, dr: Callable | None = None,
                  dphi: Callable | None = None, fd_step: float = 1e-5) -> LaxAssembly:
    """Pair valid for arbitrary r(t), phi(t); the Fokker-Planck equation
    holds only at kappa = 2 - a.

    Missing derivatives are taken by central differences.
    """

    def deriv(fn, d):
        return d if d is not None else (lambda t: fd_partial(fn, t, fd_step))

    dr_, dphi_ = deriv(r, dr), deriv(phi, dphi)

    def source(t):
        p = phi(t)
        if abs(p) < p3.GUARD:
            raise SingularInput("phi vanishes")
        return (r(t), p), (dr_(t), dphi_(t))

    def core(s):
        rr, p = s
        return Matrix2((1 + rr) / 2, p, -(rr * rr - 1) / (4 * p), (1 - rr) / 2)

    def l_coeffs(t, s):
        return {-2: core(s) / t}

    def b_coeffs(t, s, ds):
        rr, p = s
        return {
            -1: core(s) / (t * t),
            0: core(s) / (kappa * t * t) + Matrix2(0.0, 0.0, -ds[0] / (2 * p), -ds[1] / p),
        }

    return LaxAssembly("thm3", "hard", source, l_coeffs, b_coeffs, kappa=kappa, a=2 - kappa)


# Soft edge ------------------------------------------------------------------

def _hm_state(hm: HMSolution, t):
    q, qp = (float(v) for v in hm.state(t))
    return q, qp, qp * qp - t * q * q - q ** 4


def assemble_soft_thm4(hm: HMSolution) -> LaxAssembly:
    """Soft-edge pair for beta = 2 from Hastings-McLeod data."""

    def source(t):
        q, qp, u = _hm_state(hm, t)
        return (q, qp, u), (qp, pii_rhs(t, q), -q * q)

    def l_coeffs(t, s):
        q, qp, u = s
        return {
            0: Matrix2(q * q, -qp, qp, -t - q * q),
            1: Matrix2(0.0, -q, -q, 0.0),
            2: Matrix2(0.0, 0.0, 0.0, 1.0),
        }

    def b_coeffs(t, s, ds):
        q, qp, u = s
        return {0: Matrix2(u, q, q, u), 1: Matrix2(0.0, 0.0, 0.0, -1.0)}

    return LaxAssembly("thm4", "soft", source, l_coeffs, b_coeffs, kappa=1.0)


class SoftSPM:
    """S+ and S- along a Hastings-McLeod solution: S+' = -q S+, S-' = q S-."""

    def __init__(self, trajs):
        self.trajs = trajs

    def __call__(self, t):
        for tr in self.trajs:
            lo, hi = sorted((tr.s[0], tr.s[-1]))
            if lo <= t <= hi:
                return tuple(float(v) for v in tr(t))
        raise ValueError(f"t={t} outside the S+- range")

    def product_defect(self) -> float:
        return max(float(np.max(np.abs(tr.states[:, 0] * tr.states[:, 1] - 1))) for tr in self.trajs)


def soft_spm(hm: HMSolution, t_lo: float, t_hi: float, t0: float = 0.0, s_plus0: float = 1.0,
             tol: Tolerances | None = None) -> SoftSPM:
    tol = tol or Tolerances(1e-14, 1e-13)

    def rhs(t, v):
        q = float(hm.q_at(t))
        return np.array([-q * v[0], q * v[1]])

    seed = [s_plus0, 1 / s_plus0]
    trajs = [integrate_ivp(rhs, t0, seed, end, tol) for end in (t_lo, t_hi) if end != t0]
    return SoftSPM(trajs)


def assemble_soft_thm5(hm: HMSolution, spm: SoftSPM, tol: float = 1e-10) -> LaxAssembly:
    """Soft-edge pair for beta = 4; the alpha prefactors are recorded in
    ``scale_exponents`` as (L, B) = (-2/3, 8/3) instead of applied."""
    defect = spm.product_defect()
    if defect > tol:
        raise ConstraintViolated(f"S+ S- - 1 = {defect:.3g} exceeds {tol}")

    def source(t):
        q, qp, u = _hm_state(hm, t)
        sp, sm = spm(t)
        return (q, qp, u, sp, sm), (qp, pii_rhs(t, q), -q * q, -q * sp, q * sm)

    def l_coeffs(t, s):
        q, qp, u, sp, sm = s
        return {
            0: Matrix2(-t / 2, (-t / 2 - qp - q * q) * sp, (-t / 2 + qp - q * q) * sm, -t / 2),
            1: Matrix2(-q, 0.0, 0.0, q),
            2: Matrix2(0.5, 0.5 * sp, 0.5 * sm, 0.5),
        }

    def b_coeffs(t, s, ds):
        q, qp, u, sp, sm = s
        return {
            0: Matrix2((u + q) / 2, 0.0, 0.0, (u - q) / 2),
            1: Matrix2(-0.5, -sp / 2, -sm / 2, -0.5),
        }

    return LaxAssembly("thm5", "soft", source, l_coeffs, b_coeffs, kappa=2.0,
                       scale_exponents=(Fraction(-2, 3), Fraction(8, 3)))


# Propagation and identities -------------------------------------------------

def propagate_eigvec(asm: LaxAssembly, path: Sequence[tuple[float, float]], state0: EigvecState,
                     tol: Tolerances | None = None) -> EigvecState:
    """Integrate d/dx (F, G) = L (F, G) on x-legs and d/dt (F, G) = B (F, G)
    on t-legs of a piecewise axis-aligned path of (t, x) corners."""
    tol = tol or Tolerances(1e-13, 1e-12)
    v = np.array([state0.F, state0.G], dtype=float)
    for (t0, x0), (t1, x1) in zip(path[:-1], path[1:]):
        if t0 == t1 and x0 == x1:
            continue
        if t0 == t1:
            v = integrate_ivp(lambda x, w: asm.L(t0, x).apply(w), x0, v, x1, tol).final
        elif x0 == x1:
            v = integrate_ivp(lambda t, w: asm.B(t, x0).apply(w), t0, v, t1, tol).final
        else:
            raise ValueError("path legs must be axis-aligned")
    return EigvecState(float(v[0]), float(v[1]))


def antidiag_identity_residual(p_plus: float, p_minus: float, q_plus: float, q_minus: float) -> float:
    """Max-abs entry of {P,Q}^2 - [P,Q]^2 - 4 P^2 Q^2 for antidiagonal P, Q."""
    P = Matrix2(0.0, p_plus, p_minus, 0.0)
    Q = Matrix2(0.0, q_plus, q_minus, 0.0)
    ac, cm = P.anticomm(Q), P.comm(Q)
    return (ac @ ac - cm @ cm - (P @ P) @ (Q @ Q) * 4).norm()
