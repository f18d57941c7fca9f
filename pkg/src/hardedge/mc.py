"""Monte-Carlo sampling of the smallest eigenvalue of the beta-Laguerre
ensemble through its bidiagonal model.

For n x n with shape parameter a (m = n + a "columns") the lower
bidiagonal factor B has

    B[i, i]   ~ chi_{beta (n + a - i)} / sqrt(beta),   i = 0..n-1
    B[i+1, i] ~ chi_{beta (n - 1 - i)} / sqrt(beta),   i = 0..n-2

and W = B B^T has eigenvalue density proportional to
prod |l_i - l_j|^beta prod l_i^((a+1) beta/2 - 1) exp(-beta l_i / 2).
At beta = 2 and integer a this is the law of X X^H for an n x (n + a)
matrix of standard complex Gaussians (E|x|^2 = 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailed, EmptySample

__all__ = [
    "EnsembleSpec",
    "EmpiricalCDF",
    "bidiagonal_factors",
    "sturm_count",
    "smallest_eigenvalues",
    "sample_smallest",
    "dense_oracle_smallest",
    "empirical_cdf",
    "ks_distance",
    "write_samples_csv",
    "write_json",
]


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    beta: float = 2.0
    a: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.a > -1:
            raise ValueError("a must exceed -1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    # Philox is counter based: the key fixes the seed, the counter the stream
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, stream]))


def bidiagonal_factors(spec: EnsembleSpec, replicas: int, stream: int = 0):
    """Diagonal (replicas, n) and subdiagonal (replicas, n-1) of B."""
    rng = _rng(spec.seed, stream)
    n, b = spec.n, spec.beta
    df_diag = b * (n + spec.a - np.arange(n))
    df_sub = b * (n - 1 - np.arange(n - 1))
    d = np.sqrt(rng.chisquare(df_diag, size=(replicas, n)) / b)
    s = np.sqrt(rng.chisquare(df_sub, size=(replicas, n - 1)) / b)
    return d, s


def _tridiagonal(d, s):
    """Diagonal and off-diagonal of B B^T for lower bidiagonal B."""
    diag = d ** 2
    diag[:, 1:] += s ** 2
    off = d[:, :-1] * s
    return diag, off


def sturm_count(diag, off, lam):
    """Number of eigenvalues below ``lam`` for each tridiagonal row-batch."""
    n = diag.shape[1]
    tiny = np.finfo(float).tiny
    count = np.zeros(diag.shape[0], dtype=int)
    piv = diag[:, 0] - lam
    for i in range(n):
        if i > 0:
            prev = np.where(np.abs(piv) < tiny, -tiny, piv)
            piv = diag[:, i] - lam - off[:, i - 1] ** 2 / prev
        count += piv < 0
    return count


def smallest_eigenvalues(diag, off, rel_tol: float = 1e-14, max_iter: int = 200):
    """Smallest eigenvalue of each positive semidefinite tridiagonal matrix
    by bisection on the Sturm count."""
    lo = np.zeros(diag.shape[0])
    # Gershgorin upper bound
    radius = np.zeros_like(diag)
    radius[:, :-1] += np.abs(off)
    radius[:, 1:] += np.abs(off)
    hi = np.min(diag + radius, axis=1)
    scale = np.max(diag + radius, axis=1)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, off, mid) >= 1
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= rel_tol * np.maximum(hi, 1e-300) + 1e-300 * scale):
            return 0.5 * (lo + hi)
    raise ConvergenceFailed("Sturm bisection did not converge")


def sample_smallest(spec: EnsembleSpec, replicas: int, chunk: int = 4096) -> np.ndarray:
    """n * lambda_min for ``replicas`` independent draws.

    Chunk k draws from Philox stream k, so a given replica's value does
    not depend on how many replicas are requested after it.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    out = []
    for k, start in enumerate(range(0, replicas, chunk)):
        m = min(chunk, replicas - start)
        d, s = bidiagonal_factors(spec, m, stream=k)
        diag, off = _tridiagonal(d, s)
        out.append(spec.n * smallest_eigenvalues(diag, off))
    return np.concatenate(out)


def dense_oracle_smallest(n: int, a: int, replicas: int, seed: int) -> np.ndarray:
    """n * lambda_min of X X^H with X an n x (n + a) standard complex
    Gaussian matrix (beta = 2 only)."""
    rng = np.random.default_rng(seed)
    m = n + int(a)
    X = (rng.standard_normal((replicas, n, m)) + 1j * rng.standard_normal((replicas, n, m))) / np.sqrt(2)
    W = X @ np.conj(np.swapaxes(X, 1, 2))
    return n * np.linalg.eigvalsh(W)[:, 0]


@dataclass(frozen=True)
class EmpiricalCDF:
    values: np.ndarray

    def __call__(self, x):
        """Right-continuous step function: fraction of samples <= x."""
        return np.searchsorted(self.values, x, side="right") / len(self.values)


def empirical_cdf(samples) -> EmpiricalCDF:
    v = np.sort(np.asarray(samples, dtype=float).ravel())
    if v.size == 0:
        raise EmptySample("no samples")
    if not np.all(np.isfinite(v)):
        raise ValueError("samples must be finite")
    return EmpiricalCDF(v)


def ks_distance(c1: EmpiricalCDF, c2: EmpiricalCDF) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|."""
    pts = np.concatenate([c1.values, c2.values])
    return float(np.max(np.abs(c1(pts) - c2(pts))))


def write_samples_csv(samples, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("replica,value\n")
        for i, v in enumerate(samples):
            fh.write(f"{i},{v:.17g}\n")


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
