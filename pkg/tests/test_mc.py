"""Tridiagonal beta-Laguerre sampling and empirical CDF tools."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import eigvalsh_tridiagonal
from scipy.stats import expon, kstest, ks_2samp

from hardedge import mc
from hardedge.errors import EmptySample


def test_spec_validation():
    for bad in (dict(n=1), dict(n=4, beta=0.0), dict(n=4, a=-1.0), dict(n=4, seed=-1)):
        with pytest.raises(ValueError):
            mc.EnsembleSpec(**bad)
    with pytest.raises(ValueError):
        mc.sample_smallest(mc.EnsembleSpec(4), 0)


def test_smallest_eigenvalue_matches_lapack():
    spec = mc.EnsembleSpec(12, beta=1.5, a=0.7, seed=3)
    d, s = mc.bidiagonal_factors(spec, 50)
    diag, off = mc._tridiagonal(d, s)
    got = mc.smallest_eigenvalues(diag, off)
    ref = np.array([eigvalsh_tridiagonal(diag[i], off[i])[0] for i in range(50)])
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-15)


def test_tridiagonal_is_bidiagonal_product():
    d, s = mc.bidiagonal_factors(mc.EnsembleSpec(5, seed=9), 1)
    B = np.diag(d[0]) + np.diag(s[0], -1)
    diag, off = mc._tridiagonal(d, s)
    W = B @ B.T
    assert np.allclose(np.diag(W), diag[0]) and np.allclose(np.diag(W, -1), off[0])


def test_sturm_count_against_dense():
    rng = np.random.default_rng(0)
    diag = rng.uniform(1, 3, size=(1, 8))
    off = rng.uniform(-1, 1, size=(1, 7))
    ev = np.linalg.eigvalsh(np.diag(diag[0]) + np.diag(off[0], 1) + np.diag(off[0], -1))
    for lam in np.linspace(ev[0] - 1, ev[-1] + 1, 17):
        assert mc.sturm_count(diag, off, lam)[0] == np.sum(ev < lam)


def test_samples_positive_and_reproducible():
    # [TRIVIAL] hard wall and determinism
    spec = mc.EnsembleSpec(8, beta=2.0, a=0.5, seed=42)
    a = mc.sample_smallest(spec, 3000, chunk=1000)
    b = mc.sample_smallest(spec, 3000, chunk=1000)
    assert np.all(a > 0)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, mc.sample_smallest(mc.EnsembleSpec(8, 2.0, 0.5, seed=43), 3000, chunk=1000))


def test_replicas_independent_of_request_size():
    spec = mc.EnsembleSpec(6, seed=5)
    short = mc.sample_smallest(spec, 1500, chunk=1000)
    long = mc.sample_smallest(spec, 2500, chunk=1000)
    assert short[:1000].tobytes() == long[:1000].tobytes()


def test_dense_oracle_beta2():
    # [DERIVED] tridiagonal model against complex Gaussian Gram matrices
    s = mc.sample_smallest(mc.EnsembleSpec(6, 2.0, 0.0, seed=1), 10_000)
    d = mc.dense_oracle_smallest(6, 0, 10_000, seed=2)
    assert mc.ks_distance(mc.empirical_cdf(s), mc.empirical_cdf(d)) <= 0.03


def test_dense_oracle_beta2_rectangular():
    s = mc.sample_smallest(mc.EnsembleSpec(5, 2.0, 2.0, seed=11), 10_000)
    d = mc.dense_oracle_smallest(5, 2, 10_000, seed=12)
    assert mc.ks_distance(mc.empirical_cdf(s), mc.empirical_cdf(d)) <= 0.03


def test_dense_oracle_beta1():
    # real Gaussian Gram matrices realise beta = 1
    n, a = 5, 1
    rng = np.random.default_rng(8)
    X = rng.standard_normal((10_000, n, n + a))
    dense = n * np.linalg.eigvalsh(X @ np.swapaxes(X, 1, 2))[:, 0]
    s = mc.sample_smallest(mc.EnsembleSpec(n, 1.0, float(a), seed=9), 10_000)
    assert mc.ks_distance(mc.empirical_cdf(s), mc.empirical_cdf(dense)) <= 0.03


def test_square_beta2_is_exponential():
    # for square complex Wishart, P(n lambda_min > s) = exp(-s) exactly
    s = mc.sample_smallest(mc.EnsembleSpec(10, 2.0, 0.0, seed=77), 10_000)
    assert kstest(s, expon.cdf).statistic <= 0.02
    assert s.mean() == pytest.approx(1.0, abs=0.05)


def test_n_doubling_stability():
    # [DERIVED] finite-n convergence proxy
    s200 = mc.sample_smallest(mc.EnsembleSpec(200, 2.0, 0.0, seed=21), 10_000)
    s400 = mc.sample_smallest(mc.EnsembleSpec(400, 2.0, 0.0, seed=22), 10_000)
    assert mc.ks_distance(mc.empirical_cdf(s200), mc.empirical_cdf(s400)) <= 0.05


def test_cdf_basics():
    c = mc.empirical_cdf([3.0, 1.0, 2.0, 2.0])
    assert c(0.5) == 0.0 and c(1.0) == 0.25 and c(2.0) == 0.75 and c(10.0) == 1.0
    assert np.all(np.diff(c(np.linspace(0, 4, 41))) >= 0)
    with pytest.raises(EmptySample):
        mc.empirical_cdf([])
    with pytest.raises(ValueError):
        mc.empirical_cdf([1.0, np.nan])


def test_ks_examples():
    c = mc.empirical_cdf([0.1, 0.5, 0.9])
    assert mc.ks_distance(c, c) == 0.0
    assert mc.ks_distance(c, mc.empirical_cdf([2.0, 3.0])) == 1.0


# scipy warns about its p-value on tiny samples; only the statistic is used
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@given(st.lists(st.floats(0, 10), min_size=1, max_size=40),
       st.lists(st.floats(0, 10), min_size=1, max_size=40))
def test_ks_matches_scipy(x, y):
    ours = mc.ks_distance(mc.empirical_cdf(x), mc.empirical_cdf(y))
    assert ours == pytest.approx(ks_2samp(x, y).statistic, abs=1e-12)
    assert 0.0 <= ours <= 1.0


def test_outputs(tmp_path):
    s = mc.sample_smallest(mc.EnsembleSpec(4, seed=1), 5)
    csv = tmp_path / "s.csv"
    mc.write_samples_csv(s, csv)
    lines = csv.read_bytes().decode().split("\n")
    assert lines[0] == "replica,value" and lines[-1] == ""
    assert [float(l.split(",")[1]) for l in lines[1:-1]] == s.tolist()
    js = tmp_path / "r.json"
    mc.write_json({"b": 1, "a": 2}, js)
    assert js.read_text().index('"a"') < js.read_text().index('"b"')
    assert json.loads(js.read_text()) == {"a": 2, "b": 1}
