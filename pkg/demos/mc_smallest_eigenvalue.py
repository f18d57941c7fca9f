"""Smallest eigenvalue of square complex Wishart matrices: n * lambda_min
is Exp(1), which the tridiagonal sampler and the dense sampler both show."""

import numpy as np
from scipy import stats

from hardedge import mc

spec = mc.EnsembleSpec(n=40, beta=2.0, a=0.0, seed=7)
fast = mc.sample_smallest(spec, 20000)
dense = mc.dense_oracle_smallest(40, 0, 2000, seed=8)
print("mean", fast.mean(), "(expect 1)")
print("KS vs Exp(1):", stats.kstest(fast, "expon").statistic)
print("KS vs dense:", mc.ks_distance(mc.empirical_cdf(fast), mc.empirical_cdf(dense)))
print("P(n lambda_min <= 1):", mc.empirical_cdf(fast)(1.0), "vs", 1 - np.exp(-1))
