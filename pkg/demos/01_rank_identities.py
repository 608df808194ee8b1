# Rank identities on a small example, checked numerically.
import numpy as np

from rankspectra import corrmat
from rankspectra.ranks import compute_ranks, reconstruct_ri_from_signs

rng = np.random.default_rng(0)
x = rng.standard_normal((8, 3))
n = x.shape[0]

# ranks, then the standardized version (columns sum to 0, unit norm / n)
rk = compute_ranks(x)
print(rk.r.astype(int))
R = rk.standardized
print("column sums:", R.sum(0).round(12))
print("diag of R'R/n:", np.diag(R.T @ R / n))

# every rank row is a scaled sum of sign vectors against the other rows
for i in range(n):
    assert np.allclose(reconstruct_ri_from_signs(x, i), R[i])
print("rank rows rebuilt from signs: ok")

# Spearman splits into a Kendall part and an unbiased U-statistic part
rho = corrmat.spearman(x).m
tau = corrmat.kendall(x).m
tilde = corrmat.improved_spearman(x).m
print("spearman:\n", rho.round(4))
print("3/(n+1) tau + (n-2)/(n+1) tilde:\n", (3 / (n + 1) * tau + (n - 2) / (n + 1) * tilde).round(4))

# the U-statistic matches the literal triple sum over distinct indices
print("max diff vs triple sum:", np.abs(tilde - corrmat.improved_spearman_bruteforce(x)).max())
