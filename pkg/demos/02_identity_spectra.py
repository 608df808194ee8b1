# Spectra under Sigma = I: sample covariance, Spearman and Kendall vs their limits.
#
# Spearman shares the Marcenko-Pastur limit with the sample covariance.
# Kendall's tau converges to an affine image (2/3) Y + 1/3 of it instead.
import numpy as np

from rankspectra.datagen import CovarianceModel
from rankspectra.harness import ExperimentConfig, run_compare, run_simulation, run_theory


def ascii_hist(ev, law, lo, hi, bins=24):
    counts, edges = np.histogram(ev, bins=bins, range=(lo, hi), density=True)
    mid = 0.5 * (edges[1:] + edges[:-1])
    dens = np.interp(mid, law.grid, law.density)
    for c, d, m in zip(counts, dens, mid):
        print(f"{m:6.3f} {'#' * int(40 * c / max(counts.max(), 1e-12)):<40s} {d:6.3f}")


for est in ("sample_cov", "spearman", "kendall"):
    cfg = ExperimentConfig(n=400, p=200, model=CovarianceModel.identity(200), estimator=est, replications=5)
    sim = run_simulation(cfg)
    law = run_theory(cfg)
    rep = run_compare(sim.pooled, law)
    print(f"\n{est}: Levy {rep.levy:.4f}  KS {rep.ks:.4f}  ({sim.pooled.eigenvalues.size} eigenvalues)")
    ascii_hist(sim.pooled.eigenvalues, law, 0.0, 3.2)

# With p > n a mass of 1 - n/p sits at 0 (at 1/3 for Kendall).
cfg = ExperimentConfig(n=100, p=200, model=CovarianceModel.identity(200), estimator="spearman", replications=5)
sim = run_simulation(cfg)
print("\nfraction of zero eigenvalues, y = 2:", np.mean(sim.pooled.eigenvalues == 0))
