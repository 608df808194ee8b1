# Sigma = tridiagonal(rho). The sample covariance sees rho, the Spearman
# matrix sees 3 Sigma_2, whose off-diagonal is rho1 = (6/pi) arcsin(rho/2).
import numpy as np

from rankspectra import mplaw
from rankspectra.datagen import CovarianceModel
from rankspectra.harness import ExperimentConfig, run_compare, run_simulation, run_theory

rho = 0.5 - 1e-6  # sampling needs |rho| < 1/2
model = CovarianceModel.tridiagonal(100, rho)
print("rho1 =", 6 / np.pi * np.arcsin(rho / 2))

for est in ("sample_cov", "spearman"):
    cfg = ExperimentConfig(n=200, p=100, model=model, estimator=est, replications=10)
    law = run_theory(cfg)
    sim = run_simulation(cfg)
    print(est, "population:", law.meta["population"], "Levy:", round(run_compare(sim.pooled, law).levy, 4))

# The generalized equation is solved in the upper half plane and inverted at
# height nu. Smaller nu is sharper near the edges; at nu = 1e-2 the
# Lorentzian tails leak mass off the grid, hence the warning.
h = mplaw.population_spectrum_for(model, "spearman")
grid = np.linspace(0, 4.5, 400)
for nu in (1e-2, 1e-4, 1e-6):
    law = mplaw.invert_to_density(h, 0.5, grid, nu=nu)
    print(f"nu={nu:g}  peak density {law.density.max():.4f}  mass {law.mass:.5f}")

# Kendall has no closed-form limit here. Compare against the surrogate
# (2/n) sum A_i A_i' + Sigma_3 built from the latent Gaussian scores.
cfg = ExperimentConfig(n=300, p=150, model=CovarianceModel.tridiagonal(150, 0.4), estimator="kendall", replications=1)
sur = ExperimentConfig.from_dict({**cfg.to_dict(), "estimator": "kendall_surrogate"})
print("kendall vs surrogate Levy:", round(run_compare(run_simulation(cfg).pooled, run_simulation(sur).pooled).levy, 4))
