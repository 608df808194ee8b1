"""Rank-based correlation matrices and their limiting spectra."""

from .corrmat import (
    CorrelationMatrix,
    improved_spearman,
    kendall,
    kendall_surrogate,
    pearson,
    sample_covariance,
    spearman,
    spearman_surrogate_w,
)
from .datagen import CovarianceModel, arcsin_transforms, build_covariance, sample_gaussian
from .errors import RankSpectraError
from .harness import ExperimentConfig, run_compare, run_simulation, run_theory, verify_lemmas
from .mplaw import (
    PopulationSpectrum,
    SpectralLaw,
    invert_to_density,
    kendall_identity_law,
    population_spectrum_for,
    solve_generalized_mp,
    standard_mp_law,
)
from .ranks import compute_ranks, latent_scores
from .spectra import SpectralDistribution, esd, ks_distance, levy_distance

__version__ = "0.1.0"
