"""Column ranks, sign vectors and latent scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.special import ndtr
from scipy.stats import rankdata

from .errors import TiesDetected, ZeroDifference

__all__ = [
    "RankingMatrix",
    "compute_ranks",
    "empirical_cdf_distance",
    "latent_scores",
    "normal_cdf",
    "reconstruct_ri_from_signs",
    "sign_vector",
    "standardize_ranks",
]

TiePolicy = Literal["reject", "midrank"]


@dataclass(frozen=True)
class RankingMatrix:
    """Integer column ranks ``r`` (1..n) and their standardized form ``R``.

    ``midrank`` is True when tied values were averaged; such matrices fall
    outside the no-ties model the rank identities assume.
    """

    r: NDArray[np.float64]
    standardized: NDArray[np.float64]
    midrank: bool = False

    @property
    def n(self) -> int:
        return self.r.shape[0]


def standardize_ranks(r: NDArray[np.float64]) -> NDArray[np.float64]:
    """``sqrt(12/(n^2-1)) * (r - (n+1)/2)`` columnwise."""
    n = r.shape[0]
    return np.sqrt(12.0 / (n * n - 1.0)) * (r - (n + 1) / 2.0)


def _has_ties(data: NDArray[np.float64]) -> bool:
    s = np.sort(data, axis=0)
    return bool(np.any(s[1:] == s[:-1]))


def compute_ranks(data: NDArray[np.float64], tie_policy: TiePolicy = "reject") -> RankingMatrix:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if n < 2:
        raise ValueError("ranking needs n >= 2 observations")
    if tie_policy not in ("reject", "midrank"):
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    ties = _has_ties(x)
    if ties and tie_policy == "reject":
        raise TiesDetected("data contain tied values within a column")
    if ties:
        r = rankdata(x, method="average", axis=0).astype(np.float64)
    else:
        order = np.argsort(x, axis=0, kind="stable")
        r = np.empty_like(x)
        np.put_along_axis(r, order, np.arange(1, n + 1, dtype=np.float64)[:, None], axis=0)
    return RankingMatrix(r=r, standardized=standardize_ranks(r), midrank=ties)


def sign_vector(xi: NDArray[np.float64], xk: NDArray[np.float64]) -> NDArray[np.float64]:
    """Entrywise sign of ``xi - xk``."""
    d = np.asarray(xi, dtype=np.float64) - np.asarray(xk, dtype=np.float64)
    if np.any(d == 0):
        raise ZeroDifference("sign vector undefined for tied coordinates")
    return np.sign(d)


def reconstruct_ri_from_signs(data: NDArray[np.float64], i: int) -> NDArray[np.float64]:
    """Standardized rank row ``i`` rebuilt as ``sqrt(3/(n^2-1)) * sum_{k != i} A_ik``."""
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    others = np.delete(x, i, axis=0)
    d = x[i] - others
    if np.any(d == 0):
        raise ZeroDifference(f"row {i} ties another row in some coordinate")
    return np.sqrt(3.0 / (n * n - 1.0)) * np.sign(d).sum(axis=0)


def normal_cdf(x: NDArray[np.float64] | float) -> NDArray[np.float64]:
    # scipy's ndtr (Cephes erf/erfc) has relative error near machine epsilon.
    return ndtr(x)


def latent_scores(latent_gaussian: NDArray[np.float64]) -> NDArray[np.float64]:
    """``2 * Phi(x) - 1`` entrywise.

    Written as ``Phi(x) - Phi(-x)`` so tails keep full relative precision and
    the map stays exactly odd.
    """
    x = np.asarray(latent_gaussian, dtype=np.float64)
    return ndtr(x) - ndtr(-x)


def empirical_cdf_distance(
    data_column: NDArray[np.float64], true_cdf: Callable[[NDArray[np.float64]], NDArray[np.float64]]
) -> float:
    """Exact ``sup_x |F_hat(x) - F(x)|`` for a continuous ``F``.

    The supremum of the difference is attained at a jump of the empirical CDF,
    either just before it or at it.
    """
    xs = np.sort(np.asarray(data_column, dtype=np.float64).ravel())
    n = xs.size
    f = np.asarray(true_cdf(xs), dtype=np.float64)
    k = np.arange(1, n + 1)
    upper = np.abs(k / n - f)
    lower = np.abs((k - 1) / n - f)
    return float(max(upper.max(), lower.max()))
