"""Covariance and correlation estimators, including the rank-based ones.

Kendall's tau is accumulated from pairwise sign vectors in row blocks, so the
work is O(n^2 p^2) with BLAS doing the inner products. The improved Spearman
matrix is obtained from Spearman and Kendall through the exact U-statistic
decomposition rather than a triple sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatch, TiesDetected, ZeroVariance
from .ranks import compute_ranks

__all__ = [
    "CorrelationMatrix",
    "ESTIMATORS",
    "improved_spearman",
    "improved_spearman_bruteforce",
    "kendall",
    "kendall_surrogate",
    "pearson",
    "sample_covariance",
    "spearman",
    "spearman_surrogate_w",
    "write_matrix_csv",
]

Kind = Literal[
    "sample_cov",
    "pearson",
    "kendall",
    "spearman",
    "improved_spearman",
    "spearman_surrogate_w",
    "kendall_surrogate",
]

ESTIMATORS = ("sample_cov", "pearson", "kendall", "spearman", "improved_spearman")

_BLOCK = 64


@dataclass(frozen=True)
class CorrelationMatrix:
    m: NDArray[np.float64]
    kind: Kind

    @property
    def p(self) -> int:
        return self.m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)


def _as_data(data: NDArray[np.float64], min_n: int) -> NDArray[np.float64]:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("data must be an n x p matrix")
    if x.shape[0] < min_n:
        raise ValueError(f"need at least {min_n} observations, got {x.shape[0]}")
    return x


def _symmetrize(m: NDArray[np.float64]) -> NDArray[np.float64]:
    return 0.5 * (m + m.T)


def sample_covariance(data: NDArray[np.float64]) -> CorrelationMatrix:
    x = _as_data(data, 2)
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (x.shape[0] - 1)
    return CorrelationMatrix(_symmetrize(s), "sample_cov")


def pearson(data: NDArray[np.float64]) -> CorrelationMatrix:
    s = sample_covariance(data).m
    d = np.diag(s)
    if np.any(d <= 0):
        raise ZeroVariance("pearson correlation undefined for a constant column")
    inv = 1.0 / np.sqrt(d)
    p = s * inv[:, None] * inv[None, :]
    np.fill_diagonal(p, 1.0)
    return CorrelationMatrix(np.clip(_symmetrize(p), -1.0, 1.0), "pearson")


def _check_ties(x: NDArray[np.float64]) -> None:
    s = np.sort(x, axis=0)
    if np.any(s[1:] == s[:-1]):
        raise TiesDetected("rank correlation requires tie-free columns")


def _pairwise_sign_gram(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Sum over unordered pairs i < j of A_ij A_ij^T."""
    n, p = x.shape
    acc = np.zeros((p, p))
    for start in range(0, n - 1, _BLOCK):
        stop = min(start + _BLOCK, n - 1)
        rows = []
        for i in range(start, stop):
            rows.append(np.sign(x[i] - x[i + 1 :]))
        block = np.concatenate(rows, axis=0)
        acc += block.T @ block
    return acc


def kendall(data: NDArray[np.float64]) -> CorrelationMatrix:
    x = _as_data(data, 2)
    _check_ties(x)
    n = x.shape[0]
    # Each unordered pair appears twice in the sum over ordered pairs.
    tau = 2.0 * _pairwise_sign_gram(x) / (n * (n - 1))
    tau = np.clip(_symmetrize(tau), -1.0, 1.0)
    np.fill_diagonal(tau, 1.0)
    return CorrelationMatrix(tau, "kendall")


def spearman(data: NDArray[np.float64]) -> CorrelationMatrix:
    x = _as_data(data, 3)
    rr = compute_ranks(x, "reject").standardized
    rho = np.clip(_symmetrize(rr.T @ rr / x.shape[0]), -1.0, 1.0)
    np.fill_diagonal(rho, 1.0)
    return CorrelationMatrix(rho, "spearman")


def improved_spearman(
    data: NDArray[np.float64],
    *,
    rho: CorrelationMatrix | None = None,
    tau: CorrelationMatrix | None = None,
) -> CorrelationMatrix:
    """Hoeffding's unbiased Spearman matrix ``((n+1) rho - 3 tau) / (n-2)``.

    Precomputed ``rho``/``tau`` for the same data may be passed to avoid
    recomputation.
    """
    x = _as_data(data, 3)
    n = x.shape[0]
    rho_m = (rho if rho is not None else spearman(x)).m
    tau_m = (tau if tau is not None else kendall(x)).m
    return CorrelationMatrix(((n + 1) * rho_m - 3.0 * tau_m) / (n - 2), "improved_spearman")


def improved_spearman_bruteforce(data: NDArray[np.float64]) -> NDArray[np.float64]:
    """Literal triple sum over distinct (i, j, k); for small n only."""
    x = _as_data(data, 3)
    _check_ties(x)
    n, p = x.shape
    if n > 30:
        raise ValueError("brute-force triple sum is limited to n <= 30")
    acc = np.zeros((p, p))
    for i, j, k in permutations(range(n), 3):
        acc += np.outer(np.sign(x[i] - x[j]), np.sign(x[i] - x[k]))
    return 3.0 * acc / (n * (n - 1) * (n - 2))


def spearman_surrogate_w(latent_scores: NDArray[np.float64]) -> CorrelationMatrix:
    a = _as_data(latent_scores, 1)
    return CorrelationMatrix(_symmetrize(3.0 * a.T @ a / a.shape[0]), "spearman_surrogate_w")


def kendall_surrogate(
    latent_scores: NDArray[np.float64], sigma3: NDArray[np.float64]
) -> CorrelationMatrix:
    a = _as_data(latent_scores, 1)
    s3 = np.asarray(sigma3, dtype=np.float64)
    if s3.shape != (a.shape[1], a.shape[1]):
        raise DimensionMismatch(f"sigma3 shape {s3.shape} does not match p={a.shape[1]}")
    return CorrelationMatrix(_symmetrize(2.0 * a.T @ a / a.shape[0] + s3), "kendall_surrogate")


def write_matrix_csv(m: NDArray[np.float64] | CorrelationMatrix, path: str | Path) -> None:
    arr = np.asarray(m.m if isinstance(m, CorrelationMatrix) else m, dtype=np.float64)
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")
