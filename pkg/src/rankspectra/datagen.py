"""Population covariance models and seeded synthetic data.

Random streams are derived from ``(master, replication)`` through
:class:`numpy.random.SeedSequence` with ``spawn_key=(replication,)`` feeding a
PCG64 bit generator. The mapping is pure, so a replication can be regenerated
in isolation and in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.special import ndtr

from .errors import EntryOutOfRange, InvalidRho, NonUnitDiagonal, NotPositiveDefinite

__all__ = [
    "CovarianceModel",
    "TransformedCovariance",
    "arcsin_transforms",
    "build_covariance",
    "rng_for",
    "sample_cauchy_nonparanormal",
    "sample_gaussian",
    "sample_latent_and_cauchy",
]

Kind = Literal["identity", "tridiagonal", "explicit"]

_DIAG_TOL = 1e-12
_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class CovarianceModel:
    """A unit-diagonal population covariance Σ of dimension ``p``.

    ``rho`` is used by the tridiagonal kind, ``matrix`` by the explicit kind.
    Admissibility of ``rho`` for sampling (|rho| < 1/2) is enforced by
    :func:`build_covariance`; the Szegő limit law itself is defined up to
    |rho| = 1/2, so the model object accepts the closed range.
    """

    kind: Kind
    p: int
    rho: float | None = None
    matrix: NDArray[np.float64] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "tridiagonal", "explicit"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if int(self.p) < 1:
            raise ValueError("dimension p must be >= 1")
        if self.kind == "tridiagonal":
            if self.rho is None:
                raise InvalidRho("tridiagonal model requires rho")
            if not abs(self.rho) <= 0.5:
                raise InvalidRho(f"|rho| must be <= 1/2, got {self.rho}")
        if self.kind == "explicit":
            if self.matrix is None:
                raise ValueError("explicit model requires a matrix")
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.shape != (self.p, self.p):
                raise ValueError(f"matrix shape {m.shape} does not match p={self.p}")
            object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, p: int) -> CovarianceModel:
        return cls("identity", p)

    @classmethod
    def tridiagonal(cls, p: int, rho: float) -> CovarianceModel:
        return cls("tridiagonal", p, rho=float(rho))

    @classmethod
    def explicit(cls, matrix: Any) -> CovarianceModel:
        m = np.asarray(matrix, dtype=np.float64)
        return cls("explicit", m.shape[0], matrix=m)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "p": int(self.p)}
        if self.rho is not None:
            out["rho"] = self.rho
        if self.matrix is not None:
            out["matrix"] = self.matrix.tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> CovarianceModel:
        kind = d["kind"]
        if kind == "explicit":
            m = np.asarray(d["matrix"], dtype=np.float64)
            return cls("explicit", int(d.get("p", m.shape[0])), matrix=m)
        return cls(kind, int(d["p"]), rho=None if d.get("rho") is None else float(d["rho"]))

    def with_dimension(self, p: int) -> CovarianceModel:
        if self.kind == "explicit":
            raise ValueError("cannot resize an explicit covariance model")
        return CovarianceModel(self.kind, p, rho=self.rho)


@dataclass(frozen=True)
class TransformedCovariance:
    """Entrywise arcsine images of Σ: Σ₁, Σ₂ and Σ₃ = Σ₁ − 2Σ₂."""

    sigma1: NDArray[np.float64]
    sigma2: NDArray[np.float64]
    sigma3: NDArray[np.float64]


def build_covariance(model: CovarianceModel) -> NDArray[np.float64]:
    p = model.p
    if model.kind == "identity":
        sigma = np.eye(p)
    elif model.kind == "tridiagonal":
        rho = float(model.rho)  # type: ignore[arg-type]
        if abs(rho) >= 0.5:
            raise InvalidRho(f"tridiagonal sampling requires |rho| < 1/2, got {rho}")
        sigma = np.eye(p)
        idx = np.arange(p - 1)
        sigma[idx, idx + 1] = rho
        sigma[idx + 1, idx] = rho
    else:
        sigma = np.array(model.matrix, dtype=np.float64)
        if np.any(np.abs(np.diag(sigma) - 1.0) > _DIAG_TOL):
            raise NonUnitDiagonal("explicit covariance must have unit diagonal")
        if not np.array_equal(sigma, sigma.T):
            if np.max(np.abs(sigma - sigma.T)) > 1e-12:
                raise NotPositiveDefinite("explicit covariance is not symmetric")
            sigma = 0.5 * (sigma + sigma.T)
        np.fill_diagonal(sigma, 1.0)
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance matrix is not positive definite") from exc
    return sigma


def arcsin_transforms(sigma: NDArray[np.float64]) -> TransformedCovariance:
    s = np.asarray(sigma, dtype=np.float64)
    if np.any(np.abs(s) > 1.0 + _RANGE_TOL):
        raise EntryOutOfRange("correlation entries must lie in [-1, 1]")
    s = np.clip(s, -1.0, 1.0)
    sigma1 = (2.0 / np.pi) * np.arcsin(s)
    sigma2 = (2.0 / np.pi) * np.arcsin(s / 2.0)
    # arcsin(1/2) = pi/6 is not exact in floating point; pin the diagonals.
    if s.ndim == 2 and s.shape[0] == s.shape[1]:
        diag = np.isclose(np.diag(s), 1.0, rtol=0.0, atol=_RANGE_TOL)
        i = np.flatnonzero(diag)
        sigma1[i, i] = 1.0
        sigma2[i, i] = 1.0 / 3.0
    sigma3 = sigma1 - 2.0 * sigma2
    if s.ndim == 2 and s.shape[0] == s.shape[1]:
        sigma3[i, i] = 1.0 / 3.0
    return TransformedCovariance(sigma1, sigma2, sigma3)


def rng_for(master: int, replication: int) -> np.random.Generator:
    """Generator for replication ``replication`` of master seed ``master``."""
    ss = np.random.SeedSequence(int(master), spawn_key=(int(replication),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_gaussian(
    model: CovarianceModel, n: int, seed: int, replication: int = 0
) -> NDArray[np.float64]:
    """n i.i.d. rows from N(0, Σ) via the lower Cholesky factor of Σ."""
    if n < 2:
        raise ValueError("n must be >= 2")
    sigma = build_covariance(model)
    rng = rng_for(seed, replication)
    z = rng.standard_normal((n, model.p))
    if model.kind == "identity":
        return z
    chol = np.linalg.cholesky(sigma)
    return z @ chol.T


def sample_latent_and_cauchy(
    model: CovarianceModel, n: int, seed: int, replication: int = 0
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Latent Gaussian draw and its standard Cauchy image, same stream."""
    latent = sample_gaussian(model, n, seed, replication)
    # tan(pi*(Phi(y) - 1/2)) evaluated through the lower tail keeps precision for large |y|.
    cauchy = np.sign(latent) * np.tan(np.pi * (0.5 - ndtr(-np.abs(latent))))
    return latent, cauchy


def sample_cauchy_nonparanormal(
    model: CovarianceModel, n: int, seed: int, replication: int = 0
) -> NDArray[np.float64]:
    """Non-paranormal data with standard Cauchy marginals and latent correlation Σ.

    Entry ``x = tan(pi * (Phi(y) - 1/2))`` of the latent Gaussian ``y``; the
    map is strictly increasing so the column ranks equal those of the latent
    draw produced by :func:`sample_gaussian` with the same seed.
    """
    return sample_latent_and_cauchy(model, n, seed, replication)[1]
