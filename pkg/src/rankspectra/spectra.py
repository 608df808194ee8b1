"""Eigenvalues, empirical spectral distributions and distances between CDFs.

Any object with ``cdf``, ``cdf_left`` and ``knots`` can be compared. Between
consecutive knots a supported CDF must be constant or linear; step functions
(ESDs) and trapezoid-integrated density grids (theoretical laws) both qualify.
Under that restriction the suprema in the Levy and Kolmogorov-Smirnov
distances are attained at a knot, approached either from the right or from
the left, so checking those points is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
from numpy.typing import NDArray

from .errors import NoConvergence, NotACdf, NotSymmetric

__all__ = [
    "Cdf",
    "SpectralDistribution",
    "eigenvalues_symmetric",
    "esd",
    "ks_distance",
    "levy_distance",
    "pool",
    "read_esd_csv",
    "write_esd_binned_csv",
    "write_esd_csv",
]

_SYM_TOL = 1e-8
_CDF_TOL = 1e-6


class Cdf(Protocol):
    knots: NDArray[np.float64]

    def cdf(self, x: NDArray[np.float64]) -> NDArray[np.float64]: ...

    def cdf_left(self, x: NDArray[np.float64]) -> NDArray[np.float64]: ...


@dataclass(frozen=True)
class SpectralDistribution:
    """Step CDF with mass 1/p at each eigenvalue, plus an optional atom at 0."""

    eigenvalues: NDArray[np.float64]
    atom_at_zero: float = 0.0
    source: str = ""

    def __post_init__(self) -> None:
        ev = np.sort(np.asarray(self.eigenvalues, dtype=np.float64).ravel())
        if ev.size == 0:
            raise ValueError("spectral distribution needs at least one eigenvalue")
        if not 0.0 <= self.atom_at_zero < 1.0:
            raise ValueError("atom_at_zero must lie in [0, 1)")
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def knots(self) -> NDArray[np.float64]:
        if self.atom_at_zero > 0:
            return np.union1d(self.eigenvalues, [0.0])
        return self.eigenvalues

    def _mix(self, step: NDArray[np.float64], at_zero: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.atom_at_zero == 0:
            return step
        return (1.0 - self.atom_at_zero) * step + self.atom_at_zero * at_zero

    def cdf(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=np.float64)
        step = np.searchsorted(self.eigenvalues, x, side="right") / self.eigenvalues.size
        return self._mix(step, (x >= 0).astype(np.float64))

    def cdf_left(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=np.float64)
        step = np.searchsorted(self.eigenvalues, x, side="left") / self.eigenvalues.size
        return self._mix(step, (x > 0).astype(np.float64))

    def mean(self) -> float:
        return float((1.0 - self.atom_at_zero) * self.eigenvalues.mean())


def eigenvalues_symmetric(m) -> NDArray[np.float64]:
    """All eigenvalues of a real symmetric matrix, ascending (LAPACK syevd)."""
    a = np.asarray(getattr(m, "m", m), dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) >= _SYM_TOL * scale:
        raise NotSymmetric("matrix is not symmetric")
    try:
        return np.linalg.eigvalsh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("symmetric eigensolver did not converge") from exc


def esd(m, source: str | None = None, snap_zero: bool = True) -> SpectralDistribution:
    """ESD of a symmetric matrix.

    With ``snap_zero`` eigenvalues smaller in magnitude than the backward error
    bound ``p * eps * max|lambda|`` are set to exactly 0. Rank-deficient
    estimators (p > n) then put their null space on the law's atom at 0
    instead of scattering it over +-1e-15, which would otherwise dominate the
    KS distance.
    """
    kind = getattr(m, "kind", "")
    ev = eigenvalues_symmetric(m)
    if snap_zero and ev.size:
        bound = ev.size * np.finfo(np.float64).eps * float(np.max(np.abs(ev)))
        ev = np.where(np.abs(ev) <= bound, 0.0, ev)
    return SpectralDistribution(ev, source=source or kind)


def pool(dists: Iterable[SpectralDistribution], source: str = "pooled") -> SpectralDistribution:
    """Concatenate eigenvalues; equals the ESD of the block-diagonal matrix."""
    ev = np.concatenate([d.eigenvalues for d in dists])
    return SpectralDistribution(np.sort(ev, kind="stable"), source=source)


def _validate(f: Cdf) -> None:
    k = np.asarray(f.knots, dtype=np.float64)
    if k.size == 0 or np.any(np.diff(k) < 0) or not np.all(np.isfinite(k)):
        raise NotACdf("knots must be finite and ascending")
    right = f.cdf(k)
    left = f.cdf_left(k)
    if np.any(np.diff(right) < -1e-12) or np.any(right - left < -1e-12):
        raise NotACdf("CDF is not monotone")
    if abs(float(left[0])) > _CDF_TOL or abs(float(right[-1]) - 1.0) > _CDF_TOL:
        raise NotACdf("CDF limits are not 0 and 1")


def _sup_shifted_gap(f: Cdf, g: Cdf, eps: float) -> float:
    """sup_x [g(x) - f(x + eps)] evaluated at all knots, both one-sided limits."""
    pts = np.concatenate([np.asarray(g.knots), np.asarray(f.knots) - eps])
    right = g.cdf(pts) - f.cdf(pts + eps)
    left = g.cdf_left(pts) - f.cdf_left(pts + eps)
    return float(max(right.max(), left.max(), 0.0))


def _levy_feasible(f: Cdf, g: Cdf, eps: float) -> bool:
    # g(x) <= f(x+eps)+eps and f(x-eps)-eps <= g(x); the latter is the former
    # with the roles of f and g swapped after substituting x -> x + eps.
    return _sup_shifted_gap(f, g, eps) <= eps and _sup_shifted_gap(g, f, eps) <= eps


def levy_distance(f: Cdf, g: Cdf, tol: float = 1e-6) -> float:
    """Levy distance by bisection on eps; result is an upper bracket within ``tol``."""
    _validate(f)
    _validate(g)
    if _levy_feasible(f, g, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_feasible(f, g, mid):
            hi = mid
        else:
            lo = mid
    return hi


def ks_distance(f: Cdf, g: Cdf) -> float:
    _validate(f)
    _validate(g)
    pts = np.union1d(np.asarray(f.knots), np.asarray(g.knots))
    right = np.abs(f.cdf(pts) - g.cdf(pts))
    left = np.abs(f.cdf_left(pts) - g.cdf_left(pts))
    return float(max(right.max(), left.max()))


def write_esd_csv(dist: SpectralDistribution, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("eigenvalue\n")
        for v in dist.eigenvalues:
            fh.write(f"{float(v)!r}\n")


def read_esd_csv(path: str | Path) -> SpectralDistribution:
    from .errors import ParseError

    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "eigenvalue":
                raise ParseError(f"{path}: expected header 'eigenvalue', got {header!r}")
            values = [float(line) for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: {exc}") from exc
    if not values:
        raise ParseError(f"{path}: no eigenvalues")
    return SpectralDistribution(np.array(values), source=str(path))


def write_esd_binned_csv(dist: SpectralDistribution, path: str | Path, bins: int | None = None) -> None:
    """Histogram density; Freedman-Diaconis bin edges unless ``bins`` is given."""
    ev = dist.eigenvalues
    edges = np.histogram_bin_edges(ev, bins="fd" if bins is None else int(bins))
    if edges.size < 2:
        edges = np.array([ev[0] - 0.5, ev[0] + 0.5])
    density, edges = np.histogram(ev, bins=edges, density=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_left,bin_right,density\n")
        for a, b, d in zip(edges[:-1], edges[1:], density):
            fh.write(f"{float(a)!r},{float(b)!r},{float(d)!r}\n")
