"""Marčenko–Pastur laws: closed forms, the generalized equation, Stieltjes inversion.

The generalized equation for the Stieltjes transform ``m`` of the limiting
spectral distribution with aspect ratio ``y = lim p/n`` and population
spectrum ``H`` is

    m = ∫ dH(t) / (t (1 - y - y z m) - z),      Im z > 0.

Every population spectrum is reduced to a finite quadrature ``(t_k, w_k)``:
point masses are used as they are, and the arcsine (Szegő) law of a
tridiagonal Toeplitz matrix is integrated by Gauss–Legendre in the angle
``t = 1 + 2 rho cos(theta)``, which removes the endpoint singularities of its
density.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from .datagen import CovarianceModel, arcsin_transforms, build_covariance
from .errors import (
    InvalidAspect,
    NoConvergence,
    NormalizationFailure,
    ParseError,
    WrongHalfPlane,
)

__all__ = [
    "PopulationSpectrum",
    "SpectralLaw",
    "StieltjesPoint",
    "default_grid",
    "invert_to_density",
    "kendall_identity_law",
    "mp_edges",
    "population_spectrum_for",
    "read_law",
    "solve_generalized_mp",
    "solve_on_grid",
    "standard_mp_density",
    "standard_mp_law",
    "standard_mp_stieltjes",
    "write_law",
]

GL_NODES = 256
DEFAULT_NU = 1e-4
DEFAULT_GRID_POINTS = 2000
RESIDUAL_TOL = 1e-10
STEP_TOL = 1e-12
MAX_ITER = 10_000

Method = Literal["quadrature", "closed_form"]


# ---------------------------------------------------------------------------
# population spectra


@dataclass(frozen=True)
class PopulationSpectrum:
    """Limit ``H`` of the population ESD: weighted point masses or a Szegő arcsine law."""

    kind: Literal["point_masses", "arcsine_szego"]
    values: NDArray[np.float64] | None = None
    weights: NDArray[np.float64] | None = None
    rho1: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "point_masses":
            v = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
            w = (
                np.full(v.size, 1.0 / v.size)
                if self.weights is None
                else np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
            )
            if v.shape != w.shape or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("point mass weights must be non-negative and sum to 1")
            order = np.argsort(v, kind="stable")
            object.__setattr__(self, "values", v[order])
            object.__setattr__(self, "weights", w[order])
        elif self.kind == "arcsine_szego":
            object.__setattr__(self, "rho1", abs(float(self.rho1)))
        else:
            raise ValueError(f"unknown population spectrum kind {self.kind!r}")

    @classmethod
    def point_masses(cls, values, weights=None) -> PopulationSpectrum:
        return cls("point_masses", values=values, weights=weights)

    @classmethod
    def delta(cls, t: float = 1.0) -> PopulationSpectrum:
        return cls("point_masses", values=[t], weights=[1.0])

    @classmethod
    def arcsine(cls, rho1: float) -> PopulationSpectrum:
        return cls("arcsine_szego", rho1=rho1)

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "point_masses":
            return float(self.values[0]), float(self.values[-1])
        return 1.0 - 2.0 * self.rho1, 1.0 + 2.0 * self.rho1

    def cdf(self, t) -> NDArray[np.float64]:
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "point_masses":
            cw = np.concatenate([[0.0], np.cumsum(self.weights)])
            return np.minimum(cw[np.searchsorted(self.values, t, side="right")], 1.0)
        if self.rho1 == 0:
            return (t >= 1.0).astype(np.float64)
        u = np.clip((t - 1.0) / (2.0 * self.rho1), -1.0, 1.0)
        return 1.0 - np.arccos(u) / np.pi

    def quadrature(self, nodes: int = GL_NODES) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Nodes and weights with ``∫ f dH ≈ Σ w_k f(t_k)``."""
        if self.kind == "point_masses":
            return self.values, self.weights
        if self.rho1 == 0:
            return np.array([1.0]), np.array([1.0])
        x, w = np.polynomial.legendre.leggauss(nodes)
        theta = 0.5 * np.pi * (x + 1.0)
        return 1.0 + 2.0 * self.rho1 * np.cos(theta), 0.5 * w

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "point_masses":
            return {"kind": self.kind, "values": self.values.tolist(), "weights": self.weights.tolist()}
        return {"kind": self.kind, "rho1": self.rho1}


def population_spectrum_for(
    model: CovarianceModel, target: Literal["sample_cov", "pearson", "spearman"]
) -> PopulationSpectrum:
    """Population spectrum ``H`` entering the generalized equation for an estimator.

    Sample covariance and Pearson use Σ itself; Spearman uses ``3 Σ₂``, the
    covariance of ``sqrt(3) (2 Φ(X) - 1)``.
    """
    if target not in ("sample_cov", "pearson", "spearman"):
        raise ValueError(f"no generalized MP population spectrum for {target!r}")
    if model.kind == "identity":
        return PopulationSpectrum.delta(1.0)
    if model.kind == "tridiagonal":
        rho = float(model.rho)  # type: ignore[arg-type]
        if target == "spearman":
            rho = (6.0 / np.pi) * np.arcsin(rho / 2.0)
        return PopulationSpectrum.arcsine(rho)
    sigma = build_covariance(model)
    if target == "spearman":
        sigma = 3.0 * arcsin_transforms(sigma).sigma2
    return PopulationSpectrum.point_masses(np.linalg.eigvalsh(sigma))


# ---------------------------------------------------------------------------
# standard law


def _check_aspect(y: float) -> None:
    if not y > 0:
        raise InvalidAspect(f"aspect ratio y must be positive, got {y}")


def mp_edges(y: float) -> tuple[float, float]:
    _check_aspect(y)
    s = np.sqrt(y)
    return (1.0 - s) ** 2, (1.0 + s) ** 2


def standard_mp_density(y: float, x) -> NDArray[np.float64]:
    """Absolutely continuous part of the standard MP law; the atom ``1 - 1/y`` is separate."""
    lo, hi = mp_edges(y)
    x = np.asarray(x, dtype=np.float64)
    inside = (x >= lo) & (x <= hi) & (x > 0)
    xs = np.where(inside, x, 1.0)
    dens = np.sqrt(np.clip((hi - xs) * (xs - lo), 0.0, None)) / (2.0 * np.pi * xs * y)
    return np.where(inside, dens, 0.0)


def _upper_root(b: NDArray[np.complex128], disc: NDArray[np.complex128], denom) -> NDArray[np.complex128]:
    r = np.sqrt(disc)
    m1 = (-b + r) / denom
    m2 = (-b - r) / denom
    return np.where(m1.imag >= m2.imag, m1, m2)


def standard_mp_stieltjes(y: float, z) -> NDArray[np.complex128]:
    """Root of ``y z m^2 + (z + y - 1) m + 1 = 0`` in the upper half-plane."""
    _check_aspect(y)
    z = np.asarray(z, dtype=np.complex128)
    b = z + y - 1.0
    return _upper_root(b, b * b - 4.0 * y * z, 2.0 * y * z)


# ---------------------------------------------------------------------------
# generalized equation


@dataclass(frozen=True)
class StieltjesPoint:
    z: complex
    m: complex
    residual: float
    iterations: int = 0
    method: str = "fixed_point"


def _map_quadrature(m, z, y, t, w):
    """Right-hand side ``T`` of the equation with ``dT/dm`` and ``dT/dz``."""
    a = 1.0 - y - y * z * m
    den = t[None, :] * a[:, None] - z[:, None]
    inv = 1.0 / den
    inv2 = inv * inv
    val = inv @ w
    d_m = (inv2 * t[None, :]) @ w * (y * z)
    d_z = (inv2 * (t[None, :] * (y * m)[:, None] + 1.0)) @ w
    return val, d_m, d_z


def _map_closed(m, z, y, rho1):
    """Tridiagonal closed form ``1/sqrt((a - z)^2 - 4 rho1^2 a^2)`` on the upper branch."""
    a = 1.0 - y - y * z * m
    r2 = 4.0 * rho1 * rho1
    d = (a - z) ** 2 - r2 * a * a
    g = 1.0 / np.sqrt(d)
    g = np.where(g.imag >= (-g).imag, g, -g)
    dd_da = 2.0 * (a - z) - 2.0 * r2 * a
    d_m = -0.5 * g / d * dd_da * (-y * z)
    d_z = -0.5 * g / d * (dd_da * (-y * m) - 2.0 * (a - z))
    return g, d_m, d_z


def _companion_from_sum(s, ds, z, y):
    """``-1 / (z - y s)`` and its partials given ``s(u)`` and ``ds/du``."""
    d = z - y * s
    g = -1.0 / d
    inv2 = 1.0 / (d * d)
    return g, -y * ds * inv2, inv2


def _companion_quadrature(u, z, y, t, w):
    den = 1.0 + t[None, :] * u[:, None]
    inv = 1.0 / den
    s = (inv * t[None, :]) @ w
    ds = -(inv * inv * (t * t)[None, :]) @ w
    return _companion_from_sum(s, ds, z, y)


def _companion_closed(u, z, y, rho1):
    r2 = 4.0 * rho1 * rho1
    q = (1.0 + u) ** 2 - r2 * u * u
    j = 1.0 / np.sqrt(q)
    # ∫ dH/(1 + t u) maps the upper half-plane to the lower one.
    j = np.where(j.imag <= (-j).imag, j, -j)
    dj = -0.5 * j / q * (2.0 * (1.0 + u) - 2.0 * r2 * u)
    s = (1.0 - j) / u
    ds = -(dj * u + 1.0 - j) / (u * u)
    return _companion_from_sum(s, ds, z, y)


class _Equation:
    """Fixed-point form ``u = T(u, z)`` of the generalized MP equation.

    ``variable="m"`` is the equation as stated for the Stieltjes transform of
    the p x p limit. ``variable="companion"`` solves instead for the transform
    of the n x n companion limit, ``u = -(1 - y)/z + y m``, which satisfies
    ``u = -1 / (z - y ∫ t dH(t) / (1 + t u))``. For ``y > 1`` the companion
    carries no atom at zero, so it stays bounded where ``m ~ -(1 - 1/y)/z``.
    """

    def __init__(
        self,
        h: PopulationSpectrum,
        y: float,
        method: Method = "quadrature",
        variable: Literal["m", "companion"] = "m",
        nodes: int = GL_NODES,
    ):
        _check_aspect(y)
        if method not in ("quadrature", "closed_form"):
            raise ValueError(f"unknown method {method!r}")
        if method == "closed_form" and h.kind != "arcsine_szego":
            raise ValueError("closed_form is only available for arcsine (tridiagonal) spectra")
        self.h, self.y, self.method, self.variable = h, float(y), method, variable
        self.t, self.w = h.quadrature(nodes)

    def __call__(self, u, z):
        closed = self.method == "closed_form"
        if self.variable == "companion":
            if closed:
                return _companion_closed(u, z, self.y, self.h.rho1)
            return _companion_quadrature(u, z, self.y, self.t, self.w)
        if closed:
            return _map_closed(u, z, self.y, self.h.rho1)
        return _map_quadrature(u, z, self.y, self.t, self.w)

    def residual(self, u, z):
        val = self(u, z)[0]
        return np.abs(u - val) / np.maximum(1.0, np.abs(u))

    def to_m(self, u, z):
        if self.variable == "companion":
            return (u + (1.0 - self.y) / z) / self.y
        return u

    def continuous_density(self, u, z):
        """Density of the absolutely continuous part, atom at zero removed."""
        if self.variable == "companion":
            return u.imag / (np.pi * self.y)
        atom = max(0.0, 1.0 - 1.0 / self.y)
        return (u.imag - atom * z.imag / np.abs(z) ** 2) / np.pi


def _damped_fixed_point(eq: _Equation, z, m0, alpha=0.5, max_iter=MAX_ITER):
    """Vectorized ``m <- (1 - a) m + a T(m)`` with per-point step halving on oscillation."""
    m = np.array(m0, dtype=np.complex128)
    alpha = np.full(m.shape, float(alpha))
    prev_step = np.zeros_like(m)
    active = np.ones(m.shape, dtype=bool)
    off_plane = np.zeros(m.shape, dtype=int)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        val = eq(m[idx], z[idx])[0]
        step = alpha[idx] * (val - m[idx])
        flip = (step * np.conj(prev_step[idx])).real < 0
        alpha[idx[flip]] *= 0.5
        step = np.where(flip, 0.5 * step, step)
        new = m[idx] + step
        bad = new.imag <= 0
        off_plane[idx[bad]] += 1
        new = np.where(bad, new.real + 0.5j * m[idx].imag, new)
        m[idx] = new
        prev_step[idx] = step
        scale = np.maximum(1.0, np.abs(new))
        res = np.abs(val - new) / scale
        done = (np.abs(step) < STEP_TOL * scale) | (res < RESIDUAL_TOL)
        active[idx[done]] = False
        if np.any(off_plane > 100):
            break
    return m, it, off_plane


def _newton(eq: _Equation, z, m0, max_iter=60):
    """Newton on ``m - T(m)`` keeping iterates in the upper half-plane."""
    m = np.array(m0, dtype=np.complex128)
    for _ in range(max_iter):
        val, der, _ = eq(m, z)
        f = m - val
        res = np.abs(f) / np.maximum(1.0, np.abs(m))
        if np.all(res < 0.01 * RESIDUAL_TOL):
            break
        step = f / (1.0 - der)
        step = np.where(np.isfinite(step), step, 0.0)
        lam = np.ones(m.shape)
        for _ in range(30):
            trial = m - lam * step
            bad = trial.imag <= 0
            if not np.any(bad):
                break
            lam = np.where(bad, 0.5 * lam, lam)
        m = np.where(trial.imag > 0, trial, m)
    return m


def _continuation(eq: _Equation, x: NDArray[np.float64], nu: float, max_rounds: int = 2000):
    """Track the upper-half-plane root from height ``max(1, nu)`` down to ``nu``.

    Heights shrink geometrically with a per-point ratio. A step is accepted
    only if Newton converges and ``Im m / eta`` does not decrease, which holds
    for every Stieltjes transform; otherwise the ratio is moved toward 1.
    """
    x = np.asarray(x, dtype=np.float64)
    top = max(1.0, nu)
    eta = np.full(x.shape, top)
    z = x + 1j * eta
    m, _, _ = _damped_fixed_point(eq, z, -1.0 / z, max_iter=2000)
    m = _newton(eq, z, m)
    ratio = np.full(x.shape, 0.5)
    stalled = np.zeros(x.shape, dtype=bool)
    for _ in range(max_rounds):
        idx = np.flatnonzero((eta > nu) & ~stalled)
        if idx.size == 0:
            break
        nxt = np.maximum(eta[idx] * ratio[idx], nu)
        zc, zn = x[idx] + 1j * eta[idx], x[idx] + 1j * nxt
        # Tangent predictor from implicit differentiation of m = T(m, z).
        _, d_m, d_z = eq(m[idx], zc)
        slope = d_z / (1.0 - d_m)
        pred = m[idx] + slope * (zn - zc)
        pred = np.where(np.isfinite(pred) & (pred.imag > 0), pred, m[idx])
        trial = _newton(eq, zn, pred, max_iter=25)
        res = eq.residual(trial, zn)
        ok = (
            (res < RESIDUAL_TOL)
            & (trial.imag / nxt >= (1.0 - 1e-9) * m[idx].imag / eta[idx])
            & (np.abs(trial - m[idx]) <= np.maximum(1.0, np.abs(m[idx])))
        )
        acc, rej = idx[ok], idx[~ok]
        m[acc] = trial[ok]
        eta[acc] = nxt[ok]
        ratio[acc] = np.maximum(ratio[acc] ** 1.5, 0.05)
        ratio[rej] = np.sqrt(ratio[rej])
        stalled[rej[ratio[rej] > 1.0 - 1e-6]] = True
    return m


def solve_generalized_mp(
    h: PopulationSpectrum,
    y: float,
    z: complex,
    *,
    m0: complex | None = None,
    method: Method = "quadrature",
    alpha: float = 0.5,
    max_iter: int = MAX_ITER,
) -> StieltjesPoint:
    """Solve the generalized MP equation at a single ``z`` in the upper half-plane.

    Damped fixed-point iteration from ``m0 = -1/z``. Close to the real axis the
    iteration can stall; it is then completed by Newton continuation along a
    vertical path from ``Re z + i`` down to ``z``.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    eq = _Equation(h, y, method)
    zs = np.array([z])
    start = np.array([-1.0 / z if m0 is None else m0], dtype=np.complex128)
    m, iters, off_plane = _damped_fixed_point(eq, zs, start, alpha=alpha, max_iter=max_iter)
    res = float(eq.residual(m, zs)[0])
    used = "fixed_point"
    if not (res < RESIDUAL_TOL and m[0].imag > 0):
        path = _Equation(h, y, method, variable="companion" if y > 1 else "m")
        u = _continuation(path, np.array([z.real]), z.imag)
        m = _newton(eq, zs, path.to_m(u, zs))
        res = float(eq.residual(m, zs)[0])
        used = "continuation"
    if m[0].imag <= 0:
        if off_plane[0] > 100:
            raise WrongHalfPlane(f"iteration left the upper half-plane at z={z}")
        raise WrongHalfPlane(f"solution at z={z} has Im m <= 0")
    if not res < RESIDUAL_TOL:
        raise NoConvergence(f"generalized MP solve at z={z} stalled with residual {res:.3e}")
    return StieltjesPoint(z=z, m=complex(m[0]), residual=res, iterations=iters, method=used)


def solve_on_grid(
    h: PopulationSpectrum,
    y: float,
    x: NDArray[np.float64],
    nu: float = DEFAULT_NU,
    method: Method = "quadrature",
) -> tuple[NDArray[np.complex128], NDArray[np.float64], dict[str, Any]]:
    """Stieltjes transform and continuous density at ``x + i nu`` on a grid.

    For ``y > 1`` the companion equation is solved (see :class:`_Equation`)
    and the reported residual refers to it.
    """
    variable = "companion" if y > 1 else "m"
    eq = _Equation(h, y, method, variable=variable)
    x = np.asarray(x, dtype=np.float64)
    z = x + 1j * nu
    u = _continuation(eq, x, nu)
    res = eq.residual(u, z)
    bad = np.flatnonzero(~((res < RESIDUAL_TOL) & (u.imag > 0)))
    fallback = 0
    if bad.size:
        ub, _, _ = _damped_fixed_point(eq, z[bad], np.where(u[bad].imag > 0, u[bad], -1.0 / z[bad]))
        u[bad] = _newton(eq, z[bad], ub)
        res = eq.residual(u, z)
        fallback = int(bad.size)
    if np.any(u.imag <= 0):
        raise WrongHalfPlane("solution left the upper half-plane on the grid")
    worst = float(res.max())
    if not worst < RESIDUAL_TOL:
        i = int(np.argmax(res))
        raise NoConvergence(f"generalized MP solve stalled at x={x[i]:.6g} (residual {worst:.3e})")
    stats = {
        "method": method,
        "variable": variable,
        "max_residual": worst,
        "fallback_points": fallback,
        "nu": nu,
    }
    return eq.to_m(u, z), eq.continuous_density(u, z), stats


# ---------------------------------------------------------------------------
# theoretical laws


@dataclass
class SpectralLaw:
    """Density samples on an ascending grid plus one atom.

    The CDF is the running trapezoid integral of the density, rescaled so the
    continuous part carries exactly ``1 - atom``, and is linear between grid
    points.
    """

    grid: NDArray[np.float64]
    density: NDArray[np.float64]
    y: float
    atom: float = 0.0
    atom_location: float = 0.0
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=np.float64)
        self.density = np.clip(np.asarray(self.density, dtype=np.float64), 0.0, None)
        if self.grid.ndim != 1 or self.grid.shape != self.density.shape or self.grid.size < 2:
            raise ValueError("grid and density must be matching 1-d arrays with >= 2 points")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly ascending")
        cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(self.grid) * (self.density[1:] + self.density[:-1]))])
        self._integral = float(cum[-1])
        cont = 1.0 - self.atom
        self._cum = cum * (cont / cum[-1]) if cum[-1] > 0 else np.zeros_like(cum)

    @property
    def atom_at_zero(self) -> float:
        return self.atom if self.atom_location == 0.0 else 0.0

    @property
    def mass(self) -> float:
        """Atom plus the unnormalized trapezoid integral of the density."""
        return self.atom + self._integral

    @property
    def knots(self) -> NDArray[np.float64]:
        if self.atom > 0:
            return np.union1d(self.grid, [self.atom_location])
        return self.grid

    def _continuous(self, x):
        return np.interp(x, self.grid, self._cum, left=0.0, right=self._cum[-1])

    def cdf(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=np.float64)
        return self._continuous(x) + self.atom * (x >= self.atom_location)

    def cdf_left(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=np.float64)
        return self._continuous(x) + self.atom * (x > self.atom_location)

    def quantile(self, u) -> NDArray[np.float64]:
        """Generalized inverse of the CDF, used to sample from the law."""
        u = np.asarray(u, dtype=np.float64)
        knots = self.knots
        vals = self.cdf(knots)
        left = self.cdf_left(knots)
        # Build a monotone (value, x) table that includes the atom's jump.
        xs = np.concatenate([knots, knots])
        fs = np.concatenate([left, vals])
        order = np.lexsort((fs, xs))
        xs, fs = xs[order], fs[order]
        keep = np.concatenate([[True], np.diff(fs) > 0])
        return np.interp(u, fs[keep], xs[keep])


def _check_normalization(law: SpectralLaw) -> SpectralLaw:
    total = law.mass
    law.meta["mass"] = total
    if abs(total - 1.0) > 0.05:
        raise NormalizationFailure(f"law integrates to {total:.4f}")
    if abs(total - 1.0) > 0.01:
        warnings.warn(f"law integrates to {total:.4f}, outside [0.99, 1.01]", RuntimeWarning, stacklevel=3)
    return law


def default_grid(h: PopulationSpectrum, y: float, points: int = DEFAULT_GRID_POINTS) -> NDArray[np.float64]:
    lo_edge, hi_edge = mp_edges(y)
    tmin, tmax = h.support
    lo = max(0.0, tmin * lo_edge - 0.5)
    hi = tmax * hi_edge + 0.5
    return np.linspace(lo, hi, points)


def invert_to_density(
    h: PopulationSpectrum,
    y: float,
    grid: NDArray[np.float64] | None = None,
    nu: float = DEFAULT_NU,
    method: Method = "quadrature",
) -> SpectralLaw:
    """Density ``Im m(x + i nu) / pi`` of the generalized MP law on a grid.

    For ``y > 1`` the law has an atom ``1 - 1/y`` at zero. Its contribution to
    ``Im m``, the Lorentzian ``atom * nu / (pi (x^2 + nu^2))``, is removed so
    the returned density is the continuous part only.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    x = default_grid(h, y) if grid is None else np.asarray(grid, dtype=np.float64)
    _, density, stats = solve_on_grid(h, y, x, nu, method)
    atom = max(0.0, 1.0 - 1.0 / y)
    density = np.clip(density, 0.0, None)
    law = SpectralLaw(x, density, y=y, atom=atom, meta={"nu": nu, "population": h.to_dict(), **stats})
    return _check_normalization(law)


def _edge_clustered_grid(lo: float, hi: float, points: int) -> NDArray[np.float64]:
    theta = np.linspace(0.0, np.pi, points)
    return lo + (hi - lo) * 0.5 * (1.0 - np.cos(theta))


def standard_mp_law(y: float, points: int = DEFAULT_GRID_POINTS) -> SpectralLaw:
    """Closed-form standard MP law sampled on a grid clustered at the support edges."""
    lo, hi = mp_edges(y)
    x = _edge_clustered_grid(lo, hi, points)
    law = SpectralLaw(x, standard_mp_density(y, x), y=y, atom=max(0.0, 1.0 - 1.0 / y), meta={"law": "standard_mp"})
    return _check_normalization(law)


def kendall_identity_law(y: float, points: int = DEFAULT_GRID_POINTS) -> SpectralLaw:
    """Image of the standard MP law under ``x -> (2/3) x + 1/3``."""
    lo, hi = mp_edges(y)
    x = _edge_clustered_grid(lo, hi, points)
    dens = standard_mp_density(y, x)
    law = SpectralLaw(
        (2.0 / 3.0) * x + 1.0 / 3.0,
        1.5 * dens,
        y=y,
        atom=max(0.0, 1.0 - 1.0 / y),
        atom_location=1.0 / 3.0,
        meta={"law": "kendall_identity"},
    )
    return _check_normalization(law)


# ---------------------------------------------------------------------------
# serialization


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def write_law(law: SpectralLaw, path: str | Path) -> None:
    """CSV ``x,density`` plus a JSON sidecar next to it."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,density\n")
        for a, d in zip(law.grid, law.density):
            fh.write(f"{float(a)!r},{float(d)!r}\n")
    side = {
        "y": law.y,
        "atom_at_zero": law.atom_at_zero,
        "atom": law.atom,
        "atom_location": law.atom_location,
        "nu": law.meta.get("nu"),
        "solver_stats": {k: v for k, v in law.meta.items() if k != "nu"},
    }
    _sidecar_path(path).write_text(json.dumps(side, indent=2, sort_keys=True, default=float) + "\n")


def read_law(path: str | Path) -> SpectralLaw:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "x,density":
                raise ParseError(f"{path}: expected header 'x,density', got {header!r}")
            rows = [tuple(float(v) for v in line.split(",")) for line in fh if line.strip()]
        side = json.loads(_sidecar_path(path).read_text())
    except ParseError:
        raise
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not rows or any(len(r) != 2 for r in rows):
        raise ParseError(f"{path}: malformed law rows")
    arr = np.array(rows)
    meta = dict(side.get("solver_stats") or {})
    meta["nu"] = side.get("nu")
    return SpectralLaw(
        arr[:, 0],
        arr[:, 1],
        y=float(side["y"]),
        atom=float(side.get("atom", side.get("atom_at_zero", 0.0))),
        atom_location=float(side.get("atom_location", 0.0)),
        meta=meta,
    )
