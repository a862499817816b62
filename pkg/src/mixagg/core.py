"""Distribution representations and weight vectors used throughout the package.

All containers are immutable after construction: arrays are copied, validated
and flagged read-only, so instances can be shared freely.

Discretisation choices (grid sizes, interpolation conventions) are decisions of
this package, not of the underlying theory:

* one-dimensional CDFs live on a sorted grid and are piecewise constant and
  right-continuous between grid points by default (``interp="step"``), which
  represents Dirac and empirical distributions exactly; ``interp="linear"`` is
  available for smooth distributions;
* the canonical grid has :data:`DEFAULT_GRID_SIZE` points spread uniformly
  over the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

DEFAULT_GRID_SIZE = 1024
SIMPLEX_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
CDF_TOL = 1e-12
DENSITY_TOL = 1e-10

_INTERP_MODES = ("step", "linear")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def canonical_grid(a: float, b: float, n: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Uniform grid of ``n`` points over ``[a, b]``."""
    if not b > a:
        raise DomainError(f"empty domain [{a}, {b}]")
    if n < 2:
        raise DomainError("a grid needs at least two points")
    return np.linspace(a, b, n)


def as_weights(w, name: str = "weights") -> np.ndarray:
    """Validate a point of the probability simplex.

    Sums off by at most ``1e-9`` are renormalised; larger deviations, negative
    entries and non-finite values raise :class:`DomainError`. The result is a
    read-only float array summing to one within ``1e-12``.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(w)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(w < 0):
        raise DomainError(f"{name} has negative entries")
    s = math.fsum(w)
    if abs(s - 1.0) > RENORMALIZE_TOL:
        raise DomainError(f"{name} sum to {s!r}, not 1")
    if s != 1.0:
        w = w / s
    return _readonly(w)


def uniform_weights(n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("need at least one expert")
    return _readonly(np.full(n, 1.0 / n))


# ---------------------------------------------------------------------------
# One-dimensional distributions on a grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridDistribution1D:
    """A distribution on the real line stored as CDF values on a grid.

    Parameters
    ----------
    grid : array_like, shape (n,)
        Strictly increasing support points, ``n >= 2``.
    cdf : array_like, shape (n,)
        CDF values at the grid points. Nondecreasing, inside ``[0, 1]`` and
        ending at exactly one (roundoff up to ``1e-12`` is repaired).
    interp : {"step", "linear"}
        How the CDF is continued between grid points. ``"step"`` is
        right-continuous and piecewise constant; ``"linear"`` interpolates.
        Below ``grid[0]`` the CDF is 0 in both modes, so ``cdf[0] > 0``
        encodes an atom at the left end of the grid.
    """

    grid: np.ndarray
    cdf: np.ndarray
    interp: str = "step"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        if self.interp not in _INTERP_MODES:
            raise DomainError(f"interp must be one of {_INTERP_MODES}")
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("grid must be 1-D with at least two points")
        if cdf.shape != grid.shape:
            raise DomainError("grid and cdf must have the same length")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(cdf))):
            raise DomainError("grid and cdf must be finite")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if cdf.min() < -CDF_TOL or cdf.max() > 1 + CDF_TOL:
            raise DomainError("cdf values must lie in [0, 1]")
        if np.any(np.diff(cdf) < -CDF_TOL):
            raise DomainError("cdf must be nondecreasing")
        if abs(cdf[-1] - 1.0) > CDF_TOL:
            raise DomainError(f"cdf must end at 1, got {cdf[-1]!r}")
        cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0))
        cdf[-1] = 1.0
        object.__setattr__(self, "grid", _readonly(grid))
        object.__setattr__(self, "cdf", _readonly(cdf))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def cdf_at(self, x):
        """Evaluate the CDF; points left of the grid give 0, right of it 1."""
        x = np.asarray(x, dtype=float)
        if self.interp == "linear":
            out = np.interp(x, self.grid, self.cdf, left=0.0, right=1.0)
        else:
            idx = np.searchsorted(self.grid, x, side="right") - 1
            out = np.where(idx < 0, 0.0, self.cdf[np.clip(idx, 0, None)])
        return out if out.ndim else float(out)

    def cdf_left_limit(self, x):
        """``lim_{y -> x-} CDF(y)``, needed for exact piecewise integration."""
        x = np.asarray(x, dtype=float)
        if self.interp == "linear":
            out = np.where(
                x <= self.grid[0],
                0.0,
                np.interp(x, self.grid, self.cdf, left=0.0, right=1.0),
            )
        else:
            idx = np.searchsorted(self.grid, x, side="left") - 1
            out = np.where(idx < 0, 0.0, self.cdf[np.clip(idx, 0, None)])
        return out if out.ndim else float(out)

    def quantile_at(self, t):
        """Generalised inverse ``Q(t) = inf{x : t <= CDF(x)}``.

        ``t = 0`` maps to ``grid[0]`` (the infimum is otherwise -inf).
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1) or np.any(~np.isfinite(t)):
            raise DomainError("quantile levels must lie in [0, 1]")
        g, c = self.grid, self.cdf
        i = np.searchsorted(c, t, side="left")
        i = np.minimum(i, len(c) - 1)
        if self.interp == "step":
            out = g[i]
        else:
            j = np.maximum(i - 1, 0)
            c0, c1 = c[j], c[i]
            span = np.where(c1 > c0, c1 - c0, 1.0)
            frac = np.clip((t - c0) / span, 0.0, 1.0)
            x = np.where(i == 0, g[0], g[j] + frac * (g[i] - g[j]))
            # Rounding in the interpolation may land one ulp short of the level.
            for _ in range(4):
                short = np.interp(x, g, c, left=0.0, right=1.0) < t
                if not np.any(short):
                    break
                x = np.where(short, np.minimum(np.nextafter(x, np.inf), g[i]), x)
            out = x
        return out if out.ndim else float(out)

    def mean(self) -> float:
        a, b = self.support
        nodes = np.asarray(self.grid)
        left = self.cdf_at(nodes[:-1])
        right = self.cdf_left_limit(nodes[1:])
        # E[X] = a + int_a^b (1 - F) for X supported on [a, b]
        return a + float(np.sum(np.diff(nodes) * (1.0 - 0.5 * (left + right))))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.quantile_at(rng.uniform(0.0, 1.0, size)))

    def to_quantile_grid(self, levels: int | None = None) -> QuantileGrid1D:
        """Quantile table of the distribution.

        Step CDFs convert exactly (one level per atom). Linear CDFs are
        discretised on ``levels`` midpoint levels (default 4096).
        """
        if self.interp == "step" and levels is None:
            mass = np.diff(np.concatenate(([0.0], self.cdf)))
            keep = mass > 0
            return QuantileGrid1D(self.cdf[keep], self.grid[keep])
        k = levels or 4096
        mid = (np.arange(k) + 0.5) / k
        return QuantileGrid1D(np.arange(1, k + 1) / k, self.quantile_at(mid))

    def to_dict(self) -> dict:
        return {"grid": self.grid.tolist(), "cdf": self.cdf.tolist(), "interp": self.interp}

    @classmethod
    def from_dict(cls, data: dict) -> GridDistribution1D:
        return cls(data["grid"], data["cdf"], data.get("interp", "step"))


def _domain_grid(domain, grid) -> tuple[float, float, np.ndarray]:
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise DomainError(f"empty domain [{a}, {b}]")
    if grid is None:
        grid = canonical_grid(a, b)
    grid = np.asarray(grid, dtype=float)
    if grid.min() < a or grid.max() > b:
        raise DomainError("grid leaves the domain")
    return a, b, grid


def make_dirac(x: float, domain, grid=None, n: int = DEFAULT_GRID_SIZE) -> GridDistribution1D:
    """Point mass at ``x``, represented as a step CDF.

    ``x`` is inserted into the grid when absent so the jump sits exactly at
    ``x``.
    """
    a, b = float(domain[0]), float(domain[1])
    if not a <= x <= b:
        raise DomainError(f"{x} is outside [{a}, {b}]")
    if grid is None:
        grid = canonical_grid(a, b, n)
    _, _, grid = _domain_grid((a, b), grid)
    grid = np.union1d(grid, [x])
    return GridDistribution1D(grid, (grid >= x).astype(float), "step")


def make_empirical(samples, weights=None, domain=None, grid=None) -> GridDistribution1D:
    """Weighted empirical distribution as a step CDF.

    The grid is the union of the sample locations, the domain end points (when
    ``domain`` is given) and ``grid``.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise DomainError("need at least one sample")
    w = uniform_weights(samples.size) if weights is None else as_weights(weights)
    if w.size != samples.size:
        raise DomainError("samples and weights differ in length")
    pts = [samples]
    if domain is not None:
        a, b = float(domain[0]), float(domain[1])
        if samples.min() < a or samples.max() > b:
            raise DomainError("samples leave the domain")
        pts.append([a, b])
    if grid is not None:
        pts.append(np.asarray(grid, dtype=float))
    nodes = np.unique(np.concatenate(pts))
    if nodes.size < 2:
        # a single atom without a domain: pad on the right
        nodes = np.array([nodes[0], nodes[0] + 1.0])
    order = np.argsort(samples, kind="stable")
    cum = np.minimum(np.cumsum(w[order]), 1.0)
    # w is validated to sum to one; long cumulative sums drift by many ulps
    cum[-1] = 1.0
    pos = np.searchsorted(samples[order], nodes, side="right")
    cdf = np.where(pos > 0, cum[np.maximum(pos - 1, 0)], 0.0)
    return GridDistribution1D(nodes, cdf, "step")


def make_uniform(domain, n: int = DEFAULT_GRID_SIZE) -> GridDistribution1D:
    a, b = float(domain[0]), float(domain[1])
    grid = canonical_grid(a, b, n)
    return GridDistribution1D(grid, (grid - a) / (b - a), "linear")


def make_from_cdf(fn, domain, n: int = DEFAULT_GRID_SIZE, interp: str = "linear") -> GridDistribution1D:
    """Tabulate a CDF callable on the canonical grid; mass outside is folded in.

    The last grid value is forced to one, i.e. tail mass right of the domain
    is placed at ``b``; mass left of ``a`` becomes an atom at ``a``.
    """
    a, b = float(domain[0]), float(domain[1])
    grid = canonical_grid(a, b, n)
    vals = np.clip(np.asarray(fn(grid), dtype=float), 0.0, 1.0)
    vals = np.maximum.accumulate(vals)
    vals[-1] = 1.0
    return GridDistribution1D(grid, vals, interp)


@dataclass(frozen=True, eq=False)
class QuantileGrid1D:
    """Piecewise-constant, left-continuous quantile function.

    ``values[i]`` is the quantile on ``(levels[i-1], levels[i]]`` (with
    ``levels[-1] := 0``). Equivalently: atoms ``values`` with masses
    ``diff([0, *levels])``.
    """

    levels: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if levels.ndim != 1 or levels.shape != values.shape or levels.size == 0:
            raise DomainError("levels and values must be matching 1-D arrays")
        if levels[0] <= 0 or np.any(np.diff(levels) <= 0):
            raise DomainError("levels must be strictly increasing in (0, 1]")
        if abs(levels[-1] - 1.0) > CDF_TOL:
            raise DomainError("last level must be 1")
        if np.any(np.diff(values) < 0):
            raise DomainError("quantile values must be nondecreasing")
        levels = levels.copy()
        levels[-1] = 1.0
        object.__setattr__(self, "levels", _readonly(levels))
        object.__setattr__(self, "values", _readonly(values))

    def quantile_at(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1):
            raise DomainError("quantile levels must lie in [0, 1]")
        i = np.minimum(np.searchsorted(self.levels, t, side="left"), self.levels.size - 1)
        out = self.values[i]
        return out if out.ndim else float(out)

    def to_distribution(self, domain=None) -> GridDistribution1D:
        masses = np.diff(np.concatenate(([0.0], self.levels)))
        return make_empirical(self.values, masses / masses.sum(), domain=domain)


# ---------------------------------------------------------------------------
# Particle clouds in R^D
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParticleDistributionND:
    """Weighted point cloud in ``R^D``.

    Parameters
    ----------
    points : array_like, shape (M, D) or (M,)
    weights : array_like, shape (M,), optional
        Defaults to uniform.
    radius : float, optional
        Declared support radius; every point must satisfy ``|x| <= radius``.
    """

    points: np.ndarray
    weights: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise DomainError("points must be an (M, D) array with M, D >= 1")
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        w = uniform_weights(pts.shape[0]) if self.weights is None else as_weights(self.weights)
        if w.size != pts.shape[0]:
            raise DomainError("points and weights differ in length")
        if self.radius is not None:
            if not self.radius > 0:
                raise DomainError("radius must be positive")
            norms = np.linalg.norm(pts, axis=1)
            if norms.max() > self.radius * (1 + 1e-12):
                raise DomainError(f"point of norm {norms.max():.6g} outside the ball of radius {self.radius}")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def project(self, directions) -> np.ndarray:
        """Projections ``<x, theta>``; returns shape (K, M) for K directions."""
        theta = np.atleast_2d(np.asarray(directions, dtype=float))
        if theta.shape[1] != self.dim:
            raise DomainError("direction dimension mismatch")
        return theta @ self.points.T

    def characteristic_function(self, freqs) -> np.ndarray:
        """``phi(t) = E exp(i <x, t>)`` at each row of ``freqs`` (shape (K, D))."""
        t = np.atleast_2d(np.asarray(freqs, dtype=float))
        if t.shape[1] != self.dim:
            raise DomainError("frequency dimension mismatch")
        return np.exp(1j * (t @ self.points.T)) @ self.weights

    def to_grid1d(self, domain=None) -> GridDistribution1D:
        if self.dim != 1:
            raise DomainError("only one-dimensional clouds convert to a 1-D CDF")
        return make_empirical(self.points[:, 0], self.weights, domain=domain)

    def to_dict(self) -> dict:
        out = {"points": self.points.tolist(), "weights": self.weights.tolist()}
        if self.radius is not None:
            out["radius"] = self.radius
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ParticleDistributionND:
        return cls(data["points"], data.get("weights"), data.get("radius"))


def particle_dirac(x, radius: float | None = None) -> ParticleDistributionND:
    return ParticleDistributionND(np.atleast_2d(np.asarray(x, dtype=float)), None, radius)


# ---------------------------------------------------------------------------
# Densities with respect to a base measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Density ``p = d(upsilon)/d(mu)`` tabulated on the atoms/cells of ``mu``.

    ``mass[i]`` is the ``mu``-mass attached to ``grid[i]`` (cell width for a
    discretised Lebesgue measure, 1 for counting measure). ``bound`` is the
    optional density ceiling ``M``.
    """

    grid: np.ndarray
    mass: np.ndarray
    density: np.ndarray
    bound: float | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        k = dens.shape[0] if dens.ndim == 1 else -1
        if k < 1 or mass.shape != (k,) or grid.shape[0] != k:
            raise DomainError("grid, mass and density must have matching length")
        if np.any(mass <= 0) or not np.all(np.isfinite(mass)):
            raise DomainError("base-measure masses must be positive and finite")
        if np.any(dens < 0) or not np.all(np.isfinite(dens)):
            raise DomainError("density must be nonnegative and finite")
        if self.bound is not None and dens.max() > self.bound * (1 + 1e-12):
            raise DomainError(f"density {dens.max():.6g} exceeds the bound {self.bound}")
        total = math.fsum(dens * mass)
        if abs(total - 1.0) > DENSITY_TOL:
            raise DomainError(f"density integrates to {total!r}, not 1")
        object.__setattr__(self, "grid", _readonly(grid))
        object.__setattr__(self, "mass", _readonly(mass))
        object.__setattr__(self, "density", _readonly(dens))

    @property
    def total_mass(self) -> float:
        """``||mu||_1`` of the base measure."""
        return float(np.sum(self.mass))

    def same_base(self, other: DensityGrid) -> bool:
        return (
            self.grid.shape == other.grid.shape
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.mass, other.mass)
        )

    def to_dict(self) -> dict:
        out = {"grid": self.grid.tolist(), "mass": self.mass.tolist(), "density": self.density.tolist()}
        if self.bound is not None:
            out["bound"] = self.bound
        return out

    @classmethod
    def from_dict(cls, data: dict) -> DensityGrid:
        return cls(data["grid"], data["mass"], data["density"], data.get("bound"))


def make_probabilities(p, bound: float | None = 1.0) -> DensityGrid:
    """Probability vector on ``{0, ..., K-1}`` under counting measure."""
    p = np.asarray(p, dtype=float)
    return DensityGrid(np.arange(p.size, dtype=float), np.ones(p.size), p, bound)


def make_density(fn, domain, n: int = DEFAULT_GRID_SIZE, bound: float | None = None) -> DensityGrid:
    """Midpoint discretisation of a density over ``[a, b]`` (Lebesgue base)."""
    a, b = float(domain[0]), float(domain[1])
    h = (b - a) / n
    mid = a + h * (np.arange(n) + 0.5)
    dens = np.asarray(fn(mid), dtype=float)
    dens = dens / np.sum(dens * h)
    return DensityGrid(mid, np.full(n, h), dens, bound)


# ---------------------------------------------------------------------------
# Tensor-grid CDFs for the product-box CRPS (D <= 3)
# ---------------------------------------------------------------------------

MAX_TENSOR_DIM = 3


@dataclass(frozen=True, eq=False)
class TensorGridCDF:
    """Multivariate CDF on a tensor grid ``axes[0] x ... x axes[D-1]``.

    ``cdf[i, j, ...]`` is ``P(X_1 <= axes[0][i], X_2 <= axes[1][j], ...)``.
    ``"step"`` evaluation takes the value at the lower-left grid corner,
    ``"linear"`` interpolates multilinearly. Outside the grid the CDF is 0 if
    any coordinate is left of its axis and uses the clamped value otherwise.
    """

    axes: tuple
    cdf: np.ndarray
    interp: str = "step"

    def __post_init__(self):
        axes = tuple(np.asarray(ax, dtype=float) for ax in self.axes)
        cdf = np.asarray(self.cdf, dtype=float)
        if not 1 <= len(axes) <= MAX_TENSOR_DIM:
            raise DomainError(f"tensor CDFs support 1 to {MAX_TENSOR_DIM} dimensions")
        if self.interp not in _INTERP_MODES:
            raise DomainError(f"interp must be one of {_INTERP_MODES}")
        for ax in axes:
            if ax.ndim != 1 or ax.size < 2 or np.any(np.diff(ax) <= 0):
                raise DomainError("each axis must be strictly increasing with >= 2 points")
        if cdf.shape != tuple(ax.size for ax in axes):
            raise DomainError("cdf shape does not match the axes")
        if cdf.min() < -CDF_TOL or cdf.max() > 1 + CDF_TOL:
            raise DomainError("cdf values must lie in [0, 1]")
        for d in range(cdf.ndim):
            if np.any(np.diff(cdf, axis=d) < -CDF_TOL):
                raise DomainError("cdf must be nondecreasing along every axis")
        if abs(cdf[(-1,) * cdf.ndim] - 1.0) > CDF_TOL:
            raise DomainError("cdf must reach 1 at the upper corner")
        object.__setattr__(self, "axes", tuple(_readonly(ax) for ax in axes))
        object.__setattr__(self, "cdf", _readonly(np.clip(cdf, 0.0, 1.0)))

    @property
    def dim(self) -> int:
        return len(self.axes)

    def cdf_at(self, points) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.dim:
            raise DomainError("point dimension mismatch")
        below = np.zeros(x.shape[0], dtype=bool)
        lo_idx, fracs = [], []
        for d, ax in enumerate(self.axes):
            xd = x[:, d]
            below |= xd < ax[0]
            if self.interp == "step":
                i = np.clip(np.searchsorted(ax, xd, side="right") - 1, 0, ax.size - 1)
                lo_idx.append(i)
            else:
                i = np.clip(np.searchsorted(ax, xd, side="right") - 1, 0, ax.size - 2)
                f = np.clip((xd - ax[i]) / (ax[i + 1] - ax[i]), 0.0, 1.0)
                lo_idx.append(i)
                fracs.append(f)
        if self.interp == "step":
            val = self.cdf[tuple(lo_idx)]
        else:
            val = np.zeros(x.shape[0])
            for corner in np.ndindex(*(2,) * self.dim):
                wgt = np.ones(x.shape[0])
                idx = []
                for d, bit in enumerate(corner):
                    wgt = wgt * (fracs[d] if bit else 1.0 - fracs[d])
                    idx.append(lo_idx[d] + bit)
                val = val + wgt * self.cdf[tuple(idx)]
        return np.where(below, 0.0, val)


def tensor_cdf_from_particles(points, weights, axes) -> TensorGridCDF:
    """Step CDF of a weighted point cloud tabulated on ``axes``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = uniform_weights(pts.shape[0]) if weights is None else as_weights(weights)
    axes = tuple(np.asarray(ax, dtype=float) for ax in axes)
    if pts.shape[1] != len(axes):
        raise DomainError("point dimension mismatch")
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    flat = mesh.reshape(-1, len(axes))
    le = np.all(pts[None, :, :] <= flat[:, None, :], axis=2)
    cdf = (le @ w).reshape(mesh.shape[:-1])
    return TensorGridCDF(axes, cdf, "step")


def tensor_cdf_product(marginals: Sequence[GridDistribution1D]) -> TensorGridCDF:
    """Independent product of one-dimensional marginals."""
    axes = tuple(m.grid for m in marginals)
    cdf = np.ones(())
    for m in marginals:
        cdf = np.multiply.outer(cdf, m.cdf)
    interp = "linear" if all(m.interp == "linear" for m in marginals) else "step"
    return TensorGridCDF(axes, cdf, interp)
