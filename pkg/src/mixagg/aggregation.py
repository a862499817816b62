"""Aggregation rules: turn N expert forecasts and a weight vector into one.

Two families are provided:

* substitutions, which apply a mixable pointwise rule to CDF values,
  densities or quantiles and reach the mixability rate of a loss;
* mixtures and barycenters, which are convex combinations in some
  coordinates and reach the (smaller) exp-concavity rate.

:func:`aggregator_for` picks the rule that matches a loss and a mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    DensityGrid,
    GridDistribution1D,
    ParticleDistributionND,
    QuantileGrid1D,
    TensorGridCDF,
    as_weights,
    make_empirical,
)
from .errors import ConfigurationError, DomainError, InvariantError, UnsupportedError
from .losses import LossKind, LossSpec, quantile_breakpoints
from .pointwise import BoundedInterval, log_substitution, square_substitution

MONOTONE_TOL = 1e-10
PROJECTION_TOL = 1e-12
DEFAULT_QUANTILE_LEVELS = 4096


def _check_pool(forecasts: Sequence, w) -> np.ndarray:
    w = as_weights(w)
    if len(forecasts) != w.size:
        raise DomainError(f"{len(forecasts)} forecasts but {w.size} weights")
    return w


def _one_hot(w: np.ndarray) -> int | None:
    nz = np.flatnonzero(w)
    return int(nz[0]) if nz.size == 1 else None


def _merged_grid(forecasts: Sequence[GridDistribution1D]) -> np.ndarray:
    grid = forecasts[0].grid
    for f in forecasts[1:]:
        if f.grid is not grid and not np.array_equal(f.grid, grid):
            grid = np.union1d(grid, f.grid)
    return np.asarray(grid)


def _merged_interp(forecasts) -> str:
    return "linear" if all(f.interp == "linear" for f in forecasts) else "step"


# ---------------------------------------------------------------------------
# CRPS substitution
# ---------------------------------------------------------------------------


def crps_substitution_values(cdf_values, w) -> np.ndarray:
    """Square-loss substitution on ``[0, 1]`` applied to stacked CDF values.

    ``cdf_values`` has shape (N, K); the result (K,) is returned without any
    repair so callers can audit it.
    """
    return np.asarray(square_substitution(cdf_values, w, (0.0, 1.0)))


def aggregate_crps_mixable(forecasts: Sequence[GridDistribution1D], w) -> GridDistribution1D:
    """CDF-level substitution for the CRPS at ``eta = 2 / (b - a)``.

    The experts' CDFs are evaluated on the union of their grids and the
    square-loss substitution is applied to every value. For step CDFs the
    result is exact everywhere on the line, not only at grid points.

    Raises
    ------
    InvariantError
        If the output decreases by more than ``1e-10`` anywhere.
    """
    w = _check_pool(forecasts, w)
    grid = _merged_grid(forecasts)
    F = np.stack([f.cdf_at(grid) for f in forecasts])
    out = crps_substitution_values(F, w)
    drop = np.diff(out)
    if drop.size and drop.min() < -MONOTONE_TOL:
        i = int(np.argmin(drop))
        raise InvariantError(f"aggregated CDF decreases by {-drop[i]:.3g} at x={grid[i + 1]!r}")
    out = np.maximum.accumulate(np.clip(out, 0.0, 1.0))
    return GridDistribution1D(grid, out, _merged_interp(forecasts))


# ---------------------------------------------------------------------------
# Mixtures
# ---------------------------------------------------------------------------


def _stratified_resample(points, weights, cap: int, seed) -> ParticleDistributionND:
    rng = np.random.default_rng(seed)
    u = (np.arange(cap) + rng.uniform(0.0, 1.0, cap)) / cap
    idx = np.minimum(np.searchsorted(np.cumsum(weights), u, side="left"), weights.size - 1)
    return ParticleDistributionND(points[idx])


def _mix_particles(forecasts, w, max_particles, seed):
    live = [i for i in range(len(forecasts)) if w[i] > 0]
    first = forecasts[live[0]]
    if all(
        forecasts[i] is first
        or (np.array_equal(forecasts[i].points, first.points) and np.array_equal(forecasts[i].weights, first.weights))
        for i in live
    ):
        return first
    dims = {forecasts[i].dim for i in live}
    if len(dims) != 1:
        raise TypeError("particle clouds of different dimension cannot be mixed")
    points = np.concatenate([forecasts[i].points for i in live])
    weights = np.concatenate([w[i] * forecasts[i].weights for i in live])
    weights = weights / weights.sum()
    radii = [forecasts[i].radius for i in live]
    radius = max(radii) if all(r is not None for r in radii) else None
    if max_particles is not None and points.shape[0] > max_particles:
        out = _stratified_resample(points, weights, max_particles, seed)
        return ParticleDistributionND(out.points, None, radius)
    return ParticleDistributionND(points, weights, radius)


def aggregate_mixture(forecasts: Sequence, w, max_particles: int | None = None, seed=0):
    """Convex mixture of the forecasts in their native coordinates.

    Supported representations: :class:`GridDistribution1D` (CDF values on
    the merged grid), :class:`DensityGrid` (densities on a shared base),
    :class:`ParticleDistributionND` (concatenated, re-weighted particles;
    ``max_particles`` caps the size by seeded stratified resampling),
    :class:`TensorGridCDF` (shared axes), probability vectors and scalars.

    Raises
    ------
    TypeError
        If the forecasts do not share one representation.
    """
    w = _check_pool(forecasts, w)
    kinds = {type(f) for f in forecasts}
    if len(kinds) > 1 and not all(np.isscalar(f) for f in forecasts):
        raise TypeError(f"cannot mix representations {sorted(k.__name__ for k in kinds)}")
    first = forecasts[0]
    k = _one_hot(w)
    if k is not None and not np.isscalar(first):
        return forecasts[k]
    if isinstance(first, GridDistribution1D):
        grid = _merged_grid(forecasts)
        cdf = w @ np.stack([f.cdf_at(grid) for f in forecasts])
        return GridDistribution1D(grid, cdf, _merged_interp(forecasts))
    if isinstance(first, DensityGrid):
        for f in forecasts[1:]:
            if not first.same_base(f):
                raise TypeError("densities on different base measures cannot be mixed")
        dens = w @ np.stack([f.density for f in forecasts])
        return DensityGrid(first.grid, first.mass, dens, first.bound)
    if isinstance(first, ParticleDistributionND):
        return _mix_particles(forecasts, w, max_particles, seed)
    if isinstance(first, TensorGridCDF):
        for f in forecasts[1:]:
            if len(f.axes) != len(first.axes) or not all(np.array_equal(a, b) for a, b in zip(f.axes, first.axes)):
                raise TypeError("tensor CDFs must share their axes to be mixed")
        cdf = np.tensordot(w, np.stack([f.cdf for f in forecasts]), axes=1)
        return TensorGridCDF(first.axes, cdf, _merged_interp(forecasts))
    if isinstance(first, np.ndarray):
        return log_substitution(np.stack(forecasts), w)
    if all(np.isscalar(f) for f in forecasts):
        return float(w @ np.asarray(forecasts, dtype=float))
    raise TypeError(f"no mixture rule for {type(first).__name__}")


# ---------------------------------------------------------------------------
# Beta-2 substitution with projection
# ---------------------------------------------------------------------------


def project_density(values, mass, M: float) -> np.ndarray:
    """Closest density to ``values`` in the ``mass``-weighted L2 norm.

    Solves ``min sum mass (p - q)^2`` over ``0 <= p <= M``,
    ``sum mass p = 1``; the minimiser is ``clip(q - tau, 0, M)`` for the
    unique shift ``tau`` found by bracketing root search.
    """
    q = np.asarray(values, dtype=float)
    mass = np.asarray(mass, dtype=float)
    if M * mass.sum() < 1.0 - PROJECTION_TOL:
        raise DomainError("no density bounded by M exists on this base measure")

    def excess(tau):
        return float(np.sum(mass * np.clip(q - tau, 0.0, M))) - 1.0

    lo, hi = q.min() - M, q.max()
    if excess(lo) <= 0:
        return np.full_like(q, M)
    tau = brentq(excess, lo, hi, xtol=PROJECTION_TOL, rtol=4 * np.finfo(float).eps)
    return np.clip(q - tau, 0.0, M)


def aggregate_beta2_mixable(forecasts: Sequence[DensityGrid], w, M: float | None = None) -> DensityGrid:
    """Square-loss substitution on ``[0, M]`` per atom, then projection.

    The base measure must be finite (a finite set of atoms, or a finite
    discretisation). Projection onto densities can only lower the loss
    against any admissible outcome, so mixability at
    ``eta = 2 / (|mu| M^2)`` is preserved.
    """
    w = _check_pool(forecasts, w)
    first = forecasts[0]
    for f in forecasts[1:]:
        if not first.same_base(f):
            raise TypeError("densities on different base measures cannot be aggregated")
    M = M if M is not None else first.bound
    if M is None:
        raise ConfigurationError("a density bound M is required")
    k = _one_hot(w)
    if k is not None:
        return forecasts[k]
    P = np.stack([f.density for f in forecasts])
    raw = np.asarray(square_substitution(P, w, (0.0, M)))
    dens = project_density(raw, first.mass, M)
    # exact renormalisation against roundoff left by the root finder
    dens = dens / np.sum(dens * first.mass)
    return DensityGrid(first.grid, first.mass, np.minimum(dens, M), M)


# ---------------------------------------------------------------------------
# Quantile aggregation in one dimension
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantileAggregate:
    """Level-wise aggregated quantile table ``Qbar(t)``.

    ``table.values[i]`` holds ``Qbar`` on ``(levels[i-1], levels[i]]``.
    ``distribution`` is the law of ``Qbar(t)`` for ``t ~ Uniform[0, 1]``
    (exact for step inputs), which is a valid aggregate whether or not the
    table is monotone.
    """

    table: QuantileGrid1D | None
    levels: np.ndarray
    values: np.ndarray
    distribution: GridDistribution1D
    is_monotone: bool

    def quantile_at(self, t):
        t = np.asarray(t, dtype=float)
        i = np.minimum(np.searchsorted(self.levels, t, side="left"), self.levels.size - 1)
        out = self.values[i]
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.quantile_at(rng.uniform(0.0, 1.0, size)))


def _level_table(forecasts, levels: int | None):
    """Right-edge levels and representative points for piecewise quantiles."""
    if levels is None and all(f.interp == "step" for f in forecasts):
        breaks = quantile_breakpoints(*forecasts)
        right = breaks[1:]
        keep = np.diff(breaks) > 0
        right = right[keep]
        mid = 0.5 * (breaks[:-1][keep] + right)
        return right, mid
    k = levels or DEFAULT_QUANTILE_LEVELS
    return np.arange(1, k + 1) / k, (np.arange(k) + 0.5) / k


def _quantile_aggregate(forecasts, levels, combine: Callable, domain) -> QuantileAggregate:
    right, mid = _level_table(forecasts, levels)
    Q = np.stack([np.asarray(f.quantile_at(mid)) for f in forecasts])
    values = np.asarray(combine(Q))
    mass = np.diff(np.concatenate(([0.0], right)))
    monotone = bool(np.all(np.diff(values) >= 0))
    table = QuantileGrid1D(right, values) if monotone else None
    if domain is None:
        domain = (min(f.grid[0] for f in forecasts), max(f.grid[-1] for f in forecasts))
    # convex combinations may overshoot the hull by an ulp
    dist = make_empirical(np.clip(values, *domain), mass / mass.sum(), domain=domain)
    return QuantileAggregate(table, right, values, dist, monotone)


def aggregate_ot1d_quantile(forecasts: Sequence[GridDistribution1D], w, cost=None, levels: int | None = None) -> QuantileAggregate:
    """Level-wise substitution of quantiles, ``Qbar(t) = Sigma_c(Q_n(t))``.

    ``cost`` is a :class:`~mixagg.losses.TransportCost` carrying its
    substitution; ``None`` means the square cost on the hull of the supports.
    For step CDFs the levels are the union of all CDF values, so the table
    is exact; otherwise ``levels`` midpoint levels are used (default 4096).
    """
    w = _check_pool(forecasts, w)
    if cost is None:
        lo = min(f.grid[0] for f in forecasts)
        hi = max(f.grid[-1] for f in forecasts)
        iv = BoundedInterval(lo, hi if hi > lo else lo + 1.0)
        combine = lambda Q: square_substitution(Q, w, iv)  # noqa: E731
        domain = (iv.l, iv.r)
    else:
        if cost.substitution is None:
            raise ConfigurationError(f"cost {cost.name!r} has no substitution")
        combine = lambda Q: cost.substitution(Q, w)  # noqa: E731
        domain = (cost.domain.l, cost.domain.r)
    return _quantile_aggregate(forecasts, levels, combine, domain)


def _quantile_right_linear(f: GridDistribution1D, t: np.ndarray) -> np.ndarray:
    """Right limit ``inf{x : F(x) > t}`` of the quantile of a linear CDF."""
    g, c = f.grid, f.cdf
    i = np.minimum(np.searchsorted(c, t, side="right"), c.size - 1)
    j = np.maximum(i - 1, 0)
    span = np.where(c[i] > c[j], c[i] - c[j], 1.0)
    frac = np.clip((t - c[j]) / span, 0.0, 1.0)
    return np.where(i == 0, g[0], g[j] + frac * (g[i] - g[j]))


def aggregate_w2_barycenter(forecasts: Sequence[GridDistribution1D], w, levels: int | None = None) -> GridDistribution1D:
    """One-dimensional Wasserstein-2 barycenter ``Qbar = sum_n w_n Q_n``.

    Exact for step CDFs (atoms at the averaged quantiles) and for linear
    CDFs (the averaged quantile is piecewise linear between the merged CDF
    values); mixed inputs fall back to ``levels`` midpoint levels.
    """
    w = _check_pool(forecasts, w)
    k = _one_hot(w)
    if k is not None:
        return forecasts[k]
    if levels is None and all(f.interp == "linear" for f in forecasts):
        breaks = quantile_breakpoints(*forecasts)
        left = w @ np.stack([np.asarray(f.quantile_at(breaks)) for f in forecasts])
        right = w @ np.stack([_quantile_right_linear(f, breaks) for f in forecasts])
        # (x, level) pairs at both one-sided limits; a jump in Qbar is a flat CDF.
        x = np.concatenate([left, right])
        t = np.concatenate([breaks, breaks])
        order = np.lexsort((t, x))
        x, t = x[order], t[order]
        last = np.append(x[1:] != x[:-1], True)
        xs, cdf = x[last], np.maximum.accumulate(t)[last]
        if xs.size < 2:
            return make_empirical(xs, None, domain=(xs[0], xs[0] + 1.0))
        return GridDistribution1D(xs, cdf, "linear")
    agg = _quantile_aggregate(forecasts, levels, lambda Q: w @ Q, None)
    return agg.distribution


# ---------------------------------------------------------------------------
# Sliced Wasserstein barycenter of scaled and translated copies
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScaleShiftCloud:
    """Particle cloud ``(x - shift) / scale`` for ``x`` drawn from ``reference``."""

    reference: ParticleDistributionND
    scale: float
    shift: np.ndarray

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale must be positive")
        shift = np.atleast_1d(np.asarray(self.shift, dtype=float))
        if shift.shape != (self.reference.dim,):
            raise DomainError("shift dimension mismatch")
        shift.setflags(write=False)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def distribution(self) -> ParticleDistributionND:
        return ParticleDistributionND((self.reference.points - self.shift) / self.scale, self.reference.weights)


def aggregate_sw2_barycenter(scales, shifts, w) -> tuple[float, np.ndarray]:
    """Barycenter parameters ``(sbar, ubar)`` for copies ``(x - u_n) / s_n``.

    ``sbar = 1 / sum_n(w_n / s_n)`` and ``ubar = sbar * sum_n w_n u_n / s_n``.
    Along every direction the sliced quantile of the copy is affine in the
    reference's, so these parameters reproduce ``sum_n w_n SQ_n`` exactly.
    """
    w = as_weights(w)
    s = np.asarray(scales, dtype=float)
    u = np.asarray(shifts, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if s.shape != w.shape or u.shape[0] != w.size:
        raise DomainError("one scale and one shift per expert expected")
    if np.any(s <= 0):
        raise DomainError("scales must be positive")
    s_bar = 1.0 / float(np.sum(w / s))
    u_bar = s_bar * np.sum((w / s)[:, None] * u, axis=0)
    return s_bar, u_bar


def aggregate_scale_shift(forecasts: Sequence[ScaleShiftCloud], w) -> ScaleShiftCloud:
    """Sliced Wasserstein-2 barycenter of copies of one reference cloud."""
    w = _check_pool(forecasts, w)
    ref = forecasts[0].reference
    for f in forecasts[1:]:
        if f.reference is not ref and not (
            np.array_equal(f.reference.points, ref.points) and np.array_equal(f.reference.weights, ref.weights)
        ):
            raise TypeError("all forecasts must be copies of one reference cloud")
    k = _one_hot(w)
    if k is not None:
        return forecasts[k]
    s_bar, u_bar = aggregate_sw2_barycenter([f.scale for f in forecasts], np.stack([f.shift for f in forecasts]), w)
    return ScaleShiftCloud(ref, s_bar, u_bar)


# ---------------------------------------------------------------------------
# Rule selection
# ---------------------------------------------------------------------------

MODES = ("mixable", "expconcave")


def aggregator_for(spec: LossSpec, mode: str) -> Callable:
    """Aggregation rule ``f(forecasts, w)`` for a loss and a mode.

    Raises
    ------
    UnsupportedError
        For mixable mode on losses without a computable substitution
        (SCRPS, energy, CFD, MMD, SW2, multidimensional CRPS).
    """
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}")
    k = spec.kind
    if mode == "mixable":
        if k == LossKind.CRPS:
            return aggregate_crps_mixable
        if k == LossKind.BETA2:
            return lambda f, w: aggregate_beta2_mixable(f, w, spec.density_bound)
        if k == LossKind.OT1D:
            return lambda f, w: aggregate_ot1d_quantile(f, w, spec.cost).distribution
        if k == LossKind.SQUARE:
            return lambda f, w: square_substitution(np.asarray(f, dtype=float), w, spec.domain)
        if k in (LossKind.KL, LossKind.LOG):
            return aggregate_mixture
        raise UnsupportedError(f"no mixable aggregation rule is available for {k.value}")
    if k == LossKind.OT1D:
        if spec.cost.name != "square":
            raise UnsupportedError("the barycenter rule is provided for the square cost only")
        return aggregate_w2_barycenter
    if k == LossKind.SW2:
        return aggregate_scale_shift
    return aggregate_mixture
