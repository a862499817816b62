"""Integral losses for probabilistic forecasts.

Every loss here is an integral of a pointwise mixable loss against a
normalised weighting, discretised so that the integral is evaluated exactly
for the representation at hand:

* CDF-based losses integrate piecewise constant / piecewise linear CDF gaps in
  closed form on the merged grid;
* sliced losses average exact one-dimensional losses over a finite set of
  unit directions (Monte Carlo over the sphere, frozen per game);
* characteristic-function losses sum over a finite set of frequency nodes.

Learning rates for each kind are collected in :func:`table_eta`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln

from .core import (
    MAX_TENSOR_DIM,
    DensityGrid,
    GridDistribution1D,
    ParticleDistributionND,
    TensorGridCDF,
    as_weights,
)
from .errors import ConfigurationError, DomainError, InfiniteLossError, UnsupportedError
from .pointwise import BoundedInterval, EtaRate, log_loss, square_loss, square_substitution

DEFAULT_DIRECTIONS = 256
_CHUNK = 4096
_GAUSS3 = np.polynomial.legendre.leggauss(3)
_GAUSS2 = np.polynomial.legendre.leggauss(2)


class LossKind(str, enum.Enum):
    CRPS = "CRPS"
    MULTIDIM_CRPS = "MULTIDIM_CRPS"
    SCRPS = "SCRPS"
    ENERGY = "ENERGY"
    KL = "KL"
    BETA2 = "BETA2"
    CFD = "CFD"
    MMD = "MMD"
    OT1D = "OT1D"
    SW2 = "SW2"
    # pointwise base losses, useful as games in their own right
    SQUARE = "SQUARE"
    LOG = "LOG"


# ---------------------------------------------------------------------------
# Sphere geometry
# ---------------------------------------------------------------------------


def sphere_surface_area(D: int) -> float:
    """Surface area of the unit sphere in ``R^D``: ``2 pi^{D/2} / Gamma(D/2)``."""
    if D < 1:
        raise DomainError("dimension must be >= 1")
    return float(2.0 * math.exp(0.5 * D * math.log(math.pi) - gammaln(0.5 * D)))


def energy_scrps_constant(D: int) -> float:
    """Ratio ``energy_distance / scrps`` in dimension ``D``.

    ``(D - 1) S_{D-1} / S_{D-2}`` for ``D > 1`` where ``S_{k-1}`` is
    :func:`sphere_surface_area` ``(k)``; 2 for ``D = 1``.
    """
    if D == 1:
        return 2.0
    return (D - 1) * sphere_surface_area(D) / sphere_surface_area(D - 1)


def sphere_directions(dim: int, n: int, seed=0) -> np.ndarray:
    """``n`` i.i.d. uniform unit vectors (normalised standard Gaussians)."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _directions(dim: int, directions, seed) -> np.ndarray:
    if isinstance(directions, (int, np.integer)):
        if directions < 1:
            raise DomainError("need at least one direction")
        return sphere_directions(dim, int(directions), seed)
    theta = np.atleast_2d(np.asarray(directions, dtype=float))
    if theta.shape[1] != dim:
        raise DomainError("direction dimension mismatch")
    return theta


def _check_radius(d: ParticleDistributionND, R) -> None:
    if R is None:
        return
    if np.linalg.norm(d.points, axis=1).max() > R * (1 + 1e-12):
        raise DomainError(f"support leaves the ball of radius {R}")


# ---------------------------------------------------------------------------
# CRPS
# ---------------------------------------------------------------------------


def _sq_linear_integral(h, a, b):
    # int_0^h (a + (b - a) s / h)^2 ds
    return h * (a * a + a * b + b * b) / 3.0


def crps(g: GridDistribution1D, o: GridDistribution1D, iv=None) -> float:
    """``int_a^b (CDF_g - CDF_o)^2 dx``, evaluated exactly on the merged grid.

    ``iv`` defaults to the hull of both grids; supports outside ``iv`` raise
    :class:`DomainError`.
    """
    if iv is None:
        iv = (min(g.grid[0], o.grid[0]), max(g.grid[-1], o.grid[-1]))
    iv = BoundedInterval.of(iv)
    for d in (g, o):
        if d.grid[0] < iv.l or d.grid[-1] > iv.r:
            raise DomainError(f"distribution support {d.support} not inside [{iv.l}, {iv.r}]")
    nodes = np.union1d(np.union1d(g.grid, o.grid), [iv.l, iv.r])
    left = g.cdf_at(nodes[:-1]) - o.cdf_at(nodes[:-1])
    right = g.cdf_left_limit(nodes[1:]) - o.cdf_left_limit(nodes[1:])
    return float(np.sum(_sq_linear_integral(np.diff(nodes), left, right)))


def multidim_crps(g: TensorGridCDF, o: TensorGridCDF, box) -> float:
    """Squared multivariate CDF gap integrated over a product box (D <= 3)."""
    box = [BoundedInterval.of(b) for b in box]
    D = len(box)
    if D > MAX_TENSOR_DIM:
        raise UnsupportedError(f"product-box CRPS is provided for D <= {MAX_TENSOR_DIM}")
    if g.dim != D or o.dim != D:
        raise DomainError("dimension mismatch between box and CDFs")
    xg, wg = _GAUSS2
    node_sets, weight_sets = [], []
    for d, iv in enumerate(box):
        for t in (g, o):
            if t.axes[d][0] < iv.l or t.axes[d][-1] > iv.r:
                raise DomainError("CDF grid leaves the box")
        edges = np.union1d(np.union1d(g.axes[d], o.axes[d]), [iv.l, iv.r])
        h = np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        node_sets.append((mid[:, None] + 0.5 * h[:, None] * xg[None, :]).ravel())
        weight_sets.append((0.5 * h[:, None] * wg[None, :]).ravel())
    pts = np.stack(np.meshgrid(*node_sets, indexing="ij"), axis=-1).reshape(-1, D)
    wts = weight_sets[0]
    for ws in weight_sets[1:]:
        wts = np.multiply.outer(wts, ws)
    diff = g.cdf_at(pts) - o.cdf_at(pts)
    return float(np.sum(wts.ravel() * diff * diff))


# ---------------------------------------------------------------------------
# Sliced losses on particle clouds
# ---------------------------------------------------------------------------


def _sliced_crps_rows(pg, wg, po, wo) -> np.ndarray:
    """Exact CRPS between weighted 1-D atoms, one problem per row."""
    K = pg.shape[0]
    vals = np.concatenate([pg, po], axis=1)
    wts = np.concatenate([np.broadcast_to(wg, pg.shape), -np.broadcast_to(wo, po.shape)], axis=1)
    order = np.argsort(vals, axis=1, kind="stable")
    sv = np.take_along_axis(vals, order, axis=1)
    sw = np.take_along_axis(wts, order, axis=1)
    gap = np.cumsum(sw, axis=1)[:, :-1]
    return np.sum(gap * gap * np.diff(sv, axis=1), axis=1).reshape(K)


def sliced_crps_values(g, o, directions) -> np.ndarray:
    """Per-direction one-dimensional CRPS of the projected clouds."""
    theta = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.empty(theta.shape[0])
    for s in range(0, theta.shape[0], _CHUNK):
        th = theta[s : s + _CHUNK]
        out[s : s + _CHUNK] = _sliced_crps_rows(g.project(th), g.weights, o.project(th), o.weights)
    return out


def scrps(g: ParticleDistributionND, o: ParticleDistributionND, R=None, directions=DEFAULT_DIRECTIONS, seed=0) -> float:
    """Sliced CRPS: average over unit directions of the projected 1-D CRPS.

    ``directions`` is either a count (uniform directions drawn from ``seed``)
    or an explicit ``(K, D)`` array of unit vectors. Each projected CRPS is
    exact, so the only approximation is the finite direction set.
    """
    if g.dim != o.dim:
        raise DomainError("dimension mismatch")
    _check_radius(g, R)
    _check_radius(o, R)
    theta = _directions(g.dim, directions, seed)
    return float(np.mean(sliced_crps_values(g, o, theta)))


def energy_distance(g: ParticleDistributionND, o: ParticleDistributionND) -> float:
    """``2 E|X-Y| - E|X-X'| - E|Y-Y'|`` with exact weighted double sums."""
    if g.dim != o.dim:
        raise DomainError("dimension mismatch")
    xy = g.weights @ cdist(g.points, o.points) @ o.weights
    xx = g.weights @ cdist(g.points, g.points) @ g.weights
    yy = o.weights @ cdist(o.points, o.points) @ o.weights
    return max(float(2.0 * xy - xx - yy), 0.0)


def _w2_sq_rows(xs, xw, ys, yw) -> np.ndarray:
    """Exact squared-cost 1-D OT between sorted weighted atoms, per row."""
    cx = np.cumsum(xw, axis=1)
    cy = np.cumsum(yw, axis=1)
    levels = np.sort(np.concatenate([cx, cy], axis=1), axis=1)
    levels = np.minimum(levels, 1.0)
    prev = np.concatenate([np.zeros((levels.shape[0], 1)), levels[:, :-1]], axis=1)
    length = np.maximum(levels - prev, 0.0)
    mid = prev + 0.5 * length
    ix = np.minimum((cx[:, None, :] < mid[:, :, None]).sum(axis=2), xs.shape[1] - 1)
    iy = np.minimum((cy[:, None, :] < mid[:, :, None]).sum(axis=2), ys.shape[1] - 1)
    d = np.take_along_axis(xs, ix, axis=1) - np.take_along_axis(ys, iy, axis=1)
    return np.sum(length * d * d, axis=1)


def sliced_w2_values(g, o, directions) -> np.ndarray:
    theta = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.empty(theta.shape[0])
    for s in range(0, theta.shape[0], _CHUNK):
        th = theta[s : s + _CHUNK]
        pg, po = g.project(th), o.project(th)
        og, oo = np.argsort(pg, axis=1, kind="stable"), np.argsort(po, axis=1, kind="stable")
        out[s : s + _CHUNK] = _w2_sq_rows(
            np.take_along_axis(pg, og, axis=1),
            g.weights[og],
            np.take_along_axis(po, oo, axis=1),
            o.weights[oo],
        )
    return out


def sw2_squared(g: ParticleDistributionND, o: ParticleDistributionND, R=None, directions=DEFAULT_DIRECTIONS, seed=0) -> float:
    """Squared sliced Wasserstein-2 distance over a finite direction set."""
    if g.dim != o.dim:
        raise DomainError("dimension mismatch")
    _check_radius(g, R)
    _check_radius(o, R)
    theta = _directions(g.dim, directions, seed)
    return float(np.mean(sliced_w2_values(g, o, theta)))


# ---------------------------------------------------------------------------
# Density-based losses
# ---------------------------------------------------------------------------


def _check_same_base(a: DensityGrid, b: DensityGrid) -> None:
    if not a.same_base(b):
        raise DomainError("densities are tabulated on different base measures")


def kl_divergence(o: DensityGrid, g: DensityGrid) -> float:
    """``KL(o || g) = sum p_o log(p_o / p_g) mu``; note the outcome comes first."""
    _check_same_base(o, g)
    support = o.density > 0
    if np.any(g.density[support] <= 0):
        raise InfiniteLossError("forecast density vanishes where the outcome has mass")
    po, pg, m = o.density[support], g.density[support], o.mass[support]
    return max(float(np.sum(po * np.log(po / pg) * m)), 0.0)


def beta2_divergence(g: DensityGrid, o: DensityGrid, M=None) -> float:
    """``int (p_g - p_o)^2 d mu`` for densities bounded by ``M``."""
    _check_same_base(g, o)
    if M is not None:
        for d in (g, o):
            if d.density.max() > M * (1 + 1e-12):
                raise DomainError(f"density exceeds the bound M={M}")
    diff = g.density - o.density
    return float(np.sum(diff * diff * g.mass))


# ---------------------------------------------------------------------------
# Characteristic functions and kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntegralWeighting:
    """Quadrature nodes with nonnegative weights summing to one.

    Each weight is the product of the weighting function and the measure of
    the node's cell, so the weights play the role of ``u d(mu)``.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (nodes.shape[0],):
            raise DomainError("one weight per node expected")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if abs(math.fsum(w) - 1.0) > 1e-10:
            raise DomainError("weights must sum to one")
        nodes.setflags(write=False)
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]


def gaussian_weighting(dim: int, n: int, seed=0, scale: float = 1.0, method: str = "mc") -> IntegralWeighting:
    """Gaussian frequency weighting ``N(0, scale^2 I)``.

    ``method="mc"`` draws ``n`` i.i.d. nodes with equal weights;
    ``method="hermite"`` uses a tensor Gauss-Hermite rule with ``n`` nodes per
    axis (``n**dim`` in total).
    """
    if method == "mc":
        rng = np.random.default_rng(seed)
        return IntegralWeighting(scale * rng.standard_normal((n, dim)), np.full(n, 1.0 / n))
    if method == "hermite":
        x, w = np.polynomial.hermite_e.hermegauss(n)
        w = w / w.sum()
        grids = np.meshgrid(*([x] * dim), indexing="ij")
        nodes = scale * np.stack([gr.ravel() for gr in grids], axis=1)
        wts = w
        for _ in range(dim - 1):
            wts = np.multiply.outer(wts, w)
        return IntegralWeighting(nodes, wts.ravel())
    raise DomainError(f"unknown method {method!r}")


def cfd(g: ParticleDistributionND, o: ParticleDistributionND, weighting: IntegralWeighting) -> float:
    """Characteristic-function discrepancy ``sum |phi_g - phi_o|^2 w``."""
    if g.dim != o.dim or weighting.dim != g.dim:
        raise DomainError("dimension mismatch")
    total = 0.0
    for s in range(0, weighting.nodes.shape[0], _CHUNK):
        t = weighting.nodes[s : s + _CHUNK]
        d = g.characteristic_function(t) - o.characteristic_function(t)
        total += float(np.sum((d.real**2 + d.imag**2) * weighting.weights[s : s + _CHUNK]))
    return total


@dataclass(frozen=True)
class GaussianKernel:
    """``k(x, y) = amplitude * exp(-|x - y|^2 / (2 bandwidth^2))``.

    Spectral measure: ``amplitude * N(0, bandwidth^-2 I)``.
    """

    bandwidth: float = 1.0
    amplitude: float = 1.0
    name = "gaussian"

    def __call__(self, x, y) -> np.ndarray:
        return self.amplitude * np.exp(-cdist(x, y, "sqeuclidean") / (2.0 * self.bandwidth**2))

    @property
    def spectral_mass(self) -> float:
        return self.amplitude

    def sample_spectral(self, rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
        return rng.standard_normal((n, dim)) / self.bandwidth

    def spectral_weighting(self, dim: int, n: int, seed=0) -> IntegralWeighting:
        """Normalised spectral measure as an equal-weight Monte Carlo rule."""
        rng = np.random.default_rng(seed)
        return IntegralWeighting(self.sample_spectral(rng, n, dim), np.full(n, 1.0 / n))

    def to_dict(self) -> dict:
        return {"name": self.name, "bandwidth": self.bandwidth, "amplitude": self.amplitude}


@dataclass(frozen=True)
class LaplacianKernel(GaussianKernel):
    """``k(x, y) = amplitude * exp(-|x - y|_1 / bandwidth)``.

    Spectral measure: ``amplitude`` times a product of Cauchy laws with scale
    ``1 / bandwidth``.
    """

    name = "laplacian"

    def __call__(self, x, y) -> np.ndarray:
        return self.amplitude * np.exp(-cdist(x, y, "cityblock") / self.bandwidth)

    def sample_spectral(self, rng, n, dim):
        return rng.standard_cauchy((n, dim)) / self.bandwidth


def kernel_from_dict(data: dict):
    kinds = {"gaussian": GaussianKernel, "laplacian": LaplacianKernel}
    try:
        cls = kinds[data.get("name", "gaussian")]
    except KeyError:
        raise ConfigurationError(f"unknown kernel {data.get('name')!r}") from None
    return cls(float(data.get("bandwidth", 1.0)), float(data.get("amplitude", 1.0)))


def mmd_squared(g: ParticleDistributionND, o: ParticleDistributionND, kernel=None) -> float:
    """Squared MMD with exact weighted kernel sums."""
    kernel = kernel or GaussianKernel()
    if g.dim != o.dim:
        raise DomainError("dimension mismatch")
    gg = g.weights @ kernel(g.points, g.points) @ g.weights
    go = g.weights @ kernel(g.points, o.points) @ o.weights
    oo = o.weights @ kernel(o.points, o.points) @ o.weights
    return max(float(gg - 2.0 * go + oo), 0.0)


# ---------------------------------------------------------------------------
# One-dimensional optimal transport
# ---------------------------------------------------------------------------


def cross_derivative_ok(fn, domain, probes: int = 32, h: float = 1e-4) -> bool:
    """Probe ``d^2 c / dx dx' < 0`` on a ``probes x probes`` interior grid."""
    iv = BoundedInterval.of(domain)
    pad = 2 * h * iv.width
    x = np.linspace(iv.l + pad, iv.r - pad, probes)
    X, Y = np.meshgrid(x, x, indexing="ij")
    s = h * iv.width
    mixed = (fn(X + s, Y + s) - fn(X + s, Y - s) - fn(X - s, Y + s) + fn(X - s, Y - s)) / (4 * s * s)
    return bool(np.all(mixed < 0))


@dataclass(frozen=True, eq=False)
class TransportCost:
    """Transport cost ``c(x, x')`` on an interval, with its aggregation data.

    ``substitution(forecasts, w)`` aggregates pointwise forecasts (shape
    (N, ...)) and realises mixability at ``eta.mixable``.
    """

    fn: Callable
    domain: BoundedInterval
    name: str = "custom"
    substitution: Callable | None = None
    eta: EtaRate | None = None
    valid: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", BoundedInterval.of(self.domain))
        object.__setattr__(self, "valid", cross_derivative_ok(self.fn, self.domain))

    def __call__(self, x, y):
        return self.fn(x, y)


def square_cost(domain=(0.0, 1.0)) -> TransportCost:
    iv = BoundedInterval.of(domain)
    return TransportCost(
        fn=lambda x, y: (np.asarray(x) - np.asarray(y)) ** 2,
        domain=iv,
        name="square",
        substitution=lambda f, w: square_substitution(f, w, iv),
        eta=EtaRate(2.0 / iv.width**2, 0.5 / iv.width**2),
    )


def quantile_breakpoints(*dists: GridDistribution1D) -> np.ndarray:
    """Levels in ``[0, 1]`` between which all quantile functions are smooth."""
    return np.union1d(np.concatenate([d.cdf for d in dists]), [0.0, 1.0])


def quantile_nodes_exact(breaks: np.ndarray):
    """3-point Gauss-Legendre nodes/weights on every positive-length piece."""
    h = np.diff(breaks)
    keep = h > 0
    a, h = breaks[:-1][keep], h[keep]
    x, w = _GAUSS3
    t = (a[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    return np.clip(t, 0.0, 1.0), (0.5 * h[:, None] * w[None, :]).ravel()


def ot1d_cost(g: GridDistribution1D, o: GridDistribution1D, cost=None, quantile_nodes: int | None = None) -> float:
    """``int_0^1 c(Q_g(t), Q_o(t)) dt``.

    By default the integral is split at every CDF value of either input; on
    each piece both quantile functions are constant (step CDFs) or affine
    (linear CDFs), and a 3-point Gauss rule integrates any cost of degree
    <= 5 exactly. ``quantile_nodes=K`` switches to the midpoint rule on
    ``K`` uniform levels.
    """
    if cost is None:
        fn = lambda x, y: (x - y) ** 2  # noqa: E731
    else:
        if not cost.valid:
            raise ConfigurationError(f"cost {cost.name!r} violates d2c/dxdx' < 0 on its domain")
        fn = cost.fn
    if quantile_nodes is None:
        t, w = quantile_nodes_exact(quantile_breakpoints(g, o))
    else:
        t = (np.arange(quantile_nodes) + 0.5) / quantile_nodes
        w = np.full(quantile_nodes, 1.0 / quantile_nodes)
    return float(np.sum(w * fn(g.quantile_at(t), o.quantile_at(t))))


# ---------------------------------------------------------------------------
# Loss specification and learning rates
# ---------------------------------------------------------------------------

MIXABLE_AGGREGATION = frozenset({LossKind.CRPS, LossKind.KL, LossKind.LOG, LossKind.BETA2, LossKind.OT1D, LossKind.SQUARE})


@dataclass(frozen=True, eq=False)
class LossSpec:
    """Which loss is played and with which parameters.

    Required fields per kind::

        CRPS, OT1D, SQUARE   domain=(a, b)
        MULTIDIM_CRPS        domain=[(a1, b1), ..., (aD, bD)]
        SCRPS, ENERGY, SW2   radius, dim
        BETA2                density_bound (M), base_mass (||mu||_1)
        CFD                  dim, optional weighting_scale
        MMD                  dim, optional kernel
        KL, LOG              none

    ``directions`` is the size of the frozen Monte Carlo node set (sphere
    directions or CFD frequencies) used inside a game.
    """

    kind: LossKind
    domain: tuple | None = None
    radius: float | None = None
    dim: int | None = None
    density_bound: float | None = None
    base_mass: float | None = None
    kernel: GaussianKernel | None = None
    cost: TransportCost | None = None
    weighting_scale: float = 1.0
    directions: int = DEFAULT_DIRECTIONS
    eta: EtaRate = field(init=False)

    def __post_init__(self):
        kind = LossKind(self.kind)
        object.__setattr__(self, "kind", kind)
        need = {
            LossKind.CRPS: ("domain",),
            LossKind.OT1D: ("domain",),
            LossKind.SQUARE: ("domain",),
            LossKind.MULTIDIM_CRPS: ("domain",),
            LossKind.SCRPS: ("radius", "dim"),
            LossKind.ENERGY: ("radius", "dim"),
            LossKind.SW2: ("radius", "dim"),
            LossKind.BETA2: ("density_bound", "base_mass"),
            LossKind.CFD: ("dim",),
            LossKind.MMD: ("dim",),
        }.get(kind, ())
        for name in need:
            if getattr(self, name) is None:
                raise ConfigurationError(f"{kind.value} requires {name!r}")
        if kind == LossKind.MULTIDIM_CRPS:
            box = tuple(BoundedInterval.of(b) for b in self.domain)
            if len(box) > MAX_TENSOR_DIM:
                raise UnsupportedError(f"product-box CRPS is provided for D <= {MAX_TENSOR_DIM}")
            object.__setattr__(self, "domain", box)
        elif self.domain is not None:
            object.__setattr__(self, "domain", BoundedInterval.of(self.domain))
        if kind == LossKind.MMD and self.kernel is None:
            object.__setattr__(self, "kernel", GaussianKernel())
        if kind == LossKind.OT1D:
            cost = self.cost or square_cost(self.domain)
            if not cost.valid:
                raise ConfigurationError(f"cost {cost.name!r} violates d2c/dxdx' < 0 on its domain")
            if cost.eta is None:
                raise ConfigurationError("OT1D needs a cost with known learning rates")
            object.__setattr__(self, "cost", cost)
        if self.directions < 1:
            raise ConfigurationError("directions must be >= 1")
        object.__setattr__(self, "eta", table_eta(self))

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if isinstance(self.domain, BoundedInterval):
            out["domain"] = [self.domain.l, self.domain.r]
        elif self.domain is not None:
            out["domain"] = [[b.l, b.r] for b in self.domain]
        for name in ("radius", "dim", "density_bound", "base_mass"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        if self.kernel is not None:
            out["kernel"] = self.kernel.to_dict()
        if self.cost is not None:
            out["cost"] = self.cost.name
        if self.kind == LossKind.CFD:
            out["weighting_scale"] = self.weighting_scale
        if self.kind in (LossKind.SCRPS, LossKind.SW2, LossKind.CFD):
            out["directions"] = self.directions
        return out

    @classmethod
    def from_dict(cls, data: dict) -> LossSpec:
        data = dict(data)
        try:
            kind = LossKind(data.pop("kind"))
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"loss.kind: {exc}") from None
        if "kernel" in data:
            data["kernel"] = kernel_from_dict(data["kernel"])
        if "cost" in data:
            if data["cost"] != "square":
                raise ConfigurationError("only the 'square' transport cost can be configured from JSON")
            data["cost"] = square_cost(data["domain"])
        allowed = {"domain", "radius", "dim", "density_bound", "base_mass", "kernel", "cost", "weighting_scale", "directions"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigurationError(f"loss: unknown field(s) {sorted(unknown)}")
        return cls(kind, **data)


def table_eta(spec: LossSpec) -> EtaRate:
    """Mixability / exp-concavity rates of ``spec`` for its configured domain."""
    k = spec.kind
    if k in (LossKind.CRPS,):
        L = spec.domain.width
        return EtaRate(2.0 / L, 1.0 / (2.0 * L))
    if k == LossKind.MULTIDIM_CRPS:
        V = math.prod(b.width for b in spec.domain)
        return EtaRate(2.0 / V, 1.0 / (2.0 * V))
    if k == LossKind.SCRPS:
        return EtaRate(1.0 / (2.0 * spec.radius), 1.0 / (8.0 * spec.radius))
    if k == LossKind.ENERGY:
        c = energy_scrps_constant(spec.dim)
        return EtaRate(1.0 / (2.0 * spec.radius * c), 1.0 / (8.0 * spec.radius * c))
    if k in (LossKind.KL, LossKind.LOG):
        return EtaRate(1.0, 1.0)
    if k == LossKind.BETA2:
        s = spec.base_mass * spec.density_bound**2
        return EtaRate(2.0 / s, 1.0 / (2.0 * s))
    if k == LossKind.CFD:
        return EtaRate(0.25, 0.125)
    if k == LossKind.MMD:
        m = spec.kernel.spectral_mass
        return EtaRate(1.0 / (4.0 * m), 1.0 / (8.0 * m))
    if k == LossKind.OT1D:
        return spec.cost.eta
    if k == LossKind.SW2:
        R2 = spec.radius**2
        return EtaRate(1.0 / (2.0 * R2), 1.0 / (8.0 * R2))
    if k == LossKind.SQUARE:
        L2 = spec.domain.width**2
        return EtaRate(2.0 / L2, 1.0 / (2.0 * L2))
    raise ConfigurationError(f"no learning rate known for {k}")


class BoundLoss:
    """``loss(forecast, outcome)`` for a spec, with Monte Carlo nodes frozen.

    Freezing the direction/frequency set once per game keeps the per-round
    mixability inequality exact for the discretised loss.
    """

    def __init__(self, spec: LossSpec, seed=0):
        self.spec = spec
        self.directions = None
        self.weighting = None
        k = spec.kind
        if k in (LossKind.SCRPS, LossKind.SW2):
            self.directions = sphere_directions(spec.dim, spec.directions, seed)
        elif k == LossKind.CFD:
            self.weighting = gaussian_weighting(spec.dim, spec.directions, seed, spec.weighting_scale)

    def __call__(self, forecast, outcome) -> float:
        s, k = self.spec, self.spec.kind
        # implicit representations (scale/shift copies, quantile aggregates)
        forecast = getattr(forecast, "distribution", forecast)
        outcome = getattr(outcome, "distribution", outcome)
        if k == LossKind.CRPS:
            return crps(forecast, outcome, s.domain)
        if k == LossKind.MULTIDIM_CRPS:
            return multidim_crps(forecast, outcome, s.domain)
        if k == LossKind.SCRPS:
            return scrps(forecast, outcome, s.radius, self.directions)
        if k == LossKind.ENERGY:
            _check_radius(forecast, s.radius)
            _check_radius(outcome, s.radius)
            return energy_distance(forecast, outcome)
        if k == LossKind.KL:
            return kl_divergence(outcome, forecast)
        if k == LossKind.BETA2:
            if abs(forecast.total_mass - s.base_mass) > 1e-9 * s.base_mass:
                raise ConfigurationError("base measure mass differs from the configured base_mass")
            return beta2_divergence(forecast, outcome, s.density_bound)
        if k == LossKind.CFD:
            return cfd(forecast, outcome, self.weighting)
        if k == LossKind.MMD:
            return mmd_squared(forecast, outcome, s.kernel)
        if k == LossKind.OT1D:
            return ot1d_cost(forecast, outcome, s.cost)
        if k == LossKind.SW2:
            return sw2_squared(forecast, outcome, s.radius, self.directions)
        if k == LossKind.SQUARE:
            return square_loss(forecast, outcome, s.domain)
        if k == LossKind.LOG:
            return log_loss(forecast, int(outcome))
        raise ConfigurationError(f"cannot evaluate {k}")
