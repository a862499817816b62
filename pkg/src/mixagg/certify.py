"""Randomised certification of every aggregation rule at its learning rate.

Each row pairs a loss, an aggregation rule and a rate, and draws random
instances (expert pools, weights, outcome sets) that are checked with
:func:`mixagg.oracle.check_mixability`. Monte Carlo losses use a direction or
frequency set frozen per instance, so their inequality is exact too.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .aggregation import (
    ScaleShiftCloud,
    aggregate_beta2_mixable,
    aggregate_crps_mixable,
    aggregate_mixture,
    aggregate_ot1d_quantile,
    aggregate_scale_shift,
    aggregate_w2_barycenter,
    project_density,
)
from .core import DensityGrid, ParticleDistributionND, make_empirical, tensor_cdf_from_particles
from .errors import ConfigurationError
from .losses import (
    GaussianKernel,
    LaplacianKernel,
    LossKind,
    beta2_divergence,
    cfd,
    crps,
    energy_distance,
    energy_scrps_constant,
    gaussian_weighting,
    kl_divergence,
    mmd_squared,
    multidim_crps,
    ot1d_cost,
    sphere_directions,
    square_cost,
    scrps,
    sw2_squared,
)
from .oracle import SLACK_TOL, check_mixability

MC_KINDS = frozenset({LossKind.SCRPS, LossKind.CFD, LossKind.SW2, LossKind.MULTIDIM_CRPS})
FROZEN_NODES = 32


@dataclass
class Instance:
    loss: Callable
    aggregate: object
    forecasts: list
    weights: np.ndarray
    eta: float
    outcomes: list


@dataclass(frozen=True)
class Row:
    kind: LossKind
    mode: str
    rule: str
    draw: Callable[[np.random.Generator], Instance]

    @property
    def name(self) -> str:
        return f"{self.kind.value}/{self.mode}/{self.rule}"


# ---------------------------------------------------------------------------
# Random ingredients
# ---------------------------------------------------------------------------


def _pool(rng) -> tuple[int, np.ndarray]:
    n = int(rng.integers(2, 6))
    return n, rng.dirichlet(np.ones(n))


def _interval(rng) -> tuple[float, float]:
    a = float(rng.uniform(-2.0, 2.0))
    return a, a + float(rng.uniform(0.5, 3.0))


def _empirical(rng, iv, max_atoms=6):
    k = int(rng.integers(1, max_atoms + 1))
    return make_empirical(rng.uniform(*iv, size=k), rng.dirichlet(np.ones(k)), domain=iv)


def _outcomes_1d(rng, iv):
    pts = [float(rng.uniform(*iv)), float(rng.uniform(*iv)), iv[int(rng.integers(2))]]
    return [make_empirical([x], domain=iv) for x in pts] + [_empirical(rng, iv)]


def _ball_points(rng, k, dim, R):
    v = rng.standard_normal((k, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (R * rng.uniform(size=(k, 1)) ** (1.0 / dim))


def _cloud(rng, dim, R, max_points=5):
    k = int(rng.integers(1, max_points + 1))
    return ParticleDistributionND(_ball_points(rng, k, dim, R), rng.dirichlet(np.ones(k)))


def _cloud_outcomes(rng, dim, R):
    return [ParticleDistributionND(_ball_points(rng, 1, dim, R)) for _ in range(2)] + [_cloud(rng, dim, R)]


def _density(rng, mass, M):
    # probabilities over the atoms; the density p/mass never exceeds M
    # because M >= 1 / min(mass) in every row below
    p = rng.dirichlet(np.full(mass.size, 0.5))
    return DensityGrid(np.arange(mass.size, dtype=float), mass, project_density(p / mass, mass, M), M)


def _dirac_density(mass, k, M):
    d = np.zeros(mass.size)
    d[k] = 1.0 / mass[k]
    return DensityGrid(np.arange(mass.size, dtype=float), mass, d, M)


# ---------------------------------------------------------------------------
# Rows
# ---------------------------------------------------------------------------


def _crps_row(mixable: bool):
    def draw(rng):
        iv = _interval(rng)
        n, w = _pool(rng)
        f = [_empirical(rng, iv) for _ in range(n)]
        L = iv[1] - iv[0]
        agg = aggregate_crps_mixable(f, w) if mixable else aggregate_mixture(f, w)
        eta = 2.0 / L if mixable else 1.0 / (2.0 * L)
        return Instance(lambda g, o: crps(g, o, iv), agg, f, w, eta, _outcomes_1d(rng, iv))

    return draw


def _multidim_crps(rng):
    dim = 2
    box = [(0.0, 1.0)] * dim
    axes = [np.linspace(0, 1, 9)] * dim
    n, w = _pool(rng)

    def tensor(k):
        pts = rng.uniform(size=(k, dim))
        return tensor_cdf_from_particles(pts, rng.dirichlet(np.ones(k)), axes)

    f = [tensor(int(rng.integers(1, 4))) for _ in range(n)]
    outs = [tensor(1) for _ in range(3)]
    return Instance(lambda g, o: multidim_crps(g, o, box), aggregate_mixture(f, w), f, w, 0.5, outs)


def _scrps(rng):
    dim, R = int(rng.integers(2, 4)), float(rng.uniform(0.5, 2.0))
    theta = sphere_directions(dim, FROZEN_NODES, rng)
    n, w = _pool(rng)
    f = [_cloud(rng, dim, R) for _ in range(n)]
    return Instance(lambda g, o: scrps(g, o, R, theta), aggregate_mixture(f, w), f, w, 1.0 / (8.0 * R), _cloud_outcomes(rng, dim, R))


def _energy(rng):
    dim, R = int(rng.integers(2, 4)), float(rng.uniform(0.5, 2.0))
    n, w = _pool(rng)
    f = [_cloud(rng, dim, R) for _ in range(n)]
    eta = 1.0 / (8.0 * R * energy_scrps_constant(dim))
    return Instance(energy_distance, aggregate_mixture(f, w), f, w, eta, _cloud_outcomes(rng, dim, R))


def _kl(rng):
    K = int(rng.integers(2, 7))
    mass = np.ones(K)
    n, w = _pool(rng)
    f = [DensityGrid(np.arange(K, dtype=float), mass, rng.dirichlet(np.ones(K))) for _ in range(n)]
    outs = [_dirac_density(mass, int(rng.integers(K)), None) for _ in range(2)]
    outs.append(DensityGrid(np.arange(K, dtype=float), mass, rng.dirichlet(np.ones(K))))
    return Instance(lambda g, o: kl_divergence(o, g), aggregate_mixture(f, w), f, w, 1.0, outs)


def _beta2_row(mixable: bool):
    def draw(rng):
        K = int(rng.integers(2, 7))
        mass = rng.uniform(0.2, 1.5, K)
        M = float(rng.uniform(1.0, 3.0) / mass.min())
        n, w = _pool(rng)
        f = [_density(rng, mass, M) for _ in range(n)]
        outs = [_dirac_density(mass, int(rng.integers(K)), M) for _ in range(2)] + [_density(rng, mass, M)]
        s = mass.sum() * M * M
        if mixable:
            return Instance(lambda g, o: beta2_divergence(g, o, M), aggregate_beta2_mixable(f, w, M), f, w, 2.0 / s, outs)
        return Instance(lambda g, o: beta2_divergence(g, o, M), aggregate_mixture(f, w), f, w, 1.0 / (2.0 * s), outs)

    return draw


def _cfd(rng):
    dim = int(rng.integers(1, 4))
    weighting = gaussian_weighting(dim, FROZEN_NODES, rng, scale=float(rng.uniform(0.5, 2.0)))
    n, w = _pool(rng)
    f = [_cloud(rng, dim, 2.0) for _ in range(n)]
    return Instance(lambda g, o: cfd(g, o, weighting), aggregate_mixture(f, w), f, w, 0.125, _cloud_outcomes(rng, dim, 2.0))


def _mmd(rng):
    dim = int(rng.integers(1, 4))
    cls = GaussianKernel if rng.random() < 0.5 else LaplacianKernel
    kernel = cls(float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.5, 3.0)))
    n, w = _pool(rng)
    f = [_cloud(rng, dim, 2.0) for _ in range(n)]
    eta = 1.0 / (8.0 * kernel.spectral_mass)
    return Instance(lambda g, o: mmd_squared(g, o, kernel), aggregate_mixture(f, w), f, w, eta, _cloud_outcomes(rng, dim, 2.0))


def _ot1d(rng):
    iv = _interval(rng)
    cost = square_cost(iv)
    n, w = _pool(rng)
    f = [_empirical(rng, iv) for _ in range(n)]
    agg = aggregate_ot1d_quantile(f, w, cost).distribution
    return Instance(ot1d_cost, agg, f, w, cost.eta.mixable, _outcomes_1d(rng, iv))


def _w2(rng):
    iv = _interval(rng)
    n, w = _pool(rng)
    f = [_empirical(rng, iv) for _ in range(n)]
    eta = 1.0 / (2.0 * (iv[1] - iv[0]) ** 2)
    return Instance(ot1d_cost, aggregate_w2_barycenter(f, w), f, w, eta, _outcomes_1d(rng, iv))


def _sw2(rng):
    dim, R = int(rng.integers(2, 4)), 2.0
    theta = sphere_directions(dim, FROZEN_NODES, rng)
    ref = _cloud(rng, dim, 1.0, max_points=6)
    n, w = _pool(rng)
    f = []
    for _ in range(n):
        shift = _ball_points(rng, 1, dim, 1.0)[0]
        f.append(ScaleShiftCloud(ref, float(rng.uniform(1.0, 3.0)), shift))
    agg = aggregate_scale_shift(f, w)

    def loss(g, o):
        return sw2_squared(getattr(g, "distribution", g), o, R, theta)

    return Instance(loss, agg, f, w, 1.0 / (8.0 * R * R), _cloud_outcomes(rng, dim, R))


ROWS = (
    Row(LossKind.CRPS, "mixable", "cdf-substitution", _crps_row(True)),
    Row(LossKind.CRPS, "expconcave", "mixture", _crps_row(False)),
    Row(LossKind.MULTIDIM_CRPS, "expconcave", "mixture", _multidim_crps),
    Row(LossKind.SCRPS, "expconcave", "mixture", _scrps),
    Row(LossKind.ENERGY, "expconcave", "mixture", _energy),
    Row(LossKind.KL, "mixable", "mixture", _kl),
    Row(LossKind.BETA2, "expconcave", "mixture", _beta2_row(False)),
    Row(LossKind.BETA2, "mixable", "projected-substitution", _beta2_row(True)),
    Row(LossKind.CFD, "expconcave", "mixture", _cfd),
    Row(LossKind.MMD, "expconcave", "mixture", _mmd),
    Row(LossKind.OT1D, "mixable", "quantile-substitution", _ot1d),
    Row(LossKind.OT1D, "expconcave", "w2-barycenter", _w2),
    Row(LossKind.SW2, "expconcave", "sw2-barycenter", _sw2),
)


@dataclass
class RowResult:
    loss: str
    mode: str
    rule: str
    eta_example: float
    passed: bool
    worst_slack: float
    failures: int
    trials: int
    runtime: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.loss:<14} {self.mode:<10} {self.rule:<22} trials={self.trials:<6} "
            f"worst_slack={self.worst_slack:+.3e} failures={self.failures} ({self.runtime:.1f}s)"
        )

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def certify_row(row: Row, trials: int, seed=0, tol: float = SLACK_TOL) -> RowResult:
    rng = np.random.default_rng([int(seed), ROWS.index(row)])
    worst, failures, eta = math.inf, 0, math.nan
    start = time.perf_counter()
    for _ in range(trials):
        inst = row.draw(rng)
        eta = inst.eta
        res = check_mixability(inst.loss, inst.aggregate, inst.forecasts, inst.weights, inst.eta, inst.outcomes, tol)
        worst = min(worst, res.worst_slack)
        failures += not res.passed
    return RowResult(row.kind.value, row.mode, row.rule, eta, failures == 0, worst, failures, trials, time.perf_counter() - start)


def default_trials(kind: LossKind, trials: int) -> int:
    """Monte Carlo rows run a tenth of the trials (at least one)."""
    return max(1, trials // 10) if kind in MC_KINDS and trials > 0 else trials


def run_verification_suite(scope=None, trials: int = 10_000, seed=0, reduce_mc: bool = True) -> list[RowResult]:
    """Certify every row whose loss is in ``scope`` (all rows by default)."""
    if trials < 0:
        raise ConfigurationError("trials must be >= 0")
    if trials == 0:
        return []
    kinds = None
    if scope is not None:
        try:
            kinds = {LossKind(str(s).upper()) for s in scope}
        except ValueError as exc:
            raise ConfigurationError(f"unknown loss kind in scope: {exc}") from None
    out = []
    for row in ROWS:
        if kinds is not None and row.kind not in kinds:
            continue
        n = default_trials(row.kind, trials) if reduce_mc else trials
        out.append(certify_row(row, n, seed))
    return out
