"""Synthetic expert pools and outcome streams for experiments.

A game is driven by a latent location path. Outcomes are noisy draws around
it and experts forecast Gaussian-shaped distributions around a biased
version of it. :func:`build_forecast` turns a (location, spread) pair into
the representation a given loss expects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .aggregation import ScaleShiftCloud
from .core import (
    DensityGrid,
    ParticleDistributionND,
    make_empirical,
    make_from_cdf,
    tensor_cdf_from_particles,
    tensor_cdf_product,
)
from .errors import ConfigurationError
from .losses import LossKind, LossSpec

GENERATORS = ("biased-gaussian", "shifted-empirical", "adversarial-pair")
_BALL_KINDS = {LossKind.SCRPS, LossKind.ENERGY, LossKind.CFD, LossKind.MMD, LossKind.SW2}
_BIN_KINDS = {LossKind.KL, LossKind.BETA2, LossKind.LOG}

# documented parameter ranges: name -> (type, low, high, default)
POOL_PARAMS = {
    "bias_scale": (float, 0.0, 10.0, 0.3),
    "spread": (float, 1e-3, 10.0, 0.1),
    "grid": (int, 2, 4096, 64),
    "particles": (int, 1, 2000, 16),
    "bins": (int, 2, 1000, 10),
    "floor": (float, 0.0, 0.5, 1e-3),
    "switch": (float, 0.0, 1.0, 0.5),
}
OUTCOME_PARAMS = {
    "noise": (float, 0.0, 10.0, 0.1),
    "period": (float, 1.0, 1e9, 200.0),
    "amplitude": (float, 0.0, 1.0, 0.25),
}


def _params(raw: dict, table: dict, where: str, extra=()) -> dict:
    unknown = set(raw) - set(table) - set(extra)
    if unknown:
        raise ConfigurationError(f"{where}: unknown field(s) {sorted(unknown)}")
    out = {}
    for name, (typ, lo, hi, default) in table.items():
        val = raw.get(name, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigurationError(f"{where}.{name}: expected a number, got {val!r}")
        if typ is int and val != int(val):
            raise ConfigurationError(f"{where}.{name}: expected an integer")
        if not lo <= val <= hi:
            raise ConfigurationError(f"{where}.{name}={val} outside [{lo}, {hi}]")
        out[name] = typ(val)
    return out


def _line(spec: LossSpec) -> tuple[float, float]:
    """Interval on which locations move for this loss."""
    k = spec.kind
    if k in (LossKind.CRPS, LossKind.OT1D, LossKind.SQUARE):
        return spec.domain.l, spec.domain.r
    if k == LossKind.MULTIDIM_CRPS:
        return spec.domain[0].l, spec.domain[0].r
    if k in _BALL_KINDS:
        R = spec.radius if spec.radius is not None else 1.0
        return -0.5 * R, 0.5 * R
    return 0.0, 1.0


@dataclass
class OutcomeStream:
    """Latent locations ``loc[t]`` and realised outcome points ``points[t]``."""

    locations: np.ndarray
    points: np.ndarray


def latent_outcomes(spec: LossSpec, horizon: int, params: dict, rng: np.random.Generator) -> OutcomeStream:
    p = _params(params, OUTCOME_PARAMS, "outcome_stream", extra=("generator",))
    lo, hi = _line(spec)
    mid, width = 0.5 * (lo + hi), hi - lo
    t = np.arange(horizon)
    loc = mid + p["amplitude"] * width * np.sin(2 * math.pi * t / p["period"])
    dim = _dim(spec)
    pts = loc[:, None] + p["noise"] * width * rng.standard_normal((horizon, dim))
    return OutcomeStream(loc, _clip_points(spec, pts))


def outcomes_from_file(spec: LossSpec, path: str | Path, horizon: int) -> OutcomeStream:
    """Outcome points from a JSON file ``{"outcomes": [x_1, x_2, ...]}``.

    Each entry is a number or a list of coordinates. Experts are centred on
    the previous outcome (the first round on the middle of the domain).
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"outcome_stream.file: {path} does not exist")
    try:
        data = json.loads(path.read_text())
        pts = np.asarray(data["outcomes"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"outcome_stream.file: cannot read outcomes from {path}: {exc}") from None
    dim = _dim(spec)
    pts = pts.reshape(pts.shape[0], -1) if pts.ndim > 1 else pts[:, None]
    if pts.shape[1] != dim:
        pts = np.repeat(pts[:, :1], dim, axis=1)
    pts = _clip_points(spec, pts)
    lo, hi = _line(spec)
    loc = np.concatenate(([0.5 * (lo + hi)], pts[:-1, 0]))
    return OutcomeStream(loc[: pts.shape[0]], pts)


def _dim(spec: LossSpec) -> int:
    if spec.kind == LossKind.MULTIDIM_CRPS:
        return len(spec.domain)
    if spec.kind in _BALL_KINDS:
        return spec.dim
    return 1


def _clip_points(spec: LossSpec, pts: np.ndarray) -> np.ndarray:
    if spec.kind in _BALL_KINDS:
        R = spec.radius if spec.radius is not None else 1.0
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        return np.where(norms > R, pts * (R / np.maximum(norms, 1e-300)), pts)
    lo, hi = _line(spec)
    return np.clip(pts, lo, hi)


def _bin_probs(spec, loc, spread, bins, floor, lo, hi):
    edges = np.linspace(lo, hi, bins + 1)
    cdf = ndtr((edges - loc) / spread)
    cdf[0], cdf[-1] = 0.0, 1.0
    p = np.diff(cdf)
    return (1.0 - floor) * p / p.sum() + floor / bins


def _bin_of(x, bins, lo, hi) -> int:
    return int(np.clip(np.floor((x - lo) / (hi - lo) * bins), 0, bins - 1))


class ForecastBuilder:
    """Builds forecasts and outcomes in the representation of one loss."""

    def __init__(self, spec: LossSpec, params: dict, rng: np.random.Generator, reference=None):
        self.spec = spec
        self.p = params
        self.rng = rng
        self.lo, self.hi = _line(spec)
        self.dim = _dim(spec)
        self._ref = reference
        self._z = None

    def _cdf_1d(self, loc, spread, domain):
        return make_from_cdf(lambda x: ndtr((x - loc) / spread), domain, n=self.p["grid"], interp="step")

    def reference(self) -> np.ndarray:
        """Standardised sample shared by shifted-empirical experts."""
        if self._z is None:
            z = self.rng.standard_normal((self.p["particles"], self.dim))
            norms = np.linalg.norm(z, axis=1, keepdims=True)
            self._z = np.where(norms > 2.0, 2.0 * z / norms, z)
        return self._z

    def forecast(self, loc: float, spread: float, empirical: bool = False):
        k, s = self.spec.kind, self.spec
        width = self.hi - self.lo
        sd = spread * width
        if k in (LossKind.CRPS, LossKind.OT1D):
            if empirical:
                return make_empirical(np.clip(loc + sd * self.reference()[:, 0], self.lo, self.hi), domain=(self.lo, self.hi))
            return self._cdf_1d(loc, sd, (self.lo, self.hi))
        if k == LossKind.MULTIDIM_CRPS:
            box = [(b.l, b.r) for b in s.domain]
            axes = [np.linspace(a, b, self.p["grid"]) for a, b in box]
            if empirical:
                pts = np.clip(loc + sd * self.reference(), [a for a, _ in box], [b for _, b in box])
                return tensor_cdf_from_particles(pts, None, axes)
            marg = [make_from_cdf(lambda x: ndtr((x - loc) / sd), (a, b), n=self.p["grid"], interp="step") for a, b in box]
            return tensor_cdf_product(marg)
        if k == LossKind.SW2:
            ref = self._sw2_reference()
            # cloud = sd * ref + loc * 1, written as (x - u) / scale
            scale = 1.0 / sd
            centre = np.full(self.dim, loc / math.sqrt(self.dim))
            R = s.radius
            room = max(R - sd * 2.0, 0.0)
            n = np.linalg.norm(centre)
            if n > room:
                centre = centre * (room / n) if n > 0 else centre
            return ScaleShiftCloud(ref, scale, -centre * scale)
        if k in _BALL_KINDS:
            centre = np.full(self.dim, loc / math.sqrt(self.dim))
            z = self.reference() if empirical else self.rng.standard_normal((self.p["particles"], self.dim))
            pts = _clip_points(s, centre + sd * z)
            return ParticleDistributionND(pts, None, s.radius)
        if k in _BIN_KINDS:
            probs = _bin_probs(s, loc, sd, self.p["bins"], self.p["floor"], self.lo, self.hi)
            if k == LossKind.LOG:
                return probs
            return DensityGrid(np.arange(self.p["bins"], dtype=float), np.ones(self.p["bins"]), probs, 1.0 if k == LossKind.BETA2 else None)
        if k == LossKind.SQUARE:
            return float(np.clip(loc, self.lo, self.hi))
        raise ConfigurationError(f"no forecast builder for {k.value}")

    def _sw2_reference(self) -> ParticleDistributionND:
        if self._ref is None:
            z = self.reference()
            self._ref = ParticleDistributionND(z)
        return self._ref

    def outcome(self, point: np.ndarray):
        k, s = self.spec.kind, self.spec
        if k in (LossKind.CRPS, LossKind.OT1D):
            return make_empirical([float(point[0])], domain=(self.lo, self.hi))
        if k == LossKind.MULTIDIM_CRPS:
            axes = [np.linspace(b.l, b.r, self.p["grid"]) for b in s.domain]
            return tensor_cdf_from_particles(point[None, :], None, axes)
        if k in _BALL_KINDS:
            return ParticleDistributionND(point[None, :], None, s.radius)
        if k in _BIN_KINDS:
            j = _bin_of(float(point[0]), self.p["bins"], self.lo, self.hi)
            if k == LossKind.LOG:
                return j
            e = np.zeros(self.p["bins"])
            e[j] = 1.0
            return DensityGrid(np.arange(self.p["bins"], dtype=float), np.ones(self.p["bins"]), e, 1.0 if k == LossKind.BETA2 else None)
        if k == LossKind.SQUARE:
            return float(point[0])
        raise ConfigurationError(f"no outcome builder for {k.value}")


def expert_biases(generator: str, n_experts: int, horizon: int, p: dict) -> np.ndarray:
    """Per-round, per-expert location offsets (shape (T, N)), in units of the domain width."""
    if generator in ("biased-gaussian", "shifted-empirical"):
        b = np.linspace(0.0, p["bias_scale"], n_experts)
        return np.broadcast_to(b, (horizon, n_experts))
    if generator == "adversarial-pair":
        if n_experts != 2:
            raise ConfigurationError("expert_pool: adversarial-pair needs n_experts = 2")
        cut = int(round(p["switch"] * horizon))
        out = np.zeros((horizon, 2))
        out[:cut, 1] = p["bias_scale"]
        out[cut:, 0] = p["bias_scale"]
        return out
    raise ConfigurationError(f"expert_pool.generator must be one of {GENERATORS}, got {generator!r}")


def build_streams(spec: LossSpec, n_experts: int, horizon: int, pool: dict, outcome: dict, seed, base_dir=None):
    """Expert and outcome streams (callables of the round index) for a game."""
    if not isinstance(pool, dict) or not isinstance(outcome, dict):
        raise ConfigurationError("expert_pool and outcome_stream must be objects")
    generator = pool.get("generator")
    p = _params(pool, POOL_PARAMS, "expert_pool", extra=("generator",))
    biases = expert_biases(generator, n_experts, horizon, p)
    root = np.random.SeedSequence(int(seed))
    truth_seq, expert_seq = root.spawn(2)
    if "file" in outcome:
        unknown = set(outcome) - {"file"}
        if unknown:
            raise ConfigurationError(f"outcome_stream: unknown field(s) {sorted(unknown)}")
        path = Path(outcome["file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        stream = outcomes_from_file(spec, path, horizon)
    else:
        gen = outcome.get("generator", "latent-sine")
        if gen != "latent-sine":
            raise ConfigurationError(f"outcome_stream.generator must be 'latent-sine', got {gen!r}")
        stream = latent_outcomes(spec, horizon, outcome, np.random.default_rng(truth_seq))
    builder = ForecastBuilder(spec, p, np.random.default_rng(expert_seq))
    empirical = generator == "shifted-empirical"
    width = builder.hi - builder.lo

    def experts(t):
        if t >= stream.points.shape[0]:
            raise IndexError(t)
        return [builder.forecast(stream.locations[t] + width * biases[t, n], p["spread"], empirical) for n in range(n_experts)]

    def outcomes(t):
        if t >= stream.points.shape[0]:
            raise IndexError(t)
        return builder.outcome(stream.points[t])

    return experts, outcomes
