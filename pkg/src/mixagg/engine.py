"""The aggregating algorithm game loop and its regret bookkeeping.

Weights are stored as log-weights and renormalised with log-sum-exp every
round, so games with large cumulative losses never underflow.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.special import logsumexp

from .aggregation import aggregator_for
from .core import as_weights, uniform_weights
from .errors import ConfigurationError, DomainError, InfiniteLossError, StreamExhaustedError, UnsupportedError
from .losses import BoundLoss, LossSpec

TRACE_SCHEMA = "mixagg.trace/1"
CHAIN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GameConfig:
    """Parameters of one game.

    ``prior`` defaults to uniform initial weights. ``seed`` freezes the Monte
    Carlo nodes of sliced and characteristic-function losses.
    """

    loss: LossSpec
    mode: str = "mixable"
    n_experts: int = 1
    horizon: int = 1
    seed: int = 0
    prior: np.ndarray | None = None
    eta: float = field(init=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.n_experts < 1:
            raise ConfigurationError("n_experts must be >= 1")
        try:
            aggregator_for(self.loss, self.mode)
        except UnsupportedError as exc:
            raise ConfigurationError(str(exc)) from None
        prior = uniform_weights(self.n_experts) if self.prior is None else as_weights(self.prior, "prior")
        if prior.size != self.n_experts:
            raise ConfigurationError("prior length differs from n_experts")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "eta", self.loss.eta.for_mode(self.mode))

    def to_dict(self) -> dict:
        return {
            "loss": self.loss.to_dict(),
            "mode": self.mode,
            "n_experts": self.n_experts,
            "horizon": self.horizon,
            "seed": self.seed,
        }


def aa_update_weights(w, losses, eta: float) -> np.ndarray:
    """``w_n * exp(-eta * l_n)``, normalised, computed in log-space."""
    w = as_weights(w)
    losses = np.asarray(losses, dtype=float)
    if losses.shape != w.shape or not np.all(np.isfinite(losses)):
        raise DomainError("need one finite loss per expert")
    with np.errstate(divide="ignore"):
        logw = np.log(w) - eta * losses
    return np.exp(logw - logsumexp(logw))


def mixloss(w, losses, eta: float) -> float:
    """``-(1/eta) log sum_n w_n exp(-eta l_n)``."""
    w = as_weights(w)
    losses = np.asarray(losses, dtype=float)
    if losses.shape != w.shape or not np.all(np.isfinite(losses)):
        raise DomainError("need one finite loss per expert")
    return float(-logsumexp(-eta * losses, b=w) / eta)


@dataclass(frozen=True, eq=False)
class GameTrace:
    """Per-round record of a game.

    ``weights[t]`` are the weights used to aggregate at round ``t`` (before
    that round's update).
    """

    eta: float
    learner_loss: np.ndarray  # (T,)
    mixloss: np.ndarray  # (T,)
    expert_loss: np.ndarray  # (T, N)
    weights: np.ndarray  # (T, N)
    config: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.learner_loss.size

    @property
    def n_experts(self) -> int:
        return self.expert_loss.shape[1]

    @property
    def cumulative_learner_loss(self) -> float:
        return math.fsum(self.learner_loss)

    @property
    def cumulative_expert_loss(self) -> np.ndarray:
        return np.array([math.fsum(col) for col in self.expert_loss.T])

    @property
    def regret(self) -> float:
        return self.cumulative_learner_loss - float(self.cumulative_expert_loss.min())

    @property
    def regret_bound(self) -> float:
        """``min_n(L_n + ln(1/w1_n)/eta) - min_n L_n``; ``ln N / eta`` for a uniform prior."""
        L = self.cumulative_expert_loss
        with np.errstate(divide="ignore"):
            pen = -np.log(self.weights[0]) / self.eta
        return float(np.min(L + pen) - L.min())

    def to_csv(self) -> str:
        N = self.n_experts
        header = ["t", "h_t", "m_t"] + [f"l_t^{n + 1}" for n in range(N)] + [f"w_t^{n + 1}" for n in range(N)]
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for t in range(self.horizon):
            row = [str(t + 1), repr(float(self.learner_loss[t])), repr(float(self.mixloss[t]))]
            row += [repr(float(v)) for v in self.expert_loss[t]]
            row += [repr(float(v)) for v in self.weights[t]]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "config": self.config,
            "eta": self.eta,
            "h": self.learner_loss.tolist(),
            "m": self.mixloss.tolist(),
            "losses": self.expert_loss.tolist(),
            "weights": self.weights.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> GameTrace:
        if data.get("schema") != TRACE_SCHEMA:
            raise ConfigurationError(f"unsupported trace schema {data.get('schema')!r}")
        return cls(
            float(data["eta"]),
            np.asarray(data["h"], dtype=float),
            np.asarray(data["m"], dtype=float),
            np.asarray(data["losses"], dtype=float).reshape(len(data["h"]), -1),
            np.asarray(data["weights"], dtype=float).reshape(len(data["h"]), -1),
            data.get("config", {}),
        )


def _stream(source) -> Callable[[int], object]:
    if callable(source):
        return source
    it = iter(source)
    return lambda t: next(it)


def aa_run(config: GameConfig, experts, outcomes, loss: Callable | None = None, aggregate: Callable | None = None) -> GameTrace:
    """Play ``config.horizon`` rounds of the aggregating algorithm.

    Parameters
    ----------
    config : GameConfig
    experts : iterable or callable
        Yields (or returns for round index ``t``) the list of N forecasts.
    outcomes : iterable or callable
        Yields (or returns for ``t``) the outcome of each round.
    loss, aggregate : callable, optional
        Override the loss ``loss(forecast, outcome)`` and the rule
        ``aggregate(forecasts, w)`` chosen from ``config``.

    Raises
    ------
    StreamExhaustedError
        A stream ended early; ``round`` is the 1-based round that was missing.
    InfiniteLossError
        A loss was infinite; ``round`` and ``expert`` (None for the learner)
        identify where. The game is aborted.
    """
    loss = loss or BoundLoss(config.loss, config.seed)
    aggregate = aggregate or aggregator_for(config.loss, config.mode)
    eta, N, T = config.eta, config.n_experts, config.horizon
    next_forecasts, next_outcome = _stream(experts), _stream(outcomes)
    logw = np.log(np.asarray(config.prior))
    H = np.empty(T)
    Mx = np.empty(T)
    Ls = np.empty((T, N))
    Ws = np.empty((T, N))
    for t in range(T):
        try:
            forecasts = list(next_forecasts(t))
        except (StopIteration, IndexError):
            raise StreamExhaustedError(f"expert stream exhausted at round {t + 1}", t + 1) from None
        if len(forecasts) != N:
            raise ConfigurationError(f"round {t + 1}: expected {N} forecasts, got {len(forecasts)}")
        try:
            outcome = next_outcome(t)
        except (StopIteration, IndexError):
            raise StreamExhaustedError(f"outcome stream exhausted at round {t + 1}", t + 1) from None
        w = np.exp(logw)
        w = w / w.sum()
        learner = aggregate(forecasts, w)
        for n, f in enumerate(forecasts):
            try:
                Ls[t, n] = loss(f, outcome)
            except InfiniteLossError as exc:
                raise InfiniteLossError(f"round {t + 1}, expert {n + 1}: {exc}", expert=n + 1, round=t + 1) from None
        try:
            H[t] = loss(learner, outcome)
        except InfiniteLossError as exc:
            raise InfiniteLossError(f"round {t + 1}, learner: {exc}", expert=None, round=t + 1) from None
        Ws[t] = w
        lse = logsumexp(logw - eta * Ls[t])
        Mx[t] = -lse / eta
        logw = logw - eta * Ls[t] - lse
    return GameTrace(eta, H, Mx, Ls, Ws, config.to_dict())


# ---------------------------------------------------------------------------
# Regret chain verification
# ---------------------------------------------------------------------------


@dataclass
class ChainCheck:
    name: str
    passed: bool
    worst: float
    round: int | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "worst": float(self.worst), "round": self.round}


@dataclass
class RegretReport:
    checks: list
    regret: float
    bound: float
    cumulative_mixloss: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "regret": float(self.regret),
            "bound": float(self.bound),
            "cumulative_mixloss": float(self.cumulative_mixloss),
            "checks": [c.to_dict() for c in self.checks],
        }


def verify_regret_chain(trace: GameTrace, eta: float | None = None, tol: float = CHAIN_TOL) -> RegretReport:
    """Recheck the three links of the regret bound on a finished trace.

    1. ``h_t <= m_t`` every round (the mixability inequality);
    2. ``m_t = M_t - M_{t-1}`` with ``M_t = -(1/eta) log sum_n w1_n exp(-eta L_t^n)``
       recomputed from cumulative losses, hence ``sum_t m_t = M_T``;
    3. ``H_T <= min_n(L_T^n + ln(1/w1_n)/eta)``.

    Violations larger than ``tol`` (scaled by the magnitude of the compared
    quantities) fail and name the first offending round.
    """
    eta = trace.eta if eta is None else eta
    h, m, L, w1 = trace.learner_loss, trace.mixloss, trace.expert_loss, trace.weights[0]
    T = trace.horizon

    gap = h - m
    excess = gap - tol * (1.0 + np.abs(m))
    bad = np.flatnonzero(excess > 0)
    c1 = ChainCheck("learner_below_mixloss", bool(bad.size == 0), float(gap.max()), int(bad[0]) + 1 if bad.size else None)

    cum = np.cumsum(L, axis=0)
    M = -logsumexp(-eta * cum, b=w1[None, :], axis=1) / eta
    steps = np.diff(np.concatenate(([0.0], M)))
    err = np.abs(steps - m)
    scale = 1.0 + np.abs(M)
    bad = np.flatnonzero(err > tol * scale)
    total_err = abs(math.fsum(m) - M[-1])
    ok = bool(bad.size == 0 and total_err <= tol * scale[-1] * max(1.0, math.sqrt(T)))
    c2 = ChainCheck("mixloss_telescopes", ok, float(max(err.max(), total_err)), int(bad[0]) + 1 if bad.size else None)

    H = trace.cumulative_learner_loss
    LT = trace.cumulative_expert_loss
    with np.errstate(divide="ignore"):
        cap = float(np.min(LT - np.log(w1) / eta))
    c3 = ChainCheck("regret_bound", bool(H <= cap + tol * (1.0 + abs(cap))), H - cap, T if H > cap + tol * (1.0 + abs(cap)) else None)
    return RegretReport([c1, c2, c3], trace.regret, cap - float(LT.min()), math.fsum(m))


def run_game(config: GameConfig, experts: Iterable, outcomes: Iterable) -> tuple[GameTrace, RegretReport]:
    trace = aa_run(config, experts, outcomes)
    return trace, verify_regret_chain(trace)
