"""Brute-force verifiers for the inequalities and identities the library relies on.

Nothing in here is used by the game loop; these are independent checks for
tests, the acceptance suite and the ``verify`` command.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .core import as_weights
from .errors import DomainError
from .pointwise import BoundedInterval

SLACK_TOL = 1e-9
MAX_BRUTEFORCE = 8
MAX_LP_SUPPORT = 64


class _Report:
    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Mixability
# ---------------------------------------------------------------------------


@dataclass
class MixabilityResult(_Report):
    passed: bool
    worst_slack: float
    worst_outcome: int
    n_outcomes: int


def mixability_slacks(loss: Callable, aggregate, forecasts: Sequence, w, eta: float, outcomes: Sequence) -> np.ndarray:
    """``exp(-eta loss(agg, o)) - sum_n w_n exp(-eta loss(f_n, o))`` per outcome."""
    w = as_weights(w)
    out = np.empty(len(outcomes))
    for j, o in enumerate(outcomes):
        lhs = math.exp(-eta * loss(aggregate, o))
        rhs = float(np.dot(w, np.exp(-eta * np.array([loss(f, o) for f in forecasts]))))
        out[j] = lhs - rhs
    return out


def check_mixability(loss: Callable, aggregate, forecasts: Sequence, w, eta: float, outcomes: Sequence, tol: float = SLACK_TOL) -> MixabilityResult:
    """Check the mixability inequality of ``aggregate`` against every outcome.

    Returns the smallest slack ``LHS - RHS`` and the index of the outcome
    attaining it; passes iff that slack is at least ``-tol``.
    """
    if len(outcomes) == 0:
        return MixabilityResult(True, math.inf, -1, 0)
    s = mixability_slacks(loss, aggregate, forecasts, w, eta, outcomes)
    j = int(np.argmin(s))
    return MixabilityResult(bool(s[j] >= -tol), float(s[j]), j, len(outcomes))


# ---------------------------------------------------------------------------
# Generalised Hoelder inequality on finite measure spaces
# ---------------------------------------------------------------------------


@dataclass
class HolderResult(_Report):
    passed: bool
    gap: float
    lhs: float
    rhs: float


def check_holder(f, u, v, nu, tol: float = SLACK_TOL) -> HolderResult:
    """Both sides of the generalised Hoelder inequality as finite sums.

    ``f`` has shape (|X|, |Y|) and is strictly positive; ``u`` are the
    combined X-weights ``u(x) mu(x)`` (summing to one); ``v`` and ``nu`` are
    the Y-weight function and Y-measure. Checks::

        sum_y exp(sum_x u_x log f(x, y)) v_y nu_y
            <= exp(sum_x u_x log(sum_y f(x, y) v_y nu_y))
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or np.any(~(f > 0)):
        raise DomainError("f must be a strictly positive matrix")
    u = as_weights(u, "u")
    v = np.asarray(v, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if u.size != f.shape[0] or v.shape != (f.shape[1],) or nu.shape != (f.shape[1],):
        raise DomainError("weight shapes do not match f")
    if np.any(v < 0) or np.any(nu < 0):
        raise DomainError("v and nu must be nonnegative")
    logf = np.log(f)
    vn = v * nu
    lhs = float(np.dot(np.exp(u @ logf), vn))
    with np.errstate(divide="ignore"):
        inner = logsumexp(logf, axis=1, b=np.broadcast_to(vn, f.shape))
    rhs = float(np.exp(np.dot(u, inner)))
    gap = rhs - lhs
    return HolderResult(bool(gap >= -tol * max(1.0, rhs)), gap, lhs, rhs)


# ---------------------------------------------------------------------------
# Discrete optimal transport
# ---------------------------------------------------------------------------


def _square(x, y):
    return (x - y) ** 2


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def discrete_ot_bruteforce(xs, ys, cost: Callable | None = None) -> float:
    """Optimal cost between equal-weight empirical laws by enumerating all n! matchings."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    n = xs.size
    if ys.size != n or n == 0:
        raise DomainError("need two samples of the same positive size")
    if n > MAX_BRUTEFORCE:
        raise DomainError(f"brute force is limited to n <= {MAX_BRUTEFORCE}; use discrete_ot_lp")
    C = (cost or _square)(xs[:, None], ys[None, :])
    perms = _permutations(n)
    totals = C[np.arange(n)[None, :], perms].sum(axis=1)
    return float(totals.min() / n)


def _tree_path(basis, m: int, n: int, start_col: int, end_row: int) -> list:
    """Cells on the basis-tree path from column ``start_col`` to row ``end_row``."""
    adj: dict = {}
    for cell in basis:
        i, j = cell
        adj.setdefault(("r", i), []).append((("c", j), cell))
        adj.setdefault(("c", j), []).append((("r", i), cell))
    start, goal = ("c", start_col), ("r", end_row)
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for nxt, cell in adj.get(node, ()):
            if nxt not in parent:
                parent[nxt] = (node, cell)
                stack.append(nxt)
    path = []
    node = goal
    while parent[node] is not None:
        node, cell = parent[node]
        path.append(cell)
    return path[::-1]


def transportation_simplex(a, b, C, max_iter: int = 100_000):
    """Optimal plan of the balanced transportation problem ``min <C, P>``.

    Northwest-corner start, MODI potentials and Bland's entering rule.
    Returns ``(cost, plan)``.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    C = np.asarray(C, dtype=float)
    m, n = C.shape
    X = np.zeros((m, n))
    basis = []
    ra, rb = a.copy(), b.copy()
    i = j = 0
    while True:
        q = max(min(ra[i], rb[j]), 0.0)
        X[i, j] = q
        basis.append((i, j))
        ra[i] -= q
        rb[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    scale = max(1.0, float(np.abs(C).max()))
    for _ in range(max_iter):
        # potentials from u_i + v_j = C_ij on the basis tree
        u = np.full(m, np.nan)
        v = np.full(n, np.nan)
        u[0] = 0.0
        pending = list(basis)
        while pending:
            rest = []
            for (i, j) in pending:
                if not np.isnan(u[i]):
                    v[j] = C[i, j] - u[i]
                elif not np.isnan(v[j]):
                    u[i] = C[i, j] - v[j]
                else:
                    rest.append((i, j))
            if len(rest) == len(pending):
                raise DomainError("degenerate basis is not a spanning tree")
            pending = rest
        reduced = C - u[:, None] - v[None, :]
        neg = np.argwhere(reduced < -1e-12 * scale)
        if neg.size == 0:
            return float(np.sum(C * X)), X
        ei, ej = (int(k) for k in neg[0])
        path = _tree_path(basis, m, n, ej, ei)
        minus = path[0::2]
        plus = path[1::2]
        theta = min(X[c] for c in minus)
        leaving = min(c for c in minus if X[c] == theta)
        for c in minus:
            X[c] = max(X[c] - theta, 0.0)
        for c in plus:
            X[c] += theta
        X[ei, ej] += theta
        basis.remove(leaving)
        basis.append((ei, ej))
    raise DomainError("transportation simplex did not converge")


def discrete_ot_lp(xs, ws, ys, vs, cost: Callable | None = None) -> float:
    """Exact optimal transport cost between two weighted discrete laws."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size > MAX_LP_SUPPORT or ys.size > MAX_LP_SUPPORT:
        raise DomainError(f"supports are limited to {MAX_LP_SUPPORT} points")
    ws = as_weights(ws, "source weights")
    vs = as_weights(vs, "target weights")
    if ws.size != xs.size or vs.size != ys.size:
        raise DomainError("one weight per support point expected")
    C = (cost or _square)(xs[:, None], ys[None, :])
    total, _ = transportation_simplex(ws, vs, C)
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# Monte Carlo integration
# ---------------------------------------------------------------------------


@dataclass
class MCEstimate(_Report):
    estimate: float
    std_error: float
    samples: int


def sample_sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_gaussian(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.standard_normal((n, dim))


_SAMPLERS = {"sphere": sample_sphere, "gaussian": sample_gaussian}


def mc_integrate(fn: Callable, samples: int, seed=0, dim: int = 2, sampler="sphere") -> MCEstimate:
    """Sample mean and standard error of ``fn`` under a sampling law.

    ``fn`` maps an (n, dim) array of draws to n values. ``sampler`` is
    ``"sphere"`` (uniform unit vectors), ``"gaussian"`` (standard normal) or
    a callable ``(rng, n, dim) -> draws``.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    draw = _SAMPLERS[sampler] if isinstance(sampler, str) else sampler
    rng = np.random.default_rng(seed)
    vals = np.asarray(fn(draw(rng, samples, dim)), dtype=float)
    if np.all(vals == vals[0]):
        return MCEstimate(float(vals[0]), 0.0, samples)
    return MCEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), samples)


# ---------------------------------------------------------------------------
# Sharpness of mixability rates
# ---------------------------------------------------------------------------


@dataclass
class ViolationSearch(_Report):
    eta: float
    found: bool
    trials_used: int
    budget: int
    forecasts: list
    weights: list
    best_slack: float
    note: str


def search_square_loss_violation(
    eta: float,
    interval=(0.0, 1.0),
    trials: int = 100_000,
    outcome_points: int = 1000,
    candidate_points: int = 2001,
    seed=0,
) -> ViolationSearch:
    """Random search for square-loss instances that no aggregate can satisfy.

    Each trial draws two forecasts (each an end point with probability 1/2,
    uniform otherwise) and random weights. The instance is a certified
    violation when, for every candidate aggregate on a fine grid, some
    outcome on the sweep breaks the mixability inequality by more than the
    grid's Lipschitz allowance, so no aggregate between grid points can
    rescue it. Absence of a violation is reported, never claimed as proof.
    """
    iv = BoundedInterval.of(interval)
    rng = np.random.default_rng(seed)
    omega = np.linspace(iv.l, iv.r, outcome_points)
    cand = np.linspace(iv.l, iv.r, candidate_points)
    lhs = np.exp(-eta * (cand[:, None] - omega[None, :]) ** 2)
    # |d/dg exp(-eta (g - o)^2)| <= sqrt(2 eta / e)
    allowance = math.sqrt(2.0 * eta / math.e) * 0.5 * (cand[1] - cand[0])
    best = -math.inf
    for trial in range(1, trials + 1):
        ends = rng.random(2) < 0.5
        g = np.where(ends, np.where(rng.random(2) < 0.5, iv.l, iv.r), rng.uniform(iv.l, iv.r, 2))
        w = rng.dirichlet([1.0, 1.0])
        rhs = w @ np.exp(-eta * (g[:, None] - omega[None, :]) ** 2)
        slack = float((lhs - rhs[None, :]).min(axis=1).max())
        best = max(best, slack)
        if slack + allowance < -SLACK_TOL:
            return ViolationSearch(eta, True, trial, trials, g.tolist(), w.tolist(), slack, "certified violation")
    return ViolationSearch(eta, False, trials, trials, [], [], best, "no violation found within the budget")
