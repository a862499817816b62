"""Scalar and complex losses with their substitution functions.

These are the building blocks that the integral losses apply point by point:
a substitution that satisfies the mixability inequality at every point of a
domain also satisfies it for the integrated loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import as_weights
from .errors import DomainError, InfiniteLossError

FD_STEP = 1e-5
FD_HESSIAN_STEP = 1e-4
EIG_TOL = 1e-6
_BOX_TOL = 1e-12


@dataclass(frozen=True)
class BoundedInterval:
    l: float
    r: float

    def __post_init__(self):
        if not (np.isfinite(self.l) and np.isfinite(self.r)) or not self.l < self.r:
            raise DomainError(f"invalid interval [{self.l}, {self.r}]")

    @property
    def width(self) -> float:
        return self.r - self.l

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.l) & (x <= self.r)))

    def check(self, x, name: str = "value"):
        if not self.contains(x):
            raise DomainError(f"{name} outside [{self.l}, {self.r}]")

    @classmethod
    def of(cls, iv) -> BoundedInterval:
        return iv if isinstance(iv, cls) else cls(float(iv[0]), float(iv[1]))


@dataclass(frozen=True)
class EtaRate:
    """Learning rates at which a loss is mixable and exp-concave."""

    mixable: float
    expconcave: float

    def __post_init__(self):
        if not (self.mixable > 0 and self.expconcave > 0):
            raise DomainError("learning rates must be positive")
        if self.expconcave > self.mixable * (1 + 1e-12):
            raise DomainError("exp-concavity rate cannot exceed the mixability rate")

    def for_mode(self, mode: str) -> float:
        if mode == "mixable":
            return self.mixable
        if mode == "expconcave":
            return self.expconcave
        raise DomainError(f"unknown mode {mode!r}")


def square_loss(g, o, iv=None):
    """``(g - o)^2``; inputs are checked against ``iv`` when given."""
    if iv is not None:
        iv = BoundedInterval.of(iv)
        iv.check(g, "forecast")
        iv.check(o, "outcome")
    d = np.asarray(g, dtype=float) - np.asarray(o, dtype=float)
    out = d * d
    return out if out.ndim else float(out)


def square_substitution(forecasts, w, iv=(0.0, 1.0)):
    """Aggregating-algorithm substitution for the square loss on ``[l, r]``.

    Parameters
    ----------
    forecasts : array_like, shape (N, ...)
        Expert forecasts; any trailing shape is aggregated elementwise.
    w : array_like, shape (N,)
        Expert weights on the simplex.
    iv : BoundedInterval or (l, r)

    Returns
    -------
    Aggregated forecast(s) in ``[l, r]``; mixable at ``eta = 2 / (r - l)^2``.
    """
    iv = BoundedInterval.of(iv)
    w = as_weights(w)
    g = np.asarray(forecasts, dtype=float)
    if g.shape[:1] != w.shape:
        raise DomainError("first axis of forecasts must match the weights")
    iv.check(g, "forecast")
    z_hi = (iv.r - g) / iv.width
    z_lo = (g - iv.l) / iv.width
    b = w.reshape(w.shape + (1,) * (g.ndim - 1))
    log_num = logsumexp(-2.0 * z_hi * z_hi, axis=0, b=b)
    log_den = logsumexp(-2.0 * z_lo * z_lo, axis=0, b=b)
    out = 0.5 * (iv.l + iv.r) + 0.25 * iv.width * (log_num - log_den)
    out = np.clip(out, iv.l, iv.r)
    return out if out.ndim else float(out)


def log_loss(g, k: int) -> float:
    """``-log g[k]`` for a probability vector ``g`` and outcome index ``k``.

    Outcome indices are 0-based. A zero predicted probability raises
    :class:`InfiniteLossError` rather than returning ``inf``.
    """
    g = as_weights(g, "forecast")
    if not 0 <= k < g.size:
        raise DomainError(f"outcome index {k} out of range")
    if g[k] <= 0:
        raise InfiniteLossError(f"zero probability assigned to outcome {k}")
    return float(-np.log(g[k]))


def log_substitution(forecasts, w) -> np.ndarray:
    """Weighted mixture of probability vectors (1-mixable for log loss)."""
    w = as_weights(w)
    g = np.asarray(forecasts, dtype=float)
    if g.ndim != 2 or g.shape[0] != w.size:
        raise DomainError("forecasts must be an (N, K) array matching the weights")
    for row in g:
        as_weights(row, "forecast")
    return w @ g


def complex_square_loss(z, z2):
    """``|z - z2|^2`` for points of the closed unit disc."""
    z = np.asarray(z, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    if np.any(np.abs(z) > 1 + _BOX_TOL) or np.any(np.abs(z2) > 1 + _BOX_TOL):
        raise DomainError("complex square loss is defined on the unit disc")
    d = z - z2
    out = d.real**2 + d.imag**2
    return out if out.ndim else float(out)


def complex_square_substitution(forecasts, w):
    """Componentwise square-loss substitution on ``[-1, 1]`` for Re and Im.

    Mixable at ``eta = 1/4`` for outcomes in the unit disc; forecasts may lie
    anywhere in the square ``[-1, 1]^2``.
    """
    z = np.asarray(forecasts, dtype=complex)
    re = square_substitution(z.real, w, (-1.0, 1.0))
    im = square_substitution(z.imag, w, (-1.0, 1.0))
    out = np.asarray(re) + 1j * np.asarray(im)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# Exp-concavity via the Hessian condition
# ---------------------------------------------------------------------------


def _as_real_vector(g):
    if np.iscomplexobj(g):
        z = complex(np.asarray(g).ravel()[0])
        return np.array([z.real, z.imag]), lambda v: complex(v[0], v[1])
    arr = np.atleast_1d(np.asarray(g, dtype=float))
    if np.ndim(g) == 0:
        return arr, lambda v: float(v[0])
    return arr, lambda v: v


def fd_gradient_hessian(f, x, h=FD_STEP, h2=FD_HESSIAN_STEP):
    """Central finite-difference gradient and Hessian of ``f: R^d -> R``."""
    x = np.asarray(x, dtype=float)
    d = x.size
    eye = np.eye(d)
    grad = np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in eye])
    f0 = f(x)
    hess = np.empty((d, d))
    for i in range(d):
        ei = h2 * eye[i]
        hess[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h2**2
        for j in range(i + 1, d):
            ej = h2 * eye[j]
            v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h2**2)
            hess[i, j] = hess[j, i] = v
    return grad, hess


def expconcavity_hessian_check(loss, eta: float, g, o, tol: float = EIG_TOL) -> bool:
    """Check ``Hess loss - eta * grad grad^T >= 0`` at forecast ``g``.

    ``loss(g, o)`` must accept the same type as ``g`` (float, real vector, or
    complex scalar, the latter differentiated as a point of ``R^2``).
    Derivatives are central finite differences: step ``1e-5`` for the
    gradient, ``1e-4`` for the Hessian. Returns True when the smallest
    eigenvalue is at least ``-tol``.
    """
    x0, unpack = _as_real_vector(g)
    grad, hess = fd_gradient_hessian(lambda v: loss(unpack(v), o), x0)
    m = hess - eta * np.outer(grad, grad)
    return bool(np.linalg.eigvalsh(0.5 * (m + m.T)).min() >= -tol)
