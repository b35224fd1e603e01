"""Probability vectors on a finite alphabet and their information measures.

All information values are in nats.  Terms with zero weight are skipped
rather than evaluated as limits, which gives the usual ``0 ln 0 = 0``
convention exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Dist:
    """A probability vector over the alphabet ``{0, ..., k-1}``.

    The vector is validated on construction and never renormalized
    silently; use :meth:`normalized` to build one from unnormalized weights.
    """

    probs: np.ndarray

    def __init__(self, probs):
        arr = np.array(probs, dtype=float)
        if arr.ndim != 1:
            raise ValidationError(f"probabilities must be a flat vector, got shape {arr.shape}")
        if arr.size < 2:
            raise ValidationError(f"alphabet size must be at least 2, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("probabilities must be finite")
        if np.any(arr < 0):
            bad = int(np.argmax(arr < 0))
            raise ValidationError(f"probability at index {bad} is negative ({arr[bad]!r})")
        total = math.fsum(arr)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"probabilities sum to {total!r}, not 1 within {SUM_TOLERANCE:g}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def normalized(cls, weights) -> Dist:
        """Build a distribution proportional to nonnegative ``weights``."""
        arr = np.asarray(weights, dtype=float)
        total = arr.sum()
        if not total > 0:
            raise ValidationError("weights must have positive total mass")
        return cls(arr / total)

    @classmethod
    def uniform(cls, k: int) -> Dist:
        return cls(np.full(k, 1.0 / k))

    @property
    def k(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0

    def __len__(self):
        return self.probs.size

    def __getitem__(self, i):
        return self.probs[i]

    def __iter__(self):
        return iter(self.probs.tolist())

    def __eq__(self, other):
        if not isinstance(other, Dist):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"Dist({self.probs.tolist()!r})"

    def tolist(self) -> list[float]:
        return self.probs.tolist()


@dataclass(frozen=True)
class InfoValue:
    """An extended-real information quantity in nats.

    Infinity is carried by an explicit flag so that an infinite divergence
    is never confused with a float overflow.  ``float(v)`` gives ``inf``
    for flagged values.
    """

    value: float
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "value", math.inf)
            return
        v = float(self.value)
        if math.isnan(v):
            raise ValidationError("information value is NaN")
        if math.isinf(v):
            raise ValidationError("infinite information value must use InfoValue.infinity()")
        object.__setattr__(self, "value", v)

    @classmethod
    def infinity(cls) -> InfoValue:
        return cls(math.inf, infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Residual:
    """Outcome of an identity check.

    ``value`` is the (possibly signed) discrepancy and ``scale`` the
    magnitude of the largest term involved, so relative checks read
    ``value <= tol * max(1, scale)``.  When both sides of an identity are
    infinite the check is reported as ``matched_infinity`` with value 0.
    """

    value: float
    scale: float = 1.0
    matched_infinity: bool = False

    @property
    def relative(self) -> float:
        return self.value / max(1.0, self.scale)

    def __float__(self):
        return self.value


def _check_pair(q: Dist, p: Dist) -> None:
    if q.k != p.k:
        raise DimensionError(f"alphabet sizes differ: {q.k} vs {p.k}")


def entropy(p: Dist) -> InfoValue:
    """Shannon entropy ``H(p)`` in nats."""
    w = p.probs[p.probs > 0]
    return InfoValue(max(0.0, -math.fsum(w * np.log(w))))


def relative_entropy(q: Dist, p: Dist) -> InfoValue:
    """Relative entropy ``D(q || p)``; infinite when ``q`` is not absolutely continuous w.r.t. ``p``."""
    _check_pair(q, p)
    mask = q.probs > 0
    if np.any(p.probs[mask] == 0):
        return InfoValue.infinity()
    qm, pm = q.probs[mask], p.probs[mask]
    return InfoValue(max(0.0, math.fsum(qm * (np.log(qm) - np.log(pm)))))


def cross_entropy(q: Dist, p: Dist) -> InfoValue:
    """Cross entropy ``H(q, p) = E_q[ln 1/p]``."""
    _check_pair(q, p)
    mask = q.probs > 0
    if np.any(p.probs[mask] == 0):
        return InfoValue.infinity()
    return InfoValue(-math.fsum(q.probs[mask] * np.log(p.probs[mask])))
