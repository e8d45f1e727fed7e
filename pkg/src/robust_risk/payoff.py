"""Ordered finite-state payoff space.

Payoffs are 1-D float arrays of length N (one entry per state of nature).
The space is ordered pointwise, normed by the supremum norm, and has the
all-ones vector as order unit. Cones are stored in half-space form: a payoff
belongs to the cone iff every normal has a nonnegative inner product with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

MEMBERSHIP_TOL = 1e-9
INTERIOR_TOL = 1e-7
PROBABILITY_SUM_TOL = 1e-9

Payoff = NDArray[np.float64]


class DimensionError(ValueError):
    """Raised when vectors or matrices have incompatible shapes."""


def _frozen(a: NDArray) -> NDArray:
    a.flags.writeable = False
    return a


def payoff(values: ArrayLike, name: str = "payoff") -> Payoff:
    """Validate and return a read-only float vector."""
    x = np.array(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector, got shape {x.shape}")
    if not np.isfinite(x).all():
        bad = np.flatnonzero(~np.isfinite(x))[0]
        raise ValueError(f"{name}[{bad}] is not finite")
    return _frozen(x)


def probability_vector(weights: ArrayLike, name: str = "probability") -> Payoff:
    """Validate a probability vector (nonnegative, sums to one within 1e-9)."""
    w = np.array(payoff(weights, name))
    neg = np.flatnonzero(w < 0)
    if neg.size:
        raise ValueError(f"{name}[{neg[0]}] = {w[neg[0]]} is negative")
    total = float(w.sum())
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise ValueError(f"{name} sums to {total!r}, expected 1")
    return _frozen(w)


def constant(t: float, n: int) -> Payoff:
    """The payoff t·1 on n states."""
    return _frozen(np.full(n, float(t)))


def sup_norm(x: ArrayLike) -> float:
    return float(np.max(np.abs(payoff(x))))


def is_constant(x: ArrayLike) -> bool:
    x = payoff(x)
    return bool(np.all(x == x[0]))


def _same_length(x: Payoff, y: Payoff) -> None:
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.size} vs {y.size}")


def dominates(x: ArrayLike, y: ArrayLike) -> bool:
    """True iff x_n >= y_n in every state."""
    x, y = payoff(x, "x"), payoff(y, "y")
    _same_length(x, y)
    return bool(np.all(x >= y))


@dataclass(frozen=True)
class Cone:
    """Polyhedral cone {x : a·x >= 0 for every row a of ``normals``}.

    ``unit_pairing`` holds a·1 for each normal. It is computed from the
    normals unless supplied; callers that know the exact value (probability
    normals pair to exactly one with the order unit) pass it in so that
    risk evaluation involves no spurious rounding.
    """

    normals: NDArray[np.float64]
    unit_pairing: Optional[NDArray[np.float64]] = None

    def __post_init__(self) -> None:
        a = np.array(self.normals, dtype=float)
        if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
            raise DimensionError(f"cone normals must be a non-empty matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("cone normals must be finite")
        zero = np.flatnonzero(~np.any(a != 0, axis=1))
        if zero.size:
            raise ValueError(f"cone normal {zero[0]} is zero")
        if self.unit_pairing is None:
            pairing = a.sum(axis=1)
        else:
            pairing = np.array(self.unit_pairing, dtype=float)
            if pairing.shape != (a.shape[0],):
                raise DimensionError("unit_pairing must have one entry per normal")
        object.__setattr__(self, "normals", _frozen(a))
        object.__setattr__(self, "unit_pairing", _frozen(pairing))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def has_order_unit(self) -> bool:
        """True iff 1 is an order unit relative to the cone (a·1 > 0 for all normals)."""
        return bool(np.all(self.unit_pairing > 0))

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64]:
        """Vector of a·x over all normals."""
        x = payoff(x)
        if x.size != self.dim:
            raise DimensionError(f"payoff has {x.size} states, cone lives in dimension {self.dim}")
        return self.normals @ x

    @classmethod
    def positive(cls, n: int) -> "Cone":
        """The positive orthant (pointwise order cone)."""
        return cls(np.eye(n), np.ones(n))

    @classmethod
    def from_normals(cls, normals: Sequence[Sequence[float]]) -> "Cone":
        return cls(np.asarray(normals, dtype=float))


def cone_contains(cone: Cone, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> bool:
    return bool(np.all(cone.evaluate(x) >= -tol))


def cone_interior_contains(cone: Cone, x: ArrayLike, tol: float = INTERIOR_TOL) -> bool:
    """Strict interior test; valid when 1 is an order unit for the cone."""
    if not cone.has_order_unit:
        raise ValueError("interior characterization needs a·1 > 0 for every normal")
    return bool(np.all(cone.evaluate(x) > tol))
