"""Utility-based shortfall risk, classical and distributionally robust.

    SR(x) = inf{ t : max_{pi in D} E_pi[ l(-x - t) ] <= lam }

The worst-case expected loss g(t) is non-increasing in t because the loss l
is non-decreasing, so the infimum is found by bisecting on the predicate
g(t) <= lam. Identity loss has the closed form max_pi E_pi[-x] - lam.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .payoff import DimensionError, payoff, sup_norm
from .risk import AmbiguitySet, acceptance_cone, rho_crm

DEFAULT_TOL = 1e-9
MAX_EXPANSIONS = 200
LOSS_KINDS = ("identity", "linear", "exponential", "positive_part")


class ShortfallRangeError(ValueError):
    """The threshold is outside what the worst-case expected loss can reach."""


@dataclass(frozen=True)
class LossFunction:
    kind: str = "identity"
    slope: float = 1.0
    intercept: float = 0.0
    rate: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}; expected one of {LOSS_KINDS}")
        if self.kind == "linear" and not self.slope > 0:
            raise ValueError("linear loss needs slope > 0")
        if self.kind == "exponential" and not self.rate > 0:
            raise ValueError("exponential loss needs rate > 0")

    def __call__(self, z: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.kind == "identity":
            return z
        if self.kind == "linear":
            return self.slope * z + self.intercept
        if self.kind == "exponential":
            return np.expm1(self.rate * z)
        return np.maximum(z, 0.0)

    @property
    def strictly_increasing(self) -> bool:
        return self.kind != "positive_part"

    @property
    def infimum(self) -> float:
        """Greatest lower bound of the loss over the real line."""
        if self.kind == "exponential":
            return -1.0
        if self.kind == "positive_part":
            return 0.0
        return -np.inf

    def to_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "slope": self.slope, "intercept": self.intercept}
        if self.kind == "exponential":
            return {"kind": "exponential", "rate": self.rate}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "LossFunction":
        kind = d.get("kind", "identity")
        if kind == "linear":
            return cls(kind, slope=float(d["slope"]), intercept=float(d.get("intercept", 0.0)))
        if kind == "exponential":
            return cls(kind, rate=float(d["rate"]))
        return cls(kind)


@dataclass(frozen=True)
class SrSpec:
    loss: LossFunction
    threshold: float
    ambiguity: AmbiguitySet


def worst_expected_loss(spec: SrSpec, x: ArrayLike, t: float) -> float:
    """g(t) = max over vertices of E_pi[l(-x - t)]."""
    with np.errstate(over="ignore"):
        losses = spec.loss(-payoff(x) - t)
    return float(np.max(spec.ambiguity.vertices @ losses))


def shortfall_risk(spec: SrSpec, x: ArrayLike, tol: float = DEFAULT_TOL) -> float:
    x = payoff(x)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if x.size != spec.ambiguity.dim:
        raise DimensionError(f"payoff has {x.size} states, ambiguity set has {spec.ambiguity.dim}")
    lam = spec.threshold
    if spec.loss.kind == "identity":
        return float(np.max(spec.ambiguity.vertices @ -x)) - lam
    if lam < spec.loss.infimum:
        raise ShortfallRangeError(f"threshold {lam} is below the loss infimum {spec.loss.infimum}")

    def accepted(t: float) -> bool:
        return worst_expected_loss(spec, x, t) <= lam

    width = sup_norm(x) + 1.0
    lo, hi = -width, width
    for _ in range(MAX_EXPANSIONS):
        if not accepted(lo):
            break
        lo *= 2.0
    else:
        raise ShortfallRangeError(f"threshold {lam} is never exceeded; no finite shortfall risk")
    for _ in range(MAX_EXPANSIONS):
        if accepted(hi):
            break
        hi *= 2.0
    else:
        raise ShortfallRangeError(f"threshold {lam} is never reached; no finite shortfall risk")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if accepted(mid):
            hi = mid
        else:
            lo = mid
    return hi


def sr_equals_rho_check(D: AmbiguitySet, x: ArrayLike, tol: float = 1e-7) -> bool:
    """Identity loss at threshold zero reproduces the acceptance-cone risk measure."""
    sr = shortfall_risk(SrSpec(LossFunction("identity"), 0.0, D), x)
    return abs(sr - rho_crm(acceptance_cone(D), x)) <= tol


def bisected_identity_sr(D: AmbiguitySet, x: ArrayLike, threshold: float = 0.0,
                         tol: float = DEFAULT_TOL) -> float:
    """Identity-loss SR computed by bisection instead of the closed form.

    Same objective written as a linear loss with unit slope, which routes it
    through the root finder; used to cross-check the closed form.
    """
    return shortfall_risk(SrSpec(LossFunction("linear", 1.0, 0.0), threshold, D), x, tol)


def describe(spec: SrSpec) -> dict:
    out = {"loss": spec.loss.to_dict(), "lambda": spec.threshold}
    if not spec.loss.strictly_increasing:
        out["note"] = "loss is non-decreasing but not strictly increasing"
    return out
