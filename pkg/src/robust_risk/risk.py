"""Maxmin utility, the induced coherent risk measure, and a coherence battery.

An ambiguity set is the convex hull of finitely many probability vectors.
Because an expectation is linear in the measure, the worst case over the
hull is attained at a vertex, so every quantity here is a finite max/min.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import lp
from .payoff import (
    MEMBERSHIP_TOL,
    Cone,
    DimensionError,
    payoff,
    probability_vector,
)

COHERENCE_TOL = 1e-7


@dataclass(frozen=True)
class AmbiguitySet:
    """Convex hull of the rows of ``vertices`` (each a probability vector)."""

    vertices: NDArray[np.float64]

    def __post_init__(self) -> None:
        rows = np.array(self.vertices, dtype=float)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise DimensionError("an ambiguity set needs at least one vertex")
        checked = np.array([probability_vector(v, f"ambiguity[{k}]") for k, v in enumerate(rows)])
        checked.flags.writeable = False
        object.__setattr__(self, "vertices", checked)

    @classmethod
    def simplex(cls, n: int) -> "AmbiguitySet":
        """All probability measures on n states (maximal ambiguity)."""
        return cls(np.eye(n))

    @classmethod
    def singleton(cls, weights: ArrayLike) -> "AmbiguitySet":
        return cls(np.asarray(weights, dtype=float)[None, :])

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def size(self) -> int:
        return self.vertices.shape[0]

    def is_full_simplex(self) -> bool:
        """True iff every unit mass is a vertex, i.e. the hull is the whole simplex."""
        units = np.eye(self.dim)
        return all(np.any(np.all(self.vertices == u, axis=1)) for u in units)

    def contains(self, weights: ArrayLike) -> bool:
        """Hull membership, decided by an LP feasibility problem over the mixing weights."""
        pi = probability_vector(weights, "pi")
        if pi.size != self.dim:
            raise DimensionError(f"measure has {pi.size} states, ambiguity set has {self.dim}")
        K = self.size
        A = np.vstack([self.vertices.T, np.ones((1, K))])
        b = np.append(pi, 1.0)
        sol = lp.solve(lp.LpProblem.build(np.zeros(K), A, ["="] * (self.dim + 1), b))
        if sol.status is lp.Status.NUMERICAL_FAILURE:
            raise ArithmeticError("hull membership LP failed")
        return sol.is_optimal

    def expectations(self, x: ArrayLike) -> NDArray[np.float64]:
        x = payoff(x)
        if x.size != self.dim:
            raise DimensionError(f"payoff has {x.size} states, ambiguity set has {self.dim}")
        return self.vertices @ x


@dataclass(frozen=True)
class RiskReport:
    value: float
    utility: float
    argmin_vertex: int
    acceptable: bool


def maxmin_utility(D: AmbiguitySet, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> RiskReport:
    """Worst-case expectation of x over D, with the matching risk number -U(x)."""
    e = D.expectations(x)
    k = int(e.argmin())
    u = float(e[k])
    return RiskReport(value=-u, utility=u, argmin_vertex=k, acceptable=-u <= tol)


def acceptance_cone(D: AmbiguitySet) -> Cone:
    """{x : E_pi[x] >= 0 for every pi in D}; the vertex inequalities suffice."""
    return Cone(D.vertices, np.ones(D.size))


def rho_crm(P: Cone, x: ArrayLike) -> float:
    """inf{t : x + t·1 in P}, in closed form max_a (-a·x)/(a·1)."""
    if not P.has_order_unit:
        raise ValueError("1 is not an order unit for this cone (some normal has a·1 <= 0)")
    return float(np.max(-P.evaluate(x) / P.unit_pairing))


@dataclass
class PropertyResult:
    name: str
    passed: bool = True
    trials: int = 0
    counterexample: Optional[dict] = None

    def fail(self, **witness) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = {
                k: (np.asarray(v).tolist() if isinstance(v, np.ndarray) else v)
                for k, v in witness.items()
            }


@dataclass
class CoherenceReport:
    n: int
    trials: int
    seed: int
    tol: float
    properties: dict[str, PropertyResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties.values())

    def failed(self) -> list[str]:
        return [name for name, p in self.properties.items() if not p.passed]


def check_coherence(
    rho: Callable[[NDArray[np.float64]], float],
    n: int,
    trials: int = 1000,
    seed: int = 0,
    tol: float = COHERENCE_TOL,
) -> CoherenceReport:
    """Sample the four coherence properties of a black-box risk functional.

    Payoffs are uniform on [-10, 10]^n. Each trial draws, in this order:
    x, y, a half-normal shift for the dominated pair, a cash amount t in
    [-10, 10] and a scale lam in [0, 10]. The draw order is fixed so any
    counterexample replays from ``seed``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    one = np.ones(n)
    report = CoherenceReport(n, trials, seed, tol)
    mono = report.properties.setdefault("monotonicity", PropertyResult("monotonicity"))
    cash = report.properties.setdefault("cash_invariance", PropertyResult("cash_invariance"))
    sub = report.properties.setdefault("subadditivity", PropertyResult("subadditivity"))
    hom = report.properties.setdefault("positive_homogeneity", PropertyResult("positive_homogeneity"))
    for _ in range(trials):
        x = rng.uniform(-10, 10, n)
        y = rng.uniform(-10, 10, n)
        shift = np.abs(rng.normal(0.0, 3.0, n))
        t = rng.uniform(-10, 10)
        lam = rng.uniform(0, 10)
        rx = rho(x)

        lower = x - shift
        if not rx <= rho(lower) + tol:
            mono.fail(x=x, y=lower)
        mono.trials += 1

        lhs, rhs = rho(x + t * one), rx - t
        if abs(lhs - rhs) > tol:
            cash.fail(x=x, t=t, lhs=lhs, rhs=rhs)
        cash.trials += 1

        if not rho(x + y) <= rx + rho(y) + tol:
            sub.fail(x=x, y=y)
        sub.trials += 1

        lhs, rhs = rho(lam * x), lam * rx
        if abs(lhs - rhs) > tol:
            hom.fail(x=x, lam=lam, lhs=lhs, rhs=rhs)
        hom.trials += 1
    return report
