"""Sampled axiom battery for preferences represented by a utility functional.

The preference is x >= y iff U(x) >= U(y). Completeness and transitivity
hold for any real-valued U and are reported as structural. Continuity is
tested through the stronger 1-Lipschitz bound in the sup norm. The other
axioms are sampled directly. Ties are handled with a tolerance: a relation
is only asserted when the utility gap exceeds ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import lp
from .payoff import DimensionError, cone_contains, probability_vector
from .risk import AmbiguitySet, acceptance_cone, maxmin_utility

AXIOM_TOL = 1e-7
MEMBERSHIP_TOL = 1e-9
WITNESS_BOX = 10.0

Utility = Callable[[NDArray[np.float64]], float]

AXIOMS = (
    "A1_completeness_transitivity",
    "A2_certainty_independence",
    "A3_continuity",
    "A4a_monotonicity",
    "A4b_uniform_monotonicity",
    "A5_uncertainty_aversion",
    "A6_risk_perception",
)


def _plain(v):
    return np.asarray(v).tolist() if isinstance(v, np.ndarray) else v


@dataclass
class AxiomResult:
    status: str = "pass"
    trials: int = 0
    skipped: int = 0
    counterexample: Optional[dict] = None

    def fail(self, **witness) -> None:
        if self.status != "fail":
            self.status = "fail"
            self.counterexample = {k: _plain(v) for k, v in witness.items()}


@dataclass
class AxiomReport:
    n: int
    trials: int
    seed: int
    tol: float
    axioms: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.axioms.values())

    def failed(self) -> list[str]:
        return [k for k, r in self.axioms.items() if r.status == "fail"]


def _indifferent_copy(U: Utility, x: NDArray, y0: NDArray, tol: float) -> Optional[NDArray]:
    """Shift y0 by cash so that U(y) = U(x); falls back to bisection on the shift."""
    one = np.ones_like(x)
    target = U(x)
    t = target - U(y0)
    if abs(U(y0 + t * one) - target) <= tol:
        return y0 + t * one
    lo, hi = t - 1.0, t + 1.0
    for _ in range(60):
        if U(y0 + lo * one) <= target:
            break
        lo -= 2.0 * (hi - lo)
    for _ in range(60):
        if U(y0 + hi * one) >= target:
            break
        hi += 2.0 * (hi - lo)
    if not (U(y0 + lo * one) <= target <= U(y0 + hi * one)):
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if U(y0 + mid * one) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    y = y0 + hi * one
    return y if abs(U(y) - target) <= tol else None


def run_axiom_battery(
    D: AmbiguitySet,
    n: Optional[int] = None,
    trials: int = 1000,
    seed: int = 0,
    utility: Optional[Utility] = None,
    tol: float = AXIOM_TOL,
) -> AxiomReport:
    """Sample the axioms for U (default: the maxmin utility over D).

    ``utility`` replaces U while keeping D as the reference ambiguity set
    for the risk-perception axiom; this is how planted violators are run.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = D.dim if n is None else n
    if n != D.dim:
        raise DimensionError(f"n = {n} but the ambiguity set has {D.dim} states")
    U = utility if utility is not None else (lambda z: maxmin_utility(D, z).utility)
    P = acceptance_cone(D)
    rng = np.random.default_rng(seed)
    one = np.ones(n)
    report = AxiomReport(n, trials, seed, tol, {name: AxiomResult() for name in AXIOMS})
    ax = report.axioms
    ax["A1_completeness_transitivity"].status = "structural"

    for _ in range(trials):
        x = rng.uniform(-10, 10, n)
        y = rng.uniform(-10, 10, n)
        alpha = rng.uniform(0.01, 0.99)
        h = rng.uniform(-10, 10)
        noise = np.abs(rng.normal(0.0, 3.0, n))
        eps = rng.uniform(1e-3, 1.0)
        step = 10.0 ** rng.uniform(-4, 1) * rng.normal(size=n)
        boundary = rng.uniform() < 1 / 3
        ux, uy = U(x), U(y)

        # A.2: x >= y iff alpha x + (1-alpha) h1 >= alpha y + (1-alpha) h1.
        # Whenever either gap is decisive, both must carry the same sign.
        xm, ym = alpha * x + (1 - alpha) * h * one, alpha * y + (1 - alpha) * h * one
        d, dm = ux - uy, U(xm) - U(ym)
        r = ax["A2_certainty_independence"]
        if (abs(d) > tol or abs(dm) > tol) and np.sign(d) != np.sign(dm):
            r.fail(x=x, y=y, alpha=alpha, h=h, gap=d, mixed_gap=dm)
        r.trials += 1

        # A.3 via the Lipschitz surrogate
        z = x + step
        r = ax["A3_continuity"]
        if abs(ux - U(z)) > np.max(np.abs(step)) + tol:
            r.fail(x=x, y=z, gap=abs(ux - U(z)), distance=float(np.max(np.abs(step))))
        r.trials += 1

        # A.4(a): pointwise dominance gives weak preference
        below = x - noise
        r = ax["A4a_monotonicity"]
        if U(below) > ux + tol:
            r.fail(x=x, y=below)
        r.trials += 1

        # A.4(b): uniform dominance by eps gives strict preference
        strictly_below = x - eps - noise
        r = ax["A4b_uniform_monotonicity"]
        if not ux > U(strictly_below):
            r.fail(x=x, y=strictly_below, eps=eps)
        r.trials += 1

        # A.5: indifferent pair, mixture weakly preferred
        r = ax["A5_uncertainty_aversion"]
        yi = _indifferent_copy(U, x, y, tol)
        if yi is None:
            r.skipped += 1
        elif U(alpha * x + (1 - alpha) * yi) < ux - tol:
            r.fail(x=x, y=yi, alpha=alpha)
        r.trials += 1

        # A.6: upper contour set of 0 equals the acceptance cone of D
        w = x - maxmin_utility(D, x).utility * one if boundary else x
        r = ax["A6_risk_perception"]
        if (U(w) >= -MEMBERSHIP_TOL) != cone_contains(P, w, MEMBERSHIP_TOL):
            r.fail(x=w, utility=U(w))
        r.trials += 1
    return report


# Planted violators used to check that the battery surfaces counterexamples.

def quadratic_perturbation(D: AmbiguitySet, weight: float = 0.01) -> Utility:
    """min_pi E_pi[x] + weight·|x|^2; breaks degree-one scaling, hence certainty independence."""
    return lambda x: maxmin_utility(D, x).utility + weight * float(x @ x)


def single_prior(pi_hat: ArrayLike) -> Utility:
    """Plain expectation under one prior outside D; satisfies A.1-A.5 but not risk perception."""
    pi = probability_vector(pi_hat, "pi_hat")
    return lambda x: float(pi @ x)


def maxmax(D: AmbiguitySet) -> Utility:
    """Best-case expectation over D; ambiguity loving, so uncertainty aversion fails."""
    return lambda x: float(np.max(D.expectations(x)))


class InsideHullError(ValueError):
    """The candidate prior lies in the ambiguity set, so no witness can exist."""


@dataclass(frozen=True)
class Claim1Witness:
    payoff: NDArray[np.float64]
    pi_hat_value: float
    worst_value: float


def claim1_witness(D: AmbiguitySet, pi_hat: ArrayLike) -> Claim1Witness:
    """Payoff rejected under D yet with nonnegative expectation under pi_hat.

    Solves for x with pi_hat·x >= 0 and pi·x <= -1 at every vertex pi of D
    (a separating direction, feasible exactly when pi_hat is outside the
    hull), inside a sup-norm box that is doubled once if too small.
    """
    pi = probability_vector(pi_hat, "pi_hat")
    if pi.size != D.dim:
        raise DimensionError(f"pi_hat has {pi.size} states, ambiguity set has {D.dim}")
    if D.contains(pi):
        raise InsideHullError("pi_hat lies in the ambiguity set; no witness exists")
    n = D.dim
    A = np.vstack([pi[None, :], D.vertices])
    rel = [">="] + ["<="] * D.size
    b = np.concatenate([[0.0], -np.ones(D.size)])
    for box in (WITNESS_BOX, 2 * WITNESS_BOX):
        sol = lp.solve(lp.LpProblem.build(pi, A, rel, b, [(-box, box)] * n, "max"))
        if sol.status is lp.Status.NUMERICAL_FAILURE:
            raise ArithmeticError("witness LP failed")
        if sol.is_optimal:
            x = sol.x.copy()
            x.flags.writeable = False
            return Claim1Witness(x, float(pi @ x), maxmin_utility(D, x).utility)
    raise ValueError(f"no witness within sup-norm {2 * WITNESS_BOX}")
