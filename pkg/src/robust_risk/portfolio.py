"""Maxmin-utility portfolio selection under a super-replication budget.

    max_{c >= 0}  min_{pi in D} E_pi[c]
    s.t.          inf{ q·h : c <= endowment + Rh } <= wealth

At finite N the infimum is attained, so the budget is the same as asking for
some h with Rh + endowment - c >= 0 and q·h <= wealth. The whole program is
then one LP in (c, h, u) with u below every vertex expectation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import lp
from .market import (
    Market,
    MarketError,
    NumericalError,
    require_arbitrage_free,
    superreplication_price,
)
from .payoff import DimensionError
from .risk import AmbiguitySet, maxmin_utility

FEASIBILITY_TOL = 1e-7
VALUE_TOL = 1e-7


@dataclass(frozen=True)
class Scenario:
    market: Market
    ambiguity: AmbiguitySet

    def __post_init__(self) -> None:
        if self.market.num_states != self.ambiguity.dim:
            raise DimensionError(
                f"market has {self.market.num_states} states, ambiguity set has {self.ambiguity.dim}")


@dataclass(frozen=True)
class OptimizationResult:
    position: NDArray[np.float64]
    portfolio: NDArray[np.float64]
    utility: float
    risk: float
    autarky_utility: float
    lowered_exposure: bool
    lp_value: float


def _program_lp(s: Scenario, form: str) -> lp.LpProblem:
    """LP over (c, h, v); v is the utility (form='utility') or the risk (form='risk')."""
    m, D = s.market, s.ambiguity
    R, q = m.payoff_matrix, m.prices
    n, J, K = m.num_states, m.num_assets, D.size
    nv = n + J + 1
    rows, rel, rhs = [], [], []
    for pi in D.vertices:
        row = np.zeros(nv)
        if form == "utility":
            row[:n] = -pi          # u - pi·c <= 0
            row[-1] = 1.0
            rel.append("<=")
        else:
            row[:n] = pi           # r + pi·c >= 0
            row[-1] = 1.0
            rel.append(">=")
        rows.append(row)
        rhs.append(0.0)
    budget = np.zeros((n, nv))
    budget[:, :n] = -np.eye(n)
    budget[:, n:n + J] = R
    rows.extend(budget)            # Rh - c >= -endowment
    rel.extend([">="] * n)
    rhs.extend(-m.endowment)
    cost = np.zeros(nv)
    cost[n:n + J] = q
    rows.append(cost)              # q·h <= wealth
    rel.append("<=")
    rhs.append(m.wealth)
    c = np.zeros(nv)
    c[-1] = 1.0
    bounds = [(0.0, None)] * n + [(None, None)] * (J + 1)
    return lp.LpProblem.build(c, np.array(rows), rel, rhs, bounds,
                              "max" if form == "utility" else "min")


def _solve_form(s: Scenario, form: str) -> lp.LpSolution:
    sol = lp.solve(_program_lp(s, form))
    if sol.status is lp.Status.NUMERICAL_FAILURE:
        raise NumericalError("portfolio program: LP numerical failure")
    if sol.status is lp.Status.UNBOUNDED:
        raise MarketError("portfolio program is unbounded; market data are inconsistent")
    if sol.status is lp.Status.INFEASIBLE:
        raise MarketError("portfolio program is infeasible; the endowment should always be feasible")
    return sol


def solve_program1(s: Scenario, tol: float = FEASIBILITY_TOL) -> OptimizationResult:
    require_arbitrage_free(s.market)
    m, D = s.market, s.ambiguity
    n, J = m.num_states, m.num_assets
    sol = _solve_form(s, "utility")
    c = np.maximum(sol.x[:n], 0.0)
    h = sol.x[n:n + J].copy()
    u = maxmin_utility(D, c).utility
    autarky = maxmin_utility(D, m.endowment).utility
    risk = -u
    if m.cost_of(h) > m.wealth + tol or np.any(m.payoff_of(h) + m.endowment - c < -tol):
        raise NumericalError("optimal position violates the budget")
    c.flags.writeable = False
    h.flags.writeable = False
    return OptimizationResult(
        position=c,
        portfolio=h,
        utility=u,
        risk=risk,
        autarky_utility=autarky,
        lowered_exposure=risk <= -autarky + tol,
        lp_value=float(sol.objective),
    )


@dataclass(frozen=True)
class PrudenceReport:
    alpha: float
    optimal_utility: float
    constant_cost: float
    feasible: bool
    value_matches: bool

    @property
    def passed(self) -> bool:
        return self.feasible and self.value_matches


def prudence_check(s: Scenario, tol: float = VALUE_TOL) -> PrudenceReport:
    """Under maximal ambiguity, the constant position alpha·1 with alpha = min_n c*_n is optimal."""
    if not s.ambiguity.is_full_simplex():
        raise ValueError("prudence check needs the full simplex as ambiguity set")
    res = solve_program1(s)
    alpha = float(res.position.min())
    n = s.market.num_states
    flat = np.full(n, alpha)
    cost = superreplication_price(s.market, flat).price
    u_flat = maxmin_utility(s.ambiguity, flat).utility
    return PrudenceReport(
        alpha=alpha,
        optimal_utility=res.utility,
        constant_cost=cost,
        feasible=cost <= s.market.wealth + tol,
        value_matches=abs(u_flat - res.utility) <= tol,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    utility_value: float
    risk_value: float
    attained_risk: float

    tol: float = VALUE_TOL

    @property
    def values_negate(self) -> bool:
        return abs(self.utility_value + self.risk_value) <= self.tol

    @property
    def utility_optimum_minimizes_risk(self) -> bool:
        return abs(self.attained_risk - self.risk_value) <= self.tol

    @property
    def passed(self) -> bool:
        return self.values_negate and self.utility_optimum_minimizes_risk


def equivalence_report(s: Scenario, tol: float = VALUE_TOL) -> EquivalenceReport:
    """Solve the program once maximizing utility and once minimizing risk, and compare."""
    require_arbitrage_free(s.market)
    n = s.market.num_states
    util = _solve_form(s, "utility")
    risk = _solve_form(s, "risk")
    c = util.x[:n]
    attained = float(np.max(-(s.ambiguity.vertices @ c)))
    return EquivalenceReport(float(util.objective), float(risk.objective), attained, tol)
