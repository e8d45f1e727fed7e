"""Two-period asset market: arbitrage detection, valuation bound, super-replication.

The payoff matrix R is N×J; column j is the state-contingent payoff of one
unit of asset j and ``prices[j]`` its cost today. Portfolios are unrestricted
real vectors (short sales allowed).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import lp
from .payoff import DimensionError, payoff

STRICTNESS_TOL = 1e-8
CERTIFICATE_RESIDUAL = 1e-7
WITNESS_TOL = 1e-9


class MarketError(ValueError):
    """Inconsistent market data (shapes, missing order unit, empty valuation set)."""


class ArbitrageError(Exception):
    """An operation that requires arbitrage-free prices met a market with arbitrage."""


class NumericalError(ArithmeticError):
    """An LP could not be solved to certified accuracy."""


def _checked(sol: lp.LpSolution, what: str) -> lp.LpSolution:
    if sol.status is lp.Status.NUMERICAL_FAILURE:
        raise NumericalError(f"{what}: LP numerical failure")
    return sol


@dataclass(frozen=True)
class Market:
    payoff_matrix: NDArray[np.float64]
    prices: NDArray[np.float64]
    endowment: NDArray[np.float64]
    wealth: float
    bond_column: Optional[int] = None
    unit_portfolio: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        R = np.array(self.payoff_matrix, dtype=float)
        if R.ndim != 2 or R.size == 0:
            raise DimensionError(f"payoff_matrix must be a non-empty N×J matrix, got shape {R.shape}")
        if not np.all(np.isfinite(R)):
            i, j = np.argwhere(~np.isfinite(R))[0]
            raise ValueError(f"payoff_matrix[{i}][{j}] is not finite")
        n, J = R.shape
        q = payoff(self.prices, "prices")
        if q.size != J:
            raise DimensionError(f"prices has {q.size} entries, payoff_matrix has {J} assets")
        w = payoff(self.endowment, "endowment")
        if w.size != n:
            raise DimensionError(f"endowment has {w.size} states, payoff_matrix has {n}")
        neg = np.flatnonzero(w < 0)
        if neg.size:
            raise MarketError(f"endowment[{neg[0]}] is negative")
        if not np.isfinite(self.wealth) or self.wealth < 0:
            raise MarketError(f"wealth must be a finite nonnegative number, got {self.wealth}")
        R.flags.writeable = False
        object.__setattr__(self, "payoff_matrix", R)
        object.__setattr__(self, "prices", q)
        object.__setattr__(self, "endowment", w)
        object.__setattr__(self, "wealth", float(self.wealth))

        if self.bond_column is not None:
            if not 0 <= self.bond_column < J:
                raise MarketError(f"bond_column {self.bond_column} out of range for {J} assets")
            if not np.all(R[:, self.bond_column] == 1.0):
                raise MarketError(f"bond_column {self.bond_column} is not the all-ones payoff")
            h = np.zeros(J)
            h[self.bond_column] = 1.0
        else:
            sol = _checked(lp.solve(lp.LpProblem.build(
                np.zeros(J), R, ["="] * n, np.ones(n), [(None, None)] * J)), "order-unit check")
            if not sol.is_optimal:
                raise MarketError("no portfolio replicates the riskless payoff 1; order unit missing")
            h = sol.x
        h.flags.writeable = False
        object.__setattr__(self, "unit_portfolio", h)

    @property
    def num_states(self) -> int:
        return self.payoff_matrix.shape[0]

    @property
    def num_assets(self) -> int:
        return self.payoff_matrix.shape[1]

    def unmet_assumptions(self) -> list[str]:
        """Standing assumptions of the model that this market does not satisfy.

        A zero endowment or zero initial wealth is accepted (many textbook
        cases use them) but is reported here.
        """
        out = []
        if not np.any(self.endowment > 0):
            out.append("endowment is zero")
        if not self.wealth > 0:
            out.append("initial wealth is not positive")
        return out

    def payoff_of(self, h: ArrayLike) -> NDArray[np.float64]:
        return self.payoff_matrix @ np.asarray(h, dtype=float)

    def cost_of(self, h: ArrayLike) -> float:
        return float(self.prices @ np.asarray(h, dtype=float))

    def with_position(self, endowment: Optional[ArrayLike] = None,
                      wealth: Optional[float] = None) -> "Market":
        return replace(
            self,
            endowment=self.endowment if endowment is None else endowment,
            wealth=self.wealth if wealth is None else wealth,
        )


@dataclass(frozen=True)
class StatePriceCertificate:
    state_prices: NDArray[np.float64]
    strictness: float
    residual: float

    arbitrage_free = True


@dataclass(frozen=True)
class ArbitrageVerdict:
    """No strictly positive state prices exist; ``portfolio`` is a witness when found."""

    portfolio: Optional[NDArray[np.float64]]
    cost: Optional[float]
    payoff: Optional[NDArray[np.float64]]
    best_strictness: Optional[float]

    arbitrage_free = False


def _arbitrage_witness(m: Market) -> Optional[NDArray[np.float64]]:
    """Portfolio with Rh >= 0, q·h <= 0 and (Rh != 0 or q·h < 0), normalized into a box."""
    R, q = m.payoff_matrix, m.prices
    n, J = R.shape
    A = np.vstack([R, R, q[None, :], q[None, :]])
    rel = [">="] * n + ["<="] * n + ["<=", ">="]
    b = np.concatenate([np.zeros(n), np.ones(n), [0.0, -1.0]])
    c = R.sum(axis=0) - q
    sol = _checked(lp.solve(lp.LpProblem.build(c, A, rel, b, [(None, None)] * J, "max")),
                   "arbitrage witness")
    if not sol.is_optimal or sol.objective <= WITNESS_TOL:
        return None
    h = sol.x
    Rh, qh = R @ h, float(q @ h)
    if np.all(Rh >= -WITNESS_TOL) and qh <= WITNESS_TOL and (Rh.max() > WITNESS_TOL or qh < -WITNESS_TOL):
        return h
    return None


def check_arbitrage(m: Market) -> Union[StatePriceCertificate, ArbitrageVerdict]:
    """Finite-state FTAP: look for strictly positive state prices f with Rᵀf = q.

    Maximizes the smallest state price (capped at 1). A positive optimum
    certifies absence of arbitrage; otherwise an arbitrage portfolio is
    extracted from the alternative system.
    """
    R, q = m.payoff_matrix, m.prices
    n, J = R.shape
    # variables: f (n, free), delta (<= 1)
    A = np.zeros((J + n, n + 1))
    A[:J, :n] = R.T
    A[J:, :n] = np.eye(n)
    A[J:, n] = -1.0
    rel = ["="] * J + [">="] * n
    b = np.concatenate([q, np.zeros(n)])
    c = np.zeros(n + 1)
    c[n] = 1.0
    bounds = [(None, None)] * n + [(None, 1.0)]
    sol = _checked(lp.solve(lp.LpProblem.build(c, A, rel, b, bounds, "max")), "state prices")
    delta = float(sol.x[n]) if sol.is_optimal else None
    if delta is not None and delta > STRICTNESS_TOL:
        f = sol.x[:n].copy()
        residual = float(np.max(np.abs(R.T @ f - q)))
        if residual > CERTIFICATE_RESIDUAL:
            raise NumericalError(f"state-price residual {residual:.3g} too large")
        f.flags.writeable = False
        return StatePriceCertificate(f, float(f.min()), residual)
    h = _arbitrage_witness(m)
    if h is None:
        return ArbitrageVerdict(None, None, None, delta)
    h.flags.writeable = False
    return ArbitrageVerdict(h, float(q @ h), R @ h, delta)


def require_arbitrage_free(m: Market) -> StatePriceCertificate:
    verdict = check_arbitrage(m)
    if not verdict.arbitrage_free:
        raise ArbitrageError("prices admit arbitrage; no strictly positive state prices exist")
    return verdict


def valuation_bound(m: Market, target: ArrayLike) -> float:
    """sup{ f·(target - endowment) : f >= 0, Rᵀf = q } over valuation functionals f."""
    target = payoff(target, "target")
    if target.size != m.num_states:
        raise DimensionError(f"target has {target.size} states, market has {m.num_states}")
    R, q = m.payoff_matrix, m.prices
    sol = _checked(lp.solve(lp.LpProblem.build(
        target - m.endowment, R.T, ["="] * m.num_assets, q, sense="max")), "valuation bound")
    if sol.status is lp.Status.INFEASIBLE:
        raise MarketError("no valuation functional exists for these prices")
    if sol.status is lp.Status.UNBOUNDED:
        raise MarketError("valuation bound is unbounded; prices are inconsistent")
    return float(sol.objective)


@dataclass(frozen=True)
class SuperReplication:
    price: float
    portfolio: NDArray[np.float64]


def superreplication_price(m: Market, target: ArrayLike) -> SuperReplication:
    """inf{ q·h : endowment + Rh >= target }, with an optimal portfolio."""
    target = payoff(target, "target")
    if target.size != m.num_states:
        raise DimensionError(f"target has {target.size} states, market has {m.num_states}")
    if np.any(target < 0):
        raise ValueError("super-replication target must be nonnegative")
    R = m.payoff_matrix
    sol = _checked(lp.solve(lp.LpProblem.build(
        m.prices, R, [">="] * m.num_states, target - m.endowment,
        [(None, None)] * m.num_assets)), "super-replication")
    if sol.status is lp.Status.INFEASIBLE:
        raise MarketError("target cannot be super-replicated; no order unit in the asset span")
    if sol.status is lp.Status.UNBOUNDED:
        raise ArbitrageError("super-replication cost is unbounded below; prices admit arbitrage")
    h = sol.x.copy()
    h.flags.writeable = False
    return SuperReplication(float(sol.objective), h)
