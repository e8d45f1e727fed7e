"""Dense two-phase simplex with Bland's rule and certified outcomes.

Problems are stated in general form

    min/max  c·x
    s.t.     A_i·x  (<= | = | >=)  b_i      for every row i
             lo_j <= x_j <= hi_j            (either bound may be infinite)

and internally brought to standard form ``M z = r, z >= 0, r >= 0``.
An ``OPTIMAL`` status is only reported after the primal point and the row
duals have been recomputed from the final basis (with one refinement step)
and re-checked against the *original* problem: primal residual, dual
residual and duality gap all have to be within the certification limits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

PRIMAL_RESIDUAL_LIMIT = 1e-8
DUAL_RESIDUAL_LIMIT = 1e-8
GAP_LIMIT = 1e-7

_PIVOT_TOL = 1e-10
_COST_TOL = 1e-10
_REFACTOR_EVERY = 50
_MAX_RETRIES = 3

RELATIONS = ("<=", "=", ">=")


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class LpProblem:
    c: NDArray[np.float64]
    A: NDArray[np.float64]
    relations: tuple[str, ...]
    b: NDArray[np.float64]
    bounds: NDArray[np.float64]
    sense: str = "min"

    @classmethod
    def build(
        cls,
        c: ArrayLike,
        A: Optional[ArrayLike] = None,
        relations: Sequence[str] = (),
        b: Optional[ArrayLike] = None,
        bounds: Optional[Sequence[tuple[float, float]]] = None,
        sense: str = "min",
    ) -> "LpProblem":
        """Convenience constructor; default bounds are x >= 0."""
        c = np.asarray(c, dtype=float).ravel()
        n = c.size
        A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float).reshape(-1, n)
        b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
        if bounds is None:
            bnd = np.tile([0.0, math.inf], (n, 1))
        else:
            bnd = np.array([(-math.inf if lo is None else lo, math.inf if hi is None else hi)
                            for lo, hi in bounds], dtype=float).reshape(-1, 2)
        return cls(c, A, tuple(relations), b, bnd, sense)

    def __post_init__(self) -> None:
        n = self.c.size
        m = self.A.shape[0]
        if self.A.shape != (m, n):
            raise ValueError(f"constraint matrix shape {self.A.shape} does not match {n} variables")
        if self.b.shape != (m,) or len(self.relations) != m:
            raise ValueError(f"{m} rows need {m} right-hand sides and relations")
        if self.bounds.shape != (n, 2):
            raise ValueError(f"bounds must have shape ({n}, 2)")
        bad = [r for r in self.relations if r not in RELATIONS]
        if bad:
            raise ValueError(f"unknown relation {bad[0]!r}")
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        for label, arr in (("objective", self.c), ("constraint matrix", self.A), ("rhs", self.b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{label} contains non-finite coefficients")
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        if np.any(np.isnan(self.bounds)) or np.any(lo == math.inf) or np.any(hi == -math.inf):
            raise ValueError("invalid variable bounds")

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: Status
    x: Optional[NDArray[np.float64]] = None
    objective: Optional[float] = None
    duals: Optional[NDArray[np.float64]] = None
    primal_residual: float = math.nan
    dual_residual: float = math.nan
    duality_gap: float = math.nan
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def certified(self) -> bool:
        return (
            self.primal_residual <= PRIMAL_RESIDUAL_LIMIT
            and self.dual_residual <= DUAL_RESIDUAL_LIMIT
            and self.duality_gap <= GAP_LIMIT
        )


class _Breakdown(Exception):
    pass


@dataclass
class _Standard:
    """Standard form M z = r, z >= 0 plus the maps back to the original problem."""

    M: NDArray[np.float64]
    r: NDArray[np.float64]
    cost: NDArray[np.float64]
    n_struct: int                      # columns coming from original variables
    var_map: NDArray[np.float64]       # x = offset + var_map @ z[:n_struct]
    offset: NDArray[np.float64]
    row_sign: NDArray[np.float64]      # +1/-1 flip applied to each standard row
    n_orig_rows: int
    slack_of_row: dict = field(default_factory=dict)


def _standardize(p: LpProblem, cmin: NDArray) -> _Standard:
    n = p.num_vars
    lo, hi = p.bounds[:, 0], p.bounds[:, 1]
    cols: list[NDArray] = []
    offset = np.zeros(n)
    box_rows: list[tuple[int, float]] = []
    for j in range(n):
        e = np.zeros(n)
        if np.isfinite(lo[j]):
            e[j] = 1.0
            offset[j] = lo[j]
            cols.append(e)
            if np.isfinite(hi[j]):
                box_rows.append((len(cols) - 1, hi[j] - lo[j]))
        elif np.isfinite(hi[j]):
            e[j] = -1.0
            offset[j] = hi[j]
            cols.append(e)
        else:
            e[j] = 1.0
            cols.append(e)
            cols.append(-e)
    var_map = np.array(cols).T.reshape(n, len(cols))
    ns = var_map.shape[1]

    A_z = p.A @ var_map
    b_z = p.b - p.A @ offset
    rel = list(p.relations)
    rows = [A_z[i] for i in range(p.num_rows)]
    rhs = list(b_z)
    for k, width in box_rows:
        row = np.zeros(ns)
        row[k] = 1.0
        rows.append(row)
        rhs.append(width)
        rel.append("<=")
    m = len(rows)
    n_slack = sum(1 for r in rel if r != "=")
    M = np.zeros((m, ns + n_slack))
    if m:
        M[:, :ns] = np.array(rows)
    r = np.array(rhs, dtype=float)
    slack_of_row = {}
    s = ns
    for i, kind in enumerate(rel):
        if kind == "<=":
            M[i, s] = 1.0
        elif kind == ">=":
            M[i, s] = -1.0
        else:
            continue
        slack_of_row[i] = s
        s += 1
    sign = np.where(r < 0, -1.0, 1.0)
    M *= sign[:, None]
    r = r * sign
    cost = np.zeros(M.shape[1])
    cost[:ns] = cmin @ var_map
    return _Standard(M, r, cost, ns, var_map, offset, sign, p.num_rows, slack_of_row)


class _Tableau:
    """Dense tableau B^{-1}[M | r] for a given basis, with Bland pivoting."""

    def __init__(self, M: NDArray, r: NDArray, basis: list[int]):
        self.M = M
        self.r = r
        self.basis = list(basis)
        self.refactor()

    def refactor(self) -> None:
        B = self.M[:, self.basis]
        try:
            self.T = np.linalg.solve(B, self.M)
            self.rhs = np.linalg.solve(B, self.r)
        except np.linalg.LinAlgError as exc:
            raise _Breakdown("singular basis") from exc

    def pivot(self, row: int, col: int) -> None:
        piv = self.T[row, col]
        self.T[row] /= piv
        self.rhs[row] /= piv
        factors = self.T[:, col].copy()
        factors[row] = 0.0
        self.T -= np.outer(factors, self.T[row])
        self.rhs -= factors * self.rhs[row]
        self.basis[row] = col

    def run(self, cost: NDArray, eligible: NDArray[np.bool_], max_iter: int) -> tuple[str, int]:
        """Minimize cost·z over the current feasible basis. Returns (outcome, pivots)."""
        it = 0
        while True:
            if it and it % _REFACTOR_EVERY == 0:
                self.refactor()
            d = cost - cost[self.basis] @ self.T
            candidates = np.flatnonzero(eligible & (d < -_COST_TOL))
            if candidates.size == 0:
                return "optimal", it
            if it >= max_iter:
                raise _Breakdown("iteration limit reached")
            j = int(candidates[0])
            col = self.T[:, j]
            rows = np.flatnonzero(col > _PIVOT_TOL)
            if rows.size == 0:
                return "unbounded", it
            ratios = self.rhs[rows] / col[rows]
            ratios = np.maximum(ratios, 0.0)
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            leave = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(leave, j)
            it += 1


def _solve_standard(std: _Standard) -> tuple[Status, Optional[NDArray], Optional[NDArray], list[int], int]:
    """Two-phase simplex on the standard form. Returns status, z, row duals, kept rows, pivots."""
    M, r = std.M, std.r
    m, n = M.shape
    if m == 0:
        if np.any(std.cost < -_COST_TOL):
            return Status.UNBOUNDED, None, None, [], 0
        return Status.OPTIMAL, np.zeros(n), np.zeros(0), [], 0

    # Phase 1: reuse +1 slack columns as the starting basis where possible.
    basis: list[int] = []
    art_rows: list[int] = []
    for i in range(m):
        s = std.slack_of_row.get(i)
        if s is not None and M[i, s] == 1.0:
            basis.append(s)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    M1 = np.hstack([M, np.zeros((m, n_art))])
    for k, i in enumerate(art_rows):
        M1[i, n + k] = 1.0
        basis[i] = n + k
    max_iter = 200 * (m + n + n_art) + 1000
    pivots = 0

    tab = _Tableau(M1, r, basis)
    if n_art:
        cost1 = np.zeros(n + n_art)
        cost1[n:] = 1.0
        _, it = tab.run(cost1, np.ones(n + n_art, dtype=bool), max_iter)
        pivots += it
        tab.refactor()
        infeas = float(cost1[tab.basis] @ tab.rhs)
        if infeas > 1e-9 * max(1.0, float(np.max(np.abs(r)))):
            return Status.INFEASIBLE, None, None, [], pivots

        # Drive remaining artificials out of the basis; drop redundant rows.
        keep = list(range(m))
        for pos in range(m):
            if tab.basis[pos] < n:
                continue
            row = tab.T[pos, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                tab.pivot(pos, j)
                pivots += 1
            else:
                keep.remove(pos)
        basis = [tab.basis[i] for i in keep]
    else:
        keep = list(range(m))
        basis = tab.basis

    M2, r2 = M[keep], r[keep]
    eligible = np.ones(n, dtype=bool)
    tab = _Tableau(M2, r2, basis)
    for _ in range(_MAX_RETRIES + 1):
        outcome, it = tab.run(std.cost, eligible, max_iter)
        pivots += it
        if outcome == "unbounded":
            return Status.UNBOUNDED, None, None, keep, pivots
        B = M2[:, tab.basis]
        try:
            zB = np.linalg.solve(B, r2)
            zB += np.linalg.solve(B, r2 - B @ zB)
            cB = std.cost[tab.basis]
            y = np.linalg.solve(B.T, cB)
            y += np.linalg.solve(B.T, cB - B.T @ y)
        except np.linalg.LinAlgError as exc:
            raise _Breakdown("singular final basis") from exc
        d = std.cost - M2.T @ y
        if np.all(d >= -_COST_TOL):
            z = np.zeros(n)
            z[tab.basis] = zB
            return Status.OPTIMAL, z, y, keep, pivots
        tab.refactor()
    raise _Breakdown("reduced costs did not settle after refactorization")


def _certify(p: LpProblem, cmin: NDArray, x: NDArray, y: NDArray) -> tuple[float, float, float]:
    """Residuals of (x, y) for the min-form of ``p``; y follows the min-form sign convention."""
    lo, hi = p.bounds[:, 0], p.bounds[:, 1]
    Ax = p.A @ x
    primal = [0.0]
    dual = [0.0]
    for i, kind in enumerate(p.relations):
        if kind == "<=":
            primal.append(Ax[i] - p.b[i])
            dual.append(y[i])
        elif kind == ">=":
            primal.append(p.b[i] - Ax[i])
            dual.append(-y[i])
        else:
            primal.append(abs(Ax[i] - p.b[i]))
    with np.errstate(invalid="ignore"):
        primal.extend(np.where(np.isfinite(lo), lo - x, 0.0))
        primal.extend(np.where(np.isfinite(hi), x - hi, 0.0))
    d = cmin - p.A.T @ y
    dual_obj = float(p.b @ y)
    for j, dj in enumerate(d):
        if dj > 0:
            if np.isfinite(lo[j]):
                dual_obj += lo[j] * dj
            else:
                dual.append(dj)
        elif dj < 0:
            if np.isfinite(hi[j]):
                dual_obj += hi[j] * dj
            else:
                dual.append(-dj)
    gap = abs(float(cmin @ x) - dual_obj)
    return max(0.0, max(primal)), max(0.0, max(dual)), gap


def solve(p: LpProblem) -> LpSolution:
    """Solve ``p``. Deterministic; never raises for numerical trouble."""
    cmin = p.c if p.sense == "min" else -p.c
    std = _standardize(p, cmin)
    try:
        status, z, y_std, keep, pivots = _solve_standard(std)
    except _Breakdown:
        return LpSolution(Status.NUMERICAL_FAILURE)
    if status is not Status.OPTIMAL:
        return LpSolution(status, iterations=pivots)

    x = std.offset + std.var_map @ z[: std.n_struct]
    y_full = np.zeros(std.M.shape[0])
    y_full[keep] = y_std
    y_min = (y_full * std.row_sign)[: std.n_orig_rows]
    primal_res, dual_res, gap = _certify(p, cmin, x, y_min)
    duals = y_min if p.sense == "min" else -y_min
    sol = LpSolution(
        Status.OPTIMAL,
        x=x,
        objective=float(p.c @ x),
        duals=duals,
        primal_residual=primal_res,
        dual_residual=dual_res,
        duality_gap=gap,
        iterations=pivots,
    )
    if not sol.certified:
        return LpSolution(
            Status.NUMERICAL_FAILURE,
            x=x,
            objective=sol.objective,
            duals=duals,
            primal_residual=primal_res,
            dual_residual=dual_res,
            duality_gap=gap,
            iterations=pivots,
        )
    return sol
