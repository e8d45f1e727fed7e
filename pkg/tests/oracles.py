"""Independent brute-force oracles shared by the test modules."""

import itertools

import numpy as np


def vertex_enumeration(problem, tol=1e-9):
    """Brute-force LP optimum over all basic solutions of a bounded problem.

    Every finite bound becomes an inequality; all inequalities are written
    as G x <= h and equalities as E x = e. Requires a pointed feasible set.
    Returns (value, x) or (None, None) if no feasible vertex exists.
    """
    n = problem.num_vars
    G, h, E, e = [], [], [], []
    for a, rel, b in zip(problem.A, problem.relations, problem.b):
        if rel == "<=":
            G.append(a); h.append(b)
        elif rel == ">=":
            G.append(-a); h.append(-b)
        else:
            E.append(a); e.append(b)
    for j, (lo, hi) in enumerate(problem.bounds):
        unit = np.eye(n)[j]
        if np.isfinite(lo):
            G.append(-unit); h.append(-lo)
        if np.isfinite(hi):
            G.append(unit); h.append(hi)
    G, h = np.array(G).reshape(-1, n), np.array(h)
    E, e = np.array(E).reshape(-1, n), np.array(e)
    k = n - E.shape[0]
    sign = 1.0 if problem.sense == "min" else -1.0
    best, best_x = None, None
    combos = np.array(list(itertools.combinations(range(G.shape[0]), k)), dtype=int).reshape(-1, k)
    if combos.size == 0 and k > 0:
        return None, None
    systems = np.concatenate([np.broadcast_to(E, (len(combos),) + E.shape), G[combos]], axis=1)
    rhs = np.concatenate([np.broadcast_to(e, (len(combos), E.shape[0])), h[combos]], axis=1)
    ok = np.abs(np.linalg.det(systems)) > 1e-10
    if not ok.any():
        return None, None
    xs = np.linalg.solve(systems[ok], rhs[ok][..., None])[..., 0]
    feas = np.all(xs @ G.T <= h + tol, axis=1)
    if E.shape[0]:
        feas &= np.all(np.abs(xs @ E.T - e) <= tol, axis=1)
    if not feas.any():
        return None, None
    vals = xs[feas] @ problem.c
    i = np.argmin(sign * vals)
    return float(vals[i]), xs[feas][i]


def grid_arbitrage(market, radius=3, tol=1e-9):
    """Search integer portfolios in [-radius, radius]^J for an arbitrage."""
    R, q = market.payoff_matrix, market.prices
    H = np.array(list(itertools.product(range(-radius, radius + 1), repeat=R.shape[1])), float)
    payoffs, costs = H @ R.T, H @ q
    hits = ((payoffs >= -tol).all(axis=1) & (costs <= tol)
            & ((payoffs > tol).any(axis=1) | (costs < -tol)))
    return bool(hits.any())


def two_state_cost(market):
    """Closed-form super-replication cost on N = 2 for bond-only or complete markets."""
    R, q, w = market.payoff_matrix, market.prices, market.endowment
    if R.shape != (2, 1) and R.shape != (2, 2):
        raise ValueError("oracle covers N = 2 with one or two assets")
    if R.shape[1] == 1:
        return lambda C: q[0] * (C - w).max(axis=-1) / R[0, 0]
    f = np.linalg.solve(R.T, q)
    return lambda C: (C - w) @ f


def consumption_grid(scenario, points=200):
    """Best maxmin utility over a points×points grid of consumption plans on N = 2.

    The grid spans [0, c_max] per state, where c_max is the most consumption
    affordable in that state alone. Returns (value, step).
    """
    m, V = scenario.market, scenario.ambiguity.vertices
    cost = two_state_cost(m)
    ub = []
    for i in range(2):
        lo, hi = 0.0, 1.0
        e = np.eye(2)[i]
        while cost(hi * e) <= m.wealth:
            hi *= 2.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if cost(mid * e) <= m.wealth else (lo, mid)
        ub.append(lo)
    g1, g2 = np.linspace(0, ub[0], points), np.linspace(0, ub[1], points)
    C = np.stack(np.meshgrid(g1, g2, indexing="ij"), axis=-1).reshape(-1, 2)
    feasible = cost(C) <= m.wealth + 1e-12
    utilities = (C[feasible] @ V.T).min(axis=1)
    return float(utilities.max()), max(ub) / (points - 1)
