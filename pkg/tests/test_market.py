import numpy as np
import pytest

from robust_risk.market import (
    ArbitrageError,
    Market,
    MarketError,
    check_arbitrage,
    require_arbitrage_free,
    superreplication_price,
    valuation_bound,
)
from robust_risk.payoff import DimensionError

from generators import market_corpus, priced_market
from oracles import grid_arbitrage


def arrow2(endowment=(0, 0), wealth=1.0):
    return Market(np.eye(2), [0.5, 0.5], endowment, wealth)


def bond_only(n=3):
    return Market(np.ones((n, 1)), [1.0], np.zeros(n), 2.0, bond_column=0)


def test_arbitrage_free_examples():
    v = check_arbitrage(arrow2())
    assert v.arbitrage_free
    assert v.state_prices == pytest.approx([0.5, 0.5])
    assert v.strictness > 0 and v.residual <= 1e-7
    assert check_arbitrage(bond_only()).arbitrage_free


def test_arbitrage_example_has_valid_witness():
    m = Market(np.array([[1, 0, 1], [0, 1, 1]], float), [0.5, 0.5, 1.2], [0, 0], 0.0)
    v = check_arbitrage(m)
    assert not v.arbitrage_free
    h = v.portfolio
    assert np.all(m.payoff_of(h) >= -1e-9)
    assert m.cost_of(h) <= 1e-9
    assert m.payoff_of(h).max() > 1e-9 or m.cost_of(h) < -1e-9
    # the hand witness from the grid
    assert grid_arbitrage(m) and m.cost_of([1, 1, -1]) == pytest.approx(-0.2)
    with pytest.raises(ArbitrageError):
        require_arbitrage_free(m)


def test_zero_price_on_nonzero_payoff_is_arbitrage():
    m = Market(np.array([[1.0, 1.0], [1.0, 0.0]]), [1.0, 0.0], [0, 0], 0.0, bond_column=0)
    assert not check_arbitrage(m).arbitrage_free


def test_ftap_matches_grid_search():
    for m in market_corpus(seed=123, count=120):
        v = check_arbitrage(m)
        assert v.arbitrage_free == (not grid_arbitrage(m))
        if v.arbitrage_free:
            assert v.residual <= 1e-7 and v.strictness > 0
            assert np.all(v.state_prices > 0)
        else:
            assert v.portfolio is not None


def test_pricing_examples():
    m = arrow2(wealth=0.0)
    sr = superreplication_price(m, [1, 1])
    assert sr.price == pytest.approx(1.0)
    assert sr.portfolio == pytest.approx([1.0, 1.0])
    assert valuation_bound(m, [1, 1]) == pytest.approx(1.0)
    b = bond_only()
    assert superreplication_price(b, [1, 0, 0]).price == pytest.approx(1.0)
    assert superreplication_price(b, [1, 0, 0]).portfolio == pytest.approx([1.0])
    assert valuation_bound(b, [1, 0, 0]) == pytest.approx(1.0)


def test_bond_only_price_matches_portfolio_grid():
    b = bond_only()
    hs = np.linspace(-3, 3, 601)
    feasible = [h for h in hs if np.all(b.payoff_of([h]) >= [1, 0, 0])]
    assert min(feasible) == pytest.approx(superreplication_price(b, [1, 0, 0]).price)


def test_price_bounds_valuation_with_strong_duality():
    rng = np.random.default_rng(4)
    for _ in range(60):
        n, J = int(rng.integers(2, 6)), int(rng.integers(1, 5))
        m, _ = priced_market(rng, n, J)
        target = rng.uniform(0, 3, n)
        price = superreplication_price(m, target).price
        bound = valuation_bound(m, target)
        assert price >= bound - 1e-9
        assert price == pytest.approx(bound, abs=1e-6)


def test_price_monotone_and_feasible_set_convex():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n, J = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        m, _ = priced_market(rng, n, J)
        hi = rng.uniform(0, 3, n)
        lo = hi * rng.uniform(0, 1, n)
        p_hi = superreplication_price(m, hi)
        assert superreplication_price(m, lo).price <= p_hi.price + 1e-9
        # mixing super-replicating portfolios super-replicates the mixture
        other = rng.uniform(0, 3, n)
        p_other = superreplication_price(m, other)
        a = rng.uniform()
        h = a * p_hi.portfolio + (1 - a) * p_other.portfolio
        assert np.all(m.endowment + m.payoff_of(h) >= a * hi + (1 - a) * other - 1e-9)


def test_market_validation():
    with pytest.raises(DimensionError):
        Market(np.eye(2), [0.5], [0, 0], 1.0)
    with pytest.raises(MarketError, match=r"endowment\[1\]"):
        Market(np.eye(2), [0.5, 0.5], [0, -1], 1.0)
    with pytest.raises(MarketError):
        Market(np.eye(2), [0.5, 0.5], [0, 0], -1.0)
    with pytest.raises(MarketError, match="order unit"):
        Market(np.array([[1.0], [0.0]]), [0.5], [0, 0], 1.0)
    with pytest.raises(MarketError):
        Market(np.eye(2), [0.5, 0.5], [0, 0], 1.0, bond_column=0)
    with pytest.raises(ValueError, match=r"payoff_matrix\[0\]\[1\]"):
        Market(np.array([[1.0, np.inf], [1.0, 0.0]]), [1, 1], [0, 0], 1.0)


def test_order_unit_replicated_without_bond_column():
    m = arrow2()
    assert m.payoff_of(m.unit_portfolio) == pytest.approx([1.0, 1.0])
    assert m.unmet_assumptions() == ["endowment is zero"]
    assert m.with_position(endowment=[1, 1]).unmet_assumptions() == []


def test_super_replication_errors():
    arb = Market(np.array([[1, 0, 1], [0, 1, 1]], float), [0.5, 0.5, 1.2], [0, 0], 0.0)
    with pytest.raises(ArbitrageError):
        superreplication_price(arb, [1, 1])
    with pytest.raises(ValueError):
        superreplication_price(arrow2(), [-1, 0])
    with pytest.raises(DimensionError):
        superreplication_price(arrow2(), [1, 0, 0])
