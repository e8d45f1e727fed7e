import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_risk.payoff import DimensionError
from robust_risk.risk import AmbiguitySet, acceptance_cone, rho_crm
from robust_risk.shortfall import (
    LossFunction,
    ShortfallRangeError,
    SrSpec,
    bisected_identity_sr,
    describe,
    shortfall_risk,
    sr_equals_rho_check,
    worst_expected_loss,
)

from generators import ambiguity_corpus

CORPUS = ambiguity_corpus(seed=31, count=10)
LOSSES = [
    (LossFunction("identity"), 0.3),
    (LossFunction("linear", slope=2.0, intercept=0.5), 1.0),
    (LossFunction("exponential", rate=0.7), 0.2),
    (LossFunction("positive_part"), 0.5),
]


def test_examples():
    half = AmbiguitySet.singleton([0.5, 0.5])
    ident = LossFunction("identity")
    assert shortfall_risk(SrSpec(ident, 0.0, half), [1, -1]) == 0.0
    assert shortfall_risk(SrSpec(ident, 0.5, half), [0, 0]) == -0.5
    assert bisected_identity_sr(half, [0, 0], 0.5) == pytest.approx(-0.5, abs=1e-9)
    pp = SrSpec(LossFunction("positive_part"), 0.0, AmbiguitySet.singleton([1.0, 0.0]))
    assert shortfall_risk(pp, [1, 1]) == pytest.approx(-1.0, abs=1e-9)


def test_sr_equals_rho_examples():
    assert sr_equals_rho_check(AmbiguitySet.singleton([0.5, 0.5]), [1, -1])
    assert sr_equals_rho_check(AmbiguitySet.simplex(3), [3, 1, 2])
    assert rho_crm(acceptance_cone(AmbiguitySet.simplex(3)), [3, 1, 2]) == -1.0
    assert sr_equals_rho_check(AmbiguitySet(np.array([[0.3, 0.7], [0.6, 0.4]])), [2, -1])


def test_closed_form_and_bisection_agree_with_rho():
    rng = np.random.default_rng(1)
    for D in CORPUS:
        P = acceptance_cone(D)
        for _ in range(20):
            x = rng.uniform(-10, 10, D.dim)
            rho = rho_crm(P, x)
            assert sr_equals_rho_check(D, x, tol=1e-6)
            assert bisected_identity_sr(D, x) == pytest.approx(rho, abs=1e-6)


@pytest.mark.parametrize("loss,lam", LOSSES, ids=lambda v: getattr(v, "kind", str(v)))
def test_cash_invariance_and_monotonicity(loss, lam):
    rng = np.random.default_rng(2)
    for D in CORPUS[:5]:
        spec = SrSpec(loss, lam, D)
        for _ in range(10):
            x = rng.uniform(-5, 5, D.dim)
            s = rng.uniform(-5, 5)
            sr = shortfall_risk(spec, x)
            assert shortfall_risk(spec, x + s) == pytest.approx(sr - s, abs=1e-7)
            below = x - np.abs(rng.normal(size=D.dim))
            assert sr <= shortfall_risk(spec, below) + 1e-8


@pytest.mark.parametrize("loss,lam", LOSSES, ids=lambda v: getattr(v, "kind", str(v)))
def test_worst_expected_loss_is_non_increasing(loss, lam):
    rng = np.random.default_rng(3)
    for D in CORPUS[:5]:
        spec = SrSpec(loss, lam, D)
        x = rng.uniform(-5, 5, D.dim)
        g = [worst_expected_loss(spec, x, t) for t in np.linspace(-20, 20, 401)]
        assert np.all(np.diff(g) <= 1e-12)


def test_result_is_the_infimum_of_the_accepted_set():
    D = AmbiguitySet(np.array([[0.3, 0.7], [0.6, 0.4]]))
    spec = SrSpec(LossFunction("exponential", rate=0.5), 0.1, D)
    x = np.array([2.0, -1.0])
    sr = shortfall_risk(spec, x)
    assert worst_expected_loss(spec, x, sr) <= 0.1
    assert worst_expected_loss(spec, x, sr - 1e-6) > 0.1


def test_exponential_loss_is_not_positively_homogeneous():
    # demonstration: a convex loss breaks degree-one scaling
    spec = SrSpec(LossFunction("exponential", rate=1.0), 0.5, AmbiguitySet.singleton([0.5, 0.5]))
    x = np.array([1.0, -1.0])
    assert abs(shortfall_risk(spec, 2 * x) - 2 * shortfall_risk(spec, x)) > 1e-3


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=2), st.floats(-0.99, 5.0))
def test_exponential_threshold_inside_range_always_solves(x, lam):
    spec = SrSpec(LossFunction("exponential", rate=1.0), lam, AmbiguitySet.simplex(2))
    sr = shortfall_risk(spec, x)
    assert worst_expected_loss(spec, x, sr) <= lam + 1e-9


def test_range_errors():
    D = AmbiguitySet.simplex(2)
    with pytest.raises(ShortfallRangeError):
        shortfall_risk(SrSpec(LossFunction("exponential"), -1.5, D), [0, 0])
    with pytest.raises(ShortfallRangeError):
        shortfall_risk(SrSpec(LossFunction("positive_part"), -0.1, D), [0, 0])
    with pytest.raises(DimensionError):
        shortfall_risk(SrSpec(LossFunction(), 0.0, D), [0, 0, 0])
    with pytest.raises(ValueError):
        LossFunction("quadratic")
    with pytest.raises(ValueError):
        LossFunction("exponential", rate=0.0)


def test_loss_round_trip_and_description():
    for loss, _ in LOSSES:
        assert LossFunction.from_dict(loss.to_dict()) == loss
    assert "note" in describe(SrSpec(LossFunction("positive_part"), 0.0, AmbiguitySet.simplex(2)))
    assert "note" not in describe(SrSpec(LossFunction("identity"), 0.0, AmbiguitySet.simplex(2)))
