"""Finite-state maxmin utility, coherent risk and super-replication engine."""

from .payoff import Cone, cone_contains, cone_interior_contains, dominates, sup_norm
from .risk import AmbiguitySet, RiskReport, acceptance_cone, check_coherence, maxmin_utility, rho_crm
from .shortfall import LossFunction, SrSpec, shortfall_risk, sr_equals_rho_check
from .market import (
    Market,
    check_arbitrage,
    superreplication_price,
    valuation_bound,
)
from .portfolio import Scenario, equivalence_report, prudence_check, solve_program1
from .axioms import claim1_witness, run_axiom_battery

__version__ = "0.1.0"

__all__ = [
    "AmbiguitySet",
    "Cone",
    "LossFunction",
    "Market",
    "RiskReport",
    "Scenario",
    "SrSpec",
    "acceptance_cone",
    "check_arbitrage",
    "check_coherence",
    "claim1_witness",
    "cone_contains",
    "cone_interior_contains",
    "dominates",
    "equivalence_report",
    "maxmin_utility",
    "prudence_check",
    "rho_crm",
    "run_axiom_battery",
    "shortfall_risk",
    "solve_program1",
    "sr_equals_rho_check",
    "sup_norm",
    "superreplication_price",
    "valuation_bound",
]
