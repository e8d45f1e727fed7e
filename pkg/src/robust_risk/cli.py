"""Command-line entry point: ``robust-risk <command> --scenario FILE [options]``.

Exit codes: 0 success or all checks passed, 1 a checked property failed,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .axioms import InsideHullError, claim1_witness, run_axiom_battery
from .market import (
    ArbitrageError,
    MarketError,
    NumericalError,
    check_arbitrage,
    superreplication_price,
    valuation_bound,
)
from .payoff import DimensionError, cone_interior_contains
from .portfolio import equivalence_report, prudence_check, solve_program1
from .risk import acceptance_cone, maxmin_utility, rho_crm
from .scenario import ScenarioError, ScenarioFile, load_scenario, load_vector, parse_vector_arg
from .shortfall import ShortfallRangeError, describe, shortfall_risk

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
TOOL = "robust-risk"


class InputError(Exception):
    """Bad invocation that argparse cannot catch on its own."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _plain(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, dict):
        return {k: _plain(e) for k, e in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(e) for e in v]
    return v


def _vector_option(args: argparse.Namespace, name: str, n: int) -> np.ndarray:
    raw = getattr(args, name)
    if raw is None:
        raise InputError(f"--{name}: required for this command")
    v = np.array(load_vector(raw, name) if Path(raw).is_file() else parse_vector_arg(raw, name))
    if v.size != n:
        raise ScenarioError(f"{name}: expected {n} entries, got {v.size}")
    return v


# Each command returns (results, checks). checks maps a name to a bool; the
# command exits 1 when any of them is False.

def cmd_check_arbitrage(sf: ScenarioFile, args):
    m = sf.market()
    v = check_arbitrage(m)
    if v.arbitrage_free:
        res = {"arbitrage_free": True, "state_prices": v.state_prices,
               "strictness": v.strictness, "residual": v.residual}
    else:
        res = {"arbitrage_free": False, "witness_portfolio": v.portfolio,
               "witness_cost": v.cost, "witness_payoff": v.payoff}
    res["unmet_assumptions"] = m.unmet_assumptions()
    return res, {"arbitrage_free": v.arbitrage_free}


def cmd_price(sf: ScenarioFile, args):
    m = sf.market()
    target = _vector_option(args, "target", sf.states)
    sr = superreplication_price(m, target)
    bound = valuation_bound(m, target)
    gap = sr.price - bound
    return ({"price": sr.price, "portfolio": sr.portfolio, "valuation_bound": bound,
             "duality_gap": gap},
            {"price_dominates_bound": gap >= -args.tol, "strong_duality": abs(gap) <= 1e-6})


def cmd_risk(sf: ScenarioFile, args):
    D = sf.ambiguity_set()
    x = _vector_option(args, "position", sf.states)
    rep = maxmin_utility(D, x)
    P = acceptance_cone(D)
    rho = rho_crm(P, x)
    interior = cone_interior_contains(P, x)
    return ({"utility": rep.utility, "risk": rep.value, "argmin_vertex": rep.argmin_vertex,
             "acceptable": rep.acceptable, "rho_crm": rho, "strictly_acceptable": interior},
            {"representation_identity": rho == rep.value,
             "interior_iff_negative_risk": interior == (rho < -args.tol)})


def cmd_sr(sf: ScenarioFile, args):
    spec = sf.sr_spec()
    x = _vector_option(args, "position", sf.states)
    sr = shortfall_risk(spec, x)
    res = {"shortfall_risk": sr, "spec": describe(spec)}
    checks = {}
    if spec.loss.kind == "identity" and spec.threshold == 0.0:
        rho = rho_crm(acceptance_cone(spec.ambiguity), x)
        res["rho_crm"] = rho
        checks["matches_rho_crm"] = abs(sr - rho) <= 1e-6
    return res, checks


def cmd_optimize(sf: ScenarioFile, args):
    s = sf.scenario()
    r = solve_program1(s, tol=args.tol)
    res = {"position": r.position, "portfolio": r.portfolio, "utility": r.utility,
           "risk": r.risk, "autarky_utility": r.autarky_utility,
           "lowered_exposure": r.lowered_exposure,
           "unmet_assumptions": s.market.unmet_assumptions()}
    if sf.narrative == "debt":
        res["narrative"] = "minimal shortfall of debt repayment"
    elif sf.narrative == "consumption":
        res["narrative"] = "maximal worst-case consumption"
    return res, {"lowered_exposure": r.lowered_exposure}


def cmd_prudence(sf: ScenarioFile, args):
    r = prudence_check(sf.scenario(), tol=args.tol)
    return ({"alpha": r.alpha, "optimal_utility": r.optimal_utility,
             "constant_cost": r.constant_cost},
            {"constant_feasible": r.feasible, "constant_optimal": r.value_matches})


def cmd_equivalence(sf: ScenarioFile, args):
    r = equivalence_report(sf.scenario(), tol=args.tol)
    return ({"utility_value": r.utility_value, "risk_value": r.risk_value,
             "attained_risk": r.attained_risk},
            {"values_negate": r.values_negate,
             "utility_optimum_minimizes_risk": r.utility_optimum_minimizes_risk})


def cmd_axioms(sf: ScenarioFile, args):
    seed = args.seed if args.seed is not None else (sf.seed if sf.seed is not None else 0)
    r = run_axiom_battery(sf.ambiguity_set(), trials=args.trials, seed=seed, tol=args.tol)
    axioms = {k: {"status": a.status, "trials": a.trials, "skipped": a.skipped,
                  "counterexample": a.counterexample} for k, a in r.axioms.items()}
    return ({"trials": r.trials, "seed": r.seed, "axioms": axioms},
            {k: a.status != "fail" for k, a in r.axioms.items()})


def cmd_claim1(sf: ScenarioFile, args):
    if args.pihat is None:
        raise InputError("--pihat: required for this command")
    pi = np.array(parse_vector_arg(args.pihat, "pihat"))
    w = claim1_witness(sf.ambiguity_set(), pi)
    return ({"payoff": w.payoff, "pi_hat_value": w.pi_hat_value, "worst_value": w.worst_value},
            {"accepted_under_pi_hat": w.pi_hat_value >= -1e-9,
             "rejected_under_ambiguity": w.worst_value < 0})


COMMANDS: dict[str, Callable] = {
    "check-arbitrage": cmd_check_arbitrage,
    "price": cmd_price,
    "risk": cmd_risk,
    "sr": cmd_sr,
    "optimize": cmd_optimize,
    "prudence": cmd_prudence,
    "equivalence": cmd_equivalence,
    "axioms": cmd_axioms,
    "claim1": cmd_claim1,
}
RANDOMIZED = {"axioms"}


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--scenario", default=d(None), help="scenario JSON file")
    parser.add_argument("--scenario-dir", default=d(None),
                        help="run the command on every *.json file in this directory")
    parser.add_argument("--out", default=d(None), help="report path (default: stdout)")
    parser.add_argument("--tol", type=float, default=d(None),
                        help="tolerance (default: the scenario's tol, else 1e-7)")
    parser.add_argument("--format", choices=("json", "text"), default=d("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p, suppress=True)
        if name == "price":
            p.add_argument("--target", help="target payoff: JSON file or vector literal")
        if name in ("risk", "sr"):
            p.add_argument("--position", help="payoff: JSON file or vector literal")
        if name == "axioms":
            p.add_argument("--trials", type=int, default=1000)
            p.add_argument("--seed", type=int, default=None)
        if name == "claim1":
            p.add_argument("--pihat", help="candidate prior, e.g. '[0.9,0.1]'")
    return parser


def run_one(path: str, args: argparse.Namespace) -> tuple[int, dict]:
    """Run the command on one scenario file; never raises for expected failures."""
    report: dict[str, Any] = {"tool": TOOL, "version": __version__,
                              "command": _echo(args), "scenario": Path(path).name}
    try:
        sf = load_scenario(path)
        report["input_digest"] = sf.digest()
        ns = argparse.Namespace(**vars(args))
        ns.tol = args.tol if args.tol is not None else (sf.tol if sf.tol is not None else 1e-7)
        results, checks = COMMANDS[args.command](sf, ns)
    except (ScenarioError, DimensionError, InputError, InsideHullError, ShortfallRangeError,
            MarketError, ArbitrageError, ValueError) as exc:
        report["error"] = {"kind": "input", "type": type(exc).__name__, "message": str(exc)}
        return EXIT_INPUT, report
    except (NumericalError, ArithmeticError) as exc:
        report["error"] = {"kind": "numerical", "type": type(exc).__name__, "message": str(exc)}
        return EXIT_NUMERICAL, report
    report["results"] = _plain(results)
    report["summary"] = {"passed": all(checks.values()), "checks": dict(checks)}
    return (EXIT_OK if report["summary"]["passed"] else EXIT_FAIL), report


def _echo(args: argparse.Namespace) -> dict:
    skip = {"scenario", "scenario_dir", "out", "format"}
    return {"name": args.command,
            "options": {k: v for k, v in sorted(vars(args).items()) if k not in skip | {"command"}}}


def _text(report: dict, indent: str = "") -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, e in enumerate(v):
                lines.append(f"{indent}{k}[{i}]:")
                lines.append(_text(e, indent + "  "))
        else:
            lines.append(f"{indent}{k}: {json.dumps(v)}")
    return "\n".join(line for line in lines if line)


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return _text(report) + "\n"
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in RANDOMIZED and os.environ.get("CI") and getattr(args, "seed", None) is None:
        print(f"{TOOL}: error: --seed is required for '{args.command}' in CI mode", file=sys.stderr)
        return EXIT_INPUT
    if (args.scenario is None) == (args.scenario_dir is None):
        print(f"{TOOL}: error: give exactly one of --scenario or --scenario-dir", file=sys.stderr)
        return EXIT_INPUT

    if args.scenario is not None:
        code, report = run_one(args.scenario, args)
    else:
        files = sorted(str(p) for p in Path(args.scenario_dir).glob("*.json"))
        if not files:
            print(f"{TOOL}: error: --scenario-dir: no *.json files in {args.scenario_dir}",
                  file=sys.stderr)
            return EXIT_INPUT
        with ThreadPoolExecutor() as pool:
            outcomes = list(pool.map(lambda f: run_one(f, args), files))
        code = max(c for c, _ in outcomes)
        report = {"tool": TOOL, "version": __version__, "command": _echo(args),
                  "batch": [r for _, r in outcomes],
                  "summary": {"passed": code == EXIT_OK, "exit_codes": [c for c, _ in outcomes]}}

    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"{TOOL}: error: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
