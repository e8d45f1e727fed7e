"""Scenario files: a single JSON document describing market, ambiguity and options.

Schema (keys not listed are rejected)::

    {
      "states": 2,                          # N
      "assets": [[1, 0], [0, 1]],           # J payoff vectors, each of length N
      "prices": [0.5, 0.5],                 # J asset prices
      "endowment": [0, 0],                  # length N, nonnegative
      "wealth": 1.0,                        # initial wealth, >= 0
      "ambiguity": [[1, 0], [0, 1]],        # K probability vectors of length N
      "bond_column": null,                  # optional index of the riskless asset
      "sr": {"loss": {"kind": "identity"}, "lambda": 0.0},   # optional
      "seed": 0,                            # optional
      "tol": 1e-9,                          # optional
      "narrative": "consumption"            # optional: "consumption" | "debt"
    }
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .market import Market
from .payoff import probability_vector
from .portfolio import Scenario
from .risk import AmbiguitySet
from .shortfall import LOSS_KINDS, LossFunction, SrSpec

KNOWN_KEYS = {
    "states", "assets", "prices", "endowment", "wealth", "ambiguity",
    "bond_column", "sr", "seed", "tol", "narrative",
}
NARRATIVES = ("consumption", "debt")


class ScenarioError(ValueError):
    """Malformed scenario content; the message starts with the offending field path."""


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {type(v).__name__}")
    if not math.isfinite(v):
        raise ScenarioError(f"{where}: not finite")
    return float(v)


def _vector(v: Any, where: str, length: Optional[int] = None) -> tuple[float, ...]:
    if not isinstance(v, list) or not v:
        raise ScenarioError(f"{where}: expected a non-empty list of numbers")
    out = tuple(_number(e, f"{where}[{i}]") for i, e in enumerate(v))
    if length is not None and len(out) != length:
        raise ScenarioError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _matrix(v: Any, where: str, width: int) -> tuple[tuple[float, ...], ...]:
    if not isinstance(v, list) or not v:
        raise ScenarioError(f"{where}: expected a non-empty list of vectors")
    return tuple(_vector(row, f"{where}[{i}]", width) for i, row in enumerate(v))


@dataclass(frozen=True)
class ScenarioFile:
    states: int
    assets: tuple[tuple[float, ...], ...]
    prices: tuple[float, ...]
    endowment: tuple[float, ...]
    wealth: float
    ambiguity: tuple[tuple[float, ...], ...]
    bond_column: Optional[int] = None
    sr_loss: Optional[dict] = None
    sr_lambda: Optional[float] = None
    seed: Optional[int] = None
    tol: Optional[float] = None
    narrative: Optional[str] = None

    @classmethod
    def from_dict(cls, d: Any) -> "ScenarioFile":
        if not isinstance(d, dict):
            raise ScenarioError("scenario: expected a JSON object")
        unknown = sorted(set(d) - KNOWN_KEYS)
        if unknown:
            raise ScenarioError(f"{unknown[0]}: unknown field")
        for key in ("states", "assets", "prices", "endowment", "wealth", "ambiguity"):
            if key not in d:
                raise ScenarioError(f"{key}: missing required field")
        n = d["states"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ScenarioError("states: expected a positive integer")
        assets = _matrix(d["assets"], "assets", n)
        prices = _vector(d["prices"], "prices", len(assets))
        endowment = _vector(d["endowment"], "endowment", n)
        wealth = _number(d["wealth"], "wealth")
        ambiguity = _matrix(d["ambiguity"], "ambiguity", n)
        for i, row in enumerate(ambiguity):
            try:
                probability_vector(row, f"ambiguity[{i}]")
            except ValueError as exc:
                raise ScenarioError(str(exc)) from exc

        bond = d.get("bond_column")
        if bond is not None and (isinstance(bond, bool) or not isinstance(bond, int)):
            raise ScenarioError("bond_column: expected an integer or null")

        sr_loss = sr_lambda = None
        if d.get("sr") is not None:
            sr = d["sr"]
            if not isinstance(sr, dict):
                raise ScenarioError("sr: expected an object")
            loss = sr.get("loss", {"kind": "identity"})
            if not isinstance(loss, dict) or loss.get("kind", "identity") not in LOSS_KINDS:
                raise ScenarioError(f"sr.loss.kind: expected one of {LOSS_KINDS}")
            for k, v in loss.items():
                if k != "kind":
                    _number(v, f"sr.loss.{k}")
            sr_loss = LossFunction.from_dict(loss).to_dict()
            sr_lambda = _number(sr.get("lambda", 0.0), "sr.lambda")

        seed = d.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise ScenarioError("seed: expected an integer")
        tol = None if d.get("tol") is None else _number(d["tol"], "tol")
        if tol is not None and tol <= 0:
            raise ScenarioError("tol: must be positive")
        narrative = d.get("narrative")
        if narrative is not None and narrative not in NARRATIVES:
            raise ScenarioError(f"narrative: expected one of {NARRATIVES}")
        return cls(n, assets, prices, endowment, wealth, ambiguity, bond, sr_loss, sr_lambda,
                   seed, tol, narrative)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "states": self.states,
            "assets": [list(a) for a in self.assets],
            "prices": list(self.prices),
            "endowment": list(self.endowment),
            "wealth": self.wealth,
            "ambiguity": [list(p) for p in self.ambiguity],
        }
        if self.bond_column is not None:
            d["bond_column"] = self.bond_column
        if self.sr_loss is not None:
            d["sr"] = {"loss": dict(self.sr_loss), "lambda": self.sr_lambda}
        for key in ("seed", "tol", "narrative"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def market(self) -> Market:
        R = np.array(self.assets, dtype=float).T
        return Market(R, self.prices, self.endowment, self.wealth, self.bond_column)

    def ambiguity_set(self) -> AmbiguitySet:
        return AmbiguitySet(np.array(self.ambiguity, dtype=float))

    def scenario(self) -> Scenario:
        return Scenario(self.market(), self.ambiguity_set())

    def sr_spec(self) -> SrSpec:
        if self.sr_loss is None:
            raise ScenarioError("sr: the scenario defines no shortfall-risk block")
        return SrSpec(LossFunction.from_dict(self.sr_loss), self.sr_lambda, self.ambiguity_set())


def load_json(path: Union[str, Path], what: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"{what}: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{what}: invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from exc


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    return ScenarioFile.from_dict(load_json(path, "scenario"))


def load_vector(path: Union[str, Path], what: str) -> tuple[float, ...]:
    """A vector file holds either a JSON list or an object with a ``values`` list."""
    data = load_json(path, what)
    if isinstance(data, dict):
        if "values" not in data:
            raise ScenarioError(f"{what}: object must contain 'values'")
        data = data["values"]
    return _vector(data, what)


def parse_vector_arg(text: str, what: str) -> tuple[float, ...]:
    """Vector given on the command line as JSON ("[0.2,0.8]") or comma-separated."""
    text = text.strip()
    try:
        data = json.loads(text) if text.startswith("[") else [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise ScenarioError(f"{what}: cannot parse {text!r}") from exc
    return _vector(data, what)
