"""Problem and parking-instance files (JSON documents).

Problem file::

    {"domain": ["d1", "d2"],
     "constants": {"A": {"arity": 2, "rows": [["d1", "d1", 7], ["d2", "d1", "inf"], ...]}},
     "term": "(x2)((x1)A(x1,x2) || (x3)B(x2,x3))"}

Rows missing from a constant default to ``"inf"`` (or to the constant's
``"default"`` entry).  Costs are integers, decimal strings or ``"inf"``.

Parking file::

    {"zones": {"A": 2, "B": 2},
     "cars": ["x1", "x2"],
     "costs": [["x1", "A", 3], ["x2", "B", "inf"]],
     "term": "(x1)(x2)(A(x1,x2) || B(x2))"}
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .costeval import Binding, check_domain, format_cost, to_cost
from .parking import ParkingInstance
from .terms import Signature, Term, parse_term


class FileFormatError(ValueError):
    pass


@dataclass
class Problem:
    domain: tuple
    signature: Signature
    binding: Binding
    term: Term


def _load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise FileFormatError("expected a JSON object")
    return doc


def _require(doc: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FileFormatError(f"missing keys: {', '.join(missing)}")


def _cost(x: Any):
    if isinstance(x, float):
        # JSON numbers like 2.5 are taken at their decimal spelling
        return to_cost(repr(x))
    return to_cost(x)


def parse_problem(text: str) -> Problem:
    doc = _load(text)
    _require(doc, "domain", "constants", "term")
    domain = check_domain(str(v) for v in doc["domain"])
    if not isinstance(doc["constants"], dict):
        raise FileFormatError("'constants' must map labels to {arity, rows}")
    sig = Signature()
    spec = {}
    defaults = {}
    for label, c in doc["constants"].items():
        if not isinstance(c, dict) or "arity" not in c:
            raise FileFormatError(f"constant {label!r} needs an 'arity'")
        arity = c["arity"]
        if not isinstance(arity, int) or arity < 0:
            raise FileFormatError(f"arity of {label!r} must be a natural number")
        sig[label] = arity
        rows = [[str(v) for v in r[:-1]] + [_cost(r[-1])] for r in c.get("rows", [])]
        spec[label] = (arity, rows)
        defaults[label] = _cost(c.get("default", "inf"))
    binding = Binding()
    for label, (arity, rows) in spec.items():
        binding.update(Binding.from_rows(domain, {label: (arity, rows)}, default=defaults[label]))
    term = parse_term(str(doc["term"]), sig)
    return Problem(domain, sig, binding, term)


def parse_parking(text: str) -> ParkingInstance:
    doc = _load(text)
    _require(doc, "zones", "cars", "costs", "term")
    zones = doc["zones"]
    if not isinstance(zones, dict):
        raise FileFormatError("'zones' must map zone labels to capacities")
    costs = {}
    for row in doc["costs"]:
        if not isinstance(row, list) or len(row) != 3:
            raise FileFormatError(f"cost rows are [car, zone, cost], got {row!r}")
        costs[str(row[0]), str(row[1])] = _cost(row[2])
    term = parse_term(str(doc["term"]))
    return ParkingInstance(zones, tuple(str(c) for c in doc["cars"]), costs, term)


def read_term(text: str) -> tuple[Term, Signature | None]:
    """A bare term, or the ``term`` of a problem/parking document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = _load(text)
        _require(doc, "term")
        sig = None
        if isinstance(doc.get("constants"), dict):
            sig = Signature({k: v["arity"] for k, v in doc["constants"].items()
                             if isinstance(v, dict) and "arity" in v})
        return parse_term(str(doc["term"]), sig), sig
    return parse_term(text), None


def cost_json(c) -> str:
    return format_cost(c)
