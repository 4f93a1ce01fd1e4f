"""Verdict documents shared by the checks and the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def _plain(obj):
    """Convert numpy scalars and arrays so ``json`` can serialise them."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class ReportDoc:
    """A named verdict with per-condition results, witnesses and notes.

    ``verdict`` is the overall pass flag.  ``conditions`` maps a condition
    name to ``{"passed": bool, **details}``.
    """

    name: str
    verdict: bool
    conditions: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add_condition(self, key: str, passed: bool, details: dict | None = None):
        self.conditions[key] = {"passed": bool(passed), **(details or {})}
        if not passed:
            self.verdict = False

    def add_witness(self, witness: dict):
        self.witnesses.append(witness)

    def passed(self, key: str) -> bool:
        return self.conditions[key]["passed"]

    def to_dict(self) -> dict:
        return _plain({
            "name": self.name,
            "verdict": "pass" if self.verdict else "fail",
            "conditions": self.conditions,
            "witnesses": self.witnesses,
            "tolerances": self.tolerances,
            "notes": self.notes,
        })

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
