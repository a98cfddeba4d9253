"""The achieved-constants ledger and the frozen calibration thresholds.

Most constants of this theory are existential ("for A big enough",
"some constant C").  The package records every achieved value in a
ConstantsLedger at run time; the acceptance suite compares those against the
thresholds frozen in ``_calibration.json``, which the calibration run
(``python -m czkit.calibration``) computed once on the committed corpus.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources


@dataclass
class ConstantsLedger:
    """Named map of achieved constants with provenance."""

    entries: dict = field(default_factory=dict)

    def record(self, tag: str, value: float, provenance: str = "") -> float:
        cur = self.entries.get(tag)
        if cur is None or value > cur["value"]:
            self.entries[tag] = {"value": float(value), "provenance": provenance}
        return float(value)

    def value(self, tag: str, default: float = 0.0) -> float:
        hit = self.entries.get(tag)
        return hit["value"] if hit else default

    def merge(self, other: "ConstantsLedger") -> None:
        for tag, rec in other.entries.items():
            self.record(tag, rec["value"], rec["provenance"])

    def to_json(self) -> dict:
        return {tag: rec for tag, rec in sorted(self.entries.items())}


def load_frozen() -> dict:
    """The committed calibration thresholds (empty before the first run)."""
    try:
        payload = resources.files("czkit").joinpath("_calibration.json").read_text()
    except FileNotFoundError:
        return {}
    return json.loads(payload)


def frozen_threshold(frozen: dict, key: str, headroom: float = 1.0) -> float:
    """Threshold lookup; missing keys fail loudly rather than pass silently."""
    if key not in frozen:
        raise KeyError(
            f"calibration value {key!r} missing; run python -m czkit.calibration")
    return float(frozen[key]) * headroom
