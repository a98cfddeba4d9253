"""Calibration run: execute every suite in record mode on the committed
corpus and freeze the achieved constants into ``_calibration.json``.

Run once with ``python -m czkit.calibration``; the acceptance suite then
compares future runs against the frozen values (regression headroom is the
acceptance criteria's business, not this file's).
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

from . import verify


def run(out_path: str | None = None, verbose: bool = True) -> dict:
    frozen: dict = {}
    for name, suite in verify.ALL_SUITES.items():
        t0 = time.time()
        achieved = suite(frozen=None)
        for key, val in achieved.items():
            if key in frozen:
                frozen[key] = max(frozen[key], float(val))
            else:
                frozen[key] = float(val)
        if verbose:
            print(f"[calibration] {name}: {achieved} ({time.time() - t0:.1f}s)")
    if out_path is None:
        out_path = Path(__file__).parent / "_calibration.json"
    with open(out_path, "w") as fh:
        json.dump({k: frozen[k] for k in sorted(frozen)}, fh, indent=1)
        fh.write("\n")
    if verbose:
        print(f"[calibration] wrote {out_path}")
    return frozen


if __name__ == "__main__":
    run(sys.argv[1] if len(sys.argv) > 1 else None)
