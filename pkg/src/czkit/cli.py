"""czkit command line: batch entry points over measure/function JSON files.

Exit codes: 0 all assertions passed, 2 a guaranteed property failed,
3 I/O or schema error.  Floats serialize with 17 significant digits so
artifacts round-trip bit-exactly.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import corpus as corpus_mod
from .constants import ConstantsLedger, load_frozen
from .cubes import Cube, canonical_family, delta
from .czdecomp import cz_decompose
from .errors import CzkitError, PropertyViolated, SchemaError
from .mainlemma import MainParams, decompose_main, verify_claims
from .maximal import grand_maximal_lower, grand_maximal_upper, hl_maximal
from .measure import (generate_measure, growth_constant, load_measure,
                      save_measure)
from .spaces import jn_profile, load_function, rbmo_norm

EXIT_OK = 0
EXIT_PROPERTY = 2
EXIT_IO = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def cmd_gen(args) -> int:
    params = json.loads(args.params) if args.params else {}
    if args.kind == "cantor" and args.depth is not None:
        params.setdefault("depth", args.depth)
    mu = generate_measure(args.kind, params, seed=args.seed)
    save_measure(mu, args.out)
    print(f"wrote {args.out} ({mu.size} atoms, d={mu.dim}, n={mu.growth_exponent:g})")
    return EXIT_OK


def cmd_analyze(args) -> int:
    mu = load_measure(args.measure)
    rep = growth_constant(mu)
    payload = {
        "atoms": mu.size,
        "dim": mu.dim,
        "n": mu.growth_exponent,
        "total_mass": mu.total_mass,
        "ball_constant": rep.ball_constant,
        "cube_constant": rep.cube_constant,
        "degenerate": rep.degenerate,
    }
    print(json.dumps(payload, indent=1))
    if args.out:
        fam = canonical_family(mu, doubling_only=False)
        rows = []
        for Q in fam[: args.limit]:
            for R in fam[: args.limit]:
                if Q is R:
                    continue
                rows.append((*[float(v) for v in Q.center], Q.side,
                             *[float(v) for v in R.center], R.side,
                             delta(mu, Q, R)))
        _write_csv(args.out, ["zQ"] * mu.dim + ["lQ"] + ["zR"] * mu.dim + ["lR", "delta"],
                   rows)
        print(f"wrote delta table {args.out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_maximal(args) -> int:
    mu = load_measure(args.measure)
    f = load_function(args.function)
    rows = []
    for qi in range(mu.size):
        x = mu.points[qi]
        if args.op == "grand":
            lo, _ = grand_maximal_lower(mu, f, x)
            up, _ = grand_maximal_upper(mu, f, x)
        else:
            lo = up = hl_maximal(mu, f, x, rho=args.rho, centered_variant=True)
        rows.append((*[float(v) for v in x], lo, up))
    _write_csv(args.out, ["x"] * mu.dim + ["lower", "upper"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_rbmo(args) -> int:
    mu = load_measure(args.measure)
    f = load_function(args.function)
    est = rbmo_norm(mu, f)
    print(json.dumps({"rbmo_norm": est.value,
                      "family_size": est.cube_family_size}, indent=1))
    if args.out:
        fam = canonical_family(mu)
        best = max(fam, key=lambda q: q.side)
        lams = np.linspace(0.0, 3.0 * max(est.value, 1e-12), 25)[1:]
        prof = jn_profile(mu, f, best, lams)
        _write_csv(args.out, ["lambda", "fraction"], prof)
        print(f"wrote JN profile {args.out}")
    return EXIT_OK


def cmd_czd(args) -> int:
    mu = load_measure(args.measure)
    f = load_function(args.function)
    dec = cz_decompose(mu, f, args.lam)
    rep = dec.invariant_report(mu, f)
    payload = {
        "lambda": args.lam,
        "omega_size": int(len(dec.omega)),
        "whitney_cubes": len(dec.whitney.cubes),
        "constants": dec.constants,
        "invariants": rep,
        "g": [float(v) for v in dec.g],
        "b": [float(v) for v in dec.b],
        "hosts": [{"center": [float(c) for c in h.center], "side": h.side}
                  for h in dec.hosts],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=1)
    print(f"wrote {args.out}; invariants: {rep}")
    return EXIT_OK if all(rep.values()) else EXIT_PROPERTY


def cmd_mainlemma(args) -> int:
    mu = load_measure(args.measure)
    f = load_function(args.function)
    if args.R0 == "auto":
        R0 = corpus_mod.bounding_cube(mu)
    else:
        spec = json.loads(args.R0)
        R0 = Cube(np.asarray(spec["center"], dtype=float), float(spec["side"]))
    if args.params:
        with open(args.params) as fh:
            pd = json.load(fh)
        params = MainParams(**pd)
    else:
        params = MainParams.derive(mu, R0)
    dec = decompose_main(mu, f, R0, params)
    report = verify_claims(dec, load_frozen() or None)
    ledger = ConstantsLedger()
    for tag, val in dec.ledger.items():
        if isinstance(val, (int, float)):
            ledger.record(tag, float(val), "decompose_main")
    payload = {
        "params": {"A": params.A, "alpha1": params.alpha1, "alpha2": params.alpha2,
                   "alpha3": params.alpha3, "sigma": params.sigma, "eps3": params.eps3},
        "generations": dec.ledger["M_max"],
        "retries_used": dec.retries_used,
        "h0": [float(v) for v in dec.h0],
        "claims": {tag: {"passed": entry["passed"], "achieved": entry["achieved"]}
                   for tag, entry in report.items()},
        "ledger": ledger.to_json(),
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=1)
    ok = all(entry["passed"] for entry in report.values())
    print(f"wrote {args.out}; claims {'all pass' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_verify(args) -> int:
    from . import verify as verify_mod
    frozen = load_frozen()
    names = list(verify_mod.ALL_SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        suite = verify_mod.ALL_SUITES.get(name)
        if suite is None:
            print(f"unknown suite {name!r}; choices: {sorted(verify_mod.ALL_SUITES)}")
            return EXIT_IO
        achieved = suite(frozen=frozen or None)
        print(f"suite {name}: PASS {achieved}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="czkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a corpus measure")
    g.add_argument("--kind", required=True, choices=["grid", "cantor", "clustered"])
    g.add_argument("--depth", type=int, default=None)
    g.add_argument("--params", default=None, help="JSON generator settings")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen)

    a = sub.add_parser("analyze", help="growth constants and delta table")
    a.add_argument("--measure", required=True)
    a.add_argument("--out", default=None, help="CSV delta table")
    a.add_argument("--limit", type=int, default=40)
    a.set_defaults(fn=cmd_analyze)

    m = sub.add_parser("maximal", help="maximal operator fields")
    m.add_argument("--measure", required=True)
    m.add_argument("--function", required=True)
    m.add_argument("--op", choices=["grand", "hl"], default="grand")
    m.add_argument("--rho", type=float, default=2.0)
    m.add_argument("--out", required=True)
    m.set_defaults(fn=cmd_maximal)

    r = sub.add_parser("rbmo", help="RBMO norm and JN profile")
    r.add_argument("--measure", required=True)
    r.add_argument("--function", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(fn=cmd_rbmo)

    c = sub.add_parser("czd", help="Calderon-Zygmund decomposition")
    c.add_argument("--measure", required=True)
    c.add_argument("--function", required=True)
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(fn=cmd_czd)

    ml = sub.add_parser("mainlemma", help="run the decomposition engine")
    ml.add_argument("--measure", required=True)
    ml.add_argument("--function", required=True)
    ml.add_argument("--R0", default="auto")
    ml.add_argument("--params", default=None, help="JSON MainParams file")
    ml.add_argument("--out", required=True)
    ml.set_defaults(fn=cmd_mainlemma)

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("--suite", default="all")
    v.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, SchemaError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PropertyViolated as exc:
        print(f"property violated: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except CzkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
