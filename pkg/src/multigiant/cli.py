"""Command-line entry point: ``multigiant <subcommand> ...``.

Exit codes: 0 on success / PASS, 2 on a FAIL verdict, 1 on error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import _kernels
from .branching import build_offspring_law, extinction_fixed_point, survival_monte_carlo
from .configuration import sample_configuration, sample_simple
from .degrees import (load_sequence, load_spec, realize_sequence, sequence_stats,
                      validate_spec)
from .experiments import ExperimentPlan, run_sweep, run_trials, run_verdict, trials_csv
from .meanmatrix import bipartite_criterion, build_mean_matrix, check_irreducible, perron_eigenpair
from .rng import child


def _int_list(text: str) -> List[int]:
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _param_list(text: str) -> list:
    out = []
    for x in text.split(","):
        x = x.strip()
        if x:
            out.append(Fraction(x) if "/" in x else float(x))
    return out


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2, default=str))


def _write(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    if args.seq:
        seq = load_sequence(args.seq)
        stats = sequence_stats(seq)
        doc = {"ok": not seq.symmetry_violations(), "errors": seq.symmetry_violations(),
               **stats.to_dict()}
    else:
        report = validate_spec(load_spec(args.spec))
        doc = report.to_dict()
    _emit(doc)
    return 0 if doc["ok"] else 2


def cmd_analyze(args) -> int:
    spec = load_spec(args.spec)
    report = validate_spec(spec)
    if not report.ok:
        _emit({"ok": False, "errors": report.errors})
        return 1
    M = build_mean_matrix(spec)
    irr = check_irreducible(M)
    doc = {
        "index": [list(p) for p in M.index],
        "matrix": M.entries.tolist(),
        "irreducible": irr.irreducible,
        "components": [[list(p) for p in c] for c in irr.components],
        "gamma": None,
        "regime": None,
        "left_vector": None,
    }
    if irr.irreducible:
        res = perron_eigenpair(M, tol=args.tol)
        doc.update(gamma=res.gamma, regime=res.regime, left_vector=res.left_vector.tolist(),
                   residual=res.residual)
    try:
        newman = bipartite_criterion(spec)
    except ValueError:
        pass
    else:
        doc["newman_sum"] = float(newman)
    _emit(doc)
    return 0


def cmd_bp(args) -> int:
    spec = load_spec(args.spec)
    law = build_offspring_law(spec)
    sol = extinction_fixed_point(law, tol=args.tol)
    doc = {"index": [list(p) for p in law.index], "q": sol.q.tolist(), "eta": sol.eta,
           "iterations": sol.iterations, "residual": sol.residual}
    if args.trials:
        mc = survival_monte_carlo(law, args.trials, args.cap, args.seed, args.workers)
        doc.update(mc_survival=mc.frequency, stderr=mc.stderr, trials=mc.trials, cap=mc.cap)
    _emit(doc)
    return 0


def _sequence_from_args(args):
    if args.seq:
        return load_sequence(args.seq)
    if not args.spec or not args.n:
        raise SystemExit("either --seq or both --spec and --n are required")
    return realize_sequence(load_spec(args.spec), args.n)


def cmd_sample(args) -> int:
    seq = _sequence_from_args(args)
    rng = child(args.seed, "graph/0")
    if args.simple:
        g, attempts = sample_simple(seq, rng, args.max_attempts)
    else:
        g, attempts = sample_configuration(seq, rng), 1
    lines = [json.dumps({"n": g.n, "seed": args.seed, "attempts": attempts})]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args) -> int:
    spec = load_spec(args.spec)
    seq = realize_sequence(spec, args.n)
    results = run_trials(seq, args.trials, args.seed, args.simple, args.max_attempts, args.workers)
    _write(args.out, trials_csv(results, spec.parts))
    return 0


def cmd_verdict(args) -> int:
    plan = ExperimentPlan(load_spec(args.spec), tuple(_int_list(args.n)), args.trials, args.seed,
                          args.simple, spec_path=args.spec, out=args.out,
                          max_attempts=args.max_attempts, workers=args.workers, tol=args.tol)
    report = run_verdict(plan)
    if args.out:
        _write(args.out, report.csv())
    _emit(report.to_dict())
    return 0 if report.passed else 2


def cmd_sweep(args) -> int:
    text = run_sweep(load_spec(args.spec), load_spec(args.spec_to), _param_list(args.grid),
                     _int_list(args.n), args.trials, args.seed, args.simple, args.workers,
                     args.max_attempts)
    _write(args.out, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multigiant", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s ({_kernels.BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a spec or sequence file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--spec")
    g.add_argument("--seq")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="mean matrix, irreducibility, Perron eigenpair")
    p.add_argument("--spec", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bp", help="extinction fixed point and Monte Carlo survival")
    p.add_argument("--spec", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bp)

    p = sub.add_parser("sample", help="write one configuration-model edge list")
    p.add_argument("--seq")
    p.add_argument("--spec")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="per-trial component sizes as CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verdict", help="analytic regime checked against simulation")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", default="10000,100000", help="comma-separated increasing n grid")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", help="per-n summary CSV")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("sweep", help="interpolate between two specs")
    p.add_argument("--spec", required=True, help="spec at t = 0")
    p.add_argument("--spec-to", required=True, help="spec at t = 1")
    p.add_argument("--grid", required=True, help="comma-separated t values ('a/b' allowed)")
    p.add_argument("--n", default="10000")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
