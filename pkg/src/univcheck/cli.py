"""Command-line interface.

Exit codes: 0 when a decision was reached, 2 for Uncertain or Inconclusive
outcomes, 1 for input or resource errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from univcheck import __version__
from univcheck.decision import (
    UNCERTAIN,
    INCONCLUSIVE,
    check_complete,
    check_universal,
    lifted_m2k,
    theoretical_bound,
)
from univcheck.gateset import GateError, GateSet, parse_gateset, universality_generators
from univcheck.hilbert import SizeOverLimit, correspondence_check, hilbert_table, parse_ideal
from univcheck.invariants import ZERO_TOL, gl_baseline, m2k
from univcheck.tensorop import MemoryBudgetExceeded

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2

GATE_SCHEMA = """gate file (JSON):
  {"d": 2, "arity": 2, "gates": [{"name": "H"}, {"name": "T"}, {"name": "CNOT"},
    {"name": "custom", "label": "my_gate", "matrix": [[[re, im], ...], ...]}]}
  built-in names: I X Y Z H S T CNOT CZ SWAP TOFFOLI SHIFT CLOCK"""

IDEAL_SCHEMA = """ideal file (JSON):
  {"m": 2, "n": 2, "generators": [{"monomial_exponents_to_coeff": [[[2, 0], [1.0, 0.0]]]}]}"""


def _report(command: str, args, **fields) -> dict:
    out = {
        "command": command,
        "status": None,
        "k": None,
        "measured": None,
        "baseline": None,
        "gap_ratio": None,
        "bound": None,
        "per_N": [],
        "seed": args.seed,
        "version": __version__,
    }
    out.update(fields)
    return out


def _read_gates(path: str) -> GateSet:
    return parse_gateset(Path(path).read_text())


def _common(args) -> dict:
    return {"method": args.method, "seed": args.seed, "budget": args.mem_budget_mb * 2**20}


def _cmd_check_complete(args):
    gs = _read_gates(args.gates)
    v = check_complete(gs, tol=args.tol, **_common(args))
    gap = v.report.gap_ratio if v.report is not None else None
    rep = _report("check-complete", args, status=v.status, k=v.k_used, measured=v.measured,
                  baseline=v.baseline, gap_ratio=gap, bound=theoretical_bound(gs.d, gs.n),
                  method=None if v.report is None else v.report.method, note=v.note)
    return rep, EXIT_UNDECIDED if v.status == UNCERTAIN else EXIT_DECIDED


def _cmd_check_universal(args):
    gs = _read_gates(args.gates)
    v = check_universal(gs, capN=args.max_N, tol=args.tol, **_common(args))
    last = v.per_N[-1] if v.per_N else None
    rep = _report(
        "check-universal", args, status=v.label,
        k=None if last is None else last.k_used,
        measured=None if last is None else last.measured,
        baseline=None if last is None else last.baseline,
        gap_ratio=None if last is None or last.report is None else last.report.gap_ratio,
        bound=v.theoretical_bound,
        per_N=[p.to_dict() for p in v.per_N],
    )
    return rep, EXIT_UNDECIDED if v.status == INCONCLUSIVE else EXIT_DECIDED


def _cmd_invariant_dim(args):
    gs = _read_gates(args.gates)
    gates = list(gs) if args.N is None else universality_generators(gs, args.N)
    D = gs.d ** (gs.n if args.N is None else args.N)
    budget = args.mem_budget_mb * 2**20
    r = None
    if args.N is not None and args.N > gs.n and args.method in ("auto", "lift"):
        try:
            r = lifted_m2k(gs, args.N, args.k, seed=args.seed, budget=budget, tol=args.tol)
        except MemoryBudgetExceeded:
            if args.method == "lift":
                raise
    if r is None:
        method = "auto" if args.method == "lift" else args.method
        r = m2k(gates, args.k, method=method, seed=args.seed, tol=args.tol, budget=budget)
    rep = _report("invariant-dim", args, status="certain" if r.certain else UNCERTAIN, k=args.k,
                  measured=r.value, baseline=gl_baseline(D, args.k), gap_ratio=r.gap_ratio,
                  method=r.method, total_dim=r.total_dim)
    return rep, EXIT_DECIDED if r.certain else EXIT_UNDECIDED


def _cmd_gl_baseline(args):
    value = gl_baseline(args.m, args.k)
    return _report("gl-baseline", args, status="ok", k=args.k, baseline=value, measured=value), EXIT_DECIDED


def _cmd_hilbert(args):
    J = parse_ideal(Path(args.ideal).read_text())
    t = hilbert_table(J, args.up_to)
    poly = None if t.eventual_polynomial is None else [str(c) for c in t.eventual_polynomial]
    rep = _report("hilbert", args, status="stabilized" if t.regularity is not None else "tail-not-stabilized",
                  values=list(t.values), regularity=t.regularity, dimension=t.dimension,
                  eventual_polynomial=poly, bound=J.m * (J.n - 1) + 1)
    return rep, EXIT_DECIDED if t.regularity is not None else EXIT_UNDECIDED


def _cmd_correspondence(args):
    gs = _read_gates(args.group)
    method = "auto" if args.method == "lift" else args.method
    lhs, rhs = correspondence_check(gs.matrices(), args.N, gs.d, seed=args.seed, method=method)
    rep = _report("correspondence", args, status="equal" if lhs == rhs else "different", lhs=lhs, rhs=rhs)
    return rep, EXIT_DECIDED


COMMANDS = {
    "check-complete": _cmd_check_complete,
    "check-universal": _cmd_check_universal,
    "invariant-dim": _cmd_invariant_dim,
    "gl-baseline": _cmd_gl_baseline,
    "hilbert": _cmd_hilbert,
    "correspondence": _cmd_correspondence,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--method", default="auto",
                        choices=["auto", "dense", "dense-svd", "hermitian-dense", "iterative", "lift"])
    shared.add_argument("--tol", type=float, default=ZERO_TOL, help="relative zero threshold (default 1e-9)")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--format", choices=["json", "text"], default="text")
    shared.add_argument("--mem-budget-mb", type=int, default=4096)
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="univcheck",
        description="Decide completeness and universality of quantum gate sets.",
        epilog=GATE_SCHEMA + "\n" + IDEAL_SCHEMA,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-complete", parents=[shared], help="is the gate set complete on C^D?")
    p.add_argument("gates", help="gate file")
    p = sub.add_parser("check-universal", parents=[shared], help="sweep N-universality up to --max-N")
    p.add_argument("gates")
    p.add_argument("--max-N", dest="max_N", type=int, default=None, help="default: arity + 1")
    p = sub.add_parser("invariant-dim", parents=[shared], help="M_2k of the gates (or of Γ_N ∪ Σ with --N)")
    p.add_argument("gates")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, default=None)
    p = sub.add_parser("gl-baseline", parents=[shared], help="M_2k of the full linear group")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = sub.add_parser("hilbert", parents=[shared], help="Hilbert function table of a homogeneous ideal")
    p.add_argument("--ideal", required=True)
    p.add_argument("--up-to", dest="up_to", type=int, required=True)
    p = sub.add_parser("correspondence", parents=[shared],
                       help="compare invariant functionals with the Hilbert function")
    p.add_argument("--group", required=True, help="gate file whose gates generate G on W^{⊗n}")
    p.add_argument("--N", type=int, required=True)
    return parser


def _format_text(rep: dict) -> str:
    lines = [f"{rep['command']}: {rep['status']}"]
    if rep["command"] == "gl-baseline":
        return str(rep["baseline"])
    if rep["command"] == "hilbert":
        lines.append(f"  h(0..{len(rep['values']) - 1}) = {rep['values']}")
        lines.append(f"  regularity {rep['regularity']}, dimension {rep['dimension']}, "
                     f"Lazard bound {rep['bound']}")
        return "\n".join(lines)
    if rep["command"] == "correspondence":
        lines.append(f"  invariant functionals {rep['lhs']}, Hilbert function {rep['rhs']}")
        return "\n".join(lines)
    gap = rep["gap_ratio"]
    gap_s = "n/a" if gap is None else f"{gap:.3g}"
    lines.append(f"  measured {rep['measured']}  baseline {rep['baseline']}  (k={rep['k']})  "
                 f"gap ratio {gap_s}  theoretical bound {rep['bound']}")
    for entry in rep["per_N"]:
        g = entry["gap_ratio"]
        lines.append(f"  N={entry['N']}: {entry['status']} measured {entry['measured']} "
                     f"baseline {entry['baseline']} gap {'n/a' if g is None else f'{g:.3g}'} "
                     f"[{entry['method']}]")
    if rep.get("note"):
        lines.append(f"  note: {rep['note']}")
    return "\n".join(lines)


def run(argv=None) -> tuple[int, dict | None]:
    """Execute one command; return ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_DECIDED if exc.code == 0 else EXIT_ERROR), None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](args)
    except (GateError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.command in ("hilbert",):
            print(IDEAL_SCHEMA, file=sys.stderr)
        else:
            print(GATE_SCHEMA, file=sys.stderr)
        return EXIT_ERROR, None
    except (MemoryBudgetExceeded, SizeOverLimit, MemoryError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR, None
    rep["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
    if args.format == "json":
        print(json.dumps(rep, default=float))
    else:
        print(_format_text(rep))
    return code, rep


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
