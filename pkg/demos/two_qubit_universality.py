"""Universality of two-qubit gate sets.

A gate set acting on n wires is universal when, placed on N wires in every
position, it approximates every N-qubit unitary for all N.  It suffices to
check completeness of the placed gates together with the wire swaps at each
N up to a finite bound (257 for two-qubit gates), and in practice the first
complete level settles the question.

Run with --slow to also compute the case where the gates are not allowed to
move between wires: H and T on the first wire plus CNOT.  Without swaps the
second wire never sees anything but I and X, so that set is not complete
(M_8 = 340 instead of 24).  That computation takes a few minutes.
"""
import argparse
import time

from univcheck import check_complete, check_universal, gateset_from_names
from univcheck.gateset import GateSet, builtin_gate, extend_to_N

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--slow", action="store_true", help="include the fixed-wire 65536-dimensional case")
args = parser.parse_args()

for names, cap in ((["H", "T", "CNOT"], 2), (["H", "T"], 3), (["CNOT"], 3), (["H", "CZ"], 2)):
    t0 = time.perf_counter()
    v = check_universal(gateset_from_names(names), capN=cap)
    levels = ", ".join(f"N={p.N}: {p.status} ({p.measured})" for p in v.per_N) or "no level needed"
    print(f"{'{' + ', '.join(names) + '}':<14} {v.label:<24} bound {v.theoretical_bound:<4d} "
          f"[{levels}]  {time.perf_counter() - t0:.1f} s")

if args.slow:
    h, t = (extend_to_N(builtin_gate(n), 2) for n in ("H", "T"))
    fixed = GateSet(2, 2, (h, t, builtin_gate("CNOT")))
    t0 = time.perf_counter()
    v = check_complete(fixed, shortcut=False)
    print(f"\nH⊗I, T⊗I, CNOT without swaps: {v.status}, M_8 = {v.measured} "
          f"via {v.report.method} in {time.perf_counter() - t0:.0f} s")
