"""Is a finite set of one-qubit gates enough to approximate every gate?

A qubit set is complete exactly when its sixth invariant count M_12 equals
132, the value for the full unitary group.  Any proper closed subgroup has
strictly more invariants.

{H, T} passes.  {H, S} generates the Clifford group, a finite group of 192
matrices, and fails; its invariant count can be read off two ways, by a
fixed-space computation and by averaging characters over the enumerated group.
"""
import time

from univcheck import check_complete, gateset_from_names
from univcheck.invariants import enumerate_group, finite_group_m2k

for names in (["H", "T"], ["H", "S"], ["T"], ["H", "T", "S"]):
    t0 = time.perf_counter()
    v = check_complete(gateset_from_names(names), shortcut=False)
    dt = time.perf_counter() - t0
    print(f"{'{' + ', '.join(names) + '}':<12} {v.status:<11} M_12 = {v.measured:<5d} "
          f"(baseline {v.baseline}, gap ratio {v.report.gap_ratio:.1e}, {dt:.1f} s)")

clifford = gateset_from_names(["H", "S"]).matrices()
group = enumerate_group(clifford)
print(f"\n<H, S> has {len(group)} elements; character average gives M_12 = {finite_group_m2k(clifford, 6)}")
