"""Invariants as polynomials.

Symmetrizing the vectors orthogonal to the invariants of a group G on C^m
gives a homogeneous ideal J in m variables.  In degree N, the number of
monomials not reached by J equals the number of G-invariant symmetric
tensors of order N.  The Hilbert function of J also stabilizes early: for an
ideal generated in degree n with finitely many projective zeros, it reaches its
eventual value by degree m(n-1)+1.
"""
import numpy as np

from univcheck.gateset import builtin_gate
from univcheck.hilbert import GradedIdeal, correspondence_check, hilbert_table, ideal_of_group

Z = builtin_gate("Z").matrix
SWAP = builtin_gate("SWAP").matrix

print("invariants vs monomials outside the ideal")
for label, ops, m in (("diag(1,-1) on C^2", [Z], 2), ("SWAP on C^4", [SWAP], 4),
                      ("Z⊗Z on C^4", [np.kron(Z, Z)], 4)):
    row = [correspondence_check(ops, N, m) for N in range(1, 5)]
    print(f"  {label:<18} " + "  ".join(f"N={N}: {a}={b}" for N, (a, b) in enumerate(row, 1)))

J = ideal_of_group([np.kron(Z, Z)], 4, 1)
t = hilbert_table(J, 8)
print(f"\nideal of <Z⊗Z>: {len(J.generators.vectors)} linear generators")
print(f"  h(N) = {list(t.values)}")
print(f"  regularity {t.regularity}, projective dimension {t.dimension}")

# three quadrics in two variables cut out nothing: h drops to 0 after degree 1
t = hilbert_table(GradedIdeal.from_monomials(2, 2, [(2, 0), (1, 1), (0, 2)]), 5)
print(f"\n(x^2, xy, y^2): h = {list(t.values)}, regularity {t.regularity} <= m(n-1)+1 = 3")
