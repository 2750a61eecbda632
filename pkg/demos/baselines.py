"""How many invariants does the full unitary group have?

For a group G acting on C^m, M_2k(G) counts the independent vectors fixed by
g^{⊗k} ⊗ conj(g)^{⊗k} for every g in G.  For the whole unitary group this
number has a closed form (a sum of squared standard Young tableau counts).
Here we print that closed form and check it by brute force: a few random
Haar unitaries already generate a dense subgroup, so their common fixed space
has the same dimension.
"""
from univcheck.invariants import gl_baseline, haar_oracle

print("closed-form baselines gl_baseline(m, k)")
print("  m \\ k " + "".join(f"{k:>7d}" for k in range(1, 7)))
for m in range(1, 6):
    print(f"  {m:>5d} " + "".join(f"{gl_baseline(m, k):>7d}" for k in range(1, 7)))

# once m >= k the value stops growing and equals k!
print("\nk! appears once m >= k:", [gl_baseline(8, k) for k in range(1, 5)])

# for a qubit the baselines are the Catalan numbers
print("qubit baselines (Catalan):", [gl_baseline(2, k) for k in range(1, 7)])

print("\nbrute force with three Haar unitaries")
for m, k in [(2, 2), (2, 4), (3, 2), (2, 6), (4, 3)]:
    value = haar_oracle(m, k, seed=7)
    print(f"  m={m} k={k}: fixed space {value:>4d}, closed form {gl_baseline(m, k):>4d}")
