"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the terminal summary (see ``conftest.py``) and also
to stdout, so ``pytest -s`` shows them inline.
"""
import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

import univcheck.decision as decision
from conftest import ACCEPTANCE, baseline_violations
from univcheck.decision import (
    COMPLETE,
    INCOMPLETE,
    NOT_UNIVERSAL,
    UNCERTAIN,
    CompletenessVerdict,
    check_complete,
    check_N_universal,
    check_universal,
    theoretical_bound,
)
from univcheck.gateset import GateSet, builtin_gate, gateset_from_names
from univcheck.hilbert import (
    GradedIdeal,
    RegularityBoundViolated,
    correspondence_check,
    hilbert_table,
    monomials,
    regularity_and_dimension,
)
from univcheck.invariants import (
    finite_group_m2k,
    gl_baseline,
    haar_oracle,
    haar_unitary,
    m2k,
)


def record(name, ok, detail):
    ACCEPTANCE.append((name, bool(ok), detail))
    print(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# --- criterion 1 -------------------------------------------------------------------


def haar_pairs(limit=4096):
    pairs = []
    for m in range(1, limit + 1):
        ks = [k for k in range(1, 7) if m ** (2 * k) <= limit]
        if not ks:
            break
        pairs += [(m, k) for k in ks]
    return pairs


def test_criterion_1_baselines():
    start = time.perf_counter()
    closed = all(gl_baseline(m, 4) == 24 for m in range(4, 9))
    closed &= all(gl_baseline(m, 2) == 2 for m in range(2, 65))
    derived = (gl_baseline(2, 4), gl_baseline(3, 4), gl_baseline(2, 6)) == (14, 23, 132)
    # every (m, k) with m^{2k} <= 4096, plus (3, 4) which is named explicitly
    pairs = haar_pairs() + [(3, 4)]
    mismatches = [(m, k) for m, k in pairs if haar_oracle(m, k, seed=m * 10 + k) != gl_baseline(m, k)]
    elapsed = time.perf_counter() - start
    ok = closed and derived and not mismatches and elapsed < 60
    record("criterion 1 (baselines)", ok,
           f"{len(pairs)} haar pairs, mismatches {mismatches}, derived 14/23/132 {derived}, {elapsed:.1f}s")


# --- criterion 2 -------------------------------------------------------------------


def test_criterion_2_single_qubit_completeness():
    start = time.perf_counter()
    ht = check_complete(gateset_from_names(["H", "T"]))
    hs = check_complete(gateset_from_names(["H", "S"]))
    dense = m2k([builtin_gate("H").matrix, builtin_gate("S").matrix], 6, method="dense-svd")
    finite = finite_group_m2k([builtin_gate("H").matrix, builtin_gate("S").matrix], 6)
    elapsed = time.perf_counter() - start
    ok = (ht.status == COMPLETE and ht.measured == 132 and hs.status == INCOMPLETE
          and dense.certain and dense.value == finite == hs.measured and elapsed < 120)
    record("criterion 2 (D=2 completeness)", ok,
           f"{{H,T}} {ht.status} {ht.measured}; {{H,S}} {hs.status} dense {dense.value} "
           f"character {finite}; {elapsed:.1f}s")


# --- criterion 3 -------------------------------------------------------------------


def test_criterion_3_two_qubit_completeness():
    gates = GateSet(2, 2, tuple(builtin_gate(g, n=2) for g in ("H", "T", "CNOT")))
    start = time.perf_counter()
    # the criterion's runtime limit doubles as the iteration's wall-clock limit
    v = check_complete(gates, method="iterative", shortcut=False, max_seconds=900)
    elapsed = time.perf_counter() - start
    gap = v.report.gap_ratio if v.report is not None else float("nan")
    ok = v.status == COMPLETE and v.measured == 24 and gap >= 1e3 and elapsed < 900
    record("criterion 3 (D=4 completeness)", ok,
           f"{v.status} measured {v.measured} baseline {v.baseline} gap {gap:.3g} "
           f"[{None if v.report is None else v.report.method}] {elapsed:.0f}s "
           f"{'' if v.report is None else v.report.note}".rstrip())


# --- criterion 4 -------------------------------------------------------------------


def test_criterion_4_universality():
    start = time.perf_counter()
    htc = check_universal(gateset_from_names(["H", "T", "CNOT"]), capN=2)
    h = [check_universal(gateset_from_names(["H"]), capN=c) for c in (1, 2, 3, 10)]
    ht = check_N_universal(gateset_from_names(["H", "T"]), 2)
    elapsed = time.perf_counter() - start
    ok = (htc.label == "Universal(2)" and htc.theoretical_bound == 257
          and all(v.label == "NotUniversal(one-qudit)" for v in h)
          and ht.status == INCOMPLETE and ht.measured > 24 and elapsed < 1200)
    record("criterion 4 (universality)", ok,
           f"{{H,T,CNOT}} {htc.label} bound {htc.theoretical_bound}; {{H}} {h[0].label}; "
           f"{{H,T}} at N=2 {ht.status} {ht.measured}; {elapsed:.1f}s")


# --- criterion 5 -------------------------------------------------------------------


def _scripted_sweep(monkeypatch, statuses, n, capN):
    """Run check_universal with per-level verdicts taken from ``statuses``."""

    def fake(gateset, N, **kwargs):
        s = statuses[(N - n) % len(statuses)]
        measured = {COMPLETE: 24, INCOMPLETE: 30, UNCERTAIN: None}[s]
        return CompletenessVerdict(s, 4, measured, 24, None, N)

    monkeypatch.setattr(decision, "check_N_universal", fake)
    gs = gateset_from_names(["CNOT"] if n == 2 else ["TOFFOLI"], n=n)
    return check_universal(gs, capN=capN)


def _not_universal_is_justified(v, n):
    if v.status != NOT_UNIVERSAL:
        return True
    if v.reason == "one-qudit":
        return n == 1
    return (v.reason == "bound-exhausted"
            and [p.N for p in v.per_N] == list(range(n, v.theoretical_bound + 1))
            and all(p.status == INCOMPLETE for p in v.per_N))


def test_criterion_5_bound_and_not_universal_rule(monkeypatch):
    failures = []
    bound_ok = theoretical_bound(2, 2) == 257 == 2**8 * 1 + 1

    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(statuses=st.lists(st.sampled_from([INCOMPLETE, INCOMPLETE, INCOMPLETE, COMPLETE, UNCERTAIN]),
                             min_size=1, max_size=6),
           n=st.sampled_from([2, 3]), capN=st.integers(3, 700))
    def prop(statuses, n, capN):
        with monkeypatch.context() as mp:
            v = _scripted_sweep(mp, statuses, n, capN)
        if not _not_universal_is_justified(v, n) or v.theoretical_bound != 2**8 * (n - 1) + 1:
            failures.append((statuses, n, capN, v.label))

    prop()
    # all-Incomplete sweeps: NotUniversal exactly when the cap reaches the bound
    with monkeypatch.context() as mp:
        exhausted = _scripted_sweep(mp, [INCOMPLETE], 2, 300)
    with monkeypatch.context() as mp:
        short = _scripted_sweep(mp, [INCOMPLETE], 2, 256)
    one = check_universal(gateset_from_names(["H", "T"]), capN=5)
    ok = (bound_ok and not failures and exhausted.label == "NotUniversal(bound-exhausted)"
          and len(exhausted.per_N) == 256 and short.label == "Inconclusive(256)"
          and one.label == "NotUniversal(one-qudit)")
    record("criterion 5 (bound 257, NotUniversal rule)", ok,
           f"bound {theoretical_bound(2, 2)}; scripted sweeps violating the rule: {len(failures)}; "
           f"full sweep {exhausted.label}, cap 256 {short.label}")


# --- criterion 6 -------------------------------------------------------------------


def test_criterion_6_correspondence():
    start = time.perf_counter()
    trivial = []
    for N in range(1, 7):
        trivial.append(correspondence_check([np.eye(2)], N, 2))
        trivial.append(correspondence_check([np.diag([1.0, -1.0])], N, 2))
    random_pairs = []
    for seed in range(20):
        g = haar_unitary(4, np.random.default_rng(1000 + seed))
        for N in (2, 3, 4):
            random_pairs.append(correspondence_check([g], N, 2))
    elapsed = time.perf_counter() - start
    bad = [p for p in trivial + random_pairs if p[0] != p[1]]
    ok = not bad and elapsed < 300
    values = sorted({p[0] for p in random_pairs})
    record("criterion 6 (correspondence)", ok,
           f"{len(trivial)} trivial + {len(random_pairs)} random instances, unequal {bad}, "
           f"random-group values {values}, {elapsed:.1f}s")


# --- criterion 7 -------------------------------------------------------------------


def random_zero_dimensional_ideal(rng):
    m, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    mons = monomials(m, n)
    size = len(mons)
    kind = rng.integers(3)
    if kind == 0:
        # generic forms: at least m - 1 of them cut out finitely many points
        g = int(rng.integers(max(1, m - 1), size + 1))
        rows = rng.normal(size=(g, size)) + 1j * rng.normal(size=(g, size))
    else:
        # monomial or sparse ideals containing pure powers of all but at most one variable
        skip = int(rng.integers(m)) if m > 1 else -1
        pure = [tuple(n if i == v else 0 for i in range(m)) for v in range(m) if v != skip]
        extra = [mons[i] for i in rng.choice(size, size=int(rng.integers(0, size + 1)), replace=False)]
        chosen = list(dict.fromkeys(pure + extra)) or [mons[0]]
        rows = np.zeros((len(chosen), size), dtype=complex)
        for r, e in enumerate(chosen):
            rows[r, mons.index(e)] = 1
        if kind == 2:
            # mix rows with a triangular change of generators
            mix = np.triu(rng.normal(size=(len(chosen),) * 2)) + np.eye(len(chosen))
            rows = mix @ rows
    return GradedIdeal.from_rows(m, n, rows)


def test_criterion_7_lazard():
    rng = np.random.default_rng(20240607)
    start = time.perf_counter()
    bad, worst = [], 0
    for _ in range(200):
        J = random_zero_dimensional_ideal(rng)
        bound = J.m * (J.n - 1) + 1
        table = hilbert_table(J, bound + 2)
        try:
            reg, dim = regularity_and_dimension(table, J.m, J.n)
        except RegularityBoundViolated as exc:
            bad.append((J.m, J.n, str(exc)))
            continue
        if dim != 0 or reg > bound:
            bad.append((J.m, J.n, table.values, reg, dim))
        worst = max(worst, reg - bound)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    record("criterion 7 (Lazard bound)", ok,
           f"200 ideals, violations {bad[:3]}, max(regularity - bound) = {worst}, {elapsed:.1f}s")


# --- criterion 8 -------------------------------------------------------------------


NAMED = {2: ["H", "S", "T", "X", "Z", "Y"], 4: ["CNOT", "CZ", "SWAP"]}


def random_gate_set(rng, D):
    kind = rng.integers(3)
    gates = []
    for _ in range(int(rng.integers(1, 4))):
        if kind == 0:
            P = np.eye(D)[rng.permutation(D)]
            gates.append(P * np.exp(2j * np.pi * rng.integers(0, 8, size=D) / 8))
        elif kind == 1:
            if D == 2:
                gates.append(builtin_gate(NAMED[2][rng.integers(6)]).matrix)
            else:
                one = builtin_gate(NAMED[2][rng.integers(6)]).matrix
                gates.append(np.kron(one, np.eye(2)) if rng.random() < 0.5 else builtin_gate(NAMED[4][rng.integers(3)]).matrix)
        else:
            # block-diagonal unitaries: infinite groups with extra invariants
            h = D // 2
            blocks = [haar_unitary(h, rng), haar_unitary(h, rng)]
            gates.append(np.block([[blocks[0], np.zeros((h, h))], [np.zeros((h, h)), blocks[1]]]))
    return gates


def test_criterion_8_invariance():
    rng = np.random.default_rng(8)
    phase_bad, basis_bad, mono_bad, uncertain = [], [], [], 0
    values = set()
    for trial in range(50):
        D, k = int(rng.choice([2, 4])), int(rng.integers(1, 3))
        gates = random_gate_set(rng, D)
        base = m2k(gates, k)
        values.add(base.value)
        phased = m2k([np.exp(2j * np.pi * rng.random()) * g for g in gates], k)
        if phased.value != base.value:
            phase_bad.append((trial, base.value, phased.value))
        q = haar_unitary(D, rng)
        rotated = m2k([q @ g @ q.conj().T for g in gates], k)
        if rotated.value != base.value:
            basis_bad.append((trial, base.value, rotated.value))
        bigger = m2k(gates + random_gate_set(rng, D)[:1], k)
        if bigger.value > base.value:
            mono_bad.append((trial, base.value, bigger.value))
        uncertain += sum(not r.certain for r in (base, phased, rotated, bigger))
    violations = baseline_violations()
    ok = not (phase_bad or basis_bad or mono_bad or violations or uncertain)
    record("criterion 8 (invariance suites)", ok,
           f"50 trials each: phase {len(phase_bad)} / basis {len(basis_bad)} / monotonicity "
           f"{len(mono_bad)} failures, {uncertain} uncertain, {len(set(values))} distinct values; "
           f"baseline violations so far {len(violations)} (run-wide check in summary)")
