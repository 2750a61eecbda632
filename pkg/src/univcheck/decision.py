"""Completeness, N-universality and universality decisions.

A gate set on ``C^D`` is complete when its closed group has as few invariants
as the full group, measured by ``M_8`` (``M_12`` when ``D = 2``, where the
binary icosahedral group matches ``M_8`` of ``U_2``).  An ``n``-qudit set is
``N``-universal when the gates placed on the first ``n`` of ``N`` qudits
together with generators of the factor permutations form a complete set.

For ``N > n`` the direct computation quickly outgrows memory (``d = 2``,
``N = 3`` already needs vectors of length ``8^8``).  :func:`symmetric_lift`
climbs from ``N`` to ``N + 1`` inside ``Fix_N ⊗ W`` instead, where
``W = (C^d)^{⊗2k}`` collects the ``2k`` tensor slots of one qudit.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from univcheck.gateset import (
    DENSE_LIMIT,
    DimensionMismatch,
    FactorPermutation,
    GateSet,
    UnitaryGate,
    universality_generators,
)
from univcheck.invariants import (
    CERTAINTY_GAP,
    DEFAULT_CAP,
    ZERO_TOL,
    InvariantReport,
    NotClosed,
    _count_zero_cluster,
    finite_group_m2k,
    gl_baseline,
    m2k,
)
from univcheck.tensorop import MEMORY_BUDGET, MemoryBudgetExceeded

log = logging.getLogger(__name__)

COMPLETE = "Complete"
INCOMPLETE = "Incomplete"
UNCERTAIN = "Uncertain"

UNIVERSAL = "Universal"
NOT_UNIVERSAL = "NotUniversal"
INCONCLUSIVE = "Inconclusive"


def completeness_order(D: int) -> int:
    """``k`` of the moment ``M_2k`` that decides completeness on ``C^D``."""
    if D < 2:
        raise ValueError("completeness needs D >= 2")
    return 4 if D > 2 else 6


def regularity_bound(m: int, n: int) -> int:
    """Lazard's bound ``m(n-1) + 1`` on the regularity of a zero-dimensional ideal.

    With ``m = d^8`` this is the largest ``N`` a universality sweep needs.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    return m * (n - 1) + 1


def theoretical_bound(d: int, n: int) -> int:
    return regularity_bound(d ** 8, n)


@dataclass(frozen=True)
class CompletenessVerdict:
    status: str
    k_used: int
    measured: int | None
    baseline: int
    report: InvariantReport | None = field(default=None, compare=False)
    N: int | None = None
    note: str = ""

    @property
    def certain(self) -> bool:
        return self.status != UNCERTAIN

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "N": self.N,
            "k": self.k_used,
            "measured": self.measured,
            "baseline": self.baseline,
            "gap_ratio": None if self.report is None else self.report.gap_ratio,
            "method": None if self.report is None else self.report.method,
            "note": self.note,
        }


@dataclass(frozen=True)
class UniversalityVerdict:
    """``status`` is Universal (with ``N0``), NotUniversal (with ``reason``) or
    Inconclusive (with ``max_N_tried``)."""

    status: str
    theoretical_bound: int
    per_N: tuple[CompletenessVerdict, ...] = ()
    N0: int | None = None
    reason: str | None = None
    max_N_tried: int | None = None

    @property
    def label(self) -> str:
        if self.status == UNIVERSAL:
            return f"Universal({self.N0})"
        if self.status == NOT_UNIVERSAL:
            return f"NotUniversal({self.reason})"
        return f"Inconclusive({self.max_N_tried})"

    def to_dict(self) -> dict:
        return {
            "status": self.label,
            "theoretical_bound": self.theoretical_bound,
            "per_N": [v.to_dict() for v in self.per_N],
        }


def _verdict_from_report(report: InvariantReport, k: int, baseline: int, N=None, note="") -> CompletenessVerdict:
    if not report.certain:
        return CompletenessVerdict(UNCERTAIN, k, report.value, baseline, report, N, note or report.note)
    if report.value == baseline:
        status = COMPLETE
    elif report.value > baseline:
        status = INCOMPLETE
    else:
        status, note = UNCERTAIN, "measured below the GL baseline"
    return CompletenessVerdict(status, k, report.value, baseline, report, N, note or report.note)


def _gate_dim(g) -> int:
    return g.dim if isinstance(g, UnitaryGate) else np.asarray(g).shape[0]


def _dense(g) -> np.ndarray:
    return g.to_dense() if isinstance(g, UnitaryGate) else np.asarray(g, dtype=complex)


def finite_shortcut(gates: Sequence, k: int, cap: int = DEFAULT_CAP,
                    budget: int = MEMORY_BUDGET) -> InvariantReport | None:
    """Exact ``M_2k`` when the gates generate a finite group of at most ``cap`` elements.

    Returns None when the group does not close, or when enumerating ``cap``
    dense elements would use more than half the budget.
    """
    D = _gate_dim(gates[0])
    if D > DENSE_LIMIT or cap * D * D * 16 * 3 > budget // 2:
        return None
    try:
        value = finite_group_m2k([_dense(g) for g in gates], k, cap=cap)
    except (NotClosed, ArithmeticError):
        return None
    return InvariantReport(k, value, "finite-group-character", math.inf, 0.0, True, D ** (2 * k),
                           note="generated group is finite")


def check_complete(
    gates: GateSet | Sequence,
    method: str = "auto",
    seed: int = 0,
    budget: int = MEMORY_BUDGET,
    shortcut: bool = True,
    cap: int = DEFAULT_CAP,
    **kwargs,
) -> CompletenessVerdict:
    """Decide completeness of gates acting on ``C^D``.

    Parameters
    ----------
    gates : GateSet or sequence of UnitaryGate / arrays
    method : str
        Passed to :func:`univcheck.invariants.m2k`.
    shortcut : bool
        Try the finite-group character oracle first.  A finite group is never
        dense, so when it closes the verdict is an exact Incomplete.

    Returns
    -------
    CompletenessVerdict
        Uncertain when the numerics are ambiguous or the budget is exceeded.
    """
    gates = list(gates)
    if not gates:
        raise ValueError("need at least one gate")
    D = _gate_dim(gates[0])
    k = completeness_order(D)
    baseline = gl_baseline(D, k)
    if shortcut:
        report = finite_shortcut(gates, k, cap, budget)
        if report is not None and report.value > baseline:
            return _verdict_from_report(report, k, baseline)
    try:
        report = m2k(gates, k, method=method, seed=seed, budget=budget, **kwargs)
    except MemoryBudgetExceeded as exc:
        return CompletenessVerdict(UNCERTAIN, k, None, baseline, None, note=f"resources exhausted: {exc}")
    return _verdict_from_report(report, k, baseline)


# --- symmetric lift ---------------------------------------------------------


def qudit_major(basis: np.ndarray, d: int, N: int, k: int) -> np.ndarray:
    """Reorder rows from slot-major ``(2k slots) × (N qudits)`` to qudit-major.

    In the result each qudit's ``2k`` slot factors are adjacent, so a vector
    is an element of ``W^{⊗N}`` with ``W = (C^d)^{⊗2k}``.
    """
    f = basis.shape[0]
    t = basis.reshape((f,) + (d,) * (2 * k * N))
    axes = [0] + [1 + s * N + q for q in range(N) for s in range(2 * k)]
    return np.ascontiguousarray(np.transpose(t, axes)).reshape(f, d ** (2 * k * N))


def _marginal_restrict(G: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    """Rewrite ``G`` in an orthonormal basis of the last-qudit marginal.

    A fixed vector at the next level is symmetric in its last two qudits, so
    its last factor lives in the span of the last factors of the current
    basis.  That span is the range of ``M = Σ_a G[a, :, a, :]``.
    """
    M = np.einsum("axay->xy", G)
    lam, vecs = np.linalg.eigh((M + M.conj().T) / 2)
    lam = np.clip(lam, 0, None)
    zeros, gap = _count_zero_cluster(lam, tol)
    Q = vecs[:, zeros:].conj().T  # rows: coordinates of the marginal basis
    G = np.einsum("ix,axby,jy->aibj", Q, G, Q.conj(), optimize=True)
    return G, gap


def _lift_step(G: np.ndarray, tol: float, budget: int) -> tuple[np.ndarray, float]:
    """One level of the lift.

    ``G[a, x, b, y] = Σ_r conj(c_a[r, x]) c_b[r, y]``, where ``c_a[r, x]`` are
    the coordinates of an orthonormal basis ``F_a`` of the current fixed
    space (``r`` runs over all but the last qudit, ``x`` over an orthonormal
    basis ``w_x`` of a subspace of ``W`` holding the last factor).
    Candidates ``Σ β[a, x] F_a ⊗ w_x`` are fixed at the next level iff the
    transposition ``τ`` of the last two qudits fixes them, i.e. iff ``β`` is
    an eigenvector with eigenvalue 1 of ``K = B^† τ B``, whose entries are
    ``K[(a, x), (b, y)] = G[a, y, b, x]``.

    Returns the coefficients ``β`` of an orthonormal basis (shape
    ``(f', f, m)``) and the gap ratio of the eigenvalue-1 cluster.
    """
    f, m = G.shape[0], G.shape[1]
    size = f * m
    if size * size * 16 * 3 > budget:
        raise MemoryBudgetExceeded(f"lift Gram matrix of size {size} exceeds the budget")
    K = np.ascontiguousarray(G.transpose(0, 3, 2, 1)).reshape(size, size)
    K = (K + K.conj().T) / 2
    lam, vecs = scipy.linalg.eigh(K, driver="evr", overwrite_a=True)
    defect = np.clip(1 - lam, 0, None)  # ‖(I - τ)v‖² / 2 on the candidate space
    count, gap = _count_zero_cluster(defect, tol, scale=1.0)
    order = np.argsort(defect, kind="stable")[:count]
    beta = vecs[:, order].T.reshape(count, f, m)
    return beta, gap


def symmetric_lift(basis: np.ndarray, d: int, n_from: int, N: int, k: int, tol: float = ZERO_TOL,
                   budget: int = MEMORY_BUDGET) -> InvariantReport:
    """Dimension of the level-``N`` fixed space from a level-``n_from`` basis.

    ``basis`` holds orthonormal rows spanning the fixed space of the gates on
    ``(C^d)^{⊗n_from}`` plus the factor permutations, in the slot-major order
    used by :class:`univcheck.tensorop.StructuredOperator`.  Requires that
    every gate acts within the first ``n_from`` qudits.

    Going from ``L`` to ``L + 1`` qudits, the fixed space is the set of
    vectors in ``Fix_L ⊗ W`` that the transposition of the last two qudits
    fixes: the gates act inside the first ``L`` qudits, and ``S_L`` with
    that transposition generates ``S_{L+1}``.  Only Gram matrices of the
    current basis are needed, never vectors of the full space.
    """
    if N <= n_from:
        raise ValueError("the lift target must exceed the starting level")
    m = d ** (2 * k)
    F = qudit_major(basis, d, n_from, k)
    f = F.shape[0]
    total = d ** (2 * k * N)
    if f == 0:
        return InvariantReport(k, 0, "symmetric-lift", math.inf, tol, True, total)
    Fr = F.reshape(-1, m)
    lam, vecs = np.linalg.eigh(Fr.conj().T @ Fr)
    zeros, mgap = _count_zero_cluster(np.clip(lam, 0, None), tol)
    c = (Fr @ vecs[:, zeros:]).reshape(f, -1, m - zeros)
    G = np.einsum("ari,brj->aibj", c.conj(), c, optimize=True)
    gaps = [mgap]
    value = f
    for level in range(n_from + 1, N + 1):
        if level > n_from + 1:
            G, mgap = _marginal_restrict(G, tol)
            gaps.append(mgap)
        beta, gap = _lift_step(G, tol, budget)
        gaps.append(gap)
        value = beta.shape[0]
        log.info("symmetric lift: level %d has %d fixed vectors (gap %.3g)", level, value, gap)
        if value == 0:
            break
        G = np.einsum("Aax,Bay->AxBy", beta.conj(), beta, optimize=True)
    gap = min(gaps)
    return InvariantReport(k, value, "symmetric-lift", gap, tol, gap >= CERTAINTY_GAP, total,
                           iterations=N - n_from, note=f"lifted from N={n_from}")


def _iterative_footprint(total: int, baseline: int) -> int:
    block = baseline + 16
    return total * 16 * 4 * (2 * block + baseline)


def check_N_universal(
    gateset: GateSet,
    N: int,
    method: str = "auto",
    seed: int = 0,
    sigma: Sequence[FactorPermutation] | None = None,
    budget: int = MEMORY_BUDGET,
    shortcut: bool = True,
    **kwargs,
) -> CompletenessVerdict:
    """Completeness of ``Γ_N ∪ Σ`` on ``(C^d)^{⊗N}``.

    Parameters
    ----------
    method : str
        ``"lift"`` forces the symmetric lift from level ``n``; ``"auto"``
        uses it whenever ``N > n`` and the lift's Gram matrix fits the budget;
        any other value is passed to the direct computation.
    sigma : sequence of FactorPermutation, optional
        Generators of ``S_N``; defaults to a transposition and the full cycle.
    """
    d, n = gateset.d, gateset.n
    if N < n:
        raise DimensionMismatch(f"N={N} is smaller than the arity {n}")
    D = d ** N
    k = completeness_order(D)
    baseline = gl_baseline(D, k)
    if D <= DENSE_LIMIT:
        gens = universality_generators(gateset, N, sigma)
        if shortcut:
            report = finite_shortcut(gens, k, budget=budget)
            if report is not None and report.value > baseline:
                return _verdict_from_report(report, k, baseline, N)
    else:
        gens = None
    if N > n and method in ("auto", "lift"):
        try:
            report = lifted_m2k(gateset, N, k, seed, budget, **kwargs)
        except MemoryBudgetExceeded as exc:
            if method == "lift":
                return CompletenessVerdict(UNCERTAIN, k, None, baseline, None, N, f"resources exhausted: {exc}")
            log.info("lift over budget (%s); trying the direct route", exc)
        else:
            if report.certain and report.value < baseline:
                report = InvariantReport(**{**report.__dict__, "certain": False, "note": "below GL baseline"})
            return _verdict_from_report(report, k, baseline, N)
        method = "auto"
    if gens is None:
        gens = universality_generators(gateset, N, sigma)
    total = D ** (2 * k)
    if method in ("auto", "iterative") and _iterative_footprint(total, baseline) > budget:
        return CompletenessVerdict(UNCERTAIN, k, None, baseline, None, N,
                                   f"direct computation on dimension {total} exceeds the memory budget")
    verdict = check_complete(gens, method=method, seed=seed, budget=budget, shortcut=False, **kwargs)
    return CompletenessVerdict(verdict.status, verdict.k_used, verdict.measured, verdict.baseline,
                               verdict.report, N, verdict.note)


def lifted_m2k(gateset: GateSet, N: int, k: int, seed: int = 0, budget: int = MEMORY_BUDGET,
               **kwargs) -> InvariantReport:
    """``M_2k`` of ``Γ_N ∪ Σ`` via :func:`symmetric_lift` from a basis computed at ``N = n``.

    Raises
    ------
    MemoryBudgetExceeded
        If the starting basis is too large for the lift's Gram tensor.
    """
    d, n = gateset.d, gateset.n
    start = m2k(universality_generators(gateset, n), k, seed=seed, budget=budget, keep_basis=True, **kwargs)
    if not start.certain:
        return InvariantReport(**{**start.__dict__, "note": f"starting level N={n} uncertain", "basis": None})
    m = d ** (2 * k)
    if (start.value * m) ** 2 * 16 > budget:
        raise MemoryBudgetExceeded(f"{start.value} fixed vectors at N={n} give a Gram tensor of size {start.value * m}")
    lifted = symmetric_lift(start.basis, d, n, N, k, budget=budget)
    gap = min(lifted.gap_ratio, start.gap_ratio)
    return InvariantReport(k, lifted.value, "symmetric-lift", gap, lifted.tolerance,
                           lifted.certain and start.certain, lifted.total_dim, lifted.iterations,
                           f"lifted from N={n} ({start.method}, {start.value} fixed vectors)")


def check_universal(
    gateset: GateSet,
    capN: int | None = None,
    method: str = "auto",
    seed: int = 0,
    budget: int = MEMORY_BUDGET,
    **kwargs,
) -> UniversalityVerdict:
    """Sweep ``N = n, n+1, ...`` up to ``min(capN, d^8 (n-1) + 1)``.

    The first Complete level gives ``Universal(N)``.  One-qudit sets are never
    universal.  NotUniversal is only claimed when every level up to the
    theoretical bound is a certain Incomplete; an Uncertain level stops the
    sweep with Inconclusive.
    """
    d, n = gateset.d, gateset.n
    bound = theoretical_bound(d, n)
    if n == 1:
        return UniversalityVerdict(NOT_UNIVERSAL, bound, reason="one-qudit")
    if capN is None:
        capN = n + 1
    if capN < n:
        raise ValueError(f"capN={capN} is smaller than the arity {n}")
    last = min(capN, bound)
    per_N: list[CompletenessVerdict] = []
    for N in range(n, last + 1):
        v = check_N_universal(gateset, N, method=method, seed=seed, budget=budget, **kwargs)
        per_N.append(v)
        if v.status == COMPLETE:
            return UniversalityVerdict(UNIVERSAL, bound, tuple(per_N), N0=N)
        if v.status == UNCERTAIN:
            return UniversalityVerdict(INCONCLUSIVE, bound, tuple(per_N), max_N_tried=N)
    if last == bound:
        return UniversalityVerdict(NOT_UNIVERSAL, bound, tuple(per_N), reason="bound-exhausted")
    return UniversalityVerdict(INCONCLUSIVE, bound, tuple(per_N), max_N_tried=last)


__all__ = [
    "COMPLETE",
    "INCOMPLETE",
    "UNCERTAIN",
    "UNIVERSAL",
    "NOT_UNIVERSAL",
    "INCONCLUSIVE",
    "CompletenessVerdict",
    "UniversalityVerdict",
    "check_N_universal",
    "check_complete",
    "check_universal",
    "completeness_order",
    "finite_shortcut",
    "lifted_m2k",
    "qudit_major",
    "regularity_bound",
    "symmetric_lift",
    "theoretical_bound",
]
