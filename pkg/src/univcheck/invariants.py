"""Dimensions of common fixed spaces, ``M_2k`` of gate sets, and their oracles.

``M_2k(Γ)`` is the dimension of the subspace of ``(V ⊗ V*)^{⊗k}`` fixed by
``ρ_2k(g)`` for every generator ``g``; fixing the generators is enough to fix
the closed group they generate.  Three routes compute it:

* ``dense-svd``: singular values of the stacked ``ρ(g) - I`` restricted to a
  cheaply computed superset of one generator's fixed space,
* ``hermitian-dense``: eigenvalues of ``Σ_g (ρ(g) - I)^† (ρ(g) - I)``,
* ``subspace-iteration``: block power iteration on the averaging operator.

``finite_group_m2k`` (character averaging over an enumerated finite group),
``gl_baseline`` (hook-length closed form) and ``haar_oracle`` (random
unitaries) provide independent values to check against.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
from scipy.stats import unitary_group

from univcheck.gateset import DENSE_LIMIT, UnitaryGate, unitarity_defect
from univcheck.tensorop import (
    MEMORY_BUDGET,
    MemoryBudgetExceeded,
    StructuredOperator,
    materialize,
)

log = logging.getLogger(__name__)

ZERO_TOL = 1e-9
CERTAINTY_GAP = 1e3
MAX_ITER = 500
STABLE_ITERS = 10
FIXED_RITZ = 1 - 1e-9
FREE_RITZ = 1 - 1e-5
RESIDUAL_TOL = 1e-8
DEFAULT_CAP = 200_000
MAX_DEGREE = 64  # Chebyshev degree cap per sweep
MAX_BLOCK = 256  # block growth stops here

METHODS = ("dense-svd", "hermitian-dense", "orbit-restricted", "subspace-iteration", "finite-group-character")


class NotClosed(RuntimeError):
    """Group enumeration hit the element cap before closing."""


@dataclass(frozen=True)
class InvariantReport:
    """Outcome of one fixed-space dimension computation.

    ``gap_ratio`` compares the smallest value counted as nonzero with the
    largest counted as zero (both on the scale of eigenvalues of
    ``Σ (ρ(g) - I)^† (ρ(g) - I)``, or ``1 - θ`` for Ritz values ``θ``).
    """

    k: int | None
    value: int
    method: str
    gap_ratio: float
    tolerance: float
    certain: bool
    total_dim: int
    iterations: int = 0
    note: str = ""
    basis: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "value": self.value,
            "method": self.method,
            "gap_ratio": self.gap_ratio,
            "tolerance": self.tolerance,
            "certain": self.certain,
            "total_dim": self.total_dim,
            "iterations": self.iterations,
            "note": self.note,
        }


# --- operator adapters ------------------------------------------------------


@dataclass
class _Action:
    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_inv: Callable[[np.ndarray], np.ndarray] | None  # None: involution
    dense: Callable[[], np.ndarray]
    structured: StructuredOperator | None = None


def _is_involution(m: np.ndarray) -> bool:
    return bool(np.max(np.abs(m @ m - np.eye(m.shape[0]))) < 1e-12)


def _inverse_gate(g: UnitaryGate) -> UnitaryGate:
    if g.permutation is not None:
        return UnitaryGate(g.d, g.n, permutation=g.permutation.inverse(), phase=np.conj(g.phase))
    return UnitaryGate(g.d, g.n, local=g.local.conj().T, wires=g.wires, phase=np.conj(g.phase))


def _action(op, dense_limit: int) -> _Action:
    if isinstance(op, StructuredOperator):
        inv = None
        if op.permutation is not None:
            if op.permutation.compose(op.permutation).is_identity():
                inv = None
            else:
                inv = op.inverse().apply
        elif not _is_involution(op.matrix):
            inv = op.inverse().apply
        return _Action(op.total_dim, op.apply, inv, lambda: materialize(op, dense_limit), op)
    if isinstance(op, UnitaryGate):
        m = op.to_dense(dense_limit) if op.dim <= dense_limit else None
        inv = None
        if m is not None and not _is_involution(m):
            mh = m.conj().T
            inv = lambda X: X @ mh.T  # noqa: E731
        elif m is None:
            inv = _inverse_gate(op).apply
        return _Action(op.dim, lambda X: op.apply(X).reshape(X.shape), inv, lambda: op.to_dense(dense_limit))
    m = np.asarray(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("operators must be square")
    if unitarity_defect(m) > 1e-10:
        raise ValueError("operators must be unitary")
    inv = None if _is_involution(m) else (lambda X: X @ m.conj())
    return _Action(m.shape[0], lambda X: X @ m.T, inv, lambda: m)


# --- zero-cluster counting --------------------------------------------------


def _count_zero_cluster(lam: np.ndarray, tol: float, scale: float = 0.0) -> tuple[int, float]:
    """Count eigenvalues below ``tol * max(λ_max, scale)``; return ``(count, gap_ratio)``.

    ``scale`` is a floor for the reference value.  Restricted problems can
    consist of rounding noise only, and a purely relative threshold would
    then promote the noise to nonzero eigenvalues.
    """
    lam = np.sort(np.asarray(lam, dtype=float))
    top = max(float(lam[-1]) if lam.size else 0.0, scale)
    if top <= 0:
        return lam.size, math.inf
    floor = np.finfo(float).eps * top
    zero = lam < tol * top
    count = int(zero.sum())
    if count == lam.size:
        return count, math.inf
    smallest_kept = float(lam[count])
    largest_zero = max(float(lam[count - 1]), floor) if count else floor
    return count, smallest_kept / largest_zero


def _report(k, value, method, gap, tol, dim, iterations=0, note="", basis=None, certain=None):
    if certain is None:
        certain = gap >= CERTAINTY_GAP
    return InvariantReport(k, int(value), method, float(gap), tol, bool(certain), dim, iterations, note, basis)


def _hermitian_dense(actions: list[_Action], k, tol) -> InvariantReport:
    n = actions[0].dim
    M = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for a in actions:
        U = a.dense()
        M += 2 * eye - U - U.conj().T
    lam = scipy.linalg.eigh(M, eigvals_only=True, driver="evd")
    value, gap = _count_zero_cluster(lam, tol, scale=1.0)
    return _report(k, value, "hermitian-dense", gap, tol, n)


def _eigenphases(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``Z`` and phases ``φ`` with ``g = Z diag(e^{iφ}) Z^†``."""
    T, Z = scipy.linalg.schur(g, output="complex")
    return Z, np.angle(np.diag(T))


def _restriction_basis(op: StructuredOperator, phase_tol: float = 1e-6):
    """Orthonormal rows spanning a superset of the fixed space of ``ρ_2k(g)``.

    In the eigenbasis of ``g`` the operator is diagonal with phase
    ``Σ_plain φ - Σ_conj φ`` on each basis tuple; tuples whose phase is within
    ``phase_tol`` of 0 mod 2π are kept.
    """
    Z, phi = _eigenphases(op.matrix)
    D, k = op.base_dim, op.k
    total = np.zeros(1)
    for s in range(2 * k):
        total = (total[:, None] + (phi if s < k else -phi)[None, :]).reshape(-1)
    keep = np.flatnonzero(np.abs(np.exp(1j * total) - 1) < phase_tol)
    rot = StructuredOperator(op.d, op.N, k, matrix=Z, wires=op.wires)
    E = np.zeros((keep.size, D ** (2 * k)), dtype=complex)
    E[np.arange(keep.size), keep] = 1
    return rot.apply(E)


def _dense_svd(actions: list[_Action], k, tol, budget, keep_basis: bool = False) -> InvariantReport:
    n = actions[0].dim
    candidates = [a.structured for a in actions if a.structured is not None and a.structured.matrix is not None
                  and a.structured.wires == tuple(range(a.structured.N))]
    if candidates:
        best = None
        for op in candidates:
            B = _restriction_basis(op)
            if best is None or B.shape[0] < best.shape[0]:
                best = B
        B = best
        note = f"restricted to {B.shape[0]} of {n} coordinates"
    else:
        B = np.eye(n, dtype=complex)
        note = ""
    if B.shape[0] == 0:
        return _report(k, 0, "dense-svd", math.inf, tol, n, note=note)
    if B.shape[0] * n * 16 * (len(actions) + 2) > budget:
        raise MemoryBudgetExceeded(f"dense-svd needs a {len(actions) * n} x {B.shape[0]} matrix")
    stacked = np.concatenate([a.apply(B) - B for a in actions], axis=1)  # rows: basis vectors
    if keep_basis:
        U, sv, _ = scipy.linalg.svd(stacked, full_matrices=True, lapack_driver="gesdd")
    else:
        sv = scipy.linalg.svd(stacked, compute_uv=False, lapack_driver="gesdd")
    lam = np.concatenate([sv ** 2, np.zeros(B.shape[0] - sv.size)])
    # ρ(g) - I has O(1) norm on the full space, so 1 is the reference scale
    value, gap = _count_zero_cluster(lam, tol, scale=1.0)
    basis = None
    if keep_basis:
        # a row combination c with c @ stacked = 0 gives the fixed vector c @ B
        basis = U[:, B.shape[0] - value:].T.conj() @ B
    return _report(k, value, "dense-svd", gap, tol, n, note=note, basis=basis)


# --- orbit restriction ------------------------------------------------------

#: Largest restricted dimension handed to the dense eigensolver of the orbit route.
ORBIT_LIMIT = 16_000


def _monomial_action(a: _Action, rng) -> tuple[np.ndarray, np.ndarray] | None:
    """``(src, coef)`` with ``(U x)[i] = coef[i] x[src[i]]`` when ``U`` is monomial, else None.

    Detected by applying ``U`` to ``(1, 2, ..., n)`` and confirmed on a random vector.
    """
    n = a.dim
    y = a.apply(np.arange(1, n + 1, dtype=complex)[None, :])[0]
    mag = np.abs(y)
    src = np.rint(mag).astype(np.int64) - 1
    if np.any(np.abs(mag - (src + 1)) > 1e-9 * (src + 1)) or src.min() < 0 or src.max() >= n:
        return None
    coef = y / (src + 1)
    probe = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if not np.allclose(a.apply(probe[None, :])[0], coef * probe[src], atol=1e-9):
        return None
    return src, coef


def _orbit_basis(monos, n: int):
    """Sparse orthonormal rows spanning the common fixed space of monomial operators.

    A fixed vector satisfies ``v[i] = coef[i] v[src[i]]`` for every operator,
    so it is determined on each orbit of basis vectors by one value.  Orbits
    on which the phases are inconsistent carry no fixed vector.
    """
    rows = np.concatenate([np.arange(n)] * len(monos))
    cols = np.concatenate([src for src, _ in monos])
    graph = scipy.sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    ncomp, labels = scipy.sparse.csgraph.connected_components(graph, directed=False)
    v = np.full(n, np.nan + 0j)
    _, roots = np.unique(labels, return_index=True)
    v[roots] = 1
    known = ~np.isnan(v)
    while not known.all():
        before = known.sum()
        for src, coef in monos:
            fwd = ~known & known[src]
            v[fwd] = coef[fwd] * v[src[fwd]]
            known |= fwd
            back = known & ~known[src]
            v[src[back]] = v[back] / coef[back]
            known[src[back]] = True
        if known.sum() == before:  # cannot happen for connected components
            raise RuntimeError("orbit propagation stalled")
    bad = np.zeros(ncomp, dtype=bool)
    for src, coef in monos:
        err = np.abs(v - coef * v[src]) > 1e-8
        bad[labels[err]] = True
    good = ~bad
    keep = good[labels]
    comp_index = np.cumsum(good) - 1
    sizes = np.bincount(labels, minlength=ncomp)
    idx = np.flatnonzero(keep)
    data = v[idx] / np.sqrt(sizes[labels[idx]])
    B = scipy.sparse.csr_matrix((data, (comp_index[labels[idx]], idx)), shape=(int(good.sum()), n))
    return B


def _orbit_restricted(actions: list[_Action], k, tol, budget, keep_basis: bool, seed: int = 0,
                      chunk: int = 128) -> InvariantReport | None:
    """Exact restriction to the fixed space of the monomial generators, then a dense eigenproblem.

    Returns None when no generator is monomial or the restricted space
    exceeds :data:`ORBIT_LIMIT` or the budget.
    """
    n = actions[0].dim
    rng = np.random.default_rng(seed)
    monos, others = [], []
    for a in actions:
        mono = _monomial_action(a, rng)
        (others if mono is None else monos).append(mono if mono is not None else a)
    if not monos:
        return None
    B = _orbit_basis(monos, n)
    r = B.shape[0]
    note = f"orbit-restricted to {r} of {n} coordinates"
    if not others or r == 0:
        basis = B.toarray() if keep_basis else None
        return _report(k, r, "orbit-restricted", math.inf, tol, n, note=note, basis=basis)
    if r > ORBIT_LIMIT or r * r * 16 * 3 > budget:
        log.info("orbit restriction leaves %d dimensions; not using it", r)
        return None
    Bc = B.conj().tocsr()
    C = np.zeros((r, r), dtype=complex)
    for a in others:
        for j0 in range(0, r, chunk):
            Y = a.apply(B[j0:j0 + chunk].toarray())
            C[:, j0:j0 + chunk] -= np.asarray(Bc @ Y.T)  # <b_i, U b_j>
    C = C + C.conj().T + 2 * len(others) * np.eye(r)
    if np.abs(C.imag).max() < 1e-13:
        C = C.real
    if keep_basis:
        lam, vecs = scipy.linalg.eigh(C, driver="evr")
    else:
        lam = scipy.linalg.eigh(C, eigvals_only=True, driver="evr")
    value, gap = _count_zero_cluster(lam, tol, scale=1.0)
    basis = None
    if keep_basis:
        basis = np.asarray((scipy.sparse.csr_matrix(vecs[:, :value].T) @ B).toarray())
    return _report(k, value, "orbit-restricted", gap, tol, n, note=note, basis=basis)


# --- subspace iteration -----------------------------------------------------


def _orth_rows(X: np.ndarray, against: np.ndarray | None = None) -> np.ndarray:
    """Orthonormalize rows, first projecting out the rows of ``against``."""
    if against is not None and len(against):
        for _ in range(2):
            X = X - (X @ against.conj().T) @ against
    q, _ = np.linalg.qr(X.T)
    return np.ascontiguousarray(q.T)


def _averaging(actions: list[_Action]):
    """``Ŝ = (1/2s) Σ_g (ρ(g) + ρ(g)^{-1})``, the Hermitian average over generators and inverses.

    ``Ŝ x = x`` exactly on the common fixed space and every other eigenvalue
    lies in ``[-1, 1)``.
    """
    s = 2 * len(actions)

    def S(X):
        Y = np.zeros_like(X)
        for a in actions:
            if a.apply_inv is None:
                Y += 2 * a.apply(X)
            else:
                Y += a.apply(X)
                Y += a.apply_inv(X)
        return Y / s

    return S


def _chebyshev_filter(S, X: np.ndarray, degree: int, cut: float, low: float = -1.0) -> np.ndarray:
    """Damp the spectral interval ``[low, cut]`` of ``S`` relative to eigenvalue 1."""
    e = (cut - low) / 2
    c = (cut + low) / 2
    prev = X
    cur = (S(X) - c * X) / e
    for _ in range(1, degree):
        nxt = 2 * (S(cur) - c * cur) / e - prev
        prev, cur = cur, nxt
    return cur


def _subspace_iteration(actions, k, block, seed, tol, budget, max_iter, keep_basis,
                        degree: int = 8, max_seconds: float | None = None) -> InvariantReport:
    """Chebyshev-filtered subspace iteration with locking of converged fixed vectors.

    Ritz pairs of the averaging operator with value ``>= 1 - 1e-9`` and small
    residual are locked and replaced by fresh random vectors, so the fixed
    space can be much larger than the active block.  Convergence requires the
    locked count to stay unchanged for ``STABLE_ITERS`` outer iterations while
    every active Ritz value is ``<= 1 - 1e-5``.  The filter cut tracks the top
    of the free spectrum and ``degree`` is only the minimum filter degree.  Hitting ``max_iter`` or
    ``max_seconds`` returns the locked count so far, flagged uncertain.
    """
    n = actions[0].dim
    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    rng = np.random.default_rng(seed)
    S = _averaging(actions)

    def random_rows(b):
        return rng.standard_normal((b, n)) + 1j * rng.standard_normal((b, n))

    locked = np.zeros((0, n), dtype=complex)
    locked_res: list[float] = []
    locked_theta: list[float] = []
    block = min(block, n)
    active = _orth_rows(random_rows(block))
    stable = 0
    theta = np.zeros(0)
    res = np.zeros(0)
    cut = 0.0
    deg = degree
    converged = False
    timed_out = False
    it = 0
    for it in range(1, max_iter + 1):
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        if (len(locked) + 2 * block) * n * 16 * 4 > budget:
            raise MemoryBudgetExceeded(
                f"subspace iteration on dimension {n} with {len(locked)} locked vectors exceeds the budget"
            )
        Y = _chebyshev_filter(S, active, deg, cut)
        Q = _orth_rows(Y, locked)
        Z = S(Q)
        H = Q.conj() @ Z.T
        H = (H + H.conj().T) / 2
        theta, W = np.linalg.eigh(H)
        order = np.argsort(theta)[::-1]
        theta, W = theta[order], W[:, order]
        V = W.T @ Q
        res = np.linalg.norm(W.T @ Z - theta[:, None] * V, axis=1)
        new = 0
        while new < len(theta) and theta[new] >= FIXED_RITZ and res[new] <= RESIDUAL_TOL:
            new += 1
        if new:
            locked = np.concatenate([locked, V[:new]])
            locked_theta.extend(theta[:new])
            locked_res.extend(res[:new])
            V, theta, res = V[new:], theta[new:], res[new:]
            stable = 0
        else:
            stable += 1
        rest = len(theta)
        log.debug("iter %d: locked %d (+%d), block %d, degree %d, cut %.6g, top %.3g res %.2g, bottom %.3g",
                  it, len(locked), new, block, deg, cut, 1 - theta[0] if rest else 0.0,
                  res[0] if rest else 0.0, theta[-1] if rest else 0.0)
        if new >= block // 2 and block < MAX_BLOCK and (len(locked) + 4 * block) * n * 16 * 4 <= budget:
            # the fixed space is larger than the block: widen it
            block = min(2 * block, MAX_BLOCK)
        if len(locked) + block > n:
            block = n - len(locked)
        fresh = block - rest
        if fresh > 0:
            active = _orth_rows(np.concatenate([V, random_rows(fresh)]), locked)
        else:
            active = V[:block]
        # damp [-1, cut] with cut just below the free spectrum
        if rest and theta[-1] < FREE_RITZ:
            cut = float(np.clip(theta[-1], -1 + 1e-3, 1 - 1e-3))
        elif rest:
            # the whole block is nearly fixed; a Ritz pair contaminated by a
            # free mode at 1 - delta has res^2 / (1 - theta) close to delta
            gaps = 1 - theta
            ok = gaps > 1e-14
            delta = float(np.min(res[ok] ** 2 / gaps[ok])) if ok.any() else 2.0
            cut = float(np.clip(1 - delta / 2, 0.0, 1 - 1e-9))
        else:
            cut = 0.0
        # enough degree for about a tenfold gain per sweep, T_m(1 + eps) ~ cosh(m sqrt(2 eps))
        eps = 2 * (1 - cut) / (1 + cut)
        deg = int(np.clip(np.ceil(3 / np.sqrt(2 * eps)), degree, MAX_DEGREE))
        if rest == 0:
            if len(locked) == n:
                converged = True
                break
            continue
        if (
            stable >= STABLE_ITERS
            and theta[0] <= FREE_RITZ
            and res[0] <= 0.5 * (1 - theta[0])
        ):
            converged = True
            break
    count = len(locked)
    zero_side = max([np.finfo(float).eps] + [max(1 - t, r) for t, r in zip(locked_theta, locked_res)])
    gap = (1 - theta[0]) / zero_side if len(theta) else math.inf
    certain = bool(converged and gap >= CERTAINTY_GAP)
    if certain:
        note = ""
    elif timed_out:
        note = f"stopped after {max_seconds:g}s without converging"
    else:
        note = "did not converge" if not converged else "gap too small"
    basis = locked if keep_basis else None
    return _report(k, count, "subspace-iteration", gap, tol, n, it, note, basis, certain)


def fixed_space_dim(
    ops: Sequence,
    method: str = "auto",
    seed: int = 0,
    tol: float = ZERO_TOL,
    block: int | None = None,
    dense_limit: int = DENSE_LIMIT,
    budget: int = MEMORY_BUDGET,
    max_iter: int = MAX_ITER,
    keep_basis: bool = False,
    max_seconds: float | None = None,
) -> InvariantReport:
    """Dimension of ``{x : U x = x for every U in ops}``.

    Parameters
    ----------
    ops : sequence
        Unitary operators on a common space: :class:`StructuredOperator`,
        :class:`UnitaryGate` or dense arrays.
    method : {"auto", "dense", "dense-svd", "hermitian-dense", "orbit-restricted", "iterative"}
        ``auto`` is ``dense-svd`` up to ``dense_limit``.  Beyond it, ``auto``
        tries ``orbit-restricted`` (exact fixed space of the monomial
        generators, then a dense eigenproblem for the rest) and falls back to
        subspace iteration.
    block : int, optional
        Subspace-iteration block size; defaults to ``gl_baseline(D, k) + 16``
        for ``ρ_2k`` operators and 16 otherwise.  The block grows when the
        fixed space fills it.
    keep_basis : bool
        Keep the converged fixed-space basis (rows) on the report.
    max_seconds : float, optional
        Wall-clock limit for subspace iteration; the report is then uncertain.

    Raises
    ------
    MemoryBudgetExceeded
        When the chosen route cannot run within ``budget`` bytes.
    """
    if not ops:
        raise ValueError("need at least one operator")
    actions = [_action(op, dense_limit) for op in ops]
    n = actions[0].dim
    if any(a.dim != n for a in actions):
        raise ValueError("operators act on spaces of different dimension")
    ks = {op.k for op in ops if isinstance(op, StructuredOperator)}
    k = ks.pop() if len(ks) == 1 else None
    if method == "auto":
        if n <= dense_limit:
            method = "dense-svd"
        else:
            report = _orbit_restricted(actions, k, tol, budget, keep_basis, seed)
            if report is not None:
                return report
            method = "iterative"
    elif method == "dense":
        method = "dense-svd"
    if method == "orbit-restricted":
        report = _orbit_restricted(actions, k, tol, budget, keep_basis, seed)
        if report is None:
            raise MemoryBudgetExceeded("orbit restriction unavailable: no monomial generator or too large")
        return report
    if method in ("dense-svd", "hermitian-dense"):
        if n > dense_limit:
            raise MemoryBudgetExceeded(f"dimension {n} exceeds the dense limit {dense_limit}")
        if method == "hermitian-dense":
            return _hermitian_dense(actions, k, tol)
        return _dense_svd(actions, k, tol, budget, keep_basis)
    if method in ("iterative", "subspace-iteration"):
        if block is None:
            base = next((op for op in ops if isinstance(op, StructuredOperator)), None)
            block = (gl_baseline(base.base_dim, base.k) if base is not None else 0) + 16
        return _subspace_iteration(actions, k, block, seed, tol, budget, max_iter, keep_basis,
                                   max_seconds=max_seconds)
    raise ValueError(f"unknown method {method!r}")


def rho_operators(gates: Sequence, k: int) -> list[StructuredOperator]:
    """``ρ_2k`` of each gate (``UnitaryGate`` or dense matrix)."""
    out = []
    for g in gates:
        if isinstance(g, UnitaryGate):
            out.append(StructuredOperator.from_gate(g, k))
        else:
            out.append(StructuredOperator.from_matrix(np.asarray(g, dtype=complex), k))
    return out


def m2k(gates: Sequence, k: int, method: str = "auto", seed: int = 0, **kwargs) -> InvariantReport:
    """``M_2k`` of the closed group generated by ``gates``.

    A certain report never falls below ``gl_baseline(D, k)``: if it would, the
    numerics are inconsistent and the report is downgraded to uncertain.
    """
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    if not gates:
        raise ValueError("need at least one gate")
    ops = rho_operators(gates, k)
    report = fixed_space_dim(ops, method=method, seed=seed, **kwargs)
    D = ops[0].base_dim
    if report.certain and report.value < gl_baseline(D, k):
        log.error("M_%d = %d below the GL baseline; marking uncertain", 2 * k, report.value)
        report = InvariantReport(**{**report.__dict__, "certain": False, "note": "below GL baseline"})
    return report


# --- Schur-Weyl baseline ----------------------------------------------------


def partitions(k: int, max_rows: int | None = None, largest: int | None = None):
    """Partitions of ``k`` as non-increasing tuples, with at most ``max_rows`` parts."""
    if largest is None:
        largest = k
    if k == 0:
        yield ()
        return
    if max_rows == 0:
        return
    for first in range(min(k, largest), 0, -1):
        rest_rows = None if max_rows is None else max_rows - 1
        for rest in partitions(k - first, rest_rows, first):
            yield (first,) + rest


def hook_length_count(shape: Sequence[int]) -> int:
    """Number of standard Young tableaux of the given shape."""
    shape = list(shape)
    n = sum(shape)
    conj = [sum(1 for r in shape if r > c) for c in range(shape[0])] if shape else []
    hooks = 1
    for i, row in enumerate(shape):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


@lru_cache(maxsize=None)
def gl_baseline(m: int, k: int) -> int:
    """``M_2k(GL_m(C))``: ``Σ (f^λ)²`` over partitions ``λ ⊢ k`` with at most ``m`` rows."""
    if m < 1 or k < 1:
        raise ValueError("m and k must be positive")
    return sum(hook_length_count(lam) ** 2 for lam in partitions(k, max_rows=m))


def haar_unitary(m: int, rng) -> np.ndarray:
    if m == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(m, random_state=rng)


def haar_oracle(m: int, k: int, num_unitaries: int = 3, seed: int = 0, method: str = "auto", **kwargs) -> int:
    """Fixed-space dimension of ``ρ_2k`` of a few Haar-random unitaries.

    With probability one this is ``M_2k(U_m) = gl_baseline(m, k)``.
    """
    if num_unitaries < 2:
        raise ValueError("use at least two unitaries")
    rng = np.random.default_rng(seed)
    us = [haar_unitary(m, rng) for _ in range(num_unitaries)]
    report = m2k(us, k, method=method, seed=seed, **kwargs)
    if not report.certain:
        raise RuntimeError(f"haar oracle inconclusive: {report}")
    return report.value


# --- finite groups ----------------------------------------------------------


def _keys(mats: np.ndarray, scale: float) -> list[bytes]:
    r = np.rint(mats.view(float) * scale).astype(np.int64)
    return [row.tobytes() for row in r.reshape(len(mats), -1)]


def enumerate_group(generators: Sequence[np.ndarray], cap: int = DEFAULT_CAP, dim: int | None = None,
                    resolution: float = 1e-6) -> np.ndarray:
    """All elements of the finite group generated by ``generators``.

    Elements are deduplicated by rounding entries to ``resolution`` buckets;
    scalar multiples are kept as distinct elements.

    Raises
    ------
    NotClosed
        If more than ``cap`` elements are found.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        if dim is None:
            raise ValueError("dim is required when there are no generators")
        gens = [np.eye(dim, dtype=complex)]
    D = gens[0].shape[0]
    scale = 1 / resolution
    ident = np.eye(D, dtype=complex)[None]
    seen = set(_keys(ident, scale))
    elements = [ident]
    frontier = ident
    total = 1
    G = np.stack(gens)
    while len(frontier):
        products = np.einsum("gij,fjk->fgik", G, frontier).reshape(-1, D, D)
        fresh = []
        for key, mat in zip(_keys(products, scale), products):
            if key not in seen:
                seen.add(key)
                fresh.append(mat)
        total += len(fresh)
        if total > cap:
            raise NotClosed(f"more than {cap} elements; the group is infinite or the cap is too small")
        frontier = np.array(fresh).reshape(-1, D, D)
        elements.append(frontier)
    return np.concatenate(elements)


def finite_group_m2k(generators: Sequence[np.ndarray], k: int, cap: int = DEFAULT_CAP,
                     dim: int | None = None) -> int:
    """``M_2k`` of a finite group as the mean of ``|tr g|^{2k}`` over its elements.

    An empty generator list stands for the trivial group on ``C^dim``.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    group = enumerate_group(generators, cap=cap, dim=dim)
    traces = np.abs(np.einsum("gii->g", group)) ** (2 * k)
    mean = float(np.mean(traces))
    value = round(mean)
    if abs(mean - value) > 1e-6:
        raise ArithmeticError(f"character average {mean} is not an integer; deduplication failed")
    return int(value)
