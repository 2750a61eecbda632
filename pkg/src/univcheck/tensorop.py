"""Matrix-free application of ``ρ_2k(g) = g^{⊗k} ⊗ conj(g)^{⊗k}``.

Vectors live on ``(V ⊗ V*)^{⊗k}`` ordered as ``V^{⊗k} ⊗ (V*)^{⊗k}``: the first
``k`` slots carry ``g`` and the last ``k`` slots carry its entrywise conjugate,
which is the contragredient action for unitary ``g``.  With ``V = (C^d)^{⊗N}``
each slot is itself a product of ``N`` qudit factors, giving ``2kN`` tensor
axes of size ``d``.

All ``apply`` functions accept either one vector or a stack of row vectors of
shape ``(b, total_dim)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from univcheck.gateset import (
    DENSE_LIMIT,
    UNITARITY_TOL,
    DimensionMismatch,
    FactorPermutation,
    UnitaryGate,
    apply_on_axes,
    unitarity_defect,
)

#: Default memory budget for a single operator application, in bytes.
MEMORY_BUDGET = 4096 * 2**20

# monomial gates get a precomputed gather map up to this total dimension
_MONOMIAL_MAP_LIMIT = 2**22


class MemoryBudgetExceeded(MemoryError):
    pass


def _as_rows(x: np.ndarray, total: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != total or x.ndim > 2:
        raise DimensionMismatch(f"vector length {x.shape[-1]} does not match operator dimension {total}")
    return x.reshape(-1, total), x.ndim == 1


def _monomial_form(g: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """``(perm, coef)`` with ``g e_j = coef[j] e_{perm[j]}``, or None."""
    nz = np.abs(g) > 1e-14
    if not np.all(nz.sum(axis=0) == 1):
        return None
    perm = np.argmax(nz, axis=0)
    coef = g[perm, np.arange(g.shape[1])]
    return perm, coef


@dataclass(frozen=True, eq=False)
class StructuredOperator:
    """Symbolic ``ρ_2k(v)`` for a gate ``v`` on ``N`` qudits of dimension ``d``.

    The gate is one of: a ``d^len(wires)`` square matrix acting on ``wires``
    (dense gates use all wires), or a factor permutation.  Global phases are
    dropped since they cancel between plain and conjugated slots.
    """

    d: int
    N: int
    k: int
    matrix: np.ndarray | None = field(default=None, repr=False)
    wires: tuple[int, ...] = ()
    permutation: FactorPermutation | None = None
    name: str | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if (self.matrix is None) == (self.permutation is None):
            raise ValueError("need exactly one of matrix, permutation")
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            if m.shape != (self.d ** len(self.wires),) * 2:
                raise DimensionMismatch(f"matrix shape {m.shape} does not fit wires {self.wires}")
            if unitarity_defect(m) > UNITARITY_TOL:
                raise DimensionMismatch("slot matrix is not unitary")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        elif self.permutation.N != self.N:
            raise DimensionMismatch("permutation size differs from N")

    # constructors

    @classmethod
    def from_matrix(cls, g: np.ndarray, k: int, d: int | None = None, name: str | None = None) -> StructuredOperator:
        """``ρ_2k(g)`` for a dense ``D×D`` unitary, optionally split into qudits of size ``d``."""
        g = np.asarray(g, dtype=complex)
        D = g.shape[0]
        if d is None:
            d, N = D, 1
        else:
            N = round(math.log(D, d))
            if d ** N != D:
                raise DimensionMismatch(f"{D} is not a power of {d}")
        return cls(d, N, k, matrix=g, wires=tuple(range(N)), name=name)

    @classmethod
    def from_gate(cls, gate: UnitaryGate, k: int) -> StructuredOperator:
        if gate.permutation is not None:
            return cls(gate.d, gate.n, k, permutation=gate.permutation, name=gate.name)
        if gate.local is not None:
            return cls(gate.d, gate.n, k, matrix=gate.local, wires=gate.wires, name=gate.name)
        return cls(gate.d, gate.n, k, matrix=gate.matrix, wires=tuple(range(gate.n)), name=gate.name)

    # shape

    @property
    def base_dim(self) -> int:
        return self.d ** self.N

    @property
    def total_dim(self) -> int:
        return self.base_dim ** (2 * self.k)

    @property
    def n_slots(self) -> int:
        return 2 * self.k

    def inverse(self) -> StructuredOperator:
        if self.permutation is not None:
            return StructuredOperator(self.d, self.N, self.k, permutation=self.permutation.inverse(), name=self.name)
        return StructuredOperator(self.d, self.N, self.k, matrix=self.matrix.conj().T, wires=self.wires, name=self.name)

    # application

    @cached_property
    def _monomial_map(self):
        """Gather map ``(src, coef)`` with ``(ρ x)[i] = coef[i] x[src[i]]``, if ``ρ`` is monomial."""
        if self.permutation is not None or self.total_dim > _MONOMIAL_MAP_LIMIT:
            return None
        if self.wires != tuple(range(self.N)):
            return None
        form = _monomial_form(self.matrix)
        if form is None:
            return None
        perm, coef = form
        D = self.base_dim
        inv = np.empty(D, dtype=np.int64)
        inv[perm] = np.arange(D)
        c_in = coef[inv]  # coefficient attached to output basis index
        src = np.zeros(1, dtype=np.int64)
        out_coef = np.ones(1, dtype=complex)
        for s in range(self.n_slots):
            c = c_in if s < self.k else c_in.conj()
            src = (src[:, None] * D + inv[None, :]).reshape(-1)
            out_coef = (out_coef[:, None] * c[None, :]).reshape(-1)
        return src, out_coef

    def apply(self, x: np.ndarray) -> np.ndarray:
        X, single = _as_rows(x, self.total_dim)
        mono = self._monomial_map
        if mono is not None:
            src, coef = mono
            Y = X[:, src] * coef
        elif self.permutation is not None:
            Y = _permute_slots(X, self.permutation, self.d, self.k)
        else:
            Y = _apply_slots(X, self.matrix, self.wires, self.d, self.N, self.k)
        return Y[0] if single else Y

    def __matmul__(self, x):
        return self.apply(x)

    def check_budget(self, block: int = 1, budget: int = MEMORY_BUDGET, copies: int = 3) -> None:
        need = self.total_dim * block * 16 * copies
        if need > budget:
            raise MemoryBudgetExceeded(
                f"{block} vectors of dimension {self.total_dim} need ~{need / 2**20:.0f} MiB "
                f"(budget {budget / 2**20:.0f} MiB)"
            )


def _apply_slots(X: np.ndarray, mat: np.ndarray, wires, d: int, N: int, k: int) -> np.ndarray:
    b = X.shape[0]
    conj = mat.conj()
    if tuple(wires) == tuple(range(N)):
        # contract the leading slot and rotate it to the back; after 2k steps
        # the slot order is restored
        D = d ** N
        t = X
        for s in range(2 * k):
            t = t.reshape(b, D, -1)
            t = np.matmul(t.transpose(0, 2, 1), (mat if s < k else conj).T)
        return t.reshape(b, -1)
    t = X.reshape((b,) + (d,) * (2 * k * N))
    for s in range(2 * k):
        axes = [1 + s * N + w for w in wires]
        t = apply_on_axes(t, mat if s < k else conj, axes)
    return t.reshape(b, -1)


def _permute_slots(X: np.ndarray, sigma: FactorPermutation, d: int, k: int) -> np.ndarray:
    b = X.shape[0]
    N = sigma.N
    t = X.reshape((b,) + (d,) * (2 * k * N))
    inner = sigma.axes()
    axes = [0] + [1 + s * N + a for s in range(2 * k) for a in inner]
    return np.ascontiguousarray(np.transpose(t, axes)).reshape(b, -1)


def apply_rho2k(g: np.ndarray, k: int, x: np.ndarray, budget: int = MEMORY_BUDGET) -> np.ndarray:
    """``(g^{⊗k} ⊗ conj(g)^{⊗k}) x`` without forming the Kronecker product.

    Cost is ``O(k D^{2k+1})`` per vector and memory stays at a few vectors.

    Raises
    ------
    DimensionMismatch
        If ``x`` does not have length ``D^{2k}`` or ``g`` is not unitary.
    MemoryBudgetExceeded
        If the vectors involved would not fit in ``budget`` bytes.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch("g must be square")
    if unitarity_defect(g) > UNITARITY_TOL:
        raise DimensionMismatch("g must be unitary")
    D = g.shape[0]
    X, single = _as_rows(x, D ** (2 * k))
    if X.size * 16 * 3 > budget:
        raise MemoryBudgetExceeded(f"vectors of dimension {D ** (2 * k)} exceed the memory budget")
    Y = _apply_slots(X, g, (0,), D, 1, k)
    return Y[0] if single else Y


def apply_factor_permutation(sigma: FactorPermutation, x: np.ndarray, d: int, k: int) -> np.ndarray:
    """Permute the ``N`` qudit factors of every one of the ``2k`` slots by ``sigma``."""
    total = d ** (2 * k * sigma.N)
    X, single = _as_rows(x, total)
    Y = _permute_slots(X, sigma, d, k)
    return Y[0] if single else Y


def materialize(op: StructuredOperator, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Dense matrix of a structured operator (only below the dense limit)."""
    total = op.total_dim
    if total > dense_limit:
        raise DimensionMismatch(f"total dimension {total} exceeds dense limit {dense_limit}")
    if op.permutation is None and op.wires == tuple(range(op.N)):
        g = op.matrix
        plain = g
        for _ in range(op.k - 1):
            plain = np.kron(plain, g)
        conj = plain.conj()
        return np.kron(plain, conj)
    # columns are images of basis vectors
    return op.apply(np.eye(total, dtype=complex)).T.copy()
