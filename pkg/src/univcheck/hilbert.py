"""Symmetrization, homogeneous ideals and Hilbert functions at desk scale.

Polynomials in ``m`` variables of degree ``j`` are coefficient vectors over
the monomials of degree ``j`` in graded-lex order (``x_1^j`` first).  Tensors in
``W^{⊗j}`` (``W = C^m``) are vectors of length ``m^j`` in row-major word order.

The main identity checked here: for a group ``G`` acting on ``W^{⊗n}``, the
number of invariant functionals of ``⟨G ⊗ I, S_N⟩`` on ``W^{⊗N}`` equals
``dim R^N / J^N`` where ``J`` is generated by the symmetrized span of
``{g w - w}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from univcheck.gateset import (
    DENSE_LIMIT,
    UnitaryGate,
    extend_to_N,
    permutation_gate,
    symmetric_group_generators,
)
from univcheck.invariants import CERTAINTY_GAP, ZERO_TOL, _count_zero_cluster, fixed_space_dim


class SizeOverLimit(ValueError):
    pass


class TailNotStabilized(ValueError):
    """The Hilbert table is too short to commit to an eventual polynomial."""


class RegularityBoundViolated(ArithmeticError):
    pass


def n_monomials(m: int, j: int) -> int:
    return math.comb(m + j - 1, j)


@lru_cache(maxsize=None)
def monomials(m: int, j: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree ``j`` in graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(m), j):
        e = [0] * m
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(m: int, j: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(monomials(m, j))}


@lru_cache(maxsize=32)
def _word_to_monomial(m: int, j: int) -> np.ndarray:
    if j == 0:
        return np.zeros(1, dtype=np.int64)
    words = np.indices((m,) * j).reshape(j, -1).T
    words = np.sort(words, axis=1)
    codes = words @ (m ** np.arange(j - 1, -1, -1))
    _, inverse = np.unique(codes, return_inverse=True)
    return inverse.reshape(-1)


@dataclass(frozen=True)
class HomogeneousPolynomialSpace:
    """Rows of coefficient vectors spanning a subspace of ``R^j``."""

    m: int
    degree: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if v.size == 0:
            v = np.zeros((0, n_monomials(self.m, self.degree)), dtype=complex)
        if v.shape[1] != n_monomials(self.m, self.degree):
            raise ValueError(f"coefficient rows must have length {n_monomials(self.m, self.degree)}")
        object.__setattr__(self, "vectors", v)

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return monomials(self.m, self.degree)


def symmetrize(tensor: np.ndarray, m: int, j: int) -> np.ndarray:
    """Image of a tensor in ``W^{⊗j}`` under the quotient map to ``R^j``.

    ``w_1 ⊗ w_2 - w_2 ⊗ w_1`` maps to 0 and ``w_1 ⊗ w_2 + w_2 ⊗ w_1`` to
    ``2 x_1 x_2``.  Accepts a stack of tensors as rows.
    """
    t = np.asarray(tensor, dtype=complex)
    single = t.ndim == 1
    t = np.atleast_2d(t)
    if t.shape[1] != m ** j:
        raise ValueError(f"tensor length {t.shape[1]} != m^j = {m ** j}")
    idx = _word_to_monomial(m, j)
    out = np.zeros((t.shape[0], n_monomials(m, j)), dtype=complex)
    for r in range(t.shape[0]):
        out[r] = np.bincount(idx, weights=t[r].real, minlength=out.shape[1]) + 1j * np.bincount(
            idx, weights=t[r].imag, minlength=out.shape[1]
        )
    return out[0] if single else out


def invariant_complement(group_ops: Sequence[np.ndarray], tol: float = ZERO_TOL) -> np.ndarray:
    """Orthonormal rows spanning ``{g w - w}`` (the annihilator of the invariant functionals)."""
    mats = [np.asarray(g, dtype=complex) for g in group_ops]
    M = mats[0].shape[0]
    stacked = np.concatenate([g - np.eye(M) for g in mats], axis=1)
    U, sv, _ = np.linalg.svd(stacked, full_matrices=False)
    lam = sv ** 2
    top = lam.max() if lam.size else 0.0
    if top == 0:
        return np.zeros((0, M), dtype=complex)
    keep = lam >= tol * top
    return np.ascontiguousarray(U[:, keep].T)


@dataclass(frozen=True)
class GradedIdeal:
    """Ideal of ``C[x_1..x_m]`` generated by homogeneous polynomials of degree ``n``."""

    m: int
    n: int
    generators: HomogeneousPolynomialSpace

    def __post_init__(self):
        if self.generators.m != self.m or self.generators.degree != self.n:
            raise ValueError("generators must be homogeneous of degree n in m variables")

    @classmethod
    def from_rows(cls, m: int, n: int, rows) -> GradedIdeal:
        return cls(m, n, HomogeneousPolynomialSpace(m, n, rows))

    @classmethod
    def from_monomials(cls, m: int, n: int, exponent_lists: Sequence[Sequence[int]]) -> GradedIdeal:
        """Monomial ideal, e.g. ``from_monomials(2, 2, [(2, 0), (1, 1)])``."""
        index = _monomial_index(m, n)
        rows = np.zeros((len(exponent_lists), n_monomials(m, n)), dtype=complex)
        for r, e in enumerate(exponent_lists):
            rows[r, index[tuple(e)]] = 1
        return cls.from_rows(m, n, rows)

    @classmethod
    def zero(cls, m: int, n: int = 1) -> GradedIdeal:
        return cls.from_rows(m, n, np.zeros((0, n_monomials(m, n))))


def parse_ideal(text: str) -> GradedIdeal:
    """Read the ideal JSON format::

        {"m": 2, "n": 2, "generators": [
            {"monomial_exponents_to_coeff": [[[2, 0], [1.0, 0.0]], [[0, 2], [-1.0, 0.0]]]}]}
    """
    doc = json.loads(text)
    m, n = int(doc["m"]), int(doc["n"])
    index = _monomial_index(m, n)
    rows = np.zeros((len(doc["generators"]), n_monomials(m, n)), dtype=complex)
    for r, gen in enumerate(doc["generators"]):
        for exps, (re, im) in gen["monomial_exponents_to_coeff"]:
            exps = tuple(int(e) for e in exps)
            if len(exps) != m or sum(exps) != n:
                raise ValueError(f"monomial {exps} is not of degree {n} in {m} variables")
            rows[r, index[exps]] += complex(re, im)
    return GradedIdeal.from_rows(m, n, rows)


def serialize_ideal(J: GradedIdeal) -> str:
    mons = monomials(J.m, J.n)
    gens = []
    for row in J.generators.vectors:
        terms = [[list(mons[i]), [c.real, c.imag]] for i, c in enumerate(row) if c != 0]
        gens.append({"monomial_exponents_to_coeff": terms})
    return json.dumps({"m": J.m, "n": J.n, "generators": gens})


def _degree_piece(J: GradedIdeal, N: int) -> np.ndarray:
    """Rows ``x^α g_i`` with ``|α| = N - n`` spanning ``J^N``."""
    m, n = J.m, J.n
    gens = J.generators.vectors
    target = _monomial_index(m, N)
    src = monomials(m, n)
    shifts = monomials(m, N - n)
    rows = np.zeros((len(gens) * len(shifts), n_monomials(m, N)), dtype=complex)
    cols = np.array([[target[tuple(a + b for a, b in zip(alpha, beta))] for beta in src] for alpha in shifts])
    for gi, g in enumerate(gens):
        for ai in range(len(shifts)):
            rows[gi * len(shifts) + ai, cols[ai]] = g
    return rows


def ideal_rank(J: GradedIdeal, N: int, tol: float = ZERO_TOL) -> tuple[int, float]:
    """``(dim J^N, gap_ratio)`` with the invariants-module threshold policy."""
    if N < J.n or len(J.generators.vectors) == 0:
        return 0, math.inf
    A = _degree_piece(J, N)
    sv = np.linalg.svd(A, compute_uv=False)
    lam = np.concatenate([sv ** 2, np.zeros(max(0, A.shape[0] - sv.size))])
    zeros, gap = _count_zero_cluster(lam, tol)
    return A.shape[0] - zeros, gap


def hilbert_function(J: GradedIdeal, N: int, dense_limit: int = DENSE_LIMIT, tol: float = ZERO_TOL) -> int:
    """``h_J(N) = dim R^N / J^N``.

    Raises
    ------
    SizeOverLimit
        If ``R^N`` has more than ``dense_limit`` monomials.
    ArithmeticError
        If the rank is numerically ambiguous (gap ratio below 1e3).
    """
    if N < 0:
        raise ValueError("degree must be nonnegative")
    size = n_monomials(J.m, N)
    if size > dense_limit:
        raise SizeOverLimit(f"R^{N} in {J.m} variables has {size} monomials (limit {dense_limit})")
    rank, gap = ideal_rank(J, N, tol)
    if gap < CERTAINTY_GAP:
        raise ArithmeticError(f"rank of J^{N} is numerically ambiguous (gap ratio {gap:.3g})")
    return size - rank


@dataclass(frozen=True)
class HilbertTable:
    values: tuple[int, ...]
    regularity: int | None = None
    dimension: int | None = None
    eventual_polynomial: tuple[Fraction, ...] | None = None  # coefficients, constant term first

    def polynomial_value(self, j: int) -> Fraction:
        return sum((c * j ** i for i, c in enumerate(self.eventual_polynomial)), Fraction(0))


def _interpolate(points: Sequence[tuple[int, int]]) -> tuple[Fraction, ...]:
    """Exact coefficients (constant first) of the polynomial through the points."""
    deg = len(points) - 1
    A = [[Fraction(x) ** p for p in range(deg + 1)] + [Fraction(y)] for x, y in points]
    for col in range(deg + 1):
        piv = next(r for r in range(col, deg + 1) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(deg + 1):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    coeffs = [A[i][-1] / A[i][i] for i in range(deg + 1)]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def regularity_and_dimension(table: HilbertTable | Sequence[int], m: int, n: int) -> tuple[int, int]:
    """Fit the eventual polynomial of a Hilbert table; return ``(regularity, dimension)``.

    Polynomial degrees are tried in increasing order; degree ``e`` is accepted
    when the last ``max(3, e + 2)`` entries agree with it exactly.  The
    dimension is the degree of the fitted polynomial (0 for constants,
    including the zero polynomial).

    Raises
    ------
    TailNotStabilized
        If the table has fewer than ``m(n-1) + 3`` entries or no degree fits.
    RegularityBoundViolated
        If a zero-dimensional fit has regularity above ``m(n-1) + 1``.
    """
    values = list(table.values if isinstance(table, HilbertTable) else table)
    if len(values) < m * (n - 1) + 3:
        raise TailNotStabilized(f"need at least {m * (n - 1) + 3} entries, got {len(values)}")
    L = len(values)
    for deg in range(0, m):
        window = max(3, deg + 2)
        if window > L:
            break
        pts = [(j, values[j]) for j in range(L - deg - 1, L)]
        coeffs = _interpolate(pts)
        fit = HilbertTable((), eventual_polynomial=coeffs)
        if all(fit.polynomial_value(j) == values[j] for j in range(L - window, L)):
            break
    else:
        raise TailNotStabilized("no polynomial of degree < m fits the tail")
    if window > L:
        raise TailNotStabilized("table too short for the tail window")
    reg = L
    while reg > 0 and fit.polynomial_value(reg - 1) == values[reg - 1]:
        reg -= 1
    dimension = len(coeffs) - 1
    if dimension == 0 and reg > m * (n - 1) + 1:
        raise RegularityBoundViolated(f"regularity {reg} exceeds m(n-1)+1 = {m * (n - 1) + 1}")
    return reg, dimension


def hilbert_table(J: GradedIdeal, up_to: int, dense_limit: int = DENSE_LIMIT) -> HilbertTable:
    """Values ``h(0..up_to)`` plus regularity, dimension and eventual polynomial when the tail fits."""
    values = tuple(hilbert_function(J, j, dense_limit) for j in range(up_to + 1))
    try:
        reg, dim = regularity_and_dimension(values, J.m, J.n)
    except TailNotStabilized:
        return HilbertTable(values)
    deg = dim
    pts = [(j, values[j]) for j in range(len(values) - deg - 1, len(values))]
    return HilbertTable(values, reg, dim, _interpolate(pts))


def _row_space(rows: np.ndarray, tol: float = ZERO_TOL, scale: float = 1.0) -> np.ndarray:
    """Orthonormal basis of the row span, judged against a fixed ``scale``.

    The threshold is absolute (relative to ``scale``), so rows that are pure
    rounding noise are dropped instead of being promoted to generators.
    """
    if rows.shape[0] == 0:
        return rows
    _, sv, Vh = np.linalg.svd(rows, full_matrices=False)
    keep = sv ** 2 >= tol * scale ** 2
    return Vh[keep]


def ideal_of_group(group_ops: Sequence[np.ndarray], m: int, n: int, tol: float = ZERO_TOL) -> GradedIdeal:
    """``J(G)``: the ideal generated by ``symmetrize(invariant_complement(G))``."""
    comp = invariant_complement(group_ops, tol)
    if len(comp) == 0:
        return GradedIdeal.zero(m, n)
    # complement rows have unit norm, so symmetrized images are O(1) or noise
    return GradedIdeal.from_rows(m, n, _row_space(symmetrize(comp, m, n), tol))


def correspondence_check(group_ops: Sequence[np.ndarray], N: int, m: int, seed: int = 0,
                         method: str = "auto") -> tuple[int, int]:
    """Both sides of ``dim Hom_{⟨G⊗I, S_N⟩}(W^{⊗N}, C) = dim R^N / J^N(G)``.

    ``group_ops`` generate ``G`` acting on ``W^{⊗n}`` with ``W = C^m``.  The
    left side is a direct fixed-space computation on ``W^{⊗N}``; the right
    side is the Hilbert function of the ideal generated by the symmetrized
    complement of the invariants.
    """
    mats = [np.asarray(g, dtype=complex) for g in group_ops]
    M = mats[0].shape[0]
    n = round(math.log(M, m))
    if m ** n != M:
        raise ValueError(f"operator size {M} is not a power of m={m}")
    if N < n:
        raise ValueError("N must be at least the arity n")
    gates = [extend_to_N(UnitaryGate(m, n, matrix=g), N) for g in mats]
    gates += [permutation_gate(s, m) for s in symmetric_group_generators(N)]
    lhs_report = fixed_space_dim(gates, method=method, seed=seed)
    if not lhs_report.certain:
        raise ArithmeticError(f"direct side inconclusive: {lhs_report}")
    J = ideal_of_group(mats, m, n)
    rhs = hilbert_function(J, N)
    return lhs_report.value, rhs


__all__ = [
    "GradedIdeal",
    "HilbertTable",
    "HomogeneousPolynomialSpace",
    "RegularityBoundViolated",
    "SizeOverLimit",
    "TailNotStabilized",
    "correspondence_check",
    "hilbert_function",
    "hilbert_table",
    "ideal_of_group",
    "invariant_complement",
    "monomials",
    "parse_ideal",
    "regularity_and_dimension",
    "serialize_ideal",
    "symmetrize",
]
