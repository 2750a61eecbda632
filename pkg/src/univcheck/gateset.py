"""Qudit gates, gate sets and the generator collections used for N-universality.

Gates are complex double-precision unitaries on ``(C^d)^{⊗n}`` in the
computational basis with big-endian qudit order: basis index
``i_1 d^{n-1} + ... + i_n`` for ``|i_1 ... i_n>``.

A gate whose dimension exceeds the dense limit is kept *symbolic*: either as a
small matrix acting on a tuple of wires, or as a permutation of tensor
factors.  Symbolic gates are applied through :mod:`univcheck.tensorop` and are
never materialized.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

#: Matrices with more rows than this are never materialized.
DENSE_LIMIT = 4096

UNITARITY_TOL = 1e-10


class GateError(ValueError):
    """Base class for gate validation and parsing errors."""


class NonUnitary(GateError):
    pass


class DimensionMismatch(GateError):
    pass


class UnknownGateName(GateError):
    pass


class MalformedFile(GateError):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def unitarity_defect(u: np.ndarray) -> float:
    """Entrywise max of ``u^† u - I``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass(frozen=True)
class FactorPermutation:
    """A permutation of ``N`` tensor factors.

    ``images[p]`` is the (0-based) position that factor ``p`` is moved to, so
    the associated operator maps ``|i_0 ... i_{N-1}>`` to the basis state whose
    entry at position ``images[p]`` is ``i_p``.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def N(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, N: int) -> FactorPermutation:
        return cls(tuple(range(N)))

    @classmethod
    def transposition(cls, N: int, a: int, b: int) -> FactorPermutation:
        images = list(range(N))
        images[a], images[b] = b, a
        return cls(tuple(images))

    @classmethod
    def cycle(cls, N: int) -> FactorPermutation:
        """The full cycle sending factor ``p`` to ``p + 1 (mod N)``."""
        return cls(tuple((p + 1) % N for p in range(N)))

    def inverse(self) -> FactorPermutation:
        inv = [0] * self.N
        for p, q in enumerate(self.images):
            inv[q] = p
        return FactorPermutation(tuple(inv))

    def compose(self, other: FactorPermutation) -> FactorPermutation:
        """``self ∘ other``: apply ``other`` first."""
        if other.N != self.N:
            raise ValueError("permutations act on different numbers of factors")
        return FactorPermutation(tuple(self.images[q] for q in other.images))

    def is_identity(self) -> bool:
        return self.images == tuple(range(self.N))

    def parity(self) -> int:
        seen = [False] * self.N
        transpositions = 0
        for start in range(self.N):
            length = 0
            p = start
            while not seen[p]:
                seen[p] = True
                p = self.images[p]
                length += 1
            if length:
                transpositions += length - 1
        return transpositions % 2

    def axes(self) -> tuple[int, ...]:
        """Axis order for ``np.transpose`` realising this permutation on a tensor."""
        return self.inverse().images

    def matrix(self, d: int) -> np.ndarray:
        D = d ** self.N
        idx = np.arange(D).reshape((d,) * self.N)
        target = np.transpose(idx, self.axes()).reshape(-1)
        # target[j] = source index landing on basis state j
        P = np.zeros((D, D), dtype=complex)
        P[np.arange(D), target] = 1.0
        return P


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """An ``n``-qudit gate.

    Exactly one representation is populated: ``matrix`` (dense, ``d^n × d^n``),
    ``local`` (a ``d^len(wires)`` square matrix acting on ``wires``, identity
    elsewhere, times ``phase``) or ``permutation`` (times ``phase``).
    """

    d: int
    n: int
    matrix: np.ndarray | None = None
    name: str | None = None
    local: np.ndarray | None = field(default=None, repr=False)
    wires: tuple[int, ...] | None = None
    permutation: FactorPermutation | None = None
    phase: complex = 1.0

    def __post_init__(self):
        if self.d < 2:
            raise GateError(f"d must be >= 2, got {self.d}")
        if self.n < 1:
            raise GateError(f"arity must be >= 1, got {self.n}")
        kinds = [self.matrix is not None, self.local is not None, self.permutation is not None]
        if sum(kinds) != 1:
            raise GateError("a gate needs exactly one of matrix, local, permutation")
        if self.matrix is not None:
            m = _frozen(self.matrix)
            D = self.d ** self.n
            if m.shape != (D, D):
                raise DimensionMismatch(f"matrix shape {m.shape} != ({D}, {D}) for d={self.d}, n={self.n}")
            if unitarity_defect(m) > UNITARITY_TOL:
                raise NonUnitary(f"gate {self.name!r} is not unitary (defect {unitarity_defect(m):.3g})")
            object.__setattr__(self, "matrix", m)
        elif self.local is not None:
            m = _frozen(self.local)
            wires = tuple(int(w) for w in self.wires)
            if len(set(wires)) != len(wires) or not all(0 <= w < self.n for w in wires):
                raise DimensionMismatch(f"bad wires {wires} for arity {self.n}")
            D = self.d ** len(wires)
            if m.shape != (D, D):
                raise DimensionMismatch(f"local matrix shape {m.shape} != ({D}, {D})")
            if unitarity_defect(m) > UNITARITY_TOL:
                raise NonUnitary(f"gate {self.name!r} is not unitary")
            object.__setattr__(self, "local", m)
            object.__setattr__(self, "wires", wires)
        elif self.permutation.N != self.n:
            raise DimensionMismatch("permutation size differs from gate arity")
        if abs(abs(self.phase) - 1) > UNITARITY_TOL:
            raise NonUnitary("global phase must have modulus 1")

    @property
    def dim(self) -> int:
        return self.d ** self.n

    @property
    def is_symbolic(self) -> bool:
        return self.matrix is None

    def to_dense(self, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if self.dim > dense_limit:
            raise DimensionMismatch(f"dimension {self.dim} exceeds dense limit {dense_limit}")
        if self.permutation is not None:
            return self.phase * self.permutation.matrix(self.d)
        return self.phase * _embed_local(self.local, self.wires, self.d, self.n)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a state vector (or a stack of them along the first axis)."""
        x = np.asarray(x, dtype=complex)
        single = x.ndim == 1
        X = x.reshape(-1, self.dim)
        if self.matrix is not None:
            Y = X @ self.matrix.T
        else:
            t = X.reshape((X.shape[0],) + (self.d,) * self.n)
            if self.permutation is not None:
                t = np.transpose(t, (0,) + tuple(a + 1 for a in self.permutation.axes()))
            else:
                t = apply_on_axes(t, self.local, [w + 1 for w in self.wires])
            Y = self.phase * t.reshape(X.shape[0], self.dim)
        return Y[0] if single else Y

    def label(self) -> str:
        return self.name or "custom"


def apply_on_axes(t: np.ndarray, mat: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract ``mat`` against the given axes of ``t`` (row-major order of axes)."""
    axes = list(axes)
    k = len(axes)
    n_ax = t.ndim
    if axes == list(range(n_ax - k, n_ax)):
        shp = t.shape
        return (t.reshape(-1, mat.shape[0]) @ mat.T).reshape(shp)
    if axes == list(range(axes[0], axes[0] + k)):
        shp = t.shape
        left = math.prod(shp[: axes[0]])
        t3 = t.reshape(left, mat.shape[0], -1)
        return np.matmul(mat, t3).reshape(shp)
    moved = np.moveaxis(t, axes, range(n_ax - k, n_ax))
    shp = moved.shape
    out = (moved.reshape(-1, mat.shape[0]) @ mat.T).reshape(shp)
    return np.moveaxis(out, range(n_ax - k, n_ax), axes)


def _embed_local(local: np.ndarray, wires: Sequence[int], d: int, n: int) -> np.ndarray:
    D = d ** n
    eye = np.eye(D, dtype=complex).reshape((D,) + (d,) * n)
    out = apply_on_axes(eye, local, [w + 1 for w in wires])
    # rows of `out` are images of basis vectors
    return out.reshape(D, D).T


@dataclass(frozen=True)
class GateSet:
    d: int
    n: int
    gates: tuple[UnitaryGate, ...]

    def __post_init__(self):
        gates = tuple(self.gates)
        if not gates:
            raise GateError("a gate set needs at least one gate")
        for g in gates:
            if (g.d, g.n) != (self.d, self.n):
                raise DimensionMismatch(
                    f"gate {g.label()} has (d, n) = ({g.d}, {g.n}), expected ({self.d}, {self.n})"
                )
        object.__setattr__(self, "gates", gates)

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def matrices(self) -> list[np.ndarray]:
        return [g.to_dense() for g in self.gates]


# --- built-in gates ---------------------------------------------------------

_S2 = 1 / math.sqrt(2)


def _toffoli() -> np.ndarray:
    m = np.eye(8, dtype=complex)
    m[6:8, 6:8] = [[0, 1], [1, 0]]
    return m


_QUBIT_GATES = {
    "I": (1, np.eye(2)),
    "X": (1, np.array([[0, 1], [1, 0]])),
    "Y": (1, np.array([[0, -1j], [1j, 0]])),
    "Z": (1, np.diag([1, -1])),
    "H": (1, _S2 * np.array([[1, 1], [1, -1]])),
    "S": (1, np.diag([1, 1j])),
    "T": (1, np.diag([1, np.exp(1j * math.pi / 4)])),
    "CNOT": (2, np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])),
    "CZ": (2, np.diag([1, 1, 1, -1])),
    "SWAP": (2, np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])),
    "TOFFOLI": (3, _toffoli()),
}


def shift(d: int) -> np.ndarray:
    """Generalized X: ``|j> -> |j+1 mod d>``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d: int) -> np.ndarray:
    """Generalized Z: ``|j> -> exp(2πij/d)|j>``."""
    return np.diag(np.exp(2j * math.pi * np.arange(d) / d))


BUILTIN_NAMES = tuple(_QUBIT_GATES) + ("SHIFT", "CLOCK")


def builtin_gate(name: str, d: int = 2, n: int | None = None) -> UnitaryGate:
    """Look up a named gate, extended to arity ``n`` by acting on the first qudits."""
    if name in ("SHIFT", "CLOCK"):
        arity, m = 1, shift(d) if name == "SHIFT" else clock(d)
    elif name == "I":
        arity, m = 1, np.eye(d)
    elif name in _QUBIT_GATES:
        if d != 2:
            raise UnknownGateName(f"gate {name} is only defined for d=2")
        arity, m = _QUBIT_GATES[name]
    else:
        raise UnknownGateName(f"unknown gate name {name!r}")
    n = arity if n is None else n
    if n < arity:
        raise DimensionMismatch(f"gate {name} needs arity >= {arity}, got {n}")
    gate = UnitaryGate(d=d, n=arity, matrix=m, name=name)
    return extend_to_N(gate, n) if n > arity else gate


# --- operations -------------------------------------------------------------


def normalize(u: UnitaryGate) -> UnitaryGate:
    """Rescale ``u`` by ``det(u)^{-1/D}`` using the principal branch of the root.

    The result has determinant 1 and represents the same gate.  Symbolic gates
    are normalized through their local factor (or their phase, for
    permutations).
    """
    if u.matrix is not None:
        det = np.linalg.det(u.matrix)
        c = np.exp(-np.log(det) / u.dim)
        return UnitaryGate(u.d, u.n, matrix=c * u.matrix, name=u.name)
    if u.local is not None:
        det = np.linalg.det(u.local)
        c = np.exp(-np.log(det) / u.local.shape[0])
        return UnitaryGate(u.d, u.n, local=c * u.local, wires=u.wires, name=u.name)
    # det P_σ = (-1)^{parity(σ) d^{N-2} d(d-1)/2}
    swapped_pairs = u.d ** (u.n - 2) * u.d * (u.d - 1) // 2 if u.n >= 2 else 0
    odd = u.permutation.parity() and swapped_pairs % 2
    det = (-1) ** odd * u.phase ** u.dim
    c = np.exp(-np.log(complex(det)) / u.dim)
    return UnitaryGate(u.d, u.n, permutation=u.permutation, phase=c * u.phase, name=u.name)


def extend_to_N(u: UnitaryGate, N: int, dense_limit: int = DENSE_LIMIT) -> UnitaryGate:
    """``u ⊗ I``: act as ``u`` on the first ``n`` qudits of an ``N``-qudit system."""
    if N < u.n:
        raise DimensionMismatch(f"cannot extend an arity-{u.n} gate to {N} qudits")
    if N == u.n:
        return u
    rest = u.d ** (N - u.n)
    if u.d ** N <= dense_limit:
        return UnitaryGate(u.d, N, matrix=np.kron(u.to_dense(), np.eye(rest)), name=u.name)
    if u.permutation is not None:
        images = u.permutation.images + tuple(range(u.n, N))
        return UnitaryGate(u.d, N, permutation=FactorPermutation(images), phase=u.phase, name=u.name)
    if u.local is not None:
        return UnitaryGate(u.d, N, local=u.phase * u.local, wires=u.wires, name=u.name)
    return UnitaryGate(u.d, N, local=u.matrix, wires=tuple(range(u.n)), name=u.name)


def permutation_gate(sigma: FactorPermutation, d: int, dense_limit: int = DENSE_LIMIT) -> UnitaryGate:
    name = f"P{tuple(i + 1 for i in sigma.images)}"
    if d ** sigma.N <= dense_limit:
        return UnitaryGate(d, sigma.N, matrix=sigma.matrix(d), name=name)
    return UnitaryGate(d, sigma.N, permutation=sigma, name=name)


def permute_gate(v: UnitaryGate, sigma: FactorPermutation, dense_limit: int = DENSE_LIMIT) -> UnitaryGate:
    """``v^σ = P_σ v P_σ^{-1}``: the gate with its wires relabelled by ``σ``."""
    if sigma.N != v.n:
        raise DimensionMismatch(f"permutation on {sigma.N} factors applied to arity-{v.n} gate")
    if v.matrix is not None and v.dim <= dense_limit:
        P = sigma.matrix(v.d)
        return UnitaryGate(v.d, v.n, matrix=P @ v.matrix @ P.T, name=v.name)
    if v.permutation is not None:
        conj = sigma.compose(v.permutation).compose(sigma.inverse())
        return UnitaryGate(v.d, v.n, permutation=conj, phase=v.phase, name=v.name)
    if v.local is not None:
        wires = tuple(sigma.images[w] for w in v.wires)
        return UnitaryGate(v.d, v.n, local=v.local, wires=wires, phase=v.phase, name=v.name)
    wires = tuple(sigma.images)
    return UnitaryGate(v.d, v.n, local=v.matrix, wires=wires, name=v.name)


def symmetric_group_generators(N: int) -> list[FactorPermutation]:
    """``{(1 2), (1 2 ... N)}``; just ``{(1 2)}`` when ``N = 2``; empty when ``N = 1``."""
    if N < 2:
        return []
    gens = [FactorPermutation.transposition(N, 0, 1)]
    if N >= 3:
        gens.append(FactorPermutation.cycle(N))
    return gens


def universality_generators(
    gateset: GateSet,
    N: int,
    sigma: Sequence[FactorPermutation] | None = None,
    dense_limit: int = DENSE_LIMIT,
) -> list[UnitaryGate]:
    """``Γ_N ∪ Σ``: extended gates followed by permutation gates generating ``S_N``.

    ``sigma`` overrides the default generating set of the symmetric group.
    """
    if N < gateset.n:
        raise DimensionMismatch(f"N={N} is smaller than the gate arity {gateset.n}")
    extended = [extend_to_N(u, N, dense_limit) for u in gateset]
    perms = symmetric_group_generators(N) if sigma is None else list(sigma)
    return extended + [permutation_gate(s, gateset.d, dense_limit) for s in perms]


# --- gate files -------------------------------------------------------------


def _parse_matrix(rows) -> np.ndarray:
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedFile(f"matrix entries must be [re, im] pairs: {exc}") from None
    if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != a.shape[1]:
        raise MalformedFile(f"matrix must be square with [re, im] entries, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def parse_gateset(text: str) -> GateSet:
    """Parse gate-file JSON text into a validated :class:`GateSet`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "d" not in doc or "arity" not in doc or "gates" not in doc:
        raise MalformedFile('expected an object with keys "d", "arity", "gates"')
    d, n = doc["d"], doc["arity"]
    if not isinstance(d, int) or not isinstance(n, int) or d < 2 or n < 1:
        raise MalformedFile('"d" must be an integer >= 2 and "arity" an integer >= 1')
    if not isinstance(doc["gates"], list) or not doc["gates"]:
        raise MalformedFile('"gates" must be a nonempty list')
    gates = []
    for entry in doc["gates"]:
        if not isinstance(entry, dict) or "name" not in entry:
            raise MalformedFile(f"gate entry needs a name: {entry!r}")
        if entry["name"] == "custom":
            if "matrix" not in entry:
                raise MalformedFile("custom gate needs a matrix")
            m = _parse_matrix(entry["matrix"])
            if m.shape[0] != d ** n:
                raise DimensionMismatch(f"custom matrix has size {m.shape[0]}, expected d^arity = {d ** n}")
            gates.append(UnitaryGate(d, n, matrix=m, name=entry.get("label", "custom")))
        else:
            gates.append(builtin_gate(entry["name"], d, n))
    return GateSet(d, n, tuple(gates))


def serialize_gateset(gateset: GateSet) -> str:
    """Write every gate as a custom matrix (lossless for parse_gateset)."""
    gates = []
    for g in gateset:
        m = g.to_dense()
        gates.append({
            "name": "custom",
            "label": g.label(),
            "matrix": [[[z.real, z.imag] for z in row] for row in m.tolist()],
        })
    return json.dumps({"d": gateset.d, "arity": gateset.n, "gates": gates})


def gateset_from_names(names: Sequence[str], d: int = 2, n: int | None = None) -> GateSet:
    """Convenience constructor: ``gateset_from_names(["H", "T", "CNOT"])``."""
    if n is None:
        n = max(_QUBIT_GATES[nm][0] if nm in _QUBIT_GATES else 1 for nm in names)
    return GateSet(d, n, tuple(builtin_gate(nm, d, n) for nm in names))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)
