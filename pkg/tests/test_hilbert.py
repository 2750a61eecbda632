import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from univcheck.gateset import builtin_gate
from univcheck.hilbert import (
    GradedIdeal,
    HomogeneousPolynomialSpace,
    RegularityBoundViolated,
    SizeOverLimit,
    TailNotStabilized,
    correspondence_check,
    hilbert_function,
    hilbert_table,
    ideal_of_group,
    invariant_complement,
    monomials,
    parse_ideal,
    regularity_and_dimension,
    serialize_ideal,
    symmetrize,
)
from univcheck.invariants import fixed_space_dim, haar_unitary


def word(m, letters):
    """Basis tensor w_{i1} ⊗ ... ⊗ w_{ij} (1-based letters)."""
    v = np.zeros(m ** len(letters))
    v[np.ravel_multi_index([i - 1 for i in letters], (m,) * len(letters))] = 1
    return v


def mono(m, exps):
    j = sum(exps)
    v = np.zeros(len(monomials(m, j)))
    v[monomials(m, j).index(tuple(exps))] = 1
    return v


def unitary_with_fixed_space(rng, M, fixed):
    q = haar_unitary(M, rng)
    phases = np.concatenate([np.ones(fixed), np.exp(2j * np.pi * rng.random(M - fixed))])
    return q @ np.diag(phases) @ q.conj().T


# --- symmetrization --------------------------------------------------------------


def test_symmetrize_examples():
    m = 2
    np.testing.assert_allclose(symmetrize(word(m, [1, 2]) - word(m, [2, 1]), m, 2), 0)
    np.testing.assert_allclose(symmetrize(word(m, [1, 1]), m, 2), mono(m, (2, 0)))
    np.testing.assert_allclose(symmetrize(word(m, [1, 2]) + word(m, [2, 1]), m, 2), 2 * mono(m, (1, 1)))
    with pytest.raises(ValueError):
        symmetrize(np.ones(5), 2, 2)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 4), j=st.integers(1, 4), data=st.data())
def test_symmetrize_kills_permuted_differences(m, j, data):
    letters = data.draw(st.lists(st.integers(1, m), min_size=j, max_size=j))
    perm = data.draw(st.permutations(range(j)))
    other = [letters[p] for p in perm]
    np.testing.assert_allclose(symmetrize(word(m, letters) - word(m, other), m, j), 0)


@settings(max_examples=20, deadline=None)
@given(m=st.integers(1, 4), j=st.integers(0, 4))
def test_symmetrize_is_surjective(m, j):
    image = symmetrize(np.eye(m**j), m, j)
    assert np.linalg.matrix_rank(image) == math.comb(m + j - 1, j)


def test_monomial_basis_counts():
    for m, j in itertools.product(range(1, 5), range(0, 5)):
        size = math.comb(m + j - 1, j)
        assert len(HomogeneousPolynomialSpace(m, j, np.zeros((0, size))).basis) == size
    assert monomials(2, 2) == ((2, 0), (1, 1), (0, 2))


# --- invariant complement ------------------------------------------------------------


def test_invariant_complement_examples():
    assert invariant_complement([np.eye(2)]).shape == (0, 2)
    comp = invariant_complement([np.diag([1.0, -1.0])])
    assert comp.shape == (1, 2)
    np.testing.assert_allclose(np.abs(comp[0]), [0, 1])


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), fixed=st.integers(0, 3))
def test_duality(seed, fixed):
    rng = np.random.default_rng(seed)
    g = unitary_with_fixed_space(rng, 4, fixed)
    ops = [g] if fixed == 0 else [g, unitary_with_fixed_space(rng, 4, 4)]
    comp = invariant_complement(ops)
    assert len(comp) + fixed_space_dim(ops).value == 4
    assert len(comp) == 4 - fixed


# --- Hilbert functions ------------------------------------------------------------------


def test_hilbert_examples():
    J = GradedIdeal.from_monomials(2, 1, [(0, 1)])
    assert [hilbert_function(J, N) for N in range(6)] == [1] * 6
    J0 = GradedIdeal.zero(2)
    assert [hilbert_function(J0, N) for N in range(6)] == [N + 1 for N in range(6)]
    Jfull = GradedIdeal.from_monomials(2, 2, [(2, 0), (1, 1), (0, 2)])
    assert [hilbert_function(Jfull, N) for N in range(5)] == [1, 2, 0, 0, 0]


def test_table_regularity_examples():
    t = hilbert_table(GradedIdeal.from_monomials(2, 1, [(0, 1)]), 5)
    assert (t.regularity, t.dimension) == (0, 0)
    t = hilbert_table(GradedIdeal.zero(2), 5)
    assert t.dimension == 1
    assert [t.polynomial_value(j) for j in range(8)] == [j + 1 for j in range(8)]
    t = hilbert_table(GradedIdeal.from_monomials(2, 2, [(2, 0), (1, 1), (0, 2)]), 5)
    assert (t.regularity, t.dimension) == (2, 0)
    assert t.eventual_polynomial == (0,)


def test_short_table_is_refused():
    with pytest.raises(TailNotStabilized):
        regularity_and_dimension([1, 2, 0], 2, 2)


def test_lazard_violation_is_reported():
    # a made-up table that only reaches its constant at index 6 > m(n-1)+1 = 3
    with pytest.raises(RegularityBoundViolated):
        regularity_and_dimension([1, 2, 3, 4, 5, 6, 0, 0, 0], 2, 2)


def test_positive_dimensional_tables():
    # one quadric in three variables: h(N) = 2N + 1 from N = 0
    J = GradedIdeal.from_rows(3, 2, [mono(3, (2, 0, 0)) + mono(3, (0, 1, 1))])
    t = hilbert_table(J, 7)
    assert t.values[:4] == (1, 3, 5, 7)
    assert (t.regularity, t.dimension) == (0, 1)
    # (x1^2) is a double point on the projective line: h = 1, 2, 2, ...
    t = hilbert_table(GradedIdeal.from_monomials(2, 2, [(2, 0)]), 5)
    assert t.values == (1, 2, 2, 2, 2, 2)
    assert (t.regularity, t.dimension) == (1, 0)


def test_size_limit():
    with pytest.raises(SizeOverLimit):
        hilbert_function(GradedIdeal.zero(20), 10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 3), n=st.integers(1, 3))
def test_adding_generators_never_increases_h(seed, m, n):
    rng = np.random.default_rng(seed)
    size = math.comb(m + n - 1, n)
    rows = rng.normal(size=(3, size)) * (rng.random((3, size)) < 0.5)
    small = GradedIdeal.from_rows(m, n, rows[:1])
    big = GradedIdeal.from_rows(m, n, rows)
    for N in range(m * (n - 1) + 4):
        assert hilbert_function(big, N) <= hilbert_function(small, N)


def test_ideal_round_trip():
    J = GradedIdeal.from_rows(2, 2, [mono(2, (2, 0)) - 1j * mono(2, (0, 2))])
    back = parse_ideal(serialize_ideal(J))
    np.testing.assert_array_equal(back.generators.vectors, J.generators.vectors)


# --- correspondence ----------------------------------------------------------------------


@pytest.mark.parametrize("N", range(1, 7))
def test_correspondence_trivial_groups(N):
    assert correspondence_check([np.eye(2)], N, 2) == (N + 1, N + 1)
    assert correspondence_check([np.diag([1.0, -1.0])], N, 2) == (1, 1)


def test_ideal_of_diagonal_sign_is_x2():
    J = ideal_of_group([np.diag([1.0, -1.0])], 2, 1)
    assert J.generators.vectors.shape == (1, 2)
    np.testing.assert_allclose(np.abs(J.generators.vectors[0]), [0, 1])


SWAP = builtin_gate("SWAP").matrix
X, Z = builtin_gate("X").matrix, builtin_gate("Z").matrix


@pytest.mark.parametrize(
    "ops, m",
    [
        ([SWAP], 2),
        ([np.kron(X, X), np.kron(Z, Z)], 2),
        ([np.kron(Z, Z)], 2),
        ([np.diag([1, 1j, -1])], 3),
        ([np.kron(np.diag([1, 1j]), np.diag([1, -1j]))], 2),
    ],
    ids=["swap", "xx-zz", "zz", "qutrit-phase", "s-sdag"],
)
@pytest.mark.parametrize("N", [2, 3, 4])
def test_correspondence_finite_groups(ops, m, N):
    n = round(math.log(ops[0].shape[0], m))
    if N < n:
        pytest.skip("N below arity")
    lhs, rhs = correspondence_check(ops, N, m)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("N", [2, 3, 4])
def test_correspondence_tori_with_fixed_vectors(seed, N):
    # a unitary with a fixed subspace generates a torus with nonzero invariants
    rng = np.random.default_rng(seed)
    g = unitary_with_fixed_space(rng, 4, 1 + seed % 3)
    lhs, rhs = correspondence_check([g], N, 2)
    assert lhs == rhs
    lhs, rhs = correspondence_check([g], min(N, 3), 4)
    assert lhs == rhs
