import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaplab import graphop as go
from gaplab.errors import (
    AdjointIsRelation,
    DimensionMismatch,
    NotAGraph,
    NotInDomain,
    NotInjective,
    NotTransversal,
    PreconditionViolated,
)
from gaplab.grassmann import same_subspace, subspace_from_spanning, zero_subspace
from gaplab.randgen import cmat, random_partial_operator


def span(*vectors):
    return subspace_from_spanning(np.array(vectors, dtype=complex).T)


def partial(n1, n2, W, V):
    return go.GraphOperator.from_resolution(np.array(W, complex), np.array(V, complex))


E1_ID = partial(2, 2, [[1], [0]], [[1], [0]])  # Dom = span(e1), e1 -> e1


def test_from_matrix_examples():
    T = go.from_matrix(np.eye(2))
    assert np.allclose(T.matrix, np.eye(2))
    assert same_subspace(go.graph(go.from_matrix([[2]])), span([1, 2]))
    Z = go.from_matrix(np.zeros((2, 3)))
    assert same_subspace(go.graph(Z), subspace_from_spanning(np.vstack([np.eye(3), np.zeros((2, 3))])))


def test_graph_examples():
    B = go.graph(go.from_matrix([[2]])).basis
    assert np.allclose(np.abs(B.ravel()), np.array([1, 2]) / math.sqrt(5))
    assert same_subspace(go.graph(go.from_matrix([[1]])), span([1, 1]))
    assert go.graph(go.zero_domain_operator(2, 3)).dim == 0


def test_from_graph_subspace_examples():
    T = go.from_graph_subspace(span([1, 2]), 1, 1)
    assert np.allclose(T.matrix, [[2]])
    with pytest.raises(NotAGraph) as info:
        go.from_graph_subspace(span([0, 1]), 1, 1)
    assert np.allclose(np.abs(info.value.witness), [0, 1])
    assert go.from_graph_subspace(zero_subspace(2), 1, 1).domain_dim == 0


def test_apply_examples():
    assert np.allclose(go.apply(go.from_matrix(np.eye(2)), [1, 2]), [1, 2])
    assert np.allclose(go.apply(go.from_matrix([[2]]), [3]), [6])
    with pytest.raises(NotInDomain):
        go.apply(E1_ID, [0, 1])


def test_domain_range_kernel_examples():
    I = go.from_matrix(np.eye(2))
    assert go.domain(I).dim == 2 and go.range_(I).dim == 2 and go.kernel(I).dim == 0
    N = go.from_matrix([[0, 1], [0, 0]])
    assert same_subspace(go.kernel(N), span([1, 0]))
    assert same_subspace(go.range_(N), span([1, 0]))
    Z = go.zero_domain_operator(2, 2)
    assert go.domain(Z).dim == go.range_(Z).dim == go.kernel(Z).dim == 0


def test_reduced_min_modulus_examples():
    assert go.reduced_min_modulus(go.from_matrix(np.diag([3, 4]))) == pytest.approx(3)
    assert go.reduced_min_modulus(go.from_matrix(np.zeros((2, 2)))) == 0
    assert go.reduced_min_modulus(go.from_matrix([[2]])) == pytest.approx(2)


def test_left_invertible_perturbation_examples():
    T = go.from_matrix(np.diag([3, 4]))
    rep = go.check_left_invertible_perturbation(np.diag([3, 4]), np.zeros((2, 2)))
    assert rep.holds and rep.lhs == pytest.approx(0, abs=1e-12)
    rep = go.check_left_invertible_perturbation(np.diag([3, 4]), np.diag([1, 0]))
    assert rep.holds
    assert T.everywhere_defined


def test_operator_gap_examples():
    T = go.from_matrix([[3]])
    assert go.operator_gap(T, T) == pytest.approx(0, abs=1e-15)
    assert go.operator_gap(go.from_matrix([[0]]), go.from_matrix([[1]])) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15)
    for n in (1, 10, 1000):
        g = go.operator_gap(go.from_matrix([[0]]), go.from_matrix([[n]]))
        assert g == pytest.approx(n / math.sqrt(1 + n * n), abs=1e-14)


def test_operator_gap_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        go.operator_gap(go.from_matrix([[1]]), go.from_matrix(np.eye(2)))


def test_compose_examples():
    T = go.from_matrix([[1, 2], [3, 4]])
    assert go.operator_gap(go.compose(go.from_matrix(np.eye(2)), T), T) <= 1e-14
    AB = go.compose(E1_ID, go.from_matrix(np.eye(2)))
    assert same_subspace(go.domain(AB), span([1, 0]))
    assert go.compose(T, go.zero_domain_operator(2, 2)).domain_dim == 0


def test_add_examples():
    T = go.from_matrix([[1, 2], [3, 4]])
    assert go.operator_gap(go.add(T, go.from_matrix(np.zeros((2, 2)))), T) <= 1e-14
    E2_ID = partial(2, 2, [[0], [1]], [[0], [1]])
    assert go.add(E1_ID, E2_ID).domain_dim == 0
    assert np.allclose(go.add(go.from_matrix([[1]]), go.from_matrix([[2]])).matrix, [[3]])


def test_inverse_examples():
    inv = go.inverse(go.from_matrix([[2]]))
    assert np.allclose(inv.matrix, [[0.5]])
    assert same_subspace(go.graph(inv), span([2, 1]))
    with pytest.raises(NotInjective):
        go.inverse(go.from_matrix([[0, 1], [0, 0]]))
    assert go.operator_gap(go.inverse(E1_ID), E1_ID) <= 1e-15


def test_adjoint_examples():
    M = np.array([[1, 2j], [3, 4 - 1j], [0, 5]])
    assert np.allclose(go.adjoint(go.from_matrix(M)).matrix, M.conj().T)
    T = partial(2, 1, [[1], [0]], [[1]])
    with pytest.raises(AdjointIsRelation) as info:
        go.adjoint(T)
    w = info.value.witness
    assert np.allclose(np.abs(w), [0, 0, 1])
    TT = go.adjoint(go.adjoint(go.from_matrix(M)))
    assert np.allclose(TT.matrix, M)


def test_closed_range_duality_examples():
    assert go.check_closed_range_duality(go.from_matrix(np.eye(3))).holds
    rep = go.check_closed_range_duality(go.from_matrix([[0, 1], [0, 0]]))
    assert rep.holds
    with pytest.raises(PreconditionViolated):
        go.check_closed_range_duality(E1_ID)


def test_spectrum_examples():
    assert go.spectrum(go.from_matrix(np.diag([1, 2]))).matches([1, 2])
    assert go.is_in_resolvent_set(go.from_matrix(np.eye(2)), 0)
    for lam in (0, 1, 2.5 + 1j):
        assert not go.is_in_resolvent_set(E1_ID, lam)
    with pytest.raises(PreconditionViolated):
        go.spectrum(E1_ID)


def test_characteristic_matrix_examples():
    M = go.characteristic_matrix(go.from_matrix([[2]]))
    assert np.abs(M - np.array([[1, 2], [2, 4]]) / 5).max() <= 1e-12
    assert np.allclose(go.characteristic_matrix(go.from_matrix([[0]])), np.diag([1, 0]))
    M = go.characteristic_matrix(go.from_matrix(cmat(np.random.default_rng(1), 3, 2)))
    assert np.allclose(M @ M, M) and np.allclose(M, M.conj().T)


def test_relative_characteristic_examples():
    T = go.from_matrix([[1 + 1j]])
    assert np.abs(go.relative_characteristic_matrix(T, T) - go.characteristic_matrix(T)).max() <= 1e-10
    M = go.relative_characteristic_matrix(go.from_matrix([[1]]), go.from_matrix([[0]]))
    assert np.allclose(M, [[1, 0], [1, 0]], atol=1e-14)
    with pytest.raises(NotTransversal):
        go.relative_characteristic_matrix(go.from_matrix([[1]]), go.from_matrix([[-1]]))
    with pytest.raises(NotTransversal):
        go.relative_characteristic_blocks([[1]], [[-1]])


def test_block_operator_examples():
    Z = go.block_operator(go.from_matrix([[0]]), go.from_matrix([[0]]))
    assert np.allclose(Z.matrix, 0)
    T = go.block_operator(go.from_matrix([[1]]), go.from_matrix([[4]]))
    assert np.allclose(T.matrix, [[0, 1], [4, 0]])
    A = partial(2, 1, [[1], [0]], [[1]])  # A: C^2 -> C^1 on span(e1)
    B = go.from_matrix(np.ones((2, 1)))   # B: C^1 -> C^2
    T = go.block_operator(A, B)
    assert same_subspace(go.domain(T), span([1, 0, 0], [0, 1, 0]))


def test_spectrum_split_examples():
    rep = go.check_spectrum_split([[1]], [[4]])
    assert rep.holds and np.allclose(sorted(rep.details["squares"].real), [4, 4])
    T = go.block_operator(go.from_matrix([[1]]), go.from_matrix([[4]]))
    assert go.spectrum(T).matches([2, -2])
    assert go.check_spectrum_split(np.zeros((2, 3)), np.zeros((3, 2))).holds
    rng = np.random.default_rng(5)
    assert go.check_spectrum_split(cmat(rng, 3, 2), cmat(rng, 2, 3)).holds


seeds = st.integers(0, 2 ** 32 - 1)
dims = st.integers(1, 6)


@settings(max_examples=50, deadline=None)
@given(seeds, dims, dims)
def test_graph_roundtrip_property(seed, n1, n2):
    T = random_partial_operator(np.random.default_rng(seed), n1, n2)
    back = go.from_graph_subspace(go.graph(T), n1, n2)
    assert go.operator_gap(back, T) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(seeds, dims, dims)
def test_inverse_involution_property(seed, n1, n2):
    rng = np.random.default_rng(seed)
    T = random_partial_operator(rng, n1, n2, int(rng.integers(0, min(n1, n2) + 1)))
    inv = go.inverse(T)
    assert np.array_equal(go.graph(inv).basis, np.vstack([T.V, T.W]))
    assert go.operator_gap(go.inverse(inv), T) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, dims, dims)
def test_adjoint_involution_property(seed, n1, n2):
    M = cmat(np.random.default_rng(seed), n2, n1)
    A = go.adjoint(go.from_matrix(M))
    assert np.abs(A.matrix - M.conj().T).max() <= 1e-10
    assert np.abs(go.adjoint(A).matrix - M).max() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, dims, dims, dims, dims)
def test_compose_associativity_property(seed, a, b, c, d):
    rng = np.random.default_rng(seed)
    A, B, C = (go.from_matrix(cmat(rng, r, s)) for r, s in ((a, b), (b, c), (c, d)))
    lhs = go.compose(A, go.compose(B, C))
    rhs = go.compose(go.compose(A, B), C)
    assert go.operator_gap(lhs, rhs) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_reduced_min_modulus_property(seed, n):
    rng = np.random.default_rng(seed)
    T = random_partial_operator(rng, n, n + 1, int(rng.integers(1, n + 1)))
    inv = go.inverse(T)
    norm_inv = np.linalg.norm(inv.V @ np.linalg.pinv(inv.W), 2)
    assert go.reduced_min_modulus(T) == pytest.approx(1 / norm_inv, rel=1e-9)
