import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaplab.errors import DimensionMismatch, NotComplementary, NotInvertible
from gaplab.grassmann import (
    check_perturbation_bound,
    check_projector_gap_bound,
    check_range_delta_bound,
    delta,
    full_space,
    gap,
    intersect,
    is_complementary,
    map_subspace,
    oblique_projection,
    orthocomplement,
    projector,
    projector_distance,
    same_subspace,
    subspace_from_spanning,
    sum_subspace,
    zero_subspace,
)
from gaplab.randgen import perturb_subspace, random_complementary_pair, random_subspace

E1 = subspace_from_spanning([[1], [0]])
E2 = subspace_from_spanning([[0], [1]])


def line(theta):
    return subspace_from_spanning([[math.cos(theta)], [math.sin(theta)]])


def span(*vectors):
    return subspace_from_spanning(np.array(vectors, dtype=complex).T)


def test_subspace_from_spanning_examples():
    assert subspace_from_spanning([[2], [0]]).dim == 1
    assert subspace_from_spanning([[1, 2], [2, 4]]).dim == 1
    assert subspace_from_spanning(np.zeros((3, 0))).dim == 0


def test_orthocomplement_examples():
    assert same_subspace(orthocomplement(E1), E2)
    assert same_subspace(orthocomplement(zero_subspace(3)), full_space(3))
    assert same_subspace(orthocomplement(span([1, 1])), span([1, -1]))


def test_projector_examples():
    assert np.allclose(projector(E1), np.diag([1, 0]))
    assert np.allclose(projector(zero_subspace(2)), 0)
    assert np.allclose(projector(span([1, 1])), 0.5 * np.ones((2, 2)))


def test_delta_examples():
    assert delta(E1, E1) == pytest.approx(0, abs=1e-15)
    assert delta(E1, line(math.pi / 6)) == pytest.approx(0.5, abs=1e-12)
    assert delta(full_space(2), zero_subspace(2)) == pytest.approx(1, abs=1e-15)
    assert delta(zero_subspace(2), E1) == 0


def test_delta_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        delta(E1, full_space(3))


def test_gap_examples():
    assert gap(E1, E1) == pytest.approx(0, abs=1e-15)
    assert gap(E1, line(math.pi / 6)) == pytest.approx(0.5, abs=1e-12)
    assert gap(E1, E2) == pytest.approx(1, abs=1e-15)


def test_oblique_projection_examples():
    assert np.allclose(oblique_projection(E1, E2), np.diag([1, 0]))
    assert np.allclose(oblique_projection(E1, span([1, 1])), [[1, -1], [0, 0]], atol=1e-14)
    with pytest.raises(NotComplementary):
        oblique_projection(E1, E1)


def test_is_complementary_examples():
    assert is_complementary(E1, E2)
    assert not is_complementary(E1, E1)
    assert not is_complementary(E1, full_space(2))


def test_projector_gap_bound_examples():
    assert check_projector_gap_bound(E1, E2, E1, E2).lhs == pytest.approx(0, abs=1e-15)
    rep = check_projector_gap_bound(E1, E2, line(math.pi / 6), E2)
    assert rep.lhs == pytest.approx(0.5, abs=1e-12) and rep.holds


def test_perturbation_bound_examples():
    rep = check_perturbation_bound(E1, E2, E1, E2)
    assert rep.hypotheses_hold and rep.lhs == pytest.approx(0, abs=1e-15) and rep.holds
    rep = check_perturbation_bound(E1, E2, line(0.01), E2)
    assert rep.hypotheses_hold and rep.holds and rep.lhs <= rep.rhs
    rep = check_perturbation_bound(E1, E2, E2, E1)
    assert not rep.hypotheses_hold


def test_range_delta_bound_examples():
    assert check_range_delta_bound([[1], [0]], [[1], [0]]).rhs == 0
    rep = check_range_delta_bound([[1], [0]], [[0], [1]])
    assert rep.lhs == pytest.approx(1) and rep.rhs == pytest.approx(math.sqrt(2)) and rep.holds


def test_map_subspace_examples():
    X = span([1, 1])
    assert same_subspace(map_subspace(np.eye(2), X), X)
    assert same_subspace(map_subspace(np.diag([1, 2]), X), span([1, 2]))
    with pytest.raises(NotInvertible):
        map_subspace([[1, 0], [0, 0]], X)


def test_intersection_and_sum_examples():
    X = span([1, 0, 0], [0, 1, 0])
    Y = span([0, 1, 0], [0, 0, 1])
    assert same_subspace(intersect(X, X), X)
    assert intersect(E1, E2).dim == 0
    assert same_subspace(intersect(X, Y), span([0, 1, 0]))
    assert same_subspace(sum_subspace(E1, zero_subspace(2)), E1)
    assert sum_subspace(E1, E2).dim == 2
    assert sum_subspace(span([1, 1]), span([1, -1])).dim == 2


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 12))
def test_hilbert_gap_identity_property(seed, n):
    rng = np.random.default_rng(seed)
    X, Y = random_subspace(rng, n), random_subspace(rng, n)
    assert abs(gap(X, Y) - projector_distance(X, Y)) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 10))
def test_oblique_projection_laws_property(seed, n):
    rng = np.random.default_rng(seed)
    X, Y = random_complementary_pair(rng, n)
    P = oblique_projection(X, Y)
    Q = oblique_projection(Y, X)
    scale = max(1.0, np.linalg.norm(P, 2)) ** 2
    assert np.abs(P @ P - P).max() <= 1e-9 * scale
    assert np.abs(P + Q - np.eye(n)).max() <= 1e-9 * scale
    assert np.abs(P @ X.basis - X.basis).max(initial=0) <= 1e-9 * scale
    assert np.abs(P @ Y.basis).max(initial=0) <= 1e-9 * scale


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 10), st.floats(-6, -1))
def test_perturbation_bound_property(seed, n, log_eps):
    rng = np.random.default_rng(seed)
    X, Y = random_complementary_pair(rng, n, int(rng.integers(1, n)))
    Xp = perturb_subspace(rng, X, 10 ** log_eps)
    rep = check_perturbation_bound(X, Y, Xp, Y)
    if rep.hypotheses_hold:
        assert rep.holds, rep
