import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gaplab.errors import NotInvertible
from gaplab.kernel import (
    DEFAULT_TOL,
    TOLERANCES_ENV,
    Tolerances,
    null_space,
    operator_norm,
    orthonormal_columns,
    rank,
    solve_invertible,
    svd,
)


def test_svd_examples():
    assert np.allclose(svd(np.diag([3, 4]))[1], [4, 3])
    assert np.allclose(svd(np.eye(3))[1], [1, 1, 1])
    assert np.allclose(svd([[0, 1], [0, 0]])[1], [1, 0])


def test_svd_of_empty_matrix():
    U, s, V = svd(np.zeros((3, 0)))
    assert s.size == 0 and U.shape[0] == 3 and V.shape[0] == 0


def test_operator_norm_examples():
    assert operator_norm(np.zeros((2, 3))) == 0
    assert operator_norm(np.diag([3, 4])) == pytest.approx(4)
    assert operator_norm([[1, 1], [0, 1]]) == pytest.approx((1 + 5 ** 0.5) / 2, abs=1e-14)


def test_rank_examples():
    assert rank(np.zeros((3, 3))) == 0
    assert rank(np.eye(3)) == 3
    assert rank([[1, 2], [2, 4]]) == 1


def test_solve_examples():
    b = np.array([1.0, 2.0])
    assert np.allclose(solve_invertible(np.eye(2), b), b)
    assert np.allclose(solve_invertible(np.diag([2, 4]), [2, 4]), [1, 1])
    with pytest.raises(NotInvertible):
        solve_invertible([[1, 1], [0, 0]], b)


def test_solve_rejects_ill_conditioned():
    with pytest.raises(NotInvertible):
        solve_invertible(np.diag([1, 1e-13]), [1, 1])


def test_solve_absolute_scale_catches_tiny_scalar():
    solve_invertible([[1e-17]], [1.0])
    with pytest.raises(NotInvertible):
        solve_invertible([[1e-17]], [1.0], scale=1.0)


def test_orthonormal_columns_examples():
    Q = orthonormal_columns([[2], [0]])
    assert Q.shape == (2, 1) and abs(abs(Q[0, 0]) - 1) < 1e-15
    assert orthonormal_columns([[1, 2], [2, 4]]).shape[1] == 1
    assert orthonormal_columns(np.zeros((3, 0))).shape == (3, 0)


def test_null_space_is_orthonormal_kernel():
    M = np.array([[1, 2, 3], [2, 4, 6]], dtype=complex)
    N = null_space(M)
    assert N.shape == (3, 2)
    assert np.allclose(M @ N, 0, atol=1e-12)
    assert np.allclose(N.conj().T @ N, np.eye(2))


def test_tolerances_defaults_and_validation():
    assert DEFAULT_TOL.fd_steps == (1e-3, 1e-4, 1e-5)
    with pytest.raises(ValueError):
        Tolerances(rank_tol=-1)


def test_tolerances_from_env(tmp_path, monkeypatch):
    p = tmp_path / "tol.json"
    p.write_text(json.dumps({"cr_tol": 1e-4}))
    monkeypatch.setenv(TOLERANCES_ENV, str(p))
    tol = Tolerances.from_env()
    assert tol.cr_tol == 1e-4 and tol.gap_tol == DEFAULT_TOL.gap_tol
    monkeypatch.delenv(TOLERANCES_ENV)
    assert Tolerances.from_env() == DEFAULT_TOL


complex_entries = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.complex128, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=complex_entries))
def test_svd_reconstruction_property(M):
    U, s, V = svd(M)
    assert np.all(np.diff(s) <= 0)
    err = np.abs(U @ np.diag(s) @ V.conj().T - M).max()
    assert err <= 1e-12 * max(s[0], 1e-300) * max(M.shape) + 1e-300
