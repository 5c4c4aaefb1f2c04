"""Random test objects for the verification suites and the test-suite."""

import numpy as np

from . import graphop as go
from .grassmann import Subspace, subspace_from_spanning


def cmat(rng, rows, cols, scale=1.0):
    return scale * (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def random_subspace(rng, n, k=None) -> Subspace:
    if k is None:
        k = int(rng.integers(0, n + 1))
    return subspace_from_spanning(cmat(rng, n, k), ambient_dim=n)


def random_complementary_pair(rng, n, k=None):
    """Generic (X, Y) with dim X + dim Y = n (complementary with probability one)."""
    if k is None:
        k = int(rng.integers(0, n + 1))
    return random_subspace(rng, n, k), random_subspace(rng, n, n - k)


def perturb_subspace(rng, X: Subspace, eps) -> Subspace:
    if X.dim == 0:
        return X
    return subspace_from_spanning(X.basis + cmat(rng, X.ambient_dim, X.dim, eps))


def random_partial_operator(rng, n1, n2, k=None) -> go.GraphOperator:
    if k is None:
        k = int(rng.integers(0, n1 + 1))
    return go.GraphOperator.from_resolution(cmat(rng, n1, k), cmat(rng, n2, k))


def random_hermitian(rng, n, scale=1.0):
    A = cmat(rng, n, n, scale)
    return (A + A.conj().T) / 2
