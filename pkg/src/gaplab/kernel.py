"""Dense complex linear algebra primitives with explicit tolerances.

Matrices are plain 2-D complex ``numpy`` arrays. Rank decisions are relative
to the largest singular value (``rank_tol * sigma_max``), so that families can
be rescaled freely; callers that know the natural scale of a matrix (e.g. a
block of an orthonormal basis) pass ``scale`` to add an absolute noise floor.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

import numpy as np

from .errors import NotInvertible

#: environment variable naming a JSON file with tolerance overrides
TOLERANCES_ENV = "GAPLAB_TOLERANCES"

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = 1e-10
    cond_max: float = 1e12
    cr_tol: float = 1e-6
    gap_tol: float = 1e-9
    fd_steps: tuple = (1e-3, 1e-4, 1e-5)

    def __post_init__(self):
        object.__setattr__(self, "fd_steps", tuple(float(h) for h in self.fd_steps))
        for f in fields(self):
            if f.name == "fd_steps":
                continue
            if not getattr(self, f.name) > 0:
                raise ValueError(f"tolerance {f.name} must be positive")
        steps = self.fd_steps
        if not steps or any(h <= 0 for h in steps):
            raise ValueError("fd_steps must be a nonempty list of positive numbers")
        if any(a <= b for a, b in zip(steps, steps[1:])):
            raise ValueError("fd_steps must be strictly decreasing")

    def replace(self, **changes) -> "Tolerances":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return Tolerances(**values)

    @classmethod
    def from_file(cls, path) -> "Tolerances":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_env(cls) -> "Tolerances":
        """Defaults, overridden by the file named in ``$GAPLAB_TOLERANCES``."""
        path = os.environ.get(TOLERANCES_ENV)
        if path:
            return cls.from_file(path)
        return cls()


DEFAULT_TOL = Tolerances()


def as_matrix(M, rows=None, cols=None) -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting NaN/Inf entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if rows is not None and A.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {A.shape[0]}")
    if cols is not None and A.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {A.shape[1]}")
    return A


def svd(M):
    """Thin SVD ``M = U @ diag(s) @ V^*``; returns ``(U, s, V)``.

    Empty inputs give empty factors of the right shapes.
    """
    A = as_matrix(M)
    m, n = A.shape
    if A.size == 0:
        return np.zeros((m, 0), complex), np.zeros(0), np.zeros((n, 0), complex)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return U, s, Vh.conj().T


def singular_values(M) -> np.ndarray:
    A = as_matrix(M)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def operator_norm(M) -> float:
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0


def _cutoff(s, tol, scale):
    smax = s[0] if s.size else 0.0
    cut = tol.rank_tol * smax
    if scale is not None:
        cut = max(cut, 64 * _EPS * scale)
    return cut


def rank(M, tol: Tolerances = DEFAULT_TOL, scale=None) -> int:
    """Number of singular values above ``rank_tol * sigma_max``."""
    s = singular_values(M)
    if not s.size or s[0] == 0:
        return 0
    return int(np.sum(s > _cutoff(s, tol, scale)))


def solve_invertible(M, rhs, tol: Tolerances = DEFAULT_TOL, scale=None) -> np.ndarray:
    """Solve ``M X = rhs`` for square, well-conditioned ``M``.

    Raises NotInvertible when ``M`` is singular at tolerance or its condition
    number exceeds ``cond_max``.  ``scale`` is the natural size of ``M`` (for
    instance 1 for a product of orthonormal bases); a smallest singular value
    below ``rank_tol * scale`` then also counts as singular, which catches
    1x1 cases that a purely relative test cannot see.
    """
    A = as_matrix(M)
    B = np.asarray(rhs, dtype=complex)
    vector = B.ndim == 1
    if vector:
        B = B.reshape(-1, 1)
    if A.shape[0] != A.shape[1]:
        raise NotInvertible(f"matrix of shape {A.shape} is not square")
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"rhs has {B.shape[0]} rows, matrix has {A.shape[0]}")
    if A.shape[0] == 0:
        return B.copy().ravel() if vector else B.copy()
    s = singular_values(A)
    ref = s[0] if scale is None else max(s[0], float(scale))
    if s[0] == 0 or s[-1] <= tol.rank_tol * ref:
        raise NotInvertible("matrix is singular at tolerance")
    if s[0] / s[-1] > tol.cond_max:
        raise NotInvertible(f"condition number {s[0] / s[-1]:.3e} exceeds {tol.cond_max:.1e}")
    X = np.linalg.solve(A, B)
    return X.ravel() if vector else X


def orthonormal_columns(M, tol: Tolerances = DEFAULT_TOL, scale=None) -> np.ndarray:
    """Orthonormal basis of the column span (rank-revealing, via SVD)."""
    A = as_matrix(M)
    U, s, _ = svd(A)
    if not s.size or s[0] == 0:
        return np.zeros((A.shape[0], 0), complex)
    r = int(np.sum(s > _cutoff(s, tol, scale)))
    return U[:, :r].copy()


def null_space(M, tol: Tolerances = DEFAULT_TOL, scale=None) -> np.ndarray:
    """Orthonormal basis of the kernel of ``M``."""
    A = as_matrix(M)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), complex)
    if m == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    if s[0] == 0:
        return np.eye(n, dtype=complex)
    r = int(np.sum(s > _cutoff(s, tol, scale)))
    return Vh[r:].conj().T.copy()


def orthonormal_complement(Q) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(Q)``.

    ``Q`` must already have orthonormal columns.
    """
    Q = as_matrix(Q)
    n, k = Q.shape
    if k == 0:
        return np.eye(n, dtype=complex)
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, k:].copy()


def herm(M) -> np.ndarray:
    return np.asarray(M).conj().T
