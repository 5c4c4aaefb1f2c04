"""Subspaces of C^n, the gap between them, and oblique projections.

A subspace is stored through an orthonormal column basis, so every quantity
computed here is invariant under the unitary ambiguity of that basis.  The
one-sided gap ``delta(X, Y)`` is evaluated in operator form as
``||(1 - P_Y) J_X||`` where ``J_X`` embeds X; the supremum over the unit ball
of ``{0}`` is taken to be 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotComplementary, NotInvertible, NotLeftInvertible
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    herm,
    null_space,
    operator_norm,
    orthonormal_columns,
    orthonormal_complement,
    singular_values,
    solve_invertible,
)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Closed subspace of ``C^ambient_dim`` with orthonormal ``basis`` (n x k)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        B = as_matrix(self.basis, rows=self.ambient_dim)
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"

    def contains(self, v, tol: Tolerances = DEFAULT_TOL) -> bool:
        v = np.asarray(v, dtype=complex).ravel()
        r = v - self.basis @ (herm(self.basis) @ v)
        return np.linalg.norm(r) <= tol.gap_tol * max(np.linalg.norm(v), 1.0)


def subspace_from_spanning(vectors, tol: Tolerances = DEFAULT_TOL, ambient_dim=None) -> Subspace:
    V = as_matrix(vectors, rows=ambient_dim)
    return Subspace(V.shape[0], orthonormal_columns(V, tol))


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, np.zeros((n, 0), complex))


def full_space(n: int) -> Subspace:
    return Subspace(n, np.eye(n, dtype=complex))


def _same_ambient(X: Subspace, Y: Subspace):
    if X.ambient_dim != Y.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {X.ambient_dim} vs {Y.ambient_dim}"
        )


def orthocomplement(X: Subspace) -> Subspace:
    return Subspace(X.ambient_dim, orthonormal_complement(X.basis))


def projector(X: Subspace) -> np.ndarray:
    """Orthogonal projector ``B B^*`` onto X."""
    return X.basis @ herm(X.basis)


def delta(X: Subspace, Y: Subspace) -> float:
    """One-sided gap: sup over the unit ball of X of the distance to Y."""
    _same_ambient(X, Y)
    if X.dim == 0:
        return 0.0
    R = X.basis - Y.basis @ (herm(Y.basis) @ X.basis)
    return min(operator_norm(R), 1.0)


def gap(X: Subspace, Y: Subspace) -> float:
    return max(delta(X, Y), delta(Y, X))


def projector_distance(X: Subspace, Y: Subspace) -> float:
    _same_ambient(X, Y)
    return operator_norm(projector(X) - projector(Y))


def oblique_projection(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Idempotent with range X and kernel Y, as ``J (I J)^{-1} I``.

    ``J`` is the basis of X and ``I`` the adjoint of an orthonormal basis of
    the orthogonal complement of Y, so that ``Ker I = Y``.  The pair is
    complementary exactly when ``I J`` is square and invertible.
    """
    _same_ambient(X, Y)
    J = X.basis
    I = herm(orthocomplement(Y).basis)
    IJ = I @ J
    if IJ.shape[0] != IJ.shape[1]:
        raise NotComplementary(
            f"dim X + dim Y = {X.dim + Y.dim} differs from ambient dimension {X.ambient_dim}"
        )
    try:
        return J @ solve_invertible(IJ, I, tol, scale=1.0)
    except NotInvertible as exc:
        raise NotComplementary(f"subspaces are not complementary: {exc}") from None


def is_complementary(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    try:
        oblique_projection(X, Y, tol)
    except NotComplementary:
        return False
    return True


@dataclass
class BoundReport:
    """Outcome of checking one inequality ``lhs <= rhs`` (with slack)."""

    name: str
    lhs: float
    rhs: float
    holds: bool
    hypotheses_hold: bool = True
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def check_projector_gap_bound(X, Y, Xp, Yp, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``max(gap(X, X'), gap(Y, Y')) <= ||P_{X,Y} - P_{X',Y'}||``."""
    P = oblique_projection(X, Y, tol)
    Pp = oblique_projection(Xp, Yp, tol)
    lhs = max(gap(X, Xp), gap(Y, Yp))
    rhs = operator_norm(P - Pp)
    return BoundReport("projector_gap_bound", lhs, rhs, lhs <= rhs + tol.gap_tol)


def check_perturbation_bound(X, Y, Xp, Yp, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Complementarity is stable under small gap perturbations of both subspaces.

    With ``a = ||P_{X,Y}||``, ``b = ||P_{Y,X}||``, the hypotheses are

        b delta(X', X) + a delta(Y', Y) < 1
        b delta(Y, Y') + a delta(X, X') < 1

    and the conclusion is that (X', Y') is complementary with

        ||P_{X,Y} - P_{X',Y'}|| <= a b (delta(X',X) + delta(Y',Y))
                                   / (1 - a delta(X',X) - b delta(Y',Y)).

    If the hypotheses fail the report says so and nothing is asserted.
    Keeping ``Y' = Y`` gives the one-sided corollary.
    """
    P = oblique_projection(X, Y, tol)
    Q = np.eye(X.ambient_dim) - P
    a, b = operator_norm(P), operator_norm(Q)
    dx, dy = delta(Xp, X), delta(Yp, Y)
    dx_rev, dy_rev = delta(X, Xp), delta(Y, Yp)
    h1 = b * dx + a * dy
    h2 = b * dy_rev + a * dx_rev
    details = {"norm_P": a, "norm_Q": b, "hyp_range": h1, "hyp_kernel": h2}
    if not (h1 < 1 and h2 < 1):
        return BoundReport("perturbation_bound", float("nan"), float("nan"), True,
                           hypotheses_hold=False, details=details)
    try:
        Pp = oblique_projection(Xp, Yp, tol)
    except NotComplementary:
        details["complementary"] = False
        return BoundReport("perturbation_bound", float("inf"), float("nan"), False,
                           details=details)
    details["complementary"] = True
    lhs = operator_norm(P - Pp)
    denom = 1 - a * dx - b * dy
    rhs = a * b * (dx + dy) / denom if denom > 0 else float("inf")
    details["denominator"] = denom
    return BoundReport("perturbation_bound", lhs, rhs, lhs <= rhs + tol.gap_tol, details=details)


def left_inverse_on_range(T, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Pseudoinverse of a left-invertible T (inverse of T onto its range)."""
    T = as_matrix(T)
    s = singular_values(T)
    k = T.shape[1]
    if k and (s.size < k or s[0] == 0 or s[k - 1] <= tol.rank_tol * s[0]
              or s[0] / s[k - 1] > tol.cond_max):
        raise NotLeftInvertible("operator is not injective at tolerance")
    return np.linalg.pinv(T) if k else np.zeros((0, T.shape[0]), complex)


def check_range_delta_bound(T, S, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``delta(Ran T, Ran S) <= ||(T - S) T~^{-1}||`` for left-invertible T."""
    T, S = as_matrix(T), as_matrix(S)
    if T.shape != S.shape:
        raise DimensionMismatch(f"shapes differ: {T.shape} vs {S.shape}")
    Tinv = left_inverse_on_range(T, tol)
    lhs = delta(subspace_from_spanning(T, tol), subspace_from_spanning(S, tol))
    rhs = operator_norm((T - S) @ Tinv)
    return BoundReport("range_delta_bound", lhs, rhs, lhs <= rhs + tol.gap_tol)


def map_subspace(T, X: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Image ``T X`` under an invertible T."""
    T = as_matrix(T)
    if T.shape != (X.ambient_dim, X.ambient_dim):
        raise DimensionMismatch(f"operator shape {T.shape} vs ambient {X.ambient_dim}")
    solve_invertible(T, np.zeros((T.shape[0], 0)), tol)
    return subspace_from_spanning(T @ X.basis, tol)


def intersect(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    _same_ambient(X, Y)
    if X.dim == 0 or Y.dim == 0:
        return zero_subspace(X.ambient_dim)
    # x = B_X a lies in Y iff (1 - P_Y) B_X a = 0
    R = X.basis - Y.basis @ (herm(Y.basis) @ X.basis)
    N = null_space(R, tol, scale=1.0)
    return subspace_from_spanning(X.basis @ N, tol) if N.shape[1] else zero_subspace(X.ambient_dim)


def sum_subspace(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    _same_ambient(X, Y)
    return Subspace(X.ambient_dim,
                    orthonormal_columns(np.hstack([X.basis, Y.basis]), tol, scale=1.0))


def is_subspace_of(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return delta(X, Y) <= tol.gap_tol


def same_subspace(X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return X.dim == Y.dim and gap(X, Y) <= tol.gap_tol
