"""Partial-domain operators represented by their graphs.

An operator ``T: C^n1 -> C^n2`` with domain ``Dom T`` is stored through an
injective resolution ``(W, V)``: ``Dom T = Ran W`` and ``T W u = V u``.  The
canonical form keeps the stacked matrix ``[W; V]`` orthonormal, so that it is
simultaneously a resolution and an orthonormal basis of the graph.

Finite-dimensional caveat: every subspace is closed, and "densely defined"
means ``Dom T = C^n1``.  Proper domains are how this package emulates
unbounded-operator phenomena; in particular the adjoint of a partially
defined operator is a linear relation, not an operator, and ``adjoint``
raises ``AdjointIsRelation`` for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AdjointIsRelation,
    DimensionMismatch,
    NotAGraph,
    NotInDomain,
    NotInjective,
    NotInvertible,
    NotTransversal,
    PreconditionViolated,
)
from .grassmann import (
    BoundReport,
    Subspace,
    gap,
    intersect,
    orthocomplement,
    projector,
    subspace_from_spanning,
    zero_subspace,
)
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    herm,
    null_space,
    operator_norm,
    orthonormal_columns,
    rank,
    singular_values,
    solve_invertible,
)


@dataclass(frozen=True, eq=False)
class GraphOperator:
    h1_dim: int
    h2_dim: int
    W: np.ndarray
    V: np.ndarray

    def __repr__(self):
        return (f"GraphOperator({self.h1_dim} -> {self.h2_dim}, "
                f"dim Dom = {self.domain_dim})")

    @property
    def domain_dim(self) -> int:
        return self.W.shape[1]

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.W, self.V])

    @property
    def everywhere_defined(self) -> bool:
        return self.domain_dim == self.h1_dim

    @property
    def matrix(self) -> np.ndarray:
        """Matrix of an everywhere-defined operator, ``V W^{-1}``."""
        if not self.everywhere_defined:
            raise PreconditionViolated(
                f"operator is only defined on a {self.domain_dim}-dimensional "
                f"subspace of C^{self.h1_dim}"
            )
        if self.h1_dim == 0:
            return np.zeros((self.h2_dim, 0), complex)
        return herm(np.linalg.solve(herm(self.W), herm(self.V)))

    @classmethod
    def from_resolution(cls, W, V, tol: Tolerances = DEFAULT_TOL) -> "GraphOperator":
        """Operator with ``Dom = Ran W`` and ``T W u = V u``; W must be injective."""
        W, V = as_matrix(W), as_matrix(V)
        if W.shape[1] != V.shape[1]:
            raise DimensionMismatch(f"W has {W.shape[1]} columns, V has {V.shape[1]}")
        n1, k = W.shape
        n2 = V.shape[0]
        if k == 0:
            return cls(n1, n2, np.zeros((n1, 0), complex), np.zeros((n2, 0), complex))
        if rank(W, tol) < k:
            raise NotInjective("resolution W is not injective at tolerance")
        Q, _ = np.linalg.qr(np.vstack([W, V]))
        return cls._from_orthonormal(Q, n1, n2)

    @classmethod
    def _from_orthonormal(cls, Q, n1, n2):
        W = np.ascontiguousarray(Q[:n1])
        V = np.ascontiguousarray(Q[n1:])
        W.setflags(write=False)
        V.setflags(write=False)
        return cls(n1, n2, W, V)


def from_matrix(T) -> GraphOperator:
    T = as_matrix(T)
    n2, n1 = T.shape
    return GraphOperator.from_resolution(np.eye(n1), T)


def zero_domain_operator(n1: int, n2: int) -> GraphOperator:
    return GraphOperator.from_resolution(np.zeros((n1, 0)), np.zeros((n2, 0)))


def graph(T: GraphOperator) -> Subspace:
    return Subspace(T.h1_dim + T.h2_dim, T.stacked)


def from_graph_subspace(K: Subspace, n1: int, n2: int,
                        tol: Tolerances = DEFAULT_TOL) -> GraphOperator:
    """Operator whose graph is K; fails if K contains a vertical vector ``(0, y)``."""
    if K.ambient_dim != n1 + n2:
        raise DimensionMismatch(f"subspace lives in C^{K.ambient_dim}, expected C^{n1 + n2}")
    top = K.basis[:n1]
    k = K.dim
    if k and rank(top, tol, scale=1.0) < k:
        c = null_space(top, tol, scale=1.0)[:, :1]
        witness = (K.basis @ c).ravel()
        raise NotAGraph("subspace meets {0} + C^n2", witness=witness)
    return GraphOperator._from_orthonormal(K.basis, n1, n2)


def domain(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    return Subspace(T.h1_dim, orthonormal_columns(T.W, tol))


def range_(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    return Subspace(T.h2_dim, orthonormal_columns(T.V, tol, scale=1.0))


def kernel(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    if T.domain_dim == 0:
        return zero_subspace(T.h1_dim)
    N = null_space(T.V, tol, scale=1.0)
    if N.shape[1] == 0:
        return zero_subspace(T.h1_dim)
    return subspace_from_spanning(T.W @ N, tol)


# absolute roundoff allowance, relative to the unit scale of the canonical basis
_APPLY_FLOOR = 1e-14


def apply(T: GraphOperator, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``T x`` for x in (or within ``gap_tol * ||x||`` of) the domain.

    Accepts a vector or a matrix of column vectors.
    """
    X = np.asarray(x, dtype=complex)
    vector = X.ndim == 1
    X = X.reshape(T.h1_dim, -1)
    if T.domain_dim == 0:
        if np.linalg.norm(X) > _APPLY_FLOOR:
            raise NotInDomain("operator has zero-dimensional domain")
        return np.zeros(T.h2_dim if vector else (T.h2_dim, X.shape[1]), complex)
    U, *_ = np.linalg.lstsq(T.W, X, rcond=None)
    resid = np.linalg.norm(X - T.W @ U, axis=0)
    norms = np.linalg.norm(X, axis=0)
    if np.any(resid > tol.gap_tol * norms + _APPLY_FLOOR):
        raise NotInDomain(f"vector is at distance {resid.max():.3e} from the domain")
    Y = T.V @ U
    return Y.ravel() if vector else Y


def reduced_min_modulus(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> float:
    """``inf ||T x|| / ||x||`` over the domain; 0 when T has a kernel."""
    if T.domain_dim == 0:
        return float("inf")
    if kernel(T, tol).dim:
        return 0.0
    D = orthonormal_columns(T.W, tol)
    TD = T.V @ np.linalg.lstsq(T.W, D, rcond=None)[0]
    return float(singular_values(TD)[-1])


def check_left_invertible_perturbation(T, S, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Left invertibility survives perturbations smaller than the reduced minimum modulus.

    Checks ``T + S`` is left invertible and
    ``|gamma(T + S) - gamma(T)| <= ||S||`` where gamma is the reduced
    minimum modulus.
    """
    T, S = as_matrix(T), as_matrix(S)
    if T.shape != S.shape:
        raise DimensionMismatch(f"shapes differ: {T.shape} vs {S.shape}")
    g = reduced_min_modulus(from_matrix(T), tol)
    s_norm = operator_norm(S)
    if not s_norm < g:
        raise PreconditionViolated(f"||S|| = {s_norm:.6g} is not below gamma(T) = {g:.6g}")
    TS = from_matrix(T + S)
    injective = kernel(TS, tol).dim == 0
    g2 = reduced_min_modulus(TS, tol)
    lhs = abs(g2 - g)
    return BoundReport("left_invertible_perturbation", lhs, s_norm,
                       injective and lhs <= s_norm + tol.gap_tol,
                       details={"gamma_T": g, "gamma_T_plus_S": g2})


def _same_shape(T: GraphOperator, S: GraphOperator):
    if (T.h1_dim, T.h2_dim) != (S.h1_dim, S.h2_dim):
        raise DimensionMismatch(
            f"operators act {T.h1_dim}->{T.h2_dim} and {S.h1_dim}->{S.h2_dim}"
        )


def operator_gap(T: GraphOperator, S: GraphOperator) -> float:
    _same_shape(T, S)
    return gap(graph(T), graph(S))


def compose(A: GraphOperator, B: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> GraphOperator:
    """Product ``A B`` with ``Dom(AB) = B^{-1} Dom A``; the domain may be {0}."""
    if B.h2_dim != A.h1_dim:
        raise DimensionMismatch(f"cannot compose {A.h1_dim}->{A.h2_dim} after {B.h1_dim}->{B.h2_dim}")
    if B.domain_dim == 0 or A.domain_dim == 0:
        # with Dom A = {0}, AB is still defined on Ker B
        if B.domain_dim and A.domain_dim == 0:
            N = null_space(B.V, tol, scale=1.0)
            return GraphOperator.from_resolution(B.W @ N, np.zeros((A.h2_dim, N.shape[1])), tol)
        return zero_domain_operator(B.h1_dim, A.h2_dim)
    D = orthonormal_columns(A.W, tol)
    R = B.V - D @ (herm(D) @ B.V)
    N = null_space(R, tol, scale=1.0)
    if N.shape[1] == 0:
        return zero_domain_operator(B.h1_dim, A.h2_dim)
    mid = B.V @ N
    U, *_ = np.linalg.lstsq(A.W, mid, rcond=None)
    return GraphOperator.from_resolution(B.W @ N, A.V @ U, tol)


def add(T: GraphOperator, S: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> GraphOperator:
    """Sum on ``Dom T ∩ Dom S``."""
    _same_shape(T, S)
    D = intersect(domain(T, tol), domain(S, tol), tol)
    if D.dim == 0:
        return zero_domain_operator(T.h1_dim, T.h2_dim)
    lenient = tol.replace(gap_tol=max(tol.gap_tol, 1e-8))
    return GraphOperator.from_resolution(
        D.basis, apply(T, D.basis, lenient) + apply(S, D.basis, lenient), tol)


def scale(T: GraphOperator, c: complex) -> GraphOperator:
    return GraphOperator.from_resolution(T.W, c * T.V)


def inverse(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> GraphOperator:
    """Graph flip ``(x, Tx) -> (Tx, x)``."""
    if kernel(T, tol).dim:
        raise NotInjective("operator has a nontrivial kernel")
    return GraphOperator._from_orthonormal(np.vstack([T.V, T.W]), T.h2_dim, T.h1_dim)


def adjoint(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> GraphOperator:
    """Adjoint through ``Gr(T)^perp = U Gr(T^*)`` with ``U(x, y) = (-y, x)``."""
    n1, n2 = T.h1_dim, T.h2_dim
    K = orthocomplement(graph(T)).basis
    flipped = np.vstack([K[n1:], -K[:n1]])
    try:
        return from_graph_subspace(Subspace(n1 + n2, flipped), n2, n1, tol)
    except NotAGraph as exc:
        raise AdjointIsRelation(
            "adjoint is a multivalued relation (domain is not the whole space)",
            witness=exc.witness) from None


def check_closed_range_duality(T: GraphOperator, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``(Ran T)^perp = Ker T^*`` and ``(Ker T)^perp = Ran T^*``."""
    if not T.everywhere_defined:
        raise PreconditionViolated("closed-range duality needs an everywhere-defined operator")
    Ts = adjoint(T, tol)
    g1 = gap(orthocomplement(range_(T, tol)), kernel(Ts, tol))
    g2 = gap(orthocomplement(kernel(T, tol)), range_(Ts, tol))
    lhs = max(g1, g2)
    return BoundReport("closed_range_duality", lhs, tol.gap_tol, lhs <= tol.gap_tol,
                       details={"ran_perp_vs_ker_adj": g1, "ker_perp_vs_ran_adj": g2})


@dataclass(frozen=True, eq=False)
class SpectralSet:
    eigenvalues: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def matches(self, other, rel_tol=1e-8) -> bool:
        return multiset_match(self.eigenvalues, np.asarray(other), rel_tol)


def multiset_match(a, b, rel_tol=1e-8) -> bool:
    """Greedy nearest matching of two complex multisets.

    Tolerance is ``rel_tol * (1 + max |lambda|)``.
    """
    a = list(np.asarray(a, dtype=complex).ravel())
    b = list(np.asarray(b, dtype=complex).ravel())
    if len(a) != len(b):
        return False
    if not a:
        return True
    thr = rel_tol * (1 + max(abs(x) for x in a + b))
    remaining = b
    for x in sorted(a, key=lambda v: (v.real, v.imag)):
        j = int(np.argmin([abs(x - y) for y in remaining]))
        if abs(x - remaining[j]) > thr:
            return False
        remaining.pop(j)
    return True


def spectrum(T: GraphOperator) -> SpectralSet:
    if T.h1_dim != T.h2_dim:
        raise PreconditionViolated("spectrum needs an operator on a single space")
    if not T.everywhere_defined:
        raise PreconditionViolated("spectrum needs an everywhere-defined operator")
    if T.h1_dim == 0:
        return SpectralSet(np.zeros(0, complex))
    return SpectralSet(np.linalg.eigvals(T.matrix))


def shift(T: GraphOperator, lam: complex) -> GraphOperator:
    """``T - lam``, with the identity restricted to ``Dom T``."""
    if T.h1_dim != T.h2_dim:
        raise DimensionMismatch("shift needs an operator on a single space")
    return GraphOperator.from_resolution(T.W, T.V - lam * T.W)


def is_in_resolvent_set(T: GraphOperator, lam: complex, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``T - lam`` is injective with range the whole space."""
    if T.h1_dim != T.h2_dim:
        raise PreconditionViolated("resolvent set needs an operator on a single space")
    n = T.h1_dim
    if T.domain_dim < n:
        return False
    M = T.V - lam * T.W
    return rank(M, tol, scale=1.0) == n


def characteristic_matrix(T: GraphOperator) -> np.ndarray:
    """Orthogonal projector onto the graph."""
    return projector(graph(T))


def bracket(T) -> np.ndarray:
    """``<T> = (1 + T^* T)^{1/2}`` by Hermitian eigendecomposition."""
    T = as_matrix(T)
    H = np.eye(T.shape[1]) + herm(T) @ T
    w, U = np.linalg.eigh((H + herm(H)) / 2)
    return (U * np.sqrt(w)) @ herm(U)


def _inv_bracket(T, power=1):
    T = as_matrix(T)
    H = np.eye(T.shape[1]) + herm(T) @ T
    w, U = np.linalg.eigh((H + herm(H)) / 2)
    return (U * w ** (-power / 2)) @ herm(U)


def characteristic_matrix_blocks(T) -> np.ndarray:
    """Block formula for an everywhere-defined matrix T.

    ``J_T = [<T>^{-1}; T <T>^{-1}]`` and ``M_T = J_T J_T^*``, whose blocks are
    ``<T>^{-2}``, ``<T>^{-2} T^*``, ``T <T>^{-2}``, ``T <T>^{-2} T^*``.
    """
    T = as_matrix(T)
    Binv = _inv_bracket(T)
    J = np.vstack([Binv, T @ Binv])
    return J @ herm(J)


def relative_characteristic_matrix(T: GraphOperator, S: GraphOperator,
                                   tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Projection onto ``Gr(T)`` along ``Gr(S)^perp``: ``J_T (J_S^* J_T)^{-1} J_S^*``."""
    _same_shape(T, S)
    JT, JS = T.stacked, S.stacked
    G = herm(JS) @ JT
    if G.shape[0] != G.shape[1]:
        raise NotTransversal(
            f"graph dimensions differ ({JT.shape[1]} vs {JS.shape[1]})")
    try:
        return JT @ solve_invertible(G, herm(JS), tol, scale=1.0)
    except NotInvertible as exc:
        raise NotTransversal(f"Gr(T) and Gr(S)^perp are not complementary: {exc}") from None


def relative_characteristic_blocks(T, S, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Block formula for everywhere-defined T, S with ``1 + S^* T`` invertible.

    ``[[(1+S*T)^-1, (1+S*T)^-1 S*], [T (1+S*T)^-1, T (1+S*T)^-1 S*]]``.
    """
    T, S = as_matrix(T), as_matrix(S)
    n = T.shape[1]
    try:
        R = solve_invertible(np.eye(n) + herm(S) @ T, np.eye(n), tol, scale=1.0)
    except NotInvertible as exc:
        raise NotTransversal(f"1 + S^*T is not invertible: {exc}") from None
    return np.block([[R, R @ herm(S)], [T @ R, T @ R @ herm(S)]])


def direct_sum(A: GraphOperator, B: GraphOperator) -> GraphOperator:
    """``A ⊕ B`` acting on ``C^{a1} ⊕ C^{b1}``."""
    W = _blockdiag(A.W, B.W)
    V = _blockdiag(A.V, B.V)
    return GraphOperator._from_orthonormal(
        np.vstack([W, V]), A.h1_dim + B.h1_dim, A.h2_dim + B.h2_dim)


def _blockdiag(X, Y):
    out = np.zeros((X.shape[0] + Y.shape[0], X.shape[1] + Y.shape[1]), complex)
    out[:X.shape[0], :X.shape[1]] = X
    out[X.shape[0]:, X.shape[1]:] = Y
    return out


def block_operator(A: GraphOperator, B: GraphOperator) -> GraphOperator:
    """``[[0, A], [B, 0]]`` on ``C^n1 ⊕ C^n2`` with ``Dom = Dom B ⊕ Dom A``.

    Here ``A: C^n2 -> C^n1`` and ``B: C^n1 -> C^n2``.
    """
    if A.h1_dim != B.h2_dim or A.h2_dim != B.h1_dim:
        raise DimensionMismatch("block operator needs A: C^n2 -> C^n1 and B: C^n1 -> C^n2")
    n1, n2 = B.h1_dim, B.h2_dim
    kB, kA = B.domain_dim, A.domain_dim
    W = _blockdiag(B.W, A.W)
    V = np.zeros((n1 + n2, kB + kA), complex)
    V[:n1, kB:] = A.V
    V[n1:, :kB] = B.V
    return GraphOperator._from_orthonormal(np.vstack([W, V]), n1 + n2, n1 + n2)


def check_spectrum_split(A, B, tol: Tolerances = DEFAULT_TOL, rel_tol=1e-8) -> BoundReport:
    """Squares of the spectrum of ``[[0, A], [B, 0]]`` equal ``sp(AB) ⊎ sp(BA)``."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape[::-1] != B.shape:
        raise DimensionMismatch(f"A is {A.shape}, B is {B.shape}")
    T = block_operator(from_matrix(A), from_matrix(B))
    squares = spectrum(T).eigenvalues ** 2
    AB = np.linalg.eigvals(A @ B) if A.shape[0] else np.zeros(0)
    BA = np.linalg.eigvals(B @ A) if B.shape[0] else np.zeros(0)
    target = np.concatenate([AB, BA])
    ok = multiset_match(squares, target, rel_tol)
    return BoundReport("spectrum_split", 0.0 if ok else 1.0, 0.0, ok,
                       details={"squares": squares, "sp_AB": AB, "sp_BA": BA})
