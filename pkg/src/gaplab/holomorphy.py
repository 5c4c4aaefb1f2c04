"""Operator-valued families over the complex plane and holomorphy probes.

Complex differentiability of a bounded-matrix-valued function is probed with
Richardson-extrapolated central differences along the real and imaginary
directions.  The Cauchy-Riemann residual at step h is

    ||d_x F - d_y F / i|| / (1 + ||d_x F||)

and the verdict is taken from how the residual behaves across the configured
step sizes, never from one step alone:

* holomorphic: the residual is below ``cr_tol`` at every step, or it is below
  ``cr_tol`` at the finest step after falling by a factor >= 5;
* not_holomorphic: the residual stays at or above ``cr_tol`` at every step and
  plateaus (consecutive ratios within a factor 5);
* inconclusive: anything else.

Closed-operator families are reduced to bounded ones through the relative
characteristic matrix ``z -> M_{T_z, T_z0}``, through an injective resolution
``(W_z, T_z W_z)``, or, for subspace families, through the oblique projection
onto ``X_z`` along a fixed complement of ``X_z0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import graphop as go
from .errors import (
    DimensionMismatch,
    EvaluationFailed,
    GapLabError,
    NotComplementary,
    NotHermitian,
    NotLeftInvertible,
    NotSurjective,
    NotTransversal,
)
from .grassmann import (
    Subspace,
    gap,
    oblique_projection,
    orthocomplement,
    projector,
    same_subspace,
    subspace_from_spanning,
    sum_subspace,
)
from .kernel import DEFAULT_TOL, Tolerances, as_matrix, herm, operator_norm, rank

HOLOMORPHIC = "holomorphic"
NOT_HOLOMORPHIC = "not_holomorphic"
INCONCLUSIVE = "inconclusive"

CLASS_CODES = {HOLOMORPHIC: "H", NOT_HOLOMORPHIC: "N", INCONCLUSIVE: "I"}


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """``z -> T_z`` with values in GraphOperator; ``provenance`` records how it was built."""

    evaluator: Callable
    h1_dim: int
    h2_dim: int
    provenance: tuple = ("custom",)

    def __call__(self, z) -> go.GraphOperator:
        return self.evaluator(complex(z))


@dataclass(frozen=True, eq=False)
class SubspaceFamily:
    evaluator: Callable
    ambient_dim: int
    provenance: tuple = ("custom",)

    def __call__(self, z) -> Subspace:
        return self.evaluator(complex(z))


def matrix_family(func, h1_dim, h2_dim, provenance=("matrix",)) -> OperatorFamily:
    """Everywhere-defined family from ``z -> matrix`` (shape h2 x h1)."""
    return OperatorFamily(lambda z: go.from_matrix(func(z)), h1_dim, h2_dim, provenance)


def rational_family(R) -> OperatorFamily:
    return OperatorFamily(lambda z: go.from_matrix(R(z)), R.cols, R.rows, ("rational", R))


def graph_family(Wfam, Vfam, h1_dim, h2_dim, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    """Family with ``Dom T_z = Ran W(z)`` and ``T_z W(z) u = V(z) u``."""
    return OperatorFamily(lambda z: go.GraphOperator.from_resolution(Wfam(z), Vfam(z), tol),
                          h1_dim, h2_dim, ("graph", Wfam, Vfam))


def constant_family(T: go.GraphOperator) -> OperatorFamily:
    return OperatorFamily(lambda z: T, T.h1_dim, T.h2_dim, ("constant", T))


def conjugate_family() -> OperatorFamily:
    """``z -> [conj z]`` on C^1: continuous, nowhere holomorphic."""
    return matrix_family(lambda z: [[np.conj(z)]], 1, 1, ("builtin", "conjugate"))


@dataclass
class DifferentiabilityReport:
    z0: complex
    derivative_estimate: np.ndarray
    cr_residual: float
    residuals: tuple
    step_consistency: tuple
    classification: str
    steps: tuple = ()
    note: str = ""
    parts: tuple = ()

    @property
    def code(self) -> str:
        return CLASS_CODES[self.classification]

    @property
    def holomorphic(self) -> bool:
        return self.classification == HOLOMORPHIC


def classify(residuals, cr_tol) -> str:
    res = list(residuals)
    if max(res) < cr_tol:
        return HOLOMORPHIC
    if res[-1] < cr_tol and res[0] >= 5 * res[-1]:
        return HOLOMORPHIC
    if min(res) >= cr_tol:
        ratios = [a / b for a, b in zip(res, res[1:])]
        if all(0.2 <= r <= 5 for r in ratios):
            return NOT_HOLOMORPHIC
    return INCONCLUSIVE


def _evaluate(F, z):
    try:
        return as_matrix(F(z))
    except EvaluationFailed as exc:
        if exc.z is None:
            exc.z = z
        raise
    except (GapLabError, ValueError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        raise EvaluationFailed(f"evaluation failed at z = {z}: {exc}", z=z, cause=exc) from exc


def _central(F, z0, d, h):
    return (_evaluate(F, z0 + h * d) - _evaluate(F, z0 - h * d)) / (2 * h)


def _richardson(F, z0, d, h):
    return (4 * _central(F, z0, d, h / 2) - _central(F, z0, d, h)) / 3


def matrix_family_differentiability(F, z0, tol: Tolerances = DEFAULT_TOL) -> DifferentiabilityReport:
    """Complex-differentiability probe for ``F: z -> matrix`` at ``z0``.

    Steps are taken relative to the size of the parameter,
    ``h * (1 + |z0|)``.  The reported derivative is the real-direction
    estimate at the finest step (the complex derivative when F is
    holomorphic).
    """
    z0 = complex(z0)
    scale = 1.0 + abs(z0)
    steps = tuple(h * scale for h in tol.fd_steps)
    residuals, dx = [], None
    for h in steps:
        dx = _richardson(F, z0, 1.0, h)
        dy = _richardson(F, z0, 1j, h)
        residuals.append(operator_norm(dx - dy / 1j) / (1.0 + operator_norm(dx)))
    ratios = tuple(a / b if b > 0 else math.inf for a, b in zip(residuals, residuals[1:]))
    return DifferentiabilityReport(
        z0=z0, derivative_estimate=dx, cr_residual=residuals[-1], residuals=tuple(residuals),
        step_consistency=ratios, classification=classify(residuals, tol.cr_tol), steps=steps)


@dataclass
class ContinuityReport:
    z0: complex
    radii: tuple
    moduli: tuple
    slopes: tuple
    continuous: bool


def _family_gap(a, b) -> float:
    if isinstance(a, Subspace):
        return gap(a, b)
    return go.operator_gap(a, b)


def gap_continuity_modulus(F: OperatorFamily | SubspaceFamily, z0, radii=(1e-1, 1e-2, 1e-3),
                           samples_per_circle=16, tol: Tolerances = DEFAULT_TOL) -> ContinuityReport:
    """Largest gap between ``F(z)`` and ``F(z0)`` on circles around z0.

    The family is flagged continuous when the modulus is already at the noise
    level, or when it shrinks monotonically with the radius and the log-log
    slope over the two smallest radii is at least 1/4.
    """
    z0 = complex(z0)
    radii = tuple(sorted((float(r) for r in radii), reverse=True))
    T0 = _evaluate_op(F, z0)
    moduli = []
    for r in radii:
        m = 0.0
        for k in range(samples_per_circle):
            z = z0 + r * np.exp(2j * np.pi * k / samples_per_circle)
            m = max(m, _family_gap(_evaluate_op(F, z), T0))
        moduli.append(m)
    slopes = []
    for (r1, m1), (r2, m2) in zip(zip(radii, moduli), zip(radii[1:], moduli[1:])):
        if m1 > 0 and m2 > 0:
            slopes.append(math.log(m1 / m2) / math.log(r1 / r2))
        else:
            slopes.append(math.inf if m2 == 0 else 0.0)
    if moduli[-1] <= tol.gap_tol:
        continuous = True
    else:
        monotone = all(b <= a + tol.gap_tol for a, b in zip(moduli, moduli[1:]))
        continuous = monotone and len(slopes) > 0 and slopes[-1] >= 0.25
    return ContinuityReport(z0, radii, tuple(moduli), tuple(slopes), continuous)


def _evaluate_op(F, z):
    try:
        return F(z)
    except EvaluationFailed:
        raise
    except (GapLabError, ValueError, ZeroDivisionError) as exc:
        raise EvaluationFailed(f"evaluation failed at z = {z}: {exc}", z=z, cause=exc) from exc


def _surface(exc: EvaluationFailed, kinds):
    if isinstance(exc.cause, kinds):
        raise exc.cause
    raise exc


def relchar_differentiability(F: OperatorFamily, z0, tol: Tolerances = DEFAULT_TOL) -> DifferentiabilityReport:
    """Probe ``z -> M_{F(z), F(z0)}``, the relative characteristic matrix.

    Differentiability of this bounded family is a sufficient condition for
    holomorphy of F at z0, so a negative outcome is reported as a failed
    criterion.
    """
    z0 = complex(z0)
    S = _evaluate_op(F, z0)
    try:
        rep = matrix_family_differentiability(
            lambda z: go.relative_characteristic_matrix(F(z), S, tol), z0, tol)
    except EvaluationFailed as exc:
        _surface(exc, NotTransversal)
    if rep.classification == NOT_HOLOMORPHIC:
        rep.note = "relative characteristic matrix criterion failed"
    return rep


def _combine(reports, z0, note=""):
    classes = [r.classification for r in reports]
    if all(c == HOLOMORPHIC for c in classes):
        cls = HOLOMORPHIC
    elif any(c == NOT_HOLOMORPHIC for c in classes):
        cls = NOT_HOLOMORPHIC
    else:
        cls = INCONCLUSIVE
    worst = max(reports, key=lambda r: r.cr_residual)
    return DifferentiabilityReport(
        z0=z0, derivative_estimate=np.vstack([r.derivative_estimate for r in reports]),
        cr_residual=worst.cr_residual, residuals=worst.residuals,
        step_consistency=worst.step_consistency, classification=cls, steps=worst.steps,
        note=note, parts=tuple(reports))


def resolution_differentiability(Wfam, TWfam, z0, tol: Tolerances = DEFAULT_TOL,
                                 family: OperatorFamily | None = None) -> DifferentiabilityReport:
    """Probe a resolution: both ``z -> W_z`` and ``z -> T_z W_z`` must be holomorphic.

    ``W_z`` must be injective.  When ``family`` is given, ``Ran W(z0)`` is
    compared with ``Dom family(z0)`` and the outcome stored in ``note``.
    """
    z0 = complex(z0)
    W0 = _evaluate(Wfam, z0)
    if rank(W0, tol) < W0.shape[1]:
        raise NotLeftInvertible(f"W(z0) is not injective at z0 = {z0}")
    rw = matrix_family_differentiability(Wfam, z0, tol)
    rv = matrix_family_differentiability(TWfam, z0, tol)
    note = ""
    if family is not None:
        dom = go.domain(_evaluate_op(family, z0), tol)
        ok = same_subspace(subspace_from_spanning(W0, tol), dom, tol)
        note = "Ran W(z0) = Dom T(z0)" if ok else "Ran W(z0) differs from Dom T(z0)"
    return _combine([rw, rv], z0, note)


def subspace_family_differentiability(X: SubspaceFamily, z0,
                                      tol: Tolerances = DEFAULT_TOL) -> DifferentiabilityReport:
    """Probe ``z -> P_{X_z, Y}`` with Y the orthogonal complement of ``X_z0``."""
    z0 = complex(z0)
    X0 = _evaluate_op(X, z0)
    Y = orthocomplement(X0)
    try:
        return matrix_family_differentiability(lambda z: oblique_projection(X(z), Y, tol), z0, tol)
    except EvaluationFailed as exc:
        _surface(exc, NotComplementary)


def orthogonal_projector_differentiability(X: SubspaceFamily, z0,
                                           tol: Tolerances = DEFAULT_TOL) -> DifferentiabilityReport:
    """Probe ``z -> P_{X_z}`` (orthogonal projector); generally not holomorphic."""
    return matrix_family_differentiability(lambda z: projector(X(z)), z0, tol)


def span_family(func, ambient_dim, tol: Tolerances = DEFAULT_TOL, provenance=("span",)) -> SubspaceFamily:
    """``z -> span of the columns of func(z)``; the column rank must not drop."""
    def ev(z):
        M = as_matrix(func(z))
        return subspace_from_spanning(M, tol)
    return SubspaceFamily(ev, ambient_dim, provenance)


def image_family(Mfam, X: SubspaceFamily, tol: Tolerances = DEFAULT_TOL) -> SubspaceFamily:
    """``z -> M_z X_z``."""
    return SubspaceFamily(lambda z: subspace_from_spanning(as_matrix(Mfam(z)) @ X(z).basis, tol),
                          X.ambient_dim, ("image", Mfam, X))


def reflect(F: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    """``z -> adjoint(F(conj z))``."""
    return OperatorFamily(lambda z: go.adjoint(F(np.conj(z)), tol), F.h2_dim, F.h1_dim,
                          ("reflect", F))


@dataclass
class PropertyReport:
    name: str
    holds: bool
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def check_schwarz_reflection(F: OperatorFamily, z0, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """F is holomorphic at z0 iff ``z -> F(conj z)^*`` is holomorphic at ``conj z0``.

    Residuals must agree within a factor 10; both are first floored at
    ``cr_tol / 100`` since roundoff-level residuals carry no signal.
    """
    z0 = complex(z0)
    r1 = relchar_differentiability(F, z0, tol)
    r2 = relchar_differentiability(reflect(F, tol), z0.conjugate(), tol)
    floor = tol.cr_tol * 1e-2
    a, b = max(r1.cr_residual, floor), max(r2.cr_residual, floor)
    same = r1.classification == r2.classification
    close = max(a, b) <= 10 * min(a, b)
    return PropertyReport("schwarz_reflection", same and close,
                          {"direct": r1, "reflected": r2})


def product_family(Fa: OperatorFamily, Fb: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    """``z -> A_z B_z``."""
    return OperatorFamily(lambda z: go.compose(Fa(z), Fb(z), tol), Fb.h1_dim, Fa.h2_dim,
                          ("product", Fa, Fb))


def sum_family(Fa: OperatorFamily, Fb: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    return OperatorFamily(lambda z: go.add(Fa(z), Fb(z), tol), Fa.h1_dim, Fa.h2_dim,
                          ("sum", Fa, Fb))


def inverse_family(F: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    return OperatorFamily(lambda z: go.inverse(F(z), tol), F.h2_dim, F.h1_dim, ("inverse", F))


def resolvent_family(T, tol: Tolerances = DEFAULT_TOL) -> OperatorFamily:
    """``z -> (z - T)^{-1}``; evaluation at an eigenvalue raises NotInjective."""
    T = as_matrix(T)
    n = T.shape[0]
    I = np.eye(n)
    return OperatorFamily(lambda z: go.inverse(go.from_matrix(z * I - T), tol), n, n,
                          ("resolvent", T))


def kernel_family(S: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> SubspaceFamily:
    """``z -> Ker S_z`` for everywhere-defined surjective ``S_z``."""
    def ev(z):
        Sz = S(z)
        if not Sz.everywhere_defined:
            raise NotSurjective(f"S(z) is not everywhere defined at z = {z}")
        if go.range_(Sz, tol).dim < Sz.h2_dim:
            raise NotSurjective(f"S(z) is not surjective at z = {z}")
        return go.kernel(Sz, tol)
    return SubspaceFamily(ev, S.h1_dim, ("kernel", S))


@dataclass
class PointCheck:
    z: complex
    holds: bool
    message: str = ""
    witness: object = None


@dataclass
class PreconditionReport:
    mode: str
    holds: bool
    points: list
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


PRODUCT_MODES = ("criterion1", "criterion2", "holoproduct", "rancase")


def _is_invertible(T: go.GraphOperator, tol) -> bool:
    return go.kernel(T, tol).dim == 0 and go.range_(T, tol).dim == T.h2_dim


def _lambda_candidates(A, B, candidates, tol):
    """Caller candidates plus square roots of midpoints between eigenvalues of AB and BA."""
    out = [complex(c) for c in candidates]
    eig = []
    for T in (go.compose(A, B, tol), go.compose(B, A, tol)):
        if T.everywhere_defined and T.h1_dim:
            eig.extend(go.spectrum(T).eigenvalues)
    eig = sorted(set(np.round(np.asarray(eig, complex), 12)), key=lambda v: (v.real, v.imag))
    mids = [(a + b) / 2 for a, b in zip(eig, eig[1:])]
    top = max((abs(e) for e in eig), default=0.0) + 1.0
    mids.append(top)
    out.extend(np.sqrt(np.asarray(mids, complex)))
    return out


def check_product_theorem_preconditions(Fa: OperatorFamily, Fb: OperatorFamily, sample_zs, mode,
                                        candidates=(), tol: Tolerances = DEFAULT_TOL) -> PreconditionReport:
    """Check the hypotheses of one holomorphy-of-product criterion at sample points.

    ``Fa`` is the left factor A_z, ``Fb`` the right factor B_z (product A_z B_z).

    criterion1
        B_z invertible, or A_z everywhere defined.
    criterion2
        A_z and A_z B_z everywhere defined.
    holoproduct
        one lambda with lambda^2 in the resolvent sets of both A_z B_z and
        B_z A_z at every sample.
    rancase
        ``Dom A_z + Ran B_z`` is the whole intermediate space.
    """
    if mode not in PRODUCT_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {PRODUCT_MODES}")
    zs = [complex(z) for z in sample_zs]
    points = []
    details = {}
    if mode == "holoproduct":
        pairs = [(Fa(z), Fb(z)) for z in zs]
        lams = _lambda_candidates(*pairs[0], candidates, tol) if pairs else []
        good = None
        for lam in lams:
            ok = True
            for A, B in pairs:
                AB, BA = go.compose(A, B, tol), go.compose(B, A, tol)
                mu = lam * lam
                if not (go.is_in_resolvent_set(AB, mu, tol) and go.is_in_resolvent_set(BA, mu, tol)):
                    ok = False
                    break
            if ok:
                good = lam
                break
        for z in zs:
            points.append(PointCheck(z, good is not None,
                                     "" if good is not None else "no common lambda found"))
        details["lambda"] = good
        details["candidates_tried"] = len(lams)
        return PreconditionReport(mode, good is not None and bool(zs), points, details)

    for z in zs:
        A, B = Fa(z), Fb(z)
        if mode == "criterion1":
            if _is_invertible(B, tol):
                points.append(PointCheck(z, True, "B_z invertible"))
            elif A.everywhere_defined:
                points.append(PointCheck(z, True, "A_z everywhere defined"))
            else:
                points.append(PointCheck(z, False, "B_z not invertible and A_z partially defined"))
        elif mode == "criterion2":
            AB = go.compose(A, B, tol)
            ok = A.everywhere_defined and AB.everywhere_defined
            msg = "" if ok else (
                "A_z partially defined" if not A.everywhere_defined else "A_z B_z partially defined")
            points.append(PointCheck(z, ok, msg))
        else:
            total = sum_subspace(go.domain(A, tol), go.range_(B, tol), tol)
            if total.dim == A.h1_dim:
                points.append(PointCheck(z, True))
            else:
                w = orthocomplement(total).basis[:, 0]
                points.append(PointCheck(z, False, f"Dom A_z + Ran B_z has dimension {total.dim} "
                                                   f"< {A.h1_dim}", witness=w))
    return PreconditionReport(mode, all(p.holds for p in points) and bool(points), points, details)


def shear_operator(T: go.GraphOperator, tol: Tolerances = DEFAULT_TOL) -> go.GraphOperator:
    """``(x, y) -> (x, T x + y)`` on ``C^n1 ⊕ C^n2`` with domain ``Dom T ⊕ C^n2``."""
    n1, n2, k = T.h1_dim, T.h2_dim, T.domain_dim
    W = np.zeros((n1 + n2, k + n2), complex)
    W[:n1, :k] = T.W
    W[n1:, k:] = np.eye(n2)
    V = W.copy()
    V[n1:, :k] = T.V
    return go.GraphOperator.from_resolution(W, V, tol)


def check_sum_theorem(Ft: OperatorFamily, Fs: OperatorFamily, sample_zs,
                      tol: Tolerances = DEFAULT_TOL) -> PreconditionReport:
    """Hypothesis ``Dom S_z + Dom T_z = C^n1`` and the shear factorisation.

    With ``A_z``, ``B_z``, ``C_z`` the shears of T_z, S_z and T_z + S_z,
    checks ``C_z = A_z B_z`` (graph gap within ``gap_tol``) and that
    ``Dom A_z + Ran B_z`` is the whole space.
    """
    points = []
    for z in (complex(z) for z in sample_zs):
        T, S = Ft(z), Fs(z)
        total = sum_subspace(go.domain(T, tol), go.domain(S, tol), tol)
        dom_ok = total.dim == T.h1_dim
        A, B = shear_operator(T, tol), shear_operator(S, tol)
        C = shear_operator(go.add(T, S, tol), tol)
        g = go.operator_gap(go.compose(A, B, tol), C)
        ran_ok = sum_subspace(go.domain(A, tol), go.range_(B, tol), tol).dim == A.h1_dim
        msgs = []
        if not dom_ok:
            msgs.append(f"Dom S_z + Dom T_z has dimension {total.dim} < {T.h1_dim}")
        if g > tol.gap_tol:
            msgs.append(f"shear factorisation off by gap {g:.3e}")
        if dom_ok != ran_ok:
            msgs.append("Dom A_z + Ran B_z disagrees with the domain-sum test")
        points.append(PointCheck(z, dom_ok and g <= tol.gap_tol and dom_ok == ran_ok,
                                 "; ".join(msgs), witness=g))
    return PreconditionReport("sum", all(p.holds for p in points) and bool(points), points)


def bounded_transform(T) -> np.ndarray:
    """``T <T>^{-1}``."""
    T = as_matrix(T)
    return T @ go._inv_bracket(T)


def riesz_distance(T, S) -> float:
    T, S = as_matrix(T), as_matrix(S)
    if T.shape != S.shape:
        raise DimensionMismatch(f"shapes differ: {T.shape} vs {S.shape}")
    return operator_norm(bounded_transform(T) - bounded_transform(S))


def selfadjoint_fcalc(T, f) -> np.ndarray:
    """``f(T)`` for Hermitian T through its eigendecomposition."""
    T = as_matrix(T)
    if operator_norm(T - herm(T)) > 1e-10:
        raise NotHermitian("matrix is not Hermitian")
    w, U = np.linalg.eigh((T + herm(T)) / 2)
    fw = np.asarray([f(x) for x in w], dtype=complex)
    return (U * fw) @ herm(U)
