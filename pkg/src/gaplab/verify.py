"""Built-in randomized verification suites.

Each property draws its instances from a generator seeded by the suite seed
and the property name, so results do not depend on which other properties
ran first.  A property returns ``(passed, total, note)``; instances that do
not satisfy a theorem's hypotheses are counted in the note, not asserted.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass

import numpy as np

from . import graphop as go
from . import holomorphy as ho
from .errors import EvaluationFailed, NotComplementary, NotInjective
from .grassmann import (
    check_perturbation_bound,
    check_projector_gap_bound,
    check_range_delta_bound,
    delta,
    gap,
    intersect,
    is_complementary,
    map_subspace,
    oblique_projection,
    projector,
    projector_distance,
    subspace_from_spanning,
    sum_subspace,
)
from .kernel import DEFAULT_TOL, Tolerances, herm, operator_norm, orthonormal_columns, rank, svd
from .randgen import (
    cmat,
    perturb_subspace,
    random_complementary_pair,
    random_hermitian,
    random_partial_operator,
    random_subspace,
)
from .rational import RationalMatrixFamily, interpolate_rational, random_rational_family

SUITES = ("grassmann", "graphop", "holomorphy")
_REGISTRY = {s: [] for s in SUITES}


def prop(suite):
    def deco(fn):
        _REGISTRY[suite].append(fn)
        return fn
    return deco


@dataclass
class PropertyResult:
    suite: str
    name: str
    passed: int
    total: int
    note: str = ""
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total and self.total > 0


def _rng(seed, name):
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def run_suite(suite="all", seed=0, tol: Tolerances = DEFAULT_TOL):
    suites = SUITES if suite == "all" else (suite,)
    results = []
    for s in suites:
        for fn in _REGISTRY[s]:
            name = fn.__name__
            t0 = time.perf_counter()
            passed, total, note = fn(_rng(seed, name), tol)
            results.append(PropertyResult(s, name, passed, total, note, time.perf_counter() - t0))
    return results


# ---------------------------------------------------------------- grassmann

@prop("grassmann")
def svd_reconstruction(rng, tol):
    ok = 0
    for _ in range(50):
        M = cmat(rng, *rng.integers(1, 41, size=2))
        U, s, V = svd(M)
        err = operator_norm(U * s @ herm(V) - M)
        ok += err <= 1e-11 * s[0]
    return ok, 50, ""


@prop("grassmann")
def norm_submultiplicative(rng, tol):
    ok = 0
    for _ in range(50):
        m, k, n = rng.integers(1, 21, size=3)
        A, B = cmat(rng, m, k), cmat(rng, k, n)
        ok += operator_norm(A @ B) <= operator_norm(A) * operator_norm(B) * (1 + 1e-12)
    return ok, 50, ""


@prop("grassmann")
def orthonormal_columns_basis(rng, tol):
    ok = 0
    for _ in range(50):
        n, m = rng.integers(1, 31, size=2)
        r = int(rng.integers(0, min(n, m) + 1))
        M = cmat(rng, n, r) @ cmat(rng, r, m)
        Q = orthonormal_columns(M, tol)
        smax = operator_norm(M)
        c1 = operator_norm(herm(Q) @ Q - np.eye(Q.shape[1])) <= 1e-12
        c2 = operator_norm(M - Q @ (herm(Q) @ M)) <= tol.rank_tol * smax * 10 + 1e-300
        ok += c1 and c2 and Q.shape[1] == r
    return ok, 50, ""


@prop("grassmann")
def hilbert_gap_identity(rng, tol):
    ok = 0
    for _ in range(200):
        n = int(rng.integers(1, 41))
        X, Y = random_subspace(rng, n), random_subspace(rng, n)
        if rng.random() < 0.5 and X.dim:
            Y = perturb_subspace(rng, X, 10 ** rng.uniform(-8, 0))
        ok += abs(gap(X, Y) - projector_distance(X, Y)) <= tol.gap_tol
    return ok, 200, ""


def oblique_oracle_error(X, Y, P):
    """Max deviation of P from the decomposition ``v = x + y`` of each basis vector."""
    n = X.ambient_dim
    B = np.hstack([X.basis, Y.basis])
    err = 0.0
    for i in range(n):
        v = np.zeros(n, complex)
        v[i] = 1
        ab = np.linalg.solve(B, v)
        x = X.basis @ ab[:X.dim]
        err = max(err, np.max(np.abs(P @ v - x)))
    return err


@prop("grassmann")
def oblique_projection_oracle(rng, tol):
    ok = 0
    for _ in range(200):
        n = int(rng.integers(1, 21))
        X, Y = random_complementary_pair(rng, n)
        P = oblique_projection(X, Y, tol)
        ok += oblique_oracle_error(X, Y, P) <= 1e-9
    return ok, 200, ""


@prop("grassmann")
def oblique_projection_laws(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 16))
        X, Y = random_complementary_pair(rng, n)
        P, Q = oblique_projection(X, Y, tol), oblique_projection(Y, X, tol)
        c = (operator_norm(P + Q - np.eye(n)) <= 1e-9 * max(1, operator_norm(P))
             and operator_norm(P @ P - P) <= 1e-9 * max(1, operator_norm(P)) ** 2
             and operator_norm(P @ X.basis - X.basis) <= 1e-9 * max(1, operator_norm(P))
             and operator_norm(P @ Y.basis) <= 1e-9 * max(1, operator_norm(P)))
        ok += c
    return ok, 100, ""


@prop("grassmann")
def complementarity_needs_dimension_count(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 16))
        k, m = rng.integers(0, n + 1, size=2)
        if k + m == n:
            m = (m + 1) % (n + 1)
        ok += not is_complementary(random_subspace(rng, n, k), random_subspace(rng, n, m), tol)
    return ok, 100, ""


@prop("grassmann")
def delta_zero_iff_contained(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(2, 16))
        k = int(rng.integers(1, n))
        X = random_subspace(rng, n, k)
        Y = subspace_from_spanning(np.hstack([X.basis @ cmat(rng, k, k),
                                              cmat(rng, n, int(rng.integers(0, n - k + 1)))]))
        inside = delta(X, Y) < tol.gap_tol
        Z = random_subspace(rng, n, int(rng.integers(0, n)))
        far_cols = [np.linalg.norm(X.basis[:, j] - projector(Z) @ X.basis[:, j]) for j in range(k)]
        outside = (delta(X, Z) >= tol.gap_tol) == (max(far_cols) >= tol.gap_tol)
        ok += inside and outside
    return ok, 100, ""


@prop("grassmann")
def projector_gap_bound(rng, tol):
    ok = 0
    for _ in range(500):
        n = int(rng.integers(1, 13))
        X, Y = random_complementary_pair(rng, n)
        if rng.random() < 0.5:
            Xp, Yp = random_complementary_pair(rng, n, X.dim)
        else:
            eps = 10 ** rng.uniform(-6, -0.5)
            Xp, Yp = perturb_subspace(rng, X, eps), perturb_subspace(rng, Y, eps)
        try:
            ok += bool(check_projector_gap_bound(X, Y, Xp, Yp, tol))
        except NotComplementary:
            ok += 1  # hypothesis violated: reported, not asserted
    return ok, 500, ""


@prop("grassmann")
def perturbation_bound(rng, tol):
    ok = satisfied = 0
    for i in range(500):
        n = int(rng.integers(2, 13))
        X, Y = random_complementary_pair(rng, n, int(rng.integers(1, n)))
        eps = 10 ** rng.uniform(-5, -0.5)
        Xp = perturb_subspace(rng, X, eps)
        Yp = Y if i % 2 else perturb_subspace(rng, Y, eps)
        rep = check_perturbation_bound(X, Y, Xp, Yp, tol)
        satisfied += rep.hypotheses_hold
        ok += rep.holds
    return ok, 500, f"{satisfied} instances met the hypotheses"


@prop("grassmann")
def range_delta_bound(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        k = int(rng.integers(1, n + 1))
        T = cmat(rng, n, k)
        S = T + cmat(rng, n, k, 10 ** rng.uniform(-6, 0.5)) if rng.random() < 0.7 else cmat(rng, n, k)
        ok += bool(check_range_delta_bound(T, S, tol))
    return ok, 100, ""


@prop("grassmann")
def invertible_maps_preserve_complementarity(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        X, Y = random_complementary_pair(rng, n)
        T = cmat(rng, n, n) + 2 * np.sqrt(n) * np.eye(n)
        TX, TY = map_subspace(T, X, tol), map_subspace(T, Y, tol)
        ok += is_complementary(TX, TY, tol) and TX.dim == X.dim
    return ok, 100, ""


@prop("grassmann")
def intersection_sum_dimensions(rng, tol):
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 16))
        c = int(rng.integers(0, n + 1))
        a = int(rng.integers(0, n - c + 1))
        b = int(rng.integers(0, n - c - a + 1))
        C = cmat(rng, n, c)
        X = subspace_from_spanning(np.hstack([C, cmat(rng, n, a)]))
        Y = subspace_from_spanning(np.hstack([C, cmat(rng, n, b)]))
        I, S = intersect(X, Y, tol), sum_subspace(X, Y, tol)
        ok += (I.dim == c and S.dim == a + b + c
               and (c == 0 or gap(I, subspace_from_spanning(C)) <= 1e-8))
    return ok, 100, ""


# ------------------------------------------------------------------ graphop

@prop("graphop")
def graph_roundtrip(rng, tol):
    ok = 0
    for _ in range(100):
        n1, n2 = rng.integers(1, 9, size=2)
        T = random_partial_operator(rng, n1, n2)
        back = go.from_graph_subspace(go.graph(T), n1, n2, tol)
        ok += go.operator_gap(back, T) <= 1e-10
    return ok, 100, ""


@prop("graphop")
def inverse_involution(rng, tol):
    ok = 0
    for _ in range(100):
        n1 = int(rng.integers(1, 9))
        n2 = int(rng.integers(n1, 10))
        T = random_partial_operator(rng, n1, n2, int(rng.integers(0, n1 + 1)))
        Ti = go.inverse(T, tol)
        flip = np.vstack([T.stacked[n1:], T.stacked[:n1]])
        ok += (go.operator_gap(go.inverse(Ti, tol), T) <= 1e-10
               and np.array_equal(go.graph(Ti).basis, flip))
    return ok, 100, ""


@prop("graphop")
def adjoint_involution(rng, tol):
    ok = 0
    for _ in range(100):
        m, n = rng.integers(1, 9, size=2)
        M = cmat(rng, m, n)
        A = go.adjoint(go.from_matrix(M), tol)
        AA = go.adjoint(A, tol)
        ok += (operator_norm(A.matrix - herm(M)) <= 1e-10 * max(1, operator_norm(M))
               and operator_norm(AA.matrix - M) <= 1e-10 * max(1, operator_norm(M)))
    return ok, 100, ""


@prop("graphop")
def compose_associativity(rng, tol):
    ok = 0
    for _ in range(100):
        a, b, c, d = rng.integers(1, 7, size=4)
        A, B, C = (go.from_matrix(cmat(rng, b, a)), go.from_matrix(cmat(rng, c, b)),
                   go.from_matrix(cmat(rng, d, c)))
        left = go.compose(C, go.compose(B, A, tol), tol)
        right = go.compose(go.compose(C, B, tol), A, tol)
        ok += go.operator_gap(left, right) <= 1e-8
    return ok, 100, ""


@prop("graphop")
def partial_compose_matches_preimage(rng, tol):
    ok = 0
    for _ in range(100):
        n1, m, n2 = rng.integers(1, 7, size=3)
        A = random_partial_operator(rng, m, n2)
        B = random_partial_operator(rng, n1, m)
        AB = go.compose(A, B, tol)
        # every domain vector of AB is mapped by B into Dom A, and AB x = A(Bx)
        x = go.domain(AB, tol).basis
        Bx = go.apply(B, x, tol)
        c1 = operator_norm(Bx - projector(go.domain(A, tol)) @ Bx) <= 1e-9
        if A.domain_dim == 0:
            c2 = operator_norm(go.apply(AB, x, tol)) <= 1e-12
        else:
            Bx_in = projector(go.domain(A, tol)) @ Bx
            c2 = operator_norm(go.apply(AB, x, tol) - go.apply(A, Bx_in, tol)) <= 1e-8
        # Dom(AB) is all of B^{-1} Dom A: its dimension is dim Dom B - rank((1 - P_A) B)
        R = (np.eye(m) - projector(go.domain(A, tol))) @ B.V
        c3 = AB.domain_dim == B.domain_dim - rank(R, tol, scale=1.0)
        ok += c1 and c2 and c3
    return ok, 100, ""


@prop("graphop")
def reduced_min_modulus_is_inverse_norm(rng, tol):
    ok = 0
    for _ in range(100):
        n1 = int(rng.integers(1, 9))
        n2 = int(rng.integers(n1, 10))
        T = random_partial_operator(rng, n1, n2, int(rng.integers(1, n1 + 1)))
        gamma = go.reduced_min_modulus(T, tol)
        R = go.range_(T, tol).basis
        inv_norm = operator_norm(go.apply(go.inverse(T, tol), R, tol))
        ok += abs(1 / inv_norm - gamma) <= 1e-9 * max(1, gamma)
    return ok, 100, ""


@prop("graphop")
def left_invertible_perturbation(rng, tol):
    ok = 0
    for _ in range(100):
        n1 = int(rng.integers(1, 8))
        n2 = int(rng.integers(n1, 9))
        T = cmat(rng, n2, n1)
        g = go.reduced_min_modulus(go.from_matrix(T), tol)
        S = cmat(rng, n2, n1)
        S *= rng.uniform(0, 0.99) * g / operator_norm(S)
        ok += bool(go.check_left_invertible_perturbation(T, S, tol))
    return ok, 100, ""


@prop("graphop")
def characteristic_matrix_routes(rng, tol):
    ok = 0
    for _ in range(100):
        n1, n2 = rng.integers(1, 21, size=2)
        T = cmat(rng, n2, n1, 10 ** rng.uniform(-1, 1))
        Top = go.from_matrix(T)
        M = go.characteristic_matrix(Top)
        c1 = np.max(np.abs(M - go.characteristic_matrix_blocks(T))) <= 1e-9
        c2 = np.max(np.abs(go.relative_characteristic_matrix(Top, Top, tol) - M)) <= 1e-10
        ok += c1 and c2
    return ok, 100, ""


def well_conditioned_pair(rng, n1, n2, cond_max=1e3):
    while True:
        T = cmat(rng, n2, n1)
        S = T + cmat(rng, n2, n1, rng.uniform(0, 1.5))
        if np.linalg.cond(np.eye(n1) + herm(S) @ T) <= cond_max:
            return T, S


@prop("graphop")
def relative_characteristic_routes(rng, tol):
    ok = 0
    for _ in range(100):
        n1, n2 = rng.integers(1, 9, size=2)
        T, S = well_conditioned_pair(rng, n1, n2)
        Top, Sop = go.from_matrix(T), go.from_matrix(S)
        M = go.relative_characteristic_matrix(Top, Sop, tol)
        blocks = go.relative_characteristic_blocks(T, S, tol)
        Kperp = go.graph(Sop)
        Kperp_c = np.linalg.svd(Kperp.basis, full_matrices=True)[0][:, Kperp.dim:]
        c1 = np.max(np.abs(M - blocks)) <= 1e-9
        c2 = operator_norm(M @ M - M) <= 1e-9 * max(1, operator_norm(M)) ** 2
        c3 = gap(subspace_from_spanning(M, tol), go.graph(Top)) <= 1e-8
        c4 = operator_norm(M @ Kperp_c) <= 1e-9 * max(1, operator_norm(M))
        ok += c1 and c2 and c3 and c4
    return ok, 100, ""


@prop("graphop")
def spectrum_split(rng, tol):
    ok = 0
    for _ in range(100):
        n1, n2 = rng.integers(1, 9, size=2)
        ok += bool(go.check_spectrum_split(cmat(rng, n1, n2), cmat(rng, n2, n1), tol))
    return ok, 100, ""


@prop("graphop")
def closed_range_duality(rng, tol):
    ok = 0
    for _ in range(100):
        m, n = rng.integers(1, 9, size=2)
        r = int(rng.integers(0, min(m, n) + 1))
        M = cmat(rng, m, r) @ cmat(rng, r, n) if rng.random() < 0.5 else cmat(rng, m, n)
        ok += bool(go.check_closed_range_duality(go.from_matrix(M), tol))
    return ok, 100, ""


@prop("graphop")
def bounded_shift_acts_on_graphs(rng, tol):
    ok = 0
    for _ in range(100):
        n1, n2 = rng.integers(1, 8, size=2)
        T = random_partial_operator(rng, n1, n2)
        S = cmat(rng, n2, n1)
        lhs = go.graph(go.add(T, go.from_matrix(S), tol))
        shear = np.block([[np.eye(n1), np.zeros((n1, n2))], [S, np.eye(n2)]])
        ok += gap(lhs, map_subspace(shear, go.graph(T), tol)) <= 1e-9
    return ok, 100, ""


def scalar_gap(a, b):
    return abs(a - b) / math.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


@prop("graphop")
def scalar_gap_closed_form(rng, tol):
    ok = 0
    for _ in range(100):
        a, b = (complex(*rng.normal(size=2) * 10 ** rng.uniform(-2, 2)) for _ in range(2))
        g = go.operator_gap(go.from_matrix([[a]]), go.from_matrix([[b]]))
        ok += abs(g - scalar_gap(a, b)) <= 1e-12
    seq = [go.operator_gap(go.from_matrix([[0]]), go.from_matrix([[0.1 * n]])) for n in range(1, 101)]
    monotone = all(x < y for x, y in zip(seq, seq[1:])) and seq[-1] < 1 and seq[-1] > 0.99
    return ok + monotone, 101, f"gap([0],[10]) = {seq[-1]:.6f}"


@prop("graphop")
def block_operator_square(rng, tol):
    ok = 0
    for _ in range(50):
        n1, n2 = rng.integers(1, 6, size=2)
        A = random_partial_operator(rng, n2, n1)
        B = random_partial_operator(rng, n1, n2)
        T = go.block_operator(A, B)
        TT = go.compose(T, T, tol)
        D = go.direct_sum(go.compose(A, B, tol), go.compose(B, A, tol))
        dom = go.domain(T, tol)
        ref = subspace_from_spanning(np.vstack([
            np.hstack([go.domain(B, tol).basis, np.zeros((n1, A.domain_dim))]),
            np.hstack([np.zeros((n2, B.domain_dim)), go.domain(A, tol).basis])]))
        ok += go.operator_gap(TT, D) <= 1e-8 and gap(dom, ref) <= 1e-9
    return ok, 50, ""


# --------------------------------------------------------------- holomorphy

def _random_points(rng, k, radius=2.0, avoid=(), margin=0.05):
    pts = []
    while len(pts) < k:
        z = complex(*rng.uniform(-radius, radius, size=2))
        if all(abs(z - a) > margin for a in avoid):
            pts.append(z)
    return pts


@prop("holomorphy")
def linear_and_conjugate_probes(rng, tol):
    lin = ho.matrix_family(lambda z: [[z]], 1, 1)
    conj = ho.conjugate_family()
    ok = 0
    pts = _random_points(rng, 10)
    for z in pts:
        r1 = ho.relchar_differentiability(lin, z, tol)
        r2 = ho.relchar_differentiability(conj, z, tol)
        ok += (r1.holomorphic and r1.cr_residual < 1e-8
               and r2.classification == ho.NOT_HOLOMORPHIC and min(r2.residuals) > 0.1)
    return ok, len(pts), ""


@prop("holomorphy")
def resolvent_probes(rng, tol):
    F = ho.resolvent_family(np.diag([1.0, 2.0]), tol)
    ok = 0
    pts = _random_points(rng, 10, radius=3.0, avoid=(1, 2), margin=0.1)
    for z in pts:
        ok += ho.relchar_differentiability(F, z, tol).holomorphic
    for z in (1, 2):
        try:
            ho.relchar_differentiability(F, z, tol)
        except EvaluationFailed as exc:
            ok += isinstance(exc.cause, NotInjective)
    return ok, len(pts) + 2, ""


def _safe_point(rng, R, radius=1.0, margin=0.2):
    """Random point at least ``margin`` away from the denominator roots of R."""
    roots = []
    for row in R.den:
        for d in row:
            d = np.trim_zeros(d, "b")
            if len(d) > 1:
                roots.extend(np.roots(d[::-1]))
    return _random_points(rng, 1, radius, avoid=roots, margin=margin)[0]


@prop("holomorphy")
def schwarz_reflection(rng, tol):
    ok = 0
    for _ in range(50):
        n1, n2 = rng.integers(1, 7, size=2)
        R = random_rational_family(rng, n2, n1, max_degree=3)
        F = ho.rational_family(R)
        z0 = _safe_point(rng, R)
        rep = ho.check_schwarz_reflection(F, z0, tol)
        ok += rep.holds and rep.details["direct"].holomorphic
    return ok, 50, ""


@prop("holomorphy")
def reflection_involution(rng, tol):
    ok = 0
    for _ in range(20):
        n1, n2 = rng.integers(1, 5, size=2)
        R = random_rational_family(rng, n2, n1, max_degree=2)
        F = ho.rational_family(R)
        FF = ho.reflect(ho.reflect(F, tol), tol)
        z = _safe_point(rng, R)
        ok += go.operator_gap(FF(z), F(z)) <= 1e-10
    return ok, 20, ""


def kernel_contrast(tol, z0=0.0):
    """Oblique and orthogonal probes of ``z -> Ker [1, z] = span(-z, 1)``."""
    K = ho.kernel_family(ho.matrix_family(lambda z: [[1, z]], 2, 1), tol)
    return (ho.subspace_family_differentiability(K, z0, tol),
            ho.orthogonal_projector_differentiability(K, z0, tol))


@prop("holomorphy")
def kernel_family_contrast(rng, tol):
    ok = 0
    pts = [0.0] + _random_points(rng, 9, radius=1.0)
    for z in pts:
        obl, orth = kernel_contrast(tol, z)
        ok += obl.holomorphic and orth.classification == ho.NOT_HOLOMORPHIC
    return ok, len(pts), ""


def exact_degree_family(rng, rows, cols, degree):
    """Rational family whose entries have numerator and denominator of exact degree."""
    def poly():
        c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        c[-1] = c[-1] / abs(c[-1])
        return c
    return RationalMatrixFamily.from_polynomials(
        [[poly() for _ in range(cols)] for _ in range(rows)],
        [[poly() for _ in range(cols)] for _ in range(rows)])


def uniqueness_trial(rng, degree=3, grid=100, tol=DEFAULT_TOL):
    """Max graph gap between a family and its interpolant from ``2 degree + 1`` samples."""
    rows, cols = rng.integers(1, 4, size=2)
    F = exact_degree_family(rng, rows, cols, degree)
    zs = [_safe_point(rng, F, 1.0, 0.1) for _ in range(2 * degree + 1)]
    G = interpolate_rational(zs, [F(z) for z in zs], degree)
    worst = 0.0
    n = 0
    while n < grid:
        z = complex(*rng.uniform(-1.5, 1.5, size=2))
        try:
            a, b = go.from_matrix(F(z)), go.from_matrix(G(z))
        except EvaluationFailed:
            continue
        worst = max(worst, go.operator_gap(a, b))
        n += 1
    return worst


@prop("holomorphy")
def uniqueness_of_continuation(rng, tol):
    ok = 0
    for _ in range(20):
        ok += uniqueness_trial(rng, 3, 100, tol) <= 1e-8
    return ok, 20, ""


@prop("holomorphy")
def continuity_modulus_degrades_with_scale(rng, tol):
    moduli = []
    for n in (1, 10, 100):
        F = ho.matrix_family(lambda z, n=n: [[n * z]], 1, 1)
        rep = ho.gap_continuity_modulus(F, 0.0, radii=(0.1, 0.01, 0.001), samples_per_circle=16, tol=tol)
        moduli.append(rep.moduli[0])
        if not rep.continuous:
            return 0, 2, "scaled linear family flagged discontinuous"
    expected = [0.1 * n / math.sqrt(1 + (0.1 * n) ** 2) for n in (1, 10, 100)]
    c1 = all(abs(m - e) <= 1e-9 for m, e in zip(moduli, expected))
    c2 = moduli[0] < moduli[1] < moduli[2] < 1
    return c1 + c2, 2, f"moduli at r=0.1: {', '.join(f'{m:.6f}' for m in moduli)}"


def builtin_families(tol):
    T = np.diag([1.0, 2.0])
    return {
        "linear": ho.matrix_family(lambda z: [[z]], 1, 1),
        "conjugate": ho.conjugate_family(),
        "resolvent": ho.resolvent_family(T, tol),
        "constant": ho.constant_family(go.from_matrix([[1, 2], [3, 4]])),
        "partial": ho.graph_family(lambda z: [[1], [z]], lambda z: [[z * z + 1]], 2, 1, tol),
    }


@prop("holomorphy")
def classification_stability(rng, tol):
    coarse = tol.replace(fd_steps=(1e-3, 1e-4))
    fine = tol.replace(fd_steps=(1e-4, 1e-5))
    ok = total = 0
    for name, F in builtin_families(tol).items():
        for z in _random_points(rng, 4, radius=2.5, avoid=(1, 2), margin=0.2):
            a = ho.relchar_differentiability(F, z, coarse).classification
            b = ho.relchar_differentiability(F, z, fine).classification
            ok += a == b
            total += 1
    return ok, total, ""


@prop("holomorphy")
def resolution_agrees_with_relchar(rng, tol):
    T = np.diag([1.0, 2.0])
    z_ref = 5.0
    R0 = np.linalg.inv(z_ref * np.eye(2) - T)
    F = ho.resolvent_family(T, tol)
    ok = total = 0
    for z in _random_points(rng, 5, radius=3.0, avoid=(1, 2), margin=0.2):
        res = ho.resolution_differentiability(
            lambda w: (w * np.eye(2) - T) @ R0, lambda w: R0, z, tol, family=F)
        rel = ho.relchar_differentiability(F, z, tol)
        ok += res.classification == rel.classification == ho.HOLOMORPHIC and res.note.startswith("Ran")
        total += 1
    for _ in range(5):
        n1, n2 = rng.integers(1, 5, size=2)
        k = int(rng.integers(1, n1 + 1))
        Wr = random_rational_family(rng, n1, k, 2)
        Vr = random_rational_family(rng, n2, k, 2)
        G = ho.graph_family(Wr, Vr, n1, n2, tol)
        z = _safe_point(rng, Wr)
        try:
            res = ho.resolution_differentiability(Wr, Vr, z, tol, family=G)
            rel = ho.relchar_differentiability(G, z, tol)
        except EvaluationFailed:
            continue
        ok += res.classification == rel.classification
        total += 1
    conj_w = ho.resolution_differentiability(lambda z: [[np.conj(z) + 2]], lambda z: [[1.0]], 0.0, tol)
    ok += conj_w.classification == ho.NOT_HOLOMORPHIC
    total += 1
    return ok, total, ""


@prop("holomorphy")
def type_a_families(rng, tol):
    ok = 0
    for _ in range(20):
        n1, n2 = rng.integers(1, 6, size=2)
        k = int(rng.integers(1, n1 + 1))
        D = cmat(rng, n1, k)
        Vr = random_rational_family(rng, n2, k, 3)
        F = ho.graph_family(lambda z, D=D: D, Vr, n1, n2, tol)
        z = _safe_point(rng, Vr)
        ok += ho.relchar_differentiability(F, z, tol).holomorphic
    return ok, 20, ""


@prop("holomorphy")
def image_families(rng, tol):
    ok = 0
    for _ in range(20):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, n))
        A0, A1 = cmat(rng, n, n), cmat(rng, n, n, 0.2)
        base = A0 + 3 * np.sqrt(n) * np.eye(n)
        M = lambda z, base=base, A1=A1: base + z * A1
        Xr = random_rational_family(rng, n, k, 2)
        X = ho.span_family(Xr, n, tol)
        z = _safe_point(rng, Xr)
        ok += ho.subspace_family_differentiability(ho.image_family(M, X, tol), z, tol).holomorphic
    return ok, 20, ""


@prop("holomorphy")
def gap_versus_riesz(rng, tol):
    """Self-adjoint sequences: gap-Cauchy iff f(T_k) Cauchy for f with equal limits at +-inf."""
    equal_limits = (lambda t: 1 / (t + 1j), lambda t: 1 / (1 + t * t))
    unequal = lambda t: t / math.sqrt(1 + t * t)
    ok = total = 0
    n = 3
    H = random_hermitian(rng, n)
    E = random_hermitian(rng, n)
    # converging sequence: everything converges
    for k in (10, 100, 1000):
        Tk = H + E / k
        total += 1
        ok += (gap(go.graph(go.from_matrix(Tk)), go.graph(go.from_matrix(H))) <= 2 * operator_norm(E) / k
               and all(operator_norm(ho.selfadjoint_fcalc(Tk, f) - ho.selfadjoint_fcalc(H, f))
                       <= 2 * operator_norm(E) / k for f in equal_limits + (unequal,)))
    # alternating blow-up: Cauchy in the gap, not in the Riesz metric
    seq = [np.diag([(-1) ** k * k, 0.5, -0.25]) for k in (10, 11, 100, 101, 1000, 1001)]
    for a, b in zip(seq[::2], seq[1::2]):
        k = abs(a[0, 0])
        g = go.operator_gap(go.from_matrix(a), go.from_matrix(b))
        rd = ho.riesz_distance(a, b)
        f_eq = max(operator_norm(ho.selfadjoint_fcalc(a, f) - ho.selfadjoint_fcalc(b, f))
                   for f in equal_limits)
        f_neq = operator_norm(ho.selfadjoint_fcalc(a, unequal) - ho.selfadjoint_fcalc(b, unequal))
        total += 1
        ok += g <= 3 / k and f_eq <= 3 / k and rd > 1.9 and f_neq > 1.9
    return ok, total, ""


@prop("holomorphy")
def product_and_sum_criteria(rng, tol):
    ok = total = 0
    c = lambda M: ho.constant_family(go.from_matrix(M))
    rep = ho.check_product_theorem_preconditions(c([[1.0]]), c([[4.0]]), [0, 1j], "holoproduct",
                                                 candidates=[1.0], tol=tol)
    total += 1
    ok += rep.holds and rep.details["lambda"] == 1.0
    # Dom A = span(e1) and Ran B = span(e1): the sum misses e2, rancase fails
    A = ho.constant_family(go.GraphOperator.from_resolution([[1], [0]], [[1]]))
    B = ho.constant_family(go.from_matrix([[1.0], [0.0]]))
    rep = ho.check_product_theorem_preconditions(A, B, [0], "rancase", tol=tol)
    total += 1
    ok += (not rep.holds) and rep.points[0].witness is not None
    # sum theorem with complementary partial domains
    Ft = ho.constant_family(go.GraphOperator.from_resolution([[1], [0]], [[1]]))
    Fs = ho.constant_family(go.GraphOperator.from_resolution([[0], [1]], [[2]]))
    rep = ho.check_sum_theorem(Ft, Fs, [0, 1], tol)
    total += 1
    ok += rep.holds and go.add(Ft(0), Fs(0), tol).domain_dim == 0
    # random holomorphic families: criterion1 holds and the product is holomorphic
    for _ in range(10):
        n1, m, n2 = rng.integers(1, 5, size=3)
        Ra, Rb = random_rational_family(rng, n2, m, 2), random_rational_family(rng, m, n1, 2)
        Fa, Fb = ho.rational_family(Ra), ho.rational_family(Rb)
        z = _safe_point(rng, Ra)
        if min(abs(z - r) for r in [*_roots(Rb), 99]) < 0.2:
            continue
        pre = ho.check_product_theorem_preconditions(Fa, Fb, [z], "criterion1", tol=tol)
        prod = ho.relchar_differentiability(ho.product_family(Fa, Fb, tol), z, tol)
        Rc = random_rational_family(rng, n2, m, 2)
        if min(abs(z - r) for r in [*_roots(Rc), 99]) < 0.2:
            continue
        sums = ho.check_sum_theorem(Fa, ho.rational_family(Rc), [z], tol)
        total += 1
        ok += pre.holds and prod.holomorphic and sums.holds
    return ok, total, ""


def _roots(R):
    out = []
    for row in R.den:
        for d in row:
            d = np.trim_zeros(d, "b")
            if len(d) > 1:
                out.extend(np.roots(d[::-1]))
    return out


def format_results(results) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        lines.append(f"{status} {r.suite}/{r.name}: {r.passed}/{r.total}{note}")
    failed = sum(not r.ok for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} properties passed")
    return "\n".join(lines)
