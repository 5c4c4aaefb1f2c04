"""Rational matrix families and the JSON family-file format.

Family files are text JSON.  A complex scalar is a two-element array
``[re, im]`` (a bare real number is also accepted).  Polynomial coefficients
are listed in ascending order of degree.  Three kinds exist::

    {"format_version": "1", "kind": "matrix", "dims": [rows, cols],
     "entries": [[ENTRY, ...], ...]}

    {"format_version": "1", "kind": "graph", "dims": [n1, n2, k],
     "W": [[ENTRY, ...], ...], "V": [[ENTRY, ...], ...]}

    {"format_version": "1", "kind": "subspace", "dims": [n, k],
     "vectors": [[ENTRY, ...], ...]}

where ``ENTRY`` is a constant scalar or ``{"num": [c0, c1, ...],
"den": [d0, d1, ...]}`` (``den`` defaults to ``[1]``).  A ``matrix`` family
of shape rows x cols is the everywhere-defined operator ``C^cols -> C^rows``;
a ``graph`` family is the operator with ``Dom = Ran W(z)`` and
``T W(z) u = V(z) u``; the columns of a ``subspace`` family span ``X_z``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import EvaluationFailed, FamilyFileError

FORMAT_VERSION = "1"
KINDS = ("matrix", "graph", "subspace")


class PoleError(EvaluationFailed):
    pass


@dataclass(frozen=True, eq=False)
class RationalMatrixFamily:
    """Matrix whose entries are ratios of polynomials in z.

    ``num`` and ``den`` are nested lists (rows x cols) of 1-D complex
    coefficient arrays, ascending by degree.
    """

    rows: int
    cols: int
    num: tuple
    den: tuple

    @classmethod
    def from_polynomials(cls, num, den=None) -> "RationalMatrixFamily":
        num = [[np.atleast_1d(np.asarray(c, dtype=complex)) for c in row] for row in num]
        rows = len(num)
        cols = len(num[0]) if rows else 0
        if den is None:
            den = [[np.ones(1, complex) for _ in range(cols)] for _ in range(rows)]
        else:
            den = [[np.atleast_1d(np.asarray(c, dtype=complex)) for c in row] for row in den]
        for i in range(rows):
            if len(num[i]) != cols or len(den[i]) != cols:
                raise ValueError(f"row {i} has inconsistent length")
            for j in range(cols):
                if not np.any(den[i][j] != 0):
                    raise ValueError(f"entry ({i}, {j}) has an identically zero denominator")
        return cls(rows, cols, tuple(map(tuple, num)), tuple(map(tuple, den)))

    @classmethod
    def constant(cls, M) -> "RationalMatrixFamily":
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        return cls.from_polynomials([[[x] for x in row] for row in M])

    @property
    def degree(self) -> int:
        """Largest numerator or denominator degree."""
        deg = 0
        for i in range(self.rows):
            for j in range(self.cols):
                deg = max(deg, len(np.trim_zeros(self.num[i][j], "b")) - 1,
                          len(np.trim_zeros(self.den[i][j], "b")) - 1)
        return deg

    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)

    def evaluate(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty((self.rows, self.cols), complex)
        for i in range(self.rows):
            for j in range(self.cols):
                d = self.den[i][j]
                q = P.polyval(z, d)
                scale = np.sum(np.abs(d) * max(1.0, abs(z)) ** np.arange(len(d)))
                if abs(q) <= 1e-13 * scale:
                    raise PoleError(f"pole of entry ({i}, {j}) at z = {z}", z=z)
                out[i, j] = P.polyval(z, self.num[i][j]) / q
        return out

    def to_json_entries(self) -> list:
        return [[{"num": _dump_poly(self.num[i][j]), "den": _dump_poly(self.den[i][j])}
                 for j in range(self.cols)] for i in range(self.rows)]


def _dump_poly(c):
    return [[float(x.real), float(x.imag)] for x in c]


def _parse_scalar(x, where):
    if isinstance(x, bool):
        raise FamilyFileError(f"{where}: expected a number or [re, im], got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)):
        return complex(x[0], x[1])
    raise FamilyFileError(f"{where}: expected a number or [re, im], got {x!r}")


def _parse_poly(coeffs, where):
    if not isinstance(coeffs, list) or not coeffs:
        raise FamilyFileError(f"{where}: expected a nonempty coefficient list")
    out = np.array([_parse_scalar(c, f"{where}[{k}]") for k, c in enumerate(coeffs)])
    if not np.all(np.isfinite(out)):
        raise FamilyFileError(f"{where}: non-finite coefficient")
    return out


def _parse_entries(data, rows, cols, where) -> RationalMatrixFamily:
    if not isinstance(data, list) or len(data) != rows:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise FamilyFileError(f"{where}: expected {rows} rows, got {got}")
    num, den = [], []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise FamilyFileError(f"{where}[{i}]: expected {cols} entries, got {got}")
        nrow, drow = [], []
        for j, e in enumerate(row):
            pos = f"{where}[{i}][{j}]"
            if isinstance(e, dict):
                extra = set(e) - {"num", "den"}
                if extra or "num" not in e:
                    raise FamilyFileError(f"{pos}: rational entry needs 'num' (and optional 'den')")
                n = _parse_poly(e["num"], f"{pos}.num")
                d = _parse_poly(e.get("den", [1]), f"{pos}.den")
                if not np.any(d != 0):
                    raise FamilyFileError(f"{pos}.den: zero denominator")
            else:
                n = np.array([_parse_scalar(e, pos)])
                d = np.ones(1, complex)
            nrow.append(n)
            drow.append(d)
        num.append(nrow)
        den.append(drow)
    return RationalMatrixFamily.from_polynomials(num, den) if rows else \
        RationalMatrixFamily(0, cols, (), ())


def _dims(doc, n):
    dims = doc.get("dims")
    if (not isinstance(dims, list) or len(dims) != n
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 0 for d in dims)):
        raise FamilyFileError(f"dims: expected a list of {n} nonnegative integers, got {dims!r}")
    return dims


@dataclass(frozen=True, eq=False)
class FamilyFile:
    format_version: str
    kind: str
    dims: tuple
    parts: dict  # name -> RationalMatrixFamily


def parse_family(doc) -> FamilyFile:
    if not isinstance(doc, dict):
        raise FamilyFileError("top level: expected a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FamilyFileError(f"format_version: expected {FORMAT_VERSION!r}, got {version!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise FamilyFileError(f"kind: expected one of {KINDS}, got {kind!r}")
    if kind == "matrix":
        rows, cols = _dims(doc, 2)
        parts = {"entries": _parse_entries(doc.get("entries"), rows, cols, "entries")}
        dims = (rows, cols)
    elif kind == "graph":
        n1, n2, k = _dims(doc, 3)
        parts = {"W": _parse_entries(doc.get("W"), n1, k, "W"),
                 "V": _parse_entries(doc.get("V"), n2, k, "V")}
        dims = (n1, n2, k)
    else:
        n, k = _dims(doc, 2)
        parts = {"vectors": _parse_entries(doc.get("vectors"), n, k, "vectors")}
        dims = (n, k)
    return FamilyFile(version, kind, dims, parts)


def load_family(path) -> FamilyFile:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FamilyFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise FamilyFileError(f"{path}: {exc.strerror}") from None
    try:
        return parse_family(doc)
    except FamilyFileError as exc:
        raise FamilyFileError(f"{path}: {exc}") from None


def matrix_document(family: RationalMatrixFamily) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": "matrix",
            "dims": [family.rows, family.cols], "entries": family.to_json_entries()}


def graph_document(W: RationalMatrixFamily, V: RationalMatrixFamily) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": "graph",
            "dims": [W.rows, V.rows, W.cols],
            "W": W.to_json_entries(), "V": V.to_json_entries()}


def random_rational_family(rng, rows, cols, max_degree=3, shared_denominator=True):
    """Random rational matrix family; degrees drawn up to ``max_degree``."""
    def poly(deg):
        return rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)

    num = [[poly(int(rng.integers(0, max_degree + 1))) for _ in range(cols)]
           for _ in range(rows)]
    if shared_denominator:
        d = poly(int(rng.integers(0, max_degree + 1)))
        den = [[d for _ in range(cols)] for _ in range(rows)]
    else:
        den = [[poly(int(rng.integers(0, max_degree + 1))) for _ in range(cols)]
               for _ in range(rows)]
    return RationalMatrixFamily.from_polynomials(num, den)


def interpolate_rational(zs, values, degree) -> RationalMatrixFamily:
    """Entrywise rational interpolant with numerator and denominator degree ``degree``.

    Needs ``2 * degree + 1`` sample points.  Each entry solves the linearised
    conditions ``p(z_k) - f_k q(z_k) = 0`` and takes the right singular vector
    of the smallest singular value; any nonzero solution represents the same
    rational function when the data come from one of this degree.
    """
    zs = np.asarray(zs, dtype=complex)
    values = [np.asarray(v, dtype=complex) for v in values]
    if len(zs) != 2 * degree + 1 or len(values) != len(zs):
        raise ValueError(f"need exactly {2 * degree + 1} samples for degree {degree}")
    rows, cols = values[0].shape
    Vz = np.vander(zs, degree + 1, increasing=True)
    num, den = [], []
    for i in range(rows):
        nrow, drow = [], []
        for j in range(cols):
            f = np.array([v[i, j] for v in values])
            A = np.hstack([Vz, -f[:, None] * Vz])
            _, _, Vh = np.linalg.svd(A)
            c = Vh[-1].conj()
            nrow.append(c[:degree + 1])
            drow.append(c[degree + 1:])
        num.append(nrow)
        den.append(drow)
    return RationalMatrixFamily.from_polynomials(num, den)
