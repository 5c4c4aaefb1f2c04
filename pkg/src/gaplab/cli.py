"""Command-line front end.

Exit codes: 0 ok / holomorphic, 1 property failure / not holomorphic or
inconclusive, 2 usage or parse error, 3 dimension mismatch,
4 transversality or complementarity failure, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import graphop as go
from . import holomorphy as ho
from .errors import DimensionMismatch, GapLabError
from .grassmann import delta, gap, projector_distance, subspace_from_spanning
from .kernel import Tolerances
from .rational import load_family
from .verify import SUITES, format_results, run_suite

BUILTINS = ("linear", "conjugate", "resolvent", "kernel", "kernel-orthogonal")
MODES = ("relchar", "resolution", "subspace")
CSV_HEADER = ["re", "im", "cr_residual", "gap_modulus", "class", "status"]


class UsageError(GapLabError):
    exit_code = 2


def parse_complex(text) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(parts[0].replace(" ", ""))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse point {text!r}; expected 're,im'")


def parse_matrix(text) -> np.ndarray:
    """``diag(1,2)`` or a JSON nested list (complex entries as ``[re, im]``)."""
    m = re.fullmatch(r"\s*diag\((.*)\)\s*", text)
    try:
        if m:
            return np.diag([complex(v.strip().replace(" ", "")) for v in m.group(1).split(",")])
        data = json.loads(text)
        return np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in row]
                         for row in data])
    except (ValueError, TypeError):
        raise UsageError(f"cannot parse matrix {text!r}") from None


def parse_grid(text):
    parts = text.split(",")
    if len(parts) != 5:
        raise UsageError("--grid expects re0,re1,im0,im1,steps")
    try:
        re0, re1, im0, im1 = map(float, parts[:4])
        steps = int(parts[4])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if steps < 1:
        raise UsageError("grid needs at least one step per axis")
    return re0, re1, im0, im1, steps


def fmt(x) -> str:
    return f"{x:.17g}"


def fmt_complex(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j" if z.imag else f"{z.real:.17g}"


def print_matrix(M, out=None):
    out = out or sys.stdout
    for row in np.asarray(M):
        print("  [" + ", ".join(fmt_complex(x) for x in row) + "]", file=out)


def _operator_from_file(path, z, tol):
    fam = load_family(path)
    if fam.kind == "matrix":
        return go.from_matrix(fam.parts["entries"](z))
    if fam.kind == "graph":
        return go.GraphOperator.from_resolution(fam.parts["W"](z), fam.parts["V"](z), tol)
    raise UsageError(f"{path}: expected an operator family (kind matrix or graph)")


def _operator_family(fam, tol):
    if fam.kind == "matrix":
        return ho.rational_family(fam.parts["entries"])
    if fam.kind == "graph":
        W, V = fam.parts["W"], fam.parts["V"]
        return ho.graph_family(W, V, W.rows, V.rows, tol)
    raise UsageError("relchar mode needs a matrix or graph family file")


def cmd_gap(args, tol):
    z = parse_complex(args.at)
    fa, fb = load_family(args.file_a), load_family(args.file_b)
    if (fa.kind == "subspace") != (fb.kind == "subspace"):
        raise UsageError("compare two operator files or two subspace files")
    if fa.kind == "subspace":
        X = subspace_from_spanning(fa.parts["vectors"](z), tol)
        Y = subspace_from_spanning(fb.parts["vectors"](z), tol)
    else:
        A, B = _operator_from_file(args.file_a, z, tol), _operator_from_file(args.file_b, z, tol)
        if (A.h1_dim, A.h2_dim) != (B.h1_dim, B.h2_dim):
            raise DimensionMismatch(
                f"operators act {A.h1_dim}->{A.h2_dim} and {B.h1_dim}->{B.h2_dim}")
        X, Y = go.graph(A), go.graph(B)
    if X.ambient_dim != Y.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {X.ambient_dim} vs {Y.ambient_dim}")
    g = gap(X, Y)
    pd = projector_distance(X, Y)
    print(f"gap {fmt(g)}")
    print(f"delta(A,B) {fmt(delta(X, Y))}")
    print(f"delta(B,A) {fmt(delta(Y, X))}")
    print(f"projector_distance {fmt(pd)}")
    print(f"identity_check {'ok' if abs(g - pd) <= tol.gap_tol else 'MISMATCH'}")
    return 0 if abs(g - pd) <= tol.gap_tol else 1


def cmd_charmat(args, tol):
    z = parse_complex(args.at)
    T = _operator_from_file(args.file, z, tol)
    if args.relative:
        S = _operator_from_file(args.relative, z, tol)
        M = go.relative_characteristic_matrix(T, S, tol)
        print(f"relative characteristic matrix ({M.shape[0]}x{M.shape[1]})")
    else:
        M = go.characteristic_matrix(T)
        print(f"characteristic matrix ({M.shape[0]}x{M.shape[1]})")
    print_matrix(M)
    return 0


def _builtin(name, matrix, tol):
    if name == "linear":
        return ho.matrix_family(lambda z: [[z]], 1, 1, ("builtin", "linear"))
    if name == "conjugate":
        return ho.conjugate_family()
    if name == "resolvent":
        if matrix is None:
            raise UsageError("--builtin resolvent needs --matrix")
        return ho.resolvent_family(parse_matrix(matrix), tol)
    if name in ("kernel", "kernel-orthogonal"):
        return ho.kernel_family(ho.matrix_family(lambda z: [[1, z]], 2, 1), tol)
    raise UsageError(f"unknown builtin {name!r}")


def _probe(args, tol):
    """Return ``(probe(z) -> report, family)`` for the selected input."""
    if args.builtin:
        fam = _builtin(args.builtin, args.matrix, tol)
        if args.builtin == "kernel":
            return (lambda z: ho.subspace_family_differentiability(fam, z, tol)), fam
        if args.builtin == "kernel-orthogonal":
            return (lambda z: ho.orthogonal_projector_differentiability(fam, z, tol)), fam
        return (lambda z: ho.relchar_differentiability(fam, z, tol)), fam
    if not args.family_file:
        raise UsageError("give a family file or --builtin")
    ff = load_family(args.family_file)
    if args.mode == "relchar":
        fam = _operator_family(ff, tol)
        return (lambda z: ho.relchar_differentiability(fam, z, tol)), fam
    if args.mode == "resolution":
        if ff.kind == "graph":
            W, V = ff.parts["W"], ff.parts["V"]
        elif ff.kind == "matrix":
            R = ff.parts["entries"]
            W, V = (lambda z, n=R.cols: np.eye(n)), R
        else:
            raise UsageError("resolution mode needs a matrix or graph family file")
        fam = _operator_family(ff, tol)
        return (lambda z: ho.resolution_differentiability(W, V, z, tol, family=fam)), fam
    if ff.kind != "subspace":
        raise UsageError("subspace mode needs a subspace family file")
    fam = ho.span_family(ff.parts["vectors"], ff.dims[0], tol)
    return (lambda z: ho.subspace_family_differentiability(fam, z, tol)), fam


def print_report(rep):
    print(f"z0 {fmt_complex(rep.z0)}")
    print(f"classification {rep.classification}")
    print(f"cr_residual {fmt(rep.cr_residual)}")
    print("residuals " + " ".join(fmt(r) for r in rep.residuals))
    print("steps " + " ".join(fmt(h) for h in rep.steps))
    print("step_consistency " + " ".join(fmt(r) for r in rep.step_consistency))
    if rep.note:
        print(f"note {rep.note}")
    print("derivative_estimate")
    print_matrix(rep.derivative_estimate)


def cmd_holo_check(args, tol):
    z = parse_complex(args.at)
    probe, _ = _probe(args, tol)
    rep = probe(z)
    print_report(rep)
    return 0 if rep.holomorphic else 1


def _scan_point(probe, fam, z, tol):
    try:
        rep = probe(z)
        mod = ho.gap_continuity_modulus(fam, z, radii=(1e-3,), samples_per_circle=8, tol=tol)
        return [fmt(z.real), fmt(z.imag), fmt(rep.cr_residual), fmt(mod.moduli[0]), rep.code, "0"]
    except GapLabError as exc:
        return [fmt(z.real), fmt(z.imag), "nan", "nan", "I", str(exc.exit_code)]


def grid_points(re0, re1, im0, im1, steps):
    """Row-major: outer loop over the imaginary axis, inner over the real axis."""
    res = np.linspace(re0, re1, steps) if steps > 1 else np.array([re0])
    ims = np.linspace(im0, im1, steps) if steps > 1 else np.array([im0])
    return [complex(x, y) for y in ims for x in res]


def holo_scan(probe, fam, grid, tol, workers=4):
    points = grid_points(*grid)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda z: _scan_point(probe, fam, z, tol), points))
    return rows


def cmd_holo_scan(args, tol):
    grid = parse_grid(args.grid)
    probe, fam = _probe(args, tol)
    rows = holo_scan(probe, fam, grid, tol, args.workers)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
    counts = {c: sum(r[4] == c and r[5] == "0" for r in rows) for c in "HNI"}
    failed = sum(r[5] != "0" for r in rows)
    print(f"{len(rows)} points: {counts['H']} H, {counts['N']} N, {counts['I']} I, "
          f"{failed} failed -> {args.out}")
    return 0


def cmd_verify(args, tol):
    t0 = time.perf_counter()
    results = run_suite(args.suite, args.seed, tol)
    print(format_results(results))
    print(f"seed {args.seed}, {time.perf_counter() - t0:.1f} s")
    return 0 if all(r.ok for r in results) else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="gaplab",
        description="Gap metric, graph operators and holomorphy probes for closed-operator families.",
        epilog="Tolerance overrides: set GAPLAB_TOLERANCES to a JSON file. "
               "Negative points need '=': --at=-1,0.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gap", help="gap between two operators (graphs) or two subspaces")
    g.add_argument("file_a")
    g.add_argument("file_b")
    g.add_argument("--at", default="0,0", help="parameter value re,im for families")
    g.set_defaults(func=cmd_gap)

    c = sub.add_parser("charmat", help="characteristic or relative characteristic matrix")
    c.add_argument("file")
    c.add_argument("--relative", metavar="FILE_S")
    c.add_argument("--at", default="0,0")
    c.set_defaults(func=cmd_charmat)

    for name, func in (("holo-check", cmd_holo_check), ("holo-scan", cmd_holo_scan)):
        h = sub.add_parser(name, help="holomorphy probe" if name == "holo-check" else
                           "holomorphy probe over a grid, CSV output")
        h.add_argument("family_file", nargs="?")
        h.add_argument("--mode", choices=MODES, default="relchar")
        h.add_argument("--builtin", choices=BUILTINS)
        h.add_argument("--matrix", help="matrix for --builtin resolvent, e.g. 'diag(1,2)'")
        if name == "holo-check":
            h.add_argument("--at", required=True, help="point re,im")
        else:
            h.add_argument("--grid", required=True, help="re0,re1,im0,im1,steps")
            h.add_argument("--out", required=True, help="CSV output path")
            h.add_argument("--workers", type=int, default=4)
        h.set_defaults(func=func)

    v = sub.add_parser("verify", help="run the randomized verification suites")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = Tolerances.from_env()
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: bad tolerance file: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, tol)
    except GapLabError as exc:
        kind = type(exc).__name__
        z = getattr(exc, "z", None)
        where = f" at z = {fmt_complex(z)}" if z is not None else ""
        print(f"error: {kind}{where}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
