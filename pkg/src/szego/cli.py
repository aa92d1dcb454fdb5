"""Command-line front end.

Every subcommand writes its primary output to stdout, or to files under
``--out DIR`` when given.  Exit status is 0 on success, 2 when the input
fails validation and 3 on a numerical failure (singular or indefinite
section); failures print a one-line JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _scalar as sc
from . import io as fio
from .asymptotics import first_limit, strong_limit
from .classical import (ToeplitzSpec, hilbert_gamma, hilbert_gamma_field, hilbert_kernel,
                        legendre_recurrence, three_term_polys, toeplitz_kernel)
from .free_semigroup import nc_limits, stationary_kernel, words_up_to
from .kernel import KernelError, determinant_table, validate_kernel
from .polys import build_polys
from .schur import GammaField, catalan, extract_gamma, lattice_expand, reconstruct_moments
from .triangular import spectral_factor

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

DEFAULT_TOL = {"rational": 1e-10, "float64": 1e-8}


class CliError(Exception):
    def __init__(self, status: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.status, self.kind, self.extra = status, kind, extra


class Output:
    """Routes named outputs to stdout or to ``--out`` files."""

    def __init__(self, out_dir: str | None):
        self.dir = Path(out_dir) if out_dir else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str, primary: bool = True) -> None:
        if self.dir is not None:
            (self.dir / name).write_text(text, encoding="utf-8", newline="\n")
        elif primary:
            sys.stdout.write(text)


def _tol(args) -> float:
    return args.tol if args.tol is not None else DEFAULT_TOL[args.precision]


def _check_kernel(kernel) -> None:
    rep = validate_kernel(kernel)
    if not rep.ok:
        status = EXIT_NUMERIC if rep.first_nonpositive is not None else EXIT_INVALID
        raise CliError(status, "not strictly positive" if status == EXIT_NUMERIC else "invalid kernel",
                       "; ".join(rep.violations), first_nonpositive=rep.first_nonpositive)


def cmd_extract(args, out: Output) -> None:
    kernel = fio.load_kernel(args.input, args.precision)
    _check_kernel(kernel)
    field = extract_gamma(kernel)
    out.emit("gamma.json", fio.dump_json(fio.gamma_to_json(field)))


def cmd_reconstruct(args, out: Output) -> None:
    field = fio.load_gamma(args.input, args.precision)
    kernel = reconstruct_moments(field, args.size)
    out.emit("kernel.json", fio.dump_json(fio.kernel_to_json(kernel)))


def cmd_determinants(args, out: Output) -> None:
    kernel = fio.load_kernel(args.input, args.precision)
    table = determinant_table(kernel)
    out.emit("determinants.csv", fio.write_csv(("r", "q", "value"), table.rows()))


def cmd_polys(args, out: Output) -> None:
    field = fio.load_gamma(args.input, args.precision)
    table = build_polys(field, max_degree=args.degree, max_level=args.levels)
    rows, sharp = [], []
    for l in range(table.size):
        for n in range(table.size - l):
            for k in range(n + 1):
                rows.append((n, l, k, *fio.complex_columns(table.a[l, n, k])))
                sharp.append((n, l, k, *fio.complex_columns(table.b[l, n, k])))
    rows.sort(key=lambda r: r[:3])
    sharp.sort(key=lambda r: r[:3])
    header = ("n", "l", "k", "re", "im")
    out.emit("polys.csv", fio.write_csv(header, rows))
    out.emit("polys_sharp.csv", fio.write_csv(header, sharp), primary=False)


def cmd_lattice(args, out: Output) -> None:
    terms = lattice_expand(args.k, args.j)
    expected = catalan(args.j - args.k)
    out.emit(f"lattice_{args.k}_{args.j}.txt", "".join(f"{t}\n" for t in terms))
    summary = {"k": args.k, "j": args.j, "terms": len(terms), "catalan": expected,
               "match": len(terms) == expected}
    out.emit("lattice_summary.json", fio.dump_json(summary), primary=False)
    if len(terms) != expected:
        raise CliError(EXIT_NUMERIC, "catalan mismatch", f"{len(terms)} terms, expected {expected}")


def cmd_factor(args, out: Output) -> None:
    kernel = fio.load_kernel(args.input, args.precision)
    _check_kernel(kernel)
    theta, drift = spectral_factor(kernel, args.size)
    m = theta.size
    full = sc.float_array(theta.entries)
    gram = float(np.max(np.abs(full.conj().T @ full - sc.float_array(kernel.matrix()[:m, :m]))))
    rows = [(k, j, *fio.complex_columns(v)) for k, j, v in theta.csv_rows()]
    out.emit("theta.csv", fio.write_csv(("k", "j", "re", "im"), rows))
    report = {"size": m, "drift": drift, "gram_error": gram}
    out.emit("factor_report.json", fio.dump_json(report), primary=False)
    if out.dir is None:
        sys.stderr.write(json.dumps(report) + "\n")


def cmd_limits(args, out: Output) -> None:
    field = fio.load_gamma(args.input, args.precision)
    rows = []
    for r in range(args.rows):
        horizon = min(64 if args.horizon is None else args.horizon, field.size - 1 - r)
        rep = first_limit(field, r, horizon, tol=_tol(args))
        rows.extend(rep.csv_rows())
    n_max = args.size if args.size is not None else max(0, field.size // 2 - 1)
    strong_horizon = min(field.size - 1, n_max + 32)
    if n_max < strong_horizon:
        for rep in strong_limit(field, n_max, strong_horizon):
            rows.extend(rep.csv_rows())
    out.emit("limits.csv", fio.write_csv(("kind", "r", "n_or_q", "value", "estimate", "residual"), rows))


def cmd_tree(args, out: Output) -> None:
    field = fio.load_tree_field(args.input, args.precision)
    depth = args.depth
    kernel = stationary_kernel(field, depth, args.precision)
    rep = nc_limits(field, depth, args.precision)
    words = words_up_to(field.N, depth)
    kernel_rows = [(str(words[k]), str(words[j]), *fio.complex_columns(kernel[k, j]))
                   for k in range(kernel.size) for j in range(k, kernel.size)]
    report = {
        "N": field.N, "depth": depth, "words": len(words),
        "g": rep.g, "nominal_L": rep.nominal_L,
        "first": [{"tau": t, "ratio": v, "target": g} for t, v, g in rep.first],
        "strong": [{"tau": t, "ratio": v, "target": g} for t, v, g in rep.strong],
        "inverse_window": rep.window,
        "inverse_dev": [{"tau": t, "dev": d} for t, d in rep.inverse_dev],
    }
    out.emit("tree_report.json", fio.dump_json(report))
    out.emit("tree_kernel.csv", fio.write_csv(("sigma", "tau", "re", "im"), kernel_rows), primary=False)


def cmd_sweep(args, out: Output) -> None:
    rng = np.random.default_rng(args.seed)
    m = args.size or 12
    rows = []
    for i in range(args.count):
        mod = 0.9 * np.sqrt(rng.uniform(size=(m, m)))
        gam = np.triu(mod * np.exp(2j * np.pi * rng.uniform(size=(m, m))), 1)
        field = GammaField(rng.uniform(0.5, 2.0, m), gam)
        kernel = reconstruct_moments(field)
        back = extract_gamma(kernel)
        again = reconstruct_moments(back)
        rows.append((i, float(np.max(np.abs(back.gamma - field.gamma))),
                     float(np.max(np.abs(again.matrix() - kernel.matrix())))))
    out.emit("sweep.csv", fio.write_csv(("instance", "gamma_dev", "kernel_dev"), rows))


def cmd_demo(args, out: Output) -> None:
    exact = args.precision == "rational"
    if args.model == "hilbert":
        m = args.max + 1
        field = extract_gamma(hilbert_kernel(m, args.precision))
        rows = []
        for k in range(m):
            for l in range(1, m - k):
                g, d = field.gamma[k, k + l], field.dee(k, k + l)
                cg, cd = hilbert_gamma(k, l, exact)
                rows.append((k, l, g, d, cg, cd))
        out.emit("hilbert_gamma.csv", fio.write_csv(("k", "l", "gamma", "d", "closed_gamma", "closed_d"), rows))
    elif args.model == "legendre":
        n = args.degree
        table = build_polys(hilbert_gamma_field(n + 1, args.precision), max_degree=n, max_level=0)
        a, b = legendre_recurrence(n, exact)
        three = three_term_polys(a, b, n)
        rows = [(d, k, table.a[0, d, k], three[d][k]) for d in range(n + 1) for k in range(d + 1)]
        out.emit("legendre.csv", fio.write_csv(("n", "k", "recurrence", "three_term"), rows))
    else:
        alpha = sc.to_exact(args.alpha) if exact else float(args.alpha)
        kernel = toeplitz_kernel(ToeplitzSpec(1, (alpha,)), args.size, args.precision)
        rows = [(k, j, *fio.complex_columns(kernel[k, j])) for k in range(kernel.size) for j in range(k, kernel.size)]
        out.emit("toeplitz_kernel.csv", fio.write_csv(("k", "j", "re", "im"), rows))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", choices=sc.PRECISIONS, default="float64")
    common.add_argument("--size", type=int, default=None)
    common.add_argument("--depth", type=int, default=3)
    common.add_argument("--horizon", type=int, default=None)
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (default 1e-10 rational, 1e-8 float64)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, metavar="DIR")

    p = argparse.ArgumentParser(prog="szego", description="Schur parameters, orthogonal polynomials "
                                "and Szego-type limits for positive definite kernels.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, input_=None):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if input_:
            sp.add_argument("input", help=input_)
        sp.set_defaults(func=fn)
        return sp

    add("extract", cmd_extract, "kernel JSON -> parameter JSON", "kernel JSON file")
    add("reconstruct", cmd_reconstruct, "parameter JSON -> kernel JSON", "parameter JSON file")
    add("determinants", cmd_determinants, "table of D[r,q] as CSV", "kernel JSON file")
    sp = add("polys", cmd_polys, "polynomial coefficients as CSV", "parameter JSON file")
    sp.add_argument("--degree", type=int, default=None)
    sp.add_argument("--levels", type=int, default=None)
    sp = add("lattice", cmd_lattice, "lattice-path expansion of s[k,j]")
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--j", type=int, required=True)
    add("factor", cmd_factor, "spectral factor as CSV", "kernel JSON file")
    sp = add("limits", cmd_limits, "first and strong limit sequences as CSV", "parameter JSON file")
    sp.add_argument("--rows", type=int, default=1)
    add("tree", cmd_tree, "tree-stationary pipeline report", "tree field JSON file")
    sp = add("sweep", cmd_sweep, "seeded random round-trip sweep")
    sp.add_argument("--count", type=int, default=10)
    sp = add("demo", cmd_demo, "worked classical examples")
    sp.add_argument("model", choices=("hilbert", "legendre", "toeplitz"))
    sp.add_argument("--max", type=int, default=8)
    sp.add_argument("--degree", type=int, default=4)
    sp.add_argument("--alpha", default="0.5")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "demo" and args.model == "toeplitz" and args.size is None:
        args.size = 10
    try:
        args.func(args, Output(args.out))
    except CliError as exc:
        return _fail(exc.status, exc.kind, str(exc), **exc.extra)
    except KernelError as exc:
        return _fail(EXIT_NUMERIC, "not strictly positive", str(exc), section=exc.section)
    except (ZeroDivisionError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, "numerical failure", str(exc))
    except (ValueError, IndexError, TypeError, OSError) as exc:
        return _fail(EXIT_INVALID, "invalid input", str(exc))
    return EXIT_OK


def _fail(status: int, kind: str, message: str, **extra) -> int:
    err = {"error": kind, "message": message, "status": status}
    err.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in extra.items()})
    sys.stderr.write(json.dumps(err) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
