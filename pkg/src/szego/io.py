"""JSON and CSV formats for kernels, parameter fields, tree fields and tables.

Numbers are written as JSON floats in float64 mode and as strings such as
``"1/3"`` or ``"sqrt(3)/2"`` in rational mode.  CSV files are UTF-8 with a
header row and LF line endings.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import sympy

from . import _scalar as sc
from .free_semigroup import TreeGammaField, Word
from .kernel import MomentKernel
from .schur import GammaField


class FormatError(ValueError):
    """Input does not match the expected schema."""


def _read_value(v, precision: str):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise FormatError(f"expected a number or numeric string, got {v!r}")
    if precision == "rational":
        return sc.to_exact(v)
    if isinstance(v, str):
        try:
            return float(sc.to_number(sc.parse_exact(v)))
        except (ValueError, TypeError) as exc:
            raise FormatError(str(exc)) from None
    return float(v)


def _complex(re, im, precision: str):
    a, b = _read_value(re, precision), _read_value(im, precision)
    if precision == "rational":
        return sympy.expand(a + sympy.I * b) if b != 0 else a
    return complex(a, b) if b != 0 else a


def _write_value(x):
    if isinstance(x, sympy.Basic):
        return str(x)
    return float(x)


def _split(x):
    re, im = complex_columns(x)
    return _write_value(re), _write_value(im)


def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text(encoding="utf-8") if not hasattr(source, "read") else source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("top-level JSON value must be an object")
    return data


def _zeros(precision: str, shape) -> np.ndarray:
    if precision == "rational":
        out = np.empty(shape, dtype=object)
        out[...] = sympy.Integer(0)
        return out
    return np.zeros(shape, dtype=complex)


def _quadruples(rows, name: str):
    if not isinstance(rows, list):
        raise FormatError(f"'{name}' must be a list of [k, j, re, im]")
    for row in rows:
        if not (isinstance(row, list) and len(row) == 4 and all(isinstance(i, int) for i in row[:2])):
            raise FormatError(f"malformed {name} entry {row!r}; expected [k, j, re, im]")
        yield row


def load_kernel(source, precision: str = "float64") -> MomentKernel:
    """``{"size": M, "entries": [[k, j, re, im], ...]}`` with every pair ``k <= j < M`` exactly once."""
    sc.check_precision(precision)
    data = _load_json(source)
    size = data.get("size")
    if not isinstance(size, int) or size < 1:
        raise FormatError("'size' must be a positive integer")
    mat = _zeros(precision, (size, size))
    seen = set()
    for k, j, re, im in _quadruples(data.get("entries"), "entries"):
        if k > j:
            raise FormatError(f"entry ({k}, {j}) is below the diagonal; store only k <= j")
        if not 0 <= k <= j < size:
            raise FormatError(f"entry ({k}, {j}) outside 0..{size - 1}")
        if (k, j) in seen:
            raise FormatError(f"duplicate entry ({k}, {j})")
        seen.add((k, j))
        mat[k, j] = _complex(re, im, precision)
    missing = [(k, j) for k in range(size) for j in range(k, size) if (k, j) not in seen]
    if missing:
        raise FormatError(f"missing entries, first {missing[0]} ({len(missing)} total)")
    alphabet = data.get("alphabet")
    return MomentKernel(mat if precision == "rational" else sc.numeric_array(mat), alphabet)


def kernel_to_json(kernel: MomentKernel) -> dict:
    m = kernel.size
    entries = [[k, j, *_split(kernel[k, j])] for k in range(m) for j in range(k, m)]
    out = {"size": m, "entries": entries}
    if kernel.alphabet is not None:
        out["alphabet"] = kernel.alphabet
    return out


def load_gamma(source, precision: str = "float64") -> GammaField:
    """``{"diag": [...], "gamma": [[k, j, re, im], ...]}``; unlisted pairs are zero."""
    sc.check_precision(precision)
    data = _load_json(source)
    diag = data.get("diag")
    if not isinstance(diag, list) or not diag:
        raise FormatError("'diag' must be a nonempty list")
    m = len(diag)
    dvals = [_read_value(v, precision) for v in diag]
    gam = _zeros(precision, (m, m))
    seen = set()
    for k, j, re, im in _quadruples(data.get("gamma", []), "gamma"):
        if not 0 <= k < j < m:
            raise FormatError(f"parameter ({k}, {j}) must satisfy 0 <= k < j < {m}")
        if (k, j) in seen:
            raise FormatError(f"duplicate parameter ({k}, {j})")
        seen.add((k, j))
        gam[k, j] = _complex(re, im, precision)
    if precision == "rational":
        return GammaField(sc.exact_array(dvals), gam)
    return GammaField(np.array(dvals, dtype=float), sc.numeric_array(gam))


def gamma_to_json(field: GammaField) -> dict:
    return {
        "diag": [_write_value(sc.real(d)) for d in field.diag],
        "gamma": [[k, j, *_split(field.gamma[k, j])] for k, j in field.pairs()],
    }


def load_tree_field(source, precision: str = "float64") -> TreeGammaField:
    """``{"N": 2, "gamma": [["1", re, im], ...]}``."""
    sc.check_precision(precision)
    data = _load_json(source)
    N = data.get("N")
    if not isinstance(N, int) or N < 1:
        raise FormatError("'N' must be a positive integer")
    gam = {}
    rows = data.get("gamma", [])
    if not isinstance(rows, list):
        raise FormatError("'gamma' must be a list of [word, re, im]")
    for row in rows:
        if not (isinstance(row, list) and len(row) == 3 and isinstance(row[0], str)):
            raise FormatError(f"malformed tree entry {row!r}; expected [word, re, im]")
        try:
            w = Word.parse(row[0], N)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        if not w.letters:
            raise FormatError("the empty word carries no parameter")
        if w.letters in gam:
            raise FormatError(f"duplicate word {row[0]!r}")
        gam[w.letters] = _complex(row[1], row[2], precision)
    return TreeGammaField(N, gam)


def tree_field_to_json(field: TreeGammaField) -> dict:
    rows = sorted(field.gamma.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return {"N": field.N, "gamma": [["".join(map(str, w)), *_split(g)] for w, g in rows]}


def dump_json(data, path=None) -> str:
    text = json.dumps(data, indent=1, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, sympy.Basic):
        return str(x)
    return str(x)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_cell(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def complex_columns(x) -> tuple:
    """``(re, im)`` cells, exact strings for exact values."""
    if isinstance(x, sympy.Basic):
        return sympy.re(x), sympy.im(x)
    z = complex(x)
    return z.real, z.imag
