"""Scalar plumbing shared by the float64 and exact code paths.

Exact values are sympy numbers: rationals stay rational and square roots of
rationals become canonical surds.  Arrays that hold exact values have
``dtype=object``; everything else is float64 or complex128.
"""
from __future__ import annotations

import re
from fractions import Fraction

import numpy as np
import sympy

PRECISIONS = ("float64", "rational")

_EXPR_CHARS = re.compile(r"^[0-9eEIsqrt+\-*/(). ]+$")


def check_precision(precision: str) -> str:
    if precision not in PRECISIONS:
        raise ValueError(f"unknown precision {precision!r}; expected one of {PRECISIONS}")
    return precision


def to_exact(x) -> sympy.Expr:
    """Convert a Python/numpy/sympy number (or numeric string) to an exact sympy value.

    Floats are converted to the exact binary value they hold, so ``0.5`` maps
    to ``1/2`` but ``0.1`` does not map to ``1/10``; pass ``"1/10"`` for that.
    """
    if isinstance(x, sympy.Basic):
        return x
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    if isinstance(x, (bool, np.bool_)):
        return sympy.Integer(int(x))
    if isinstance(x, (int, np.integer)):
        return sympy.Integer(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return to_exact(z.real) + sympy.I * to_exact(z.imag)
    if isinstance(x, (float, np.floating)):
        return sympy.Rational(float(x))
    if isinstance(x, str):
        return parse_exact(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact value")


def parse_exact(text: str) -> sympy.Expr:
    text = text.strip()
    try:
        return sympy.Rational(text)
    except (TypeError, ValueError):
        pass
    if not _EXPR_CHARS.match(text):
        raise ValueError(f"not an exact numeric literal: {text!r}")
    return sympy.nsimplify(sympy.sympify(text, rational=True))


def to_number(x) -> complex | float:
    """Inverse of :func:`to_exact`: a float, or a complex when the imaginary part is nonzero."""
    if isinstance(x, sympy.Basic):
        z = complex(sympy.N(x, 30))
    else:
        z = complex(x)
    return z.real if z.imag == 0 else z


def is_exact(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return isinstance(a, (sympy.Basic, Fraction))


def exact_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = to_exact(a[idx])
    return out


def float_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype != object:
        return a.astype(np.complex128) if np.iscomplexobj(a) else a.astype(np.float64)
    vals = [to_number(x) for x in a.ravel()]
    dtype = np.complex128 if any(isinstance(v, complex) for v in vals) else np.float64
    return np.array(vals, dtype=dtype).reshape(a.shape)


def numeric_array(values) -> np.ndarray:
    """Array of plain numbers, real dtype unless some entry is genuinely complex."""
    a = np.asarray(values)
    if a.dtype == object:
        return exact_array(a)
    if np.iscomplexobj(a) and not np.any(np.imag(a)):
        return np.real(a).astype(np.float64)
    return a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)


def simplify(x):
    if isinstance(x, sympy.Basic):
        return sympy.expand(x)
    return x


simplify_array = np.frompyfunc(simplify, 1, 1)


def tidy(a: np.ndarray) -> np.ndarray:
    """Expand every entry of an exact array; no-op for numeric arrays."""
    if a.dtype == object:
        return simplify_array(a).astype(object)
    return a


def sqrt(x):
    if isinstance(x, sympy.Basic):
        return sympy.sqrt(x)
    return np.sqrt(x)


def conj(x):
    if isinstance(x, sympy.Basic):
        return sympy.conjugate(x)
    return np.conj(x)


def conj_array(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.frompyfunc(conj, 1, 1)(a).astype(object)
    return np.conj(a)


def abs2(x):
    if isinstance(x, sympy.Basic):
        return sympy.expand(x * sympy.conjugate(x))
    return abs(x) ** 2


def real(x):
    if isinstance(x, sympy.Basic):
        return sympy.re(x)
    return np.real(x)


def exact_equal(a, b) -> bool:
    diff = sympy.expand(to_exact(a) - to_exact(b))
    if diff == 0:
        return True
    diff = sympy.radsimp(diff)
    if diff == 0:
        return True
    return bool(diff.equals(0))


def as_fraction(x):
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, sympy.Basic):
        return None
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return None


def leading_pivots(mat: np.ndarray):
    """Pivots of Gaussian elimination without row exchanges.

    The product of the first ``n + 1`` pivots is the ``n``-th leading principal
    minor.  Elimination stops after the first pivot that is zero (or not
    positive on the real axis); the returned list then ends with that pivot.
    """
    n = mat.shape[0]
    if mat.dtype == object:
        fr = [as_fraction(x) for x in mat.ravel()]
        if all(f is not None for f in fr):
            work = [fr[i * n:(i + 1) * n] for i in range(n)]
            exact_kind = "fraction"
        else:
            work = [[mat[i, j] for j in range(n)] for i in range(n)]
            exact_kind = "sympy"
    else:
        work = np.array(mat, dtype=np.complex128 if np.iscomplexobj(mat) else np.float64)
        exact_kind = None
    pivots = []
    for i in range(n):
        p = work[i][i]
        if exact_kind == "sympy":
            p = sympy.nsimplify(sympy.expand(p)) if p.is_number else p
        pivots.append(p)
        if _not_positive(p):
            break
        for r in range(i + 1, n):
            f = work[r][i] / p
            if exact_kind is None:
                work[r, i:] = work[r, i:] - f * work[i, i:]
            else:
                for c in range(i, n):
                    work[r][c] = work[r][c] - f * work[i][c]
                    if exact_kind == "sympy":
                        work[r][c] = sympy.expand(work[r][c])
    return [_pivot_out(p) for p in pivots]


def _pivot_out(p):
    if isinstance(p, Fraction):
        return sympy.Rational(p.numerator, p.denominator)
    if isinstance(p, (complex, np.complexfloating)):
        return float(np.real(p))
    return p


def _not_positive(p) -> bool:
    if isinstance(p, sympy.Basic):
        return not bool(sympy.re(p) > 0)
    if isinstance(p, Fraction):
        return p <= 0
    return not (np.real(p) > 0)


def det(mat: np.ndarray):
    """Determinant; exact for object arrays, float64 otherwise."""
    n = mat.shape[0]
    if n == 0:
        return sympy.Integer(1) if mat.dtype == object else 1.0
    if mat.dtype != object:
        val = np.linalg.det(mat)
        return float(np.real(val)) if abs(np.imag(val)) <= 1e-12 * max(1.0, abs(val)) else complex(val)
    fr = [as_fraction(x) for x in mat.ravel()]
    if all(f is not None for f in fr):
        return sympy.Rational(*_fraction_det([fr[i * n:(i + 1) * n] for i in range(n)]).as_integer_ratio())
    return sympy.expand(sympy.Matrix(mat.tolist()).det(method="berkowitz"))


def _fraction_det(rows) -> Fraction:
    rows = [list(r) for r in rows]
    n = len(rows)
    sign = 1
    acc = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if rows[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            rows[i], rows[piv] = rows[piv], rows[i]
            sign = -sign
        p = rows[i][i]
        acc *= p
        for r in range(i + 1, n):
            f = rows[r][i] / p
            if f:
                for c in range(i, n):
                    rows[r][c] -= f * rows[i][c]
    return sign * acc
