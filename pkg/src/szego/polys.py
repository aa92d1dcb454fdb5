"""Two-parameter orthonormal polynomial families phi_n(X, l) and their reversed companions.

``phi_n(., l)`` is the degree-``n`` orthonormal polynomial of the level-shifted
kernel ``s[a + l, b + l]``.  Inner products follow ``<F_b, F_a> = s[a, b]``,
so a coefficient matrix ``A`` (rows = polynomials) is orthonormal when
``conj(A) @ S @ A.T == I``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np
import sympy

from . import _scalar as sc
from .kernel import KernelError, MomentKernel
from .schur import GammaField


@dataclass(frozen=True, eq=False)
class PolyTable:
    """Coefficients ``a[l, n, k]`` of phi_n(X, l) and ``b[l, n, k]`` of phi_n^#(X, l).

    Entries exist for ``l + n < size``.  Tables built from a kernel by
    Gram-Schmidt carry no reversed family (``b is None``).
    """

    a: np.ndarray
    b: np.ndarray | None
    size: int

    @property
    def exact(self) -> bool:
        return self.a.dtype == object

    def covers(self, n: int, l: int) -> bool:
        return n >= 0 and l >= 0 and l + n < self.size

    def _check(self, n: int, l: int) -> None:
        if not self.covers(n, l):
            raise IndexError(f"table of size {self.size} does not cover degree {n} at level {l}")

    def phi(self, n: int, l: int = 0) -> np.ndarray:
        self._check(n, l)
        return self.a[l, n, :n + 1]

    def phi_sharp(self, n: int, l: int = 0) -> np.ndarray:
        if self.b is None:
            raise ValueError("this table has no reversed polynomials")
        self._check(n, l)
        return self.b[l, n, :n + 1]

    def leading(self, n: int, l: int = 0):
        self._check(n, l)
        return self.a[l, n, n]

    def coefficient_matrix(self, l: int = 0) -> np.ndarray:
        """Rows ``phi_0(., l) .. phi_{size-1-l}(., l)``, zero-padded (lower triangular)."""
        m = self.size - l
        return self.a[l, :m, :m]


def _empty(size: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((size, size, size), dtype=object)
        out[...] = sympy.Integer(0)
        return out
    return np.zeros((size, size, size), dtype=np.complex128)


def _finish(a: np.ndarray) -> np.ndarray:
    if a.dtype != object and not np.any(np.imag(a)):
        return np.real(a).copy()
    return a


def build_polys(field: GammaField, max_degree: int | None = None,
                max_level: int | None = None) -> PolyTable:
    """Run the two-term recurrences

    ``phi_n(X,l)  = (X phi_{n-1}(X,l+1) - g[l,n+l] phi^#_{n-1}(X,l)) / d[l,n+l]``
    ``phi^#_n(X,l) = (-conj(g[l,n+l]) X phi_{n-1}(X,l+1) + phi^#_{n-1}(X,l)) / d[l,n+l]``

    from ``phi_0 = phi^#_0 = s[l,l]^(-1/2)``.  Level ``l`` at degree ``n``
    consumes parameters up to index ``l + n``, so the table covers every
    ``l + n < max_degree + max_level + 1``.
    """
    if max_degree is None and max_level is None:
        size = field.size
    else:
        max_degree = field.size - 1 if max_degree is None else max_degree
        max_level = 0 if max_level is None else max_level
        size = max_degree + max_level + 1
        if size > field.size:
            raise ValueError(f"recurrence needs parameters (l, n+l) up to index {size - 1}; "
                             f"field has only {field.size} indices")
    exact = field.exact
    a, b = _empty(size, exact), _empty(size, exact)
    for l in range(size):
        a[l, 0, 0] = b[l, 0, 0] = 1 / sc.sqrt(field.diag[l])
    for n in range(1, size):
        lv = np.arange(size - n)
        g = field.gamma[lv, lv + n][:, None]
        d = field.dee_matrix()[lv, lv + n][:, None]
        xp = np.zeros_like(a[lv, n, :])
        if exact:
            xp[...] = sympy.Integer(0)
        xp[:, 1:n + 1] = a[lv + 1, n - 1, :n]
        prev = b[lv, n - 1, :]
        a[lv, n, :] = (xp - g * prev) / d
        b[lv, n, :] = (-sc.conj_array(g) * xp + prev) / d
        if exact:
            a[lv, n, :] = sc.tidy(a[lv, n, :])
            b[lv, n, :] = sc.tidy(b[lv, n, :])
    return PolyTable(_finish(a), _finish(b), size)


def orthonormal_table(kernel: MomentKernel) -> PolyTable:
    """Gram-Schmidt on every level-shifted section, via a triangular factorisation.

    Float kernels use a Cholesky factor ``S = L L^H`` (then ``A = conj(L^-1)``);
    exact kernels use the square-root-free ``S = L D L^H`` so that only the
    final normalisation introduces surds.
    """
    m = kernel.size
    exact = kernel.exact
    a = _empty(m, exact)
    full = kernel.matrix()
    for l in range(m):
        s = full[l:, l:]
        if exact:
            coeffs = _exact_gram_schmidt(s, offset=l)
        else:
            try:
                chol = np.linalg.cholesky(s)
            except np.linalg.LinAlgError:
                raise KernelError(f"not strictly positive: section {l}..{m - 1} is not positive definite",
                                  (l, m - 1)) from None
            coeffs = np.conj(np.linalg.inv(chol))
        a[l, :m - l, :m - l] = coeffs
    return PolyTable(_finish(a), None, m)


def _exact_gram_schmidt(s: np.ndarray, offset: int = 0) -> np.ndarray:
    n = s.shape[0]
    pivots = sc.leading_pivots(s)
    if len(pivots) < n or not bool(sympy.re(pivots[-1]) > 0):
        bad = len(pivots) - 1
        raise KernelError(f"not strictly positive: section {offset}..{offset + bad} is singular or indefinite",
                          (offset, offset + bad))
    fr = [sc.as_fraction(x) for x in s.ravel()]
    rational = all(f is not None for f in fr)
    if rational:
        work = [fr[i * n:(i + 1) * n] for i in range(n)]
        zero, one = Fraction(0), Fraction(1)
        conj, clean = (lambda x: x), (lambda x: x)
    else:
        work = [[s[i, j] for j in range(n)] for i in range(n)]
        zero, one = sympy.Integer(0), sympy.Integer(1)
        conj, clean = sympy.conjugate, sympy.expand
    # S = L D L^H with unit lower L, then A = conj(L^-1) / sqrt(D)
    lower = [[one if i == j else zero for j in range(n)] for i in range(n)]
    dvals = []
    for j in range(n):
        dj = clean(work[j][j] - sum((lower[j][k] * conj(lower[j][k]) * dvals[k] for k in range(j)), zero))
        dvals.append(dj)
        for i in range(j + 1, n):
            v = work[i][j] - sum((lower[i][k] * conj(lower[j][k]) * dvals[k] for k in range(j)), zero)
            lower[i][j] = clean(v / dj)
    inv = [[zero] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = one
        for i in range(j + 1, n):
            inv[i][j] = clean(-sum((lower[i][k] * inv[k][j] for k in range(j, i)), zero))
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        scale = 1 / sympy.sqrt(sc.to_exact(dvals[i]))
        for j in range(n):
            out[i, j] = sympy.expand(sympy.conjugate(sc.to_exact(inv[i][j])) * scale)
    return out


def poly_by_determinant(kernel: MomentKernel, n: int, l: int = 0) -> np.ndarray:
    """Coefficients of phi_n(., l) straight from the kernel.

    Exact kernels with ``n <= 5`` expand the bordered determinant along its
    last row (cofactors over ``sqrt(D[n-1] D[n])``); otherwise this is a
    modified Gram-Schmidt pass over the monomials of the shifted section.
    """
    if l + n >= kernel.size:
        raise IndexError(f"kernel of size {kernel.size} does not reach degree {n} at level {l}")
    s = kernel.matrix()[l:l + n + 1, l:l + n + 1]
    if kernel.exact:
        if n == 0:
            return np.array([1 / sympy.sqrt(s[0, 0])], dtype=object)
        if n <= 5:
            return _bordered(s, n, l)
        return _exact_gram_schmidt(s, offset=l)[n, :]
    return _modified_gram_schmidt(s, l)[n, :]


def _bordered(s: np.ndarray, n: int, l: int) -> np.ndarray:
    mat = sympy.Matrix(s.tolist())
    d_prev = mat[:n, :n].det(method="bareiss")
    d_cur = mat.det(method="bareiss")
    if not (bool(sympy.re(d_prev) > 0) and bool(sympy.re(d_cur) > 0)):
        raise KernelError(f"singular section {l}..{l + n}", (l, l + n))
    top = mat[:n, :]
    norm = 1 / sympy.sqrt(d_prev * d_cur)
    out = np.empty(n + 1, dtype=object)
    for k in range(n + 1):
        minor = top[:, [c for c in range(n + 1) if c != k]]
        out[k] = sympy.expand((-1) ** (n + k) * minor.det(method="bareiss") * norm)
    return out


def _modified_gram_schmidt(s: np.ndarray, l: int) -> np.ndarray:
    m = s.shape[0]

    def inner(p, q):
        return np.conj(q) @ s @ p

    basis = np.eye(m, dtype=np.complex128)
    out = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        v = basis[i].copy()
        for _ in range(2):  # reorthogonalise once
            for j in range(i):
                v = v - inner(v, out[j]) * out[j]
        nrm2 = np.real(inner(v, v))
        if not nrm2 > 0:
            raise KernelError(f"singular section {l}..{l + i}", (l, l + i))
        v = v / np.sqrt(nrm2)
        out[i] = v * (abs(v[i]) / v[i])  # positive leading coefficient
    return out if np.any(np.imag(out)) else np.real(out)


def derivative(p, k: int = 1) -> np.ndarray:
    """Formal ``k``-th derivative of a coefficient vector (lowest power first)."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    p = np.asarray(p)
    if k == 0:
        return p.copy()
    if k >= len(p):
        return np.zeros(1, dtype=p.dtype)
    factors = [math.perm(m, k) for m in range(k, len(p))]
    if p.dtype == object:
        return np.array([c * f for c, f in zip(p[k:], factors)], dtype=object)
    return p[k:] * np.array(factors, dtype=float)


def evaluate(p, x):
    """Horner evaluation of a coefficient vector (lowest power first)."""
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def phi_sharp_at_zero(field: GammaField, n: int, l: int = 0):
    """``phi^#_n(0, l) = s[l,l]^(-1/2) prod_{p=1..n} 1/d[l, p+l]``."""
    if l + n >= field.size:
        raise IndexError(f"field of size {field.size} has no parameter ({l}, {l + n})")
    val = 1 / sc.sqrt(field.diag[l])
    for p in range(1, n + 1):
        val = val / field.dee(l, l + p)
    return sc.simplify(val)


def recover_gamma(table: PolyTable, diag) -> GammaField:
    """Read the parameters back off an orthonormal table.

    ``gamma[l, n+l] = -s[l,l]^(1/2) s[l+1,l+1]^(-1/2) phi_n(0,l)
    (k^{l+1}_1 ... k^{l+1}_{n-1}) / (k^l_1 ... k^l_n)`` with ``k^l_n`` the
    leading coefficient of phi_n(., l).
    """
    m = table.size
    diag = list(diag)
    if len(diag) < m:
        raise ValueError(f"need {m} diagonal weights, got {len(diag)}")
    exact = table.exact
    gamma = np.empty((m, m), dtype=object) if exact else np.zeros((m, m), dtype=np.complex128)
    if exact:
        gamma[...] = sympy.Integer(0)
    lead = np.array([[table.a[l, n, n] if l + n < m else 1 for n in range(m)] for l in range(m)],
                    dtype=object if exact else np.complex128)
    if exact:
        zero = any(lead[l, n] == 0 for l in range(m) for n in range(m - l))
    else:
        zero = np.any(lead == 0)
    if zero:
        raise ValueError("zero leading coefficient: table is not orthonormal")
    for l in range(m - 1):
        pref = sc.sqrt(diag[l]) / sc.sqrt(diag[l + 1])
        num = 1  # k^{l+1}_1 .. k^{l+1}_{n-1}
        den = 1  # k^l_1 .. k^l_n
        for n in range(1, m - l):
            den = den * lead[l, n]
            if n > 1:
                num = num * lead[l + 1, n - 1]
            g = -pref * table.a[l, n, 0] * num / den
            gamma[l, l + n] = sympy.expand(g) if exact else g
    if not exact:
        gamma = sc.numeric_array(gamma)
        dvals = np.array([np.real(x) for x in diag], dtype=float)
        return GammaField(dvals, gamma)
    return GammaField(sc.exact_array(diag), gamma)
