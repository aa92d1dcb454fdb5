"""Schur-type parameters of strictly positive kernels.

A strictly positive kernel on ``0..M-1`` is coordinatised by its diagonal
``s[k,k] > 0`` and one parameter ``gamma[k,j]`` in the open unit disk for each
pair ``k < j``.  Moments are rebuilt from the parameters as the ``(1,1)``
entry of a product of 2x2 unitary rotations; the additive terms of that
entry are lattice paths, counted by Catalan numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterator

import numpy as np
import sympy

from . import _scalar as sc
from .kernel import MomentKernel

LATTICE_MAX_ORDER = 8


@dataclass(frozen=True, eq=False)
class GammaField:
    """Diagonal weights plus parameters ``gamma[k, j]`` for ``k < j`` (entries on or below the diagonal are ignored)."""

    diag: np.ndarray
    gamma: np.ndarray
    _dee: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        diag = np.asarray(self.diag)
        gamma = np.asarray(self.gamma)
        exact = diag.dtype == object or gamma.dtype == object
        if exact:
            diag, gamma = sc.exact_array(diag), sc.exact_array(gamma)
        else:
            diag, gamma = sc.numeric_array(diag), sc.numeric_array(gamma)
        m = diag.shape[0]
        if gamma.shape != (m, m):
            raise ValueError(f"gamma must have shape {(m, m)}, got {gamma.shape}")
        upper = np.triu(np.ones((m, m), dtype=bool), 1)
        gamma = np.where(upper, gamma, sc.to_exact(0) if exact else 0)
        if exact:
            gamma = gamma.astype(object)
        dee = np.ones((m, m), dtype=object if exact else np.float64)
        for k in range(m):
            if not _positive_real(diag[k]):
                raise ValueError(f"diagonal weight s[{k},{k}] must be real and positive")
        if exact:
            for k in range(m):
                for j in range(k + 1, m):
                    a2 = sc.abs2(gamma[k, j])
                    if not bool(a2 < 1):
                        raise ValueError(f"|gamma[{k},{j}]| must be < 1")
                    dee[k, j] = sympy.sqrt(1 - a2)
        else:
            mod = np.abs(gamma)
            if np.any(mod[upper] >= 1) or not np.all(np.isfinite(mod)):
                k, j = map(int, np.argwhere(upper & ~(mod < 1))[0])
                raise ValueError(f"|gamma[{k},{j}]| must be < 1")
            dee = np.where(upper, np.sqrt(1.0 - mod ** 2), 1.0)
        for a in (diag, gamma, dee):
            a.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "_dee", dee)

    @classmethod
    def from_function(cls, gamma: Callable[[int, int], object], size: int,
                      diag: object | Callable[[int], object] = 1.0,
                      precision: str = "float64") -> "GammaField":
        sc.check_precision(precision)
        dvals = [diag(k) if callable(diag) else diag for k in range(size)]
        gvals = [[gamma(k, j) if k < j else 0 for j in range(size)] for k in range(size)]
        if precision == "rational":
            return cls(sc.exact_array(dvals), sc.exact_array(gvals))
        return cls(np.array(dvals), np.array(gvals))

    @classmethod
    def zeros(cls, size: int, diag: object = 1.0) -> "GammaField":
        return cls(np.full(size, diag, dtype=float), np.zeros((size, size)))

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    @property
    def exact(self) -> bool:
        return self.gamma.dtype == object

    def dee(self, k: int, j: int):
        return self._dee[k, j]

    def dee_matrix(self) -> np.ndarray:
        return self._dee

    def truncate(self, size: int) -> "GammaField":
        if size > self.size:
            raise ValueError(f"field has only {self.size} indices, {size} requested")
        return GammaField(self.diag[:size], self.gamma[:size, :size])

    def section(self, r: int, q: int) -> "GammaField":
        """Parameters of the sub-kernel on indices ``r..q``, re-indexed from 0."""
        return GammaField(self.diag[r:q + 1], self.gamma[r:q + 1, r:q + 1])

    def to_exact(self) -> "GammaField":
        return self if self.exact else GammaField(sc.exact_array(self.diag), sc.exact_array(self.gamma))

    def to_float(self) -> "GammaField":
        if not self.exact:
            return self
        return GammaField(sc.float_array(self.diag), sc.float_array(self.gamma))

    def pairs(self) -> Iterator[tuple[int, int]]:
        m = self.size
        for k in range(m):
            for j in range(k + 1, m):
                yield k, j


def _positive_real(x) -> bool:
    if isinstance(x, sympy.Basic):
        return bool(sympy.im(x) == 0) and bool(x > 0)
    return np.isreal(x) and np.real(x) > 0


def rotation_factors(k: int, j: int) -> list[tuple[int, int, int]]:
    """Factors of ``U[k, j]`` as ``(r, c, pos)`` with 0-based block rows ``pos, pos+1``.

    Pairs ``k <= r < c <= j`` in lexicographic order, each acting at position
    ``c - r`` (1-based).
    """
    if not k < j:
        raise ValueError(f"need k < j, got ({k}, {j})")
    return [(r, c, c - r - 1) for r in range(k, j) for c in range(r + 1, j + 1)]


def rotation_block(field: GammaField, r: int, c: int) -> np.ndarray:
    g, d = field.gamma[r, c], field.dee(r, c)
    return np.array([[g, d], [d, -sc.conj(g)]], dtype=object if field.exact else np.result_type(g, d))


def rotation_product(field: GammaField, k: int, j: int) -> np.ndarray:
    """The unitary ``U[k, j]`` of side ``j - k + 1``; ``s[k,j] = sqrt(s[k,k] s[j,j]) U[k,j][0,0]``."""
    n = j - k + 1
    exact = field.exact
    dtype = object if exact else np.complex128
    u = np.eye(n, dtype=dtype) if not exact else sc.exact_array(np.eye(n, dtype=int))
    for r, c, p in rotation_factors(k, j):
        blk = np.eye(n, dtype=dtype) if not exact else sc.exact_array(np.eye(n, dtype=int))
        blk[p:p + 2, p:p + 2] = rotation_block(field, r, c)
        u = sc.tidy(u.dot(blk))
    return u


def _first_entries(field: GammaField, size: int) -> np.ndarray:
    """``U[k, j][0, 0]`` for all ``k < j < size``, vectorised along each superdiagonal."""
    exact = field.exact
    out = np.zeros((size, size), dtype=object if exact else np.complex128)
    g, dee = field.gamma, field.dee_matrix()
    for l in range(1, size):
        count = size - l
        v = np.zeros((count, l + 1), dtype=out.dtype)
        if exact:
            v[:] = sc.to_exact(0)
        v[:, 0] = 1
        base = np.arange(count)
        for a in range(l):
            for b in range(a + 1, l + 1):
                p = b - a - 1
                gv = g[base + a, base + b]
                dv = dee[base + a, base + b]
                x, y = v[:, p].copy(), v[:, p + 1].copy()
                v[:, p] = x * gv + y * dv
                v[:, p + 1] = x * dv - y * sc.conj_array(gv)
                if exact:
                    v[:, p:p + 2] = sc.tidy(v[:, p:p + 2])
        out[base, base + l] = v[:, 0]
    return out


def reconstruct_moments(field: GammaField, size: int | None = None) -> MomentKernel:
    """Rebuild ``s[k, j] = s[k,k]^(1/2) U[k,j][0,0] s[j,j]^(1/2)`` from the parameters."""
    m = field.size if size is None else size
    if m > field.size:
        raise ValueError(f"field defines {field.size} indices, {m} requested")
    first = _first_entries(field, m)
    root = np.array([sc.sqrt(field.diag[k]) for k in range(m)],
                    dtype=object if field.exact else np.float64)
    upper = root[:, None] * first * root[None, :]
    for k in range(m):
        upper[k, k] = field.diag[k]
    if field.exact:
        upper = sc.tidy(upper)
    else:
        upper = sc.numeric_array(upper)
    return MomentKernel(upper)


def extract_gamma(kernel: MomentKernel, precision: str | None = None) -> GammaField:
    """Parameters of a strictly positive kernel.

    Runs Gram-Schmidt on every level-shifted section ``s[a + l, b + l]`` and
    reads the parameters off the constant terms and leading coefficients of
    the resulting orthonormal polynomials.
    """
    from .polys import orthonormal_table, recover_gamma

    k = kernel.with_precision(precision)
    table = orthonormal_table(k)
    return recover_gamma(table, [k[i, i] for i in range(k.size)])


@dataclass(frozen=True)
class LatticeTerm:
    """One additive term of ``U[k,j][0,0]``: a sign and an ordered list of symbols.

    Symbols are ``("g", a, b)`` for gamma, ``("gbar", a, b)`` for its
    conjugate and ``("d", a, b)`` for ``sqrt(1 - |gamma|^2)``.  The minus sign
    of each ``-conj(gamma)`` entry is carried by ``sign``.
    """

    sign: int
    factors: tuple[tuple[str, int, int], ...]

    def __str__(self) -> str:
        body = " ".join(f"{s}({a},{b})" for s, a, b in self.factors)
        return f"{'+' if self.sign > 0 else '-'} {body}"

    @classmethod
    def parse(cls, text: str) -> "LatticeTerm":
        text = text.strip().replace("−", "-")
        sign_char, _, body = text.partition(" ")
        if sign_char not in "+-" or not body:
            raise ValueError(f"malformed lattice term {text!r}")
        factors = []
        for tok in body.split():
            name, _, rest = tok.partition("(")
            a, b = rest.rstrip(")").split(",")
            if name not in ("g", "gbar", "d"):
                raise ValueError(f"unknown symbol {name!r} in {text!r}")
            factors.append((name, int(a), int(b)))
        return cls(1 if sign_char == "+" else -1, tuple(factors))

    def evaluate(self, field: GammaField):
        val = self.sign
        for name, a, b in self.factors:
            if name == "g":
                val = val * field.gamma[a, b]
            elif name == "gbar":
                val = val * sc.conj(field.gamma[a, b])
            else:
                val = val * field.dee(a, b)
        return val


def lattice_expand(k: int, j: int) -> list[LatticeTerm]:
    """Every structurally nonzero path through the rotation factors of ``U[k, j]``.

    Gamma symbols are treated as formally nonzero, so the count depends only
    on ``j - k``; it equals ``catalan(j - k)``.  Terms are not deduplicated.
    """
    l = j - k
    if l < 1:
        raise ValueError(f"need k < j, got ({k}, {j})")
    if l > LATTICE_MAX_ORDER:
        raise ValueError(f"order {l} exceeds the enumeration bound {LATTICE_MAX_ORDER}")
    factors = rotation_factors(k, j)

    # viable[t]: states at step t from which state 0 is reachable at the end
    viable = [set() for _ in range(len(factors) + 1)]
    viable[-1] = {0}
    for t in range(len(factors) - 1, -1, -1):
        p = factors[t][2]
        for i in range(l + 1):
            if any(nxt in viable[t + 1] for nxt, _ in _moves(i, p)):
                viable[t].add(i)

    terms: list[LatticeTerm] = []

    def walk(t: int, state: int, sign: int, syms: list) -> None:
        if t == len(factors):
            terms.append(LatticeTerm(sign, tuple(syms)))
            return
        r, c, p = factors[t]
        for nxt, sym in _moves(state, p):
            if nxt not in viable[t + 1]:
                continue
            if sym is None:
                walk(t + 1, nxt, sign, syms)
            else:
                name, s = sym
                walk(t + 1, nxt, sign * s, syms + [(name, r, c)])

    walk(0, 0, 1, [])
    return terms


def _moves(i: int, p: int):
    if i == p:
        return [(p, ("g", 1)), (p + 1, ("d", 1))]
    if i == p + 1:
        return [(p, ("d", 1)), (p + 1, ("gbar", -1))]
    return [(i, None)]


def catalan(l: int) -> int:
    if l < 0:
        raise ValueError("catalan number needs l >= 0")
    return math.comb(2 * l, l) // (l + 1)
