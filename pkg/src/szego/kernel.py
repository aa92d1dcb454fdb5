"""Moment kernels on an ordered index set, their Gram determinants, and the Szego-class test."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import TYPE_CHECKING, Callable

import numpy as np

from . import _scalar as sc

if TYPE_CHECKING:
    from .schur import GammaField


class KernelError(ValueError):
    """Raised when a kernel section is singular or indefinite."""

    def __init__(self, message: str, section: tuple[int, int] | None = None):
        super().__init__(message)
        self.section = section


@dataclass(frozen=True, eq=False)
class MomentKernel:
    """Hermitian kernel ``s[k, j]`` truncated to indices ``0 <= k, j < size``.

    Only the upper triangle (``k <= j``) is stored; the lower triangle is the
    conjugate transpose, so the Hermitian property holds by construction.
    Word-ordered kernels (indices are words over ``alphabet`` letters in graded
    order, see :mod:`szego.free_semigroup`) set ``alphabet``.
    """

    upper: np.ndarray
    alphabet: int | None = None
    _full: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        u = np.asarray(self.upper)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"kernel must be square, got shape {u.shape}")
        if u.dtype != object:
            u = sc.numeric_array(u)
        u = np.triu(u) if u.dtype != object else _triu_object(u)
        u.flags.writeable = False
        object.__setattr__(self, "upper", u)
        lower = sc.conj_array(np.triu(u, 1) if u.dtype != object else _triu_object(u, 1)).T
        full = u + lower
        full.flags.writeable = False
        object.__setattr__(self, "_full", full)

    @classmethod
    def from_matrix(cls, mat, alphabet: int | None = None) -> "MomentKernel":
        """Keep the upper triangle of ``mat``; use :func:`validate_kernel` to audit the rest."""
        return cls(np.asarray(mat), alphabet)

    @classmethod
    def from_function(cls, entry: Callable[[int, int], object], size: int,
                      precision: str = "float64", alphabet: int | None = None) -> "MomentKernel":
        sc.check_precision(precision)
        vals = [[entry(k, j) if k <= j else 0 for j in range(size)] for k in range(size)]
        if precision == "rational":
            return cls(sc.exact_array(vals), alphabet)
        return cls(np.array(vals), alphabet)

    @property
    def size(self) -> int:
        return self.upper.shape[0]

    @property
    def exact(self) -> bool:
        return self.upper.dtype == object

    def matrix(self) -> np.ndarray:
        return self._full

    def section(self, r: int, q: int) -> np.ndarray:
        """Gram section over indices ``r..q`` inclusive."""
        _check_range(r, q, self.size)
        return self._full[r:q + 1, r:q + 1]

    def shifted(self, level: int) -> "MomentKernel":
        """The kernel ``(a, b) -> s[a + level, b + level]``."""
        return MomentKernel(self.upper[level:, level:], self.alphabet)

    def truncate(self, size: int) -> "MomentKernel":
        return MomentKernel(self.upper[:size, :size], self.alphabet)

    def __getitem__(self, idx: tuple[int, int]):
        return self._full[idx]

    def to_exact(self) -> "MomentKernel":
        return self if self.exact else MomentKernel(sc.exact_array(self.upper), self.alphabet)

    def to_float(self) -> "MomentKernel":
        return MomentKernel(sc.float_array(self.upper), self.alphabet) if self.exact else self

    def with_precision(self, precision: str | None) -> "MomentKernel":
        if precision is None:
            return self
        sc.check_precision(precision)
        return self.to_exact() if precision == "rational" else self.to_float()


def _triu_object(a: np.ndarray, k: int = 0) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            out[i, j] = a[i, j] if j - i >= k else sc.to_exact(0)
    return out


def _check_range(r: int, q: int, size: int) -> None:
    if not 0 <= r <= q < size:
        raise IndexError(f"section {r}..{q} outside truncation range 0..{size - 1}")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    first_nonpositive: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_kernel(kernel, tol: float = 0.0) -> ValidationReport:
    """Audit a kernel (or a raw square matrix) for Hermitian symmetry and strict positivity.

    ``first_nonpositive`` is the smallest ``n`` with ``D[0, n] <= tol``.
    """
    problems: list[str] = []
    if isinstance(kernel, MomentKernel):
        mat = kernel.matrix()
    else:
        raw = np.asarray(kernel)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            return ValidationReport((f"kernel must be square, got shape {raw.shape}",))
        if raw.dtype == object:
            bad = [(k, j) for k in range(raw.shape[0]) for j in range(k + 1, raw.shape[0])
                   if not sc.exact_equal(raw[j, k], sc.conj(raw[k, j]))]
        else:
            diff = np.abs(raw - np.conj(raw.T))
            bad = [tuple(map(int, p)) for p in np.argwhere(np.triu(diff, 1) > max(tol, 1e-12))]
        for k, j in bad:
            problems.append(f"not Hermitian at ({k}, {j})")
        mat = MomentKernel.from_matrix(raw).matrix()

    n = mat.shape[0]
    for k in range(n):
        d = mat[k, k]
        if sc.is_exact(d):
            if not sc.exact_equal(sc.conj(d), d):
                problems.append(f"diagonal entry {k} is not real")
            elif not bool(sc.real(d) > 0):
                problems.append(f"diagonal entry {k} is not positive")
        else:
            if abs(np.imag(d)) > 1e-12 * max(1.0, abs(d)):
                problems.append(f"diagonal entry {k} is not real")
            elif not np.real(d) > 0:
                problems.append(f"diagonal entry {k} is not positive")

    first = None
    minor = None
    for i, p in enumerate(sc.leading_pivots(mat)):
        minor = p if minor is None else minor * p
        value = sc.real(minor) if sc.is_exact(minor) else float(np.real(minor))
        if not bool(value > tol):
            first = i
            problems.append(f"leading minor D[0, {i}] = {value} is not positive")
            break
    return ValidationReport(tuple(problems), first)


def determinant(kernel: MomentKernel, r: int, q: int, precision: str | None = None):
    """``D[r, q]``: determinant of the Gram section over indices ``r..q``."""
    k = kernel.with_precision(precision)
    return sc.det(k.section(r, q))


def log_determinant(kernel: MomentKernel, r: int, q: int) -> float:
    """Natural log of ``D[r, q]`` (float path); raises :class:`KernelError` if not positive."""
    sign, logdet = np.linalg.slogdet(sc.float_array(kernel.section(r, q)))
    if not np.real(sign) > 0:
        raise KernelError(f"section {r}..{q} is not positive definite", (r, q))
    return float(logdet)


@dataclass(frozen=True)
class DeterminantTable:
    """All ``D[r, q]`` with ``r <= q < size``."""

    values: dict[tuple[int, int], object]
    exact: bool

    def __getitem__(self, rq: tuple[int, int]):
        return self.values[rq]

    def rows(self) -> list[tuple[int, int, object]]:
        return [(r, q, v) for (r, q), v in sorted(self.values.items())]


def determinant_table(kernel: MomentKernel, precision: str | None = None) -> DeterminantTable:
    k = kernel.with_precision(precision)
    values = {}
    for r in range(k.size):
        acc = None
        pivots = sc.leading_pivots(k.matrix()[r:, r:])
        for i, p in enumerate(pivots):
            acc = p if acc is None else (sc.simplify(acc * p) if k.exact else acc * p)
            values[(r, r + i)] = acc
        if len(pivots) < k.size - r or (pivots and not _positive(pivots[-1])):
            raise KernelError(f"section {r}..{r + len(pivots) - 1} is not positive definite",
                              (r, r + len(pivots) - 1))
    return DeterminantTable(values, k.exact)


def _positive(x) -> bool:
    return bool(sc.real(x) > 0) if sc.is_exact(x) else float(np.real(x)) > 0


@dataclass(frozen=True)
class SzegoReport:
    """Finite-horizon evidence for ``s[k,k] * prod_{n>k} d[k,n]^2 > 0`` on each row.

    ``partials[k][h]`` is ``s[k,k] * prod_{k<n<=k+h} d[k,n]^2``.
    """

    partials: dict[int, np.ndarray]
    row_class: dict[int, str]
    horizon: int
    tol: float

    @property
    def classification(self) -> str:
        classes = set(self.row_class.values())
        for c in ("degenerate", "inconclusive"):
            if c in classes:
                return c
        return "szego"


def szego_class_report(field: "GammaField", horizon: int = 64, tol: float = 1e-6,
                       rows: int | None = None) -> SzegoReport:
    """Partial products of the Szego-class criterion with a plateau/decay classification.

    A row is ``"degenerate"`` when its partial product drops below ``tol`` or
    its trailing increments ``-log d^2`` decay no faster than ``1/n`` (a
    divergent tail, as for the Hilbert field), ``"szego"`` when the product
    moved by less than ``tol`` (relative) over the last quarter of the
    horizon, and ``"inconclusive"`` otherwise.
    """
    available = field.size - 1
    if horizon > available:
        raise ValueError(f"horizon {horizon} exceeds the parameter range {available}")
    n_rows = field.size - horizon if rows is None else min(rows, field.size - horizon)
    dee2 = sc.float_array(field.dee_matrix()) ** 2
    diag = sc.float_array(field.diag)
    partials, classes = {}, {}
    for k in range(n_rows):
        factors = np.real(dee2[k, k + 1:k + horizon + 1])
        p = np.real(diag[k]) * np.concatenate([[1.0], np.cumprod(factors)])
        partials[k] = p
        classes[k] = classify_partials(p, factors, tol)
    return SzegoReport(partials, classes, horizon, tol)


def classify_partials(p: np.ndarray, factors: np.ndarray, tol: float) -> str:
    h = len(factors)
    if p[-1] <= tol:
        return "degenerate"
    if h == 0:
        return "szego"
    back = max(1, h // 4)
    if 1.0 - p[-1] / p[-1 - back] <= tol:
        return "szego"
    inc = -np.log(np.clip(factors, 1e-300, None))
    if h >= 8 and inc[h // 2 - 1] > 0 and inc[-1] > 0:
        decay = math.log(inc[h // 2 - 1] / inc[-1]) / math.log(h / (h // 2))
        if decay <= 1.25:
            return "degenerate"
    return "inconclusive"
