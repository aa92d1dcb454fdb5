"""Lower triangular arrays: the algebra housing Phi_n, Phi_n^# and the spectral factor.

Arrays are truncated to an explicit size ``M``.  Because every operand is
lower triangular, products and inverses computed at size ``M`` are exact for
all entries inside the section.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy

from . import _scalar as sc
from .kernel import KernelError, MomentKernel, szego_class_report
from .polys import PolyTable, build_polys
from .schur import GammaField


@dataclass(frozen=True, eq=False)
class TriangularArray:
    """A lower triangular ``M x M`` section; entries above the diagonal are forced to zero."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"triangular array must be square, got shape {a.shape}")
        if a.dtype == object:
            a = sc.exact_array(a)
            for k in range(a.shape[0]):
                for j in range(k + 1, a.shape[0]):
                    a[k, j] = sympy.Integer(0)
        else:
            a = np.tril(sc.numeric_array(a))
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @classmethod
    def identity(cls, size: int, exact: bool = False) -> "TriangularArray":
        eye = np.eye(size, dtype=int)
        return cls(sc.exact_array(eye) if exact else eye.astype(float))

    @classmethod
    def shift(cls, size: int, offset: int = 1) -> "TriangularArray":
        """Ones on the ``offset``-th subdiagonal."""
        return cls(np.eye(size, k=-offset))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    def __getitem__(self, idx):
        return self.entries[idx]

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()

    def __matmul__(self, other: "TriangularArray") -> "TriangularArray":
        return multiply(self, other)

    def block(self, size: int) -> np.ndarray:
        return self.entries[:size, :size]

    def csv_rows(self) -> list[tuple[int, int, object]]:
        m = self.size
        return [(k, j, self.entries[k, j]) for k in range(m) for j in range(k + 1)]


def multiply(a: TriangularArray, b: TriangularArray) -> TriangularArray:
    """``(ab)[k, j] = sum_l a[k, l] b[l, j]``; the sum is finite by triangularity."""
    if a.size != b.size:
        raise ValueError(f"size mismatch: {a.size} vs {b.size}")
    prod = a.entries.dot(b.entries)
    return TriangularArray(sc.tidy(prod))


def invert(a: TriangularArray) -> TriangularArray:
    """Column-by-column forward substitution."""
    m = a.size
    e = a.entries
    for k in range(m):
        if e[k, k] == 0:
            raise ZeroDivisionError(f"diagonal entry {k} is zero; array is not invertible")
    if a.exact:
        out = sc.exact_array(np.zeros((m, m), dtype=int))
        for j in range(m):
            out[j, j] = 1 / e[j, j]
            for k in range(j + 1, m):
                acc = sum((e[k, i] * out[i, j] for i in range(j, k)), sympy.Integer(0))
                out[k, j] = sympy.expand(-acc / e[k, k])
        return TriangularArray(out)
    out = np.zeros((m, m), dtype=np.result_type(e, np.float64))
    for j in range(m):
        out[j, j] = 1 / e[j, j]
        for k in range(j + 1, m):
            out[k, j] = -(e[k, j:k] @ out[j:k, j]) / e[k, k]
    return TriangularArray(out)


def embed_phi(table: PolyTable, n: int, size: int | None = None, reversed: bool = False) -> TriangularArray:
    """The array with column ``j`` holding the coefficients of phi_n(., j): ``[k, j] = a^j_{n, k-j}``."""
    m = table.size - n if size is None else size
    if m < 1 or m - 1 + n >= table.size:
        raise ValueError(f"table of size {table.size} cannot embed degree {n} at size {m}; "
                         f"need size <= {table.size - n}")
    src = table.b if reversed else table.a
    if src is None:
        raise ValueError("table has no reversed polynomials")
    exact = table.exact
    out = sc.exact_array(np.zeros((m, m), dtype=int)) if exact else np.zeros((m, m), dtype=src.dtype)
    for j in range(m):
        top = min(m - j, n + 1)
        out[j:j + top, j] = src[j, n, :top]
    return TriangularArray(out)


def spectral_factor(kernel: MomentKernel, size: int | None = None) -> tuple[TriangularArray, float]:
    """Lower triangular ``Theta`` with positive diagonal and ``K = Theta^H Theta`` on the section.

    Returns ``(theta, drift)`` where ``drift`` is the largest entry difference
    between the factors at sizes ``M`` and ``M // 2`` on the top-left
    ``M // 4`` block (a finite-section stabilisation diagnostic).
    """
    m = kernel.size if size is None else size
    if m > kernel.size:
        raise ValueError(f"kernel has size {kernel.size}, {m} requested")
    theta = _reversed_cholesky(kernel.matrix()[:m, :m])
    q = m // 4
    if q >= 1:
        half = _reversed_cholesky(kernel.matrix()[:m // 2, :m // 2])
        drift = float(np.max(np.abs(sc.float_array(theta[:q, :q]) - sc.float_array(half[:q, :q]))))
    else:
        drift = float("nan")
    return TriangularArray(theta), drift


def _reversed_cholesky(s: np.ndarray) -> np.ndarray:
    # K = Theta^H Theta with Theta lower  <=>  J K J = L L^H with L = J Theta^H J lower
    m = s.shape[0]
    if s.dtype == object:
        mat = sympy.Matrix(s.tolist())[::-1, ::-1]
        try:
            low = mat.cholesky(hermitian=True)
        except ValueError:
            raise KernelError("indefinite section: spectral factor does not exist", (0, m - 1)) from None
        low = np.array(low.tolist(), dtype=object)
        return sc.tidy(sc.conj_array(low.T)[::-1, ::-1].copy())
    flip = s[::-1, ::-1]
    try:
        low = np.linalg.cholesky(flip)
    except np.linalg.LinAlgError:
        raise KernelError("indefinite section: spectral factor does not exist", (0, m - 1)) from None
    return np.conj(low.T)[::-1, ::-1].copy()


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-degree convergence diagnostics on the top-left ``window`` block.

    ``rows`` holds ``(n, phi_sup, inv_sharp_dev)``; ``theta_diag`` the
    diagonal of the finite-section spectral factor; ``converged`` is true when
    both sups at the last degree are below ``tol``.
    """

    rows: tuple[tuple[int, float, float], ...]
    theta_diag: np.ndarray
    window: int
    tol: float
    szego: bool

    @property
    def converged(self) -> bool:
        _, a, b = self.rows[-1]
        return self.szego and a < self.tol and b < self.tol

    def as_json(self) -> list[dict]:
        return [{"n": n, "phi_sup": a, "inv_sharp_dev": b} for n, a, b in self.rows]


def convergence_report(field: GammaField, kernel: MomentKernel, n_max: int, window: int,
                       tol: float = 1e-6) -> ConvergenceReport:
    """Check ``Phi_n -> 0`` and ``(Phi_n^#)^-1 -> Theta`` entrywise on the window block.

    ``Theta`` comes from :func:`spectral_factor` at size ``n_max + window``.
    Row 0 of the field is also run through the finite-horizon Szego-class
    test; a degenerate row marks the report as non-convergent.
    """
    size = n_max + window
    if size > field.size or size > kernel.size:
        raise ValueError(f"need field and kernel of size >= {size}")
    f = field.to_float().truncate(size)
    table = build_polys(f)
    theta, _ = spectral_factor(kernel.to_float(), size)
    th = theta.block(window)
    rows = []
    for n in range(n_max + 1):
        phi = embed_phi(table, n, size=window)
        sharp = embed_phi(table, n, size=window, reversed=True)
        inv = invert(sharp)
        rows.append((n, float(np.max(np.abs(phi.entries))),
                     float(np.max(np.abs(inv.entries - th)))))
    horizon = min(size - 1, 64)
    rep = szego_class_report(f, horizon=horizon, tol=tol, rows=1)
    return ConvergenceReport(tuple(rows), theta.diagonal(), window, tol,
                             rep.classification != "degenerate")
