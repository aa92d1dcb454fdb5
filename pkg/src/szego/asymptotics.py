"""Szego-type limit theorems evaluated at finite size.

Every limit is reported as a sequence plus a trailing-window estimate; the
infinite products behind the limits are truncated at an explicit horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _scalar as sc
from .kernel import MomentKernel, classify_partials, determinant
from .polys import build_polys
from .schur import GammaField, extract_gamma, reconstruct_moments

RAW_DETERMINANT_LIMIT = 14


@dataclass(frozen=True)
class LimitReport:
    """A sequence ``(index, value)`` with its trailing mean and max-min spread."""

    kind: str
    row: int
    sequence: tuple[tuple[int, float], ...]
    limit_estimate: float
    residual: float
    target: float | None = None
    flags: tuple[str, ...] = ()

    @classmethod
    def from_sequence(cls, kind: str, row: int, seq, window: int = 10, target: float | None = None,
                      flags=()) -> "LimitReport":
        seq = tuple((int(n), float(v)) for n, v in seq)
        if not seq:
            raise ValueError("empty sequence")
        tail = np.array([v for _, v in seq[-window:]])
        return cls(kind, row, seq, float(tail.mean()), float(tail.max() - tail.min()), target, tuple(flags))

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def csv_rows(self) -> list[tuple]:
        return [(self.kind, self.row, n, v, self.limit_estimate, self.residual) for n, v in self.sequence]


@dataclass(frozen=True)
class DeterminantRatio:
    """``D[r,q] / D[r+1,q]`` by three routes that must agree."""

    ratio: object
    poly: object
    product: object

    def spread(self) -> float:
        vals = [float(np.real(sc.to_number(v))) for v in (self.ratio, self.poly, self.product)]
        return max(vals) - min(vals)


def determinant_from_field(field: GammaField, r: int, q: int):
    """``D[r,q] = prod_{l=r..q} s[l,l] * prod_{r<=k<j<=q} d[k,j]^2``."""
    dee = field.dee_matrix()
    val = 1
    for l in range(r, q + 1):
        val = val * field.diag[l]
    for k in range(r, q + 1):
        for j in range(k + 1, q + 1):
            val = val * dee[k, j] ** 2
    return sc.simplify(val)


def det_ratio(kernel: MomentKernel, r: int, q: int, field: GammaField | None = None) -> DeterminantRatio:
    """``D[r,q] / D[r+1,q]`` next to ``1/|phi^#_{q-r}(0,r)|^2`` and ``s[r,r] prod_j d[r,r+j]^2``."""
    if not 0 <= r < q < kernel.size:
        raise IndexError(f"need 0 <= r < q < {kernel.size}, got r={r}, q={q}")
    ratio = determinant(kernel, r, q) / determinant(kernel, r + 1, q)
    if field is None:
        field = extract_gamma(kernel.truncate(q + 1))
    table = build_polys(field.truncate(q + 1), max_degree=q - r, max_level=r)
    sharp0 = table.b[r, q - r, 0]
    poly = 1 / sc.abs2(sharp0)
    prod = field.diag[r]
    for j in range(1, q - r + 1):
        prod = prod * field.dee(r, r + j) ** 2
    return DeterminantRatio(sc.simplify(ratio), sc.simplify(poly), sc.simplify(prod))


def _dee2(field: GammaField) -> np.ndarray:
    return np.real(sc.float_array(field.dee_matrix())) ** 2


def first_limit(field: GammaField, r: int = 0, horizon: int | None = None, window: int = 10,
                tol: float = 1e-6) -> LimitReport:
    """``q -> D[r,q]/D[r+1,q] = s[r,r] prod_{j<=q-r} d[r,r+j]^2`` for ``q = r .. r + horizon``.

    The limit is ``g_r``, the squared diagonal entry of the spectral factor.
    The report is flagged ``degenerate`` when row ``r`` fails the Szego-class
    test.
    """
    horizon = field.size - 1 - r if horizon is None else horizon
    if r + horizon >= field.size:
        raise ValueError(f"row {r} with horizon {horizon} needs a field of size {r + horizon + 1}")
    factors = _dee2(field)[r, r + 1:r + horizon + 1]
    s = float(np.real(sc.to_number(field.diag[r])))
    partial = s * np.concatenate([[1.0], np.cumprod(factors)])
    seq = [(r + i, v) for i, v in enumerate(partial)]
    flags = ("degenerate",) if classify_partials(partial, factors, tol) == "degenerate" else ()
    return LimitReport.from_sequence("first", r, seq, window, flags=flags)


def straddle_product(field: GammaField, n: int, horizon: int) -> float:
    """``prod_{0<=k<=n<j<=horizon} d[k,j]^2``: the pairs whose parameters cross the cut at ``n``."""
    d2 = _dee2(field)
    return float(np.exp(np.sum(np.log(d2[:n + 1, n + 1:horizon + 1]))))


def strong_limit(field: GammaField, n_max: int, horizon: int | None = None, window: int = 5,
                 kernel: MomentKernel | None = None) -> tuple[LimitReport, LimitReport]:
    """Both routes to ``D[0,n] / prod_{l<=n} g_l``, which tends to ``1/L``.

    The determinant route divides ``D[0,n]`` (a raw determinant while the
    section has at most 14 rows, the d-product factorisation beyond) by the
    truncated ``g_l = s[l,l] prod_{l<j<=horizon} d[l,j]^2``.  The product
    route is ``1 / prod_{0<=k<=n<j<=horizon} d[k,j]^2``.  ``horizon``
    defaults to ``n_max + 32``; the product route's report carries the size
    of the last retained parameter column as ``tail`` in its flags.
    """
    horizon = n_max + 32 if horizon is None else horizon
    if horizon >= field.size:
        raise ValueError(f"horizon {horizon} needs a field of size {horizon + 1}, got {field.size}")
    if n_max >= horizon:
        raise ValueError("n_max must be below the parameter horizon")
    f = field.to_float()
    d2 = _dee2(f)
    diag = np.real(sc.float_array(f.diag))
    log_g = np.log(diag[:horizon + 1]) + np.array(
        [np.sum(np.log(d2[l, l + 1:horizon + 1])) for l in range(horizon + 1)])
    if kernel is None and n_max + 1 <= RAW_DETERMINANT_LIMIT:
        kernel = reconstruct_moments(f, min(n_max + 1, RAW_DETERMINANT_LIMIT))
    det_seq, prod_seq = [], []
    for n in range(n_max + 1):
        if kernel is not None and n + 1 <= min(RAW_DETERMINANT_LIMIT, kernel.size):
            sign, log_d = np.linalg.slogdet(sc.float_array(kernel.section(0, n)))
            log_d = float(log_d) if np.real(sign) > 0 else -math.inf
        else:
            log_d = float(np.sum(np.log(diag[:n + 1])) + np.sum(np.log(d2[:n + 1, :n + 1][np.triu_indices(n + 1, 1)])))
        det_seq.append((n, math.exp(log_d - np.sum(log_g[:n + 1]))))
        prod_seq.append((n, 1.0 / straddle_product(f, n, horizon)))
    tail = max(0.0, float(-np.sum(np.log(d2[:n_max + 1, horizon]))))
    det_rep = LimitReport.from_sequence("strong_det", 0, det_seq, window)
    prod_rep = LimitReport.from_sequence("strong_prod", 0, prod_seq, window, flags=(f"tail={tail:.3e}",))
    return det_rep, prod_rep


def angle_det(kernel: MomentKernel, r: int, l: int, q: int):
    """``D[r,q] / (D[r,l] D[l+1,q])``: the determinant of the angle between past ``r..l`` and future ``l+1..q``."""
    if not 0 <= r <= l < q < kernel.size:
        raise IndexError(f"need 0 <= r <= l < q < {kernel.size}, got ({r}, {l}, {q})")
    val = determinant(kernel, r, q) / (determinant(kernel, r, l) * determinant(kernel, l + 1, q))
    return sc.simplify(val)


def angle_det_product(field: GammaField, r: int, l: int, q: int):
    """``prod_{r<=k<=l<j<=q} d[k,j]^2``."""
    if not 0 <= r <= l < q < field.size:
        raise IndexError(f"need 0 <= r <= l < q < {field.size}, got ({r}, {l}, {q})")
    dee = field.dee_matrix()
    val = 1
    for k in range(r, l + 1):
        for j in range(l + 1, q + 1):
            val = val * dee[k, j] ** 2
    return sc.simplify(val)
