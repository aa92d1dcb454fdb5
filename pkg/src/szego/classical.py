"""Classical instances: Toeplitz kernels on the circle, Hankel kernels on the line, and the Hilbert matrix."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from . import _scalar as sc
from .kernel import KernelError, MomentKernel
from .schur import GammaField, reconstruct_moments


@dataclass(frozen=True)
class ToeplitzSpec:
    """``s0`` on the diagonal and ``verblunsky[n-1]`` as the parameter of every pair at distance ``n``."""

    s0: float
    verblunsky: tuple

    def __post_init__(self):
        object.__setattr__(self, "verblunsky", tuple(self.verblunsky))
        if not self.s0 > 0:
            raise ValueError("s0 must be positive")
        for n, a in enumerate(self.verblunsky, start=1):
            if not abs(complex(sc.to_number(a))) < 1:
                raise ValueError(f"parameter at distance {n} lies outside the open unit disk")


def toeplitz_gamma(spec: ToeplitzSpec, size: int, precision: str = "float64") -> GammaField:
    alphas = spec.verblunsky

    def gamma(k, j):
        n = j - k
        return alphas[n - 1] if n <= len(alphas) else 0

    return GammaField.from_function(gamma, size, diag=spec.s0, precision=precision)


def toeplitz_kernel(spec: ToeplitzSpec, size: int, precision: str = "float64") -> MomentKernel:
    """Kernel of a shift-invariant parameter field; ``K[n+k, m+k] = K[n, m]``."""
    return reconstruct_moments(toeplitz_gamma(spec, size, precision))


@dataclass(frozen=True)
class HankelSpec:
    """Power moments ``m_t``; the kernel is ``s[k, j] = m_{k+j}``."""

    moments: tuple

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(self.moments))


def hankel_kernel(spec: HankelSpec, size: int, precision: str = "float64") -> MomentKernel:
    """Hankel kernel from ``2 * size - 1`` moments; raises :class:`KernelError` on an indefinite section."""
    if len(spec.moments) < 2 * size - 1:
        raise ValueError(f"need {2 * size - 1} moments for size {size}, got {len(spec.moments)}")
    kernel = MomentKernel.from_function(lambda k, j: spec.moments[k + j], size, precision)
    pivots = sc.leading_pivots(kernel.matrix())
    if len(pivots) < size or not _positive(pivots[-1]):
        n = len(pivots) - 1
        raise KernelError(f"moment sequence is not positive definite: section 0..{n} is singular or indefinite",
                          (0, n))
    return kernel


def _positive(x) -> bool:
    return bool(sympy.re(x) > 0) if isinstance(x, sympy.Basic) else float(np.real(x)) > 0


def hilbert_kernel(size: int, precision: str = "float64") -> MomentKernel:
    """``s[k, j] = 1/(k + j + 1)``: the moments of Lebesgue measure on [0, 1]."""
    moments = [Fraction(1, t + 1) for t in range(2 * size - 1)]
    if precision == "float64":
        moments = [float(m) for m in moments]
    return hankel_kernel(HankelSpec(moments), size, precision)


def hilbert_gamma(k: int, l: int, exact: bool = False):
    """Closed form of the Hilbert parameters at ``(k, k + l)``: ``(gamma, d)``.

    ``gamma = (-1)^(l-1) sqrt((2k+1)(2k+2l+1)) / (2k+l+1)``, ``d = l / (2k+l+1)``.
    """
    if l < 1 or k < 0:
        raise ValueError("need k >= 0 and l >= 1")
    sign = 1 if l % 2 == 1 else -1
    if exact:
        g = sign * sympy.sqrt((2 * k + 1) * (2 * k + 2 * l + 1)) / (2 * k + l + 1)
        return g, sympy.Rational(l, 2 * k + l + 1)
    g = sign * np.sqrt((2 * k + 1) * (2 * k + 2 * l + 1)) / (2 * k + l + 1)
    return float(g), l / (2 * k + l + 1)


def hilbert_gamma_squared(k: int, l: int) -> Fraction:
    """``gamma^2`` at ``(k, k + l)`` as an exact rational."""
    return Fraction((2 * k + 1) * (2 * k + 2 * l + 1), (2 * k + l + 1) ** 2)


def hilbert_gamma_field(size: int, precision: str = "float64") -> GammaField:
    exact = precision == "rational"
    diag = (lambda k: sympy.Rational(1, 2 * k + 1)) if exact else (lambda k: 1.0 / (2 * k + 1))
    return GammaField.from_function(lambda k, j: hilbert_gamma(k, j - k, exact)[0], size,
                                    diag=diag, precision=sc.check_precision(precision))


def hilbert_det_formula(n: int) -> Fraction:
    """``D[0, n]`` of the Hilbert kernel in closed form.

    ``prod_{k=1}^{n+1} 1/(2k-1) * prod_{l=0}^{n-1} prod_{k=1}^{n-l} (k/(k+2l+1))^2``
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    val = Fraction(1)
    for k in range(1, n + 2):
        val /= 2 * k - 1
    for l in range(n):
        for k in range(1, n - l + 1):
            val *= Fraction(k, k + 2 * l + 1) ** 2
    return val


def three_term_polys(a: Sequence, b: Sequence, n_max: int) -> list[np.ndarray]:
    """Solve ``x phi_n = b_n phi_{n+1} + a_n phi_n + b_{n-1} phi_{n-1}`` from ``phi_{-1} = 0, phi_0 = 1``.

    Coefficient vectors are lowest power first; exact inputs give exact output.
    """
    exact = any(isinstance(v, sympy.Basic) for v in list(a) + list(b))
    zero = sympy.Integer(0) if exact else 0.0
    one = sympy.Integer(1) if exact else 1.0
    polys = [np.array([one], dtype=object if exact else float)]
    prev = np.array([zero], dtype=polys[0].dtype)
    for n in range(n_max):
        if b[n] == 0:
            raise ZeroDivisionError(f"b_{n} = 0: recurrence breaks down")
        cur = polys[-1]
        nxt = np.full(n + 2, zero, dtype=cur.dtype)
        nxt[1:] += cur
        nxt[:n + 1] -= a[n] * cur
        if n > 0:
            nxt[:n] -= b[n - 1] * prev
        nxt = nxt / b[n]
        if exact:
            nxt = sc.tidy(nxt)
        prev = cur
        polys.append(nxt)
    return polys


def legendre_recurrence(n_max: int, exact: bool = False) -> tuple[list, list]:
    """Recurrence coefficients of the orthonormal shifted Legendre polynomials on [0, 1].

    ``a_n = 1/2`` and ``b_{n-1} = n / (2 sqrt(4 n^2 - 1))``.
    """
    if exact:
        a = [sympy.Rational(1, 2)] * n_max
        b = [sympy.Integer(n) / (2 * sympy.sqrt(4 * n * n - 1)) for n in range(1, n_max + 1)]
    else:
        a = [0.5] * n_max
        b = [n / (2 * np.sqrt(4 * n * n - 1)) for n in range(1, n_max + 1)]
    return a, b


def canonical_moment_vector(n_max: int) -> list[Fraction]:
    """Canonical moments ``p_1 .. p_{n_max}`` of Lebesgue measure on [0, 1].

    ``p_{2k-1} = 1/2`` and ``p_{2k} = k / (2k + 1)``.
    """
    out = []
    for n in range(1, n_max + 1):
        if n % 2:
            out.append(Fraction(1, 2))
        else:
            k = n // 2
            out.append(Fraction(k, 2 * k + 1))
    return out
