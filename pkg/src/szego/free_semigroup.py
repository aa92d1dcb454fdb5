"""Words over ``N`` letters, non-commutative series, and tree-stationary kernels.

Words are ordered by length first and lexicographically within a length, so
every word has finitely many predecessors and ``rank`` is a bijection onto
``0, 1, 2, ...``.  A tree-stationary kernel strips common prefixes,
``K(t u, t v) = K(u, v)``, and vanishes unless one word is a prefix of the
other; it is parametrised by one number ``gamma_w`` per nonempty word.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, Mapping

import numpy as np
import sympy

from . import _scalar as sc
from .kernel import MomentKernel, determinant
from .schur import GammaField, reconstruct_moments
from .triangular import TriangularArray, spectral_factor


@total_ordering
@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    N: int

    def __post_init__(self):
        letters = tuple(int(c) for c in self.letters)
        if self.N < 1:
            raise ValueError("alphabet size must be >= 1")
        if any(not 1 <= c <= self.N for c in letters):
            raise ValueError(f"letters must lie in 1..{self.N}, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def empty(cls, N: int) -> "Word":
        return cls((), N)

    @classmethod
    def parse(cls, text: str, N: int) -> "Word":
        text = text.strip()
        if text in ("e", ""):
            return cls((), N)
        if not text.isdigit():
            raise ValueError(f"malformed word {text!r}")
        return cls(tuple(int(c) for c in text), N)

    def __str__(self) -> str:
        return "".join(map(str, self.letters)) or "e"

    def __len__(self) -> int:
        return len(self.letters)

    def _key(self):
        return (len(self.letters), self.letters)

    def __lt__(self, other: "Word") -> bool:
        _same_alphabet(self, other)
        return self._key() < other._key()

    def __add__(self, other: "Word") -> "Word":
        _same_alphabet(self, other)
        return Word(self.letters + other.letters, self.N)

    def is_prefix_of(self, other: "Word") -> bool:
        return other.letters[:len(self.letters)] == self.letters

    def rank(self) -> int:
        """Position in graded order: words shorter than ``self`` plus the lex rank within its length."""
        n, N = len(self.letters), self.N
        shorter = n if N == 1 else (N ** n - 1) // (N - 1)
        lex = 0
        for c in self.letters:
            lex = lex * N + (c - 1)
        return shorter + lex

    @property
    def count_up_to(self) -> int:
        """Number of words ``<=`` this one."""
        return self.rank() + 1

    @classmethod
    def unrank(cls, rank: int, N: int) -> "Word":
        if rank < 0:
            raise ValueError("rank must be >= 0")
        length, block = 0, 1
        while rank >= block:
            rank -= block
            length += 1
            block *= N
        letters = []
        for _ in range(length):
            rank, c = divmod(rank, N)
            letters.append(c + 1)
        return cls(tuple(reversed(letters)), N)

    def succ(self) -> "Word":
        return Word.unrank(self.rank() + 1, self.N)

    def pred(self) -> "Word":
        if not self.letters:
            raise ValueError("the empty word has no predecessor")
        return Word.unrank(self.rank() - 1, self.N)


def _same_alphabet(a: Word, b: Word) -> None:
    if a.N != b.N:
        raise ValueError(f"alphabet mismatch: {a.N} vs {b.N}")


def word_count(N: int, depth: int) -> int:
    """Number of words of length ``<= depth``."""
    return depth + 1 if N == 1 else (N ** (depth + 1) - 1) // (N - 1)


def words_up_to(N: int, depth: int) -> list[Word]:
    return [Word.unrank(i, N) for i in range(word_count(N, depth))]


class NCSeries:
    """Finitely supported map ``word -> coefficient`` (a polynomial or truncated series in ``N`` variables)."""

    __slots__ = ("N", "_coeffs")

    def __init__(self, N: int, coeffs: Mapping | None = None):
        self.N = N
        clean = {}
        for w, c in (coeffs or {}).items():
            key = w.letters if isinstance(w, Word) else tuple(w)
            if any(not 1 <= x <= N for x in key):
                raise ValueError(f"letters must lie in 1..{N}")
            if c != 0:
                clean[key] = c
        self._coeffs = clean

    @classmethod
    def constant(cls, c, N: int) -> "NCSeries":
        return cls(N, {(): c})

    @classmethod
    def generator(cls, k: int, N: int) -> "NCSeries":
        """The variable ``X_k``."""
        return cls(N, {(k,): 1})

    @classmethod
    def monomial(cls, word: Word | str, c=1) -> "NCSeries":
        if isinstance(word, str):
            raise TypeError("pass a Word, not a string")
        return cls(word.N, {word.letters: c})

    def __getitem__(self, word) -> object:
        key = word.letters if isinstance(word, Word) else tuple(word)
        return self._coeffs.get(key, 0)

    def items(self) -> Iterator[tuple[Word, object]]:
        for key in sorted(self._coeffs, key=lambda t: (len(t), t)):
            yield Word(key, self.N), self._coeffs[key]

    def degree(self) -> int:
        return max((len(k) for k in self._coeffs), default=-1)

    def __add__(self, other: "NCSeries") -> "NCSeries":
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0) + c
        return NCSeries(self.N, out)

    def __neg__(self) -> "NCSeries":
        return NCSeries(self.N, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "NCSeries") -> "NCSeries":
        return self + (-other)

    def scale(self, a) -> "NCSeries":
        return NCSeries(self.N, {k: a * c for k, c in self._coeffs.items()})

    def left_multiply(self, k: int) -> "NCSeries":
        """``X_k * self``: prepend letter ``k`` to every word."""
        return NCSeries(self.N, {(k,) + w: c for w, c in self._coeffs.items()})

    def truncate(self, depth: int) -> "NCSeries":
        return NCSeries(self.N, {w: c for w, c in self._coeffs.items() if len(w) <= depth})

    def vector(self, words: list[Word]) -> np.ndarray:
        return np.array([self[w] for w in words])

    def max_abs(self, max_length: int | None = None) -> float:
        vals = [abs(complex(sc.to_number(c))) for w, c in self._coeffs.items()
                if max_length is None or len(w) <= max_length]
        return max(vals, default=0.0)

    def csv_rows(self) -> list[tuple[str, object]]:
        return [(str(w), c) for w, c in self.items()]

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{w}" for w, c in self.items()) or "0"
        return f"NCSeries[{self.N}]({body})"


def nc_multiply(x: NCSeries, y: NCSeries, depth: int | None = None) -> NCSeries:
    """Concatenation product ``sum x_a y_b e_{ab}``, dropping words longer than ``depth``."""
    if x.N != y.N:
        raise ValueError("alphabet mismatch")
    out: dict = {}
    for a, ca in x._coeffs.items():
        for b, cb in y._coeffs.items():
            if depth is not None and len(a) + len(b) > depth:
                continue
            key = a + b
            out[key] = out.get(key, 0) + ca * cb
    return NCSeries(x.N, out)


def nc_invert(x: NCSeries, depth: int) -> NCSeries:
    """Inverse as a series truncated at ``depth``: writing ``x = c (1 - u)``, sum ``u^m / c``."""
    c = x[()]
    if c == 0:
        raise ZeroDivisionError("constant term is zero; series is not invertible")
    one = sympy.Integer(1) if any(isinstance(v, sympy.Basic) for v in x._coeffs.values()) else 1.0
    u = NCSeries(x.N, {w: -v / c for w, v in x._coeffs.items() if w})
    term = NCSeries.constant(one / c, x.N)
    total = term
    for _ in range(depth):
        term = nc_multiply(u, term, depth)
        total = total + term
    return total


@dataclass(frozen=True, eq=False)
class TreeGammaField:
    """One parameter ``gamma_w`` per nonempty word (missing words mean 0)."""

    N: int
    gamma: Mapping[tuple[int, ...], object]

    def __post_init__(self):
        clean = {}
        for w, g in self.gamma.items():
            key = w.letters if isinstance(w, Word) else (Word.parse(w, self.N).letters if isinstance(w, str)
                                                       else tuple(w))
            if not key:
                raise ValueError("the empty word carries no parameter")
            Word(key, self.N)
            if not sc.abs2(g) < 1:
                raise ValueError(f"|gamma| must be < 1 at word {''.join(map(str, key))}")
            clean[key] = g
        object.__setattr__(self, "gamma", clean)

    @classmethod
    def from_function(cls, fn, N: int, depth: int) -> "TreeGammaField":
        return cls(N, {w.letters: fn(w) for w in words_up_to(N, depth)[1:]})

    def __getitem__(self, word) -> object:
        key = word.letters if isinstance(word, Word) else tuple(word)
        return self.gamma.get(key, 0)

    def dee(self, word):
        return sc.sqrt(1 - sc.abs2(self[word]))

    def induced_field(self, depth: int, precision: str = "float64") -> GammaField:
        """Field over words of length ``<= depth``: ``gamma[s, t] = gamma_b`` when ``t = s b``, else 0."""
        words = words_up_to(self.N, depth)

        def entry(i, j):
            s, t = words[i], words[j]
            if s.is_prefix_of(t):
                return self[t.letters[len(s):]]
            return 0

        return GammaField.from_function(entry, len(words), diag=1, precision=precision)


def stationary_kernel(field: TreeGammaField, depth: int, precision: str = "float64") -> MomentKernel:
    """Unital tree-stationary kernel on words of length ``<= depth`` (word-ordered, diagonal 1)."""
    k = reconstruct_moments(field.induced_field(depth, precision))
    return MomentKernel(k.upper, alphabet=field.N)


def nc_polys(field: TreeGammaField, depth: int) -> dict[Word, tuple[NCSeries, NCSeries]]:
    """Orthonormal polynomials ``phi_w`` and companions ``phi^#_w`` for all words up to ``depth``.

    ``phi_{k s} = (X_k phi_s - gamma_{ks} phi^#_{ks-1}) / d_{ks}`` and
    ``phi^#_{k s} = (-conj(gamma_{ks}) X_k phi_s + phi^#_{ks-1}) / d_{ks}``,
    where ``ks - 1`` is the graded predecessor of ``ks``.
    """
    N = field.N
    words = words_up_to(N, depth)
    one = NCSeries.constant(1, N)
    out = {words[0]: (one, one)}
    for i, w in enumerate(words[1:], start=1):
        k, rest = w.letters[0], Word(w.letters[1:], N)
        g, d = field[w], field.dee(w)
        xp = out[rest][0].left_multiply(k)
        prev_sharp = out[words[i - 1]][1]
        phi = (xp - prev_sharp.scale(g)).scale(1 / d)
        sharp = (xp.scale(-sc.conj(g)) + prev_sharp).scale(1 / d)
        if any(isinstance(c, sympy.Basic) for c in (g, d)):
            phi = NCSeries(N, {t: sympy.expand(c) for t, c in phi._coeffs.items()})
            sharp = NCSeries(N, {t: sympy.expand(c) for t, c in sharp._coeffs.items()})
        out[w] = (phi, sharp)
    return out


def phi2_embed(x: NCSeries, depth: int) -> TriangularArray:
    """Word-ordered lower triangular array of left multiplication by ``x``: ``T[b w, w] = x_b``."""
    words = words_up_to(x.N, depth)
    exact = any(isinstance(c, sympy.Basic) for _, c in x.items())
    m = len(words)
    out = sc.exact_array(np.zeros((m, m), dtype=int)) if exact else np.zeros((m, m), dtype=complex)
    for j, w in enumerate(words):
        for b, c in x.items():
            if len(b) + len(w) <= depth:
                out[(b + w).rank(), j] = c
    return TriangularArray(out)


def straddle_target(field: TreeGammaField, tau: Word, depth: int) -> float:
    """``1 / prod d_b^2`` over pairs ``s <= tau < s b`` with ``|b| <= depth``."""
    tail = [(b.letters, float(np.real(sc.to_number(field.dee(b)))) ** 2)
            for b in words_up_to(field.N, depth)[1:]]
    key = tau._key()
    val = 1.0
    for s in words_up_to(field.N, len(tau)):
        if s > tau:
            break
        for b, d2 in tail:
            joined = s.letters + b
            if (len(joined), joined) > key:
                val *= d2
    return 1.0 / val


@dataclass(frozen=True)
class NCLimitReport:
    """Finite-depth evidence for the tree analogues of the Szego limits.

    ``first``: ``(tau, D[e,tau] / D[1,tau], partial g)`` along graded order.
    ``strong``: ``(tau, D[e,tau] / g^{l(tau)}, straddle target)``.
    ``nominal_L``: ``prod_w d_w^(2|w|)`` over the available words.
    ``inverse_dev``: ``(tau, max |(phi^#_tau)^-1 - Theta[:, e]|)`` over words of
    length ``<= window``; rows near the end of a finite section are distorted.
    """

    g: float
    nominal_L: float
    first: tuple[tuple[str, float, float], ...]
    strong: tuple[tuple[str, float, float], ...]
    inverse_dev: tuple[tuple[str, float], ...]
    window: int

    def first_gap(self) -> float:
        return self.first[-1][1] - self.g

    def strong_gap(self) -> float:
        return max(abs(v - t) / t for _, v, t in self.strong)


def nc_limits(field: TreeGammaField, depth: int, precision: str = "float64", tol: float = 1e-12,
              window: int | None = None) -> NCLimitReport:
    N = field.N
    window = depth // 2 if window is None else window
    if not 0 <= window <= depth:
        raise ValueError("window must lie in 0..depth")
    top = word_count(N, window)
    words = words_up_to(N, depth)
    dees = [float(np.real(sc.to_number(field.dee(w)))) for w in words[1:]]
    g = float(np.prod(np.square(dees)))
    if not np.prod(dees) > tol:
        raise ValueError("degenerate field: product of d over the available words vanishes")
    nominal = float(np.prod([d ** (2 * len(w)) for w, d in zip(words[1:], dees)]))
    kernel = stationary_kernel(field, depth, precision)
    first, strong = [], []
    for t in words[1:]:
        q = t.rank()
        d_all = float(np.real(sc.to_number(determinant(kernel, 0, q))))
        d_tail = float(np.real(sc.to_number(determinant(kernel, 1, q))))
        first.append((str(t), d_all / d_tail, float(np.prod(np.square(dees[:q])))))
        strong.append((str(t), d_all / g ** (q + 1), straddle_target(field, t, depth)))
    theta, _ = spectral_factor(kernel.to_float())
    col = sc.float_array(theta.entries[:top, 0])
    polys = nc_polys(field, depth)
    dev = []
    for t in words:
        inv = nc_invert(polys[t][1].truncate(window), window)
        vec = np.array([complex(sc.to_number(inv[w])) for w in words[:top]])
        dev.append((str(t), float(np.max(np.abs(vec - col)))))
    return NCLimitReport(g, nominal, tuple(first), tuple(strong), tuple(dev), window)
