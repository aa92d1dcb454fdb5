from fractions import Fraction

import numpy as np
import pytest
import sympy

from szego.classical import (HankelSpec, ToeplitzSpec, canonical_moment_vector, hankel_kernel, hilbert_det_formula,
                             hilbert_gamma, hilbert_gamma_field, hilbert_gamma_squared, hilbert_kernel,
                             legendre_recurrence, three_term_polys, toeplitz_kernel)
from szego.kernel import KernelError, determinant
from szego.polys import build_polys
from szego.schur import extract_gamma, reconstruct_moments


def test_toeplitz_single_parameter_moments():
    a = 0.4
    k = toeplitz_kernel(ToeplitzSpec(1.0, [a]), 6)
    assert k[0, 1] == pytest.approx(a)
    assert k[0, 2] == pytest.approx(a * a)
    assert k[1, 4] == pytest.approx(a ** 3)


def test_toeplitz_kernel_is_shift_invariant():
    k = toeplitz_kernel(ToeplitzSpec(2.0, [0.3 + 0.2j, -0.25, 0.1j]), 9).matrix()
    for n in range(5):
        for m in range(5):
            assert abs(k[n + 3, m + 3] - k[n, m]) < 1e-13


def test_toeplitz_extraction_depends_only_on_distance():
    k = toeplitz_kernel(ToeplitzSpec(1.0, [0.5, -0.3j, 0.2]), 8)
    f = extract_gamma(k)
    for dist, want in [(1, 0.5), (2, -0.3j), (3, 0.2), (4, 0.0)]:
        for start in range(8 - dist):
            assert abs(f.gamma[start, start + dist] - want) < 1e-12


def test_toeplitz_rejects_outside_disk():
    with pytest.raises(ValueError):
        ToeplitzSpec(1.0, [1.0])
    with pytest.raises(ValueError):
        ToeplitzSpec(0.0, [])


def test_hankel_hilbert_moments():
    k = hankel_kernel(HankelSpec([Fraction(1, t + 1) for t in range(7)]), 4, "rational")
    assert k[1, 2] == sympy.Rational(1, 4)
    assert k.matrix()[3, 3] == sympy.Rational(1, 7)


def test_hankel_rejects_point_mass():
    with pytest.raises(KernelError):
        hankel_kernel(HankelSpec([1, 0, 0, 0, 0]), 3, "rational")
    with pytest.raises(KernelError):
        hankel_kernel(HankelSpec([1.0, 0.0, 0.0]), 2)


def test_hankel_needs_enough_moments():
    with pytest.raises(ValueError):
        hankel_kernel(HankelSpec([1, 0.5]), 2)


def test_three_term_legendre_matches_parameter_recurrence():
    a, b = legendre_recurrence(6)
    three = three_term_polys(a, b, 6)
    t = build_polys(hilbert_gamma_field(7))
    for n in range(7):
        assert np.max(np.abs(three[n] - t.phi(n, 0))) < 1e-10


def test_three_term_legendre_exact():
    a, b = legendre_recurrence(3, exact=True)
    three = three_term_polys(a, b, 3)
    t = build_polys(hilbert_gamma_field(4, "rational"))
    for n in range(4):
        assert all(sympy.simplify(x - y) == 0 for x, y in zip(three[n], t.phi(n, 0)))


def test_three_term_small_cases():
    assert [list(p) for p in three_term_polys([], [], 0)] == [[1.0]]
    polys = three_term_polys([0.0, 0.0], [1.0, 1.0], 2)
    assert list(polys[2]) == [-1.0, 0.0, 1.0]
    with pytest.raises(ZeroDivisionError):
        three_term_polys([0.0], [0.0], 1)


def test_hilbert_gamma_examples():
    g, d = hilbert_gamma(0, 1, exact=True)
    assert g == sympy.sqrt(3) / 2 and d == sympy.Rational(1, 2)
    g, d = hilbert_gamma(0, 2, exact=True)
    assert g == -sympy.sqrt(5) / 3 and d == sympy.Rational(2, 3)
    assert hilbert_gamma_squared(1, 1) == Fraction(15, 16)
    with pytest.raises(ValueError):
        hilbert_gamma(0, 0)


@pytest.mark.parametrize("k", range(6))
@pytest.mark.parametrize("l", range(1, 6))
def test_hilbert_gamma_on_unit_circle(k, l):
    _, d = hilbert_gamma(k, l, exact=True)
    assert hilbert_gamma_squared(k, l) + Fraction(d.p, d.q) ** 2 == 1


def test_hilbert_field_rebuilds_hilbert_kernel():
    k = reconstruct_moments(hilbert_gamma_field(6, "rational"))
    want = hilbert_kernel(6, "rational")
    for i in range(6):
        for j in range(i, 6):
            assert sympy.simplify(k[i, j] - want[i, j]) == 0


def test_hilbert_extraction_matches_closed_form_exact():
    f = extract_gamma(hilbert_kernel(6, "rational"))
    for i in range(6):
        for j in range(i + 1, 6):
            assert sympy.simplify(f.gamma[i, j] - hilbert_gamma(i, j - i, exact=True)[0]) == 0


def test_canonical_moments_first_values():
    p = canonical_moment_vector(6)
    assert p[0] == Fraction(1, 2) and p[1] == Fraction(1, 3) and p[3] == Fraction(2, 5)
    assert all(v == Fraction(1, 2) for v in p[::2])


def test_canonical_moments_reproduce_legendre_recurrence():
    # zeta_1 = p_1, zeta_k = (1 - p_{k-1}) p_k; a_n = zeta_{2n} + zeta_{2n+1}, b_n^2 = zeta_{2n+1} zeta_{2n+2}
    p = canonical_moment_vector(14)
    zeta = [Fraction(0), p[0]] + [(1 - p[k - 2]) * p[k - 1] for k in range(2, 15)]
    a, b = legendre_recurrence(6, exact=True)
    for n in range(6):
        assert zeta[2 * n] + zeta[2 * n + 1] == Fraction(1, 2) == a[n]
        assert sympy.Rational(zeta[2 * n + 1] * zeta[2 * n + 2]) == sympy.simplify(b[n] ** 2)


@pytest.mark.parametrize("n", range(7))
def test_hilbert_determinant_formula(n):
    k = hilbert_kernel(n + 1, "rational")
    val = hilbert_det_formula(n)
    assert sympy.Rational(val.numerator, val.denominator) == determinant(k, 0, n)


def test_hilbert_determinant_formula_first_values():
    assert hilbert_det_formula(0) == 1
    assert hilbert_det_formula(1) == Fraction(1, 12)
    assert hilbert_det_formula(2) == Fraction(1, 2160)
    with pytest.raises(ValueError):
        hilbert_det_formula(-1)
