import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from szego.asymptotics import (LimitReport, angle_det, angle_det_product, det_ratio, determinant_from_field,
                               first_limit, straddle_product, strong_limit)
from szego.classical import hilbert_gamma_field, hilbert_kernel
from szego.kernel import MomentKernel, determinant
from szego.schur import GammaField, extract_gamma, reconstruct_moments
from szego.triangular import spectral_factor

from conftest import decaying_field, random_field, random_pd_matrix


def test_limit_report_window_statistics():
    rep = LimitReport.from_sequence("x", 0, [(i, v) for i, v in enumerate([5, 4, 3, 2.5, 2.4])], window=3)
    assert rep.limit_estimate == pytest.approx((3 + 2.5 + 2.4) / 3)
    assert rep.residual == pytest.approx(0.6)
    with pytest.raises(ValueError):
        LimitReport.from_sequence("x", 0, [])


def test_det_ratio_hilbert_exact():
    res = det_ratio(hilbert_kernel(3, "rational"), 0, 1)
    assert res.ratio == sympy.Rational(1, 4)
    assert res.poly == sympy.Rational(1, 4)
    assert res.product == sympy.Rational(1, 4)


def test_det_ratio_trivial_cases():
    res = det_ratio(MomentKernel.from_matrix(np.eye(6)), 1, 4)
    assert res.ratio == 1 and res.spread() == 0
    f = GammaField(np.array([2.0, 3.0, 5.0]), np.zeros((3, 3)))
    res = det_ratio(reconstruct_moments(f), 1, 2, field=f)
    assert res.ratio == pytest.approx(3.0) and res.product == 3.0


def test_det_ratio_checks_range():
    with pytest.raises(IndexError):
        det_ratio(MomentKernel.from_matrix(np.eye(3)), 2, 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_determinant_identity_on_random_kernels(seed):
    rng = np.random.default_rng(seed)
    k = MomentKernel.from_matrix(random_pd_matrix(rng, 13))
    f = extract_gamma(k)
    for r in range(12):
        for q in range(r + 1, 13):
            res = det_ratio(k, r, q, field=f)
            assert abs(res.ratio / res.poly - 1) < 1e-8
            assert abs(res.ratio / res.product - 1) < 1e-8


def test_determinant_product_formula(rng):
    for _ in range(5):
        f = random_field(rng, 10)
        k = reconstruct_moments(f)
        for r, q in [(0, 9), (2, 7), (4, 4)]:
            assert determinant(k, r, q) == pytest.approx(np.real(determinant_from_field(f, r, q)), rel=1e-8)


def test_determinant_product_formula_exact():
    f = hilbert_gamma_field(7, "rational")
    k = hilbert_kernel(7, "rational")
    for r, q in [(0, 6), (1, 5), (3, 6)]:
        assert sympy.nsimplify(determinant_from_field(f, r, q)) == determinant(k, r, q)


def test_first_limit_zero_field():
    rep = first_limit(GammaField.zeros(12, diag=3.0), 2, 8)
    assert all(v == 3.0 for _, v in rep.sequence)
    assert not rep.degenerate


def test_first_limit_hilbert_degenerate():
    rep = first_limit(hilbert_gamma_field(66), 0, 64)
    q = np.array([n for n, _ in rep.sequence])
    assert np.allclose([v for _, v in rep.sequence], 1 / (q + 1) ** 2, rtol=1e-12)
    assert rep.degenerate


def test_first_limit_decaying_matches_factor_diagonal():
    f = decaying_field(64)
    k = reconstruct_moments(f)
    th, _ = spectral_factor(k)
    for r in range(3):
        rep = first_limit(f, r, 40)
        assert not rep.degenerate
        assert rep.residual < 1e-6
        assert rep.limit_estimate == pytest.approx(np.real(th[r, r]) ** 2, abs=1e-8)
        values = [v for _, v in rep.sequence]
        assert np.all(np.diff(values) <= 0)


def test_first_limit_sequence_matches_determinants():
    f = decaying_field(20)
    k = reconstruct_moments(f)
    rep = first_limit(f, 1, 12)
    for q, v in rep.sequence[1:]:
        assert v == pytest.approx(determinant(k, 1, q) / determinant(k, 2, q), rel=1e-8)


def test_strong_limit_zero_field():
    det_rep, prod_rep = strong_limit(GammaField.zeros(40), 5)
    assert all(v == pytest.approx(1.0) for _, v in det_rep.sequence)
    assert all(v == 1.0 for _, v in prod_rep.sequence)


def test_strong_limit_single_parameter():
    g = 0.6
    f = GammaField.from_function(lambda k, j: g if (k, j) == (0, 1) else 0.0, 40)
    det_rep, prod_rep = strong_limit(f, 6)
    assert det_rep.sequence[0][1] == pytest.approx(1 / (1 - g * g))
    assert prod_rep.sequence[0][1] == pytest.approx(1 / (1 - g * g))
    for n in range(1, 7):
        assert det_rep.sequence[n][1] == pytest.approx(1.0)
        assert prod_rep.sequence[n][1] == 1.0


def test_strong_limit_routes_agree_on_decaying_field():
    f = decaying_field(60)
    det_rep, prod_rep = strong_limit(f, 20)
    for (_, a), (_, b) in zip(det_rep.sequence, prod_rep.sequence):
        assert abs(a - b) < 1e-6
    # toeplitz-like field: the product over distance m contributes m factors
    dist = np.array([1 - 0.25 * 9.0 ** -m for m in range(1, 33)])
    nominal = np.prod(dist ** np.arange(1, 33))
    assert abs(prod_rep.limit_estimate - 1 / nominal) < 1e-4


def test_strong_limit_raw_determinants_match_product_form():
    f = decaying_field(50)
    k = reconstruct_moments(f, 14)
    det_rep, _ = strong_limit(f, 13, horizon=45, kernel=k)
    d2 = np.real(f.dee_matrix()) ** 2
    for n, v in det_rep.sequence:
        assert v == pytest.approx(1 / straddle_product(f, n, 45), rel=1e-10)
        assert np.all(d2 <= 1)


def test_strong_limit_horizon_checked():
    with pytest.raises(ValueError):
        strong_limit(GammaField.zeros(10), 5)


def test_angle_det_examples():
    assert angle_det(MomentKernel.from_matrix(np.eye(5)), 0, 2, 4) == 1
    assert angle_det(hilbert_kernel(2, "rational"), 0, 0, 1) == sympy.Rational(1, 4)
    with pytest.raises(IndexError):
        angle_det(MomentKernel.from_matrix(np.eye(3)), 1, 0, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_angle_det_routes_agree_and_bounded(seed):
    f = random_field(np.random.default_rng(seed), 6, max_mod=0.8)
    k = reconstruct_moments(f)
    for r, l, q in [(0, 1, 3), (0, 2, 5), (1, 3, 4)]:
        a = angle_det(k, r, l, q)
        assert 0 < a <= 1 + 1e-12
        assert abs(a - angle_det_product(f, r, l, q)) < 1e-10
