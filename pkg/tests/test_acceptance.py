"""Acceptance gate: one test per criterion, each leaving a PASS/FAIL line in the terminal summary."""
import numpy as np
import sympy

from szego.asymptotics import angle_det, first_limit, strong_limit
from szego.classical import hilbert_det_formula, hilbert_gamma, hilbert_gamma_field, hilbert_kernel
from szego.free_semigroup import (TreeGammaField, Word, nc_limits, nc_polys, stationary_kernel, word_count,
                                  words_up_to)
from szego.kernel import MomentKernel, determinant, log_determinant, szego_class_report
from szego.polys import build_polys, derivative, evaluate
from szego.schur import catalan, extract_gamma, lattice_expand, reconstruct_moments, rotation_product
from szego.triangular import convergence_report, spectral_factor

from conftest import GOLDEN, decaying_field, random_field, random_pd_matrix, record

SEED = 20240611


def test_criterion_01_catalan_counts():
    checks = []
    for k in range(4):
        counts = [len(lattice_expand(k, k + l)) for l in range(1, 8)]
        checks.append((f"k={k}", counts == [1, 2, 5, 14, 42, 132, 429], str(counts)))
    checks.append(("catalan", [catalan(l) for l in range(1, 8)] == [1, 2, 5, 14, 42, 132, 429], "1..7"))
    assert record(1, checks)


def test_criterion_02_printed_expansions():
    checks = []
    for j in (1, 2, 3):
        want = sorted((GOLDEN / f"lattice_0_{j}.txt").read_text().splitlines())
        got = sorted(str(t) for t in lattice_expand(0, j))
        checks.append((f"s(0,{j})", got == want, f"{len(got)} terms"))
    assert record(2, checks)


def test_criterion_03_hilbert_parameters():
    m = 9
    exact = extract_gamma(hilbert_kernel(m, "rational"))
    bad = []
    for k in range(m):
        for l in range(1, m - k):
            g, d = hilbert_gamma(k, l, exact=True)
            got = exact.gamma[k, k + l]
            same_square = sympy.nsimplify(sympy.expand(got ** 2)) == sympy.nsimplify(g ** 2)
            same_sign = sympy.sign(got) == sympy.sign(g)
            if not (same_square and same_sign and sympy.simplify(exact.dee(k, k + l) - d) == 0):
                bad.append((k, l))
    floats = extract_gamma(hilbert_kernel(m))
    err = max(max(abs(floats.gamma[k, k + l] - hilbert_gamma(k, l)[0]),
                  abs(floats.dee(k, k + l) - hilbert_gamma(k, l)[1]))
              for k in range(m) for l in range(1, m - k))
    checks = [("rational exact", not bad, f"{len(bad)} mismatches"),
              ("float64 <= 1e-9", err <= 1e-9, f"max abs error {err:.2e}")]
    assert record(3, checks)


def test_criterion_04_shifted_legendre():
    s3, s5, s7 = np.sqrt(3), np.sqrt(5), np.sqrt(7)
    want = {1: s3 * np.array([-1, 2]), 2: s5 * np.array([1, -6, 6]), 3: s7 * np.array([-1, 12, -30, 20])}
    t = build_polys(hilbert_gamma_field(4))
    errs = {n: float(np.max(np.abs(t.phi(n, 0) - w))) for n, w in want.items()}
    assert record(4, [(f"phi{n}", e < 1e-10, f"{e:.1e}") for n, e in errs.items()])


def test_criterion_05_hilbert_determinant_formula():
    k = hilbert_kernel(7, "rational")
    checks = []
    for n in range(7):
        val = hilbert_det_formula(n)
        direct = determinant(k, 0, n)
        checks.append((f"n={n}", sympy.Rational(val.numerator, val.denominator) == direct, str(direct)))
    assert record(5, checks)


def test_criterion_06_round_trips():
    rng = np.random.default_rng(SEED)
    field_dev = kernel_dev = route_dev = 0.0
    for _ in range(100):
        f = random_field(rng, 12, max_mod=0.9)
        k = reconstruct_moments(f)
        back = extract_gamma(k)
        field_dev = max(field_dev, float(np.max(np.abs(back.gamma - f.gamma))))
        kernel_dev = max(kernel_dev, float(np.max(np.abs(reconstruct_moments(back).matrix() - k.matrix()))))
        # inverse Gram S = inv(A^T conj(A)) formed as B B^H with B = conj(A)^-1
        inv_a = np.linalg.solve(np.conj(build_polys(f).coefficient_matrix(0)), np.eye(12))
        route_dev = max(route_dev, float(np.max(np.abs(inv_a @ inv_a.conj().T - k.matrix()))))
    checks = [("gamma->K->gamma", field_dev < 1e-10, f"{field_dev:.1e}"),
              ("K->gamma->K", kernel_dev < 1e-10, f"{kernel_dev:.1e}"),
              ("rotation vs inverse Gram", route_dev < 1e-10, f"{route_dev:.1e}")]
    assert record(6, checks)


def test_criterion_07_determinant_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(10):
        k = MomentKernel.from_matrix(random_pd_matrix(rng, 13))
        f = extract_gamma(k)
        t = build_polys(f)
        for r in range(12):
            for q in range(r + 1, 13):
                ratio = determinant(k, r, q) / determinant(k, r + 1, q)
                sharp0 = t.phi_sharp(q - r, r)[0]
                worst = max(worst, abs(ratio * abs(sharp0) ** 2 - 1))
    assert record(7, [("max |ratio |phi#(0)|^2 - 1|", worst < 1e-8, f"{worst:.1e}")])


def test_criterion_08_first_limit():
    f = decaying_field(80)
    k = reconstruct_moments(f, 41)
    theta, _ = spectral_factor(reconstruct_moments(f, 64))
    seq_err = resid = limit_err = 0.0
    for r in range(3):
        rep = first_limit(f, r, 40 - r)
        for q in range(r + 1, 41):
            direct = np.exp(log_determinant(k, r, q) - log_determinant(k, r + 1, q))
            seq_err = max(seq_err, abs(direct - rep.sequence[q - r][1]))
        resid = max(resid, rep.residual)
        limit_err = max(limit_err, abs(rep.limit_estimate - np.real(theta[r, r]) ** 2))
    checks = [("ratio vs product", seq_err < 1e-8, f"{seq_err:.1e}"),
              ("residual at q=40", resid < 1e-6, f"{resid:.1e}"),
              ("limit vs Theta[r,r]^2", limit_err < 1e-6, f"{limit_err:.1e}")]
    assert record(8, checks)


def test_criterion_09_strong_limit():
    n, horizon = 20, 60
    f = decaying_field(horizon + 1)
    d2 = np.real(f.dee_matrix()) ** 2
    log_g = [np.log(np.real(f.diag[l])) + np.sum(np.log(d2[l, l + 1:])) for l in range(n + 1)]
    k = reconstruct_moments(f, n + 1)
    raw = float(np.exp(log_determinant(k, 0, n) - np.sum(log_g)))
    _, prod_rep = strong_limit(f, n, horizon)
    product = prod_rep.sequence[n][1]
    dist = np.array([np.sqrt(1 - (0.5 * 3.0 ** -m) ** 2) for m in range(1, horizon + 1)])
    inv_l = 1 / float(np.prod(dist ** (2 * np.arange(1, horizon + 1))))
    checks = [("|D/prod g - 1/L|", abs(raw - inv_l) < 1e-4, f"{abs(raw - inv_l):.1e}"),
              ("determinant vs d-product", abs(raw - product) < 1e-6, f"{abs(raw - product):.1e}")]
    assert record(9, checks)


def test_criterion_10_polynomial_convergence():
    f = decaying_field(38)
    rep = convergence_report(f, reconstruct_moments(f), 30, 8)
    _, phi_sup, dev = rep.rows[-1]
    hil = szego_class_report(hilbert_gamma_field(66), horizon=64, rows=1)
    h = np.arange(65)
    partial_err = float(np.max(np.abs(hil.partials[0] * (h + 1) ** 2 - 1)))
    hil_conv = convergence_report(hilbert_gamma_field(10), reconstruct_moments(hilbert_gamma_field(10)), 6, 4)
    checks = [("sup |Phi_30| in window", phi_sup < 1e-6, f"{phi_sup:.1e}"),
              ("sup |(Phi#_30)^-1 - Theta|", dev < 1e-6, f"{dev:.1e}"),
              ("Hilbert flagged", hil.classification == "degenerate" and not hil_conv.szego, hil.classification),
              ("Hilbert partials 1/(M+1)^2", partial_err < 1e-12, f"{partial_err:.1e}")]
    assert record(10, checks)


def test_criterion_11_noncommutative_suite():
    depth, N = 3, 2
    words = words_up_to(N, depth)
    exact_field = TreeGammaField(N, {(1,): sympy.Rational(1, 2), (2,): sympy.Rational(-1, 3),
                                     (1, 2): sympy.Rational(1, 5), (2, 2): sympy.Rational(1, 7),
                                     (2, 1, 1): sympy.Rational(1, 9)})
    k = stationary_kernel(exact_field, depth, "rational")
    structure_bad = 0
    for i, s in enumerate(words):
        for j in range(i, len(words)):
            t = words[j]
            v = sympy.simplify(k[i, j])
            if s.is_prefix_of(t):
                want = sympy.simplify(k[0, Word(t.letters[len(s):], N).rank()])
            else:
                want = 0
            structure_bad += v != want

    rng = np.random.default_rng(SEED)
    rand = TreeGammaField.from_function(lambda w: complex(*rng.uniform(-0.3, 0.3, 2)), N, depth)
    s = stationary_kernel(rand, depth).matrix()
    p = nc_polys(rand, depth)
    a = np.array([p[w][0].vector(words) for w in words], dtype=complex)
    ortho = float(np.max(np.abs(np.conj(a) @ s @ a.T - np.eye(len(words)))))

    single = nc_limits(TreeGammaField(N, {(1,): 0.5}), depth)
    single_err = max(abs(v - 0.75) for _, v, _ in single.first)

    decay = nc_limits(TreeGammaField.from_function(lambda w: 0.25 ** len(w), N, depth), depth)
    first_gap = abs(decay.first_gap())
    strong_last = decay.strong[-1][1]
    nominal_gap = abs(strong_last - 1 / decay.nominal_L)
    straddle_gap = decay.strong_gap()
    checks = [("stationarity and prefix support (exact)", structure_bad == 0, f"{structure_bad} bad entries"),
              ("orthonormal", ortho < 1e-10, f"{ortho:.1e}"),
              ("single gamma ratio 0.75", single_err < 1e-12, f"{single_err:.1e}"),
              ("single gamma L 0.75", abs(single.nominal_L - 0.75) < 1e-12, f"{single.nominal_L:.6f}"),
              ("decaying first ratio vs partial g", first_gap < 1e-3, f"{first_gap:.1e}"),
              ("decaying strong ratio vs partial 1/L", nominal_gap < 1e-3,
               f"{strong_last:.4f} vs {1 / decay.nominal_L:.4f}"),
              ("decaying strong ratio vs finite straddle product", straddle_gap < 1e-3, f"{straddle_gap:.1e}")]
    assert len(words) == word_count(N, depth) == 15
    assert record(11, checks)


def test_criterion_12_property_suite():
    rng = np.random.default_rng(SEED)
    ortho = fd = unit = 0.0
    angle_ok = True
    for _ in range(50):
        f = random_field(rng, 7, max_mod=0.8)
        t = build_polys(f)
        s = reconstruct_moments(f)
        m = s.matrix()
        for l in range(7):
            a = t.coefficient_matrix(l)
            ortho = max(ortho, float(np.max(np.abs(np.conj(a) @ m[l:, l:] @ a.T - np.eye(7 - l)))))
        for kk, j in [(0, 6), (1, 4), (2, 3)]:
            u = rotation_product(f, kk, j)
            unit = max(unit, float(np.max(np.abs(u.conj().T @ u - np.eye(j - kk + 1)))))
        for r, l, q in [(0, 2, 6), (1, 1, 5), (0, 0, 1)]:
            v = angle_det(s, r, l, q)
            angle_ok &= 0 < v <= 1 + 1e-12
        poly = rng.normal(size=6)
        dpoly = derivative(poly, 1)
        for x in rng.uniform(-1, 1, 3):
            h = 1e-5
            num = (evaluate(poly, x + h) - evaluate(poly, x - h)) / (2 * h)
            fd = max(fd, abs(num - evaluate(dpoly, x)) / max(1.0, abs(evaluate(dpoly, x))))
    bijective = True
    for n_letters, depth in [(1, 20), (2, 6), (3, 4)]:
        ws = words_up_to(n_letters, depth)
        bijective &= [w.rank() for w in ws] == list(range(len(ws)))
        bijective &= all(ws[i].succ() == ws[i + 1] and ws[i] < ws[i + 1] for i in range(len(ws) - 1))
        bijective &= len(ws) == word_count(n_letters, depth)
    checks = [("orthonormality", ortho < 1e-10, f"{ortho:.1e}"),
              ("derivative vs finite difference", fd < 1e-6, f"{fd:.1e}"),
              ("rotation unitarity", unit < 1e-12, f"{unit:.1e}"),
              ("angle_det in (0,1]", bool(angle_ok), "50 instances"),
              ("rank bijection", bool(bijective), "N=1,2,3")]
    assert record(12, checks)
