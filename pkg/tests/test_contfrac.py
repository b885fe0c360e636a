import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from dtnsquare.circulant import minus_laplacian, spectrum
from dtnsquare.contfrac import (
    ContFracCoeffs,
    beta_rational,
    conjecture_coeffs,
    default_precision,
    eval_beta,
    eval_real,
    lambda_points,
    line_check,
    real_terms,
    recover_coeffs,
    root_bound,
    verify_conjecture,
)
from dtnsquare.errors import DegenerateFractionError, InvalidSizeError, PoleEncounteredError


def _cot(x):
    return math.cos(x) / math.sin(x)


def test_default_precision():
    assert default_precision(40) == 53
    assert default_precision(41) == 200


def test_k1_coefficient():
    (c1,) = conjecture_coeffs(1).c
    assert complex(c1) == pytest.approx(-1j / math.sqrt(3), abs=1e-16)


def test_k2_coefficients():
    c = [complex(v) for v in conjecture_coeffs(2).c]
    assert c[0] == pytest.approx(-1.3763819204711736j, abs=1e-15)
    assert c[1] == pytest.approx(-0.3249196962329063j, abs=1e-15)


def test_k3_imaginary_parts_increase_towards_zero():
    im = [float(v.imag) for v in conjecture_coeffs(3).c]
    assert im[0] < im[1] < im[2] < 0


@pytest.mark.parametrize("k", [1, 2, 5, 17, 40])
def test_coefficients_are_minus_i_cot(k):
    for l, c in enumerate(conjecture_coeffs(k).c, start=1):
        expected = -_cot(l * math.pi / (2 * k + 1))
        assert abs(c.real) <= 4 * 2**-52 * abs(c)
        assert float(c.imag) == pytest.approx(expected, rel=1e-14)


def test_coefficients_high_precision():
    k = 60
    with mpmath.workprec(200):
        for l, c in enumerate(conjecture_coeffs(k).c, start=1):
            assert c.real == 0
            assert abs(c.imag + mpmath.cot(mpmath.pi * l / (2 * k + 1))) < mpmath.mpf(2) ** -190


def test_invalid_k():
    with pytest.raises(InvalidSizeError):
        conjecture_coeffs(0)
    with pytest.raises(InvalidSizeError):
        lambda_points(-1)


def test_lambda_points_k2():
    lam = [complex(v) for v in lambda_points(2).lam]
    assert lam[0] == pytest.approx(2j * math.sin(math.pi / 5), abs=1e-15)
    assert lam[0].imag == pytest.approx(1.1755705, abs=1e-7)
    assert lam[1].imag == pytest.approx(1.9021130, abs=1e-7)


def test_lambda_points_k1():
    assert complex(lambda_points(1).lam[0]) == pytest.approx(1j * math.sqrt(3), abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 6, 11])
def test_lambda_squared_moduli_are_laplacian_eigenvalues(k):
    lam = lambda_points(k).lam
    assert all(v.real == 0 and v.imag > 0 for v in lam)
    moduli = np.sort([float(abs(v)) ** 2 for v in lam])
    mu = np.sort(spectrum(minus_laplacian(2 * k + 1)))
    # nonzero eigenvalues come in equal pairs (m, n - m); each pair matches one l
    np.testing.assert_allclose(moduli, mu[1::2], atol=1e-13)
    np.testing.assert_allclose(moduli, mu[2::2], atol=1e-13)


def test_eval_beta_trivial():
    assert eval_beta([2], 3) == 6
    assert eval_beta([1, 1], 1) == 2


def test_eval_beta_k2_against_real_formula():
    value = eval_beta(conjecture_coeffs(2), lambda_points(2).lam[0])
    by_hand = 2 * _cot(2 * math.pi / 5) * math.sin(math.pi / 5) + 1 / (2 * math.cos(math.pi / 5))
    assert abs(value - 1) < 1e-14
    assert by_hand == pytest.approx(1, abs=1e-14)


def test_eval_beta_pole():
    with pytest.raises(PoleEncounteredError) as info:
        eval_beta([1, 1, 1], 0)
    assert info.value.floor == 1


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=10), min_size=1, max_size=8),
    st.complex_numbers(min_magnitude=0.1, max_magnitude=5),
)
def test_beta_is_odd(coeffs, lam):
    try:
        plus = complex(eval_beta(coeffs, lam))
        minus = complex(eval_beta(coeffs, -lam))
    except PoleEncounteredError:
        assume(False)
    assert minus == pytest.approx(-plus, rel=1e-9, abs=1e-9)


def test_real_terms_values():
    terms = [float(t) for t in real_terms(2, 1)]
    assert terms == pytest.approx([1.618034, 0.381966], abs=1e-6)
    assert terms[0] == pytest.approx(2 * math.cos(math.pi / 5), abs=1e-15)
    assert [float(t) for t in real_terms(1, 1)] == pytest.approx([1.0], abs=1e-15)


def test_real_terms_bad_l():
    with pytest.raises(InvalidSizeError):
        real_terms(3, 4)


@pytest.mark.parametrize("k", [1, 2, 7, 20, 40])
def test_complex_and_real_paths_agree(k):
    coeffs, lam = conjecture_coeffs(k), lambda_points(k).lam
    for l in range(1, k + 1):
        complex_path = eval_beta(coeffs, lam[l - 1])
        real_path = eval_real(real_terms(k, l), 53)
        assert abs(complex_path.imag) == 0
        assert abs(complex_path - real_path) < 8 * 2**-52


def test_verify_conjecture_k40():
    rep = verify_conjecture(40)
    assert rep.prec == 53
    assert rep.passed and rep.max_residual <= 1e-8
    assert len(rep.residuals) == 40


def test_verify_conjecture_k1_is_exact():
    rep = verify_conjecture(1, tol=1e-300)
    assert rep.residuals == [0]


@pytest.mark.parametrize("k", [10, 50])
def test_residual_is_order_unit_roundoff(k):
    # a true identity leaves O(k) units of roundoff at every precision
    for prec in (53, 100, 200):
        r = verify_conjecture(k, prec).max_residual
        assert r * mpmath.mpf(2) ** prec <= 64 * k


def test_verify_conjecture_records_pole_as_failure():
    from dtnsquare import contfrac

    rep = contfrac.ConjectureReport(2, 53, 1e-8, [0.0, None], {2: "pole"})
    assert rep.passed_per_l == [True, False]
    assert not rep.passed and rep.max_residual is None


def test_beta_rational_one_floor():
    r = beta_rational(ContFracCoeffs((2.5,)))
    assert [complex(v) for v in r.p] == [0, 2.5]
    assert [complex(v) for v in r.q] == [1]


def test_beta_rational_two_floors():
    c1, c2 = 2.0, 3.0
    r = beta_rational(ContFracCoeffs((c1, c2)))
    # c2 lambda + 1/(c1 lambda) = (c2 c1 lambda^2 + 1) / (c1 lambda)
    assert [complex(v) for v in r.p] == [1, 0, c1 * c2]
    assert [complex(v) for v in r.q] == [0, c1]


@pytest.mark.parametrize("k", range(1, 13))
def test_beta_rational_parity_and_degrees(k):
    r = beta_rational(conjecture_coeffs(k))
    assert r.p_degree == k and r.q_degree == k - 1
    assert all(v == 0 for v in r.p[(k + 1) % 2::2])
    assert all(v == 0 for v in r.q[k % 2::2])


@pytest.mark.parametrize("k", range(1, 13))
def test_beta_rational_matches_eval(k):
    rng = np.random.default_rng(k)
    coeffs = ContFracCoeffs(tuple(rng.standard_normal(k) + 1j * rng.standard_normal(k)))
    r = beta_rational(coeffs)
    checked = 0
    while checked < 20:
        lam = complex(*rng.uniform(-2, 2, 2))
        try:
            direct = complex(eval_beta(coeffs, lam))
        except PoleEncounteredError:
            continue
        assert complex(r(lam)) == pytest.approx(direct, rel=1e-10)
        checked += 1


def test_beta_rational_conjecture_k3_at_lambda2():
    r = beta_rational(conjecture_coeffs(3))
    assert abs(r(lambda_points(3).lam[1]) - 1) < 1e-12


def test_beta_rational_zero_coefficient():
    with pytest.raises(DegenerateFractionError):
        beta_rational(ContFracCoeffs((1.0, 0.0)))


def test_line_check_single_floor():
    rep = line_check(beta_rational(conjecture_coeffs(1)))
    assert rep.p_sign_changes == 1 and rep.passed


def test_line_check_grid_minimum():
    with pytest.raises(InvalidSizeError):
        line_check(beta_rational(conjecture_coeffs(1)), grid_size=32)


def test_line_check_conjecture_zeros_on_real_axis():
    r = beta_rational(conjecture_coeffs(3))
    real = line_check(r, axis="real")
    assert real.passed and real.interlaced
    assert real.max_imag_ratio < 1e-12
    # on lambda = i y the factor c_j (i y) has one sign, so only the root at 0 shows
    imag = line_check(r, axis="imaginary")
    assert (imag.p_sign_changes, imag.q_sign_changes) == (1, 0)
    assert not imag.passed


@pytest.mark.parametrize("k", [2, 5, 8, 12, 20])
def test_line_check_conjecture_auto_span(k):
    r = beta_rational(conjecture_coeffs(k, 200))
    rep = line_check(r, axis="real", span=None)
    assert rep.passed and rep.interlaced


def test_line_check_random_positive_imaginary():
    rng = np.random.default_rng(11)
    for _ in range(5):
        coeffs = ContFracCoeffs(tuple(1j * rng.uniform(0.5, 2.0, 4)))
        rep = line_check(beta_rational(coeffs), axis="real")
        assert rep.passed and rep.interlaced


def test_root_bound_contains_roots():
    r = beta_rational(conjecture_coeffs(8, 200))
    with mpmath.workprec(200):
        roots = mpmath.polyroots(list(reversed(r.p)), maxsteps=200, extraprec=400)
    assert max(abs(z) for z in roots) < root_bound(r.p)


def test_recover_k1():
    (c1,) = recover_coeffs(1).c
    assert abs(complex(c1) + 1j / math.sqrt(3)) < 1e-12


def test_recover_k2():
    got = recover_coeffs(2, 53).c
    want = conjecture_coeffs(2, 53).c
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-10


def test_recover_high_precision_k12():
    with mpmath.workprec(200):
        got = recover_coeffs(12, 200).c
        want = conjecture_coeffs(12, 200).c
        assert max(abs(a - b) for a, b in zip(got, want)) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("k", range(1, 13))
def test_recover_precision_scaled(k):
    with mpmath.workprec(200):
        got = recover_coeffs(k, 200).c
        want = conjecture_coeffs(k, 200).c
        assert max(abs(a - b) for a, b in zip(got, want)) < mpmath.mpf(2) ** (-200 + 20 + 4 * k)


def test_recovered_fraction_hits_one():
    k = 5
    coeffs = recover_coeffs(k, 100)
    for lam in lambda_points(k, 100).lam:
        assert abs(eval_beta(coeffs, lam) - 1) < 1e-25
    # and the ratio is odd, so beta(-lambda_l) = -1
    with mpmath.workprec(100):
        neg = -lambda_points(k, 100).lam[0]
    assert abs(eval_beta(coeffs, neg) + 1) < 1e-25


def test_complex_identity_cross_check_with_cmath():
    k, l = 4, 3
    w = cmath.exp(1j * math.pi / (2 * k + 1))
    c = [(w**j + w**-j) / (w**j - w**-j) for j in range(1, k + 1)]
    lam = w**l - w**-l
    assert abs(complex(eval_beta(c, lam)) - 1) < 1e-13
