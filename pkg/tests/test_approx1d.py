import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import chebyshev as C
from scipy import integrate
from scipy.special import iv

from pinterp.approx1d import (approx_endpoint_matched, chebyshev_coefficients,
                              chebyshev_project, corrector_norms, endpoint_correctors)
from pinterp.harness import corrector_slopes, htilde_half_error

ENDS = np.array([-1.0, 1.0])


def test_basis_function_reproduced():
    T3 = lambda x: C.chebval(x, [0, 0, 0, 1])  # noqa: E731
    for p in (3, 5, 9):
        np.testing.assert_allclose(chebyshev_project(T3, p).coeffs, np.eye(p + 1)[3], atol=1e-14)


def test_parity():
    a = chebyshev_coefficients(np.abs, 41)
    assert np.abs(a[1::2]).max() <= 1e-14


def test_exp_coefficients_closed_form():
    a = chebyshev_project(np.exp, 12).coeffs
    # exp(cos t) = I_0(1) + 2 sum_k I_k(1) cos(k t)
    ref = 2 * iv(np.arange(13), 1.0)
    ref[0] /= 2
    np.testing.assert_allclose(a, ref, rtol=1e-10, atol=1e-14)
    assert abs(a[9]) < 1e-7


def test_argument_checks():
    with pytest.raises(ValueError):
        chebyshev_project(np.exp, 5, N=10)
    with pytest.raises(ValueError):
        endpoint_correctors(0)


@pytest.mark.parametrize("p", [1, 2, 5, 17, 40])
def test_corrector_closed_forms(p):
    minus, plus = endpoint_correctors(p)
    np.testing.assert_allclose(plus(ENDS), [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(minus(ENDS), [1.0, 0.0], atol=1e-14)
    l2, h1 = corrector_norms(p)
    f = lambda x: ((1 + x) / 2) ** p  # noqa: E731
    df = lambda x: 0.5 * p * ((1 + x) / 2) ** (p - 1)  # noqa: E731
    assert l2 ** 2 == pytest.approx(integrate.quad(lambda x: f(x) ** 2, -1, 1)[0], rel=1e-10)
    assert h1 ** 2 == pytest.approx(integrate.quad(lambda x: df(x) ** 2, -1, 1)[0], rel=1e-10)
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(plus(x), f(x), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 31 - 1))
def test_polynomials_preserved(p, seed):
    c = np.random.default_rng(seed).standard_normal(p + 1)
    f = lambda x: C.chebval(x, c)  # noqa: E731
    fp = approx_endpoint_matched(f, p)
    np.testing.assert_allclose(fp.coeffs, c, atol=1e-12 * max(1, np.abs(c).max()))


@pytest.mark.parametrize("f", [np.exp, lambda x: (1 + x) ** 0.9, lambda x: np.abs(x - 0.3)])
@pytest.mark.parametrize("p", [1, 3, 8, 20])
def test_endpoints_matched(f, p):
    fp = approx_endpoint_matched(f, p)
    assert fp.N == p
    np.testing.assert_allclose(fp(ENDS), f(ENDS), atol=1e-13)


def test_spectral_convergence_exp():
    x = np.linspace(-1, 1, 2001)
    ps = np.arange(2, 13)
    errs = [np.abs(approx_endpoint_matched(np.exp, int(p))(x) - np.exp(x)).max() for p in ps]
    slope = np.polyfit(np.log(ps), np.log(errs), 1)[0]
    assert slope < -4


def test_corrector_growth_slopes():
    slopes = corrector_slopes(range(4, 65, 4))
    for s, v in slopes.items():
        assert abs(v - (s - 0.5)) <= 0.1


def test_htilde_half_error_decreases():
    f = lambda x: (1 + x) ** 0.9  # noqa: E731
    errs = [htilde_half_error(f, approx_endpoint_matched(f, p), p) for p in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2] > 0
