import math

import numpy as np
import pytest
from scipy import integrate

from pinterp.geometry import as_element
from pinterp.harness import check_poincare
from pinterp.modal import ModalField, modal_basis
from pinterp.poincare import (A_polynomial, R_polynomial, SmoothingKernel, apply_A, apply_R,
                              default_kernel, regular_decompose)

T = as_element("triangle")
KER = default_kernel(T)
PTS = np.array([[0.0, 0.5], [-0.5, 0.3], [0.4, 0.9], [0.1, 1.4], [0.7, 0.1]])


@pytest.mark.parametrize("family", ["poly", "exp"])
def test_kernel_has_unit_mass(family):
    k = default_kernel(T, family)
    mass, _ = integrate.quad(lambda r: 2 * math.pi * r * k.profile(r / k.radius), 0, k.radius,
                             limit=200)
    assert mass == pytest.approx(1.0, rel=1e-9)
    assert k.fits_in(T)


def test_kernel_validation():
    with pytest.raises(ValueError):
        default_kernel(T, radius=0.9)
    with pytest.raises(ValueError):
        SmoothingKernel((0.0, 0.5), 0.3, family="gauss")
    with pytest.raises(ValueError):
        SmoothingKernel((0.0, 0.5), -1.0)


def test_zero_inputs():
    assert np.abs(apply_R(lambda x: np.zeros(len(x)), KER, PTS, 0)).max() == 0.0
    assert np.abs(apply_A(lambda x: np.zeros((len(x), 2)), KER, PTS, 0)).max() == 0.0


def test_constant_field():
    # A (1, 0) = x1 - (center)_1 since theta has unit mass and mean at the center
    a = apply_A(lambda x: np.tile([1.0, 0.0], (len(x), 1)), KER, PTS, 0)
    np.testing.assert_allclose(a, PTS[:, 0] - KER.center[0], atol=1e-12)
    Au = A_polynomial(lambda x: np.tile([1.0, 0.0], (len(x), 1)), KER, T, 0)
    assert Au.fit_residual(lambda x: x[:, 0] - KER.center[0], PTS) <= 1e-9
    # R 1 = (x - c)^perp / 2, whose curl is 1
    r = apply_R(lambda x: np.ones(len(x)), KER, PTS, 0)
    d = PTS - np.asarray(KER.center)
    np.testing.assert_allclose(r, 0.5 * np.column_stack([-d[:, 1], d[:, 0]]), atol=1e-12)


@pytest.mark.parametrize("kind", ["triangle", "square"])
@pytest.mark.parametrize("deg", [1, 3, 5])
def test_right_inverse_identities(kind, deg):
    el = as_element(kind)
    k = default_kernel(el)
    rng = np.random.default_rng(deg)
    pts = el.centroid + 0.4 * rng.uniform(-1, 1, size=(8, 2))
    psi = ModalField(kind, deg, rng.standard_normal(modal_basis(kind, deg).dim))
    np.testing.assert_allclose(R_polynomial(psi, k, el, deg).curl(pts), psi(pts), atol=1e-10)
    phi = ModalField(kind, deg + 1, rng.standard_normal(modal_basis(kind, deg + 1).dim))
    Au = A_polynomial(phi.gradient, k, el, deg)
    np.testing.assert_allclose(Au.gradient(pts), phi.gradient(pts), atol=1e-10)
    # A reproduces phi up to a constant
    diff = Au(pts) - phi(pts)
    assert np.ptp(diff) <= 1e-10


def test_decomposition_of_gradient():
    u = lambda x: np.column_stack([x[:, 1], x[:, 0]])  # noqa: E731
    dec = regular_decompose(u, lambda x: np.zeros(len(x)), KER, T, degree=1)
    assert np.abs(dec.v(PTS)).max() <= 1e-12
    np.testing.assert_allclose(dec.psi.gradient(PTS), u(PTS), atol=1e-10)


def test_decomposition_rotation_and_smooth():
    rot = lambda x: np.column_stack([-x[:, 1], x[:, 0]])  # noqa: E731
    dec = regular_decompose(rot, lambda x: np.full(len(x), 2.0), KER, T, degree=1)
    assert dec.residual(rot, PTS) <= 1e-8
    s = lambda x: np.column_stack([np.sin(x[:, 1]), np.zeros(len(x))])  # noqa: E731
    dec = regular_decompose(s, lambda x: -np.cos(x[:, 1]), KER, T)
    assert dec.residual(s, PTS) <= 1e-6
    # v = R(curl u) carries the whole curl
    np.testing.assert_allclose(dec.v.curl(PTS), -np.cos(PTS[:, 1]), atol=1e-7)


@pytest.mark.parametrize("kind", ["triangle", "square"])
def test_check_poincare(kind):
    rep = check_poincare(max_degree=6, element=kind)
    assert rep.passed, rep.lines()
