import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pinterp.extension import BoundaryTrace, discrete_harmonic_extend, legendre_to_edge_modes
from pinterp.harness import extension_checks
from pinterp.quadrature import element_rule
from pinterp.spaces import build_scalar_space

KINDS = ["triangle", "square"]


def quartic(x):
    return x[:, 0] ** 2 * x[:, 1] - x[:, 1] ** 3 + x[:, 0] ** 4


@pytest.mark.parametrize("kind", KINDS)
def test_zero_trace(kind):
    tr = BoundaryTrace.from_function(kind, lambda x: 0 * x[:, 0], 3)
    assert np.abs(discrete_harmonic_extend(kind, 5, tr)).max() == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_trace_is_reproduced(kind):
    tr = BoundaryTrace.from_function(kind, quartic, 4)
    assert tr.degree == 4
    assert tr.continuity_gap() <= 1e-13
    S = build_scalar_space(kind, 6)
    F = discrete_harmonic_extend(kind, 6, tr)
    el = S.element
    t = np.linspace(-1, 1, 11)
    for e in range(el.num_edges):
        pts = el.edge_points(e, t)
        np.testing.assert_allclose(S.evaluate(F, pts), quartic(pts), atol=1e-12)


def test_minimal_seminorm_vs_obvious_extension():
    tr = BoundaryTrace.from_function("triangle", lambda x: x[:, 0] ** 2, 2)
    S = build_scalar_space("triangle", 4)
    F = discrete_harmonic_extend("triangle", 4, tr)
    rule = element_rule("triangle", 8)
    semi_F = np.sqrt(rule.integrate(np.sum(S.gradient(F, rule.points) ** 2, axis=1)))
    semi_g = np.sqrt(rule.integrate(4 * rule.points[:, 0] ** 2))
    assert semi_F <= semi_g


@pytest.mark.parametrize("kind", KINDS)
def test_extension_report(kind):
    report, seminorms = extension_checks(kind)
    assert report.passed, report.lines()
    assert len(seminorms) == 13


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(3, 8), st.sampled_from(KINDS))
def test_pythagoras(seed, p, kind):
    rng = np.random.default_rng(seed)
    cubic = lambda x: x[:, 0] ** 2 * x[:, 1] - x[:, 1] ** 3  # noqa: E731
    tr = BoundaryTrace.from_function(kind, cubic, 3)
    S = build_scalar_space(kind, p)
    if len(S.bubble_idx) == 0:
        return
    F = discrete_harmonic_extend(kind, p, tr)
    Phi = F.copy()
    Phi[S.bubble_idx] += rng.standard_normal(len(S.bubble_idx))
    A = S.stiffness
    lhs = Phi @ A @ Phi
    rhs = (Phi - F) @ A @ (Phi - F) + F @ A @ F
    assert abs(lhs - rhs) <= 1e-9 * lhs


def test_errors():
    el = "triangle"
    bad = BoundaryTrace(el, ([0.0, 1.0], [0.0, 0.0], [0.0, 0.0]))
    assert bad.continuity_gap() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        discrete_harmonic_extend(el, 3, bad)
    tr = BoundaryTrace.from_function(el, quartic, 4)
    with pytest.raises(ValueError):
        discrete_harmonic_extend(el, 3, tr)
    with pytest.raises(ValueError):
        BoundaryTrace(el, ([0.0], [0.0]))
    with pytest.raises(ValueError):
        legendre_to_edge_modes([0.0, 0.0, 0.0, 1.0], 1)
