"""Discrete harmonic polynomial extension of boundary data.

The extension of a continuous piecewise-polynomial trace is built in two
steps: an explicit lifting with the hierarchical vertex and edge functions,
then a bubble correction that makes the gradient orthogonal to all bubble
gradients.  The result is the polynomial extension of minimal H^1 seminorm.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .geometry import as_element
from .poly1d import edge_bubbles_in_legendre, legendre_table
from .spaces import build_scalar_space


@dataclass(frozen=True)
class BoundaryTrace:
    """Per-edge Legendre coefficients (in the edge parameter t) of a
    continuous trace; ``coeffs[e][k]`` multiplies P_k on edge ``e``."""

    element: object
    coeffs: tuple

    def __post_init__(self):
        el = as_element(self.element)
        object.__setattr__(self, "element", el)
        if len(self.coeffs) != el.num_edges:
            raise ValueError(f"need {el.num_edges} edge traces, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs",
                           tuple(np.asarray(c, dtype=float) for c in self.coeffs))

    @property
    def degree(self):
        return max(len(c) for c in self.coeffs) - 1

    def edge_values(self, e, t):
        c = self.coeffs[e]
        return c @ legendre_table(len(c) - 1, t)

    def vertex_values(self):
        """Values at the vertices, taken from the edge starting there."""
        return np.array([self.edge_values(e, np.array([-1.0]))[0]
                         for e in range(self.element.num_edges)])

    def continuity_gap(self):
        ne = self.element.num_edges
        gaps = [self.edge_values(e, np.array([1.0]))[0]
                - self.edge_values((e + 1) % ne, np.array([-1.0]))[0] for e in range(ne)]
        return float(np.abs(gaps).max())

    @classmethod
    def from_function(cls, element, g, degree):
        """Interpolate ``g`` (callable of points) on each edge by Legendre
        projection of degree ``degree``; exact for polynomial traces."""
        el = as_element(element)
        x, w = np.polynomial.legendre.leggauss(degree + 1)
        k = np.arange(degree + 1)
        P = legendre_table(degree, x)
        coeffs = []
        for e in range(el.num_edges):
            vals = g(el.edge_points(e, x))
            coeffs.append((P * w) @ vals * ((2 * k + 1) / 2.0))
        return cls(el, tuple(coeffs))


def legendre_to_edge_modes(c, n, tol=1e-10):
    """Edge-bubble coefficients (n of them) of an endpoint-vanishing
    polynomial given by Legendre coefficients ``c``."""
    c = np.asarray(c, dtype=float)
    if n == 0:
        if np.abs(c).max(initial=0.0) > tol:
            raise ValueError("trace does not fit the edge space")
        return np.zeros(0)
    L = edge_bubbles_in_legendre(n, max(n + 1, len(c) - 1))
    rhs = np.zeros(L.shape[0])
    rhs[:len(c)] = c
    d, *_ = np.linalg.lstsq(L, rhs, rcond=None)
    if np.abs(L @ d - rhs).max() > tol * max(1.0, np.abs(rhs).max()):
        raise ValueError("edge trace does not fit the degree-p edge space")
    return d


@lru_cache(maxsize=None)
def _bubble_factor(space):
    b = space.bubble_idx
    S = space.stiffness
    if len(b) == 0:
        return None
    try:
        return sla.cho_factor(S[np.ix_(b, b)])
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("bubble stiffness matrix is not positive definite") from exc


def harmonic_lift(space, vertex_values, edge_modes):
    """Discrete harmonic extension of boundary data given in the
    hierarchical representation (vertex values and per-edge mode
    coefficients); returns hierarchical coefficients."""
    c = np.zeros(space.dim)
    c[space.vertex_idx] = vertex_values
    for idx, d in zip(space.edge_idx, edge_modes):
        c[idx] = d
    b = space.bubble_idx
    if len(b):
        S = space.stiffness
        nb = np.setdiff1d(np.arange(space.dim), b)
        rhs = -S[np.ix_(b, nb)] @ c[nb]
        c[b] = sla.cho_solve(_bubble_factor(space), rhs)
    return c


def discrete_harmonic_extend(element, p, trace, tol=1e-10):
    """Coefficients (in the degree-p hierarchical basis) of the discrete
    harmonic extension of a continuous piecewise-polynomial trace."""
    space = build_scalar_space(element, p)
    el = space.element
    if trace.element.kind != el.kind:
        raise ValueError("trace and element kinds differ")
    if trace.degree > p:
        raise ValueError(f"trace degree {trace.degree} exceeds p = {p}")
    vals = trace.vertex_values()
    scale = max(1.0, max(np.abs(c).max(initial=0.0) for c in trace.coeffs))
    if trace.continuity_gap() > tol * scale:
        raise ValueError("trace is discontinuous at a vertex")
    modes = []
    for e, (a, b) in enumerate(el.edges):
        c = np.zeros(max(2, len(trace.coeffs[e])))
        c[:len(trace.coeffs[e])] = trace.coeffs[e]
        c[0] -= 0.5 * (vals[a] + vals[b])
        c[1] -= 0.5 * (vals[b] - vals[a])
        modes.append(legendre_to_edge_modes(c, p - 1, tol))
    return harmonic_lift(space, vals, modes)
