"""Gauss rules on the interval, the reference triangle and the square, plus
geometrically graded composite rules for integrands with vertex or edge
singularities."""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import roots_jacobi

from .geometry import as_element
from .poly1d import gauss_legendre


@dataclass(frozen=True, eq=False)
class QuadRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int
    grading: dict = None

    def __len__(self):
        return len(self.weights)

    @property
    def measure(self):
        return float(self.weights.sum())

    def integrate(self, values):
        """Integrate samples (..., npoints) against the weights."""
        return np.asarray(values) @ self.weights


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _npoints(degree):
    return max(1, math.ceil((degree + 1) / 2))


@lru_cache(maxsize=None)
def interval_rule(n):
    """n-point Gauss-Legendre rule on (-1, 1); exact to degree 2n - 1."""
    if n < 1:
        raise ValueError("interval_rule needs n >= 1")
    x, w = gauss_legendre(n)
    return QuadRule(x, w, 2 * n - 1)


def _interval_breaks(levels, ratio, ends):
    """Breakpoints on [0, 1] graded toward 0 (``ends == 'left'``), toward 1,
    or toward both ends."""
    g = ratio ** np.arange(levels, -1, -1)  # ratio^L ... ratio^0 = 1
    left = np.concatenate([[0.0], g])
    if ends == "left":
        return left
    if ends == "right":
        return (1.0 - left)[::-1]
    if ends == "both":
        half = 0.5 * left
        return np.concatenate([half, (1.0 - half)[::-1][1:]])
    raise ValueError(f"unknown grading ends {ends!r}")


@lru_cache(maxsize=None)
def graded_interval_rule(degree, levels=12, ratio=0.15, ends="left"):
    """Composite Gauss rule on (-1, 1) graded geometrically toward -1
    (``ends='left'``), +1 (``'right'``) or both."""
    n = _npoints(degree)
    x, w = gauss_legendre(n)
    br = 2.0 * _interval_breaks(levels, ratio, ends) - 1.0
    lo, hi = br[:-1], br[1:]
    h = 0.5 * (hi - lo)
    pts = (0.5 * (lo + hi))[:, None] + h[:, None] * x
    wts = h[:, None] * w
    pts, wts = pts.ravel(), wts.ravel()
    _freeze(pts, wts)
    return QuadRule(pts, wts, 2 * n - 1,
                    dict(kind="interval", ends=ends, levels=levels, ratio=ratio))


@lru_cache(maxsize=None)
def _collapsed_reference(n):
    """Collapsed (Duffy) rule on the unit triangle {xi, eta >= 0, xi + eta <= 1}."""
    xg, wg = gauss_legendre(n)
    zj, wj = roots_jacobi(n, 1.0, 0.0)
    xi = 0.5 * (xg + 1.0)
    eta = 0.5 * (zj + 1.0)
    # int_0^1 (1 - eta) g d eta = (1/4) int_{-1}^{1} (1 - z) g dz
    XI = xi[:, None] * (1.0 - eta[None, :])
    ETA = np.broadcast_to(eta[None, :], XI.shape)
    W = 0.5 * wg[:, None] * 0.25 * wj[None, :]
    return np.column_stack([XI.ravel(), ETA.ravel()]), W.ravel()


def triangle_rule(a, b, c, degree):
    """Collapsed Gauss rule on the triangle (a, b, c), exact to ``degree``."""
    ref, w = _collapsed_reference(_npoints(degree))
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    J = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    pts = a + ref[:, :1] * (b - a) + ref[:, 1:] * (c - a)
    return pts, J * w


def rectangle_rule(lo, hi, degree, nx=None, ny=None):
    """Tensor Gauss rule on [lo_x, hi_x] x [lo_y, hi_y]."""
    n = _npoints(degree)
    x, w = gauss_legendre(nx or n)
    y, v = gauss_legendre(ny or n)
    hx = 0.5 * (hi[0] - lo[0])
    hy = 0.5 * (hi[1] - lo[1])
    X = 0.5 * (lo[0] + hi[0]) + hx * x
    Y = 0.5 * (lo[1] + hi[1]) + hy * y
    P = np.stack(np.meshgrid(X, Y, indexing="ij"), axis=-1).reshape(-1, 2)
    W = (hx * w)[:, None] * (hy * v)[None, :]
    return P, W.ravel()


def _pack(parts, degree, grading=None):
    pts = np.concatenate([p for p, _ in parts])
    wts = np.concatenate([w for _, w in parts])
    _freeze(pts, wts)
    return QuadRule(pts, wts, degree, grading)


@lru_cache(maxsize=None)
def element_rule(element, degree):
    """Gauss rule on the reference element exact to ``degree``."""
    el = as_element(element)
    if degree < 0:
        raise ValueError("exactness degree must be >= 0")
    if el.kind == "triangle":
        parts = [triangle_rule(*el.vertices, degree)]
    else:
        parts = [rectangle_rule((-1.0, -1.0), (1.0, 1.0), degree)]
    n = _npoints(degree)
    return _pack(parts, 2 * n - 1)


@lru_cache(maxsize=None)
def vertex_graded_rule(element, vertex, levels=12, ratio=0.15, local_degree=20):
    """Composite rule on layers between homothetic copies of the element
    shrinking toward ``vertex`` by the factor ``ratio``."""
    el = as_element(element)
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    nv = el.num_vertices
    if not 0 <= vertex < nv:
        raise ValueError(f"vertex index {vertex} out of range")
    v = el.vertices[vertex]
    parts = []
    scale = ratio ** np.arange(levels + 1)
    if el.kind == "triangle":
        a, b = el.vertices[(vertex + 1) % nv], el.vertices[(vertex + 2) % nv]
        for k in range(levels):
            s0, s1 = scale[k], scale[k + 1]
            A0, B0 = v + s0 * (a - v), v + s0 * (b - v)
            A1, B1 = v + s1 * (a - v), v + s1 * (b - v)
            parts.append(triangle_rule(A1, A0, B0, local_degree))
            parts.append(triangle_rule(A1, B0, B1, local_degree))
        s = scale[levels]
        parts.append(triangle_rule(v, v + s * (a - v), v + s * (b - v), local_degree))
    else:
        # local frame: unit vectors pointing from the corner into the square
        dx = -np.sign(v[0])
        dy = -np.sign(v[1])

        def rect(u0, u1, w0, w1):
            P, W = rectangle_rule((u0, w0), (u1, w1), local_degree)
            return np.column_stack([v[0] + dx * P[:, 0], v[1] + dy * P[:, 1]]), W

        side = 2.0 * scale
        for k in range(levels):
            s0, s1 = side[k], side[k + 1]
            parts.append(rect(s1, s0, 0.0, s1))
            parts.append(rect(0.0, s1, s1, s0))
            parts.append(rect(s1, s0, s1, s0))
        parts.append(rect(0.0, side[levels], 0.0, side[levels]))
    n = _npoints(local_degree)
    return _pack(parts, 2 * n - 1,
                 dict(kind="vertex", vertex=vertex, levels=levels, ratio=ratio))


@lru_cache(maxsize=None)
def edge_graded_rule(element, edge, levels=12, ratio=0.15, local_degree=20):
    """Iterated rule graded geometrically in the distance to ``edge``."""
    el = as_element(element)
    # the inner integral raises the outer polynomial degree by one
    n = _npoints(local_degree + 1)
    x, w = gauss_legendre(n)
    br = _interval_breaks(levels, ratio, "left")
    ia, ib = el.edges[edge]
    a, b = el.vertices[ia], el.vertices[ib]
    parts = []
    if el.kind == "triangle":
        c = el.vertices[3 - ia - ib]
        J = 2.0 * el.area
        for lo, hi in zip(br[:-1], br[1:]):
            eta = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            weta = 0.5 * (hi - lo) * w
            # inner xi in [0, 1 - eta]
            L = 1.0 - eta
            xi = 0.5 * L[:, None] * (x[None, :] + 1.0)
            wxi = 0.5 * L[:, None] * w[None, :]
            E = np.broadcast_to(eta[:, None], xi.shape)
            pts = a + xi.reshape(-1, 1) * (b - a) + E.reshape(-1, 1) * (c - a)
            parts.append((pts, J * (weta[:, None] * wxi).ravel()))
    else:
        inward = -el.normals[edge]
        along = b - a
        for lo, hi in zip(br[:-1], br[1:]):
            s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x  # distance fraction in [0, 1]
            ws = 0.5 * (hi - lo) * w
            u = 0.5 * (x + 1.0)
            wu = 0.5 * w
            S, U = np.meshgrid(s, u, indexing="ij")
            pts = a + U.reshape(-1, 1) * along + 2.0 * S.reshape(-1, 1) * inward
            parts.append((pts, 4.0 * (ws[:, None] * wu[None, :]).ravel()))
    return _pack(parts, 2 * n - 2,
                 dict(kind="edge", edge=edge, levels=levels, ratio=ratio))


@dataclass(frozen=True)
class QuadConfig:
    """How operators and norms sample input functions.

    ``singular`` is None, ``("vertex", i)`` or ``("edge", e)``; element and
    edge rules are then graded toward that set.  Exactness degrees are
    ``max(2p + margin, min_degree)``.
    """

    margin: int = 6
    min_degree: int = 30
    singular: tuple = None
    levels: int = 12
    ratio: float = 0.15
    oracle_degree: int = None

    def degree(self, p):
        return max(2 * p + self.margin, self.min_degree)

    def element_rule(self, element, p):
        el = as_element(element)
        d = self.degree(p)
        if self.singular is None:
            return element_rule(el.kind, d)
        what, idx = self.singular
        if what == "vertex":
            return vertex_graded_rule(el.kind, idx, self.levels, self.ratio, d)
        if what == "edge":
            return edge_graded_rule(el.kind, idx, self.levels, self.ratio, d)
        raise ValueError(f"unknown singular set {self.singular!r}")

    def edge_ends(self, element, e):
        """Which parameter ends of edge ``e`` touch the singular set."""
        if self.singular is None:
            return None
        el = as_element(element)
        a, b = el.edges[e]
        what, idx = self.singular
        if what == "vertex":
            hits = (a == idx, b == idx)
        else:
            if e == idx:
                return None
            sa, sb = el.edges[idx]
            hits = (a in (sa, sb), b in (sa, sb))
        if hits[0] and hits[1]:
            return "both"
        if hits[0]:
            return "left"
        if hits[1]:
            return "right"
        return None

    def edge_rule(self, element, e, degree):
        ends = self.edge_ends(element, e)
        if ends is None:
            return interval_rule(_npoints(degree))
        return graded_interval_rule(degree, self.levels, self.ratio, ends)

    def refined(self):
        """Same configuration with doubled grading levels."""
        return QuadConfig(self.margin, self.min_degree, self.singular,
                          2 * self.levels, self.ratio, self.oracle_degree)


DEFAULT_QUAD = QuadConfig()
