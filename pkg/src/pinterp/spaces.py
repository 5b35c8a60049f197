"""Polynomial spaces on the reference element.

Every space is stored through coefficients in an orthonormal modal basis of
degree p, so Gram matrices and differential operators are exact matrix
products.

Scalar spaces use a hierarchical basis ordered as

    [vertex functions | edge 0 modes | edge 1 modes | ... | bubbles]

with edge modes whose traces are the edge bubbles ``b_k`` of
:mod:`pinterp.poly1d` in the edge parameter.  Vector spaces are subspaces of
``(P_p)^2`` with an orthonormal basis ordered as ``[trace-carrying | bubbles]``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .geometry import BARYCENTRIC_GRADIENTS, as_element, barycentric
from .modal import modal_basis, modal_dim
from .poly1d import edge_bubble_profiles, edge_bubbles, gauss_legendre, legendre_table
from .quadrature import element_rule

VECTOR_FAMILIES = {
    "triangle": ("Ned1", "Ned2", "RT", "BDM"),
    "square": ("Ned1", "RT"),
}
ROTATED = {"RT": "Ned1", "BDM": "Ned2"}


def _hierarchical_values(kind, p, pts):
    """Values of the hierarchical scalar basis at ``pts``; shape (m, n)."""
    el = as_element(kind)
    cols = []
    ne = p - 1
    if kind == "triangle":
        lam = barycentric(pts)
        cols += list(lam)
        for a, b in el.edges:
            prof = edge_bubble_profiles(ne, lam[b] - lam[a])
            cols += list(4.0 * lam[a] * lam[b] * prof)
        if p >= 3:
            bub = lam[0] * lam[1] * lam[2]
            cols += list((bub[:, None] * modal_basis("triangle", p - 3).eval(pts)).T)
    else:
        x, y = pts[:, 0], pts[:, 1]
        cols += [0.25 * (1 - x) * (1 - y), 0.25 * (1 + x) * (1 - y),
                 0.25 * (1 + x) * (1 + y), 0.25 * (1 - x) * (1 + y)]
        blends = [(x, 0.5 * (1 - y)), (y, 0.5 * (1 + x)),
                  (-x, 0.5 * (1 + y)), (-y, 0.5 * (1 - x))]
        for t, blend in blends:
            cols += list(edge_bubbles(ne, t) * blend)
        bx, by = edge_bubbles(ne, x), edge_bubbles(ne, y)
        cols += [bx[i] * by[j] for i in range(ne) for j in range(ne)]
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class ScalarSpace:
    """P_p(T) or Q_p(Q) with a hierarchical (vertex / edge / bubble) basis."""

    element: object
    p: int
    modal: object
    to_modal: np.ndarray  # (n, n): hierarchical coefficients -> modal coefficients
    vertex_idx: np.ndarray
    edge_idx: tuple
    bubble_idx: np.ndarray

    @property
    def dim(self):
        return self.to_modal.shape[1]

    @property
    def family(self):
        return "P" if self.element.kind == "triangle" else "Q"

    @property
    def mass(self):
        return self.to_modal.T @ self.to_modal

    @property
    def stiffness(self):
        G = self.grad_modal
        return G[0].T @ G[0] + G[1].T @ G[1]

    @property
    def grad_modal(self):
        """Modal coefficients (degree p) of d/dx1 and d/dx2 of each basis function."""
        return _grad_modal(self)

    def eval(self, points, derivatives=False):
        out = self.modal.eval(points, derivatives)
        if not derivatives:
            return out @ self.to_modal
        return tuple(o @ self.to_modal for o in out)

    def evaluate(self, coeffs, points):
        return self.modal.eval(points) @ (self.to_modal @ coeffs)

    def gradient(self, coeffs, points):
        _, Vx, Vy = self.modal.eval(points, derivatives=True)
        c = self.to_modal @ coeffs
        return np.stack([Vx @ c, Vy @ c], axis=-1)

    def from_modal(self, m, tol=1e-10):
        """Hierarchical coefficients of a polynomial given by modal coefficients
        of any degree; raises if it is not in the space."""
        m = np.asarray(m, dtype=float)
        n = self.modal.dim
        if len(m) > n:
            extra = np.abs(m[n:]).max()
            if extra > tol * max(1.0, np.abs(m).max()):
                raise ValueError("polynomial is not contained in the target scalar space")
            m = m[:n]
        elif len(m) < n:
            m = np.concatenate([m, np.zeros(n - len(m))])
        return _to_modal_lu(self).__call__(m)

    def project(self, f, rule=None):
        """Hierarchical coefficients of the L2 projection of a callable."""
        if rule is None:
            rule = element_rule(self.element.kind, 2 * self.p + 6)
        return self.from_modal(self.modal.project(f(rule.points), rule))


@lru_cache(maxsize=None)
def _grad_modal(space):
    M = space.to_modal
    return (space.modal.D1 @ M, space.modal.D2 @ M)


class _LU:
    def __init__(self, A):
        self.lu = sla.lu_factor(A)

    def __call__(self, b):
        return sla.lu_solve(self.lu, b)


@lru_cache(maxsize=None)
def _to_modal_lu(space):
    return _LU(space.to_modal)


@lru_cache(maxsize=None)
def _build_scalar(kind, p):
    el = as_element(kind)
    modal = modal_basis(kind, p)
    rule = element_rule(kind, 2 * p)
    H = _hierarchical_values(kind, p, rule.points)
    T = modal.project(H.T, rule).T
    T[np.abs(T) < 1e-15] = 0.0
    T.setflags(write=False)
    nv = el.num_vertices
    ne = p - 1
    edge_idx = tuple(np.arange(nv + e * ne, nv + (e + 1) * ne) for e in range(el.num_edges))
    start = nv + el.num_edges * ne
    bubble_idx = np.arange(start, T.shape[1])
    if T.shape[0] != T.shape[1]:
        raise RuntimeError("hierarchical basis has the wrong size")
    return ScalarSpace(el, p, modal, T, np.arange(nv), edge_idx, bubble_idx)


def build_scalar_space(element, p):
    """Hierarchical basis of P_p(T) (triangle) or Q_p(Q) (square)."""
    if int(p) != p or p < 1:
        raise ValueError(f"scalar space degree must be an integer >= 1, got {p!r}")
    return _build_scalar(as_element(element).kind, int(p))


# ---------------------------------------------------------------- vector spaces


@dataclass(frozen=True, eq=False)
class VectorSpace:
    """Subspace of (P_p)^2 with an orthonormal basis ``[trace part | bubbles]``.

    ``basis`` has shape (2 n, dim): rows are the modal coefficients of the
    first component followed by those of the second component.
    """

    element: object
    p: int
    family: str
    modal: object
    basis: np.ndarray
    bubble_idx: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def n(self):
        return self.modal.dim

    @property
    def components(self):
        return self.basis[:self.n], self.basis[self.n:]

    @property
    def curl_modal(self):
        """Modal coefficients of the scalar curl d1 u2 - d2 u1 of each basis field."""
        u1, u2 = self.components
        return self.modal.D1 @ u2 - self.modal.D2 @ u1

    @property
    def div_modal(self):
        u1, u2 = self.components
        return self.modal.D1 @ u1 + self.modal.D2 @ u2

    @property
    def mass(self):
        return self.basis.T @ self.basis

    def eval(self, points):
        """Basis field values; shape (m, dim, 2)."""
        V = self.modal.eval(points)
        u1, u2 = self.components
        return np.stack([V @ u1, V @ u2], axis=-1)

    def evaluate(self, coeffs, points):
        V = self.modal.eval(points)
        x = self.basis @ coeffs
        return np.stack([V @ x[:self.n], V @ x[self.n:]], axis=-1)

    def curl(self, coeffs, points):
        return self.modal.eval(points) @ (self.curl_modal @ coeffs)

    def div(self, coeffs, points):
        return self.modal.eval(points) @ (self.div_modal @ coeffs)

    def from_ambient(self, x, tol=1e-10):
        """Coefficients of a field given by stacked modal coefficients; raises
        if the field is not in the space."""
        x = _pad_pairs(np.asarray(x, dtype=float), self.modal)
        c = self.basis.T @ x
        resid = x - self.basis @ c
        scale = max(1.0, np.abs(x).max())
        if np.abs(resid).max() > tol * scale:
            raise ValueError("vector field is not contained in the target space")
        return c


def _pad_pairs(x, modal):
    """Re-embed stacked modal pairs of any degree into degree ``modal.p``."""
    n = modal.dim
    if x.shape[0] == 2 * n:
        return x
    half = x.shape[0] // 2
    out = np.zeros((2 * n,) + x.shape[1:])
    k = min(half, n)
    for c in range(2):
        part = x[c * half:(c + 1) * half]
        if half > n and np.abs(part[n:]).max() > 1e-10 * max(1.0, np.abs(part).max()):
            raise ValueError("vector field is not contained in the target space")
        out[c * n:c * n + k] = part[:k]
    return out


def rotation_matrix(n):
    """Stacked-pair matrix of rot: (u1, u2) -> (u2, -u1)."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def _top_shell(kind, p):
    """Ambient coefficients of x_perp * q for the modes q of exact degree
    p - 1, with all modes of degree < p removed (triangle, first Nedelec
    family).  Modulo (P_{p-1})^2 these span x_perp times homogeneous
    polynomials of degree p - 1."""
    modal = modal_basis(kind, p)
    rule = element_rule(kind, 2 * p)
    x1, x2 = rule.points[:, 0], rule.points[:, 1]
    low = modal_dim(kind, p - 1)
    top = modal_basis(kind, p - 1).eval(rule.points)[:, modal_dim(kind, p - 2):]
    c1 = modal.project((-x2[:, None] * top).T, rule).T
    c2 = modal.project((x1[:, None] * top).T, rule).T
    c1[:low] = 0.0
    c2[:low] = 0.0
    Q, _ = np.linalg.qr(np.vstack([c1, c2]))
    return Q


def _selection(kind, p, family):
    """Orthonormal ambient basis (2n, dim) of the vector space, unsorted."""
    modal = modal_basis(kind, p)
    n = modal.dim
    if family == "Ned2":
        return np.eye(2 * n)
    if kind == "triangle":
        low = modal_dim(kind, p - 1)
        E = np.zeros((2 * n, 2 * low))
        E[np.arange(low), np.arange(low)] = 1.0
        E[n + np.arange(low), low + np.arange(low)] = 1.0
        return np.hstack([E, _top_shell(kind, p)])
    # square, first family: Q_{p-1,p} x Q_{p,p-1}
    first = [k for k, (i, j) in enumerate(modal.index) if i <= p - 1]
    second = [k for k, (i, j) in enumerate(modal.index) if j <= p - 1]
    E = np.zeros((2 * n, len(first) + len(second)))
    E[first, np.arange(len(first))] = 1.0
    E[n + np.array(second), len(first) + np.arange(len(second))] = 1.0
    return E


def trace_matrix(kind, p, normal=False):
    """Rows: Legendre coefficients (degree <= p) of the tangential (or normal)
    trace on each edge; columns: ambient stacked modal coefficients."""
    el = as_element(kind)
    modal = modal_basis(kind, p)
    x, w = gauss_legendre(p + 1)
    P = legendre_table(p, x)
    k = np.arange(p + 1)
    proj = ((2 * k + 1) / 2.0)[:, None] * P * w  # (p+1, nq)
    rows = []
    for e in range(el.num_edges):
        V = modal.eval(el.edge_points(e, x))
        d = el.normals[e] if normal else el.tangents[e]
        rows.append(np.hstack([proj @ (d[0] * V), proj @ (d[1] * V)]))
    return np.vstack(rows)


def _expected_trace_rank(kind, p, family):
    ne = as_element(kind).num_edges
    return ne * (p + 1) if family == "Ned2" else ne * p


@lru_cache(maxsize=None)
def _build_vector(kind, p, family):
    if family in ROTATED:
        base = _build_vector(kind, p, ROTATED[family])
        R = rotation_matrix(base.n)
        B = R @ base.basis
        B.setflags(write=False)
        return VectorSpace(base.element, p, family, base.modal, B, base.bubble_idx)
    modal = modal_basis(kind, p)
    S = _selection(kind, p, family)
    C = trace_matrix(kind, p) @ S
    _, sv, Vh = np.linalg.svd(C)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    expected = _expected_trace_rank(kind, p, family)
    if rank != expected:
        raise RuntimeError(f"{family} trace rank {rank} != expected {expected}")
    B = S @ Vh.T
    B[np.abs(B) < 1e-15] = 0.0
    B.setflags(write=False)
    return VectorSpace(as_element(kind), p, family, modal, B, np.arange(rank, B.shape[1]))


def build_vector_space(element, p, family=None):
    """Nedelec (first/second kind), Raviart-Thomas or BDM space of order p.

    Supported: Ned1, Ned2, RT, BDM on the triangle; Ned1 and RT on the square.
    The default family is Ned2 on the triangle and Ned1 on the square.
    """
    kind = as_element(element).kind
    if family is None:
        family = "Ned2" if kind == "triangle" else "Ned1"
    if int(p) != p or p < 1:
        raise ValueError(f"vector space order must be an integer >= 1, got {p!r}")
    if family not in VECTOR_FAMILIES[kind]:
        raise ValueError(f"family {family!r} is not supported on the {kind}")
    return _build_vector(kind, int(p), family)


def companion_degree(family, p):
    """Degree of the scalar space whose gradients (or curls) enter the space."""
    return p + 1 if family in ("Ned2", "BDM") else p


# ---------------------------------------------------------------- Whitney basis


@dataclass(frozen=True, eq=False)
class WhitneyBasis:
    element: object
    coeffs: np.ndarray  # (2 * dim P_1 or Q_1, num_edges) stacked modal coefficients

    def ambient(self, p):
        return _pad_pairs(self.coeffs, modal_basis(self.element.kind, p))

    def eval(self, points):
        V = modal_basis(self.element.kind, 1).eval(points)
        n = V.shape[1]
        return np.stack([V @ self.coeffs[:n], V @ self.coeffs[n:]], axis=-1)


def edge_circulations(element, field_values_fn, npts=8):
    """Matrix of int_edge n x u d sigma, for fields returned by
    ``field_values_fn(points) -> (m, k, 2)``; shape (num_edges, k)."""
    el = as_element(element)
    x, w = gauss_legendre(npts)
    rows = []
    for e in range(el.num_edges):
        vals = field_values_fn(el.edge_points(e, x))
        tang = vals @ el.tangents[e]
        rows.append(el.edge_jacobian(e) * (w @ tang))
    return np.array(rows)


@lru_cache(maxsize=None)
def _whitney(kind):
    el = as_element(kind)
    space = _build_vector(kind, 1, "Ned1")
    D = edge_circulations(el, space.eval)
    coeffs = space.basis @ np.linalg.inv(D)
    coeffs[np.abs(coeffs) < 1e-15] = 0.0
    coeffs.setflags(write=False)
    return WhitneyBasis(el, coeffs)


def whitney_basis(element):
    """Lowest-order edge basis, dual to the edge circulations."""
    return _whitney(as_element(element).kind)


# ------------------------------------------------------- differential operators

_OPS = ("grad", "curl_scalar", "curl_vector", "div", "rot")


def _as_scalar_image(dst, modal_coeffs):
    return np.column_stack([dst.from_modal(c) for c in modal_coeffs.T])


def differential_matrix(src, dst, op):
    """Exact matrix of ``op`` from ``src`` coefficients to ``dst`` coefficients.

    ``grad`` and ``curl_scalar`` (the vector curl (d2, -d1)) map a ScalarSpace
    into a VectorSpace; ``curl_vector`` and ``div`` map a VectorSpace into a
    ScalarSpace; ``rot`` maps (u1, u2) to (u2, -u1) between VectorSpaces.
    """
    if op not in _OPS:
        raise ValueError(f"unknown operator {op!r}")
    if src.element.kind != dst.element.kind:
        raise ValueError("spaces live on different elements")
    if op in ("grad", "curl_scalar"):
        if not (isinstance(src, ScalarSpace) and isinstance(dst, VectorSpace)):
            raise ValueError(f"{op} maps a ScalarSpace into a VectorSpace")
        gx, gy = src.grad_modal
        img = np.vstack([gx, gy]) if op == "grad" else np.vstack([gy, -gx])
        return _stacked_to_space(dst, img, src.modal.dim)
    if op in ("curl_vector", "div"):
        if not (isinstance(src, VectorSpace) and isinstance(dst, ScalarSpace)):
            raise ValueError(f"{op} maps a VectorSpace into a ScalarSpace")
        img = src.curl_modal if op == "curl_vector" else src.div_modal
        return _as_scalar_image(dst, img)
    if not (isinstance(src, VectorSpace) and isinstance(dst, VectorSpace)):
        raise ValueError("rot maps a VectorSpace into a VectorSpace")
    img = rotation_matrix(src.n) @ src.basis
    return _stacked_to_space(dst, img, src.n)


def _stacked_to_space(dst, img, n_src):
    """Express stacked modal pairs (each component of length n_src) in dst."""
    out = np.empty((dst.dim, img.shape[1]))
    for k in range(img.shape[1]):
        out[:, k] = dst.from_ambient(img[:, k])
    return out
