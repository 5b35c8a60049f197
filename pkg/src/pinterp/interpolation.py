"""Projection-based interpolation operators on the reference element.

* ``pi0``: L2 projection onto polynomials of degree p (p >= 0).
* ``pi1``: H^1 interpolant = vertex interpolant + discrete harmonic
  extension of fractional-norm edge projections + H^1-seminorm projection
  onto bubbles.
* ``picurl``: H(curl) interpolant = Whitney interpolant + gradient of the
  extended boundary potential + constrained curl-projection onto bubbles.
* ``pidiv``: H(div) interpolant obtained by rotating ``picurl``.

Input functions enter only through point values at quadrature nodes; curl
and div of vector inputs are supplied by the caller.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .extension import harmonic_lift
from .geometry import as_element
from .modal import ModalField, modal_basis
from .poly1d import edge_bubble_antiderivatives, gauss_legendre
from .quadrature import DEFAULT_QUAD
from .sobolev import build_oracle_space, oracle_degree
from .spaces import (ROTATED, build_scalar_space, build_vector_space, companion_degree,
                     differential_matrix, whitney_basis)

EDGE_ORDER = 0.5
MEAN_TOL = 1e-10


def _oracle(quad, q):
    return build_oracle_space(0, quad.oracle_degree or oracle_degree(q))


def _edge_rule(quad, el, e, P):
    return quad.edge_rule(el, e, 2 * P)


def pi0(f, element, p, quad=DEFAULT_QUAD):
    """L2 projection onto P_p (triangle) or Q_p (square); p = 0 gives the
    mean value.  Returns a ModalField (scalar or vector valued)."""
    el = as_element(element)
    if p < 0:
        raise ValueError("pi0 needs p >= 0")
    rule = quad.element_rule(el, p)
    vals = np.asarray(f(rule.points), dtype=float)
    coeffs = modal_basis(el.kind, p).project(vals.T, rule).T
    return ModalField(el.kind, p, coeffs)


# --------------------------------------------------------------------- H^1


@dataclass(frozen=True, eq=False)
class H1InterpolantParts:
    space: object
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    edge_modes: tuple
    edge_residuals: tuple
    interior_residual: float

    @property
    def total(self):
        return self.g1 + self.g2 + self.g3

    def evaluate(self, points):
        return self.space.evaluate(self.total, points)

    def gradient(self, points):
        return self.space.gradient(self.total, points)


@dataclass(frozen=True, eq=False)
class _H1Workspace:
    space: object
    bubble_factor: object
    lap_bubbles: np.ndarray  # modal coefficients of Laplacians of bubbles


@lru_cache(maxsize=None)
def _h1_workspace(kind, p):
    S = build_scalar_space(kind, p)
    b = S.bubble_idx
    factor = None
    lap = np.zeros((S.modal.dim, 0))
    if len(b):
        factor = sla.cho_factor(S.stiffness[np.ix_(b, b)])
        D1, D2 = S.modal.D1, S.modal.D2
        lap = (D1 @ D1 + D2 @ D2) @ S.to_modal[:, b]
    return _H1Workspace(S, factor, lap)


def pi1(g, element, p, quad=DEFAULT_QUAD):
    """Projection-based H^1 interpolant of a continuous function ``g``."""
    el = as_element(element)
    if p < 1:
        raise ValueError("pi1 needs p >= 1")
    ws = _h1_workspace(el.kind, p)
    S = ws.space
    vvals = np.asarray(g(el.vertices), dtype=float)
    if not np.all(np.isfinite(vvals)):
        raise ValueError("non-finite vertex values")
    g1 = np.zeros(S.dim)
    g1[S.vertex_idx] = vvals

    oracle = _oracle(quad, p)
    modes, residuals = [], []
    for e, (a, b) in enumerate(el.edges):
        rule = _edge_rule(quad, el, e, oracle.P)
        t = rule.points
        vals = g(el.edge_points(e, t)) - (vvals[a] * (1 - t) + vvals[b] * (1 + t)) / 2
        x = oracle.project_samples(vals, rule)
        c, res = oracle.project_to_degree(x, p, EDGE_ORDER)
        modes.append(c)
        residuals.append(res)
    g2 = harmonic_lift(S, np.zeros(el.num_vertices), modes)

    g3 = np.zeros(S.dim)
    interior_res = 0.0
    bidx = S.bubble_idx
    if len(bidx):
        rhs = _grad_inner_bubbles(g, el, p, quad, ws) - S.stiffness[bidx] @ (g1 + g2)
        beta = sla.cho_solve(ws.bubble_factor, rhs)
        g3[bidx] = beta
        Sbb = S.stiffness[np.ix_(bidx, bidx)]
        interior_res = float(np.abs(Sbb @ beta - rhs).max() / max(np.abs(rhs).max(), 1e-300))
    return H1InterpolantParts(S, g1, g2, g3, tuple(modes), tuple(residuals), interior_res)


def _grad_inner_bubbles(g, el, p, quad, ws):
    """(grad g, grad phi_b) for every bubble phi_b, by integration by parts:
    -(g, Laplacian phi_b) + boundary integral of g times the normal derivative."""
    S = ws.space
    rule = quad.element_rule(el, p)
    gv = np.asarray(g(rule.points), dtype=float)
    V = S.modal.eval(rule.points)
    out = -((gv * rule.weights) @ V) @ ws.lap_bubbles
    cols = S.to_modal[:, S.bubble_idx]
    for e in range(el.num_edges):
        erule = quad.edge_rule(el, e, quad.degree(p))
        pts = el.edge_points(e, erule.points)
        _, Vx, Vy = S.modal.eval(pts, derivatives=True)
        n = el.normals[e]
        dn = (n[0] * Vx + n[1] * Vy) @ cols
        out += el.edge_jacobian(e) * ((g(pts) * erule.weights) @ dn)
    return out


# ----------------------------------------------------------------- H(curl)


@dataclass(frozen=True, eq=False)
class BoundaryPotential:
    """Edge potentials psi (arclength antiderivatives of the tangential
    trace of u - u1) and their projections onto P^0_q(edge)."""

    element: object
    tangential: tuple  # per edge: callable t -> (u - u1) . sigma
    means: np.ndarray  # per edge: int (u - u1) . sigma
    oracle_coeffs: tuple
    modes: tuple
    residuals: tuple

    def edge_function(self, e, t, npts=40):
        """psi on edge ``e`` at parameters ``t`` (by Gauss quadrature)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x, w = gauss_legendre(npts)
        h = 0.5 * (t + 1.0)
        s = -1.0 + h[:, None] * (x[None, :] + 1.0)
        tau = self.tangential[e](s.ravel()).reshape(s.shape)
        return self.element.edge_jacobian(e) * h * (tau @ w)


@dataclass(frozen=True, eq=False)
class CurlInterpolantParts:
    space: object
    scalar_space: object
    circulations: np.ndarray
    u1: np.ndarray
    potential: BoundaryPotential
    w2: np.ndarray  # scalar coefficients of E_q(sum psi_2)
    u2: np.ndarray
    u3: np.ndarray
    interior_residual: float
    constraint_residual: float

    @property
    def total(self):
        return self.u1 + self.u2 + self.u3

    def evaluate(self, points):
        return self.space.evaluate(self.total, points)

    def curl(self, points):
        return self.space.curl(self.total, points)

    def div(self, points):
        return self.space.div(self.total, points)


@dataclass(frozen=True, eq=False)
class _CurlWorkspace:
    V: object
    W: object
    whitney: np.ndarray  # V-coefficients of the Whitney fields, one column per edge
    grad: np.ndarray  # W -> V
    Cb: np.ndarray  # modal curls of V bubbles
    Gb: np.ndarray  # rows: ambient coefficients of gradients of W bubbles
    saddle: tuple  # LU factors
    nb: int


@lru_cache(maxsize=None)
def _curl_workspace(kind, p, family):
    V = build_vector_space(kind, p, family)
    W = build_scalar_space(kind, companion_degree(family, p))
    wb = whitney_basis(kind)
    whit = np.column_stack([V.from_ambient(c) for c in wb.ambient(p).T])
    grad = differential_matrix(W, V, "grad")
    bidx = V.bubble_idx
    Cb = V.curl_modal[:, bidx]
    K = Cb.T @ Cb
    # gradients of scalar bubbles, as V coefficients restricted to V bubbles
    Gfull = grad[:, W.bubble_idx]
    Gb = Gfull[bidx].T  # (nW0, nb): (v_j, grad phi_k) = coefficient, V basis orthonormal
    if np.abs(np.delete(Gfull, bidx, axis=0)).max(initial=0.0) > 1e-10:
        raise RuntimeError("gradients of scalar bubbles leave the vector bubble space")
    nb = len(bidx)
    nw = Gb.shape[0]
    if nb:
        evals = np.linalg.eigvalsh(K)
        nullity = int(np.sum(evals < 1e-10 * max(1.0, evals.max())))
        if nullity != nw:
            raise RuntimeError(f"curl-free bubble dimension {nullity} != scalar bubbles {nw}")
    Z = np.zeros((nw, nw))
    A = np.block([[K, Gb.T], [Gb, Z]])
    lu = sla.lu_factor(A) if A.size else None
    if A.size:
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] < 1e-12 * sv[0]:
            raise RuntimeError("saddle-point system is rank deficient")
    return _CurlWorkspace(V, W, whit, grad, Cb, Gb, lu, nb)


def whitney_interpolant(u, element, quad=DEFAULT_QUAD, degree=None):
    """Edge circulations int_edge n x u d sigma; these are the coefficients
    of the Whitney interpolant in the Whitney basis.  ``degree`` is the
    exactness of the edge rule (default: the one used for edge projections
    at the lowest order)."""
    el = as_element(element)
    if degree is None:
        degree = 2 * _oracle(quad, 1).P
    out = np.empty(el.num_edges)
    for e in range(el.num_edges):
        rule = quad.edge_rule(el, e, degree)
        vals = np.asarray(u(el.edge_points(e, rule.points)), dtype=float) @ el.tangents[e]
        out[e] = el.edge_jacobian(e) * rule.integrate(vals)
    return out


def boundary_potential(u, element, u1_field, q, quad=DEFAULT_QUAD):
    """Edge potentials of u - u1 and their fractional-norm projections onto
    P^0_q(edge).  ``u1_field`` is a callable returning values of u1."""
    el = as_element(element)
    oracle = _oracle(quad, q)
    tangential, means, xs, modes, residuals = [], [], [], [], []
    for e in range(el.num_edges):
        sigma = el.tangents[e]

        def tau(t, e=e, sigma=sigma):
            pts = el.edge_points(e, t)
            return (np.asarray(u(pts), dtype=float) - u1_field(pts)) @ sigma

        rule = _edge_rule(quad, el, e, oracle.P)
        tv = tau(rule.points)
        jac = el.edge_jacobian(e)
        mean = jac * rule.integrate(tv)
        scale = max(1.0, jac * rule.integrate(np.abs(tv)))
        if abs(mean) > MEAN_TOL * scale:
            raise ValueError(f"tangential trace of u - u1 has nonzero mean {mean:.3e} on edge {e}")
        # int psi b_k dt = -jac int tau B_k dt, since psi(+-1) = 0
        Bk = edge_bubble_antiderivatives(oracle.dim, rule.points)
        rhs = -jac * (Bk @ (tv * rule.weights))
        x = np.linalg.solve(oracle.M, rhs)
        c, res = oracle.project_to_degree(x, q, EDGE_ORDER)
        tangential.append(tau)
        means.append(mean)
        xs.append(x)
        modes.append(c)
        residuals.append(res)
    return BoundaryPotential(el, tuple(tangential), np.array(means), tuple(xs),
                             tuple(modes), tuple(residuals))


def picurl(u, curl_u, element, p, family=None, quad=DEFAULT_QUAD):
    """Projection-based H(curl) interpolant onto the Nedelec space of order p."""
    el = as_element(element)
    V = build_vector_space(el, p, family)
    ws = _curl_workspace(el.kind, p, V.family)
    W = ws.W
    # the same edge rules as in boundary_potential, so that the zero-mean
    # property of the tangential trace of u - u1 holds to rounding
    circ = whitney_interpolant(u, el, quad, 2 * _oracle(quad, W.p).P)
    c1 = ws.whitney @ circ

    def u1_field(pts):
        return V.evaluate(c1, pts)

    pot = boundary_potential(u, el, u1_field, W.p, quad)
    w2 = harmonic_lift(W, np.zeros(el.num_vertices), pot.modes)
    c2 = ws.grad @ w2

    c3 = np.zeros(V.dim)
    res_i = res_c = 0.0
    if ws.nb:
        rule = quad.element_rule(el, p)
        B = V.modal
        uv = np.asarray(u(rule.points), dtype=float)
        mu = np.concatenate([B.project(uv[:, 0], rule), B.project(uv[:, 1], rule)])
        mc = B.project(np.asarray(curl_u(rule.points), dtype=float), rule)
        low = c1 + c2
        r1 = ws.Cb.T @ (mc - V.curl_modal @ low)
        # (u - u1 - u2, grad phi_k); V is orthonormal so the V-projection of u is basis^T mu
        r2 = ws.Gb @ (V.basis.T @ mu - low)[V.bubble_idx]
        sol = sla.lu_solve(ws.saddle, np.concatenate([r1, r2]))
        beta = sol[:ws.nb]
        c3[V.bubble_idx] = beta
        lam = sol[ws.nb:]
        K = ws.Cb.T @ ws.Cb
        res_i = float(np.abs(K @ beta + ws.Gb.T @ lam - r1).max()
                      / max(np.abs(r1).max(), np.abs(r2).max(initial=0.0), 1e-300))
        res_c = float(np.abs(ws.Gb @ beta - r2).max(initial=0.0)
                      / max(np.abs(r2).max(initial=0.0), 1e-300))
    return CurlInterpolantParts(V, W, circ, c1, pot, w2, c2, c3, res_i, res_c)


def rot(field):
    """(u1, u2) -> (u2, -u1) applied to a vector-valued callable."""
    def rotated(x):
        v = np.asarray(field(x), dtype=float)
        return np.stack([v[..., 1], -v[..., 0]], axis=-1)
    return rotated


def rot_inverse(field):
    """(v1, v2) -> (-v2, v1), the inverse of ``rot``."""
    def unrotated(x):
        v = np.asarray(field(x), dtype=float)
        return np.stack([-v[..., 1], v[..., 0]], axis=-1)
    return unrotated


def pidiv(u, div_u, element, p, family=None, quad=DEFAULT_QUAD):
    """H(div) interpolant rot o picurl o rot^{-1}.

    The returned parts refer to the RT or BDM space; since that space's basis
    is the rotation of the Nedelec basis, the coefficients coincide with
    those of the rotated H(curl) interpolant.
    """
    el = as_element(element)
    if family is None:
        family = "BDM" if el.kind == "triangle" else "RT"
    if family not in ROTATED:
        raise ValueError(f"pidiv family must be RT or BDM, got {family!r}")
    target = build_vector_space(el, p, family)
    parts = picurl(rot_inverse(u), div_u, el, p, ROTATED[family], quad)
    return CurlInterpolantParts(target, parts.scalar_space, parts.circulations, parts.u1,
                                parts.potential, parts.w2, parts.u2, parts.u3,
                                parts.interior_residual, parts.constraint_residual)
