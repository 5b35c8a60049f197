"""Computable Sobolev norms on the element and on its edges.

Edge norms live on an "oracle" space P^0_P(I) of endpoint-vanishing
polynomials of high degree P, spanned by the edge bubbles b_0..b_{P-2}.  With
M the mass matrix and A the stiffness matrix (the identity for this basis),
the generalized eigenpairs A v = lambda M v give the discrete interpolation
norms

    |u|_s^2 = sum_i lambda_i^s y_i^2,   y = V^T M x,

which equal the L2 norm at s = 0 and the H^1 seminorm at s = 1.  All
reference edges have length 2, so the edge parameter t in [-1, 1] is an
arclength coordinate and no rescaling is needed.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .geometry import as_element
from .poly1d import (edge_bubbles, edge_bubbles_in_legendre, gauss_legendre,
                     legendre_table)
from .quadrature import QuadRule, _npoints, graded_interval_rule, interval_rule


def oracle_degree(p, minimum=40):
    """Default oracle degree max(4p, 40)."""
    return max(4 * p, minimum)


@dataclass(frozen=True, eq=False)
class FractionalGram:
    s: float
    G: np.ndarray  # Gram matrix in the oracle (edge bubble) basis


@dataclass(frozen=True, eq=False)
class OracleEdgeSpace:
    """Endpoint-vanishing polynomials of degree <= P on an edge."""

    edge: int
    P: int
    M: np.ndarray
    A: np.ndarray
    eigvals: np.ndarray
    V: np.ndarray  # M-orthonormal eigenvectors, V^T M V = I

    @property
    def dim(self):
        return self.P - 1

    def eval(self, coeffs, t):
        return np.asarray(coeffs) @ edge_bubbles(self.P - 1, t)

    def eigen_coordinates(self, coeffs):
        return self.V.T @ (self.M @ np.asarray(coeffs, dtype=float))

    def gram(self, s):
        return _gram(self, float(s))

    def project_samples(self, values, rule):
        """L2 projection onto P^0_P of samples of a function at ``rule`` points
        (edge parameter); returns oracle coefficients."""
        B = edge_bubbles(self.P - 1, rule.points)
        rhs = B @ (np.asarray(values) * rule.weights)
        return _mass_solver(self)(rhs)

    def project(self, f, rule=None):
        if rule is None:
            rule = interval_rule(_npoints(2 * self.P))
        return self.project_samples(f(rule.points), rule)

    def project_to_degree(self, coeffs, q, s=0.5):
        """Best approximation in the fractional norm of order ``s`` from
        P^0_q (the first q - 1 oracle modes); returns the q - 1 coefficients
        and the normal-equation residual."""
        m = q - 1
        if m <= 0:
            return np.zeros(0), 0.0
        if m > self.dim:
            raise ValueError("target degree exceeds the oracle degree")
        G = self.gram(s).G
        rhs = (G @ coeffs)[:m]
        c = sla.solve(G[:m, :m], rhs, assume_a="pos")
        res = np.abs(G[:m, :m] @ c - rhs).max() / max(np.abs(rhs).max(), 1e-300)
        return c, float(res)


@lru_cache(maxsize=None)
def _gram(space, s):
    Ws = space.M @ space.V
    G = (Ws * space.eigvals ** s) @ Ws.T
    G = 0.5 * (G + G.T)
    G.setflags(write=False)
    return FractionalGram(s, G)


@lru_cache(maxsize=None)
def _mass_solver(space):
    cf = sla.cho_factor(space.M)
    return lambda b: sla.cho_solve(cf, b)


def _legendre_mass(n):
    return 2.0 / (2 * np.arange(n + 1) + 1)


@lru_cache(maxsize=None)
def _build_oracle(P):
    L = edge_bubbles_in_legendre(P - 1, P)
    M = (L.T * _legendre_mass(P)) @ L
    A = np.eye(P - 1)
    try:
        lam, V = sla.eigh(A, M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise RuntimeError(f"oracle eigen-solve failed for P={P}: {exc}") from exc
    if lam[0] <= 0:
        raise RuntimeError("oracle eigenvalues are not positive")
    for a in (M, A, lam, V):
        a.setflags(write=False)
    return M, A, lam, V


def build_oracle_space(edge, P):
    """Oracle space P^0_P on ``edge`` (all reference edges share one
    parametrization, so the matrices do not depend on the edge)."""
    if int(P) != P or P < 2:
        raise ValueError(f"oracle degree must be an integer >= 2, got {P!r}")
    M, A, lam, V = _build_oracle(int(P))
    return OracleEdgeSpace(edge, int(P), M, A, lam, V)


def _check_order(s):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"fractional order must lie in [0, 1], got {s}")


def fractional_norm(u_coeffs, oracle, s, eigen=False):
    """Discrete interpolation norm of order ``s`` of an oracle-space member.

    ``u_coeffs`` are edge-bubble coefficients, or eigen-coordinates when
    ``eigen`` is true.
    """
    _check_order(s)
    y = np.asarray(u_coeffs, dtype=float) if eigen else oracle.eigen_coordinates(u_coeffs)
    return float(np.sqrt(np.sum(oracle.eigvals ** s * y ** 2)))


# ------------------------------------------------------- full-interval norms


@dataclass(frozen=True, eq=False)
class IntervalSobolev:
    """Discrete H^s(I) norms on P_P(I) from the pair (L2, full H^1)."""

    P: int
    eigvals: np.ndarray
    V: np.ndarray  # columns orthonormal in L2 w.r.t. normalized Legendre coordinates

    def legendre_project(self, f, n=None):
        """Normalized-Legendre coefficients of the L2 projection of ``f``."""
        x, w = gauss_legendre(n or self.P + 40)
        k = np.arange(self.P + 1)
        L = legendre_table(self.P, x) * np.sqrt((2 * k + 1) / 2.0)[:, None]
        return L @ (w * f(x))

    def norm(self, coeffs, s):
        _check_order(s)
        y = self.V.T @ coeffs
        return float(np.sqrt(np.sum(self.eigvals ** s * y ** 2)))


@lru_cache(maxsize=None)
def interval_sobolev(P):
    i = np.arange(P + 1)
    m = np.minimum.outer(i, i)
    # int P_i' P_j' = m (m + 1) when i + j is even
    K = np.where((np.add.outer(i, i) % 2) == 0, m * (m + 1.0), 0.0)
    sc = np.sqrt((2 * i + 1) / 2.0)
    K = K * np.outer(sc, sc)
    lam, V = np.linalg.eigh(K + np.eye(P + 1))
    return IntervalSobolev(P, lam, V)


# ------------------------------------------------------- Gagliardo cross-check


def gagliardo_htilde_half(u, edge=0, quad=64, tol=1e-10):
    """Aronszajn-Slobodeckij realization of the H~^{1/2} norm on an edge:
    sqrt( int int |u(x)-u(y)|^2/|x-y|^2 + int u^2 / dist(x, endpoints) ).

    ``u`` is a callable of the edge parameter t in [-1, 1]; ``quad`` is the
    number of Gauss points per panel (the interval is split in 8 graded
    panels toward both ends).
    """
    ends = u(np.array([-1.0, 1.0]))
    if np.abs(ends).max() > tol:
        raise ValueError("function does not vanish at the edge endpoints")
    rule = graded_interval_rule(2 * quad - 1, levels=8, ratio=0.25, ends="both")
    t, w = rule.points, rule.weights
    ut = u(t)
    D = t[:, None] - t[None, :]
    diff = ut[:, None] - ut[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.where(D == 0.0, 0.0, diff ** 2 / np.where(D == 0.0, 1.0, D ** 2))
    double = w @ kern @ w
    single = np.sum(w * ut ** 2 / (1.0 - np.abs(t)))
    return float(np.sqrt(double + single))


# ------------------------------------------------------------- element norms


def element_norms(f, element, rule, grad=None, curl=None, div=None):
    """L2, H^1-seminorm and graph norms of a scalar or vector function.

    ``f``, ``grad``, ``curl`` and ``div`` are callables of an (m, 2) point
    array; ``rule`` is a QuadRule on the element.  Only the norms whose
    ingredients are supplied are returned.
    """
    as_element(element)
    if not isinstance(rule, QuadRule):
        raise TypeError("rule must be a QuadRule")
    x, w = rule.points, rule.weights
    v = np.asarray(f(x), dtype=float)
    sq = v ** 2 if v.ndim == 1 else np.sum(v ** 2, axis=-1)
    out = {"l2": float(np.sqrt(w @ sq))}
    if grad is not None:
        g = np.asarray(grad(x), dtype=float)
        out["h1semi"] = float(np.sqrt(w @ np.sum(g ** 2, axis=-1)))
        out["h1"] = float(np.hypot(out["l2"], out["h1semi"]))
    for name, op in (("curl", curl), ("div", div)):
        if op is not None:
            d = np.asarray(op(x), dtype=float)
            out[name] = float(np.sqrt(w @ d ** 2))
            out["graph"] = float(np.hypot(out["l2"], out[name]))
    return out
