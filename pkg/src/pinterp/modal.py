"""L2-orthonormal modal bases: Dubiner polynomials on T, tensor Legendre on Q.

Modes are ordered so that the first ``dim(q)`` modes span the degree-q space
for every q <= p (total degree on T, degree per variable on Q).  All exact
inner products of polynomials therefore reduce to dot products of modal
coefficient vectors.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .geometry import SQRT3, as_element
from .poly1d import legendre_table, legendre_derivative_table
from .quadrature import element_rule


def jacobi_table(x, alpha, beta, n):
    """Orthonormal Jacobi polynomials P_0..P_n^(alpha, beta) at ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    ab = alpha + beta
    lg0 = (ab + 1) * np.log(2.0) - np.log(ab + 1) + gammaln(alpha + 1) + gammaln(beta + 1) \
        - gammaln(ab + 1)
    gamma0 = np.exp(lg0)
    out[0] = 1.0 / np.sqrt(gamma0)
    if n == 0:
        return out
    gamma1 = (alpha + 1) * (beta + 1) / (ab + 3) * gamma0
    out[1] = ((ab + 2) * x / 2 + (alpha - beta) / 2) / np.sqrt(gamma1)
    aold = 2.0 / (2 + ab) * np.sqrt((alpha + 1) * (beta + 1) / (ab + 3))
    for i in range(1, n):
        h1 = 2 * i + ab
        anew = 2.0 / (h1 + 2) * np.sqrt(
            (i + 1) * (i + 1 + ab) * (i + 1 + alpha) * (i + 1 + beta) / (h1 + 1) / (h1 + 3))
        bnew = -(alpha ** 2 - beta ** 2) / h1 / (h1 + 2)
        out[i + 1] = (-aold * out[i - 1] + (x - bnew) * out[i]) / anew
        aold = anew
    return out


def jacobi_derivative_table(x, alpha, beta, n):
    x = np.asarray(x, dtype=float)
    out = np.zeros((n + 1,) + x.shape)
    if n >= 1:
        inner = jacobi_table(x, alpha + 1, beta + 1, n - 1)
        k = np.arange(1, n + 1)
        out[1:] = np.sqrt(k * (k + alpha + beta + 1))[:, None] * inner
    return out


def modal_dim(kind, p):
    if p < 0:
        return 0
    return (p + 1) * (p + 2) // 2 if kind == "triangle" else (p + 1) ** 2


def _triangle_indices(p):
    return [(i, n - i) for n in range(p + 1) for i in range(n + 1)]


def _square_indices(p):
    idx = [(0, 0)]
    for n in range(1, p + 1):
        idx += [(i, n) for i in range(n)] + [(n, j) for j in range(n)] + [(n, n)]
    return idx


class ModalBasis:
    """Orthonormal basis of P_p(T) or Q_p(Q).

    ``index[m] = (i, j)`` gives the Dubiner (T) or Legendre tensor (Q) labels
    of mode ``m``.  ``D1`` and ``D2`` are the exact modal matrices of d/dx1
    and d/dx2.
    """

    def __init__(self, element, p):
        self.element = as_element(element)
        self.kind = self.element.kind
        if p < 0:
            raise ValueError("modal degree must be >= 0")
        self.p = p
        self.index = _triangle_indices(p) if self.kind == "triangle" else _square_indices(p)
        self.dim = len(self.index)
        rule = element_rule(self.kind, 2 * p)
        V, Vx, Vy = self.eval(rule.points, derivatives=True)
        Vw = V * rule.weights[:, None]
        self.D1 = Vw.T @ Vx
        self.D2 = Vw.T @ Vy
        for a in (self.D1, self.D2):
            a[np.abs(a) < 1e-13 * max(1.0, np.abs(a).max())] = 0.0
            a.setflags(write=False)

    def __repr__(self):
        return f"ModalBasis({self.kind!r}, p={self.p})"

    def dim_of(self, q):
        return modal_dim(self.kind, q)

    def eval(self, points, derivatives=False):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "triangle":
            return self._eval_triangle(pts, derivatives)
        return self._eval_square(pts, derivatives)

    def _eval_square(self, pts, derivatives):
        p = self.p
        s = np.sqrt((2 * np.arange(p + 1) + 1) / 2.0)[:, None]
        Px = legendre_table(p, pts[:, 0])
        Py = legendre_table(p, pts[:, 1])
        I = np.array([i for i, _ in self.index])
        J = np.array([j for _, j in self.index])
        Lx, Ly = s * Px, s * Py
        V = (Lx[I] * Ly[J]).T
        if not derivatives:
            return V
        dLx = s * legendre_derivative_table(p, pts[:, 0], Px)
        dLy = s * legendre_derivative_table(p, pts[:, 1], Py)
        return V, (dLx[I] * Ly[J]).T, (Lx[I] * dLy[J]).T

    def _eval_triangle(self, pts, derivatives):
        p = self.p
        r = pts[:, 0] - pts[:, 1] / SQRT3
        s = 2.0 * pts[:, 1] / SQRT3 - 1.0
        top = np.abs(1.0 - s) < 1e-14
        a = np.where(top, -1.0, 2.0 * (1.0 + r) / np.where(top, 1.0, 1.0 - s) - 1.0)
        b = s
        norm = np.sqrt(2.0) * np.sqrt(2.0 / SQRT3)
        A = jacobi_table(a, 0.0, 0.0, p)
        half = 0.5 * (1.0 - b)
        m = len(pts)
        V = np.empty((m, self.dim))
        if derivatives:
            dA = jacobi_derivative_table(a, 0.0, 0.0, p)
            Vr = np.empty((m, self.dim))
            Vs = np.empty((m, self.dim))
        pos = {ij: k for k, ij in enumerate(self.index)}
        for i in range(p + 1):
            B = jacobi_table(b, 2.0 * i + 1.0, 0.0, p - i)
            if derivatives:
                dB = jacobi_derivative_table(b, 2.0 * i + 1.0, 0.0, p - i)
            hi = half ** i
            him1 = half ** (i - 1) if i > 0 else None
            for j in range(p - i + 1):
                k = pos[(i, j)]
                # (1 - b)^i = 2^i half^i
                V[:, k] = norm * 2.0 ** i * A[i] * B[j] * hi
                if not derivatives:
                    continue
                fa, dfa, gb, dgb = A[i], dA[i], B[j], dB[j]
                dr = dfa * gb
                ds = dfa * gb * 0.5 * (1.0 + a)
                if i > 0:
                    dr = dr * him1
                    ds = ds * him1
                tmp = dgb * hi
                if i > 0:
                    tmp = tmp - 0.5 * i * gb * him1
                ds = ds + fa * tmp
                scale = norm * 2.0 ** i
                Vr[:, k] = scale * dr
                Vs[:, k] = scale * ds
        if not derivatives:
            return V
        # r = x1 - x2/sqrt3, s = 2 x2/sqrt3 - 1
        Vx = Vr
        Vy = -Vr / SQRT3 + 2.0 * Vs / SQRT3
        return V, Vx, Vy

    def project(self, values, rule):
        """Modal coefficients of the L2 projection of sampled data."""
        V = self.eval(rule.points)
        return (np.asarray(values) * rule.weights) @ V


@lru_cache(maxsize=None)
def modal_basis(kind, p):
    return ModalBasis(kind, p)


@dataclass(frozen=True, eq=False)
class ModalField:
    """A scalar (shape (n,)) or vector (shape (n, 2)) polynomial in modal form."""

    kind: str
    degree: int
    coeffs: np.ndarray

    @property
    def basis(self):
        return modal_basis(self.kind, self.degree)

    @property
    def total_degree(self):
        return self.degree if self.kind == "triangle" else 2 * self.degree

    def __call__(self, points):
        return self.basis.eval(np.atleast_2d(points)) @ self.coeffs

    def gradient(self, points):
        B = self.basis
        _, Vx, Vy = B.eval(np.atleast_2d(points), derivatives=True)
        return np.stack([Vx @ self.coeffs, Vy @ self.coeffs], axis=-1)

    def curl(self, points):
        B = self.basis
        c = B.D1 @ self.coeffs[:, 1] - B.D2 @ self.coeffs[:, 0]
        return B.eval(np.atleast_2d(points)) @ c

    def fit_residual(self, values_fn, points):
        return float(np.abs(self(points) - values_fn(points)).max())
