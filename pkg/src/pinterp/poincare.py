"""Regularized Poincare-type integral operators and the regular decomposition.

For a smoothing kernel theta supported in a ball B inside the element,

    R psi(x) = int_B theta(a) (x - a)^perp int_0^1 t psi(a + t(x - a)) dt da,
    A u(x)   = int_B theta(a) (x - a) . int_0^1 u(a + t(x - a)) dt da,

with (y1, y2)^perp = (-y2, y1).  R is a right inverse of the scalar curl and
A is a right inverse of the gradient on curl-free fields.  Both map
polynomials of degree q to polynomials of degree q + 1.
"""

from dataclasses import dataclass
import math

import numpy as np

from .geometry import as_element
from .modal import ModalField, modal_basis
from .poly1d import gauss_legendre
from .quadrature import element_rule

DEFAULT_POINTS = 32
EXP_RADIAL_POINTS = 64
CHUNK = 1 << 17


@dataclass(frozen=True)
class SmoothingKernel:
    """theta(a) = c (1 - |a - a0|^2 / rho^2)^k on the ball (family 'poly'),
    or c exp(-1 / (1 - |a - a0|^2 / rho^2)) (family 'exp')."""

    center: tuple
    radius: float
    family: str = "poly"
    k: int = 8
    c: float = None

    def __post_init__(self):
        if self.family not in ("poly", "exp"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.c is None:
            object.__setattr__(self, "c", _normalization(self.family, self.k, self.radius))

    def profile(self, r):
        """theta as a function of the scaled radius r = |a - a0| / rho."""
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        q = np.where(inside, 1.0 - r ** 2, 0.0)
        if self.family == "poly":
            return self.c * q ** self.k
        with np.errstate(divide="ignore"):
            return np.where(inside, self.c * np.exp(-1.0 / np.where(inside, q, 1.0)), 0.0)

    def __call__(self, a):
        a = np.atleast_2d(a)
        r = np.linalg.norm(a - np.asarray(self.center), axis=-1) / self.radius
        return self.profile(r)

    def fits_in(self, element):
        el = as_element(element)
        d = el.boundary_distance(np.asarray(self.center)[None, :])[0]
        return bool(d > self.radius)


def _normalization(family, k, rho):
    if family == "poly":
        # int_B (1 - r^2/rho^2)^k = pi rho^2 / (k + 1)
        return (k + 1) / (math.pi * rho ** 2)
    x, w = gauss_legendre(EXP_RADIAL_POINTS)
    r = 0.5 * (x + 1.0)
    integral = 0.5 * np.sum(w * np.exp(-1.0 / (1.0 - r ** 2)) * r)
    return 1.0 / (2.0 * math.pi * rho ** 2 * integral)


def default_kernel(element, family="poly", k=8, radius=0.5):
    el = as_element(element)
    ker = SmoothingKernel(tuple(el.centroid), radius, family, k)
    if not ker.fits_in(el):
        raise ValueError("smoothing ball is not inside the element")
    return ker


def _ball_rule(kernel, degree=None):
    """Points and weights theta(a) da on the ball.  With ``degree`` (the
    polynomial degree in a of the rest of the integrand) the rule is exact
    for the polynomial kernel."""
    if kernel.family == "exp":
        nr, nphi = EXP_RADIAL_POINTS, DEFAULT_POINTS
    elif degree is None:
        nr = nphi = DEFAULT_POINTS
    else:
        # radial integrand: r^(2k) * r^degree * r (Jacobian)
        nr = math.ceil((2 * kernel.k + degree + 2) / 2)
        nphi = degree + 2
    x, w = gauss_legendre(nr)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2.0 * math.pi / nphi)
    rho = kernel.radius
    R, PHI = np.meshgrid(r, phi, indexing="ij")
    pts = np.asarray(kernel.center) + rho * np.stack([R * np.cos(PHI), R * np.sin(PHI)], -1)
    W = (wr * r * kernel.profile(r))[:, None] * wphi[None, :] * rho ** 2
    return pts.reshape(-1, 2), W.ravel()


def _t_rule(degree=None):
    n = DEFAULT_POINTS if degree is None else max(1, math.ceil((degree + 1) / 2))
    x, w = gauss_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _segment_points(x, a, t):
    """All points a + t (x - a); shape (m, na, nt, 2)."""
    d = x[:, None, :] - a[None, :, :]
    return a[None, :, None, :] + t[None, None, :, None] * d[:, :, None, :], d


def _chunked(fn, x, per_point):
    """Apply ``fn`` to slices of ``x`` so that at most ~CHUNK integrand
    samples are alive at once."""
    step = max(1, CHUNK // per_point)
    return np.concatenate([fn(x[i:i + step]) for i in range(0, len(x), step)])


def apply_R(psi, kernel, points, degree=None):
    """Values of R psi at ``points``; shape (m, 2).

    ``degree`` is the polynomial degree of ``psi`` when known; the rules are
    then exact for the polynomial kernel."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    a, wa = _ball_rule(kernel, None if degree is None else degree + 1)
    t, wt = _t_rule(None if degree is None else degree + 1)

    def block(xb):
        y, d = _segment_points(xb, a, t)
        vals = np.asarray(psi(y.reshape(-1, 2)), dtype=float).reshape(y.shape[:3])
        inner = vals @ (t * wt)  # (m, na)
        r1 = -np.einsum("ma,ma,a->m", d[..., 1], inner, wa)
        r2 = np.einsum("ma,ma,a->m", d[..., 0], inner, wa)
        return np.column_stack([r1, r2])

    return _chunked(block, x, len(a) * len(t))


def apply_A(u, kernel, points, degree=None):
    """Values of A u at ``points``; shape (m,)."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    a, wa = _ball_rule(kernel, None if degree is None else degree + 1)
    t, wt = _t_rule(None if degree is None else degree)

    def block(xb):
        y, d = _segment_points(xb, a, t)
        vals = np.asarray(u(y.reshape(-1, 2)), dtype=float).reshape(y.shape[:3] + (2,))
        inner = np.einsum("matc,t->mac", vals, wt)
        return np.einsum("mac,mac,a->m", d, inner, wa)

    return _chunked(block, x, len(a) * len(t))


# ------------------------------------------------------- polynomial calculus


def fit_polynomial(values_fn, element, degree):
    """Modal coefficients of the L2 projection onto degree ``degree``
    polynomials (P_degree on T, Q_degree on Q); exact for polynomial input."""
    el = as_element(element)
    rule = element_rule(el.kind, 2 * degree)
    vals = np.asarray(values_fn(rule.points), dtype=float)
    return modal_basis(el.kind, degree).project(vals.T, rule).T


def _total(kind, degree):
    return degree if kind == "triangle" else 2 * degree


def R_polynomial(psi, kernel, element, degree):
    """R psi for a polynomial psi in P_degree (triangle) or Q_degree (square)
    as an exact modal field of degree + 1."""
    el = as_element(element)
    total = _total(el.kind, degree)
    c = fit_polynomial(lambda x: apply_R(psi, kernel, x, total), el, degree + 1)
    return ModalField(el.kind, degree + 1, c)


def A_polynomial(u, kernel, element, degree):
    """A u for a polynomial field with components in P_degree or Q_degree."""
    el = as_element(element)
    total = _total(el.kind, degree)
    c = fit_polynomial(lambda x: apply_A(u, kernel, x, total), el, degree + 1)
    return ModalField(el.kind, degree + 1, c)


@dataclass(frozen=True, eq=False)
class RegularDecomposition:
    """u = grad psi + v with v = R(curl u) and psi = A(u - v)."""

    psi: ModalField
    v: ModalField
    fit_degree: int

    def reconstruct(self, points):
        return self.psi.gradient(points) + self.v(points)

    def residual(self, u, points):
        return float(np.abs(self.reconstruct(points) - u(points)).max())


def regular_decompose(u, curl_u, kernel, element, degree=None, fit_degree=10):
    """Regular decomposition of a field with supplied curl.

    For a polynomial field of known ``degree`` every step is exact.  Other
    fields are handled through polynomial surrogates: curl u is replaced by
    its L2 projection of degree ``fit_degree``, so v = R(curl u) is an exact
    polynomial, and psi = A(u - v) is sampled with the default rules and
    fitted with degree fit_degree + 2.
    """
    el = as_element(element)
    if degree is not None:
        N = max(degree - 1, 0)
        psi_deg = degree + 1
        rule_deg = degree
    else:
        N = fit_degree
        psi_deg = fit_degree + 2
        rule_deg = None
    curl_fit = ModalField(el.kind, N, fit_polynomial(curl_u, el, N))
    v = R_polynomial(curl_fit, kernel, el, N)

    # A is linear: A(u - v) = A u - A v, and A v is computed with exact rules
    def Aw(x):
        return apply_A(u, kernel, x, rule_deg) - apply_A(v, kernel, x, v.total_degree)

    psi_c = fit_polynomial(Aw, el, psi_deg)
    return RegularDecomposition(ModalField(el.kind, psi_deg, psi_c), v, N)
