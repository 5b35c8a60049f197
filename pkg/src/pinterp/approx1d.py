"""One-dimensional p-approximation on I = (-1, 1): truncated Chebyshev
expansions and endpoint-matched approximants."""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev, chebyshev as C


@dataclass(frozen=True, eq=False)
class ChebyshevExpansion:
    """Chebyshev coefficients a_0..a_N of a function on I."""

    coeffs: np.ndarray

    @property
    def N(self):
        return len(self.coeffs) - 1

    def truncate(self, p):
        return ChebyshevExpansion(self.coeffs[:p + 1].copy())

    def as_poly(self):
        return Chebyshev(self.coeffs)

    def __call__(self, x):
        return C.chebval(np.asarray(x, dtype=float), self.coeffs)


def chebyshev_coefficients(f, N):
    """a_0..a_N from Chebyshev-Gauss quadrature with N + 1 nodes, i.e. the
    weighted-L2 coefficients up to aliasing of modes beyond 2N + 1."""
    return C.chebinterpolate(f, N)


def chebyshev_project(f, p, N=None):
    """Truncated Chebyshev expansion P_p f = sum_{i<=p} a_i T_i."""
    if N is None:
        N = p + 20
    if N < p + 20:
        raise ValueError("N must be at least p + 20")
    full = ChebyshevExpansion(chebyshev_coefficients(f, N))
    return full.truncate(p)


def endpoint_correctors(p):
    """psi^- = ((1 - x)/2)^p and psi^+ = ((1 + x)/2)^p as Chebyshev series."""
    if p < 1:
        raise ValueError("p must be >= 1")
    plus = Chebyshev([0.5, 0.5]) ** p
    minus = Chebyshev([0.5, -0.5]) ** p
    return ChebyshevExpansion(minus.coef), ChebyshevExpansion(plus.coef)


def approx_endpoint_matched(f, p, N=None):
    """f_p = P_p f + (f - P_p f)(-1) psi^- + (f - P_p f)(1) psi^+."""
    Pf = chebyshev_project(f, p, N)
    minus, plus = endpoint_correctors(p)
    ends = np.asarray(f(np.array([-1.0, 1.0])), dtype=float) - Pf(np.array([-1.0, 1.0]))
    coeffs = Pf.coeffs.copy()
    coeffs += ends[0] * minus.coeffs[:p + 1] + ends[1] * plus.coeffs[:p + 1]
    return ChebyshevExpansion(coeffs)


def corrector_norms(p):
    """Closed-form L2 norm and H^1 seminorm of psi^+_p."""
    return np.sqrt(2.0 / (2 * p + 1)), 0.5 * p * np.sqrt(2.0 / (2 * p - 1))
