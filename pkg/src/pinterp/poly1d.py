"""One-dimensional polynomial tables on the interval (-1, 1).

The endpoint-vanishing ("edge bubble") functions used throughout the package
are the normalized integrated Legendre polynomials

    b_k(t) = (P_k(t) - P_{k+2}(t)) / sqrt(2 (2k + 3)),   k = 0, 1, ...

which satisfy ``int b_k' b_l' dt = delta_kl`` and span P^0_{k+2}(I).
"""

from functools import lru_cache

import numpy as np


def legendre_table(n, t):
    """Values of P_0..P_n at ``t``; shape (n + 1, len(t))."""
    t = np.asarray(t, dtype=float)
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = t
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_derivative_table(n, t, values=None):
    """Derivatives P_0'..P_n' at ``t`` via P'_{k+1} = P'_{k-1} + (2k+1) P_k."""
    t = np.asarray(t, dtype=float)
    if values is None:
        values = legendre_table(n, t)
    out = np.zeros((n + 1,) + t.shape)
    if n >= 1:
        out[1] = 1.0
    for k in range(1, n):
        out[k + 1] = out[k - 1] + (2 * k + 1) * values[k]
    return out


def _bubble_scale(n):
    k = np.arange(n)
    return 1.0 / np.sqrt(2.0 * (2 * k + 3))


def edge_bubbles(n, t):
    """Values of b_0..b_{n-1} at ``t``; shape (n, len(t))."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros((0,) + t.shape)
    P = legendre_table(n + 1, t)
    return (P[:n] - P[2:n + 2]) * _bubble_scale(n)[:, None]


def edge_bubble_derivatives(n, t):
    """b_k'(t) = -sqrt((2k+3)/2) P_{k+1}(t)."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros((0,) + t.shape)
    P = legendre_table(n, t)
    k = np.arange(n)
    return -np.sqrt((2 * k + 3) / 2.0)[:, None] * P[1:n + 1]


def edge_bubble_antiderivatives(n, t):
    """B_k(t) = int_{-1}^t b_k(s) ds."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros((0,) + t.shape)
    P = legendre_table(n + 2, t)
    # int_{-1}^t P_m = (P_{m+1} - P_{m-1}) / (2m + 1) for m >= 1, and t + 1 for m = 0
    integ = np.empty((n + 2,) + t.shape)
    integ[0] = t + 1.0
    for m in range(1, n + 2):
        integ[m] = (P[m + 1] - P[m - 1]) / (2 * m + 1)
    return (integ[:n] - integ[2:n + 2]) * _bubble_scale(n)[:, None]


def edge_bubble_profiles(n, t):
    """Profiles q_k with b_k(t) = (1 - t^2) q_k(t); q_k is a multiple of P'_{k+1}.

    Used to extend edge bubbles into the element as lambda_a lambda_b q_k(.).
    """
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros((0,) + t.shape)
    dP = legendre_derivative_table(n, t)
    k = np.arange(n)
    scale = (2 * k + 3) / ((k + 1) * (k + 2)) * _bubble_scale(n)
    return scale[:, None] * dP[1:n + 1]


def edge_bubbles_in_legendre(n, degree=None):
    """Legendre coefficient matrix (degree + 1, n) of b_0..b_{n-1}."""
    if degree is None:
        degree = n + 1
    out = np.zeros((degree + 1, n))
    s = _bubble_scale(n)
    for k in range(n):
        out[k, k] = s[k]
        out[k + 2, k] = -s[k]
    return out


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def legendre_coefficients(values, n, x, w):
    """Discrete Legendre coefficients c_0..c_n of samples ``values`` (..., len(x))."""
    P = legendre_table(n, x)
    k = np.arange(n + 1)
    return (np.asarray(values) * w) @ P.T * ((2 * k + 1) / 2.0)
