"""Quadrature helpers shared by the kernel and variational modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=256)
def beta_rule(p: float, q: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0,1] integrating f against the Beta(p, q) probability density.

    sum w_i f(u_i) == E_{Beta(p,q)}[f] exactly for polynomials of degree < 2n.
    """
    # weight (1-t)^a (1+t)^b on [-1,1]; u = (1+t)/2 gives u^b (1-u)^a
    x, w = roots_jacobi(n, q - 1.0, p - 1.0)
    u = 0.5 * (1.0 + x)
    w = w / w.sum()
    return u, w


@lru_cache(maxsize=256)
def power_rule(lo: float, hi: float, expo: float, n: int, at_lo: bool) -> tuple[np.ndarray, np.ndarray]:
    """Rule for integral over [lo, hi] of |u - s|^expo * f(u) du, singular endpoint s at lo or hi.

    Returns nodes u_i and weights w_i with sum w_i f(u_i) = integral (weight included).
    """
    h = hi - lo
    if h <= 0:
        return np.array([]), np.array([])
    if at_lo:
        # weight (u-lo)^expo: u = lo + h*(1+t)/2, weight ~ (1+t)^expo
        x, w = roots_jacobi(n, 0.0, expo)
        u = lo + h * 0.5 * (1.0 + x)
    else:
        x, w = roots_jacobi(n, expo, 0.0)
        u = lo + h * 0.5 * (1.0 + x)
    # roots_jacobi weights integrate (1-t)^a (1+t)^b on [-1,1]; after the affine
    # map the Jacobian is h/2 and the weight picks up (h/2)^expo
    w = w * (h / 2.0) ** (expo + 1.0)
    return u, w


def legendre_rule(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Plain Gauss-Legendre rule on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(n)
    u = lo + (hi - lo) * 0.5 * (1.0 + x)
    return u, w * (hi - lo) * 0.5


def stieltjes_recurrence(nodes: np.ndarray, weights: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Three-term recurrence coefficients (a_k, b_k) of the orthonormal
    polynomials of the discrete measure sum w_i delta(u_i), by the Stieltjes
    procedure:  u p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}."""
    n = degree + 1
    a = np.zeros(n)
    b = np.zeros(n)  # b[0] unused
    p_prev = np.zeros_like(nodes)
    p = np.ones_like(nodes) / np.sqrt(weights.sum())
    for k in range(n):
        a[k] = np.sum(weights * nodes * p * p)
        if k == n - 1:
            break
        q = (nodes - a[k]) * p - (b[k] if k > 0 else 0.0) * p_prev
        b[k + 1] = np.sqrt(np.sum(weights * q * q))
        p_prev, p = p, q / b[k + 1]
    return a, b


def orthonormal_values(a: np.ndarray, b: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate the orthonormal polynomials p_0..p_{len(a)-1} defined by the
    recurrence (a, b) at the given points; shape (len(a), len(points))."""
    points = np.asarray(points, dtype=float)
    n = a.size
    out = np.empty((n, points.size))
    out[0] = 1.0
    if n > 1:
        out[1] = (points - a[0]) / b[1]
    for k in range(1, n - 1):
        out[k + 1] = ((points - a[k]) * out[k] - b[k] * out[k - 1]) / b[k + 1]
    return out


def graded_rule(lo: float, hi: float, singular_at, n_per_cell: int = 24,
                n_cells: int = 14, ratio: float = 0.35) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre with cells geometrically refined toward singular endpoints.

    Handles integrable log/power singularities at lo and/or hi ('lo', 'hi', 'both').
    """
    if hi <= lo:
        return np.array([]), np.array([])
    pts = [lo, hi]
    h = hi - lo
    if singular_at in ("lo", "both"):
        d = h if singular_at == "lo" else h / 2.0
        pts += [lo + d * ratio ** k for k in range(1, n_cells)]
    if singular_at in ("hi", "both"):
        d = h if singular_at == "hi" else h / 2.0
        pts += [hi - d * ratio ** k for k in range(1, n_cells)]
    pts = np.unique(np.asarray(pts))
    us, ws = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        u, w = legendre_rule(a, b, n_per_cell)
        us.append(u)
        ws.append(w)
    return np.concatenate(us), np.concatenate(ws)
