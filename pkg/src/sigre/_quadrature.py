"""Gauss-Legendre nodes and cumulative (indefinite) integration matrices on [0, 1]."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as L

__all__ = ["gauss_nodes", "cumulative_matrix"]


@lru_cache(maxsize=64)
def gauss_nodes(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``M``-point Gauss-Legendre rule mapped to [0, 1]."""
    if M < 1:
        raise ValueError("quadrature order must be positive")
    x, w = L.leggauss(M)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def cumulative_matrix(M: int) -> np.ndarray:
    """Matrix ``C`` with ``(C @ f)[k] ~ int_0^{u_k} f(u) du`` at the Gauss nodes ``u_k``.

    The integrand is interpolated by its degree ``M - 1`` Legendre series through
    the nodes and integrated exactly, so the result is exact for polynomial
    integrands of degree below ``M``. The row for the right end point ``u = 1``
    is appended last, giving shape ``(M + 1, M)``.
    """
    nodes, _ = gauss_nodes(M)
    x = 2.0 * nodes - 1.0
    V = L.legvander(x, M - 1)
    Vinv = np.linalg.inv(V)
    out = np.empty((M + 1, M))
    pts = np.append(x, 1.0)
    for j in range(M):
        integ = L.legint(Vinv[:, j], lbnd=-1.0)
        out[:, j] = 0.5 * L.legval(pts, integ)
    out.setflags(write=False)
    return out
