"""Gauss-Legendre quadrature helpers."""

from __future__ import annotations

import numpy as np


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def composite_gauss_legendre(a: float, b: float, n_panels: int, nodes_per_panel: int = 8):
    """Composite Gauss-Legendre rule: n_panels equal panels on [a, b]."""
    n_panels = max(1, int(n_panels))
    edges = np.linspace(a, b, n_panels + 1)
    x0, w0 = np.polynomial.legendre.leggauss(int(nodes_per_panel))
    h = (b - a) / n_panels
    nodes = (edges[:-1, None] + 0.5 * h * (x0[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * w0, n_panels)
    return nodes, weights
