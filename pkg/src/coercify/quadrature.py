"""Quadrature on the reference interval [0, 1] and reference triangle (0,0),(1,0),(0,1)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    points: np.ndarray  # (nq, dim), reference coordinates
    weights: np.ndarray  # (nq,), sum to the reference measure
    degree: int  # polynomial exactness

    @property
    def size(self) -> int:
        return self.weights.shape[0]


def gauss_interval(npoints: int) -> QuadratureRule:
    """Gauss-Legendre on [0, 1], exact to degree ``2*npoints - 1``."""
    if npoints < 1:
        raise InvalidArgumentError("need at least one quadrature point")
    x, w = np.polynomial.legendre.leggauss(npoints)
    return QuadratureRule(
        points=(0.5 * (x + 1.0))[:, None], weights=0.5 * w, degree=2 * npoints - 1
    )


def interval_rule(degree: int) -> QuadratureRule:
    """The rule used for degree-``p`` Lagrange elements: ``p + 2`` Gauss points."""
    return gauss_interval(degree + 2)


# Symmetric 6-point rule, exact to degree 4, barycentric orbits (a, b, b).
_B1 = 0.44594849091596488632
_B2 = 0.09157621350977074346
_A1, _A2 = 1.0 - 2.0 * _B1, 1.0 - 2.0 * _B2
_W1 = 0.22338158967801146570
_W2 = 1.0 / 3.0 - _W1


def triangle_degree4() -> QuadratureRule:
    pts, wts = [], []
    for a, b, w in ((_A1, _B1, _W1), (_A2, _B2, _W2)):
        for bary in ((a, b, b), (b, a, b), (b, b, a)):
            pts.append((bary[1], bary[2]))
            wts.append(0.5 * w)
    return QuadratureRule(points=np.array(pts), weights=np.array(wts), degree=4)


def triangle_collapsed(npoints: int) -> QuadratureRule:
    """Duffy-collapsed tensor Gauss rule, exact to degree ``2*npoints``.

    Used as an independent high-order reference for the symmetric rule.
    """
    g = gauss_interval(npoints + 1)
    s = g.points[:, 0]
    w = g.weights
    u, v = np.meshgrid(s, s, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    x = u * (1.0 - v)
    y = v
    weights = wu * wv * (1.0 - v)
    return QuadratureRule(
        points=np.column_stack([x.ravel(), y.ravel()]),
        weights=weights.ravel(),
        degree=2 * npoints,
    )


def triangle_rule(degree: int) -> QuadratureRule:
    """Default triangle rule covering integrands up to ``degree``."""
    if degree <= 4:
        return triangle_degree4()
    return triangle_collapsed((degree + 2) // 2)
