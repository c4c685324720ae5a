"""
Quadrature rules on [-1, 1] and on the periodic interval [0, 2*pi).
"""
import logging
from dataclasses import dataclass

import numpy as np

from system.errors import InvalidParametersError

logger = logging.getLogger(__name__)


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a one-dimensional rule."""
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        """Weighted sum of samples taken at the nodes.

        Args:
            values: Samples of the integrand, one per node

        Returns:
            The quadrature approximation of the integral
        """
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.nodes.size:
            raise InvalidParametersError(
                f"Expected {self.nodes.size} samples, got {values.shape[-1]}")
        # np.sum reduces the contiguous axis pairwise
        return float(np.sum(self.weights * values, axis=-1))

    def mapped(self, a: float, b: float) -> "QuadratureRule":
        """Affinely transport a rule on [-1, 1] to [a, b]."""
        half = 0.5 * (b - a)
        return QuadratureRule(_frozen(a + half * (self.nodes + 1.0)), _frozen(half * self.weights))


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1], exact up to degree 2n-1.

    Args:
        n: Number of nodes, at least 1

    Returns:
        The rule with ascending nodes
    """
    if int(n) != n or n < 1:
        raise InvalidParametersError(f"Gauss-Legendre needs n >= 1, got {n}")
    nodes, weights = np.polynomial.legendre.leggauss(int(n))
    return QuadratureRule(_frozen(nodes), _frozen(weights))


def periodic_trapezoid(m: int) -> QuadratureRule:
    """Equispaced rule on [0, 2*pi), exact for trigonometric degree < m/2.

    Args:
        m: Number of nodes, at least 1

    Returns:
        The rule with nodes 2*pi*j/m and equal weights
    """
    if int(m) != m or m < 1:
        raise InvalidParametersError(f"Periodic trapezoid needs m >= 1, got {m}")
    m = int(m)
    nodes = 2.0 * np.pi * np.arange(m) / m
    return QuadratureRule(_frozen(nodes), _frozen(np.full(m, 2.0 * np.pi / m)))
