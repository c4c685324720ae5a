"""
Volume quadrature on a star chart, realized as the image of the unit disk.

x = rho R(theta) (cos theta, sin theta) has Jacobian rho R(theta)^2, so a
Gauss-Legendre rule in rho times the periodic rule in theta integrates
polynomials on the disk exactly up to the rule degrees.
"""
from dataclasses import dataclass

import numpy as np

from geometry.charts import radius
from models.geometry_models import StarChart
from numerics.quadrature import gauss_legendre, periodic_trapezoid
from system.config import ANGULAR_NODES, RADIAL_NODES
from system.errors import InvalidParametersError


@dataclass(frozen=True)
class VolumeGrid:
    """Flattened nodes and weights of the volume rule."""
    x: np.ndarray
    y: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values), axis=-1))

    @property
    def size(self) -> int:
        return self.weights.size


def volume_grid(chart: StarChart, radial_nodes: int = RADIAL_NODES,
                angular_nodes: int = ANGULAR_NODES) -> VolumeGrid:
    """Tensor rule over (rho, theta) mapped onto the chart.

    Args:
        chart: The domain
        radial_nodes: Gauss-Legendre nodes in rho on [0, 1]
        angular_nodes: Trapezoid nodes in theta

    Returns:
        The flattened grid
    """
    if radial_nodes < 1 or angular_nodes < 1:
        raise InvalidParametersError(
            f"Quadrature sizes must be positive, got {radial_nodes} x {angular_nodes}")
    radial = gauss_legendre(radial_nodes).mapped(0.0, 1.0)
    angular = periodic_trapezoid(angular_nodes)
    rho, theta = np.meshgrid(radial.nodes, angular.nodes, indexing="ij")
    R = radius(chart, theta)
    weights = np.outer(radial.weights, angular.weights) * rho * R ** 2
    r = rho * R
    return VolumeGrid(x=(r * np.cos(theta)).ravel(), y=(r * np.sin(theta)).ravel(),
                      rho=rho.ravel(), theta=theta.ravel(), weights=weights.ravel())
