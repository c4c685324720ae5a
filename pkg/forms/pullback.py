"""
Forms evaluated on deformed domains phi_t(Omega), phi_t = id + t psi.

For v = u o phi_t^-1 the derivatives at y = phi_t(x) follow from A = D phi_t
and G = A^-1:

    grad v = G^T grad u
    D2v    = G^T (D2u - t sum_k d_k v D2psi_k) G

so nothing is ever evaluated off the reference grid.
"""
import logging
from dataclasses import dataclass

import numpy as np

from forms.assembly import QuadratureSizes
from forms.grids import volume_grid
from geometry.charts import boundary_samples, radius
from geometry.fields import PolynomialField
from models.geometry_models import StarChart
from system.errors import ChartError, InvalidParametersError

logger = logging.getLogger(__name__)

FORMS = ("M", "B", "L", "J1", "J2", "J3")


@dataclass(frozen=True)
class PulledBack:
    """Gradient and Hessian of v = u o phi_t^-1 at mapped nodes."""
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray

    @property
    def laplacian(self) -> np.ndarray:
        return np.trace(self.hessian, axis1=-2, axis2=-1)


def _map_jacobian(field: PolynomialField, t: float, px, py) -> np.ndarray:
    jac = field.jacobian(px, py)
    return np.eye(2) + t * jac


def _check_orientation(det: np.ndarray, t: float, theta: np.ndarray) -> None:
    worst = int(np.argmin(det))
    if det[worst] <= 0.0:
        raise ChartError(f"phi_t = id + t psi is not injective for t={t}: "
                         f"det D phi_t = {det[worst]:.3e}", theta=float(theta[worst]))


def pull_back(u: PolynomialField, field: PolynomialField, t: float, px, py) -> PulledBack:
    """Derivatives of u o phi_t^-1 at the images of (px, py)."""
    d = u.derivatives(px, py)
    G = np.linalg.inv(_map_jacobian(field, t, px, py))
    gradient = np.einsum("...ki,...k->...i", G, d.gradient)
    correction = np.einsum("...k,...kij->...ij", gradient, field.hessians(px, py))
    hessian = np.einsum("...ki,...kl,...lj->...ij", G, d.hessian - t * correction, G)
    return PulledBack(value=d.value, gradient=gradient, hessian=hessian)


def pullback_form_value(form: str, field: PolynomialField, t: float, u1: PolynomialField,
                        u2: PolynomialField, chart: StarChart,
                        quad: QuadratureSizes = QuadratureSizes()) -> float:
    """A form on phi_t(Omega) applied to u1 o phi_t^-1 and u2 o phi_t^-1.

    Args:
        form: One of M, B, L, J1, J2, J3
        field: The vector field psi
        t: Deformation parameter
        u1: First scalar polynomial on the chart
        u2: Second scalar polynomial on the chart
        chart: The reference domain Omega
        quad: Quadrature sizes

    Returns:
        The form value, computed on the reference grid
    """
    if form not in FORMS:
        raise InvalidParametersError(f"Unknown form {form!r}, expected one of {', '.join(FORMS)}")
    if len(field.components) != 2:
        raise InvalidParametersError("The deformation field needs two components")
    if form in ("J2", "J3"):
        return _boundary_value(form, field, t, u1, u2, chart, quad.boundary)

    grid = volume_grid(chart, quad.radial, quad.angular)
    det = np.linalg.det(_map_jacobian(field, t, grid.x, grid.y))
    _check_orientation(det, t, grid.theta)
    v1 = pull_back(u1, field, t, grid.x, grid.y)
    v2 = pull_back(u2, field, t, grid.x, grid.y)
    if form == "M":
        integrand = np.sum(v1.hessian * v2.hessian, axis=(-2, -1))
    elif form == "B":
        integrand = v1.laplacian * v2.laplacian
    elif form == "L":
        integrand = np.sum(v1.gradient * v2.gradient, axis=-1)
    else:
        integrand = v1.value * v2.value
    return grid.integrate(integrand * det)


def _boundary_value(form: str, field: PolynomialField, t: float, u1: PolynomialField,
                    u2: PolynomialField, chart: StarChart, grid: int) -> float:
    samples = boundary_samples(chart, grid)
    theta = samples.theta
    px, py = samples.frame.point[:, 0], samples.frame.point[:, 1]
    R, dR = radius(chart, theta), radius(chart, theta, 1)
    d_point = np.stack([dR * np.cos(theta) - R * np.sin(theta),
                        dR * np.sin(theta) + R * np.cos(theta)], axis=-1)
    A = _map_jacobian(field, t, px, py)
    _check_orientation(np.linalg.det(A), t, theta)
    tangent = np.einsum("...ij,...j->...i", A, d_point)
    speed = np.linalg.norm(tangent, axis=-1)
    weights = (2.0 * np.pi / grid) * speed
    if form == "J3":
        integrand = u1.derivatives(px, py).value * u2.derivatives(px, py).value
    else:
        normal = np.stack([tangent[:, 1], -tangent[:, 0]], axis=-1) / speed[:, None]
        g1 = pull_back(u1, field, t, px, py).gradient
        g2 = pull_back(u2, field, t, px, py).gradient
        integrand = np.sum(g1 * normal, axis=-1) * np.sum(g2 * normal, axis=-1)
    return float(np.sum(weights * integrand))
