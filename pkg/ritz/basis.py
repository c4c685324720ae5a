"""
Boundary-adapted polynomial bases.

Every function is w(x)^c p(x) where p is a disk polynomial of Zernike type,
Re/Im (x + i y)^m Q(|x|^2), and w = 1 - (|x| / R(theta))^2 vanishes simply
on the boundary; c is 0, 1 or 2 for free, pinned and clamped spaces.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import jacobi

from geometry.charts import radius
from models.geometry_models import StarChart
from models.plate_models import SpaceConstraint
from numerics.derivatives import FieldDerivatives, polar_separable
from numerics.polynomials import compose_r2, complex_power, poly_mul, stack, evaluate_stack
from numerics.quadrature import periodic_trapezoid
from system.config import RITZ_DEGREE
from system.errors import InvalidParametersError

logger = logging.getLogger(__name__)

ORIGIN_GRID = 64


def zernike_polynomials(degree: int) -> Tuple[List[np.ndarray], List[str]]:
    """Disk polynomials of total degree n = m + 2j <= degree on the unit disk.

    Returns:
        Coefficient arrays and labels ``n{n}m{m}c`` / ``n{n}m{m}s``, the
        constant first
    """
    polys, labels = [], []
    for n in range(degree + 1):
        for m in range(n % 2, n + 1, 2):
            j = (n - m) // 2
            q = jacobi(j, m, 0)(np.poly1d([-2.0, 1.0]))
            radial = compose_r2(np.asarray(q.coeffs, dtype=float)[::-1])
            re, im = complex_power(m)
            polys.append(poly_mul(re, radial))
            labels.append(f"n{n}m{m}c")
            if m > 0:
                polys.append(poly_mul(im, radial))
                labels.append(f"n{n}m{m}s")
    return polys, labels


def _profile_factor_derivatives(chart: StarChart, theta: np.ndarray) -> List[np.ndarray]:
    """g = R^-2 and its first three theta derivatives."""
    R, R1, R2, R3 = (radius(chart, theta, k) for k in range(4))
    return [R ** -2,
            -2.0 * R1 * R ** -3,
            -2.0 * R2 * R ** -3 + 6.0 * R1 ** 2 * R ** -4,
            -2.0 * R3 * R ** -3 + 18.0 * R1 * R2 * R ** -4 - 24.0 * R1 ** 3 * R ** -5]


def _origin_partials(chart: StarChart) -> dict:
    """Derivatives of w at the origin from the modes 0 and 2 of R^-2.

    r^2 R(theta)^-2 is a quadratic form in (x, y) only when R^-2 has no
    higher modes; the rest is C^1 at the origin, so its second derivatives
    are taken as their angular mean (zero) and the third as zero.
    """
    theta = periodic_trapezoid(ORIGIN_GRID).nodes
    g = radius(chart, theta) ** -2
    g0 = float(np.mean(g))
    c2 = 2.0 * float(np.mean(g * np.cos(2.0 * theta)))
    s2 = 2.0 * float(np.mean(g * np.sin(2.0 * theta)))
    partials = {key: 0.0 for key in ((1, 0), (0, 1), (3, 0), (2, 1), (1, 2), (0, 3))}
    partials.update({(0, 0): 1.0, (2, 0): -2.0 * (g0 + c2), (0, 2): -2.0 * (g0 - c2), (1, 1): -2.0 * s2})
    return partials


def boundary_factor(chart: StarChart, x, y) -> FieldDerivatives:
    """Derivatives of w = 1 - r^2 / R(theta)^2 at points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if chart.is_disk:
        inv = 1.0 / chart.base_radius ** 2
        zero = np.zeros_like(x)
        partials = {key: zero for key in ((1, 1), (3, 0), (2, 1), (1, 2), (0, 3))}
        partials.update({(0, 0): 1.0 - (x ** 2 + y ** 2) * inv, (1, 0): -2.0 * x * inv,
                         (0, 1): -2.0 * y * inv, (2, 0): zero - 2.0 * inv, (0, 2): zero - 2.0 * inv})
        return FieldDerivatives(partials)
    r = np.hypot(x, y)
    origin = r == 0.0
    safe = np.where(origin, 1.0, r)
    theta = np.arctan2(y, x)
    scaled = polar_separable([safe ** 2, 2.0 * safe, np.full_like(safe, 2.0), np.zeros_like(safe)],
                             _profile_factor_derivatives(chart, theta), safe, theta)
    w = FieldDerivatives.constant(1.0, x) - scaled
    if not np.any(origin):
        return w
    patch = _origin_partials(chart)
    return FieldDerivatives({key: np.where(origin, patch[key], w[key]) for key in patch})


@dataclass(frozen=True)
class RitzBasis:
    """Functions w^c p_k with p_k given in coordinates scaled by ``scale``."""
    chart: StarChart
    constraint: SpaceConstraint
    coefficients: np.ndarray
    labels: Tuple[str, ...]
    scale: float
    degree: Optional[int] = None
    constant_index: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.labels)

    def evaluate(self, x, y) -> FieldDerivatives:
        """Bundle with arrays of shape (points, functions)."""
        x = np.ravel(np.asarray(x, dtype=float))
        y = np.ravel(np.asarray(y, dtype=float))
        values = evaluate_stack(self.coefficients, x / self.scale, y / self.scale)
        values = values.scaled_coordinates(self.scale)
        power = self.constraint.power
        if power == 0:
            return values
        w = boundary_factor(self.chart, x, y).map(lambda a: a[:, None]).power(power)
        return w.product(values)

    @classmethod
    def from_polynomials(cls, chart: StarChart, constraint: SpaceConstraint,
                         polys: Sequence[np.ndarray], labels: Sequence[str],
                         constant_index: Optional[int] = None) -> "RitzBasis":
        """A basis from explicit coefficient arrays in unscaled coordinates."""
        return cls(chart=chart, constraint=constraint, coefficients=stack(list(polys)),
                   labels=tuple(labels), scale=1.0, constant_index=constant_index)


def ritz_basis(chart: StarChart, constraint: SpaceConstraint, degree: int = RITZ_DEGREE) -> RitzBasis:
    """Zernike-type basis of total degree ``degree`` adapted to ``constraint``.

    Args:
        chart: The domain; polynomials are scaled by its base radius
        constraint: Essential conditions to enforce
        degree: Total degree of the disk polynomials before the boundary factor

    Returns:
        The basis; for free spaces the constant is its first function
    """
    if degree < 0:
        raise InvalidParametersError(f"Basis degree must be non-negative, got {degree}")
    polys, labels = zernike_polynomials(degree)
    constant = 0 if constraint == SpaceConstraint.FREE else None
    logger.debug(f"Built {constraint.value} basis of degree {degree} with {len(labels)} functions")
    return RitzBasis(chart=chart, constraint=SpaceConstraint(constraint), coefficients=stack(polys),
                     labels=tuple(labels), scale=chart.base_radius, degree=degree,
                     constant_index=constant)
