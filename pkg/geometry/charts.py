"""
Differential geometry of star-shaped Fourier charts.

The boundary is p(theta) = R(theta) (cos theta, sin theta), traversed
counterclockwise; the outward normal is the tangent turned clockwise.
"""
import logging
from dataclasses import dataclass

import numpy as np

from models.geometry_models import NormalPerturbation, StarChart, fourier_series
from numerics.quadrature import periodic_trapezoid
from system.config import BOUNDARY_GRID, FOURIER_LIMIT
from system.errors import ChartError, InvalidParametersError

logger = logging.getLogger(__name__)


def radius(chart: StarChart, theta, deriv: int = 0) -> np.ndarray:
    """deriv-th theta derivative of R(theta)."""
    return chart.base_radius * fourier_series(1.0, chart.cos_coeffs, chart.sin_coeffs, theta, deriv)


@dataclass(frozen=True)
class BoundaryFrame:
    """Boundary data at one or many angles; vectors carry a trailing axis of length 2."""
    point: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    arc_weight: np.ndarray

    @property
    def tangent(self) -> np.ndarray:
        return np.stack([-self.normal[..., 1], self.normal[..., 0]], axis=-1)


def boundary_frame(chart: StarChart, theta) -> BoundaryFrame:
    """Point, outward normal, curvature and arc element dsigma/dtheta.

    Args:
        chart: The domain
        theta: Angle or array of angles

    Returns:
        The frame, vectorized over ``theta``
    """
    theta = np.asarray(theta, dtype=float)
    R = radius(chart, theta)
    dR = radius(chart, theta, 1)
    d2R = radius(chart, theta, 2)
    radial = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    angular = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    speed = np.sqrt(R ** 2 + dR ** 2)
    normal = (R[..., None] * radial - dR[..., None] * angular) / speed[..., None]
    curvature = (R ** 2 + 2.0 * dR ** 2 - R * d2R) / speed ** 3
    return BoundaryFrame(point=R[..., None] * radial, normal=normal,
                         curvature=curvature, arc_weight=speed)


@dataclass(frozen=True)
class BoundarySamples:
    """Boundary frame on the periodic grid together with the dsigma weights."""
    theta: np.ndarray
    frame: BoundaryFrame
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values), axis=-1))

    @property
    def size(self) -> int:
        return self.theta.size


def boundary_samples(chart: StarChart, grid: int = BOUNDARY_GRID) -> BoundarySamples:
    rule = periodic_trapezoid(grid)
    frame = boundary_frame(chart, rule.nodes)
    return BoundarySamples(theta=rule.nodes, frame=frame, weights=rule.weights * frame.arc_weight)


def perimeter(chart: StarChart, grid: int = BOUNDARY_GRID) -> float:
    return boundary_samples(chart, grid).integrate(1.0)


def volume(chart: StarChart) -> float:
    """Area enclosed by the chart, half the integral of R^2 over [0, 2 pi)."""
    rule = periodic_trapezoid(max(BOUNDARY_GRID, 4 * chart.order + 4))
    return 0.5 * rule.integrate(radius(chart, rule.nodes) ** 2)


def tangential_derivative(chart: StarChart, samples, grid: int = BOUNDARY_GRID) -> np.ndarray:
    """d/dsigma of boundary samples on the periodic grid.

    The theta derivative is spectral (FFT); the result is divided by the
    arc element.

    Args:
        chart: The domain the samples live on
        samples: Values at theta_j = 2 pi j / grid along the last axis
        grid: Expected number of samples

    Returns:
        Samples of the arc-length derivative
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != grid:
        raise InvalidParametersError(
            f"Expected {grid} boundary samples, got {samples.shape[-1]}")
    spectrum = np.fft.rfft(samples, axis=-1)
    wavenumbers = np.arange(spectrum.shape[-1])
    factor = 1j * wavenumbers
    if grid % 2 == 0:
        factor[-1] = 0.0
    d_theta = np.fft.irfft(spectrum * factor, n=grid, axis=-1)
    nodes = periodic_trapezoid(grid).nodes
    return d_theta / boundary_frame(chart, nodes).arc_weight


def normal_speed(chart: StarChart, f: NormalPerturbation, theta) -> np.ndarray:
    """Normal component of the displacement f(theta) e_r of the family R + t f."""
    R = radius(chart, theta)
    dR = radius(chart, theta, 1)
    return f.values(theta) * R / np.sqrt(R ** 2 + dR ** 2)


def deformation(chart: StarChart, f: NormalPerturbation, t: float) -> StarChart:
    """The chart with profile R_t(theta) = R(theta) + t f(theta).

    Args:
        chart: Base domain
        f: Normal speed profile
        t: Deformation parameter

    Returns:
        The deformed chart, re-expressed with a new base radius
    """
    if t == 0.0:
        return chart
    order = max(chart.order, f.order)
    if order > FOURIER_LIMIT:
        raise ChartError(f"Deformed chart needs {order} Fourier modes, limit is {FOURIER_LIMIT}")
    samples = max(BOUNDARY_GRID, 16 * order)
    theta = 2.0 * np.pi * np.arange(samples) / samples
    profile = radius(chart, theta) + t * f.values(theta)
    worst = int(np.argmin(profile))
    if profile[worst] <= 0.0:
        raise ChartError(f"Deformation with t={t} makes the radius non-positive at "
                         f"theta={theta[worst]:.6f}", theta=float(theta[worst]))

    base = chart.base_radius + t * f.constant

    def blend(own, other):
        own = list(own) + [0.0] * (order - len(own))
        other = list(other) + [0.0] * (order - len(other))
        return tuple((chart.base_radius * a + t * b) / base for a, b in zip(own, other))

    return StarChart(base_radius=base, cos_coeffs=blend(chart.cos_coeffs, f.cos_coeffs),
                     sin_coeffs=blend(chart.sin_coeffs, f.sin_coeffs))
