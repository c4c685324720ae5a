"""
Boundary shape densities G(v) of the five plate problems.

With v P-normalized and lambda the cluster eigenvalue:

    Dirichlet   -(v_nn)^2
    Neumann     (1-s)|D2v|^2 + s (Lap v)^2 + tau |grad v|^2 - lambda v^2
    Navier      2 v_n (d_n Lap v + (1-s) div_b) + (1-s)|D2v|^2 + s (Lap v)^2 - tau v_n^2
    Steklov KS  Navier - lambda K v_n^2 - lambda d_n (v_n^2)
    Steklov BP  (1-s)|D2v|^2 + s (Lap v)^2 + tau |grad v|^2 - lambda K v^2 - lambda d_n (v^2)

where div_b is the boundary divergence of the tangential part of D2v nu.
"""
import logging
from dataclasses import dataclass

import numpy as np

from geometry.charts import BoundarySamples, boundary_samples, tangential_derivative
from models.geometry_models import RectangleDomain, StarChart
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from reference_spectra.clusters import EigenCluster, Eigenfunction
from system.config import BOUNDARY_GRID
from system.errors import InvalidParametersError, NonFiniteValueError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GDensitySample:
    """G(v_l) for every cluster member on the periodic boundary grid."""
    theta: np.ndarray
    values: np.ndarray
    kind: ProblemKind
    lambda_F: float
    boundary: BoundarySamples

    @property
    def total(self) -> np.ndarray:
        """Per-node sum over the members."""
        return self.values.sum(axis=0)


def _member_density(problem: BoundaryProblem, params: PlateParams, lam: float, v: Eigenfunction,
                    chart: StarChart, boundary: BoundarySamples) -> np.ndarray:
    frame = boundary.frame
    nu, K = frame.normal, frame.curvature
    d = v.derivatives(frame.point[:, 0], frame.point[:, 1])
    sigma, tau = params.sigma, params.tau
    v_n = d.directional(nu)
    v_nn = d.second_directional(nu, nu)
    energy = (1.0 - sigma) * d.hessian_norm2 + sigma * d.laplacian ** 2

    kind = problem.kind
    if kind == ProblemKind.DIRICHLET:
        return -v_nn ** 2
    if kind == ProblemKind.NEUMANN:
        return energy + tau * np.sum(d.gradient ** 2, axis=-1) - lam * d.value ** 2
    if kind == ProblemKind.STEKLOV_BP:
        return (energy + tau * np.sum(d.gradient ** 2, axis=-1)
                - lam * K * d.value ** 2 - 2.0 * lam * d.value * v_n)

    d_n_lap = np.sum(d.grad_laplacian * nu, axis=-1)
    shear = d.second_directional(frame.tangent, nu)
    div_b = tangential_derivative(chart, shear, boundary.size)
    density = 2.0 * v_n * (d_n_lap + (1.0 - sigma) * div_b) + energy - tau * v_n ** 2
    if kind == ProblemKind.STEKLOV_KS:
        density = density - lam * K * v_n ** 2 - 2.0 * lam * v_n * v_nn
    return density


def g_density(problem: BoundaryProblem, params: PlateParams, cluster: EigenCluster,
              chart: StarChart, grid: int = BOUNDARY_GRID) -> GDensitySample:
    """Shape densities of the cluster members on the boundary of ``chart``.

    Args:
        problem: The plate problem the cluster solves
        params: Tension and Poisson ratio
        cluster: Eigenvalue cluster with P-orthonormal members
        chart: The domain the members live on
        grid: Periodic boundary grid size

    Returns:
        The density samples
    """
    if isinstance(chart, RectangleDomain):
        raise InvalidParametersError("Shape densities need a smooth boundary; rectangles have corners")
    boundary = boundary_samples(chart, grid)
    values = np.stack([_member_density(problem, params, cluster.lambda_F, v, chart, boundary)
                       for v in cluster.members])
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"Non-finite shape density for the cluster at {cluster.lambda_F:.10g}")
    logger.debug(f"{problem.kind.value} densities of {cluster.size} members on {grid} nodes")
    return GDensitySample(theta=boundary.theta, values=values, kind=problem.kind,
                          lambda_F=cluster.lambda_F, boundary=boundary)
