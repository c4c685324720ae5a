"""
First-order shape derivatives of symmetric functions of eigenvalue clusters.

For a normal speed f on the boundary

    d Lambda_{F,s} = lambda_F^s C(|F|-1, s-1) sum_l oint G(v_l) (zeta . nu) dsigma

with {v_l} P-orthonormal.
"""
import logging

from scipy.special import comb

from forms.assembly import QuadratureSizes, energy_gram
from geometry.charts import boundary_samples, normal_speed
from models.geometry_models import NormalPerturbation, StarChart
from models.plate_models import BoundaryProblem, PlateParams
from reference_spectra.clusters import EigenCluster, p_orthonormalize
from shape_calculus.densities import g_density
from system.config import BOUNDARY_GRID
from system.errors import InvalidParametersError

logger = logging.getLogger(__name__)


def orthonormal_cluster(cluster: EigenCluster, chart: StarChart, params: PlateParams,
                        quad: QuadratureSizes = QuadratureSizes()) -> EigenCluster:
    """The cluster re-orthonormalized in the P inner product evaluated by quadrature."""
    gram = energy_gram(cluster.members, chart, params, quad)
    return p_orthonormalize(cluster, gram)


def hadamard_derivative(problem: BoundaryProblem, params: PlateParams, chart: StarChart,
                        cluster: EigenCluster, s: int, f: NormalPerturbation,
                        grid: int = BOUNDARY_GRID, quad: QuadratureSizes = QuadratureSizes()) -> float:
    """Derivative of Lambda_{F,s} along the normal speed ``f``.

    Args:
        problem: The plate problem
        params: Tension and Poisson ratio
        chart: The domain the cluster lives on
        cluster: The full eigenvalue cluster
        s: Order of the symmetric function, 1..|F|
        f: Normal speed profile; the boundary moves along e_r
        grid: Boundary grid size
        quad: Volume rule used for the P-orthonormalization

    Returns:
        The boundary-integral value of the derivative
    """
    if not 1 <= s <= cluster.size:
        raise InvalidParametersError(f"s must be in 1..{cluster.size}, got {s}")
    cluster = orthonormal_cluster(cluster, chart, params, quad)
    sample = g_density(problem, params, cluster, chart, grid)
    speed = normal_speed(chart, f, sample.theta)
    integral = sample.boundary.integrate(sample.total * speed)
    value = cluster.lambda_F ** s * comb(cluster.size - 1, s - 1, exact=True) * integral
    logger.info(f"Hadamard derivative of Lambda_(F,{s}) at {cluster.lambda_F:.10g}: {value:.12g}")
    return float(value)


def volume_derivative(chart: StarChart, f: NormalPerturbation, grid: int = BOUNDARY_GRID) -> float:
    """oint (zeta . nu) dsigma, the first variation of the area."""
    boundary = boundary_samples(chart, grid)
    return boundary.integrate(normal_speed(chart, f, boundary.theta))


def lagrange_scale(cluster: EigenCluster, chart: StarChart, grid: int = BOUNDARY_GRID) -> float:
    """lambda_F times the perimeter, the natural size of a shape derivative."""
    return abs(cluster.lambda_F) * boundary_samples(chart, grid).integrate(1.0)
