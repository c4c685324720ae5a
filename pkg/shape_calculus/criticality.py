"""
Criticality under a volume constraint: the summed density must be constant.
"""
import logging
from typing import Tuple

import numpy as np

from models.geometry_models import StarChart
from models.plate_models import BoundaryProblem, PlateParams
from models.response_models import CriticalityResidual
from reference_spectra.clusters import EigenCluster
from shape_calculus.densities import GDensitySample, g_density
from shape_calculus.hadamard import orthonormal_cluster
from system.config import BOUNDARY_GRID

logger = logging.getLogger(__name__)

FLOOR = 1e-12


def criticality_profile(problem: BoundaryProblem, params: PlateParams, chart: StarChart,
                        cluster: EigenCluster,
                        grid: int = BOUNDARY_GRID) -> Tuple[GDensitySample, CriticalityResidual]:
    """Per-member densities on the boundary grid and how far their sum is from a constant.

    Args:
        problem: The plate problem
        params: Tension and Poisson ratio
        chart: The domain
        cluster: The full eigenvalue cluster
        grid: Boundary grid size

    Returns:
        The density sample of the P-orthonormalized cluster and the residual
    """
    cluster = orthonormal_cluster(cluster, chart, params)
    sample = g_density(problem, params, cluster, chart, grid)
    total = sample.total
    boundary = sample.boundary
    c_mean = boundary.integrate(total) / boundary.integrate(1.0)
    max_abs_dev = float(np.max(np.abs(total - c_mean)))
    residual = CriticalityResidual(c_mean=c_mean, max_abs_dev=max_abs_dev,
                                   rel_residual=max_abs_dev / max(abs(c_mean), FLOOR))
    logger.info(f"{problem.kind.value} criticality residual at {cluster.lambda_F:.10g}: "
                f"{residual.rel_residual:.3e}")
    return sample, residual


def criticality_residual(problem: BoundaryProblem, params: PlateParams, chart: StarChart,
                         cluster: EigenCluster, grid: int = BOUNDARY_GRID) -> CriticalityResidual:
    """Mean, largest deviation and their ratio for sum_l G(v_l) on the boundary."""
    return criticality_profile(problem, params, chart, cluster, grid)[1]
