"""
Radial symmetry of eigenspace sums on the disk.

For a full cluster the sums of v^2, |grad v|^2, (Lap v)^2 and |D2v|^2 over
the members do not depend on the angle.
"""
import logging
from typing import List, Sequence

import numpy as np

from models.geometry_models import StarChart
from models.response_models import RadialityProfile
from numerics.quadrature import periodic_trapezoid
from reference_spectra.clusters import EigenCluster
from system.config import ANGULAR_NODES
from system.errors import InvalidParametersError, PartialClusterError

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-12
# Sums below this fraction of the cluster's largest sum count as zero.
CLUSTER_FLOOR = 1e-10


def _variation(sums: np.ndarray, scale: float, cluster_scale: float) -> float:
    """(max - min) / max, floored by the sum's size over the disk and by the cluster's largest sum."""
    floor = max(RELATIVE_FLOOR * scale, CLUSTER_FLOOR * cluster_scale, 1e-300)
    return float((sums.max() - sums.min()) / max(np.abs(sums).max(), floor))


def radiality_profiles(cluster: EigenCluster, chart: StarChart, radii: Sequence[float],
                       grid: int = ANGULAR_NODES, allow_partial: bool = False) -> List[RadialityProfile]:
    """Angular variation of the four eigenspace sums on circles.

    Args:
        cluster: Eigenvalue cluster on the disk
        chart: The disk
        radii: Circle radii in (0, R]
        grid: Angular samples per circle
        allow_partial: Accept a partial cluster (the sums are then not radial)

    Returns:
        One profile per radius
    """
    if not chart.is_disk:
        raise InvalidParametersError("Radiality is only defined on the disk")
    if cluster.partial and not allow_partial:
        raise PartialClusterError(
            f"Radiality needs the full cluster at {cluster.lambda_F:.10g}, got {cluster.size} members")
    R = chart.base_radius
    radii = [float(r) for r in radii]
    if any(r <= 0.0 or r > R * (1.0 + 1e-12) for r in radii):
        raise InvalidParametersError(f"Radii must lie in (0, {R}], got {radii}")

    theta = periodic_trapezoid(grid).nodes
    sums = []
    for r in radii:
        x, y = r * np.cos(theta), r * np.sin(theta)
        totals = np.zeros((4, grid))
        for member in cluster.members:
            d = member.derivatives(x, y)
            totals += np.stack([d.value ** 2, np.sum(d.gradient ** 2, axis=-1),
                                d.laplacian ** 2, d.hessian_norm2])
        sums.append(totals)
    scales = np.max(np.abs(np.stack(sums)), axis=(0, 2))
    cluster_scale = float(scales.max())

    profiles = []
    for r, totals in zip(radii, sums):
        variation = [_variation(totals[k], scales[k], cluster_scale) for k in range(4)]
        profiles.append(RadialityProfile(radius=r, value_sq=variation[0], gradient_sq=variation[1],
                                         laplacian_sq=variation[2], hessian_sq=variation[3]))
    logger.info(f"Radiality of the cluster at {cluster.lambda_F:.10g}: worst variation "
                f"{max(p.worst for p in profiles):.3e}")
    return profiles
