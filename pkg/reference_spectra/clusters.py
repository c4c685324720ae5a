"""
Eigenvalue clusters and the eigenfunction handles they carry.
"""
import logging
from dataclasses import dataclass
from typing import List, Protocol, Sequence, Tuple

import numpy as np

from numerics.derivatives import FieldDerivatives
from system.config import CLUSTER_REL_TOL
from system.errors import InvalidParametersError, SolverError

logger = logging.getLogger(__name__)


class Eigenfunction(Protocol):
    """Anything that can report its eigenvalue and Cartesian derivatives."""
    eigenvalue: float

    def derivatives(self, x, y) -> FieldDerivatives:
        """Partials up to third order at points."""


@dataclass(frozen=True)
class LinearCombination:
    """sum_k c_k member_k, used after re-orthonormalizing a cluster."""
    members: Tuple[Eigenfunction, ...]
    coefficients: Tuple[float, ...]
    eigenvalue: float

    def derivatives(self, x, y) -> FieldDerivatives:
        return FieldDerivatives.combine(self.coefficients, (m.derivatives(x, y) for m in self.members))


@dataclass(frozen=True)
class EigenCluster:
    """Numerically coincident eigenvalues with a P-orthonormal eigenbasis.

    ``indices`` are 0-based positions in the ascending global ordering.
    """
    lambda_F: float
    members: Tuple[Eigenfunction, ...]
    indices: Tuple[int, ...]
    eigenvalues: Tuple[float, ...]
    partial: bool = False

    @property
    def size(self) -> int:
        return len(self.indices)

    def subset(self, positions: Sequence[int]) -> "EigenCluster":
        """A part of the cluster, flagged as partial."""
        positions = list(positions)
        if not positions or any(p not in range(self.size) for p in positions):
            raise InvalidParametersError(f"Member positions {positions} out of range 0..{self.size - 1}")
        return EigenCluster(lambda_F=self.lambda_F,
                            members=tuple(self.members[p] for p in positions),
                            indices=tuple(self.indices[p] for p in positions),
                            eigenvalues=tuple(self.eigenvalues[p] for p in positions),
                            partial=len(positions) < self.size)


def cluster(eigs: Sequence[float], rel_tol: float = CLUSTER_REL_TOL) -> List[List[int]]:
    """Split ascending eigenvalues into maximal runs of small relative gaps.

    Args:
        eigs: Ascending values
        rel_tol: Largest relative gap between consecutive members

    Returns:
        Index sets (0-based) covering every position
    """
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size and np.any(np.diff(eigs) < 0.0):
        raise InvalidParametersError("Eigenvalues must be ascending")
    groups: List[List[int]] = []
    for k, value in enumerate(eigs):
        if groups:
            previous = eigs[k - 1]
            scale = max(abs(previous), abs(value))
            if value - previous <= rel_tol * scale:
                groups[-1].append(k)
                continue
        groups.append([k])
    return groups


def build_clusters(eigs: Sequence[float], members: Sequence[Eigenfunction],
                   rel_tol: float = CLUSTER_REL_TOL) -> List[EigenCluster]:
    """Group members by their ascending eigenvalues."""
    eigs = list(eigs)
    clusters = []
    for group in cluster(eigs, rel_tol):
        values = tuple(eigs[k] for k in group)
        clusters.append(EigenCluster(lambda_F=float(np.mean(values)),
                                     members=tuple(members[k] for k in group),
                                     indices=tuple(group), eigenvalues=values))
    return clusters


def p_orthonormalize(cluster_: EigenCluster, gram: np.ndarray, tol: float = 1e-12) -> EigenCluster:
    """Modified Gram-Schmidt of the members in the P inner product.

    Args:
        cluster_: The cluster to normalize
        gram: P inner products of its members
        tol: Deviation from the identity below which the cluster is returned as is

    Returns:
        A cluster whose members are P-orthonormal
    """
    gram = np.asarray(gram, dtype=float)
    size = cluster_.size
    if np.max(np.abs(gram - np.eye(size))) <= tol:
        return cluster_
    # columns of C are the coefficients of the new members
    C = np.eye(size)
    for k in range(size):
        for j in range(k):
            C[:, k] -= (C[:, j] @ gram @ C[:, k]) * C[:, j]
        norm2 = C[:, k] @ gram @ C[:, k]
        if norm2 <= 0.0:
            raise SolverError(f"Cluster member {k} has non-positive P norm {norm2:.3e}")
        C[:, k] /= np.sqrt(norm2)
    logger.debug(f"Re-orthonormalized cluster at {cluster_.lambda_F:.10g}, "
                 f"max Gram defect {np.max(np.abs(gram - np.eye(size))):.2e}")
    members = tuple(LinearCombination(members=cluster_.members, coefficients=tuple(C[:, k]),
                                      eigenvalue=cluster_.eigenvalues[k]) for k in range(size))
    return EigenCluster(lambda_F=cluster_.lambda_F, members=members, indices=cluster_.indices,
                        eigenvalues=cluster_.eigenvalues, partial=cluster_.partial)
