"""
Assembly of the plate forms over a basis.

    M[u][v] = int D2u : D2v        B[u][v] = int Lap u Lap v
    L[u][v] = int grad u . grad v  P = (1 - sigma) M + sigma B + tau L
    J1 = int u v     J2 = oint du/dnu dv/dnu     J3 = oint u v
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Protocol, Sequence, Tuple

import numpy as np

from forms.grids import VolumeGrid, volume_grid
from geometry.charts import BoundarySamples, boundary_samples
from models.geometry_models import StarChart
from models.plate_models import BoundaryProblem, PlateParams, SpaceConstraint
from numerics.derivatives import ORDERS, FieldDerivatives
from numerics.linalg import cholesky_lower
from system.config import ANGULAR_NODES, BOUNDARY_GRID, RADIAL_NODES
from system.errors import BasisConstraintError, NotPositiveDefiniteError, SolverError
from system.parallel import parallel_map

logger = logging.getLogger(__name__)


class Basis(Protocol):
    """What assembly needs from a basis."""
    constraint: SpaceConstraint
    labels: Tuple[str, ...]
    constant_index: Optional[int]

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> FieldDerivatives:
        """Bundle with arrays of shape (points, functions)."""


@dataclass(frozen=True)
class QuadratureSizes:
    radial: int = RADIAL_NODES
    angular: int = ANGULAR_NODES
    boundary: int = BOUNDARY_GRID


@dataclass(frozen=True)
class FormMatrices:
    """Form matrices over the effective basis.

    ``transform`` maps effective coefficients to coefficients over the
    original basis; it is the identity unless constants were quotiented.
    """
    M: np.ndarray
    B: np.ndarray
    L: np.ndarray
    P: np.ndarray
    J: np.ndarray
    labels: Tuple[str, ...]
    transform: np.ndarray
    form_index: int

    @property
    def size(self) -> int:
        return self.P.shape[0]


def weighted_gram(channels: Sequence[Tuple[float, np.ndarray]], weights: np.ndarray) -> np.ndarray:
    """Symmetric matrix G_ij = sum_c coef_c sum_p w_p a_c[i, p] a_c[j, p].

    Each row is reduced along the contiguous point axis, which numpy sums
    pairwise; rows are spread over the thread pool.

    Args:
        channels: Pairs (coefficient, samples of shape (functions, points))
        weights: Quadrature weights of shape (points,)

    Returns:
        The Gram matrix
    """
    channels = [(coef, np.ascontiguousarray(a)) for coef, a in channels if coef != 0.0]
    size = channels[0][1].shape[0] if channels else 0

    def row(i: int) -> np.ndarray:
        total = np.zeros(size - i)
        for coef, a in channels:
            total += coef * np.sum((a[i] * weights) * a[i:], axis=1)
        return total

    gram = np.zeros((size, size))
    for i, values in enumerate(parallel_map(row, range(size))):
        gram[i, i:] = values
        gram[i:, i] = values
    return gram


def volume_forms(samples: FieldDerivatives, grid: VolumeGrid) -> dict:
    """M, B, L and J1 from basis samples of shape (points, functions)."""
    d = samples.map(lambda a: a.T)
    w = grid.weights
    lap = d[(2, 0)] + d[(0, 2)]
    return {
        "M": weighted_gram([(1.0, d[(2, 0)]), (2.0, d[(1, 1)]), (1.0, d[(0, 2)])], w),
        "B": weighted_gram([(1.0, lap)], w),
        "L": weighted_gram([(1.0, d[(1, 0)]), (1.0, d[(0, 1)])], w),
        "J1": weighted_gram([(1.0, d[(0, 0)])], w),
    }


def boundary_forms(samples: FieldDerivatives, boundary: BoundarySamples) -> dict:
    """J2 and J3 from basis samples on the boundary grid."""
    normal = boundary.frame.normal[:, None, :]
    d_nu = samples.directional(normal).T
    return {
        "J2": weighted_gram([(1.0, d_nu)], boundary.weights),
        "J3": weighted_gram([(1.0, samples.value.T)], boundary.weights),
    }


def quotient_transform(J: np.ndarray, constant_index: int) -> np.ndarray:
    """Columns e_k - (J[k, c] / J[c, c]) e_c for k != c.

    The shifted functions are J-orthogonal to the constant c, which is then
    dropped.
    """
    size = J.shape[0]
    keep = [k for k in range(size) if k != constant_index]
    T = np.zeros((size, size - 1))
    T[keep, np.arange(size - 1)] = 1.0
    T[constant_index, :] = -J[keep, constant_index] / J[constant_index, constant_index]
    return T


def assemble(chart: StarChart, params: PlateParams, problem: BoundaryProblem, basis: Basis,
             quad: QuadratureSizes = QuadratureSizes(), quotient: Optional[bool] = None) -> FormMatrices:
    """Assemble M, B, L, P and J_i over ``basis`` on ``chart``.

    Args:
        chart: The domain
        params: Tension and Poisson ratio
        problem: Fixes the right-hand form J_i and the required constraint
        basis: Functions honouring ``problem.space_constraint``
        quad: Volume and boundary rule sizes
        quotient: Factor constants out; defaults to ``problem.quotient_constants``

    Returns:
        The matrices over the effective basis
    """
    if basis.constraint != problem.space_constraint:
        raise BasisConstraintError(
            f"{problem.kind.value} needs a {problem.space_constraint.value} basis, "
            f"got {basis.constraint.value}")
    quotient = problem.quotient_constants if quotient is None else quotient

    grid = volume_grid(chart, quad.radial, quad.angular)
    forms = volume_forms(basis.evaluate(grid.x, grid.y), grid)
    if problem.form_index != 1:
        boundary = boundary_samples(chart, quad.boundary)
        point = boundary.frame.point
        forms.update(boundary_forms(basis.evaluate(point[:, 0], point[:, 1]), boundary))
    J = forms[f"J{problem.form_index}"]
    P = (1.0 - params.sigma) * forms["M"] + params.sigma * forms["B"] + params.tau * forms["L"]

    matrices = FormMatrices(M=forms["M"], B=forms["B"], L=forms["L"], P=P, J=J,
                            labels=tuple(basis.labels), transform=np.eye(len(basis.labels)),
                            form_index=problem.form_index)
    logger.info(f"Assembled {problem.kind.value} forms over {matrices.size} functions "
                f"on {grid.size} volume nodes")
    if not quotient:
        return matrices

    if basis.constant_index is None:
        raise BasisConstraintError("Quotienting constants needs a basis containing the constant")
    T = quotient_transform(J, basis.constant_index)
    reduced = {name: T.T @ getattr(matrices, name) @ T for name in ("M", "B", "L", "P", "J")}
    labels = tuple(label for k, label in enumerate(basis.labels) if k != basis.constant_index)
    matrices = replace(matrices, labels=labels, transform=T,
                       **{name: 0.5 * (value + value.T) for name, value in reduced.items()})
    try:
        cholesky_lower(matrices.P)
    except NotPositiveDefiniteError as e:
        raise SolverError(f"P is singular after quotienting constants (pivot {e.pivot})") from e
    return matrices


def energy_gram(functions: Sequence, chart: StarChart, params: PlateParams,
                quad: QuadratureSizes = QuadratureSizes()) -> np.ndarray:
    """P inner products of eigenfunction handles, by volume quadrature.

    Args:
        functions: Objects with ``derivatives(x, y)``
        chart: The domain they live on
        params: Tension and Poisson ratio
        quad: Volume rule sizes

    Returns:
        The symmetric matrix P[f_i][f_j]
    """
    grid = volume_grid(chart, quad.radial, quad.angular)
    samples = [f.derivatives(grid.x, grid.y) for f in functions]
    stacked = FieldDerivatives({key: np.stack([s[key] for s in samples]) for key in ORDERS})
    lap = stacked.laplacian
    sigma, tau = params.sigma, params.tau
    return weighted_gram([(1.0 - sigma, stacked[(2, 0)]), (2.0 * (1.0 - sigma), stacked[(1, 1)]),
                          (1.0 - sigma, stacked[(0, 2)]), (sigma, lap),
                          (tau, stacked[(1, 0)]), (tau, stacked[(0, 1)])], grid.weights)
