"""
Ritz eigensolver for P[u][v] = lambda J_i[u][v] on a boundary-adapted basis.

The pencil is solved reversed, J w = mu P w with mu = 1 / lambda, so that the
semidefinite boundary forms are admissible; mu below 1e-12 max(mu) belong to
the kernel of J and are discarded. The backward error of a kept pair may grow
like max(mu) / mu with the conditioning of P, so its bound is scaled that way.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from forms.assembly import FormMatrices, QuadratureSizes, assemble
from geometry.charts import radius
from models.geometry_models import StarChart
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from numerics.derivatives import FieldDerivatives
from numerics.linalg import backward_errors, sym_generalized_eig
from reference_spectra.clusters import EigenCluster, build_clusters
from ritz.basis import RitzBasis
from system.config import CLUSTER_REL_TOL, EIG_RESIDUAL_TOL
from system.errors import ConvergenceError, InvalidParametersError, TruncationError

logger = logging.getLogger(__name__)

INFINITE_CUTOFF = 1e-12


@dataclass(frozen=True)
class RitzSolution:
    """A Ritz eigenpair; ``coefficients`` refer to the full (unquotiented) basis."""
    eigenvalue: float
    coefficients: np.ndarray
    basis: RitzBasis
    kind: ProblemKind

    @property
    def chart(self) -> StarChart:
        return self.basis.chart

    def derivatives(self, x, y) -> FieldDerivatives:
        return ritz_eval(self, x, y)


@dataclass(frozen=True)
class RitzResult:
    eigenvalues: np.ndarray
    solutions: List[RitzSolution]
    matrices: FormMatrices


def _check_residuals(J: np.ndarray, right: np.ndarray, mu: np.ndarray, W: np.ndarray,
                     tol: float = EIG_RESIDUAL_TOL) -> None:
    errors = backward_errors(J, right, mu, W)
    allowed = tol * mu.max() / mu
    if np.any(errors > allowed):
        worst = int(np.argmax(errors / allowed))
        raise ConvergenceError(f"Ritz pair {worst} has backward error {errors[worst]:.3e}, "
                               f"above {allowed[worst]:.1e}")
    logger.debug(f"Ritz backward errors up to {errors.max():.3e}")


def solve_ritz(chart: StarChart, params: PlateParams, problem: BoundaryProblem, basis: RitzBasis,
               quad: QuadratureSizes = QuadratureSizes(), quotient: Optional[bool] = None) -> RitzResult:
    """All finite Ritz eigenpairs, ascending.

    Args:
        chart: The domain
        params: Tension and Poisson ratio
        problem: The plate problem
        basis: Basis matching ``problem.space_constraint``
        quad: Quadrature sizes
        quotient: Factor out constants; ``False`` keeps them and solves with
            P + J on the right, which exposes the kernel as lambda = 0

    Returns:
        Eigenvalues and P-normalized solutions (J-normalized for kernel modes)
    """
    params.check_for(problem)
    quotient = problem.quotient_constants if quotient is None else quotient
    matrices = assemble(chart, params, problem, basis, quad, quotient=quotient)
    shifted = problem.quotient_constants and not quotient
    right = matrices.P + matrices.J if shifted else matrices.P

    # the kernel of J has no meaningful residual; kept pairs are checked below
    mu, W = sym_generalized_eig(matrices.J, right, residual_tol=None)
    keep = mu > INFINITE_CUTOFF * mu.max()
    mu, W = mu[keep][::-1], W[:, keep][:, ::-1]
    _check_residuals(matrices.J, right, mu, W)
    eigenvalues = 1.0 / mu - 1.0 if shifted else 1.0 / mu

    solutions = []
    for lam, w in zip(eigenvalues, W.T):
        if shifted:
            energy = w @ matrices.P @ w
            if energy > 1e-8 * (w @ right @ w):
                w = w / np.sqrt(energy)
        solutions.append(RitzSolution(eigenvalue=float(lam), coefficients=matrices.transform @ w,
                                      basis=basis, kind=problem.kind))
    logger.info(f"Ritz {problem.kind.value}: {len(solutions)} finite eigenvalues from "
                f"{matrices.size} functions, lowest {eigenvalues[0]:.10g}")
    return RitzResult(eigenvalues=eigenvalues, solutions=solutions, matrices=matrices)


def ritz_spectrum(chart: StarChart, params: PlateParams, problem: BoundaryProblem, basis: RitzBasis,
                  quad: QuadratureSizes = QuadratureSizes(), count: int = 5,
                  quotient: Optional[bool] = None) -> List[EigenCluster]:
    """The lowest ``count`` Ritz clusters.

    Args:
        chart: The domain
        params: Tension and Poisson ratio
        problem: The plate problem
        basis: Basis matching ``problem.space_constraint``
        quad: Quadrature sizes
        count: Number of clusters
        quotient: See ``solve_ritz``

    Returns:
        Clusters of P-orthonormal RitzSolution members
    """
    quotient = problem.quotient_constants if quotient is None else quotient
    available = basis.size - (1 if quotient and problem.quotient_constants else 0)
    if count < 1 or count > available:
        raise InvalidParametersError(f"count must be in 1..{available}, got {count}")
    result = solve_ritz(chart, params, problem, basis, quad, quotient)
    clusters = build_clusters(result.eigenvalues, result.solutions, CLUSTER_REL_TOL)
    if len(clusters) < count:
        raise TruncationError(f"Only {len(clusters)} Ritz clusters available, {count} requested")
    return clusters[:count]


def ritz_eval(solution: RitzSolution, x, y) -> FieldDerivatives:
    """Derivatives up to third order of a Ritz eigenfunction at points.

    Args:
        solution: The eigenpair
        x: Abscissae inside the closed domain
        y: Ordinates inside the closed domain

    Returns:
        Bundle shaped like the broadcast of x and y
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    theta = np.arctan2(y, x)
    if np.any(np.hypot(x, y) > radius(solution.chart, theta) * (1.0 + 1e-12)):
        raise InvalidParametersError("Evaluation point outside the domain")
    samples = solution.basis.evaluate(x, y)
    coefficients = solution.coefficients
    return samples.map(lambda a: (a @ coefficients).reshape(x.shape))
