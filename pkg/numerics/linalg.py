"""
Dense symmetric generalized eigensolver A w = mu B w with B positive definite.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh, lapack, solve_triangular

from system.config import EIG_RESIDUAL_TOL
from system.errors import ConvergenceError, InvalidParametersError, NotPositiveDefiniteError

logger = logging.getLogger(__name__)


def symmetrize(matrix) -> np.ndarray:
    """Return the exactly symmetric part of a square matrix."""
    matrix = np.asarray(matrix, dtype=float)
    return 0.5 * (matrix + matrix.T)


def cholesky_lower(matrix) -> np.ndarray:
    """Lower Cholesky factor; raises NotPositiveDefiniteError naming the pivot."""
    factor, info = lapack.dpotrf(np.asarray(matrix, dtype=float), lower=1, clean=1)
    if info > 0:
        # LAPACK reports the 1-based order of the failing leading minor
        raise NotPositiveDefiniteError(int(info) - 1)
    if info < 0:
        raise InvalidParametersError(f"dpotrf rejected argument {-info}")
    return factor


def backward_errors(A: np.ndarray, B: np.ndarray, mu: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Normwise backward error |A w - mu B w| / ((|A| + |mu| |B|) |w|) of every pair."""
    if not mu.size:
        return np.zeros(0)
    residual = A @ W - (B @ W) * mu
    scale = (np.linalg.norm(A, 2) + np.abs(mu) * np.linalg.norm(B, 2)) * np.linalg.norm(W, axis=0)
    return np.linalg.norm(residual, axis=0) / scale


def sym_generalized_eig(A, B, residual_tol: Optional[float] = EIG_RESIDUAL_TOL
                        ) -> Tuple[np.ndarray, np.ndarray]:
    """Solve A w = mu B w for symmetric A and symmetric positive definite B.

    B = L L^T is factored, the standard problem L^-1 A L^-T y = mu y is
    diagonalized by LAPACK and w = L^-T y.

    Args:
        A: Symmetric matrix
        B: Symmetric positive definite matrix of the same order
        residual_tol: Bound on the normwise backward error of every pair,
            ``None`` skips the check

    Returns:
        Ascending eigenvalues and the B-orthonormal eigenvectors as columns
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise InvalidParametersError(f"Incompatible shapes {A.shape} and {B.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise InvalidParametersError("Matrices contain non-finite entries")

    L = cholesky_lower(B)
    C = solve_triangular(L, A, lower=True)
    C = solve_triangular(L, C.T, lower=True)
    try:
        mu, Y = eigh(symmetrize(C))
    except LinAlgError as e:
        raise ConvergenceError(f"Symmetric eigensolver did not converge: {e}") from e
    W = solve_triangular(L.T, Y, lower=False)

    if residual_tol is not None and mu.size:
        worst = float(backward_errors(A, B, mu, W).max())
        logger.debug(f"Generalized eigensolve of order {A.shape[0]}: max backward error {worst:.3e}")
        if worst > residual_tol:
            raise ConvergenceError(
                f"Eigenpair residual {worst:.3e} exceeds tolerance {residual_tol:.1e}")
    return mu, W
