"""
Bessel evaluators for the radial factors of disk eigenfunctions.

J_n derivatives come from scipy's recurrence based ``jvp``. The modified
function is returned with the factor exp(-x) so that determinants stay finite
for large arguments.
"""
import numpy as np
from scipy import special
from scipy.special import comb

from system.errors import InvalidParametersError

MAX_DERIV = 3


def _check(n: int, x, deriv: int) -> np.ndarray:
    if int(n) != n or n < 0:
        raise InvalidParametersError(f"Bessel order must be a non-negative integer, got {n}")
    if deriv not in range(MAX_DERIV + 1):
        raise InvalidParametersError(f"Derivative order must be 0..{MAX_DERIV}, got {deriv}")
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)):
        raise InvalidParametersError("Bessel argument must be finite")
    if np.any(x < 0.0):
        raise InvalidParametersError(f"Bessel argument must be non-negative, got min {x.min()}")
    return x


def bessel_j(n: int, x, deriv: int = 0):
    """Value of the deriv-th derivative of J_n at x.

    Args:
        n: Order, a non-negative integer
        x: Non-negative argument, scalar or array
        deriv: Derivative order 0..3

    Returns:
        Scalar or array of the same shape as ``x``
    """
    x = _check(n, x, deriv)
    value = special.jvp(int(n), x, deriv)
    return float(value) if value.ndim == 0 else value


def bessel_i_scaled(n: int, x, deriv: int = 0):
    """exp(-x) times the deriv-th derivative of I_n at x.

    Uses I_n^(d) = 2^-d * sum_k C(d, k) I_{n-d+2k} with I_{-m} = I_m.

    Args:
        n: Order, a non-negative integer
        x: Non-negative argument, scalar or array
        deriv: Derivative order 0..3

    Returns:
        Scalar or array of the same shape as ``x``
    """
    x = _check(n, x, deriv)
    value = sum(comb(deriv, k, exact=True) * special.ive(abs(int(n) - deriv + 2 * k), x)
                for k in range(deriv + 1)) / 2.0 ** deriv
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value
