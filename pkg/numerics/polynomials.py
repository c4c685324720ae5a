"""
Bivariate polynomials stored as coefficient arrays c[i, j] of x^i y^j.

Stacks of polynomials carry a leading axis; evaluation goes through
numpy's pseudo-Vandermonde matrices so one product serves a whole basis.
"""
from typing import List

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import convolve2d

from numerics.derivatives import ORDERS, FieldDerivatives

X = np.array([[0.0, 0.0], [1.0, 0.0]])
Y = np.array([[0.0, 1.0], [0.0, 0.0]])
R2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])


def poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two coefficient arrays."""
    return convolve2d(a, b)


def poly_pow(a: np.ndarray, exponent: int) -> np.ndarray:
    result = np.ones((1, 1), dtype=a.dtype)
    for _ in range(exponent):
        result = poly_mul(result, a)
    return result


def complex_power(m: int):
    """Real and imaginary parts of (x + i y)^m."""
    z = poly_pow(X + 1j * Y, m)
    return np.real(z), np.imag(z)


def compose_r2(coefficients) -> np.ndarray:
    """Coefficient array of q(x^2 + y^2) for q given by ascending coefficients."""
    result = np.zeros((1, 1))
    power = np.ones((1, 1))
    for c in coefficients:
        result = pad_to(result, power.shape[0]) + c * pad_to(power, result.shape[0])
        power = poly_mul(power, R2)
    return result


def pad_to(a: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad a square coefficient array to size x size (never truncates)."""
    size = max(size, a.shape[-1])
    pad = [(0, 0)] * (a.ndim - 2) + [(0, size - a.shape[-2]), (0, size - a.shape[-1])]
    return np.pad(a, pad)


def stack(polys: List[np.ndarray]) -> np.ndarray:
    """Stack polynomials of different degrees into (count, n, n)."""
    size = max(max(p.shape) for p in polys)
    return np.stack([pad_to(p, size) for p in polys])


def evaluate_stack(coefficients: np.ndarray, x: np.ndarray, y: np.ndarray) -> FieldDerivatives:
    """Derivative bundle of a stack of polynomials at points.

    Args:
        coefficients: Array of shape (count, n, n)
        x: Abscissae of shape (points,)
        y: Ordinates of shape (points,)

    Returns:
        Bundle whose arrays have shape (points, count)
    """
    degree = coefficients.shape[-1] - 1
    vander = P.polyvander2d(np.ravel(x), np.ravel(y), [degree, degree])
    partials = {}
    for a, b in ORDERS:
        c = coefficients
        if a:
            c = P.polyder(c, a, axis=1)
        if b:
            c = P.polyder(c, b, axis=2)
        c = pad_to(c, degree + 1)
        partials[(a, b)] = vander @ c.reshape(c.shape[0], -1).T
    return FieldDerivatives(partials)
