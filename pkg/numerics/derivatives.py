"""
Cartesian derivative bundles of scalar fields up to third order.

A ``FieldDerivatives`` stores the partials d^(a+b) v / dx^a dy^b for
a + b <= 3 at a set of points. Arrays broadcast, so one bundle can carry a
whole basis (trailing axis) at all quadrature nodes.
"""
import logging
from functools import lru_cache
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
import sympy
from scipy.special import comb

logger = logging.getLogger(__name__)

ORDERS: Tuple[Tuple[int, int], ...] = tuple(
    (total - b, b) for total in range(4) for b in range(total + 1))


class FieldDerivatives:
    """Partial derivatives of a scalar field, keyed by (a, b)."""

    def __init__(self, partials: Dict[Tuple[int, int], np.ndarray]):
        missing = [key for key in ORDERS if key not in partials]
        if missing:
            raise KeyError(f"Missing partial derivatives {missing}")
        self._partials = {key: np.asarray(partials[key], dtype=float) for key in ORDERS}

    def __getitem__(self, key: Tuple[int, int]) -> np.ndarray:
        return self._partials[key]

    @classmethod
    def constant(cls, value, like: np.ndarray) -> "FieldDerivatives":
        zero = np.zeros_like(like, dtype=float)
        partials = {key: zero for key in ORDERS}
        partials[(0, 0)] = zero + value
        return cls(partials)

    @classmethod
    def combine(cls, coefficients: Sequence[float], fields: Iterable["FieldDerivatives"]) -> "FieldDerivatives":
        """Linear combination sum_i c_i * field_i."""
        fields = list(fields)
        return cls({key: sum(c * f[key] for c, f in zip(coefficients, fields)) for key in ORDERS})

    def map(self, fn) -> "FieldDerivatives":
        """Apply ``fn`` to every stored array (indexing, transposition, ...)."""
        return FieldDerivatives({key: fn(value) for key, value in self._partials.items()})

    def scaled_coordinates(self, factor: float) -> "FieldDerivatives":
        """Derivatives after the substitution x -> x / factor."""
        return FieldDerivatives({(a, b): value / factor ** (a + b)
                                 for (a, b), value in self._partials.items()})

    def __add__(self, other: "FieldDerivatives") -> "FieldDerivatives":
        return FieldDerivatives({key: self[key] + other[key] for key in ORDERS})

    def __sub__(self, other: "FieldDerivatives") -> "FieldDerivatives":
        return FieldDerivatives({key: self[key] - other[key] for key in ORDERS})

    def __mul__(self, scalar) -> "FieldDerivatives":
        return FieldDerivatives({key: scalar * value for key, value in self._partials.items()})

    __rmul__ = __mul__

    def product(self, other: "FieldDerivatives") -> "FieldDerivatives":
        """Leibniz rule for the pointwise product of two fields."""
        partials = {}
        for a, b in ORDERS:
            total = 0.0
            for i in range(a + 1):
                for j in range(b + 1):
                    total = total + comb(a, i) * comb(b, j) * self[(i, j)] * other[(a - i, b - j)]
            partials[(a, b)] = total
        return FieldDerivatives(partials)

    def power(self, exponent: int) -> "FieldDerivatives":
        result = FieldDerivatives.constant(1.0, self.value)
        for _ in range(exponent):
            result = result.product(self)
        return result

    @property
    def value(self) -> np.ndarray:
        return self[(0, 0)]

    @property
    def gradient(self) -> np.ndarray:
        """Shape (..., 2)."""
        return np.stack([self[(1, 0)], self[(0, 1)]], axis=-1)

    @property
    def hessian(self) -> np.ndarray:
        """Shape (..., 2, 2)."""
        row_x = np.stack([self[(2, 0)], self[(1, 1)]], axis=-1)
        row_y = np.stack([self[(1, 1)], self[(0, 2)]], axis=-1)
        return np.stack([row_x, row_y], axis=-2)

    @property
    def laplacian(self) -> np.ndarray:
        return self[(2, 0)] + self[(0, 2)]

    @property
    def hessian_norm2(self) -> np.ndarray:
        """Frobenius square |D^2 v|^2."""
        return self[(2, 0)] ** 2 + 2.0 * self[(1, 1)] ** 2 + self[(0, 2)] ** 2

    @property
    def grad_laplacian(self) -> np.ndarray:
        """Shape (..., 2)."""
        return np.stack([self[(3, 0)] + self[(1, 2)], self[(2, 1)] + self[(0, 3)]], axis=-1)

    def directional(self, n: np.ndarray) -> np.ndarray:
        """First derivative along the vectors n of shape (..., 2)."""
        return self[(1, 0)] * n[..., 0] + self[(0, 1)] * n[..., 1]

    def second_directional(self, n: np.ndarray, m: np.ndarray) -> np.ndarray:
        """Bilinear form n^T D^2 v m."""
        return (self[(2, 0)] * n[..., 0] * m[..., 0]
                + self[(1, 1)] * (n[..., 0] * m[..., 1] + n[..., 1] * m[..., 0])
                + self[(0, 2)] * n[..., 1] * m[..., 1])


@lru_cache(maxsize=1)
def _polar_partials():
    """Cartesian partials of F(r) T(theta), derived symbolically once."""
    r, theta = sympy.symbols("r theta", positive=True)
    F = sympy.Function("F")(r)
    T = sympy.Function("T")(theta)
    f = sympy.symbols("f0:4")
    t = sympy.symbols("t0:4")

    def d_x(expr):
        return sympy.cos(theta) * sympy.diff(expr, r) - sympy.sin(theta) / r * sympy.diff(expr, theta)

    def d_y(expr):
        return sympy.sin(theta) * sympy.diff(expr, r) + sympy.cos(theta) / r * sympy.diff(expr, theta)

    replacements = ([(sympy.diff(F, r, k), f[k]) for k in (3, 2, 1)] + [(F, f[0])]
                    + [(sympy.diff(T, theta, k), t[k]) for k in (3, 2, 1)] + [(T, t[0])])
    functions = {}
    for a, b in ORDERS:
        expr = F * T
        for _ in range(a):
            expr = d_x(expr)
        for _ in range(b):
            expr = d_y(expr)
        expr = sympy.expand(expr).subs(replacements)
        functions[(a, b)] = sympy.lambdify((r, theta, *f, *t), expr, "numpy")
    logger.debug("Derived polar to Cartesian derivative formulas")
    return functions


def polar_separable(radial: Sequence[np.ndarray], angular: Sequence[np.ndarray],
                    r: np.ndarray, theta: np.ndarray) -> FieldDerivatives:
    """Cartesian derivatives of v = F(r) T(theta) away from the origin.

    Args:
        radial: F, F', F'', F''' evaluated at r
        angular: T, T', T'', T''' evaluated at theta
        r: Positive radii
        theta: Angles

    Returns:
        The derivative bundle at the points (r cos theta, r sin theta)
    """
    functions = _polar_partials()
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    shape = np.broadcast(r, theta, *radial, *angular).shape
    return FieldDerivatives({key: np.broadcast_to(fn(r, theta, *radial, *angular), shape)
                             for key, fn in functions.items()})
