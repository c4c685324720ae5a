"""
Exact polynomial fields used by the pulled-back form checks.

Components are sympy polynomials in x, y with rational coefficients, so all
derivatives (the fourth-order ones included) are exact before they are turned
into numpy callables.
"""
import logging
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np
import sympy

from numerics.derivatives import ORDERS, FieldDerivatives
from system.errors import InvalidParametersError

logger = logging.getLogger(__name__)

x, y = sympy.symbols("x y", real=True)
MAX_DEGREE = 6


def _numeric(expr: sympy.Expr):
    fn = sympy.lambdify((x, y), expr, "numpy")
    return lambda px, py: np.broadcast_to(np.asarray(fn(px, py), dtype=float),
                                          np.broadcast(px, py).shape)


class PolynomialField:
    """A scalar (one component) or planar vector (two components) polynomial field."""

    def __init__(self, components: Sequence):
        exprs = tuple(sympy.nsimplify(sympy.sympify(c), rational=True) for c in components)
        if len(exprs) not in (1, 2):
            raise InvalidParametersError(f"Expected 1 or 2 components, got {len(exprs)}")
        for expr in exprs:
            if not expr.free_symbols <= {x, y}:
                raise InvalidParametersError(f"Unexpected symbols in {expr}")
            degree = sympy.Poly(expr, x, y).total_degree() if expr != 0 else 0
            if degree > MAX_DEGREE:
                raise InvalidParametersError(f"Degree {degree} of {expr} exceeds {MAX_DEGREE}")
        self.components: Tuple[sympy.Expr, ...] = exprs

    @classmethod
    def parse(cls, *texts: str) -> "PolynomialField":
        local = {"x": x, "y": y}
        return cls([sympy.sympify(text, locals=local) for text in texts])

    def __repr__(self) -> str:
        return f"PolynomialField({', '.join(str(c) for c in self.components)})"

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.components)

    def component(self, index: int) -> "PolynomialField":
        return PolynomialField([self.components[index]])

    def compose_shift(self, shift: Tuple[float, float]) -> "PolynomialField":
        """The scalar field u(x - a, y - b)."""
        return PolynomialField([c.subs({x: x - shift[0], y: y - shift[1]}, simultaneous=True)
                                for c in self.components])

    @cached_property
    def _derivative_functions(self):
        return [{(a, b): _numeric(sympy.diff(c, x, a, y, b)) for a, b in ORDERS}
                for c in self.components]

    @cached_property
    def _bilaplacian_functions(self):
        def bilaplacian(c):
            lap = sympy.diff(c, x, 2) + sympy.diff(c, y, 2)
            return sympy.diff(lap, x, 2) + sympy.diff(lap, y, 2)
        return [_numeric(bilaplacian(c)) for c in self.components]

    def derivatives(self, px, py, index: int = 0) -> FieldDerivatives:
        """Partials up to third order of one component at points."""
        return FieldDerivatives({key: fn(px, py) for key, fn in self._derivative_functions[index].items()})

    def bilaplacian(self, px, py, index: int = 0) -> np.ndarray:
        return self._bilaplacian_functions[index](px, py)

    def values(self, px, py) -> np.ndarray:
        """Component values with a trailing axis of length 2 for vector fields."""
        return np.stack([self.derivatives(px, py, i).value for i in range(len(self.components))], axis=-1)

    def jacobian(self, px, py) -> np.ndarray:
        """D psi with rows indexed by component, shape (..., 2, 2)."""
        return np.stack([self.derivatives(px, py, i).gradient for i in range(2)], axis=-2)

    def hessians(self, px, py) -> np.ndarray:
        """Second derivatives of every component, shape (..., 2, 2, 2)."""
        return np.stack([self.derivatives(px, py, i).hessian for i in range(2)], axis=-3)

    def divergence(self, px, py) -> np.ndarray:
        jac = self.jacobian(px, py)
        return jac[..., 0, 0] + jac[..., 1, 1]
