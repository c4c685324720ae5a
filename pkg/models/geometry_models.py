"""
Pydantic models for domain descriptions and boundary perturbations.
"""
import re
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from system.config import BOUNDARY_GRID, FOURIER_LIMIT


def _finite_coefficients(values: Tuple[float, ...]) -> Tuple[float, ...]:
    if len(values) > FOURIER_LIMIT:
        raise ValueError(f"Fourier truncation {len(values)} exceeds the limit {FOURIER_LIMIT}")
    if not all(np.isfinite(values)):
        raise ValueError("Fourier coefficients must be finite")
    return tuple(float(v) for v in values)


def fourier_series(constant: float, cos_coeffs, sin_coeffs, theta, deriv: int = 0) -> np.ndarray:
    """deriv-th theta derivative of c + sum_m a_m cos(m theta) + b_m sin(m theta)."""
    theta = np.asarray(theta, dtype=float)
    total = np.full(theta.shape, constant if deriv == 0 else 0.0)
    shift = deriv * np.pi / 2.0
    for m, a in enumerate(cos_coeffs, start=1):
        if a:
            total = total + a * m ** deriv * np.cos(m * theta + shift)
    for m, b in enumerate(sin_coeffs, start=1):
        if b:
            total = total + b * m ** deriv * np.sin(m * theta + shift)
    return total


class StarChart(BaseModel):
    """Star-shaped domain R(theta) = base_radius * (1 + sum a_m cos + b_m sin)."""
    model_config = ConfigDict(frozen=True)

    base_radius: float = Field(gt=0, description="Mean radius of the profile (length)")
    cos_coeffs: Tuple[float, ...] = Field(default=(), description="Relative cosine coefficients a_1, a_2, ...")
    sin_coeffs: Tuple[float, ...] = Field(default=(), description="Relative sine coefficients b_1, b_2, ...")

    check_coefficients = field_validator("cos_coeffs", "sin_coeffs")(_finite_coefficients)

    @model_validator(mode="after")
    def positive_profile(self):
        samples = max(BOUNDARY_GRID, 16 * self.order)
        theta = 2.0 * np.pi * np.arange(samples) / samples
        relative = fourier_series(1.0, self.cos_coeffs, self.sin_coeffs, theta)
        worst = int(np.argmin(relative))
        if relative[worst] <= 0.0:
            raise ValueError(f"Radius profile is not positive at theta={theta[worst]:.6f}")
        return self

    @classmethod
    def disk(cls, radius: float = 1.0) -> "StarChart":
        return cls(base_radius=radius)

    @property
    def order(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    @property
    def is_disk(self) -> bool:
        return not any(self.cos_coeffs) and not any(self.sin_coeffs)


_TERM = re.compile(r"\s*([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*(?:(cos|sin)\s*\(?\s*(\d+)\s*(?:\*?\s*theta)?\s*\)?)?")


class NormalPerturbation(BaseModel):
    """Boundary speed f(theta) = c + sum a_m cos(m theta) + b_m sin(m theta)."""
    model_config = ConfigDict(frozen=True)

    constant: float = Field(default=0.0, description="Mean normal speed")
    cos_coeffs: Tuple[float, ...] = Field(default=(), description="Cosine coefficients a_1, a_2, ...")
    sin_coeffs: Tuple[float, ...] = Field(default=(), description="Sine coefficients b_1, b_2, ...")

    check_coefficients = field_validator("cos_coeffs", "sin_coeffs")(_finite_coefficients)

    @field_validator("constant")
    @classmethod
    def finite_constant(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("Constant speed must be finite")
        return value

    @property
    def order(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def values(self, theta, deriv: int = 0) -> np.ndarray:
        return fourier_series(self.constant, self.cos_coeffs, self.sin_coeffs, theta, deriv)

    @classmethod
    def parse(cls, text: str) -> "NormalPerturbation":
        """Read expressions such as ``1``, ``cos2`` or ``0.5 - 2 sin(3 theta)``."""
        constant = 0.0
        cos_coeffs, sin_coeffs = {}, {}
        position, text = 0, text.strip()
        while position < len(text):
            match = _TERM.match(text, position)
            if not match or match.end() == position:
                raise ValueError(f"Cannot parse normal speed {text!r} at position {position}")
            sign, number, kind, mode = match.groups()
            if not number and not kind:
                raise ValueError(f"Cannot parse normal speed {text!r} at position {position}")
            value = (-1.0 if sign == "-" else 1.0) * (float(number) if number else 1.0)
            if kind is None:
                constant += value
            else:
                target = cos_coeffs if kind == "cos" else sin_coeffs
                if int(mode) == 0:
                    raise ValueError("Mode 0 is the constant term")
                target[int(mode)] = target.get(int(mode), 0.0) + value
            position = match.end()

        def dense(table):
            return tuple(table.get(m, 0.0) for m in range(1, max(table, default=0) + 1))
        return cls(constant=constant, cos_coeffs=dense(cos_coeffs), sin_coeffs=dense(sin_coeffs))


class RectangleDomain(BaseModel):
    """Axis-aligned rectangle (0, a) x (0, b); only the Navier closed form uses it."""
    model_config = ConfigDict(frozen=True)

    a: float = Field(gt=0, allow_inf_nan=False, description="Side along x (length)")
    b: float = Field(gt=0, allow_inf_nan=False, description="Side along y (length)")

    @classmethod
    def stretched(cls, s: float) -> "RectangleDomain":
        """The unit-area rectangle e^s x e^-s."""
        return cls(a=float(np.exp(s)), b=float(np.exp(-s)))
