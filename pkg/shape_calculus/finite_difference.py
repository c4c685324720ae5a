"""
Finite-difference oracles for derivatives of eigenvalue functionals.

A family t -> Omega_t supplies ascending spectra; clusters are re-identified
at every t by position, which is safe only while the members move less than
half the gap to their neighbours.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np

from forms.assembly import QuadratureSizes
from geometry.charts import deformation
from models.geometry_models import NormalPerturbation, StarChart
from models.plate_models import BoundaryProblem, PlateParams
from models.response_models import DifferenceEstimate
from reference_spectra.disk import disk_spectrum
from reference_spectra.rectangle import stretch_spectrum
from ritz.basis import ritz_basis
from ritz.solver import solve_ritz
from shape_calculus.symmetric import elementary_symmetric
from spectrum_cache.spectrum_cache import SpectrumCache, spectrum_cache
from system.config import RITZ_DEGREE
from system.errors import ClusterTrackingError, InvalidParametersError, TruncationError
from system.parallel import parallel_map

logger = logging.getLogger(__name__)

CENTRAL_ORDER = 2
ONE_SIDED_ORDER = 1


def relative_error(value: float, reference: float, floor: float = 1e-12) -> float:
    return abs(value - reference) / max(abs(reference), floor)


class EigenvalueFamily(Protocol):
    """A one-parameter family of domains with computable spectra."""

    def eigenvalues(self, t: float, count: int) -> np.ndarray:
        """At least ``count`` ascending eigenvalues at parameter ``t``."""

    def describe(self) -> str:
        """Short description for reports."""


@dataclass(frozen=True)
class ChartFamily:
    """R_t = R + t f on a star chart, solved by Bessel determinants or Ritz.

    The Bessel solver needs every R_t to be a disk, i.e. a disk chart moved
    by a constant speed.
    """
    problem: BoundaryProblem
    params: PlateParams
    chart: StarChart
    perturbation: NormalPerturbation
    solver: str = "bessel"
    degree: int = RITZ_DEGREE
    quad: QuadratureSizes = QuadratureSizes()
    n_max: Optional[int] = None
    quotient: Optional[bool] = None
    cache: SpectrumCache = field(default=spectrum_cache, compare=False, hash=False)

    def __post_init__(self):
        if self.solver not in ("bessel", "ritz"):
            raise InvalidParametersError(f"Unknown solver {self.solver!r}")
        if self.solver == "bessel" and (not self.chart.is_disk or self.perturbation.order > 0):
            raise InvalidParametersError("The Bessel solver needs a disk moved by a constant speed")

    def eigenvalues(self, t: float, count: int) -> np.ndarray:
        chart = deformation(self.chart, self.perturbation, t)
        key = (self.solver, self.problem.kind, self.params.tau, self.params.sigma, chart,
               self.degree, self.quad, self.n_max, self.quotient, count)
        return self.cache.get_or_compute(key, lambda: self._compute(chart, count))

    def _compute(self, chart: StarChart, count: int) -> np.ndarray:
        if self.solver == "bessel":
            n_max = self.n_max if self.n_max is not None else count + 4
            clusters = disk_spectrum(self.params, self.problem, chart.base_radius, n_max, count)
            return np.array([lam for c in clusters for lam in c.eigenvalues])
        basis = ritz_basis(chart, self.problem.space_constraint, self.degree)
        values = solve_ritz(chart, self.params, self.problem, basis, self.quad, self.quotient).eigenvalues
        if values.size < count:
            raise TruncationError(f"Ritz basis of degree {self.degree} gives only {values.size} eigenvalues")
        return values

    def describe(self) -> str:
        return f"{self.solver} chart family R + t f"


@dataclass(frozen=True)
class RectangleStretchFamily:
    """Navier rectangles e^t x e^-t of unit area."""
    tau: float

    def eigenvalues(self, t: float, count: int) -> np.ndarray:
        return np.array([lam for lam, _, _ in stretch_spectrum(t, self.tau, count)])

    def describe(self) -> str:
        return "rectangle stretch e^t x e^-t"


def richardson(steps: Sequence[float], estimates: Sequence[float],
               order: int = CENTRAL_ORDER) -> Tuple[float, List[List[float]]]:
    """Neville extrapolation to h = 0 of estimates with error sum c_j h^(j*order).

    The estimates are treated as a polynomial in x = h^order, so the steps
    need not form a geometric sequence.

    Args:
        steps: Decreasing step sizes
        estimates: Difference quotients at those steps
        order: Power of h in the leading error term, 2 for central and 1
            for one-sided quotients

    Returns:
        The most refined value and the triangular table, row i holding the
        extrapolations that end at step i
    """
    if len(steps) != len(estimates) or not steps:
        raise InvalidParametersError("Need one estimate per step")
    if order < 1:
        raise InvalidParametersError(f"Error order must be positive, got {order}")
    table = [[float(e)] for e in estimates]
    for i in range(1, len(steps)):
        for j in range(1, i + 1):
            ratio = (steps[i - j] / steps[i]) ** order
            previous, current = table[i - 1][j - 1], table[i][j - 1]
            table[i].append(current + (current - previous) / (ratio - 1.0))
    return table[-1][-1], table


def _estimate(steps: Sequence[float], raw: Sequence[float], order: int) -> DifferenceEstimate:
    value, table = richardson(steps, raw, order)
    last = table[-1]
    consistency = abs(last[-1] - last[-2]) if len(last) > 1 else float("inf")
    return DifferenceEstimate(value=value, steps=list(steps), estimates=[float(r) for r in raw],
                              consistency=consistency)


def _check_steps(steps: Sequence[float]) -> List[float]:
    steps = [float(h) for h in steps]
    if not steps or any(h <= 0.0 for h in steps) or any(a <= b for a, b in zip(steps, steps[1:])):
        raise InvalidParametersError(f"Steps must be positive and strictly decreasing, got {steps}")
    return steps


def track_cluster(base: np.ndarray, shifted: np.ndarray, indices: Sequence[int], t: float) -> np.ndarray:
    """Members of the cluster at positions ``indices`` after a shift to ``t``.

    Raises ClusterTrackingError when a member moved by half the gap that
    separates the cluster from its neighbours at t = 0.
    """
    first, last = min(indices), max(indices)
    below = base[first] - base[first - 1] if first > 0 else np.inf
    above = base[last + 1] - base[last] if last + 1 < base.size else np.inf
    half_gap = 0.5 * min(below, above)
    selected = shifted[list(indices)]
    shift = float(np.max(np.abs(selected - base[list(indices)])))
    if shift >= half_gap:
        raise ClusterTrackingError(
            f"Cluster at positions {list(indices)} moved by {shift:.3e} at t={t}, more than half "
            f"the gap {2.0 * half_gap:.3e}; use smaller steps")
    return selected


def _spectra(family: EigenvalueFamily, ts: Sequence[float], count: int) -> List[np.ndarray]:
    return parallel_map(lambda t: np.asarray(family.eigenvalues(t, count), dtype=float), ts)


def fd_eigen_derivative(family: EigenvalueFamily, indices: Sequence[int], s: int,
                        steps: Sequence[float], order: int = 1) -> DifferenceEstimate:
    """Richardson-extrapolated central difference of Lambda_{F,s}(t) at t = 0.

    Args:
        family: Domain family
        indices: 0-based positions of the cluster in the ascending spectrum
        s: Order of the symmetric function
        steps: Decreasing step sizes h
        order: 1 for (L(h) - L(-h)) / 2h, 2 for (L(h) - 2 L(0) + L(-h)) / h^2

    Returns:
        The extrapolated derivative with the raw quotients
    """
    steps = _check_steps(steps)
    indices = sorted(int(k) for k in indices)
    if order not in (1, 2):
        raise InvalidParametersError(f"Derivative order must be 1 or 2, got {order}")
    if not 1 <= s <= len(indices):
        raise InvalidParametersError(f"s must be in 1..{len(indices)}, got {s}")
    count = max(indices) + 2
    ts = [0.0] + [sign * h for h in steps for sign in (1.0, -1.0)]
    spectra = _spectra(family, ts, count)
    base = spectra[0]
    lam0 = elementary_symmetric(base[indices], s)
    raw = []
    for k, h in enumerate(steps):
        plus = elementary_symmetric(track_cluster(base, spectra[2 * k + 1], indices, h), s)
        minus = elementary_symmetric(track_cluster(base, spectra[2 * k + 2], indices, -h), s)
        raw.append((plus - minus) / (2.0 * h) if order == 1 else (plus - 2.0 * lam0 + minus) / h ** 2)
    estimate = _estimate(steps, raw, CENTRAL_ORDER)
    logger.info(f"FD order {order} of Lambda_(F,{s}) on {family.describe()}: {estimate.value:.12g}")
    return estimate


def one_sided_slopes(family: EigenvalueFamily, index: int,
                     steps: Sequence[float]) -> Tuple[DifferenceEstimate, DifferenceEstimate]:
    """Left and right derivatives of the ordered branch lambda_index(t) at t = 0.

    No tracking is done: the branch is the index-th smallest eigenvalue,
    which is what exposes a kink at a crossing.
    """
    steps = _check_steps(steps)
    ts = [0.0] + [sign * h for h in steps for sign in (1.0, -1.0)]
    spectra = _spectra(family, ts, index + 1)
    base = spectra[0][index]
    right = [(spectra[2 * k + 1][index] - base) / h for k, h in enumerate(steps)]
    left = [(base - spectra[2 * k + 2][index]) / h for k, h in enumerate(steps)]
    return _estimate(steps, left, ONE_SIDED_ORDER), _estimate(steps, right, ONE_SIDED_ORDER)
