"""
Disk spectra of the five plate problems from 2x2 boundary determinants.

Interior problems solve (Delta + k^2)(Delta - l^2) u = 0 with
k^2 = (sqrt(tau^2 + 4 lambda) - tau) / 2 and l^2 = (sqrt(tau^2 + 4 lambda) + tau) / 2,
so the radial factor is A J_n(k r) + B exp(-l R) I_n(l r). Steklov problems
solve Delta (Delta - tau) u = 0 with A (r/R)^n + B exp(-s R) I_n(s r),
s = sqrt(tau), or A (r/R)^n + B (r/R)^(n+2) when tau = 0; there lambda enters
one boundary row linearly and is read off directly.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np

from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from numerics.derivatives import ORDERS, FieldDerivatives, polar_separable
from numerics.polynomials import complex_power, compose_r2, evaluate_stack, poly_mul
from numerics.quadrature import gauss_legendre
from numerics.roots import find_roots
from numerics.special import bessel_i_scaled, bessel_j
from reference_spectra.clusters import EigenCluster, build_clusters
from system.config import CLUSTER_REL_TOL, ROOT_REL_TOL, SCAN_STEPS
from system.errors import (DegenerateDeterminantError, InvalidParametersError,
                           NonFiniteValueError, TruncationError)
from system.parallel import parallel_map

logger = logging.getLogger(__name__)

TAYLOR_RADIUS = 0.05
TAYLOR_TERMS = 30
MAX_EXPANSIONS = 12
DEGENERATE_DENOMINATOR = 1e-14


def wavenumbers(lam, tau: float):
    """(k, l) of the interior factorization for eigenvalue lam."""
    root = np.sqrt(tau ** 2 + 4.0 * np.asarray(lam, dtype=float))
    # k^2 = 2 lam / (root + tau) avoids cancellation for tau^2 >> lam
    return np.sqrt(2.0 * lam / (root + tau)), np.sqrt(0.5 * (root + tau))


def _power_derivative(p: int, r, R: float, deriv: int):
    falling = math.prod(range(p - deriv + 1, p + 1)) if deriv <= p else 0
    if falling == 0:
        return np.zeros_like(np.asarray(r, dtype=float))
    return falling * np.asarray(r, dtype=float) ** (p - deriv) / R ** p


class RadialPair:
    """The two radial solutions phi_1, phi_2 of one angular index."""

    def __init__(self, n: int, R: float, family: str, first: float, second: float):
        self.n, self.R, self.family = n, R, family
        self.first, self.second = first, second

    def derivative(self, which: int, r, deriv: int):
        r = np.asarray(r, dtype=float)
        if which == 0:
            if self.family == "interior":
                return self.first ** deriv * bessel_j(self.n, self.first * r, deriv)
            return _power_derivative(self.n, r, self.R, deriv)
        if self.family == "polynomial":
            return _power_derivative(self.n + 2, r, self.R, deriv)
        s = self.second
        return s ** deriv * np.exp(-s * (self.R - r)) * bessel_i_scaled(self.n, s * r, deriv)

    def taylor_coefficients(self, which: int) -> np.ndarray:
        """c_j with phi(r) = r^n sum_j c_j r^(2j), in coordinates scaled by R."""
        n, R = self.n, self.R
        coefficients = np.zeros(TAYLOR_TERMS)
        if which == 0 and self.family != "interior":
            coefficients[0] = 1.0
            return coefficients
        if which == 1 and self.family == "polynomial":
            coefficients[1] = 1.0
            return coefficients
        if which == 0:
            z, sign, scale = self.first * R / 2.0, -1.0, 1.0
        else:
            z, sign, scale = self.second * R / 2.0, 1.0, math.exp(-self.second * R)
        for j in range(TAYLOR_TERMS):
            log_term = (n + 2 * j) * math.log(z) - math.lgamma(j + 1) - math.lgamma(n + j + 1)
            coefficients[j] = sign ** j * math.exp(log_term)
        return scale * coefficients


def _radial_pair(problem: BoundaryProblem, params: PlateParams, n: int, R: float, lam=None) -> RadialPair:
    if not problem.is_steklov:
        k, l = wavenumbers(lam, params.tau)
        return RadialPair(n, R, "interior", k, l)
    if params.tau == 0.0:
        return RadialPair(n, R, "polynomial", 0.0, 0.0)
    return RadialPair(n, R, "modified", 0.0, math.sqrt(params.tau))


def _boundary_quantities(pair: RadialPair, params: PlateParams, which: int) -> dict:
    """Boundary operators applied to phi_which at r = R."""
    n, R, sigma, tau = pair.n, pair.R, params.sigma, params.tau
    f0, f1, f2, f3 = (pair.derivative(which, R, d) for d in range(4))
    laplacian = f2 + f1 / R - n ** 2 * f0 / R ** 2
    d_laplacian = f3 + f2 / R - f1 / R ** 2 - n ** 2 * f1 / R ** 2 + 2.0 * n ** 2 * f0 / R ** 3
    return {
        "value": f0,
        "normal": f1,
        "moment": (1.0 - sigma) * f2 + sigma * laplacian,
        "shear": tau * f1 - d_laplacian + (1.0 - sigma) * n ** 2 * (R * f1 - f0) / R ** 3,
    }


# kind -> (first row, second row, term multiplying lambda in the second row)
_ROWS = {
    ProblemKind.DIRICHLET: ("value", "normal", None),
    ProblemKind.NAVIER: ("value", "moment", None),
    ProblemKind.NEUMANN: ("moment", "shear", None),
    ProblemKind.STEKLOV_KS: ("value", "moment", "normal"),
    ProblemKind.STEKLOV_BP: ("moment", "shear", "value"),
}


def boundary_matrix(problem: BoundaryProblem, params: PlateParams, n: int, R: float, lam) -> np.ndarray:
    """The 2x2 boundary matrix D_n(lambda), rows = conditions, columns = (phi_1, phi_2)."""
    pair = _radial_pair(problem, params, n, R, lam)
    first, second, linear = _ROWS[problem.kind]
    q = [_boundary_quantities(pair, params, which) for which in (0, 1)]
    rows = [[q[0][first], q[1][first]], [q[0][second], q[1][second]]]
    if linear is not None:
        rows[1] = [rows[1][0] - lam * q[0][linear], rows[1][1] - lam * q[1][linear]]
    return np.array(rows, dtype=float)


def interior_determinant(problem: BoundaryProblem, params: PlateParams, n: int, R: float):
    """det D_n as a vectorized function of kappa = lambda^(1/4)."""
    first, second, _ = _ROWS[problem.kind]

    def det(kappa):
        pair = _radial_pair(problem, params, n, R, np.asarray(kappa, dtype=float) ** 4)
        q = [_boundary_quantities(pair, params, which) for which in (0, 1)]
        return q[0][first] * q[1][second] - q[1][first] * q[0][second]
    return det


def steklov_eigenvalue(problem: BoundaryProblem, params: PlateParams, n: int, R: float) -> float:
    """The eigenvalue of angular index n of a Steklov problem on the disk.

    The second row is (a2 - lambda a3, b2 - lambda b3), hence
    lambda = (a1 b2 - b1 a2) / (a1 b3 - b1 a3).
    """
    pair = _radial_pair(problem, params, n, R)
    first, second, linear = _ROWS[problem.kind]
    qa, qb = (_boundary_quantities(pair, params, which) for which in (0, 1))
    numerator = qa[first] * qb[second] - qb[first] * qa[second]
    denominator = qa[first] * qb[linear] - qb[first] * qa[linear]
    scale = abs(qa[first] * qb[linear]) + abs(qb[first] * qa[linear])
    if scale == 0.0 or abs(denominator) <= DEGENERATE_DENOMINATOR * scale:
        raise DegenerateDeterminantError(
            f"Degenerate Steklov denominator {denominator:.3e} for n={n}, R={R}")
    return float(numerator / denominator)


@dataclass(frozen=True)
class DiskMode:
    """An eigenfunction f(r) T(theta) of a plate problem on the disk of radius R."""
    kind: ProblemKind
    params: PlateParams
    n: int
    parity: str
    eigenvalue: float
    R: float
    k: float
    l: float
    A: float
    B: float

    @cached_property
    def pair(self) -> RadialPair:
        problem = BoundaryProblem.of(self.kind)
        if problem.is_steklov:
            return _radial_pair(problem, self.params, self.n, self.R)
        return RadialPair(self.n, self.R, "interior", self.k, self.l)

    def radial(self, r, deriv: int = 0):
        return self.A * self.pair.derivative(0, r, deriv) + self.B * self.pair.derivative(1, r, deriv)

    def angular(self, theta, deriv: int = 0):
        theta = np.asarray(theta, dtype=float)
        n = self.n
        phase = deriv * np.pi / 2.0
        base = np.cos if self.parity == "cos" else np.sin
        return float(n) ** deriv * base(n * theta + phase)

    @cached_property
    def taylor_polynomial(self) -> np.ndarray:
        """Coefficient stack of the mode near the origin, in coordinates x / R."""
        series = self.A * self.pair.taylor_coefficients(0) + self.B * self.pair.taylor_coefficients(1)
        re, im = complex_power(self.n)
        return poly_mul(re if self.parity == "cos" else im, compose_r2(series))[None]

    def derivatives(self, x, y) -> FieldDerivatives:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return disk_mode_eval(self, np.hypot(x, y), np.arctan2(y, x))

    def label(self) -> str:
        return f"n={self.n} {self.parity}"


def disk_mode_eval(mode: DiskMode, r, theta) -> FieldDerivatives:
    """Cartesian derivatives up to third order of a disk mode at polar points.

    Points with r < 0.05 R use the Taylor polynomial of the mode, the others
    the exact polar to Cartesian conversion.

    Args:
        mode: The eigenfunction
        r: Radii in [0, R]
        theta: Angles

    Returns:
        The derivative bundle, shaped like the broadcast of r and theta
    """
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r < 0.0) or np.any(r > mode.R * (1.0 + 1e-12)):
        raise InvalidParametersError(f"Radius outside [0, {mode.R}]")
    shape = r.shape
    r, theta = r.ravel(), theta.ravel()
    near = r < TAYLOR_RADIUS * mode.R
    partials = {key: np.empty(r.size) for key in ORDERS}
    if np.any(~near):
        far = polar_separable([mode.radial(r[~near], d) for d in range(4)],
                              [mode.angular(theta[~near], d) for d in range(4)], r[~near], theta[~near])
        for key in ORDERS:
            partials[key][~near] = far[key]
    if np.any(near):
        xs, ys = r[near] * np.cos(theta[near]), r[near] * np.sin(theta[near])
        close = evaluate_stack(mode.taylor_polynomial, xs / mode.R, ys / mode.R).scaled_coordinates(mode.R)
        for key in ORDERS:
            partials[key][near] = close[key][:, 0]
    return FieldDerivatives({key: values.reshape(shape) for key, values in partials.items()})


def disk_boundary_divergence(mode: DiskMode, theta) -> np.ndarray:
    """div_dOmega (D2v nu)_tangential on the circle r = R, in closed form.

    On the circle it equals (1/R^2)(v_r_theta_theta - v_theta_theta / R),
    i.e. -n^2 (R f'(R) - f(R)) / R^3 T(theta).
    """
    R = mode.R
    return mode.angular(theta, 2) * (R * mode.radial(R, 1) - mode.radial(R, 0)) / R ** 3


def _mode_norm(mode: DiskMode, form_index: int) -> float:
    """J_i[v][v] of a mode with unit coefficients scale."""
    angular = 2.0 * np.pi if mode.n == 0 else np.pi
    R = mode.R
    if form_index == 1:
        rule = gauss_legendre(96).mapped(0.0, R)
        return angular * rule.integrate(mode.radial(rule.nodes) ** 2 * rule.nodes)
    trace = mode.radial(R, 1) if form_index == 2 else mode.radial(R, 0)
    return angular * R * trace ** 2


def _make_modes(problem: BoundaryProblem, params: PlateParams, n: int, R: float, lam: float) -> List[DiskMode]:
    matrix = boundary_matrix(problem, params, n, R, lam)
    row = matrix[0] if np.linalg.norm(matrix[0]) >= np.linalg.norm(matrix[1]) else matrix[1]
    A, B = row[1], -row[0]
    k, l = wavenumbers(lam, params.tau) if not problem.is_steklov else (0.0, math.sqrt(params.tau))
    modes = []
    for parity in (("cos",) if n == 0 else ("cos", "sin")):
        mode = DiskMode(kind=problem.kind, params=params, n=n, parity=parity, eigenvalue=float(lam),
                        R=R, k=float(k), l=float(l), A=float(A), B=float(B))
        norm = lam * _mode_norm(mode, problem.form_index)
        if not np.isfinite(norm) or norm <= 0.0:
            raise NonFiniteValueError(f"Cannot normalize disk mode n={n} at lambda={lam}")
        c = 1.0 / math.sqrt(norm)
        modes.append(DiskMode(kind=problem.kind, params=params, n=n, parity=parity,
                              eigenvalue=float(lam), R=R, k=float(k), l=float(l),
                              A=float(A) * c, B=float(B) * c))
    return modes


def _interior_roots(problem, params, n: int, R: float, kappa_max: float) -> List[float]:
    kappa_min = 1e-2 / R
    steps = max(2, int(math.ceil((kappa_max - kappa_min) * R * SCAN_STEPS)))
    det = interior_determinant(problem, params, n, R)
    roots = find_roots(det, kappa_min, kappa_max, steps, ROOT_REL_TOL, vectorized=True)
    logger.debug(f"{problem.kind.value} n={n}: {len(roots)} roots below kappa={kappa_max:.4g}")
    return [kappa ** 4 for kappa in roots]


def _steklov_roots(problem, params, n: int, R: float) -> List[float]:
    lam = steklov_eigenvalue(problem, params, n, R)
    if lam <= 0.0:
        # the constant of the free Steklov problem, factored out
        logger.debug(f"{problem.kind.value} n={n}: dropping kernel eigenvalue {lam:.3e}")
        return []
    return [lam]


def disk_spectrum(params: PlateParams, problem: BoundaryProblem, R: float,
                  n_max: int, count: int) -> List[EigenCluster]:
    """The lowest ``count`` eigenvalue clusters on the disk of radius R.

    Args:
        params: Tension and Poisson ratio
        problem: One of the five plate problems
        R: Disk radius
        n_max: Largest angular index included
        count: Number of clusters requested

    Returns:
        Clusters in ascending order, members P-orthonormal, cos before sin
    """
    params.check_for(problem)
    if R <= 0.0 or count < 1 or n_max < 0:
        raise InvalidParametersError(f"Need R > 0, count >= 1, n_max >= 0; got {R}, {count}, {n_max}")

    indices = list(range(n_max + 2))
    if problem.is_steklov:
        roots = parallel_map(lambda n: _steklov_roots(problem, params, n, R), indices)
        clusters = _assemble(problem, params, R, roots[:-1], count)
        _guard(roots[-1], clusters, count, n_max)
        return clusters[:count]

    kappa_max = (4.0 + 2.0 * math.sqrt(count)) / R
    for _ in range(MAX_EXPANSIONS):
        roots = parallel_map(lambda n: _interior_roots(problem, params, n, R, kappa_max), indices)
        clusters = _assemble(problem, params, R, roots[:-1], count)
        if len(clusters) >= count:
            _guard(roots[-1], clusters, count, n_max)
            return clusters[:count]
        kappa_max *= 1.5
        logger.info(f"Extending the {problem.kind.value} scan to kappa={kappa_max:.4g}")
    raise TruncationError(f"Found {len(clusters)} of {count} clusters below kappa={kappa_max:.4g}")


def _assemble(problem, params, R, roots_by_n, count) -> List[EigenCluster]:
    entries: List[Tuple[float, int, int, DiskMode]] = []
    for n, roots in enumerate(roots_by_n):
        for lam in roots:
            for mode in _make_modes(problem, params, n, R, lam):
                entries.append((mode.eigenvalue, n, 0 if mode.parity == "cos" else 1, mode))
    entries.sort(key=lambda entry: entry[:3])
    clusters = build_clusters([e[0] for e in entries], [e[3] for e in entries], CLUSTER_REL_TOL)
    logger.info(f"{problem.kind.value} disk R={R}: {len(entries)} eigenvalues in {len(clusters)} clusters")
    return clusters


def _guard(next_roots: List[float], clusters: List[EigenCluster], count: int, n_max: int) -> None:
    if len(clusters) < count:
        raise TruncationError(f"Only {len(clusters)} clusters with n <= {n_max}; increase n_max")
    limit = clusters[count - 1].lambda_F
    if next_roots and min(next_roots) <= limit * (1.0 + CLUSTER_REL_TOL):
        raise TruncationError(
            f"Angular index {n_max + 1} has eigenvalue {min(next_roots):.10g} below cluster {count} "
            f"({limit:.10g}); increase n_max")
