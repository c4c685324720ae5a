"""
Derivatives of pulled-back forms at the identity, checked two ways.

The left-hand side is a central difference in t of the form on
phi_t(Omega) = (id + t psi)(Omega); the right-hand side is the closed-form
shape derivative as volume and boundary integrals on Omega itself.
"""
import logging
from typing import Callable, Dict, Sequence

import numpy as np

from forms.assembly import QuadratureSizes
from forms.grids import VolumeGrid, volume_grid
from forms.pullback import pullback_form_value
from geometry.charts import BoundarySamples, boundary_samples, tangential_derivative
from geometry.fields import PolynomialField
from models.geometry_models import StarChart
from models.response_models import LemmaResult
from shape_calculus.finite_difference import CENTRAL_ORDER, relative_error, richardson
from system.errors import InvalidParametersError
from system.parallel import parallel_map

logger = logging.getLogger(__name__)

LEMMA_FORMS = {"dM": "M", "dB": "B", "dL": "L", "dDet": "J1", "dJ1": "J1", "dJ2": "J2", "dJ3": "J3"}
DEFAULT_STEPS = (1e-3, 5e-4)
PINNED_TOL = 1e-10


class _Traces:
    """Derivatives of u1, u2 and psi on the volume grid and the boundary."""

    def __init__(self, u1: PolynomialField, u2: PolynomialField, psi: PolynomialField,
                 grid: VolumeGrid, boundary: BoundarySamples):
        self.grid, self.boundary = grid, boundary
        point = boundary.frame.point
        bx, by = point[:, 0], point[:, 1]
        self.nu = boundary.frame.normal
        self.K = boundary.frame.curvature
        self.vol = [u.derivatives(grid.x, grid.y) for u in (u1, u2)]
        self.bnd = [u.derivatives(bx, by) for u in (u1, u2)]
        self.bilap = [u.bilaplacian(grid.x, grid.y) for u in (u1, u2)]
        self.zeta_vol = psi.values(grid.x, grid.y)
        self.div_vol = psi.divergence(grid.x, grid.y)
        self.zeta = psi.values(bx, by)
        self.d_zeta_nu = np.einsum("...kj,...j->...k", psi.jacobian(bx, by), self.nu)
        self.zeta_nu = np.sum(self.zeta * self.nu, axis=-1)

    def dot(self, a, b):
        return np.sum(a * b, axis=-1)

    def hessian_nu(self, i):
        return np.einsum("...ij,...j->...i", self.bnd[i].hessian, self.nu)

    def normal_second(self, i):
        return self.bnd[i].second_directional(self.nu, self.nu)

    def boundary_shear_divergence(self, chart, i):
        shear = self.bnd[i].second_directional(self.boundary.frame.tangent, self.nu)
        return tangential_derivative(chart, shear, self.boundary.size)


def _symmetrized(term: Callable[[int, int], np.ndarray]) -> np.ndarray:
    return term(0, 1) + term(1, 0)


def _rhs_dM(tr: _Traces, chart: StarChart) -> float:
    v1, v2 = tr.bnd
    div_b = [tr.boundary_shear_divergence(chart, i) for i in (0, 1)]
    frobenius = np.sum(v1.hessian * v2.hessian, axis=(-2, -1))
    boundary = (frobenius * tr.zeta_nu
                + _symmetrized(lambda i, j: div_b[i] * tr.dot(tr.bnd[j].gradient, tr.zeta))
                + _symmetrized(lambda i, j: tr.dot(tr.bnd[i].grad_laplacian, tr.nu)
                               * tr.dot(tr.bnd[j].gradient, tr.zeta))
                - _symmetrized(lambda i, j: tr.normal_second(i) * tr.dot(tr.bnd[j].gradient, tr.d_zeta_nu))
                - _symmetrized(lambda i, j: tr.normal_second(i) * tr.dot(tr.hessian_nu(j), tr.zeta)))
    volume = _symmetrized(lambda i, j: tr.bilap[i] * tr.dot(tr.vol[j].gradient, tr.zeta_vol))
    return tr.boundary.integrate(boundary) - tr.grid.integrate(volume)


def _rhs_dB(tr: _Traces, chart: StarChart) -> float:
    lap = [d.laplacian for d in tr.bnd]
    boundary = (lap[0] * lap[1] * tr.zeta_nu
                + _symmetrized(lambda i, j: tr.dot(tr.bnd[i].grad_laplacian, tr.nu)
                               * tr.dot(tr.bnd[j].gradient, tr.zeta))
                - _symmetrized(lambda i, j: lap[i] * tr.dot(tr.bnd[j].gradient, tr.d_zeta_nu))
                - _symmetrized(lambda i, j: lap[i] * tr.dot(tr.hessian_nu(j), tr.zeta)))
    volume = _symmetrized(lambda i, j: tr.bilap[i] * tr.dot(tr.vol[j].gradient, tr.zeta_vol))
    return tr.boundary.integrate(boundary) - tr.grid.integrate(volume)


def _rhs_dL(tr: _Traces, chart: StarChart) -> float:
    g = [d.gradient for d in tr.bnd]
    boundary = (tr.dot(g[0], g[1]) * tr.zeta_nu
                - _symmetrized(lambda i, j: tr.dot(g[i], tr.nu) * tr.dot(g[j], tr.zeta)))
    volume = _symmetrized(lambda i, j: tr.vol[i].laplacian * tr.dot(tr.vol[j].gradient, tr.zeta_vol))
    return tr.boundary.integrate(boundary) + tr.grid.integrate(volume)


def _rhs_dDet(tr: _Traces, chart: StarChart) -> float:
    return tr.grid.integrate(tr.div_vol)


def _rhs_dJ1(tr: _Traces, chart: StarChart) -> float:
    return tr.grid.integrate(tr.vol[0].value * tr.vol[1].value * tr.div_vol)


def _rhs_dJ2(tr: _Traces, chart: StarChart) -> float:
    trace = max(float(np.max(np.abs(d.value))) for d in tr.bnd)
    scale = max(1.0, max(float(np.max(np.abs(d.value))) for d in tr.vol))
    if trace > PINNED_TOL * scale:
        raise InvalidParametersError(
            f"dJ2 needs u1, u2 vanishing on the boundary; max boundary trace is {trace:.3e}")
    f = tr.bnd[0].directional(tr.nu) * tr.bnd[1].directional(tr.nu)
    d_sigma_f = tangential_derivative(chart, f, tr.boundary.size)
    normal_stretch = tr.dot(tr.nu, tr.d_zeta_nu)
    boundary = (tr.K * f * tr.zeta_nu - d_sigma_f * tr.dot(tr.boundary.frame.tangent, tr.zeta)
                - 2.0 * f * normal_stretch)
    return tr.boundary.integrate(boundary)


def _rhs_dJ3(tr: _Traces, chart: StarChart) -> float:
    v1, v2 = tr.bnd
    product = v1.value * v2.value
    gradient = v1.value[:, None] * v2.gradient + v2.value[:, None] * v1.gradient
    boundary = (tr.K * product + tr.dot(gradient, tr.nu)) * tr.zeta_nu - tr.dot(gradient, tr.zeta)
    return tr.boundary.integrate(boundary)


_RHS: Dict[str, Callable[[_Traces, StarChart], float]] = {
    "dM": _rhs_dM, "dB": _rhs_dB, "dL": _rhs_dL, "dDet": _rhs_dDet,
    "dJ1": _rhs_dJ1, "dJ2": _rhs_dJ2, "dJ3": _rhs_dJ3,
}


def lemma_rhs(lemma: str, u1: PolynomialField, u2: PolynomialField, psi: PolynomialField,
              chart: StarChart, quad: QuadratureSizes = QuadratureSizes()) -> float:
    """Closed-form shape derivative of the form named by ``lemma`` at t = 0."""
    if lemma not in _RHS:
        raise InvalidParametersError(f"Unknown lemma {lemma!r}, expected one of {', '.join(_RHS)}")
    grid = volume_grid(chart, quad.radial, quad.angular)
    boundary = boundary_samples(chart, quad.boundary)
    return float(_RHS[lemma](_Traces(u1, u2, psi, grid, boundary), chart))


def lemma_check(lemma: str, u1: PolynomialField, u2: PolynomialField, psi: PolynomialField,
                chart: StarChart, steps: Sequence[float] = DEFAULT_STEPS,
                quad: QuadratureSizes = QuadratureSizes()) -> LemmaResult:
    """Compare the pulled-back derivative of a form with its closed form.

    Args:
        lemma: One of dM, dB, dL, dDet, dJ1, dJ2, dJ3
        u1: First scalar polynomial
        u2: Second scalar polynomial; dDet ignores both
        psi: Deformation field
        chart: Reference domain
        steps: Decreasing step sizes for the central differences
        quad: Quadrature sizes for both sides

    Returns:
        Both sides and their relative difference
    """
    if lemma not in LEMMA_FORMS:
        raise InvalidParametersError(f"Unknown lemma {lemma!r}, expected one of {', '.join(LEMMA_FORMS)}")
    if lemma == "dDet":
        u1 = u2 = PolynomialField(["1"])
    rhs = lemma_rhs(lemma, u1, u2, psi, chart, quad)

    form = LEMMA_FORMS[lemma]
    ts = [sign * h for h in steps for sign in (1.0, -1.0)]
    values = parallel_map(lambda t: pullback_form_value(form, psi, t, u1, u2, chart, quad), ts)
    raw = [(values[2 * k] - values[2 * k + 1]) / (2.0 * h) for k, h in enumerate(steps)]
    lhs, _ = richardson(list(steps), raw, CENTRAL_ORDER)
    result = LemmaResult(lemma=lemma, lhs_fd=lhs, rhs_formula=rhs, rel_err=relative_error(lhs, rhs))
    logger.info(f"{lemma}: fd {lhs:.12g}, formula {rhs:.12g}, rel_err {result.rel_err:.2e}")
    return result
