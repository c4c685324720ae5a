"""
Tests for the Ritz pipeline: boundary-adapted bases and the projected
eigenproblem, cross-checked against the disk determinant spectra.
"""
import numpy as np
import pytest

from forms.assembly import QuadratureSizes
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind, SpaceConstraint
from numerics.linalg import backward_errors
from reference_spectra.disk import disk_spectrum
from ritz.basis import boundary_factor, ritz_basis, zernike_polynomials
from ritz.solver import ritz_eval, ritz_spectrum, solve_ritz
from system.errors import BasisConstraintError, InvalidParametersError, TruncationError


class TestBasis:
    """Zernike-type polynomials times powers of the boundary factor"""

    def test_polynomial_count(self):
        polys, labels = zernike_polynomials(4)
        assert len(polys) == len(labels) == 15
        assert labels[0] == "n0m0c"

    @pytest.mark.parametrize("constraint, power", [(SpaceConstraint.PINNED, 1), (SpaceConstraint.CLAMPED, 2)])
    def test_essential_conditions_on_chart(self, wavy_chart, constraint, power):
        basis = ritz_basis(wavy_chart, constraint, 4)
        theta = np.linspace(0.0, 6.0, 11)
        R = 1.0 + 0.05 * np.cos(2.0 * theta)
        values = basis.evaluate(R * np.cos(theta), R * np.sin(theta))
        np.testing.assert_allclose(values.value, 0.0, atol=1e-12)
        if power == 2:
            np.testing.assert_allclose(values.gradient, 0.0, atol=1e-12)

    def test_boundary_factor_on_disk(self, unit_disk):
        w = boundary_factor(unit_disk, np.array([0.0, 0.6]), np.array([0.0, 0.8]))
        np.testing.assert_allclose(w.value, [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(w.laplacian, -4.0)

    def test_boundary_factor_at_the_origin_of_a_chart(self, wavy_chart):
        w = boundary_factor(wavy_chart, np.array([0.0]), np.array([0.0]))
        assert w.value[0] == pytest.approx(1.0)
        np.testing.assert_allclose(w.gradient, 0.0, atol=1e-15)
        # the laplacian of r^2 R^-2 averages to 4 mean(R^-2) on small circles
        theta = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        ring = boundary_factor(wavy_chart, 1e-3 * np.cos(theta), 1e-3 * np.sin(theta))
        assert w.laplacian[0] == pytest.approx(ring.laplacian.mean(), rel=1e-10)
        mean = np.mean((1.0 + 0.05 * np.cos(2.0 * theta)) ** -2)
        assert w.laplacian[0] == pytest.approx(-4.0 * mean, rel=1e-12)

    def test_ritz_solution_at_the_origin_of_a_chart(self, wavy_chart, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NAVIER)
        basis = ritz_basis(wavy_chart, problem.space_constraint, 6)
        solution = solve_ritz(wavy_chart, tense_plate, problem, basis).solutions[0]
        at_origin = ritz_eval(solution, np.array([0.0]), np.array([0.0])).value[0]
        nearby = ritz_eval(solution, np.array([1e-7]), np.array([0.0])).value[0]
        assert np.isfinite(at_origin)
        assert at_origin == pytest.approx(nearby, rel=1e-6)

    def test_free_basis_starts_with_constant(self, unit_disk):
        basis = ritz_basis(unit_disk, SpaceConstraint.FREE, 3)
        assert basis.constant_index == 0
        np.testing.assert_allclose(basis.evaluate(np.array([0.3]), np.array([0.1])).value[:, 0], 1.0)

    def test_negative_degree(self, unit_disk):
        with pytest.raises(InvalidParametersError):
            ritz_basis(unit_disk, SpaceConstraint.FREE, -1)


class TestRitzSolver:

    def test_clamped_disk_matches_reference(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        basis = ritz_basis(unit_disk, problem.space_constraint, 12)
        clusters = ritz_spectrum(unit_disk, plate, problem, basis, count=1)
        reference = disk_spectrum(plate, problem, 1.0, 5, 1)[0].lambda_F
        assert clusters[0].lambda_F == pytest.approx(reference, rel=1e-6)

    def test_wrong_basis_rejected(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        basis = ritz_basis(unit_disk, SpaceConstraint.PINNED, 4)
        with pytest.raises(BasisConstraintError):
            solve_ritz(unit_disk, plate, problem, basis)

    def test_count_beyond_basis(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.NAVIER)
        basis = ritz_basis(unit_disk, problem.space_constraint, 2)
        with pytest.raises(InvalidParametersError):
            ritz_spectrum(unit_disk, plate, problem, basis, count=basis.size + 1)

    def test_solutions_are_p_normalized(self, wavy_chart, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NEUMANN)
        basis = ritz_basis(wavy_chart, problem.space_constraint, 8)
        result = solve_ritz(wavy_chart, tense_plate, problem, basis)
        P = result.matrices.P
        W = np.linalg.lstsq(result.matrices.transform, np.stack([s.coefficients for s in result.solutions[:3]], 1),
                            rcond=None)[0]
        np.testing.assert_allclose(W.T @ P @ W, np.eye(3), atol=1e-8)

    @pytest.mark.parametrize("kind", [ProblemKind.DIRICHLET, ProblemKind.NEUMANN])
    def test_eigenvalues_decrease_with_the_degree(self, wavy_chart, tense_plate, kind):
        """Nested bases give componentwise smaller Ritz values (min-max)"""
        problem = BoundaryProblem.of(kind)
        values = [solve_ritz(wavy_chart, tense_plate, problem,
                             ritz_basis(wavy_chart, problem.space_constraint, d)).eigenvalues[:6]
                  for d in (6, 8, 10)]
        for coarse, fine in zip(values, values[1:]):
            assert np.all(fine <= coarse * (1.0 + 1e-9))
        assert values[-1][0] < values[0][0]

    def test_low_pairs_pass_the_residual_check(self, wavy_chart, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        basis = ritz_basis(wavy_chart, problem.space_constraint, 12)
        result = solve_ritz(wavy_chart, plate, problem, basis)
        W = np.stack([s.coefficients for s in result.solutions[:5]], axis=1)
        mu = 1.0 / result.eigenvalues[:5]
        assert np.all(backward_errors(result.matrices.J, result.matrices.P, mu, W) <= 1e-10)

    def test_eval_rejects_outside_points(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.NAVIER)
        basis = ritz_basis(unit_disk, problem.space_constraint, 4)
        solution = solve_ritz(unit_disk, plate, problem, basis).solutions[0]
        with pytest.raises(InvalidParametersError):
            ritz_eval(solution, np.array([1.2]), np.array([0.0]))

    @pytest.mark.parametrize("kind", [ProblemKind.NEUMANN, ProblemKind.STEKLOV_BP])
    def test_kernel_without_quotient(self, unit_disk, tense_plate, kind):
        """The constant shows up as a zero eigenvalue only when it is kept"""
        problem = BoundaryProblem.of(kind)
        basis = ritz_basis(unit_disk, problem.space_constraint, 8)
        quotiented = solve_ritz(unit_disk, tense_plate, problem, basis)
        assert quotiented.eigenvalues[0] > 1e-3

        kept = solve_ritz(unit_disk, tense_plate, problem, basis, quotient=False)
        assert abs(kept.eigenvalues[0]) <= 1e-8
        kernel = kept.solutions[0]
        x, y = np.array([0.0, 0.3, -0.5, 0.1]), np.array([0.0, 0.4, 0.2, -0.7])
        values = ritz_eval(kernel, x, y).value
        assert np.ptp(values) <= 1e-6 * np.abs(values).max()


@pytest.mark.slow
class TestCrossOracle:
    """Bessel and Ritz spectra agree on the unit disk"""

    @pytest.mark.parametrize("kind", list(ProblemKind))
    def test_first_five_clusters(self, unit_disk, kind):
        params = PlateParams(tau=1.0, sigma=0.3)
        problem = BoundaryProblem.of(kind)
        bessel = disk_spectrum(params, problem, 1.0, 9, 5)
        basis = ritz_basis(unit_disk, problem.space_constraint, 16)
        ritz = ritz_spectrum(unit_disk, params, problem, basis, QuadratureSizes(), count=5)
        for a, b in zip(bessel, ritz):
            assert b.size == a.size
            assert b.lambda_F == pytest.approx(a.lambda_F, rel=1e-4)
