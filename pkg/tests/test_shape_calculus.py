"""
Shape derivatives of symmetric eigenvalue functions, checked against
closed forms, finite differences and the criticality condition on disks.
"""
import math

import numpy as np
import pytest

from geometry.fields import PolynomialField
from models.geometry_models import NormalPerturbation, RectangleDomain, StarChart
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from reference_spectra.disk import disk_spectrum
from reference_spectra.rectangle import stretch_branch
from ritz.basis import ritz_basis
from ritz.solver import ritz_spectrum
from shape_calculus.criticality import criticality_profile, criticality_residual
from shape_calculus.densities import g_density
from shape_calculus.finite_difference import (ChartFamily, RectangleStretchFamily, fd_eigen_derivative,
                                              one_sided_slopes, relative_error, richardson, track_cluster)
from shape_calculus.hadamard import hadamard_derivative, lagrange_scale, volume_derivative
from shape_calculus.lemmas import lemma_check, lemma_rhs
from shape_calculus.radiality import radiality_profiles
from shape_calculus.symmetric import elementary_symmetric
from datasource.results_store import load_presets
from system.errors import ClusterTrackingError, InvalidParametersError, PartialClusterError

UNIT_SPEED = NormalPerturbation(constant=1.0)
HADAMARD_STEPS = (1e-3, 5e-4)
BRANCH_STEPS = (2e-3, 1e-3, 5e-4, 2.5e-4)


def _first_clusters(kind, params, count=3, R=1.0):
    return disk_spectrum(params, BoundaryProblem.of(kind), R, count + 4, count)


class TestElementarySymmetric:

    def test_small_examples(self):
        assert elementary_symmetric([2.0, 3.0], 1) == pytest.approx(5.0)
        assert elementary_symmetric([2.0, 3.0], 2) == pytest.approx(6.0)
        assert elementary_symmetric([1.0, 1.0, 1.0], 2) == pytest.approx(3.0)
        assert elementary_symmetric([1.0, 2.0, 3.0], 3) == pytest.approx(6.0)

    @pytest.mark.parametrize("s", [0, 3])
    def test_order_out_of_range(self, s):
        with pytest.raises(InvalidParametersError):
            elementary_symmetric([1.0, 2.0], s)


class TestDensities:

    def test_dirichlet_density_is_non_positive(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        cluster = _first_clusters(ProblemKind.DIRICHLET, plate)[1]
        sample = g_density(problem, plate, cluster, unit_disk, 64)
        assert sample.values.shape == (cluster.size, 64)
        assert np.all(sample.total <= 1e-12)

    def test_rectangle_rejected(self, plate):
        problem = BoundaryProblem.of(ProblemKind.NAVIER)
        cluster = _first_clusters(ProblemKind.NAVIER, plate)[0]
        with pytest.raises(InvalidParametersError):
            g_density(problem, plate, cluster, RectangleDomain(a=1.0, b=1.0), 64)


class TestHadamard:

    def test_dilation_of_clamped_disk(self, unit_disk, plate):
        """lambda(R) = lambda(1) / R^4, so a unit normal speed gives -4 lambda."""
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        cluster = _first_clusters(ProblemKind.DIRICHLET, plate)[0]
        value = hadamard_derivative(problem, plate, unit_disk, cluster, 1, UNIT_SPEED)
        assert cluster.size == 1
        assert value == pytest.approx(-4.0 * cluster.lambda_F, rel=1e-6)

    def test_zero_speed(self, unit_disk, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NEUMANN)
        cluster = _first_clusters(ProblemKind.NEUMANN, tense_plate)[0]
        value = hadamard_derivative(problem, tense_plate, unit_disk, cluster, 1, NormalPerturbation())
        assert value == 0.0

    @pytest.mark.parametrize("speed", ["cos2", "sin3"])
    def test_volume_preserving_speeds_are_critical(self, unit_disk, tense_plate, speed):
        f = NormalPerturbation.parse(speed)
        assert volume_derivative(unit_disk, f) == pytest.approx(0.0, abs=1e-12)
        for kind in ProblemKind:
            problem = BoundaryProblem.of(kind)
            for cluster in _first_clusters(kind, tense_plate):
                value = hadamard_derivative(problem, tense_plate, unit_disk, cluster, cluster.size, f)
                scale = cluster.lambda_F ** (cluster.size - 1) * lagrange_scale(cluster, unit_disk)
                assert abs(value) <= 1e-6 * scale

    def test_order_out_of_range(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        cluster = _first_clusters(ProblemKind.DIRICHLET, plate)[0]
        with pytest.raises(InvalidParametersError):
            hadamard_derivative(problem, plate, unit_disk, cluster, 2, UNIT_SPEED)

    def test_free_plate_double_cluster(self, unit_disk, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NEUMANN)
        cluster = next(c for c in _first_clusters(ProblemKind.NEUMANN, tense_plate) if c.size == 2)
        family = ChartFamily(problem=problem, params=tense_plate, chart=unit_disk, perturbation=UNIT_SPEED)
        for s in (1, 2):
            formula = hadamard_derivative(problem, tense_plate, unit_disk, cluster, s, UNIT_SPEED)
            fd = fd_eigen_derivative(family, cluster.indices, s, HADAMARD_STEPS)
            assert relative_error(fd.value, formula) <= 1e-5

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", list(ProblemKind))
    def test_matches_finite_differences(self, unit_disk, tense_plate, kind):
        problem = BoundaryProblem.of(kind)
        family = ChartFamily(problem=problem, params=tense_plate, chart=unit_disk, perturbation=UNIT_SPEED)
        for cluster in _first_clusters(kind, tense_plate):
            for s in range(1, cluster.size + 1):
                formula = hadamard_derivative(problem, tense_plate, unit_disk, cluster, s, UNIT_SPEED)
                fd = fd_eigen_derivative(family, cluster.indices, s, HADAMARD_STEPS)
                assert relative_error(fd.value, formula) <= 1e-5, (kind, cluster.lambda_F, s)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind,tau", [(ProblemKind.DIRICHLET, 0.0), (ProblemKind.NEUMANN, 1.0),
                                          (ProblemKind.STEKLOV_BP, 1.0)])
    def test_ritz_on_a_wavy_chart(self, wavy_chart, kind, tau):
        params = PlateParams(tau=tau, sigma=0.3)
        problem = BoundaryProblem.of(kind)
        f = NormalPerturbation.parse("cos2")
        basis = ritz_basis(wavy_chart, problem.space_constraint, 16)
        cluster = ritz_spectrum(wavy_chart, params, problem, basis, count=1)[0]
        formula = hadamard_derivative(problem, params, wavy_chart, cluster, 1, f)
        family = ChartFamily(problem=problem, params=params, chart=wavy_chart, perturbation=f,
                             solver="ritz", degree=16)
        fd = fd_eigen_derivative(family, cluster.indices, 1, HADAMARD_STEPS)
        assert abs(formula) > 1e-3 * lagrange_scale(cluster, wavy_chart)
        assert relative_error(fd.value, formula) <= 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", [ProblemKind.NEUMANN, ProblemKind.STEKLOV_BP])
    def test_ritz_on_the_disk_has_no_first_variation(self, unit_disk, tense_plate, kind):
        """A zero-mean speed leaves Lambda_F of a full disk cluster fixed to first order."""
        problem = BoundaryProblem.of(kind)
        f = NormalPerturbation.parse("cos2")
        basis = ritz_basis(unit_disk, problem.space_constraint, 16)
        cluster = ritz_spectrum(unit_disk, tense_plate, problem, basis, count=1)[0]
        formula = hadamard_derivative(problem, tense_plate, unit_disk, cluster, 1, f)
        family = ChartFamily(problem=problem, params=tense_plate, chart=unit_disk, perturbation=f,
                             solver="ritz", degree=16)
        fd = fd_eigen_derivative(family, cluster.indices, 1, HADAMARD_STEPS)
        scale = lagrange_scale(cluster, unit_disk)
        assert abs(formula) <= 1e-6 * scale
        assert abs(fd.value) <= 1e-5 * scale


class TestCriticality:

    def test_clamped_disk(self, unit_disk, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        for cluster in _first_clusters(ProblemKind.DIRICHLET, plate):
            residual = criticality_residual(problem, plate, unit_disk, cluster)
            assert residual.c_mean < 0.0
            assert residual.rel_residual <= 1e-6

    def test_profile_holds_member_densities(self, unit_disk, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NEUMANN)
        cluster = next(c for c in _first_clusters(ProblemKind.NEUMANN, tense_plate) if c.size == 2)
        sample, residual = criticality_profile(problem, tense_plate, unit_disk, cluster, 64)
        assert sample.values.shape == (2, 64)
        # each member varies with the angle, their sum does not
        assert np.ptp(sample.values[0]) > 1e-3 * abs(residual.c_mean)
        np.testing.assert_allclose(sample.total, residual.c_mean, atol=1e-6 * abs(residual.c_mean))

    def test_partial_cluster_is_not_critical(self, unit_disk, tense_plate):
        problem = BoundaryProblem.of(ProblemKind.NAVIER)
        cluster = next(c for c in _first_clusters(ProblemKind.NAVIER, tense_plate) if c.size == 2)
        residual = criticality_residual(problem, tense_plate, unit_disk, cluster.subset([0]))
        assert residual.rel_residual > 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", list(ProblemKind))
    @pytest.mark.parametrize("tau", [0.5, 1.0, 5.0])
    @pytest.mark.parametrize("sigma", [0.0, 0.3])
    def test_disk_is_critical(self, unit_disk, kind, tau, sigma):
        params = PlateParams(tau=tau, sigma=sigma)
        problem = BoundaryProblem.of(kind)
        for cluster in _first_clusters(kind, params):
            residual = criticality_residual(problem, params, unit_disk, cluster)
            assert residual.rel_residual <= 1e-6, (kind, tau, sigma, cluster.lambda_F)


class TestRadiality:

    @pytest.mark.parametrize("kind", list(ProblemKind))
    def test_full_clusters_are_radial(self, unit_disk, tense_plate, kind):
        for cluster in _first_clusters(kind, tense_plate):
            profiles = radiality_profiles(cluster, unit_disk, [0.25, 0.5, 0.75, 1.0])
            assert max(p.worst for p in profiles) <= 1e-8

    def test_linear_free_cluster_with_vanishing_second_derivatives(self, unit_disk, tense_plate):
        cluster = next(c for c in _first_clusters(ProblemKind.STEKLOV_BP, tense_plate)
                       if all(m.n == 1 for m in c.members))
        profiles = radiality_profiles(cluster, unit_disk, [0.25, 0.5, 1.0])
        for p in profiles:
            assert p.laplacian_sq <= 1e-8 and p.hessian_sq <= 1e-8
            assert p.worst <= 1e-8

    def test_single_member_varies(self, unit_disk, tense_plate):
        cluster = next(c for c in _first_clusters(ProblemKind.NAVIER, tense_plate) if c.size == 2)
        profiles = radiality_profiles(cluster.subset([0]), unit_disk, [0.5, 1.0], allow_partial=True)
        assert max(p.worst for p in profiles) >= 0.1

    def test_partial_cluster_rejected(self, unit_disk, tense_plate):
        cluster = next(c for c in _first_clusters(ProblemKind.NAVIER, tense_plate) if c.size == 2)
        with pytest.raises(PartialClusterError):
            radiality_profiles(cluster.subset([1]), unit_disk, [0.5])

    def test_disk_only(self, wavy_chart, unit_disk, tense_plate):
        cluster = _first_clusters(ProblemKind.NAVIER, tense_plate)[0]
        with pytest.raises(InvalidParametersError):
            radiality_profiles(cluster, wavy_chart, [0.5])
        with pytest.raises(InvalidParametersError):
            radiality_profiles(cluster, unit_disk, [1.5])


class TestFiniteDifferences:

    def test_richardson_removes_even_error_terms(self):
        steps = [0.1, 0.05, 0.025]
        estimates = [3.0 + 2.0 * h ** 2 - 5.0 * h ** 4 for h in steps]
        value, table = richardson(steps, estimates)
        assert value == pytest.approx(3.0, abs=1e-12)
        assert len(table[-1]) == 3

    def test_richardson_with_uneven_steps(self):
        steps = [0.1, 0.07, 0.03]
        value, _ = richardson(steps, [3.0 + 2.0 * h ** 2 - 5.0 * h ** 4 for h in steps])
        assert value == pytest.approx(3.0, abs=1e-12)
        value, _ = richardson(steps, [1.0 + 4.0 * h - 3.0 * h ** 2 for h in steps], order=1)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_two_steps_report_a_consistency(self):
        family = RectangleStretchFamily(tau=1.0)
        pi2 = math.pi ** 2
        estimate = fd_eigen_derivative(family, [1, 2], 1, HADAMARD_STEPS, order=2)
        assert len(estimate.estimates) == 2
        assert math.isfinite(estimate.consistency)
        assert estimate.value == pytest.approx(544.0 * pi2 ** 2 + 40.0 * pi2, rel=1e-6)

    def test_richardson_needs_matching_lengths(self):
        with pytest.raises(InvalidParametersError):
            richardson([0.1, 0.05], [1.0])

    def test_steps_must_decrease(self):
        family = RectangleStretchFamily(tau=0.0)
        with pytest.raises(InvalidParametersError):
            fd_eigen_derivative(family, [0], 1, [1e-3, 2e-3])

    def test_tracking_detects_large_moves(self):
        base = np.array([1.0, 2.0, 2.0, 4.0])
        assert np.allclose(track_cluster(base, base + 0.1, [1, 2], 0.01), [2.1, 2.1])
        with pytest.raises(ClusterTrackingError):
            track_cluster(base, base + np.array([0.0, 0.6, 0.6, 0.0]), [1, 2], 0.5)

    @pytest.mark.parametrize("tau", [0.0, 1.0])
    def test_stretch_crossing_second_derivatives(self, tau):
        """lambda_12 and lambda_21 cross at t = 0 on the unit square."""
        family = RectangleStretchFamily(tau=tau)
        pi2 = math.pi ** 2
        value_a, slope_a, curv_a = stretch_branch(1, 2, 0.0, tau)
        value_b, slope_b, curv_b = stretch_branch(2, 1, 0.0, tau)
        assert value_a == pytest.approx(value_b)

        first = fd_eigen_derivative(family, [1, 2], 1, BRANCH_STEPS, order=2)
        assert first.value == pytest.approx(544.0 * pi2 ** 2 + 40.0 * pi2 * tau, rel=1e-6)

        product = curv_a * value_b + 2.0 * slope_a * slope_b + value_a * curv_b
        second = fd_eigen_derivative(family, [1, 2], 2, BRANCH_STEPS, order=2)
        assert second.value == pytest.approx(product, rel=1e-6)

    @pytest.mark.parametrize("tau", [0.0, 2.0])
    def test_lower_branch_has_a_kink(self, tau):
        family = RectangleStretchFamily(tau=tau)
        pi2 = math.pi ** 2
        left, right = one_sided_slopes(family, 1, BRANCH_STEPS)
        assert left.value == pytest.approx(6.0 * pi2 * (10.0 * pi2 + tau), rel=1e-6)
        assert right.value - left.value == pytest.approx(-12.0 * pi2 * (10.0 * pi2 + tau), rel=1e-6)

    def test_bessel_family_needs_a_disk(self, wavy_chart, plate):
        problem = BoundaryProblem.of(ProblemKind.DIRICHLET)
        with pytest.raises(InvalidParametersError):
            ChartFamily(problem=problem, params=plate, chart=wavy_chart, perturbation=UNIT_SPEED)
        with pytest.raises(InvalidParametersError):
            ChartFamily(problem=problem, params=plate, chart=StarChart.disk(1.0),
                        perturbation=NormalPerturbation.parse("cos2"))


class TestLemmas:

    @pytest.mark.parametrize("lemma,expected", [
        ("dM", -16.0 * math.pi), ("dB", -32.0 * math.pi), ("dL", -math.pi), ("dDet", 2.0 * math.pi),
        ("dJ1", 2.0 * math.pi), ("dJ2", -8.0 * math.pi), ("dJ3", 2.0 * math.pi),
    ])
    def test_first_preset_closed_forms(self, lemma, expected):
        preset = load_presets(lemma)[0]
        u1, u2 = PolynomialField.parse(preset.u1), PolynomialField.parse(preset.u2)
        psi = PolynomialField.parse(*preset.psi)
        assert lemma_rhs(lemma, u1, u2, psi, preset.chart) == pytest.approx(expected, rel=1e-8)

    def test_unknown_lemma(self, unit_disk):
        u = PolynomialField.parse("x")
        with pytest.raises(InvalidParametersError):
            lemma_rhs("dX", u, u, PolynomialField.parse("x", "y"), unit_disk)

    def test_clamped_identity_needs_vanishing_traces(self, unit_disk):
        u = PolynomialField.parse("x")
        with pytest.raises(InvalidParametersError):
            lemma_rhs("dJ2", u, u, PolynomialField.parse("x", "y"), unit_disk)

    @pytest.mark.slow
    @pytest.mark.parametrize("lemma", ["dM", "dB", "dL", "dDet", "dJ1", "dJ2", "dJ3"])
    def test_presets_agree_with_finite_differences(self, lemma):
        for number, preset in enumerate(load_presets(lemma), start=1):
            result = lemma_check(lemma, PolynomialField.parse(preset.u1), PolynomialField.parse(preset.u2),
                                 PolynomialField.parse(*preset.psi), preset.chart)
            assert result.rel_err <= 1e-7, (lemma, number, result)
