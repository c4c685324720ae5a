"""
Tests for the Bessel-determinant disk spectra, the Navier rectangle and
eigenvalue clustering.
"""
import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from reference_spectra.clusters import EigenCluster, cluster
from reference_spectra.disk import disk_boundary_divergence, disk_mode_eval, disk_spectrum
from reference_spectra.rectangle import rectangle_navier_spectrum, stretch_branch, stretch_spectrum
from system.errors import InvalidParametersError, PartialClusterError, TruncationError

ALL_KINDS = list(ProblemKind)


def _spectrum(kind, tau=1.0, sigma=0.3, R=1.0, count=5, n_max=None):
    problem = BoundaryProblem.of(kind)
    return disk_spectrum(PlateParams(tau=tau, sigma=sigma), problem, R,
                         count + 4 if n_max is None else n_max, count)


class TestCluster:
    """Grouping of ascending eigenvalues"""

    @pytest.mark.parametrize("eigs, groups", [
        ([1.0, 1.0, 2.0], [[0, 1], [2]]),
        ([1.0, 1.0 + 1e-12, 3.0], [[0, 1], [2]]),
        ([], []),
        ([5.0], [[0]]),
    ])
    def test_groups(self, eigs, groups):
        assert cluster(eigs, 1e-9) == groups

    def test_descending_rejected(self):
        with pytest.raises(InvalidParametersError):
            cluster([2.0, 1.0])

    def test_subset_is_partial(self):
        full = EigenCluster(lambda_F=2.0, members=("a", "b"), indices=(1, 2), eigenvalues=(2.0, 2.0))
        part = full.subset([1])
        assert part.partial and part.indices == (2,)
        assert not full.subset([0, 1]).partial
        with pytest.raises(InvalidParametersError):
            full.subset([2])


class TestDiskSpectrum:
    """Determinant roots on the disk"""

    def test_clamped_first_eigenvalue(self):
        clusters = _spectrum(ProblemKind.DIRICHLET, tau=0.0)
        assert len(clusters) == 5
        assert clusters[0].size == 1
        assert clusters[0].lambda_F == pytest.approx(104.3631, rel=1e-6)

    def test_hinged_multiplicities_and_ordering(self):
        clusters = _spectrum(ProblemKind.NAVIER, tau=0.0)
        assert [c.size for c in clusters[:3]] == [1, 2, 2]
        assert [list(c.indices) for c in clusters[:3]] == [[0], [1, 2], [3, 4]]
        assert [{m.n for m in c.members} for c in clusters[:3]] == [{0}, {1}, {2}]
        # the moment condition lowers every eigenvalue below its Laplace square
        for c, n in zip(clusters[:3], range(3)):
            assert c.lambda_F < jn_zeros(n, 1)[0] ** 4

    def test_hinged_tends_to_bessel_zeros_as_sigma_tends_to_one(self):
        clusters = _spectrum(ProblemKind.NAVIER, tau=0.0, sigma=1.0 - 1e-9)
        for c, n in zip(clusters[:3], range(3)):
            assert c.lambda_F == pytest.approx(jn_zeros(n, 1)[0] ** 4, rel=1e-6)

    def test_hinged_eigenvalues_increase_with_sigma(self):
        lams = [_spectrum(ProblemKind.NAVIER, tau=0.0, sigma=s, count=1)[0].lambda_F for s in (-0.5, 0.3, 0.9)]
        assert lams[0] < lams[1] < lams[2] < jn_zeros(0, 1)[0] ** 4

    @pytest.mark.parametrize("kind", [ProblemKind.DIRICHLET, ProblemKind.NAVIER])
    @pytest.mark.parametrize("R", [0.5, 2.0])
    def test_scaling(self, kind, R):
        base = _spectrum(kind, tau=0.0, count=3)
        scaled = _spectrum(kind, tau=0.0, R=R, count=3)
        for a, b in zip(base, scaled):
            assert b.lambda_F == pytest.approx(a.lambda_F / R ** 4, rel=1e-9)

    @pytest.mark.parametrize("kind", [ProblemKind.NEUMANN, ProblemKind.STEKLOV_BP])
    def test_kernel_is_quotiented(self, kind):
        clusters = _spectrum(kind, tau=1.0)
        assert clusters[0].lambda_F > 1e-6

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_ascending_with_mode_labels(self, kind):
        clusters = _spectrum(kind)
        values = [lam for c in clusters for lam in c.eigenvalues]
        assert values == sorted(values)
        assert all(len(c.members) == c.size for c in clusters)
        assert all(m.label().startswith("n=") for c in clusters for m in c.members)

    def test_tension_required_for_neumann(self):
        with pytest.raises(InvalidParametersError):
            _spectrum(ProblemKind.NEUMANN, tau=0.0)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            _spectrum(ProblemKind.DIRICHLET, tau=0.0, count=5, n_max=0)


class TestDiskModes:
    """Boundary conditions and derivative consistency of disk modes"""

    def test_clamped_boundary_conditions(self):
        mode = _spectrum(ProblemKind.DIRICHLET, tau=0.5, count=3)[1].members[0]
        theta = np.linspace(0.0, 2.0 * math.pi, 17)
        d = disk_mode_eval(mode, np.full_like(theta, 1.0), theta)
        normal = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        np.testing.assert_allclose(d.value, 0.0, atol=1e-10)
        np.testing.assert_allclose(d.directional(normal), 0.0, atol=1e-10)

    @pytest.mark.parametrize("sigma", [0.3, -0.5])
    def test_hinged_boundary_conditions(self, sigma):
        """v = 0 and (1 - sigma) v_nn + sigma Lap v = 0 on the circle"""
        mode = _spectrum(ProblemKind.NAVIER, tau=1.0, sigma=sigma, count=3)[1].members[0]
        theta = np.linspace(0.0, 2.0 * math.pi, 9)
        d = disk_mode_eval(mode, np.ones_like(theta), theta)
        normal = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        moment = (1.0 - sigma) * d.second_directional(normal, normal) + sigma * d.laplacian
        scale = np.abs(d.laplacian).max()
        assert scale > 1e-3
        np.testing.assert_allclose(d.value, 0.0, atol=1e-10)
        np.testing.assert_allclose(moment, 0.0, atol=1e-9 * scale)

    def test_taylor_patch_is_continuous(self):
        mode = _spectrum(ProblemKind.NEUMANN, count=2)[1].members[0]
        theta = np.array([0.3, 2.0])
        inside = disk_mode_eval(mode, np.full(2, 0.05 * (1.0 - 1e-9)), theta)
        outside = disk_mode_eval(mode, np.full(2, 0.05 * (1.0 + 1e-9)), theta)
        for key in [(0, 0), (1, 0), (1, 1), (2, 1)]:
            np.testing.assert_allclose(inside[key], outside[key], rtol=1e-6, atol=1e-8)

    def test_radius_outside_rejected(self):
        mode = _spectrum(ProblemKind.DIRICHLET, tau=0.0, count=1)[0].members[0]
        with pytest.raises(InvalidParametersError):
            disk_mode_eval(mode, np.array([1.1]), np.array([0.0]))

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_boundary_divergence_matches_finite_differences(self, kind):
        """d/dsigma of tau^T D2v nu on the circle against centred differences"""
        h = 1e-4
        theta = np.linspace(0.1, 6.0, 12)

        def shear(mode, angle):
            d = disk_mode_eval(mode, np.ones_like(angle), angle)
            normal = np.stack([np.cos(angle), np.sin(angle)], axis=-1)
            tangent = np.stack([-np.sin(angle), np.cos(angle)], axis=-1)
            return d.second_directional(tangent, normal)

        modes = [m for c in _spectrum(kind, count=5) for m in c.members if m.n > 0][:3]
        assert len(modes) == 3
        for mode in modes:
            closed = disk_boundary_divergence(mode, theta)
            fd = (shear(mode, theta + h) - shear(mode, theta - h)) / (2.0 * h)
            # clamped and linear free modes carry no shear, so the floor is absolute
            scale = max(np.abs(closed).max(), 1.0)
            if kind in (ProblemKind.NAVIER, ProblemKind.NEUMANN, ProblemKind.STEKLOV_KS):
                assert np.abs(closed).max() > 1e-2
            np.testing.assert_allclose(fd, closed, atol=1e-6 * scale)


class TestRectangle:
    """Navier rectangle in closed form"""

    def test_unit_square(self):
        values = [lam for lam, _, _ in rectangle_navier_spectrum(1.0, 1.0, 0.0, 3)]
        np.testing.assert_allclose(values, [4 * math.pi ** 4, 25 * math.pi ** 4, 25 * math.pi ** 4], rtol=1e-14)
        assert [(m, n) for _, m, n in rectangle_navier_spectrum(1.0, 1.0, 0.0, 3)] == [(1, 1), (1, 2), (2, 1)]

    def test_tension_term(self):
        lam, _, _ = rectangle_navier_spectrum(1.0, 1.0, 2.0, 1)[0]
        mu = 2.0 * math.pi ** 2
        assert lam == pytest.approx(mu * mu + 2.0 * mu)

    def test_stretch_splits_pair(self):
        values = [lam for lam, _, _ in stretch_spectrum(0.05, 0.0, 3)]
        assert values[1] < values[2]

    def test_stretch_branch_derivatives(self):
        h = 1e-5
        value, slope, curvature = stretch_branch(1, 2, 0.0, 1.0)
        plus = stretch_branch(1, 2, h, 1.0)[0]
        minus = stretch_branch(1, 2, -h, 1.0)[0]
        assert slope == pytest.approx((plus - minus) / (2.0 * h), rel=1e-8)
        assert curvature == pytest.approx((plus - 2.0 * value + minus) / h ** 2, rel=1e-4)
        assert slope == pytest.approx(6.0 * math.pi ** 2 * (10.0 * math.pi ** 2 + 1.0))

    @pytest.mark.parametrize("a, b, tau, count", [(0.0, 1.0, 0.0, 1), (1.0, 1.0, -1.0, 1), (1.0, 1.0, 0.0, 0)])
    def test_invalid(self, a, b, tau, count):
        with pytest.raises(InvalidParametersError):
            rectangle_navier_spectrum(a, b, tau, count)
