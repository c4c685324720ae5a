"""
Shared fixtures for the plate-lab tests.
"""
import pytest

from models.geometry_models import StarChart
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from spectrum_cache.spectrum_cache import spectrum_cache


@pytest.fixture
def unit_disk():
    return StarChart.disk(1.0)


@pytest.fixture
def wavy_chart():
    """R = 1 + 0.05 cos 2 theta."""
    return StarChart(base_radius=1.0, cos_coeffs=(0.0, 0.05))


@pytest.fixture
def plate():
    return PlateParams(tau=0.0, sigma=0.3)


@pytest.fixture
def tense_plate():
    return PlateParams(tau=1.0, sigma=0.3)


@pytest.fixture
def problems():
    return {kind: BoundaryProblem.of(kind) for kind in ProblemKind}


@pytest.fixture(autouse=True)
def empty_spectrum_cache():
    spectrum_cache.clear()
    yield
    spectrum_cache.clear()
