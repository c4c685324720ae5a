"""
Pydantic models for run configuration.
"""
from enum import Enum
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.geometry_models import NormalPerturbation, RectangleDomain, StarChart
from models.plate_models import BoundaryProblem, PlateParams, ProblemKind
from system.config import ANGULAR_NODES, BOUNDARY_GRID, RADIAL_NODES, RITZ_DEGREE


class SolverKind(str, Enum):
    """Spectrum solvers."""
    BESSEL = "bessel"
    RITZ = "ritz"


class OutputFormat(str, Enum):
    """Output file formats."""
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Everything a command needs; validated before any computation."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: ProblemKind = Field(default=ProblemKind.DIRICHLET, description="Boundary problem")
    tau: float = Field(default=0.0, description="Lateral tension")
    sigma: float = Field(default=0.3, description="Poisson ratio")
    disk: Optional[float] = Field(default=None, gt=0, description="Disk radius")
    chart: Optional[StarChart] = Field(default=None, description="Star chart")
    rectangle: Optional[RectangleDomain] = Field(default=None, description="Rectangle for the Navier closed form")
    solver: SolverKind = Field(default=SolverKind.BESSEL, description="Spectrum solver")
    radial_nodes: int = Field(default=RADIAL_NODES, ge=1, description="Gauss-Legendre nodes in rho")
    angular_nodes: int = Field(default=ANGULAR_NODES, ge=1, description="Trapezoid nodes in theta")
    boundary_nodes: int = Field(default=BOUNDARY_GRID, ge=8, description="Periodic boundary grid")
    degree: int = Field(default=RITZ_DEGREE, ge=0, description="Ritz polynomial degree")
    count: int = Field(default=5, ge=1, description="Number of clusters (eigenvalues for rectangles)")
    n_max: Optional[int] = Field(default=None, ge=0, description="Largest angular index of the disk solver")
    quotient: bool = Field(default=True, description="Factor constants out of Neumann and Steklov BP")
    output_format: OutputFormat = Field(default=OutputFormat.JSON, description="Output format")
    output: Optional[str] = Field(default=None, description="Output path; stdout when missing")
    check: bool = Field(default=False, description="Fail with exit 4 when a threshold is missed")
    threshold: Optional[float] = Field(default=None, gt=0, description="Override of the command threshold")

    # command specific
    cluster_index: int = Field(default=1, ge=1, description="1-based cluster position")
    s: Optional[int] = Field(default=None, ge=1, description="Order of the symmetric function, all when missing")
    perturbation: str = Field(default="1", description="Normal speed profile")
    steps: Optional[Tuple[float, ...]] = Field(default=None, description="Finite-difference steps; per-command default")
    radii: Tuple[float, ...] = Field(default=(0.25, 0.5, 0.75, 1.0), description="Radiality circles")
    members: Optional[Tuple[int, ...]] = Field(default=None, description="1-based member subset")
    lemma: str = Field(default="dM", description="Identity to verify")
    preset: Optional[int] = Field(default=None, ge=1, description="Preset number")
    u1: str = Field(default="x**2 + y**2", description="First scalar polynomial")
    u2: str = Field(default="x**2 + y**2", description="Second scalar polynomial")
    psi: Tuple[str, str] = Field(default=("x", "y"), description="Deformation field")
    stretch: Optional[Tuple[float, float, int]] = Field(default=None, description="Sweep start, stop, samples")
    pair: Tuple[int, int] = Field(default=(1, 2), description="Mode numbers (m, n); the branches of (m, n) and (n, m)")

    @model_validator(mode="after")
    def consistent(self):
        domains = [d for d in (self.disk, self.chart, self.rectangle) if d is not None]
        if len(domains) > 1:
            raise ValueError("Give at most one of disk, chart and rectangle")
        self.params.check_for(self.problem_record)
        if self.rectangle is not None and self.problem != ProblemKind.NAVIER:
            raise ValueError("Rectangles only support the Navier problem")
        if self.solver == SolverKind.BESSEL and not self.star_chart.is_disk and self.rectangle is None:
            raise ValueError("The Bessel solver needs a disk; use --solver ritz")
        if self.steps and any(a <= b for a, b in zip(self.steps, self.steps[1:])):
            raise ValueError("Steps must be strictly decreasing")
        NormalPerturbation.parse(self.perturbation)
        return self

    @property
    def params(self) -> PlateParams:
        return PlateParams(tau=self.tau, sigma=self.sigma)

    @property
    def problem_record(self) -> BoundaryProblem:
        return BoundaryProblem.of(self.problem)

    @property
    def star_chart(self) -> StarChart:
        if self.chart is not None:
            return self.chart
        return StarChart.disk(self.disk if self.disk is not None else 1.0)

    @property
    def domain(self) -> Union[StarChart, RectangleDomain]:
        return self.rectangle if self.rectangle is not None else self.star_chart

    @property
    def normal_speed(self) -> NormalPerturbation:
        return NormalPerturbation.parse(self.perturbation)

    def domain_record(self) -> dict:
        """Domain description for reports."""
        if self.rectangle is not None:
            return {"rectangle": self.rectangle.model_dump()}
        chart = self.star_chart
        if chart.is_disk:
            return {"disk": chart.base_radius}
        return {"chart": chart.model_dump()}

    def member_positions(self) -> Optional[List[int]]:
        return None if self.members is None else [m - 1 for m in self.members]


class LemmaPreset(BaseModel):
    """A bundled (u1, u2, psi, domain) triple for the form-derivative identities."""
    model_config = ConfigDict(frozen=True)

    u1: str = Field(description="First scalar polynomial")
    u2: str = Field(description="Second scalar polynomial")
    psi: Tuple[str, str] = Field(description="Deformation field")
    chart: StarChart = Field(default=StarChart(base_radius=1.0), description="Reference domain")
