"""
Pydantic models for report data structures.
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1


class ReportKind(str, Enum):
    """Types of reports the commands write."""
    SPECTRUM = "spectrum"
    HADAMARD = "hadamard"
    CRITICALITY = "criticality"
    RADIALITY = "radiality"
    LEMMA = "lemma"
    BRANCHES = "branches"


class ClusterRecord(BaseModel):
    """One eigenvalue cluster of a spectrum, exported with the key ``lambda``."""
    model_config = ConfigDict(populate_by_name=True)

    lambda_F: float = Field(alias="lambda", description="Mean eigenvalue of the cluster")
    multiplicity: int = Field(description="Number of members")
    indices: List[int] = Field(description="1-based positions in the ascending spectrum")
    eigenvalues: List[float] = Field(description="Member eigenvalues")
    n_list: List[int] = Field(default=[], description="Angular index of every disk member")
    parities: List[str] = Field(default=[], description="cos or sin for every disk member")
    labels: List[str] = Field(default=[], description="Member labels, mode numbers (m,n) on rectangles")


class CriticalityResidual(BaseModel):
    """Deviation of the summed shape density from its boundary mean."""
    c_mean: float = Field(description="Arc-length mean of the summed density")
    max_abs_dev: float = Field(description="Largest deviation from the mean on the boundary grid")
    rel_residual: float = Field(description="max_abs_dev relative to |c_mean|")


class RadialityProfile(BaseModel):
    """Relative angular variation of the eigenspace sums on one circle."""
    radius: float = Field(description="Circle radius (length)")
    value_sq: float = Field(description="Variation of sum v^2")
    gradient_sq: float = Field(description="Variation of sum |grad v|^2")
    laplacian_sq: float = Field(description="Variation of sum (Lap v)^2")
    hessian_sq: float = Field(description="Variation of sum |D2 v|^2")

    @property
    def worst(self) -> float:
        return max(self.value_sq, self.gradient_sq, self.laplacian_sq, self.hessian_sq)


class DifferenceEstimate(BaseModel):
    """A Richardson-extrapolated finite difference."""
    value: float = Field(description="Extrapolated derivative")
    steps: List[float] = Field(description="Step sizes, decreasing")
    estimates: List[float] = Field(description="Raw difference quotient per step")
    consistency: float = Field(description="Change between the two most refined extrapolations")


class LemmaResult(BaseModel):
    """Pulled-back form derivative against the closed-form right-hand side."""
    lemma: str = Field(description="Identity checked")
    lhs_fd: float = Field(description="Finite difference of the pulled-back form")
    rhs_formula: float = Field(description="Quadrature of the right-hand side")
    rel_err: float = Field(description="|lhs - rhs| / max(|rhs|, floor)")


class BaseReport(BaseModel):
    """Fields every report carries."""
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema", description="Report format version")
    report: ReportKind = Field(description="Kind of report")
    threshold: Optional[float] = Field(default=None, description="Pass threshold under --assert")
    passed: Optional[bool] = Field(default=None, description="Outcome under --assert")


class SpectrumReport(BaseReport):
    report: ReportKind = ReportKind.SPECTRUM
    problem: str = Field(description="Boundary problem")
    tau: float = Field(description="Lateral tension")
    sigma: float = Field(description="Poisson ratio")
    R: Optional[float] = Field(default=None, description="Disk radius, absent on other domains")
    domain: Dict = Field(description="Domain description")
    solver: str = Field(description="bessel, ritz or closed_form")
    clusters: List[ClusterRecord] = Field(description="Clusters in ascending order")


class HadamardReport(BaseReport):
    report: ReportKind = ReportKind.HADAMARD
    problem: str = Field(description="Boundary problem")
    tau: float = Field(description="Lateral tension")
    sigma: float = Field(description="Poisson ratio")
    domain: Dict = Field(description="Domain description")
    perturbation: str = Field(description="Normal speed profile")
    cluster_index: int = Field(description="1-based cluster position")
    F: List[int] = Field(description="1-based eigenvalue indices of the cluster")
    lambda_F: float = Field(description="Cluster eigenvalue")
    s: int = Field(description="Order of the symmetric function")
    formula_value: float = Field(description="Boundary-integral derivative")
    fd_value: float = Field(description="Extrapolated finite difference")
    rel_err: float = Field(description="|formula - fd| / max(|formula|, 1e-12)")
    scaled_err: float = Field(description="|formula - fd| / (lambda_F^s * perimeter)")
    steps: List[float] = Field(description="Step sizes used")
    fd_estimates: List[float] = Field(description="Raw central differences per step")


class CriticalityReport(BaseReport):
    report: ReportKind = ReportKind.CRITICALITY
    problem: str = Field(description="Boundary problem")
    tau: float = Field(description="Lateral tension")
    sigma: float = Field(description="Poisson ratio")
    domain: Dict = Field(description="Domain description")
    cluster_index: int = Field(description="1-based cluster position")
    lambda_F: float = Field(description="Cluster eigenvalue")
    multiplicity: int = Field(description="Cluster size")
    residual: CriticalityResidual = Field(description="Deviation from a constant density")


class RadialityReport(BaseReport):
    report: ReportKind = ReportKind.RADIALITY
    problem: str = Field(description="Boundary problem")
    tau: float = Field(description="Lateral tension")
    sigma: float = Field(description="Poisson ratio")
    radius: float = Field(description="Disk radius")
    cluster_index: int = Field(description="1-based cluster position")
    members: List[int] = Field(description="0-based member positions used")
    partial: bool = Field(description="Whether only part of the cluster was used")
    profiles: List[RadialityProfile] = Field(description="One entry per radius")


class LemmaReport(BaseReport):
    report: ReportKind = ReportKind.LEMMA
    preset: Optional[int] = Field(default=None, description="Preset number, if one was used")
    u1: str = Field(description="First scalar polynomial")
    u2: str = Field(description="Second scalar polynomial")
    psi: Tuple[str, str] = Field(description="Deformation field components")
    domain: Dict = Field(description="Domain description")
    result: LemmaResult = Field(description="Both sides of the identity")


class BranchRow(BaseModel):
    t: float = Field(description="Family parameter")
    eigenvalues: List[float] = Field(description="Tracked eigenvalues, ascending")
    symmetric: List[float] = Field(description="Lambda_{F,s} for s = 1..|F|")


class BranchReport(BaseReport):
    report: ReportKind = ReportKind.BRANCHES
    family: str = Field(description="Parameter family")
    tau: float = Field(description="Lateral tension")
    indices: List[int] = Field(description="1-based tracked eigenvalue indices")
    rows: List[BranchRow] = Field(description="Sweep samples")
    second_differences: List[DifferenceEstimate] = Field(
        default=[], description="Second derivative of each Lambda_{F,s} at the crossing")
    slope_jump: Optional[float] = Field(default=None, description="Right minus left slope of the lowest branch")
    expected_second: List[Optional[float]] = Field(
        default=[], description="Closed-form second derivatives, when the family has them")
    expected_jump: Optional[float] = Field(default=None, description="Closed-form slope jump")
