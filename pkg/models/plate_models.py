"""
Pydantic models for plate parameters and the five boundary problems.
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from system.errors import InvalidParametersError


class ProblemKind(str, Enum):
    """Boundary conditions of the plate eigenproblem."""
    DIRICHLET = "dirichlet"
    NAVIER = "navier"
    NEUMANN = "neumann"
    STEKLOV_KS = "steklov_ks"
    STEKLOV_BP = "steklov_bp"


class SpaceConstraint(str, Enum):
    """Essential conditions imposed on the trial space."""
    CLAMPED = "clamped"
    PINNED = "pinned"
    FREE = "free"

    @property
    def power(self) -> int:
        """Exponent of the boundary factor that enforces the constraint."""
        return {"free": 0, "pinned": 1, "clamped": 2}[self.value]


# kind -> (form index, space constraint, quotient constants)
PROBLEM_TABLE = {
    ProblemKind.DIRICHLET: (1, SpaceConstraint.CLAMPED, False),
    ProblemKind.NAVIER: (1, SpaceConstraint.PINNED, False),
    ProblemKind.NEUMANN: (1, SpaceConstraint.FREE, True),
    ProblemKind.STEKLOV_KS: (2, SpaceConstraint.PINNED, False),
    ProblemKind.STEKLOV_BP: (3, SpaceConstraint.FREE, True),
}


class BoundaryProblem(BaseModel):
    """A plate eigenproblem P[u][v] = lambda J_i[u][v] on the space V."""
    model_config = ConfigDict(frozen=True)

    kind: ProblemKind = Field(description="Boundary condition family")
    form_index: int = Field(description="Index i of the right-hand form J_i")
    space_constraint: SpaceConstraint = Field(description="Essential conditions of the trial space")
    quotient_constants: bool = Field(description="Whether constants are factored out of the space")

    @model_validator(mode="after")
    def matches_table(self):
        expected = PROBLEM_TABLE[self.kind]
        if (self.form_index, self.space_constraint, self.quotient_constants) != expected:
            raise ValueError(f"{self.kind.value} requires (i, space, quotient) = "
                             f"({expected[0]}, {expected[1].value}, {expected[2]})")
        return self

    @classmethod
    def of(cls, kind) -> "BoundaryProblem":
        kind = ProblemKind(kind)
        index, space, quotient = PROBLEM_TABLE[kind]
        return cls(kind=kind, form_index=index, space_constraint=space, quotient_constants=quotient)

    @property
    def is_steklov(self) -> bool:
        return self.form_index != 1


class PlateParams(BaseModel):
    """Lateral tension tau and Poisson ratio sigma."""
    model_config = ConfigDict(frozen=True)

    tau: float = Field(ge=0.0, allow_inf_nan=False, description="Lateral tension (1/length^2)")
    sigma: float = Field(gt=-1.0, lt=1.0, allow_inf_nan=False, description="Poisson ratio")

    def check_for(self, problem: BoundaryProblem) -> "PlateParams":
        """Reject tau = 0 for the problems whose kernel is quotiented out."""
        if problem.quotient_constants and self.tau <= 0.0:
            raise InvalidParametersError(f"{problem.kind.value} requires tau > 0, got {self.tau}")
        return self
