"""Run configuration schema for `driftwos solve` and its output records."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from driftwos.config import settings
from driftwos.models.estimate import Estimate, GridSpec
from driftwos.models.problem import Point, ProblemSpec
from driftwos.models.walk import WalkConfig


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ExecutionBlock(_Block):
    n_walks: int = Field(ge=2)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default_factory=lambda: settings.default_workers, ge=1)


class QueryBlock(_Block):
    """Exactly one of a single point or a lattice."""

    point: Optional[Point] = None
    grid: Optional[GridSpec] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "QueryBlock":
        if (self.point is None) == (self.grid is None):
            raise ValueError("query needs exactly one of 'point' or 'grid'")
        return self


class OutputBlock(_Block):
    format: Literal["csv", "json"] = "csv"
    path: Optional[str] = Field(default=None, description="Output file; stdout when omitted")


class RunConfig(_Block):
    problem: ProblemSpec
    walk: WalkConfig = Field(default_factory=WalkConfig)
    execution: ExecutionBlock
    query: QueryBlock
    output: OutputBlock = Field(default_factory=OutputBlock)

    @model_validator(mode="after")
    def check_query_dimension(self) -> "RunConfig":
        dim = self.problem.dim
        if self.query.point is not None and len(self.query.point) != dim:
            raise ValueError(f"query point has dimension {len(self.query.point)}, problem has {dim}")
        if self.query.grid is not None and self.query.grid.dim != dim:
            raise ValueError(f"query grid has dimension {self.query.grid.dim}, problem has {dim}")
        return self


class SolveRecord(BaseModel):
    """One output row of `driftwos solve`."""

    point: Point
    mean: float
    stderr: float
    ci_lo: float
    ci_hi: float
    n_walks: int
    mean_steps: float
    budget_failures: int
    degraded: bool

    @classmethod
    def from_estimate(cls, point: Point, estimate: Estimate) -> "SolveRecord":
        return cls(
            point=point,
            mean=estimate.mean,
            stderr=estimate.stderr,
            ci_lo=estimate.ci_lo,
            ci_hi=estimate.ci_hi,
            n_walks=estimate.n_walks,
            mean_steps=estimate.mean_steps,
            budget_failures=estimate.n_budget_failures,
            degraded=estimate.degraded,
        )
