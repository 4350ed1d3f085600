"""Models for single walks and their tuning knobs."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat

from driftwos.config import settings


class Termination(str, Enum):
    """Which stopping rule ended a walk."""

    SHELL_REACHED = "shell-reached"
    BUDGET_EXHAUSTED = "budget-exhausted"


class WalkConfig(BaseModel):
    """Implementer-chosen parameters of the sphere chain.

    ``epsilon`` left as None resolves to ``settings.epsilon_fraction`` times the
    domain diameter when the walk starts.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    shrink_factor: float = Field(
        default_factory=lambda: settings.default_shrink_factor,
        gt=0,
        le=1,
        description="Radius of each sphere as a fraction of the distance to the boundary",
    )
    epsilon: Optional[PositiveFloat] = Field(default=None, description="Shell width")
    max_steps: int = Field(default_factory=lambda: settings.default_max_steps, ge=1)
    record_path: bool = False


class StepProbeRow(BaseModel):
    """Mean step count at one shell width."""

    epsilon: float
    mean_steps: float
    n_walks: int
    budget_failures: int


class StepProbe(BaseModel):
    """Step counts over a grid of shell widths with a log(1/epsilon) fit."""

    rows: List[StepProbeRow]
    slope: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None
