"""Models for the numerical oracles and the acceptance report."""

from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat

from driftwos.config import settings


class EulerConfig(BaseModel):
    """Time stepping of the Euler-Maruyama oracle.

    Paths stop at the first sample outside the ball; no reflection and no
    crossing correction.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: PositiveFloat
    max_steps: int = Field(default_factory=lambda: settings.euler_max_steps, ge=1)
    seed: int = Field(default=0, ge=0)
    stream: int = Field(default=0, ge=0)

    def refined(self, factor: int, stream_offset: int = 1) -> "EulerConfig":
        """Same oracle with dt / factor on an independent stream."""
        return self.model_copy(
            update={"dt": self.dt / factor, "stream": self.stream + stream_offset}
        )


class MvpResult(BaseModel):
    """Drifted mean value quadrature over a sphere minus the centre value."""

    residual: float
    average: float
    center_value: float
    converged: bool


class LaplaceReport(BaseModel):
    """Extrapolated E[exp(-lambda tau_r)] against kappa(d, r sqrt(2 lambda))."""

    dim: int
    radius: float
    lam: float
    target: float
    coarse: float
    fine: float
    extrapolated: float
    stderr: float
    z_score: float
    passed: bool


class CheckResult(BaseModel):
    """One acceptance check with the statistics it measured."""

    suite: str
    name: str
    passed: bool
    statistics: Dict[str, Any] = Field(default_factory=dict)


class ValidationReport(BaseModel):
    selector: str
    passed: bool
    checks: List[CheckResult]
