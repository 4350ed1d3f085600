"""Models for Monte Carlo estimates and grid evaluations."""

import itertools
from typing import Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from driftwos.models.problem import Point

Z_95 = 1.959964


class Estimate(BaseModel):
    """Monte Carlo value of u(x) with its uncertainty."""

    model_config = ConfigDict(frozen=True)

    mean: float
    stderr: float = Field(ge=0)
    ci95: Tuple[float, float]
    n_walks: int = Field(ge=0)
    n_budget_failures: int = Field(default=0, ge=0)
    mean_steps: float = Field(default=0.0, ge=0)
    degraded: bool = False

    @classmethod
    def from_moments(
        cls,
        mean: float,
        stderr: float,
        n_walks: int,
        n_budget_failures: int = 0,
        mean_steps: float = 0.0,
        degraded: bool = False,
    ) -> "Estimate":
        half_width = Z_95 * stderr
        return cls(
            mean=mean,
            stderr=stderr,
            ci95=(mean - half_width, mean + half_width),
            n_walks=n_walks,
            n_budget_failures=n_budget_failures,
            mean_steps=mean_steps,
            degraded=degraded,
        )

    @classmethod
    def exact(cls, value: float, n_walks: int = 0) -> "Estimate":
        """A boundary value known without sampling."""
        return cls.from_moments(value, 0.0, n_walks)

    @property
    def ci_lo(self) -> float:
        return self.ci95[0]

    @property
    def ci_hi(self) -> float:
        return self.ci95[1]


class GridAxis(BaseModel):
    """Evenly spaced nodes along one axis; a single node sits at ``lo``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lo: float
    hi: float
    count: int = Field(ge=0)

    @model_validator(mode="after")
    def check_order(self) -> "GridAxis":
        if self.hi < self.lo:
            raise ValueError("grid axis needs lo <= hi")
        return self

    def values(self) -> List[float]:
        return np.linspace(self.lo, self.hi, self.count).tolist()


class GridSpec(BaseModel):
    """Axis-aligned lattice; nodes are enumerated with the last axis varying fastest."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    axes: Tuple[GridAxis, ...] = Field(min_length=1)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def size(self) -> int:
        total = 1
        for axis in self.axes:
            total *= axis.count
        return total

    def nodes(self) -> Iterator[Point]:
        return (tuple(node) for node in itertools.product(*(axis.values() for axis in self.axes)))


class GridNode(BaseModel):
    """Estimate at one lattice node."""

    index: int
    point: Point
    on_boundary: bool = False
    estimate: Estimate


class SkippedNode(BaseModel):
    """Lattice node outside the closed domain."""

    index: int
    point: Point


class GridResult(BaseModel):
    nodes: List[GridNode]
    skipped: List[SkippedNode] = Field(default_factory=list)


class MaxPrincipleViolation(BaseModel):
    index: int
    mean: float
    ci95: Tuple[float, float]


class MaxPrincipleReport(BaseModel):
    """Estimates whose confidence interval leaves [min f - tol, max f + tol]."""

    passed: bool
    f_range: Tuple[float, float]
    tol: float
    checked: int
    violations: List[MaxPrincipleViolation] = Field(default_factory=list)
