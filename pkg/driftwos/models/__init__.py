"""Data models for problems, walks, estimates and validation reports."""

from .estimate import Estimate, GridAxis, GridResult, GridSpec
from .problem import AnnulusDomain, BallDomain, BoundaryFunction, BoxDomain, ProblemSpec
from .run_config import RunConfig, SolveRecord
from .walk import Termination, WalkConfig

__all__ = [
    "AnnulusDomain",
    "BallDomain",
    "BoundaryFunction",
    "BoxDomain",
    "Estimate",
    "GridAxis",
    "GridResult",
    "GridSpec",
    "ProblemSpec",
    "RunConfig",
    "SolveRecord",
    "Termination",
    "WalkConfig",
]
