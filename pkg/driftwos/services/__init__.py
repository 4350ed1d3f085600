"""Numerical services: special functions, geometry, sampling, walks and estimates."""

from .estimator import estimate_grid, estimate_point
from .walker import run_walk

__all__ = ["estimate_grid", "estimate_point", "run_walk"]
