"""Monte Carlo estimation of u(x) = E[f(Y(∞))] with uncertainty and grids.

Walk i always draws from RngStream.for_walk(seed, i) and results are stored by
walk index, so neither the number of worker processes nor the vectorised
batch a walk runs in ever changes an Estimate.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from driftwos.config import settings
from driftwos.models.estimate import (
    Estimate,
    GridNode,
    GridResult,
    GridSpec,
    MaxPrincipleReport,
    MaxPrincipleViolation,
    SkippedNode,
)
from driftwos.models.problem import BoundaryFunction, ProblemSpec
from driftwos.models.walk import WalkConfig
from driftwos.services.geometry import (
    as_point,
    boundary_range,
    boundary_values,
    contains,
    eval_boundary,
    on_boundary,
)
from driftwos.services.sampling import RngStream
from driftwos.services.walker import walk_streams

logger = logging.getLogger(__name__)


class EstimatorError(Exception):
    """Expected error in a Monte Carlo estimate request."""


@dataclass
class ExitSample:
    """Exit points, step counts and budget flags in walk-index order."""

    points: np.ndarray
    steps: np.ndarray
    exhausted: np.ndarray

    @property
    def n_walks(self) -> int:
        return int(self.steps.size)


def _walk_chunk(
    problem: ProblemSpec,
    x: Tuple[float, ...],
    cfg: WalkConfig,
    seed: int,
    start: int,
    stop: int,
) -> ExitSample:
    batch = walk_streams(problem, x, cfg, seed, start, stop)
    return ExitSample(batch.exit_points, batch.steps, batch.exhausted)


def _chunk_bounds(n_walks: int, chunks: int) -> List[Tuple[int, int]]:
    edges = np.linspace(0, n_walks, chunks + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def collect_exits(
    problem: ProblemSpec,
    x: ArrayLike,
    cfg: WalkConfig,
    n_walks: int,
    seed: int,
    workers: Optional[int] = None,
) -> ExitSample:
    """Run n_walks walks from x; the result is independent of ``workers``."""
    point = tuple(float(c) for c in as_point(problem.domain, x))
    workers = workers or settings.default_workers
    if workers <= 1 or n_walks < 2 * workers:
        return _walk_chunk(problem, point, cfg, seed, 0, n_walks)

    bounds = _chunk_bounds(n_walks, workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        parts = list(
            executor.map(
                _walk_chunk,
                *zip(*[(problem, point, cfg, seed, lo, hi) for lo, hi in bounds]),
            )
        )
    return ExitSample(
        points=np.concatenate([part.points for part in parts]),
        steps=np.concatenate([part.steps for part in parts]),
        exhausted=np.concatenate([part.exhausted for part in parts]),
    )


def _sample_mean(f: BoundaryFunction, points: np.ndarray) -> float:
    if f.kind == "constant":
        return f.coefficients[0]
    if f.kind == "sum":
        return math.fsum(
            weight * _sample_mean(term, points) for weight, term in zip(f.coefficients, f.terms)
        )
    return math.fsum(boundary_values(f, points)) / len(points)


def score(f: BoundaryFunction, sample: ExitSample) -> Estimate:
    """Sample statistics of f over a set of exit points.

    Sums are exactly rounded (math.fsum), so the result does not depend on the
    order in which walks finished. The mean of sum data is the weighted sum of
    its terms' means, so scoring is linear in f over a shared sample.
    """
    n = sample.n_walks
    if n < 2:
        raise EstimatorError(f"an estimate needs at least 2 walks, got {n}")
    values = boundary_values(f, sample.points)
    mean = _sample_mean(f, sample.points)
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    failures = int(np.count_nonzero(sample.exhausted))
    degraded = failures / n > settings.degraded_failure_fraction
    if degraded:
        logger.warning(f"{failures} of {n} walks exhausted their step budget")
    return Estimate.from_moments(
        mean=mean,
        stderr=math.sqrt(variance / n),
        n_walks=n,
        n_budget_failures=failures,
        mean_steps=math.fsum(int(s) for s in sample.steps) / n,
        degraded=degraded,
    )


def estimate_point(
    problem: ProblemSpec,
    x: ArrayLike,
    cfg: WalkConfig,
    n_walks: int,
    seed: int,
    workers: Optional[int] = None,
) -> Estimate:
    """Monte Carlo estimate of u(x); a boundary point returns f(x) exactly."""
    dom = problem.domain
    point = as_point(dom, x)
    if n_walks < 2:
        raise EstimatorError(f"n_walks must be >= 2, got {n_walks}")
    if on_boundary(dom, point):
        return Estimate.exact(eval_boundary(problem.boundary, point))
    if not contains(dom, point):
        raise EstimatorError(f"query point {tuple(point)} lies outside the closed domain")

    sample = collect_exits(problem, point, cfg, n_walks, seed, workers)
    estimate = score(problem.boundary, sample)
    logger.debug(
        f"u{tuple(point)} ≈ {estimate.mean:.6g} ± {estimate.stderr:.2g} "
        f"({n_walks} walks, {estimate.mean_steps:.1f} mean steps)"
    )
    return estimate


def estimate_grid(
    problem: ProblemSpec,
    grid: GridSpec,
    cfg: WalkConfig,
    n_walks: int,
    seed: int,
    workers: Optional[int] = None,
) -> GridResult:
    """Estimates at every lattice node in the closed domain.

    Node k draws its walks from the stream family RngStream.family_seed(seed, k).
    """
    if grid.size == 0:
        raise EstimatorError("grid has no nodes")
    if grid.dim != problem.dim:
        raise EstimatorError(f"grid has dimension {grid.dim}, domain has {problem.dim}")

    dom = problem.domain
    nodes = []
    skipped = []
    for index, node in enumerate(grid.nodes()):
        if on_boundary(dom, node):
            estimate = Estimate.exact(eval_boundary(problem.boundary, node))
            nodes.append(GridNode(index=index, point=node, on_boundary=True, estimate=estimate))
        elif contains(dom, node):
            node_seed = RngStream.family_seed(seed, index)
            estimate = estimate_point(problem, node, cfg, n_walks, node_seed, workers)
            nodes.append(GridNode(index=index, point=node, estimate=estimate))
        else:
            skipped.append(SkippedNode(index=index, point=node))

    if skipped:
        logger.warning(f"skipped {len(skipped)} of {grid.size} grid nodes outside the domain")
    return GridResult(nodes=nodes, skipped=skipped)


def boundary_value_range(
    problem: ProblemSpec,
    seed: int = 0,
    extra_points: Iterable[ArrayLike] = (),
) -> Tuple[float, float]:
    """(min f, max f) on ∂D from dense boundary sampling."""
    rng = RngStream.for_walk(seed, 0)
    return boundary_range(
        problem.boundary,
        problem.domain,
        settings.boundary_range_samples,
        rng.generator,
        extra_points,
    )


def max_principle_check(
    results: Sequence[Estimate],
    f_range: Tuple[float, float],
    tol: float = 0.0,
) -> MaxPrincipleReport:
    """Flag estimates whose 95% interval lies entirely outside [min f - tol, max f + tol]."""
    lower = f_range[0] - tol
    upper = f_range[1] + tol
    violations = [
        MaxPrincipleViolation(index=index, mean=estimate.mean, ci95=estimate.ci95)
        for index, estimate in enumerate(results)
        if estimate.ci_hi < lower or estimate.ci_lo > upper
    ]
    return MaxPrincipleReport(
        passed=not violations,
        f_range=(f_range[0], f_range[1]),
        tol=tol,
        checked=len(results),
        violations=violations,
    )
