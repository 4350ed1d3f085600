"""The drifted walk on spheres.

From y the chain jumps to the exit point of X from the ball of radius
shrink_factor * d(y, ∂D) centred at y. Once y is within epsilon of the
boundary the walk stops and reports the nearest boundary point.

run_walks advances a batch of walks in lock step: every still-active walk
takes one step per iteration, drawing from its own lane of a UniformFeed.
A walk's path is fixed by its lane's generator, so batching never changes it,
and run_walk is the same engine with a single lane.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from driftwos.config import settings
from driftwos.models.problem import ProblemSpec
from driftwos.models.walk import StepProbe, StepProbeRow, Termination, WalkConfig
from driftwos.services.geometry import (
    as_point,
    as_points,
    diameter,
    distances_to_boundary,
    project_points,
    signed_distances,
)
from driftwos.services.sampling import RngStream, UniformFeed, exit_directions

logger = logging.getLogger(__name__)


class WalkError(Exception):
    """Expected error while running a sphere walk."""


@dataclass
class WalkOutcome:
    """One realization of the walk's boundary limit."""

    exit_point: np.ndarray
    steps: int
    terminated: Termination
    path: Optional[List[np.ndarray]] = None


@dataclass
class WalkBatch:
    """Exit points, step counts and budget flags of a batch, in lane order."""

    exit_points: np.ndarray
    steps: np.ndarray
    exhausted: np.ndarray
    paths: Optional[List[List[np.ndarray]]] = None


def shell_width(problem: ProblemSpec, cfg: WalkConfig) -> float:
    if cfg.epsilon is not None:
        return cfg.epsilon
    return settings.epsilon_fraction * diameter(problem.domain)


def run_walks(
    problem: ProblemSpec, starts: ArrayLike, cfg: WalkConfig, feed: UniformFeed
) -> WalkBatch:
    """Run one walk per row of ``starts``; row j draws from lane j of ``feed``."""
    dom = problem.domain
    y = as_points(dom, starts).copy()
    n = y.shape[0]
    if feed.lanes != n:
        raise WalkError(f"{n} walks need {n} feed lanes, got {feed.lanes}")
    if np.any(signed_distances(dom, y) >= 0.0):
        raise WalkError("every walk must start inside the domain")

    epsilon = shell_width(problem, cfg)
    drift = np.asarray(problem.b, dtype=float)
    drift_norm = problem.drift_norm
    mean_direction = drift / drift_norm if drift_norm > 0 else None
    sigma2 = problem.sigma2

    paths = [[row.copy()] for row in y] if cfg.record_path else None
    steps = np.zeros(n, dtype=np.int64)
    exhausted = np.zeros(n, dtype=bool)
    distance = distances_to_boundary(dom, y)
    active = np.flatnonzero(distance >= epsilon)

    while active.size:
        over = steps[active] >= cfg.max_steps
        if np.any(over):
            exhausted[active[over]] = True
            logger.debug(f"{int(np.count_nonzero(over))} walks exhausted {cfg.max_steps} steps")
            active = active[~over]
            if active.size == 0:
                break
        radius = cfg.shrink_factor * distance[active]
        # concentration shrinks with the sphere
        concentration = radius * drift_norm / sigma2
        omega = exit_directions(problem.dim, concentration, mean_direction, feed, active)
        moved = y[active] + radius[:, None] * omega
        if not np.all(np.isfinite(moved)):
            raise WalkError(f"a walk reached a non-finite state after {int(steps[active].max()) + 1} steps")
        y[active] = moved
        steps[active] += 1
        distance[active] = distances_to_boundary(dom, moved)
        if paths is not None:
            for lane, point in zip(active, moved):
                paths[lane].append(point.copy())
        active = active[distance[active] >= epsilon]

    exit_points = project_points(dom, y)
    if paths is not None:
        for lane, point in enumerate(exit_points):
            paths[lane].append(point.copy())
    return WalkBatch(exit_points=exit_points, steps=steps, exhausted=exhausted, paths=paths)


def run_walk(
    problem: ProblemSpec, x: ArrayLike, cfg: WalkConfig, rng: RngStream
) -> WalkOutcome:
    y = as_point(problem.domain, x)
    batch = run_walks(problem, y[None, :], cfg, UniformFeed([rng.generator]))
    terminated = Termination.BUDGET_EXHAUSTED if batch.exhausted[0] else Termination.SHELL_REACHED
    return WalkOutcome(
        exit_point=batch.exit_points[0],
        steps=int(batch.steps[0]),
        terminated=terminated,
        path=batch.paths[0] if batch.paths is not None else None,
    )


def walk_streams(
    problem: ProblemSpec, x: ArrayLike, cfg: WalkConfig, seed: int, start: int, stop: int
) -> WalkBatch:
    """Walks start..stop-1 from x, walk i on RngStream.for_walk(seed, i), in batches.

    Batches hold at most settings.walk_batch_size walks; the split does not
    affect any walk.
    """
    point = as_point(problem.domain, x)
    parts = []
    for lo in range(start, stop, settings.walk_batch_size):
        hi = min(stop, lo + settings.walk_batch_size)
        feed = UniformFeed.from_streams([RngStream.for_walk(seed, index) for index in range(lo, hi)])
        parts.append(run_walks(problem, np.tile(point, (hi - lo, 1)), cfg, feed))
    if not parts:
        return WalkBatch(np.empty((0, problem.dim)), np.empty(0, dtype=np.int64), np.empty(0, dtype=bool))
    return WalkBatch(
        exit_points=np.concatenate([part.exit_points for part in parts]),
        steps=np.concatenate([part.steps for part in parts]),
        exhausted=np.concatenate([part.exhausted for part in parts]),
    )


def expected_steps_probe(
    problem: ProblemSpec,
    x: ArrayLike,
    cfg: WalkConfig,
    epsilons: Sequence[float],
    n_walks: int,
    seed: int,
) -> StepProbe:
    """Mean step counts per shell width, with a fit of steps against ln(1/epsilon).

    Every shell width reuses the same streams, so each walk's path is shared
    and step counts are nondecreasing as epsilon shrinks.
    """
    if not epsilons:
        raise WalkError("expected_steps_probe needs at least one shell width")
    if n_walks < 1:
        raise WalkError("expected_steps_probe needs at least one walk per shell width")

    rows = []
    for epsilon in epsilons:
        walk_cfg = cfg.model_copy(update={"epsilon": float(epsilon), "record_path": False})
        batch = walk_streams(problem, x, walk_cfg, seed, 0, n_walks)
        rows.append(
            StepProbeRow(
                epsilon=float(epsilon),
                mean_steps=math.fsum(int(s) for s in batch.steps) / n_walks,
                n_walks=n_walks,
                budget_failures=int(np.count_nonzero(batch.exhausted)),
            )
        )

    probe = StepProbe(rows=rows)
    log_inverse = np.log(1.0 / np.array([row.epsilon for row in rows]))
    if np.unique(log_inverse).size < 2:
        return probe
    means = np.array([row.mean_steps for row in rows])
    slope, intercept = np.polyfit(log_inverse, means, 1)
    fitted = slope * log_inverse + intercept
    probe.slope = float(slope)
    probe.intercept = float(intercept)
    probe.residual = float(np.sqrt(np.mean((means - fitted) ** 2)))
    return probe
