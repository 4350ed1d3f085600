"""Tests for single and batched sphere walks and the step-count probe."""

import numpy as np
import pytest

from driftwos.config import settings
from driftwos.models.problem import BallDomain, BoundaryFunction, BoxDomain, ProblemSpec
from driftwos.models.walk import Termination, WalkConfig
from driftwos.services.geometry import distance_to_boundary, on_boundary
from driftwos.services.sampling import RngStream, UniformFeed
from driftwos.services.walker import (
    WalkError,
    expected_steps_probe,
    run_walk,
    run_walks,
    shell_width,
    walk_streams,
)

DISK = ProblemSpec(
    a=1.0,
    b=(1.0, -0.5),
    domain=BallDomain(center=(0.0, 0.0), radius=1.0),
    boundary=BoundaryFunction.coordinate(1),
)


def test_walk_ends_on_the_boundary():
    outcome = run_walk(DISK, (0.2, 0.1), WalkConfig(), RngStream.for_walk(0, 0))

    assert outcome.terminated is Termination.SHELL_REACHED
    assert outcome.steps >= 1
    assert on_boundary(DISK.domain, outcome.exit_point)
    assert outcome.path is None


def test_walk_is_reproducible_from_its_stream():
    cfg = WalkConfig(shrink_factor=0.7)
    first = run_walk(DISK, (0.2, 0.1), cfg, RngStream.for_walk(4, 9))
    second = run_walk(DISK, (0.2, 0.1), cfg, RngStream.for_walk(4, 9))

    assert first.steps == second.steps
    assert np.array_equal(first.exit_point, second.exit_point)


def test_walk_must_start_inside():
    with pytest.raises(WalkError, match="inside"):
        run_walk(DISK, (1.0, 0.0), WalkConfig(), RngStream.for_walk(0, 0))
    with pytest.raises(WalkError):
        run_walk(DISK, (2.0, 0.0), WalkConfig(), RngStream.for_walk(0, 0))


def test_budget_exhaustion_still_reports_a_boundary_point():
    cfg = WalkConfig(shrink_factor=0.5, epsilon=1e-8, max_steps=1)
    outcome = run_walk(DISK, (0.0, 0.0), cfg, RngStream.for_walk(0, 0))

    assert outcome.terminated is Termination.BUDGET_EXHAUSTED
    assert outcome.steps == 1
    assert on_boundary(DISK.domain, outcome.exit_point)


def test_recorded_path_starts_at_x_and_ends_at_the_exit():
    cfg = WalkConfig(shrink_factor=0.5, record_path=True)
    outcome = run_walk(DISK, (0.2, 0.1), cfg, RngStream.for_walk(2, 0))

    assert len(outcome.path) == outcome.steps + 2
    assert np.allclose(outcome.path[0], (0.2, 0.1))
    assert np.array_equal(outcome.path[-1], outcome.exit_point)
    for before, after in zip(outcome.path[:-2], outcome.path[1:-1]):
        # each jump stays inside the closed domain and spans the shrunken sphere
        assert np.linalg.norm(after) <= 1.0 + 1e-12
        step = float(np.linalg.norm(after - before))
        assert abs(step - 0.5 * distance_to_boundary(DISK.domain, before)) < 1e-12


def test_one_dimensional_walk_with_full_spheres_hits_an_endpoint():
    segment = ProblemSpec(
        a=1.0,
        b=(0.3,),
        domain=BoxDomain(lo=(0.0,), hi=(1.0,)),
        boundary=BoundaryFunction.coordinate(1),
    )
    outcome = run_walk(segment, (0.5,), WalkConfig(), RngStream.for_walk(0, 0))
    assert outcome.steps == 1
    assert outcome.exit_point[0] in (0.0, 1.0)


def test_shell_width_defaults_to_a_fraction_of_the_diameter():
    assert shell_width(DISK, WalkConfig()) == pytest.approx(2e-3)
    assert shell_width(DISK, WalkConfig(epsilon=0.05)) == 0.05


def test_step_probe_counts_grow_as_the_shell_narrows():
    problem = DISK.model_validate({**dict(DISK), "b": (0.0, 0.0)})
    probe = expected_steps_probe(
        problem, (0.3, 0.1), WalkConfig(), [1e-1, 1e-2, 1e-3, 1e-4], n_walks=200, seed=3
    )

    means = [row.mean_steps for row in probe.rows]
    assert means == sorted(means)
    assert probe.slope > 0
    assert probe.residual is not None
    assert all(row.budget_failures == 0 for row in probe.rows)


def test_step_probe_needs_widths_and_walks():
    with pytest.raises(WalkError):
        expected_steps_probe(DISK, (0.0, 0.0), WalkConfig(), [], n_walks=10, seed=0)
    with pytest.raises(WalkError):
        expected_steps_probe(DISK, (0.0, 0.0), WalkConfig(), [1e-2], n_walks=0, seed=0)


@pytest.mark.parametrize(
    "problem",
    [
        DISK,
        ProblemSpec(
            a=0.5,
            b=(0.0, 2.0, 0.0),
            domain=BallDomain(center=(0.0, 0.0, 0.0), radius=2.0),
            boundary=BoundaryFunction.coordinate(2),
        ),
        ProblemSpec(
            a=1.0,
            b=(1.0, 0.0, 0.0, 0.0, 0.5),
            domain=BallDomain(center=(1.0, 0.0, 0.0, 0.0, 0.0), radius=1.0),
            boundary=BoundaryFunction.coordinate(1),
        ),
    ],
)
def test_walk_from_the_centre_with_full_spheres_takes_one_step(problem):
    center = np.asarray(problem.domain.center)
    for index in range(20):
        outcome = run_walk(problem, center, WalkConfig(epsilon=1e-9), RngStream.for_walk(1, index))
        assert outcome.steps == 1
        assert on_boundary(problem.domain, outcome.exit_point)


def test_batched_walks_match_single_walks():
    cfg = WalkConfig(shrink_factor=0.6)
    batch = walk_streams(DISK, (0.2, 0.1), cfg, seed=8, start=3, stop=40)

    for row, index in enumerate(range(3, 40)):
        single = run_walk(DISK, (0.2, 0.1), cfg, RngStream.for_walk(8, index))
        assert batch.steps[row] == single.steps
        assert np.array_equal(batch.exit_points[row], single.exit_point)


def test_batch_size_does_not_change_any_walk(monkeypatch):
    problem = ProblemSpec(
        a=0.5,
        b=(0.0, 0.0, 3.0, 0.0),
        domain=BoxDomain(lo=(0.0,) * 4, hi=(1.0,) * 4),
        boundary=BoundaryFunction.coordinate(3),
    )
    cfg = WalkConfig(shrink_factor=0.8)
    whole = walk_streams(problem, (0.5, 0.4, 0.3, 0.6), cfg, seed=2, start=0, stop=50)

    monkeypatch.setattr(settings, "walk_batch_size", 7)
    split = walk_streams(problem, (0.5, 0.4, 0.3, 0.6), cfg, seed=2, start=0, stop=50)

    assert np.array_equal(whole.steps, split.steps)
    assert np.array_equal(whole.exit_points, split.exit_points)


def test_walk_batch_needs_one_lane_per_walk():
    feed = UniformFeed.from_streams([RngStream.for_walk(0, 0)])
    with pytest.raises(WalkError, match="lanes"):
        run_walks(DISK, np.zeros((2, 2)), WalkConfig(), feed)
