"""Tests for the independent oracles: Euler paths, quadrature and closed forms."""

import math

import numpy as np
import pytest

from driftwos.models.problem import AnnulusDomain, BallDomain, BoundaryFunction, ProblemSpec
from driftwos.models.validation import EulerConfig
from driftwos.services.sampling import ExitLaw
from driftwos.services.special_functions import bessel_i
from driftwos.services.validation import (
    NotAnOracleError,
    ValidationCheckError,
    bessel_i_series,
    check_laplace_transform,
    check_mvp,
    exact_solution,
    exit_density_mass,
    interval_exit_probability,
    simulate_ball_exits,
    sphere_rule,
)

PROBLEM_2D = ProblemSpec(
    a=0.7,
    b=(1.0, -0.5),
    domain=BallDomain(center=(0.0, 0.0), radius=1.0),
    boundary=BoundaryFunction.exp_drift_full(0.7, (1.0, -0.5)),
)

PROBLEM_3D = ProblemSpec(
    a=0.7,
    b=(1.0, -0.5, 0.25),
    domain=AnnulusDomain(center=(0.0, 0.0, 0.0), inner_radius=0.5, outer_radius=1.5),
    boundary=BoundaryFunction.exp_drift(0.7, -0.5, 2),
)


def test_interval_exit_probability():
    assert interval_exit_probability(1.0, 0.0, 0.0, 2.0, 0.5) == pytest.approx(0.25)
    assert interval_exit_probability(0.5, 0.25, -1.0, 1.0, 0.0) == pytest.approx(
        math.expm1(-0.5) / math.expm1(-1.0)
    )
    with pytest.raises(ValidationCheckError, match="not inside"):
        interval_exit_probability(1.0, 1.0, 0.0, 1.0, 1.0)


def test_simulated_exits_leave_the_ball():
    directions, times = simulate_ball_exits(0.5, (0.5, 0.0), 1.0, 200, EulerConfig(dt=1e-3, seed=3))

    assert directions.shape == (200, 2)
    assert np.allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert np.all(times > 0)
    # E[tau] for Brownian motion from the centre is r^2 / d, drift only shortens it
    assert float(np.mean(times)) < 0.75


def test_simulation_respects_the_step_budget():
    with pytest.raises(ValidationCheckError, match="still inside"):
        simulate_ball_exits(0.5, (0.0,), 1.0, 10, EulerConfig(dt=1e-6, max_steps=5))


def test_refined_config_uses_a_new_stream():
    cfg = EulerConfig(dt=1e-3, seed=4, stream=2)
    fine = cfg.refined(4)

    assert fine.dt == pytest.approx(2.5e-4)
    assert fine.stream == 3
    assert fine.seed == 4


def test_laplace_transform_in_one_dimension():
    report = check_laplace_transform(1, 1.0, 0.5, 4000, EulerConfig(dt=1e-3, seed=11))

    assert report.target == pytest.approx(1.0 / math.cosh(1.0))
    assert abs(report.z_score) < 4.0
    assert report.coarse < report.fine + 0.05


def test_laplace_transform_needs_zero_drift():
    with pytest.raises(ValidationCheckError, match="zero drift"):
        check_laplace_transform(2, 1.0, 1.0, 10, EulerConfig(dt=1e-3), b=(1.0, 0.0))


def test_sphere_rule_weights_are_normalised():
    for d in (1, 2, 3):
        directions, weights = sphere_rule(d)
        assert weights.sum() == pytest.approx(1.0)
        assert np.allclose(np.linalg.norm(directions, axis=1), 1.0)
    with pytest.raises(ValidationCheckError):
        sphere_rule(4)


@pytest.mark.parametrize(
    "problem,center,radius",
    [
        (PROBLEM_2D, (0.2, -0.1), 0.6),
        (PROBLEM_3D, (0.0, 1.0, 0.0), 0.45),
    ],
)
def test_mean_value_property_holds_for_harmonic_data(problem, center, radius):
    result = check_mvp(problem, problem.boundary, center, radius)

    assert abs(result.residual) < 1e-10
    assert result.converged


def test_mean_value_property_fails_for_norm_squared():
    problem = PROBLEM_2D.with_boundary(BoundaryFunction.norm_squared())
    result = check_mvp(problem, problem.boundary, (0.0, 0.0), 0.5)

    assert abs(result.residual) > 1e-3


def test_mean_value_sphere_must_fit_inside():
    with pytest.raises(ValidationCheckError, match="leaves the domain"):
        check_mvp(PROBLEM_2D, PROBLEM_2D.boundary, (0.5, 0.0), 0.6)


@pytest.mark.parametrize("dim,concentration", [(1, 0.8), (2, 3.0), (3, 0.1), (5, 20.0)])
def test_exit_density_integrates_to_one(dim, concentration):
    mu = np.zeros(dim)
    mu[-1] = 1.0
    mass = exit_density_mass(ExitLaw(dim, 1.0, concentration, mu))
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_series_oracle_agrees_with_bessel_i():
    for v in (0.0, 0.5, 1.5, 3.0):
        for z in (0.2, 2.0, 9.0):
            assert bessel_i_series(v, z) == pytest.approx(bessel_i(v, z), rel=1e-12)


def test_exact_solution_accepts_harmonic_data_only():
    assert exact_solution(PROBLEM_2D) == PROBLEM_2D.boundary
    assert exact_solution(PROBLEM_3D).kind == "exp-drift"

    affine = BoundaryFunction.affine(1.0, (0.5, 1.0))
    assert exact_solution(PROBLEM_2D, affine) == affine

    with pytest.raises(NotAnOracleError):
        exact_solution(PROBLEM_2D, BoundaryFunction.coordinate(1))
    with pytest.raises(NotAnOracleError):
        exact_solution(PROBLEM_2D, BoundaryFunction.norm_squared())
    with pytest.raises(NotAnOracleError):
        exact_solution(PROBLEM_2D, BoundaryFunction.exp_drift(0.7, 2.0, 1))
