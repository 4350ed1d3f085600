"""Tests for the random streams and the exact sphere-exit samplers."""

import math

import numpy as np
import pytest
from scipy import stats

from driftwos.services.sampling import (
    ExitLaw,
    RngStream,
    SamplingError,
    UniformFeed,
    exit_directions,
    exit_log_density,
    sample_exit,
    sample_exit_batch,
    sample_uniform_sphere,
)
from driftwos.services.special_functions import log_kappa, mean_resultant_length


def _axis(dim: int) -> np.ndarray:
    mu = np.zeros(dim)
    mu[0] = 1.0
    return mu


def test_streams_depend_only_on_their_key():
    first = RngStream.for_walk(11, 3).generator.random(5)
    RngStream.for_walk(11, 2).generator.random(100)
    second = RngStream.for_walk(11, 3).generator.random(5)
    other = RngStream.for_walk(11, 4).generator.random(5)

    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


def test_stream_keys_must_fit_in_64_bits():
    with pytest.raises(SamplingError, match="64 bits"):
        RngStream.for_walk(-1, 0)
    with pytest.raises(SamplingError, match="64 bits"):
        RngStream.for_walk(0, 2**64)
    assert RngStream.for_walk(2**64 - 1, 0).index == 0


def test_family_seeds_are_distinct_and_stable():
    seeds = [RngStream.family_seed(7, k) for k in range(50)]
    assert len(set(seeds)) == 50
    assert seeds[3] == RngStream.family_seed(7, 3)


def test_exit_law_from_drift():
    law = ExitLaw.from_drift(0.5, np.array([0.0, 3.0, 4.0]), 1.25)
    assert law.concentration == pytest.approx(1.0)
    assert np.allclose(law.mean_direction, (0.0, 0.6, 0.8))

    resting = ExitLaw.from_drift(1.0, np.zeros(2), 1.0)
    assert resting.concentration == 0.0
    assert resting.mean_direction is None


def test_exit_law_validation():
    with pytest.raises(SamplingError, match="radius"):
        ExitLaw(2, 0.0, 0.0)
    with pytest.raises(SamplingError, match="mean direction"):
        ExitLaw(2, 1.0, 1.0, None)
    with pytest.raises(SamplingError, match="unit vector"):
        ExitLaw(2, 1.0, 1.0, np.array([1.0, 1.0]))
    with pytest.raises(SamplingError, match="finite"):
        ExitLaw(2, 1.0, math.inf, _axis(2))


def test_draws_are_unit_vectors_in_every_dimension():
    for dim in (1, 2, 3, 4, 6):
        for concentration in (0.0, 0.3, 5.0, 200.0):
            mu = _axis(dim) if concentration > 0 else None
            law = ExitLaw(dim, 1.0, concentration, mu)
            draws = sample_exit_batch(law, 50, RngStream.for_walk(1, dim))
            assert draws.shape == (50, dim)
            assert np.allclose(np.linalg.norm(draws, axis=1), 1.0)


def test_uniform_sphere_in_one_dimension_is_plus_or_minus_one():
    rng = RngStream.for_walk(0, 0)
    values = {float(sample_uniform_sphere(1, rng)[0]) for _ in range(100)}
    assert values == {1.0, -1.0}


def test_two_point_law_frequency():
    n = 20_000
    law = ExitLaw(1, 1.0, 0.5, np.array([1.0]))
    plus = sample_exit_batch(law, n, RngStream.for_walk(5, 0))[:, 0] > 0
    target = 0.731058578
    assert abs(plus.mean() - target) < 4 * math.sqrt(target * (1 - target) / n)


def test_two_point_law_follows_the_mean_direction():
    n = 20_000
    law = ExitLaw.from_drift(0.4, np.array([-2.0]), 1.0)
    minus = sample_exit_batch(law, n, RngStream.for_walk(6, 0))[:, 0] < 0
    target = math.exp(0.4) / (2 * math.cosh(0.4))
    assert abs(minus.mean() - target) < 4 * math.sqrt(target * (1 - target) / n)


@pytest.mark.parametrize("dim,concentration", [(2, 0.5), (2, 10.0), (3, 2.0), (5, 3.0), (7, 10.0)])
def test_mean_cosine_matches_resultant_length(dim, concentration):
    n = 8000
    law = ExitLaw(dim, 1.0, concentration, _axis(dim))
    cosines = sample_exit_batch(law, n, RngStream.for_walk(21, dim))[:, 0]
    stderr = float(np.std(cosines, ddof=1)) / math.sqrt(n)
    assert abs(float(np.mean(cosines)) - mean_resultant_length(dim, concentration)) < 4 * stderr


def test_three_dimensional_cosine_follows_the_exponential_law():
    k = 2.0
    law = ExitLaw(3, 1.0, k, _axis(3))
    cosines = sample_exit_batch(law, 5000, RngStream.for_walk(8, 0))[:, 0]

    def cdf(t):
        return (np.exp(k * t) - math.exp(-k)) / (math.exp(k) - math.exp(-k))

    assert stats.kstest(cosines, cdf).pvalue > 1e-3


def test_large_concentration_stays_finite():
    law = ExitLaw(3, 1.0, 1e4, _axis(3))
    draw = sample_exit(law, RngStream.for_walk(0, 0))
    assert np.all(np.isfinite(draw))
    assert draw[0] > 0.99


def test_exit_log_density():
    law = ExitLaw(3, 1.0, 1.5, _axis(3))
    assert exit_log_density(law, _axis(3)) == pytest.approx(log_kappa(3, 1.5) + 1.5)
    assert exit_log_density(ExitLaw(4, 1.0, 0.0), _axis(4)) == 0.0
    with pytest.raises(SamplingError, match="unit sphere"):
        exit_log_density(law, np.array([2.0, 0.0, 0.0]))


def test_feed_lanes_read_only_their_own_generator():
    streams = [RngStream.for_walk(3, index) for index in range(5)]
    feed = UniformFeed.from_streams(streams)
    feed.take(np.array([0, 1, 2, 3, 4]), 20)
    lane_two = np.concatenate([feed.take(np.array([2, 4]), 3)[0], feed.take(np.array([2]), 40)[0]])

    alone = UniformFeed([RngStream.for_walk(3, 2).generator])
    expected = alone.take(np.array([0]), 63)[0]
    assert np.array_equal(lane_two, expected[20:])
    assert np.all((lane_two > 0) & (lane_two < 1))


@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_exit_directions_do_not_depend_on_the_other_lanes(dim):
    streams = [RngStream.for_walk(9, index) for index in range(12)]
    concentration = np.linspace(0.1, 8.0, 12)
    mu = _axis(dim)
    lanes = np.arange(12)
    together = exit_directions(dim, concentration, mu, UniformFeed.from_streams(streams), lanes)

    for lane in (0, 5, 11):
        feed = UniformFeed.from_streams([RngStream.for_walk(9, lane)])
        alone = exit_directions(dim, concentration[lane : lane + 1], mu, feed, np.zeros(1, dtype=np.int64))
        assert np.array_equal(together[lane], alone[0])


def test_exit_directions_for_no_lanes():
    feed = UniformFeed.from_streams([])
    assert exit_directions(3, np.empty(0), _axis(3), feed, np.empty(0, dtype=np.int64)).shape == (0, 3)


def test_uniform_sphere_in_two_dimensions_has_uniform_angle():
    rng = RngStream.for_walk(13, 0)
    draws = np.array([sample_uniform_sphere(2, rng) for _ in range(2000)])
    angles = np.mod(np.arctan2(draws[:, 1], draws[:, 0]), 2 * np.pi) / (2 * np.pi)

    assert np.allclose(np.linalg.norm(draws, axis=1), 1.0)
    assert stats.kstest(angles, "uniform").pvalue > 1e-3


def test_planar_exit_angle_is_von_mises():
    k = 3.0
    draws = sample_exit_batch(ExitLaw(2, 1.0, k, _axis(2)), 5000, RngStream.for_walk(14, 0))
    angles = np.arctan2(draws[:, 1], draws[:, 0])

    assert stats.kstest(angles, stats.vonmises(k).cdf).pvalue > 1e-3


def test_batch_draws_have_the_right_moments():
    n = 20_000
    law = ExitLaw(4, 1.0, 2.5, _axis(4))
    draws = sample_exit_batch(law, n, RngStream.for_walk(15, 0))

    assert np.allclose(np.linalg.norm(draws, axis=1), 1.0)
    # transverse coordinates are symmetric with equal second moments
    tangent = draws[:, 1:]
    assert np.all(np.abs(tangent.mean(axis=0)) < 4 * tangent.std(axis=0) / math.sqrt(n))
    second = (tangent**2).mean(axis=0)
    assert np.ptp(second) < 0.02
    assert float(second.sum()) == pytest.approx(1.0 - float((draws[:, 0] ** 2).mean()))
