"""Exact sampling of the sphere-exit law of the drifted process X_t = x + bt + sigma W_t.

Started at the centre of a ball of radius r, X leaves it at x + r·omega where
omega is von Mises-Fisher on the unit sphere: density
kappa(k)·exp(k·(mu·omega)) against uniform measure, with concentration
k = r|b|/sigma^2 and mean direction mu = b/|b|.

Every sampler works on a batch of lanes at once and turns uniforms from a
UniformFeed into directions by inverse transforms (normal quantiles, the
beta quantile inside Wood's rejection step, the closed-form inverse CDF in
d = 3). A lane consumes only its own uniforms, so what it draws never
depends on the other lanes of the batch.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

from driftwos.config import settings
from driftwos.services.special_functions import log_kappa

UNIT_TOL = 1e-9

# random() returns multiples of 2**-53 in [0, 1); zero is mapped below the
# smallest positive value so quantile functions never see an endpoint.
_OPEN_FLOOR = 2.0**-54

# Uniforms drawn per lane refill; part of the stream layout, so results depend on it.
FEED_BLOCK = 32


class SamplingError(Exception):
    """Expected failure in an exit-law sampler."""


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (master seed, stream index).

    The Philox key is the pair (index, seed) and the counter starts at zero,
    so a stream depends only on its key and never on which other streams were
    drawn before it or on which process draws it.
    """

    seed: int
    index: int
    generator: np.random.Generator = field(repr=False, compare=False)

    @classmethod
    def for_walk(cls, seed: int, index: int) -> "RngStream":
        if not (0 <= seed < 2**64 and 0 <= index < 2**64):
            raise SamplingError(f"seed and stream index must fit in 64 bits, got ({seed}, {index})")
        key = np.array([index, seed], dtype=np.uint64)
        return cls(seed, index, np.random.Generator(np.random.Philox(key=key)))

    @staticmethod
    def family_seed(seed: int, family: int) -> int:
        """Master seed of stream family ``family`` (e.g. a grid node) under ``seed``."""
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=(family,))
        return int(sequence.generate_state(1, dtype=np.uint64)[0])


class UniformFeed:
    """Uniforms on (0, 1) for a batch of lanes, buffered block-wise per lane.

    With one generator per lane, lane j reads only generator j, in blocks of
    ``block`` values, so its sequence is fixed by that generator alone. A
    shared feed serves every lane from one generator, refilling stale lanes
    in ascending lane order.
    """

    def __init__(self, generators: Sequence[np.random.Generator], block: int = FEED_BLOCK):
        self.generators = list(generators)
        self.block = block
        self._shared: Optional[np.random.Generator] = None
        self.buffer = np.empty((len(self.generators), self.block))
        self.cursor = np.full(len(self.generators), self.block, dtype=np.int64)

    @classmethod
    def from_streams(cls, streams: Sequence[RngStream]) -> "UniformFeed":
        return cls([stream.generator for stream in streams])

    @classmethod
    def shared(cls, generator: np.random.Generator, lanes: int) -> "UniformFeed":
        feed = cls([generator] * lanes)
        feed._shared = generator
        return feed

    @property
    def lanes(self) -> int:
        return len(self.generators)

    def _refill(self, lanes: np.ndarray) -> None:
        if self._shared is not None:
            fresh = self._shared.random((lanes.size, self.block))
        else:
            fresh = np.empty((lanes.size, self.block))
            for row, lane in enumerate(lanes):
                fresh[row] = self.generators[lane].random(self.block)
        self.buffer[lanes] = np.maximum(fresh, _OPEN_FLOOR)
        self.cursor[lanes] = 0

    def take(self, lanes: np.ndarray, count: int = 1) -> np.ndarray:
        """``count`` fresh uniforms for each of ``lanes`` (distinct), shape (len(lanes), count)."""
        out = np.empty((lanes.size, count))
        for column in range(count):
            cursor = self.cursor[lanes]
            stale = cursor >= self.block
            if np.any(stale):
                self._refill(lanes[stale])
                cursor = self.cursor[lanes]
            out[:, column] = self.buffer[lanes, cursor]
            self.cursor[lanes] = cursor + 1
        return out


@dataclass(frozen=True, eq=False)
class ExitLaw:
    """Exit-direction law of X from a ball of radius ``radius``."""

    dim: int
    radius: float
    concentration: float
    mean_direction: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise SamplingError(f"dimension must be >= 1, got {self.dim}")
        if not self.radius > 0:
            raise SamplingError(f"radius must be positive, got {self.radius}")
        if not (math.isfinite(self.concentration) and self.concentration >= 0):
            raise SamplingError(f"concentration must be finite and >= 0, got {self.concentration}")
        if self.concentration > 0:
            if self.mean_direction is None or self.mean_direction.shape != (self.dim,):
                raise SamplingError("a positive concentration needs a mean direction of matching dimension")
            if abs(float(np.linalg.norm(self.mean_direction)) - 1.0) > UNIT_TOL:
                raise SamplingError("mean direction must be a unit vector")

    @classmethod
    def from_drift(cls, radius: float, b: np.ndarray, a: float) -> "ExitLaw":
        drift = np.asarray(b, dtype=float)
        norm = float(np.linalg.norm(drift))
        if norm == 0.0:
            return cls(drift.size, radius, 0.0, None)
        return cls(drift.size, radius, radius * norm / (2.0 * a), drift / norm)


def _normalise(rows: np.ndarray) -> np.ndarray:
    return rows / np.sqrt(np.sum(rows * rows, axis=1))[:, None]


def uniform_directions(dim: int, feed: UniformFeed, lanes: np.ndarray) -> np.ndarray:
    """Uniform directions on S^{d-1} for ``lanes``; in d = 1 this is ±1 with probability 1/2."""
    if dim == 1:
        return np.where(feed.take(lanes)[:, :1] < 0.5, 1.0, -1.0)
    return _normalise(special.ndtri(feed.take(lanes, dim)))


def _tangent_directions(mu: np.ndarray, feed: UniformFeed, lanes: np.ndarray) -> np.ndarray:
    gaussian = special.ndtri(feed.take(lanes, mu.size))
    tangent = gaussian - np.sum(gaussian * mu, axis=1)[:, None] * mu
    return _normalise(tangent)


def _cosines_3d(concentration: np.ndarray, feed: UniformFeed, lanes: np.ndarray) -> np.ndarray:
    # inverse CDF of t on [-1, 1] with density proportional to exp(k t)
    u = feed.take(lanes)[:, 0]
    t = 1.0 + np.log1p((1.0 - u) * np.expm1(-2.0 * concentration)) / concentration
    return np.clip(t, -1.0, 1.0)


def _cosines_wood(
    dim: int, concentration: np.ndarray, feed: UniformFeed, lanes: np.ndarray
) -> np.ndarray:
    """t = mu·omega by Wood's envelope rejection, density ∝ (1 - t^2)^{(d-3)/2} e^{k t}.

    The beta(m/2, m/2) proposal is the beta quantile of one uniform, and each
    lane keeps proposing from its own uniforms until it accepts.
    """
    m = dim - 1
    b = m / (2.0 * concentration + np.sqrt(4.0 * concentration**2 + m * m))
    x0 = (1.0 - b) / (1.0 + b)
    # 1 - x0^2 = 4b / (1 + b)^2 without cancellation
    c = concentration * x0 + m * (np.log(4.0 * b) - 2.0 * np.log1p(b))

    cosines = np.empty(lanes.size)
    pending = np.arange(lanes.size)
    for _ in range(settings.rejection_limit):
        u = feed.take(lanes[pending], 2)
        k, bp, x0p, cp = concentration[pending], b[pending], x0[pending], c[pending]
        z = special.betaincinv(0.5 * m, 0.5 * m, u[:, 0])
        w = (1.0 - (1.0 + bp) * z) / (1.0 - (1.0 - bp) * z)
        accept = k * w + m * np.log1p(-x0p * w) - cp >= np.log(u[:, 1])
        cosines[pending[accept]] = w[accept]
        pending = pending[~accept]
        if pending.size == 0:
            return cosines
    raise SamplingError(
        f"rejection sampler exceeded {settings.rejection_limit} proposals "
        f"(d={dim}, {pending.size} lanes pending)"
    )


def exit_directions(
    dim: int,
    concentration: np.ndarray,
    mean_direction: Optional[np.ndarray],
    feed: UniformFeed,
    lanes: np.ndarray,
) -> np.ndarray:
    """One exit direction per lane, shape (len(lanes), dim).

    ``concentration`` holds each lane's k; a missing mean direction means
    zero drift and uniform directions.
    """
    if lanes.size == 0:
        return np.empty((0, dim))
    if mean_direction is None:
        return uniform_directions(dim, feed, lanes)

    mu = mean_direction
    k = np.asarray(concentration, dtype=float)
    if dim == 1:
        # P(omega = +mu) = e^k / (e^k + e^-k)
        plus = feed.take(lanes)[:, 0] < 1.0 / (1.0 + np.exp(-2.0 * k))
        return np.where(plus, 1.0, -1.0)[:, None] * mu

    if dim == 3:
        t = _cosines_3d(k, feed, lanes)
    else:
        t = _cosines_wood(dim, k, feed, lanes)
    sine = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    return t[:, None] * mu + sine[:, None] * _tangent_directions(mu, feed, lanes)


def _law_arguments(law: ExitLaw, n: int):
    if law.concentration == 0.0:
        return np.zeros(n), None
    return np.full(n, law.concentration), law.mean_direction


def sample_uniform_sphere(d: int, rng: RngStream) -> np.ndarray:
    """Uniform direction on S^{d-1}; in d = 1 this is ±1 with probability 1/2."""
    feed = UniformFeed([rng.generator])
    return uniform_directions(d, feed, np.zeros(1, dtype=np.int64))[0]


def sample_exit(law: ExitLaw, rng: RngStream) -> np.ndarray:
    """One exact draw of the exit direction omega (a unit vector)."""
    concentration, mu = _law_arguments(law, 1)
    feed = UniformFeed([rng.generator])
    return exit_directions(law.dim, concentration, mu, feed, np.zeros(1, dtype=np.int64))[0]


def sample_exit_batch(law: ExitLaw, n: int, rng: RngStream) -> np.ndarray:
    """n independent exit directions from one stream, shape (n, d)."""
    n = max(n, 0)
    concentration, mu = _law_arguments(law, n)
    feed = UniformFeed.shared(rng.generator, n)
    return exit_directions(law.dim, concentration, mu, feed, np.arange(n))


def exit_log_density(law: ExitLaw, omega: np.ndarray) -> float:
    """log of the exit density at omega relative to uniform surface measure."""
    direction = np.asarray(omega, dtype=float)
    if direction.shape != (law.dim,):
        raise SamplingError(f"direction of shape {direction.shape} for a {law.dim}-dimensional law")
    if abs(float(np.linalg.norm(direction)) - 1.0) > UNIT_TOL:
        raise SamplingError("exit density is only defined on the unit sphere")
    if law.concentration == 0.0:
        return 0.0
    cosine = float(np.dot(law.mean_direction, direction))
    return log_kappa(law.dim, law.concentration) + law.concentration * cosine
