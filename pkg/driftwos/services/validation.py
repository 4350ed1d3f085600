"""Independent numerical oracles for the solver.

None of these reuse the walk: the Euler-Maruyama paths simulate X directly,
the mean value check integrates over the sphere by deterministic quadrature,
and the closed forms come from the scale function and the exponential
A-harmonic functions.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from driftwos.models.problem import BoundaryFunction, ProblemSpec
from driftwos.models.validation import EulerConfig, LaplaceReport, MvpResult
from driftwos.services.geometry import as_point, boundary_values, distance_to_boundary, eval_boundary
from driftwos.services.sampling import ExitLaw, RngStream, exit_log_density
from driftwos.services.special_functions import kappa, log_kappa

logger = logging.getLogger(__name__)

CIRCLE_NODES = 2048
POLAR_NODES = 64
AZIMUTH_NODES = 128
CONVERGENCE_TOL = 1e-12


class ValidationCheckError(Exception):
    """Expected error in a validation oracle."""


class NotAnOracleError(ValidationCheckError):
    """Boundary data has no closed-form A-harmonic extension."""


# --- Euler-Maruyama simulation of X ---------------------------------------


def simulate_ball_exits(
    a: float, b: ArrayLike, r: float, n: int, cfg: EulerConfig
) -> Tuple[np.ndarray, np.ndarray]:
    """Exit directions (n, d) and exit times (n,) of X from B_r(0), started at 0.

    All n paths advance together; a path freezes at its first sample with
    |X| >= r.
    """
    drift = np.atleast_1d(np.asarray(b, dtype=float))
    dim = drift.size
    if not r > 0:
        raise ValidationCheckError(f"radius must be positive, got {r}")
    if not a > 0:
        raise ValidationCheckError(f"diffusion coefficient must be positive, got {a}")
    sigma2 = 2.0 * a
    if cfg.dt > 1e-3 * r * r / sigma2:
        logger.warning(f"time step {cfg.dt:g} is coarse for r={r:g}, sigma^2={sigma2:g}")

    generator = RngStream.for_walk(cfg.seed, cfg.stream).generator
    increment = drift * cfg.dt
    noise_scale = math.sqrt(sigma2 * cfg.dt)

    positions = np.zeros((n, dim))
    times = np.zeros(n)
    active = np.arange(n)
    step = 0
    while active.size:
        if step >= cfg.max_steps:
            raise ValidationCheckError(
                f"{active.size} paths still inside after {cfg.max_steps} steps"
            )
        step += 1
        moved = positions[active] + increment + noise_scale * generator.standard_normal(
            (active.size, dim)
        )
        positions[active] = moved
        left = np.linalg.norm(moved, axis=1) >= r
        times[active[left]] = step * cfg.dt
        active = active[~left]

    directions = positions / np.linalg.norm(positions, axis=1, keepdims=True)
    return directions, times


def simulate_ball_exit(
    a: float, b: ArrayLike, r: float, cfg: EulerConfig
) -> Tuple[np.ndarray, float]:
    directions, times = simulate_ball_exits(a, b, r, 1, cfg)
    return directions[0], float(times[0])


def interval_exit_probability(a: float, b: float, lo: float, hi: float, x: float) -> float:
    """P(X leaves (lo, hi) through hi), from the scale function of X in d = 1."""
    if not lo < x < hi:
        raise ValidationCheckError(f"start {x} is not inside ({lo}, {hi})")
    rate = b / a
    if rate == 0.0:
        return (x - lo) / (hi - lo)
    return math.expm1(-rate * (x - lo)) / math.expm1(-rate * (hi - lo))


def check_laplace_transform(
    d: int,
    r: float,
    lam: float,
    n_sims: int,
    cfg: EulerConfig,
    b: Optional[Sequence[float]] = None,
) -> LaplaceReport:
    """E[exp(-lam tau_r)] for standard Brownian motion against kappa(d, r sqrt(2 lam)).

    Runs at dt and dt/4; the discrete-monitoring bias is O(sqrt(dt)), so the
    Richardson combination is 2 E(dt/4) - E(dt).
    """
    if b is not None and any(component != 0.0 for component in b):
        raise ValidationCheckError("the Laplace transform identity holds for zero drift only")
    if not lam > 0:
        raise ValidationCheckError(f"lambda must be positive, got {lam}")

    zero = np.zeros(d)
    fine_cfg = cfg.refined(4)
    _, coarse_times = simulate_ball_exits(0.5, zero, r, n_sims, cfg)
    _, fine_times = simulate_ball_exits(0.5, zero, r, n_sims, fine_cfg)
    coarse_values = np.exp(-lam * coarse_times)
    fine_values = np.exp(-lam * fine_times)

    coarse = float(np.mean(coarse_values))
    fine = float(np.mean(fine_values))
    extrapolated = 2.0 * fine - coarse
    stderr = math.sqrt(
        (4.0 * float(np.var(fine_values, ddof=1)) + float(np.var(coarse_values, ddof=1)))
        / n_sims
    )
    target = kappa(d, r * math.sqrt(2.0 * lam))
    if stderr > 0:
        z_score = (extrapolated - target) / stderr
    else:
        z_score = 0.0 if extrapolated == target else math.inf
    return LaplaceReport(
        dim=d,
        radius=r,
        lam=lam,
        target=target,
        coarse=coarse,
        fine=fine,
        extrapolated=extrapolated,
        stderr=stderr,
        z_score=z_score,
        passed=abs(z_score) < 3.0,
    )


# --- Quadrature over spheres --------------------------------------------------


def sphere_rule(d: int, scale: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Unit directions and weights summing to 1 for averaging over S^{d-1}.

    d = 2: trapezoid in the angle. d = 3: Gauss-Legendre in the polar cosine
    times trapezoid in the azimuth.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if d == 2:
        count = CIRCLE_NODES * scale
        angles = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack((np.cos(angles), np.sin(angles))), np.full(count, 1.0 / count)
    if d == 3:
        cosines, polar_weights = np.polynomial.legendre.leggauss(POLAR_NODES * scale)
        azimuth_count = AZIMUTH_NODES * scale
        azimuths = 2.0 * np.pi * np.arange(azimuth_count) / azimuth_count
        t, phi = np.meshgrid(cosines, azimuths, indexing="ij")
        s = np.sqrt(1.0 - t * t)
        directions = np.column_stack(
            (s.ravel() * np.cos(phi.ravel()), s.ravel() * np.sin(phi.ravel()), t.ravel())
        )
        weights = np.repeat(polar_weights / 2.0, azimuth_count) / azimuth_count
        return directions, weights
    raise ValidationCheckError(f"sphere quadrature is implemented for d <= 3, got {d}")


def _drifted_average(
    problem: ProblemSpec, u: BoundaryFunction, center: np.ndarray, r: float, scale: int
) -> float:
    directions, weights = sphere_rule(problem.dim, scale)
    drift = np.asarray(problem.b, dtype=float)
    log_weights = log_kappa(problem.dim, r * problem.drift_norm / problem.sigma2) + (
        r * (directions @ drift) / problem.sigma2
    )
    values = boundary_values(u, center + r * directions)
    return math.fsum(weights * np.exp(log_weights) * values)


def check_mvp(problem: ProblemSpec, u: BoundaryFunction, x: ArrayLike, r: float) -> MvpResult:
    """kappa(r|b|/sigma^2) times the sphere integral of u(y) exp(b·(y-x)/sigma^2), minus u(x).

    Zero (to quadrature precision) exactly when u is A-harmonic near x.
    """
    center = as_point(problem.domain, x)
    if not 0 < r < distance_to_boundary(problem.domain, center):
        raise ValidationCheckError(f"sphere of radius {r} around {tuple(center)} leaves the domain")

    average = _drifted_average(problem, u, center, r, 1)
    refined = _drifted_average(problem, u, center, r, 2)
    center_value = eval_boundary(u, center)
    return MvpResult(
        residual=average - center_value,
        average=average,
        center_value=center_value,
        converged=abs(refined - average) < CONVERGENCE_TOL * max(1.0, abs(average)),
    )


def _orthogonal_unit(mu: np.ndarray) -> np.ndarray:
    axis = np.zeros(mu.size)
    axis[int(np.argmin(np.abs(mu)))] = 1.0
    tangent = axis - np.dot(axis, mu) * mu
    return tangent / np.linalg.norm(tangent)


def exit_density_mass(law: ExitLaw, nodes: int = 96) -> float:
    """Integral of exp(exit_log_density) over the unit sphere (should be 1).

    Gauss-Jacobi in t = mu·omega with weight (1 - t^2)^{(d-3)/2}, the
    polar-cosine marginal of uniform measure.
    """
    d = law.dim
    mu = law.mean_direction
    if mu is None:
        mu = np.zeros(d)
        mu[0] = 1.0
    if d == 1:
        return 0.5 * sum(math.exp(exit_log_density(law, s * mu)) for s in (1.0, -1.0))

    beta = 0.5 * (d - 3)
    cosines, weights = special.roots_jacobi(nodes, beta, beta)
    normalizer = math.exp(
        special.gammaln(0.5 * d) - 0.5 * math.log(math.pi) - special.gammaln(0.5 * (d - 1))
    )
    tangent = _orthogonal_unit(mu)
    densities = [
        math.exp(exit_log_density(law, t * mu + math.sqrt(max(0.0, 1.0 - t * t)) * tangent))
        for t in cosines
    ]
    return normalizer * math.fsum(weights * np.array(densities))


# --- Closed-form oracles --------------------------------------------------------


def bessel_i_series(v: float, z: float, terms: int = 60) -> float:
    """Truncated ascending series sum_k (z/2)^{2k+v} / (k! Gamma(k+v+1))."""
    half = 0.5 * z
    term = half**v / float(special.gamma(v + 1.0))
    total = [term]
    for k in range(terms - 1):
        term *= half * half / ((k + 1) * (k + 1 + v))
        total.append(term)
    return math.fsum(total)


def _is_harmonic(problem: ProblemSpec, f: BoundaryFunction) -> bool:
    b = np.asarray(problem.b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))))
    if f.kind == "constant":
        return True
    if f.kind == "coordinate":
        return b[f.axis - 1] == 0.0
    if f.kind == "affine":
        return abs(float(np.dot(b, f.coefficients[1:]))) <= 1e-12 * scale
    if f.kind == "exp-drift":
        a, b_j = f.coefficients
        return math.isclose(a, problem.a, rel_tol=1e-12) and math.isclose(
            b_j, b[f.axis - 1], rel_tol=1e-12, abs_tol=1e-15
        )
    if f.kind == "exp-drift-full":
        return math.isclose(f.coefficients[0], problem.a, rel_tol=1e-12) and bool(
            np.allclose(f.coefficients[1:], b, rtol=1e-12, atol=1e-15)
        )
    if f.kind == "sum":
        return all(_is_harmonic(problem, term) for term in f.terms)
    return False


def exact_solution(
    problem: ProblemSpec, f: Optional[BoundaryFunction] = None
) -> BoundaryFunction:
    """The A-harmonic function on the closed domain whose boundary values are f.

    Every oracle expression is analytic on R^d, so the same expression is the
    unique continuous solution in D.
    """
    data = f or problem.boundary
    if not _is_harmonic(problem, data):
        raise NotAnOracleError(
            f"{data.kind} boundary data has no closed-form solution for a={problem.a}, b={problem.b}"
        )
    return data
