"""Acceptance checks behind `driftwos validate`, grouped by selector.

Every check runs with seeds derived from settings.validation_seed, so a report
is reproducible. Sample counts are multiplied by settings.validation_scale.
"""

import logging
import math
from itertools import combinations
from typing import Callable, Dict, List

import numpy as np
from scipy import stats

from driftwos.config import settings
from driftwos.models.estimate import GridAxis, GridSpec
from driftwos.models.problem import (
    AnnulusDomain,
    BallDomain,
    BoundaryFunction,
    BoxDomain,
    ProblemSpec,
)
from driftwos.models.validation import CheckResult, EulerConfig, ValidationReport
from driftwos.models.walk import WalkConfig
from driftwos.services.estimator import (
    boundary_value_range,
    estimate_grid,
    estimate_point,
    max_principle_check,
)
from driftwos.services.geometry import distance_to_boundary, eval_boundary
from driftwos.services.sampling import ExitLaw, RngStream, sample_exit_batch
from driftwos.services.special_functions import (
    bessel_i,
    kappa,
    log_bessel_i,
    mean_resultant_length,
)
from driftwos.services.validation import (
    bessel_i_series,
    check_laplace_transform,
    check_mvp,
    exact_solution,
    exit_density_mass,
    interval_exit_probability,
    simulate_ball_exits,
)

logger = logging.getLogger(__name__)

SELECTORS = ("bessel", "sampler", "oracle", "mvp", "laplace", "end2end")


def _scaled(count: int, floor: int = 100) -> int:
    return max(floor, int(count * settings.validation_scale))


def _seed(check: int) -> int:
    return RngStream.family_seed(settings.validation_seed, check)


def _ks_critical_two_sample(n: int, m: int) -> float:
    # 1% level
    return 1.628 * math.sqrt((n + m) / (n * m))


# --- bessel -------------------------------------------------------------------


def check_bessel() -> List[CheckResult]:
    z = np.logspace(-8, math.log10(50.0), 500)
    err_d1 = max(abs(kappa(1, v) * math.cosh(v) - 1.0) for v in z)
    err_d3 = max(abs(kappa(3, v) * math.sinh(v) / v - 1.0) for v in z)

    grid = np.linspace(1e-2, 50.0, 400)
    monotone = all(
        bool(np.all(np.diff([kappa(d, v) for v in grid]) < 0)) for d in range(1, 6)
    )

    orders = (0.0, 0.5, 1.0, 1.5, 2.0)
    arguments = np.linspace(0.1, 10.0, 40)
    series_err = max(
        abs(bessel_i(v, x) / bessel_i_series(v, x) - 1.0) for v in orders for x in arguments
    )

    recurrence_err = max(
        abs((bessel_i(v - 1, x) - bessel_i(v + 1, x)) / ((2 * v / x) * bessel_i(v, x)) - 1.0)
        for v in (0.5, 1.0, 1.5, 2.0)
        for x in np.linspace(0.1, 30.0, 60)
    )

    log_err = max(
        abs(math.exp(log_bessel_i(v, x)) / bessel_i(v, x) - 1.0)
        for v in orders
        for x in np.linspace(0.01, 600.0, 80)
    )

    return [
        CheckResult(
            suite="bessel",
            name="kappa-closed-forms",
            passed=err_d1 <= 1e-12 and err_d3 <= 1e-12,
            statistics={"max_rel_err_d1": err_d1, "max_rel_err_d3": err_d3},
        ),
        CheckResult(suite="bessel", name="kappa-monotone", passed=monotone),
        CheckResult(
            suite="bessel",
            name="series-oracle",
            passed=series_err <= 1e-12,
            statistics={"max_rel_err": series_err},
        ),
        CheckResult(
            suite="bessel",
            name="recurrence",
            passed=recurrence_err <= 1e-10,
            statistics={"max_rel_err": recurrence_err},
        ),
        CheckResult(
            suite="bessel",
            name="log-consistency",
            passed=log_err <= 1e-12,
            statistics={"max_rel_err": log_err},
        ),
    ]


# --- sampler ------------------------------------------------------------------


def _law(dim: int, concentration: float) -> ExitLaw:
    mu = np.zeros(dim)
    mu[0] = 1.0
    return ExitLaw(dim, 1.0, concentration, mu if concentration > 0 else None)


def check_sampler() -> List[CheckResult]:
    results = []
    n = _scaled(100_000)

    worst_z = 0.0
    moments = {}
    for dim in (2, 3, 7):
        for concentration in (0.5, 2.0, 10.0):
            draws = sample_exit_batch(
                _law(dim, concentration), n, RngStream.for_walk(_seed(1), dim * 100 + int(concentration * 10))
            )
            cosines = draws[:, 0]
            target = mean_resultant_length(dim, concentration)
            z_score = (float(np.mean(cosines)) - target) / (float(np.std(cosines, ddof=1)) / math.sqrt(n))
            moments[f"d{dim}_k{concentration:g}"] = z_score
            worst_z = max(worst_z, abs(z_score))
    results.append(
        CheckResult(
            suite="sampler",
            name="mean-resultant-length",
            passed=worst_z < 3.0,
            statistics={"n": n, "worst_abs_z": worst_z, "z_scores": moments},
        )
    )

    mass_err = max(
        abs(exit_density_mass(_law(dim, concentration)) - 1.0)
        for dim in (2, 3, 4)
        for concentration in (0.1, 1.0, 5.0, 20.0)
    )
    results.append(
        CheckResult(
            suite="sampler",
            name="density-normalization",
            passed=mass_err <= 1e-8,
            statistics={"max_abs_err": mass_err},
        )
    )

    theta = 0.5
    plus = sample_exit_batch(_law(1, theta), n, RngStream.for_walk(_seed(2), 0))[:, 0] > 0
    target = math.exp(theta) / (math.exp(theta) + math.exp(-theta))
    stderr = math.sqrt(target * (1 - target) / n)
    two_point_z = (float(np.mean(plus)) - target) / stderr
    results.append(
        CheckResult(
            suite="sampler",
            name="two-point-law",
            passed=abs(two_point_z) < 3.0,
            statistics={"frequency": float(np.mean(plus)), "target": target, "z": two_point_z},
        )
    )

    mu = np.array([0.0, 0.0, 1.0])
    draws = sample_exit_batch(ExitLaw(3, 1.0, 2.0, mu), n, RngStream.for_walk(_seed(3), 0))
    azimuth = (np.arctan2(draws[:, 1], draws[:, 0]) / (2 * math.pi)) % 1.0
    azimuth_test = stats.kstest(azimuth, "uniform")
    results.append(
        CheckResult(
            suite="sampler",
            name="azimuth-symmetry",
            passed=bool(azimuth_test.pvalue > 0.01),
            statistics={"ks": float(azimuth_test.statistic), "pvalue": float(azimuth_test.pvalue)},
        )
    )

    first = sample_exit_batch(_law(4, 3.0), 50, RngStream.for_walk(_seed(4), 7))
    second = sample_exit_batch(_law(4, 3.0), 50, RngStream.for_walk(_seed(4), 7))
    results.append(
        CheckResult(suite="sampler", name="determinism", passed=bool(np.array_equal(first, second)))
    )
    return results


# --- oracle -------------------------------------------------------------------


def check_oracle() -> List[CheckResult]:
    a = 1.0
    b = np.array([2.0, 0.0])
    radius = 1.0
    n = _scaled(20_000)
    law = ExitLaw.from_drift(radius, b, a)
    exact = sample_exit_batch(law, n, RngStream.for_walk(_seed(5), 0))[:, 0]
    critical = _ks_critical_two_sample(n, n)

    ks_by_dt = {}
    pvalues = {}
    for level, dt in enumerate((1.6e-3, 4e-4, 1e-4)):
        directions, _ = simulate_ball_exits(
            a, b, radius, n, EulerConfig(dt=dt, seed=_seed(6), stream=level)
        )
        result = stats.ks_2samp(directions[:, 0], exact)
        ks_by_dt[f"{dt:g}"] = float(result.statistic)
        pvalues[f"{dt:g}"] = float(result.pvalue)
    statistics = list(ks_by_dt.values())
    trend_holds = all(fine <= coarse + critical for coarse, fine in zip(statistics, statistics[1:]))

    drift_1d = 0.8
    directions, _ = simulate_ball_exits(
        a, [drift_1d], radius, n, EulerConfig(dt=1e-4, seed=_seed(7))
    )
    right = float(np.mean(directions[:, 0] > 0))
    target = interval_exit_probability(a, drift_1d, -radius, radius, 0.0)
    z_score = (right - target) / math.sqrt(target * (1 - target) / n)

    return [
        CheckResult(
            suite="oracle",
            name="euler-exit-agreement",
            passed=statistics[-1] < critical and trend_holds,
            statistics={"n": n, "ks": ks_by_dt, "pvalue": pvalues, "critical": critical},
        ),
        CheckResult(
            suite="oracle",
            name="interval-scale-function",
            passed=abs(z_score) < 3.0,
            statistics={"frequency": right, "target": target, "z": z_score},
        ),
    ]


# --- mvp ----------------------------------------------------------------------


def _mvp_domains(dim: int) -> list:
    origin = (0.0,) * dim
    return [
        BallDomain(center=origin, radius=1.0),
        BoxDomain(lo=(-1.0,) * dim, hi=(1.0,) * dim),
        AnnulusDomain(center=origin, inner_radius=0.5, outer_radius=1.5),
    ]


def check_mvp_suite() -> List[CheckResult]:
    worst_harmonic = 0.0
    converged = True
    evaluated = 0
    for dim in (2, 3):
        b = (1.0, -0.5, 0.25)[:dim]
        a = 0.7
        slope = (0.5, 1.0, 0.0)[:dim]
        oracles = [
            BoundaryFunction.constant(1.7),
            BoundaryFunction.exp_drift(a, b[0], 1),
            BoundaryFunction.exp_drift_full(a, b),
            BoundaryFunction.affine(0.3, slope),
        ]
        oracles.append(BoundaryFunction.combine((0.5, -2.0), (oracles[1], oracles[3])))
        for domain in _mvp_domains(dim):
            problem = ProblemSpec(a=a, b=b, domain=domain, boundary=oracles[0])
            centers = [
                (1.0,) + (0.0,) * (dim - 1),
                (0.0, -1.0) + (0.0,) * (dim - 2),
                (0.7, 0.7) + (0.1,) * (dim - 2),
            ]
            for center in centers:
                if isinstance(domain, BallDomain) or isinstance(domain, BoxDomain):
                    center = tuple(0.4 * c for c in center)
                reach = distance_to_boundary(domain, center)
                for fraction in (0.25, 0.5, 0.9):
                    for u in oracles:
                        exact_solution(problem, u)
                        result = check_mvp(problem, u, center, fraction * reach)
                        worst_harmonic = max(worst_harmonic, abs(result.residual))
                        converged = converged and result.converged
                        evaluated += 1

    witness_problem = ProblemSpec(
        a=1.0,
        b=(0.0, 0.0),
        domain=BallDomain(center=(0.0, 0.0), radius=1.0),
        boundary=BoundaryFunction.norm_squared(),
    )
    witness = check_mvp(witness_problem, witness_problem.boundary, (0.0, 0.0), 0.5)

    return [
        CheckResult(
            suite="mvp",
            name="harmonic-residuals",
            passed=worst_harmonic <= 1e-9,
            statistics={"max_abs_residual": worst_harmonic, "evaluations": evaluated},
        ),
        CheckResult(suite="mvp", name="quadrature-converged", passed=converged),
        CheckResult(
            suite="mvp",
            name="non-harmonic-witness",
            passed=abs(witness.residual) >= 1e-3,
            statistics={"residual": witness.residual},
        ),
    ]


# --- laplace ------------------------------------------------------------------


def check_laplace() -> List[CheckResult]:
    n = _scaled(20_000)
    results = []
    for dim in (1, 2, 3):
        for lam in (0.5, 2.0):
            report = check_laplace_transform(
                dim, 1.0, lam, n, EulerConfig(dt=1e-3, seed=_seed(8), stream=10 * dim + int(2 * lam))
            )
            results.append(
                CheckResult(
                    suite="laplace",
                    name=f"laplace-d{dim}-lambda{lam:g}",
                    passed=report.passed,
                    statistics=report.model_dump(),
                )
            )
    return results


# --- end2end ------------------------------------------------------------------


def check_end2end() -> List[CheckResult]:
    results = []
    n = _scaled(100_000)

    ball = BallDomain(center=(0.0, 0.0, 0.0), radius=1.0)
    problem = ProblemSpec(
        a=1.0, b=(1.0, 0.0, 0.0), domain=ball, boundary=BoundaryFunction.exp_drift(1.0, 1.0, 1)
    )
    solution = exact_solution(problem)
    cfg = WalkConfig(epsilon=1e-3)
    errors = {}
    ok = True
    for index, x in enumerate([(0.3, 0.2, 0.0), (-0.5, 0.1, 0.2), (0.0, 0.0, -0.6)]):
        estimate = estimate_point(problem, x, cfg, n, _seed(20 + index))
        error = estimate.mean - eval_boundary(solution, x)
        errors[str(x)] = {"error": error, "stderr": estimate.stderr}
        ok = ok and abs(error) <= 3 * estimate.stderr + 5e-3
    results.append(
        CheckResult(suite="end2end", name="exp-drift-ball-3d", passed=ok, statistics=errors)
    )

    interval = ProblemSpec(
        a=1.0,
        b=(0.8,),
        domain=BoxDomain(lo=(-1.0,), hi=(1.0,)),
        boundary=BoundaryFunction.affine(0.5, (0.5,)),
    )
    estimate = estimate_point(
        interval, (0.0,), WalkConfig(shrink_factor=0.5, epsilon=1e-6), n, _seed(30)
    )
    target = interval_exit_probability(1.0, 0.8, -1.0, 1.0, 0.0)
    results.append(
        CheckResult(
            suite="end2end",
            name="interval-1d",
            passed=abs(estimate.mean - target) <= 3 * estimate.stderr,
            statistics={"mean": estimate.mean, "stderr": estimate.stderr, "target": target},
        )
    )

    disk = ProblemSpec(
        a=1.0,
        b=(1.0, 0.0),
        domain=BallDomain(center=(0.0, 0.0), radius=1.0),
        boundary=BoundaryFunction.coordinate(1),
    )
    by_shrink = {
        shrink: estimate_point(disk, (0.2, 0.3), WalkConfig(shrink_factor=shrink), n, _seed(40 + k))
        for k, shrink in enumerate((1.0, 0.5, 0.25))
    }
    invariance = all(
        abs(by_shrink[s].mean - by_shrink[t].mean)
        <= 3 * math.hypot(by_shrink[s].stderr, by_shrink[t].stderr)
        for s, t in combinations(by_shrink, 2)
    )
    results.append(
        CheckResult(
            suite="end2end",
            name="shrink-invariance",
            passed=invariance,
            statistics={f"{s:g}": [e.mean, e.stderr] for s, e in by_shrink.items()},
        )
    )

    harmonic_disk = disk.model_validate({**dict(disk), "b": (0.0, 0.0)})
    grid = GridSpec(axes=(GridAxis(lo=-1.0, hi=1.0, count=5), GridAxis(lo=-1.0, hi=1.0, count=5)))
    grid_result = estimate_grid(harmonic_disk, grid, WalkConfig(), _scaled(10_000), _seed(50))
    interpolant_ok = all(
        abs(node.estimate.mean - node.point[0]) <= 3 * node.estimate.stderr + 1e-12
        for node in grid_result.nodes
    )
    f_range = boundary_value_range(
        harmonic_disk, _seed(51), [node.point for node in grid_result.nodes if node.on_boundary]
    )
    principle = max_principle_check([node.estimate for node in grid_result.nodes], f_range)
    results.append(
        CheckResult(
            suite="end2end",
            name="grid-harmonic-interpolant",
            passed=interpolant_ok,
            statistics={"nodes": len(grid_result.nodes), "skipped": len(grid_result.skipped)},
        )
    )
    results.append(
        CheckResult(
            suite="end2end",
            name="max-principle",
            passed=principle.passed,
            statistics={"violations": len(principle.violations), "f_range": list(f_range)},
        )
    )
    return results


SUITES: Dict[str, Callable[[], List[CheckResult]]] = {
    "bessel": check_bessel,
    "sampler": check_sampler,
    "oracle": check_oracle,
    "mvp": check_mvp_suite,
    "laplace": check_laplace,
    "end2end": check_end2end,
}


class UnknownSelectorError(ValueError):
    """Validation selector outside the known suites."""


def run_suite(selector: str) -> ValidationReport:
    if selector == "all":
        names = list(SELECTORS)
    elif selector in SUITES:
        names = [selector]
    else:
        raise UnknownSelectorError(
            f"unknown selector '{selector}'; choose one of {', '.join(SELECTORS + ('all',))}"
        )

    checks: List[CheckResult] = []
    for name in names:
        logger.info(f"--- running {name} checks ---")
        for check in SUITES[name]():
            level = logging.INFO if check.passed else logging.WARNING
            logger.log(level, f"[{'PASS' if check.passed else 'FAIL'}] {check.suite}/{check.name}")
            checks.append(check)
    return ValidationReport(
        selector=selector,
        passed=all(check.passed for check in checks),
        checks=checks,
    )
