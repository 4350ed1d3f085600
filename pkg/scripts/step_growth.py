"""
Step Growth Diagnostic
======================
Measures the mean number of sphere jumps as the shell width shrinks and fits
mean_steps ≈ slope · ln(1/epsilon) + intercept. The fit is a diagnostic only:
the walk's correctness never depends on it.

Usage:
    python -m scripts.step_growth --dim 3 --drift 1 0 0 --walks 2000
"""

import argparse
import logging
import os
import sys
from datetime import datetime

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from driftwos.models.problem import BallDomain, BoundaryFunction, ProblemSpec  # noqa: E402
from driftwos.models.walk import StepProbe, WalkConfig  # noqa: E402
from driftwos.services.walker import WalkError, expected_steps_probe  # noqa: E402

logging.basicConfig(
    format='%(asctime)s - %(levelname)s - %(message)s',
    level=logging.INFO
)
logger = logging.getLogger(__name__)

DEFAULT_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


class StepGrowthProbe:
    """Runs the step-count probe from the centre of a unit ball."""

    def __init__(self, dim: int, a: float, drift: list, walks: int, seed: int, shrink: float):
        if len(drift) != dim:
            raise ValueError(f"drift has {len(drift)} components, expected {dim}")
        self.problem = ProblemSpec(
            a=a,
            b=tuple(drift),
            domain=BallDomain(center=(0.0,) * dim, radius=1.0),
            boundary=BoundaryFunction.constant(1.0),
        )
        self.cfg = WalkConfig(shrink_factor=shrink)
        self.walks = walks
        self.seed = seed

    def run(self) -> StepProbe:
        logger.info("=" * 60)
        logger.info("WALK STEP GROWTH PROBE")
        logger.info(f"Dimension: {self.problem.dim}, a={self.problem.a}, b={self.problem.b}")
        logger.info(f"Walks per width: {self.walks}, seed {self.seed}")
        logger.info(f"Started: {datetime.now().isoformat()}")
        logger.info("=" * 60)

        probe = expected_steps_probe(
            self.problem,
            (0.0,) * self.problem.dim,
            self.cfg,
            DEFAULT_EPSILONS,
            self.walks,
            self.seed,
        )

        for row in probe.rows:
            logger.info(
                f"epsilon={row.epsilon:8.1e}  mean steps={row.mean_steps:9.3f}  "
                f"budget failures={row.budget_failures}"
            )

        logger.info("=" * 60)
        if probe.slope is not None:
            logger.info(f"Fit: steps ≈ {probe.slope:.3f} · ln(1/eps) + {probe.intercept:.3f}")
            logger.info(f"RMS residual: {probe.residual:.4f}")
        else:
            logger.info("Fit skipped: fewer than two distinct widths")
        logger.info("=" * 60)
        return probe


def main():
    parser = argparse.ArgumentParser(description="Probe walk step growth against the shell width")
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--a", type=float, default=0.5, help="Diffusion coefficient")
    parser.add_argument("--drift", type=float, nargs="+", default=None, help="Drift vector")
    parser.add_argument("--walks", type=int, default=1000, help="Walks per shell width")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shrink", type=float, default=1.0, help="Sphere shrink factor")
    args = parser.parse_args()

    drift = args.drift if args.drift is not None else [0.0] * args.dim
    try:
        StepGrowthProbe(args.dim, args.a, drift, args.walks, args.seed, args.shrink).run()
    except (ValueError, WalkError) as e:
        logger.error(f"Probe failed: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
