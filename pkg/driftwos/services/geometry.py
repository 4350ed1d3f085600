"""Distance, membership and projection queries for the built-in domains.

All three shapes have a closed-form signed distance (negative inside), so
distance_to_boundary is exact and defined everywhere in R^d. Each query has
a row-wise batch form over an (n, d) array; the single-point forms call it
with one row, so both agree to the last bit.
"""

import itertools
import math
from typing import Iterable, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from driftwos.models.problem import AnnulusDomain, BallDomain, BoundaryFunction, BoxDomain

AnyDomain = Union[BallDomain, BoxDomain, AnnulusDomain]

# Closure tolerance, relative to max(1, diameter).
CLOSURE_TOL = 1e-9


class GeometryError(Exception):
    """Expected error in a geometric query or boundary evaluation."""


class DimensionMismatchError(GeometryError, ValueError):
    """Point and domain live in different dimensions."""


class OutsideClosureError(GeometryError, ValueError):
    """Point lies outside the closed domain."""


def as_point(dom: AnyDomain, x: ArrayLike) -> np.ndarray:
    point = np.asarray(x, dtype=float)
    if point.shape != (dom.dim,):
        raise DimensionMismatchError(
            f"point of shape {point.shape} used with a {dom.dim}-dimensional {dom.shape}"
        )
    if not np.all(np.isfinite(point)):
        raise GeometryError(f"point has non-finite coordinates: {point}")
    return point


def as_points(dom: AnyDomain, x: ArrayLike) -> np.ndarray:
    points = np.asarray(x, dtype=float)
    if points.ndim != 2 or points.shape[1] != dom.dim:
        raise DimensionMismatchError(
            f"points of shape {points.shape} used with a {dom.dim}-dimensional {dom.shape}"
        )
    if not np.all(np.isfinite(points)):
        raise GeometryError("points have non-finite coordinates")
    return points


def _radii(center: ArrayLike, points: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum((points - np.asarray(center)) ** 2, axis=1))


def signed_distances(dom: AnyDomain, points: ArrayLike) -> np.ndarray:
    """Signed distance of every row of an (n, d) array, negative inside D."""
    p = as_points(dom, points)
    if isinstance(dom, BallDomain):
        return _radii(dom.center, p) - dom.radius
    if isinstance(dom, BoxDomain):
        lo = np.asarray(dom.lo)
        hi = np.asarray(dom.hi)
        q = np.abs(p - 0.5 * (lo + hi)) - 0.5 * (hi - lo)
        outside = np.sqrt(np.sum(np.maximum(q, 0.0) ** 2, axis=1))
        return outside + np.minimum(np.max(q, axis=1), 0.0)
    if isinstance(dom, AnnulusDomain):
        rho = _radii(dom.center, p)
        return np.maximum(dom.inner_radius - rho, rho - dom.outer_radius)
    raise GeometryError(f"unknown domain shape: {dom!r}")


def signed_distance(dom: AnyDomain, x: ArrayLike) -> float:
    """Signed Euclidean distance to the boundary, negative inside D."""
    return float(signed_distances(dom, as_point(dom, x)[None, :])[0])


def distances_to_boundary(dom: AnyDomain, points: ArrayLike) -> np.ndarray:
    return np.abs(signed_distances(dom, points))


def distance_to_boundary(dom: AnyDomain, x: ArrayLike) -> float:
    """d(x, ∂D) for any finite x, inside or outside."""
    return abs(signed_distance(dom, x))


def contains(dom: AnyDomain, x: ArrayLike) -> bool:
    """True iff x is in the open domain; boundary points are excluded."""
    return signed_distance(dom, x) < 0.0


def diameter(dom: AnyDomain) -> float:
    if isinstance(dom, BallDomain):
        return 2.0 * dom.radius
    if isinstance(dom, AnnulusDomain):
        return 2.0 * dom.outer_radius
    return float(np.linalg.norm(np.asarray(dom.hi) - np.asarray(dom.lo)))


def closure_tolerance(dom: AnyDomain) -> float:
    return CLOSURE_TOL * max(1.0, diameter(dom))


def in_closure(dom: AnyDomain, x: ArrayLike) -> bool:
    return signed_distance(dom, x) <= closure_tolerance(dom)


def on_boundary(dom: AnyDomain, x: ArrayLike) -> bool:
    return abs(signed_distance(dom, x)) <= closure_tolerance(dom)


def _radial_projection(center: np.ndarray, radius: np.ndarray, p: np.ndarray) -> np.ndarray:
    offset = p - center
    rho = np.sqrt(np.sum(offset**2, axis=1))
    at_center = rho == 0.0
    scale = np.divide(radius, rho, out=np.zeros_like(rho), where=~at_center)
    projected = center + scale[:, None] * offset
    # every boundary point is nearest to the centre; take the first axis
    projected[at_center] = center
    projected[at_center, 0] += np.broadcast_to(radius, rho.shape)[at_center]
    return projected


def project_points(dom: AnyDomain, points: ArrayLike) -> np.ndarray:
    """Nearest point of ∂D to every row of an (n, d) array in the closure of D.

    Ties go to the first axis (ball centre) or to the lowest axis index, lower
    face first (boxes).
    """
    p = as_points(dom, points)
    outside = signed_distances(dom, p) > closure_tolerance(dom)
    if np.any(outside):
        raise OutsideClosureError(f"{p[np.argmax(outside)]} lies outside the closed {dom.shape}")

    if isinstance(dom, BallDomain):
        return _radial_projection(np.asarray(dom.center), np.asarray(dom.radius), p)

    if isinstance(dom, AnnulusDomain):
        center = np.asarray(dom.center)
        rho = _radii(center, p)
        inner = rho - dom.inner_radius <= dom.outer_radius - rho
        radius = np.where(inner, dom.inner_radius, dom.outer_radius)
        return _radial_projection(center, radius, p)

    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    clipped = np.clip(p, lo, hi)
    interior = ~(np.any(clipped == lo, axis=1) | np.any(clipped == hi, axis=1))
    if np.any(interior):
        rows = np.flatnonzero(interior)
        inside = clipped[rows]
        # interleaved (axis 1 lower, axis 1 upper, axis 2 lower, ...); argmin keeps the first
        gaps = np.stack((inside - lo, hi - inside), axis=2).reshape(rows.size, -1)
        axis, upper = np.divmod(np.argmin(gaps, axis=1), 2)
        clipped[rows, axis] = np.where(upper == 1, hi[axis], lo[axis])
    return clipped


def project_to_boundary(dom: AnyDomain, x: ArrayLike) -> np.ndarray:
    """Nearest point of ∂D to x in the closure of D (see project_points for ties)."""
    return project_points(dom, as_point(dom, x)[None, :])[0]


def sample_boundary(dom: AnyDomain, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points distributed uniformly (by surface measure) on ∂D, shape (n, d)."""
    dim = dom.dim
    if n <= 0:
        return np.empty((0, dim))

    if isinstance(dom, (BallDomain, AnnulusDomain)):
        directions = _uniform_directions(dim, n, rng)
        center = np.asarray(dom.center)
        if isinstance(dom, BallDomain):
            return center + dom.radius * directions
        inner_mass = dom.inner_radius ** (dim - 1)
        outer_mass = dom.outer_radius ** (dim - 1)
        inner = rng.random(n) < inner_mass / (inner_mass + outer_mass)
        radii = np.where(inner, dom.inner_radius, dom.outer_radius)
        return center + radii[:, None] * directions

    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    widths = hi - lo
    face_areas = np.array(
        [math.prod(np.delete(widths, axis)) for axis in range(dim)]
    )
    face_axis = rng.choice(dim, size=n, p=face_areas / face_areas.sum())
    points = lo + widths * rng.random((n, dim))
    upper = rng.random(n) < 0.5
    rows = np.arange(n)
    points[rows, face_axis] = np.where(upper, hi[face_axis], lo[face_axis])
    return points


def _uniform_directions(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.where(rng.random((n, 1)) < 0.5, -1.0, 1.0)
    gaussian = rng.standard_normal((n, dim))
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)


def boundary_landmarks(dom: AnyDomain) -> np.ndarray:
    """Axis poles of every sphere (ball, annulus) or the corners (box)."""
    dim = dom.dim
    if isinstance(dom, BoxDomain):
        return np.array(list(itertools.product(*zip(dom.lo, dom.hi))), dtype=float)
    center = np.asarray(dom.center)
    radii = (
        [dom.radius]
        if isinstance(dom, BallDomain)
        else [dom.inner_radius, dom.outer_radius]
    )
    poles = np.vstack([np.eye(dim), -np.eye(dim)])
    return np.vstack([center + radius * poles for radius in radii])


def boundary_values(f: BoundaryFunction, points: ArrayLike) -> np.ndarray:
    """f at every row of an (n, d) array, for the closed vocabulary of analytic data.

    The same expressions extend smoothly into D, so this also evaluates the
    exact interior solutions used as oracles.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2:
        raise GeometryError(f"expected an (n, d) array of points, got shape {p.shape}")
    coefficients = f.coefficients
    if f.axis is not None and f.axis > p.shape[1]:
        raise GeometryError(f"{f.kind} axis {f.axis} exceeds point dimension {p.shape[1]}")

    if f.kind == "constant":
        return np.full(p.shape[0], coefficients[0])
    if f.kind == "coordinate":
        return p[:, f.axis - 1].copy()
    if f.kind == "affine":
        return coefficients[0] + np.sum(p * np.asarray(coefficients[1:]), axis=1)
    if f.kind == "exp-drift":
        a, b_j = coefficients
        # 2 b_j / sigma^2 with sigma^2 = 2a
        return np.exp(-(b_j / a) * p[:, f.axis - 1])
    if f.kind == "exp-drift-full":
        a = coefficients[0]
        return np.exp(-np.sum(p * np.asarray(coefficients[1:]), axis=1) / a)
    if f.kind == "norm-squared":
        return np.sum(p * p, axis=1)
    if f.kind == "sum":
        total = np.zeros(p.shape[0])
        for weight, term in zip(coefficients, f.terms):
            total = total + weight * boundary_values(term, p)
        return total
    raise GeometryError(f"unknown boundary function kind: {f.kind}")


def eval_boundary(f: BoundaryFunction, p: ArrayLike) -> float:
    """f(p) at a single point."""
    point = np.asarray(p, dtype=float)
    if point.ndim != 1:
        raise GeometryError(f"expected a single point, got shape {point.shape}")
    return float(boundary_values(f, point[None, :])[0])


def boundary_range(
    f: BoundaryFunction,
    dom: AnyDomain,
    n: int,
    rng: np.random.Generator,
    extra_points: Iterable[ArrayLike] = (),
) -> Tuple[float, float]:
    """(min f, max f) over a dense boundary sample, landmarks and extra points."""
    samples = [sample_boundary(dom, n, rng), boundary_landmarks(dom)]
    extras = [np.asarray(point, dtype=float) for point in extra_points]
    if extras:
        samples.append(np.vstack(extras))
    values = boundary_values(f, np.vstack(samples))
    return float(values.min()), float(values.max())
