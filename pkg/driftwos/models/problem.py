"""Pydantic models describing a Dirichlet problem: domain, boundary data, operator."""

import math
from typing import Annotated, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

Point = Tuple[float, ...]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class BallDomain(_Frozen):
    """Open ball B_R(c)."""

    shape: Literal["ball"] = "ball"
    center: Point = Field(min_length=1)
    radius: PositiveFloat

    @property
    def dim(self) -> int:
        return len(self.center)


class BoxDomain(_Frozen):
    """Open axis-aligned box, one (lo, hi) interval per axis."""

    shape: Literal["box"] = "box"
    lo: Point = Field(min_length=1)
    hi: Point = Field(min_length=1)

    @model_validator(mode="after")
    def check_bounds(self) -> "BoxDomain":
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have the same dimension")
        for axis, (low, high) in enumerate(zip(self.lo, self.hi), start=1):
            if not low < high:
                raise ValueError(f"box axis {axis} needs lo < hi, got {low} >= {high}")
        return self

    @property
    def dim(self) -> int:
        return len(self.lo)


class AnnulusDomain(_Frozen):
    """Open spherical shell r_inner < |x - c| < r_outer."""

    shape: Literal["annulus"] = "annulus"
    center: Point = Field(min_length=1)
    inner_radius: PositiveFloat
    outer_radius: PositiveFloat

    @model_validator(mode="after")
    def check_radii(self) -> "AnnulusDomain":
        if not self.inner_radius < self.outer_radius:
            raise ValueError("annulus needs inner_radius < outer_radius")
        return self

    @property
    def dim(self) -> int:
        return len(self.center)


Domain = Annotated[Union[BallDomain, BoxDomain, AnnulusDomain], Field(discriminator="shape")]

BoundaryKind = Literal[
    "constant",
    "coordinate",
    "affine",
    "exp-drift",
    "exp-drift-full",
    "norm-squared",
    "sum",
]


class BoundaryFunction(_Frozen):
    """Closed vocabulary of analytic boundary data.

    ``coordinate`` and ``exp-drift`` carry a 1-based ``axis``. Coefficient
    layouts: constant ``(c,)``; affine ``(c0, c1, ..., cd)`` for c0 + c·p;
    exp-drift ``(a, b_j)``; exp-drift-full ``(a, b_1, ..., b_d)``; sum uses one
    weight per entry of ``terms``.
    """

    kind: BoundaryKind
    coefficients: Tuple[float, ...] = ()
    axis: Optional[int] = Field(default=None, ge=1)
    terms: Tuple["BoundaryFunction", ...] = ()

    @model_validator(mode="after")
    def check_layout(self) -> "BoundaryFunction":
        n = len(self.coefficients)
        kind = self.kind
        if kind in ("coordinate", "exp-drift") and self.axis is None:
            raise ValueError(f"{kind} boundary data needs an axis")
        if kind not in ("coordinate", "exp-drift") and self.axis is not None:
            raise ValueError(f"{kind} boundary data takes no axis")
        if kind != "sum" and self.terms:
            raise ValueError(f"{kind} boundary data takes no terms")

        if kind == "constant" and n != 1:
            raise ValueError("constant boundary data needs exactly one coefficient")
        elif kind in ("coordinate", "norm-squared") and n != 0:
            raise ValueError(f"{kind} boundary data takes no coefficients")
        elif kind == "affine" and n < 2:
            raise ValueError("affine boundary data needs an offset and at least one slope")
        elif kind == "exp-drift" and n != 2:
            raise ValueError("exp-drift boundary data needs coefficients (a, b_j)")
        elif kind == "exp-drift-full" and n < 2:
            raise ValueError("exp-drift-full boundary data needs coefficients (a, b_1, ..., b_d)")
        elif kind == "sum":
            if not self.terms:
                raise ValueError("sum boundary data needs at least one term")
            if n != len(self.terms):
                raise ValueError("sum boundary data needs one weight per term")

        if kind in ("exp-drift", "exp-drift-full") and not self.coefficients[0] > 0:
            raise ValueError("diffusion coefficient a must be positive")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise ValueError("coefficients must be finite")
        return self

    @property
    def required_dim(self) -> Optional[int]:
        """Exact dimension the data is written for, or None if it fits any."""
        if self.kind == "affine":
            return len(self.coefficients) - 1
        if self.kind == "exp-drift-full":
            return len(self.coefficients) - 1
        dims = {term.required_dim for term in self.terms} - {None}
        if len(dims) > 1:
            raise ValueError("sum terms disagree on the dimension")
        return dims.pop() if dims else None

    @property
    def max_axis(self) -> int:
        own = self.axis or 0
        return max([own, *(term.max_axis for term in self.terms)])

    @classmethod
    def constant(cls, value: float) -> "BoundaryFunction":
        return cls(kind="constant", coefficients=(value,))

    @classmethod
    def coordinate(cls, axis: int) -> "BoundaryFunction":
        return cls(kind="coordinate", axis=axis)

    @classmethod
    def affine(cls, offset: float, slope: Point) -> "BoundaryFunction":
        return cls(kind="affine", coefficients=(offset, *slope))

    @classmethod
    def exp_drift(cls, a: float, b_j: float, axis: int) -> "BoundaryFunction":
        return cls(kind="exp-drift", coefficients=(a, b_j), axis=axis)

    @classmethod
    def exp_drift_full(cls, a: float, b: Point) -> "BoundaryFunction":
        return cls(kind="exp-drift-full", coefficients=(a, *b))

    @classmethod
    def norm_squared(cls) -> "BoundaryFunction":
        return cls(kind="norm-squared")

    @classmethod
    def combine(
        cls, weights: Tuple[float, ...], terms: Tuple["BoundaryFunction", ...]
    ) -> "BoundaryFunction":
        return cls(kind="sum", coefficients=tuple(weights), terms=tuple(terms))


class ProblemSpec(_Frozen):
    """Operator A = a∆ + b·∇ on a domain, with Dirichlet data f."""

    a: PositiveFloat = Field(description="Diffusion coefficient; sigma = sqrt(2a)")
    b: Point = Field(min_length=1, description="Drift vector, may be zero")
    domain: Domain
    boundary: BoundaryFunction

    @model_validator(mode="after")
    def check_dimensions(self) -> "ProblemSpec":
        dim = self.domain.dim
        if len(self.b) != dim:
            raise ValueError(f"drift has dimension {len(self.b)}, domain has {dim}")
        if not all(math.isfinite(component) for component in self.b):
            raise ValueError("drift must be finite")
        required = self.boundary.required_dim
        if required is not None and required != dim:
            raise ValueError(f"boundary data is written for dimension {required}, domain has {dim}")
        if self.boundary.max_axis > dim:
            raise ValueError(f"boundary data uses axis {self.boundary.max_axis} > dimension {dim}")
        return self

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def sigma2(self) -> float:
        return 2.0 * self.a

    @property
    def drift_norm(self) -> float:
        return math.sqrt(math.fsum(component * component for component in self.b))

    def with_boundary(self, boundary: BoundaryFunction) -> "ProblemSpec":
        return type(self).model_validate({**dict(self), "boundary": boundary})
