"""Parameter types of the closed-form curve families."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Union

from ..core.exceptions import InvalidSlope, ZeroSlopeParameter
from .fields import ScalarField

Number = Union[int, float, Fraction]


def check_slope(theta: float) -> float:
    theta = float(theta)
    if not 0.0 < theta < math.pi / 2:
        raise InvalidSlope(f"slope angle {theta!r} is not in (0, pi/2)")
    return theta


@dataclass(frozen=True)
class HelixParams:
    """General helix with slope angle θ over a plane curve of curvature κ."""

    theta: float
    kappa: ScalarField
    omega0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", check_slope(self.theta))

    @property
    def m(self) -> float:
        return 1.0 / math.tan(self.theta)

    @property
    def n(self) -> float:
        return math.cos(self.theta)


@dataclass(frozen=True)
class PrecessionParams:
    """Curve of constant precession; exact ω, μ keep the closure verdict exact."""

    omega: Number
    mu: Number
    alpha: float = field(init=False)

    def __post_init__(self):
        for name in ("omega", "mu"):
            v = getattr(self, name)
            if not isinstance(v, Real) or not math.isfinite(float(v)):
                raise ValueError(f"{name} must be a finite real number, got {v!r}")
        if self.mu == 0:
            raise ZeroSlopeParameter("mu must be non-zero")
        if self.omega == 0:
            raise InvalidSlope("omega must be non-zero (a zero precession radius is a straight line)")
        object.__setattr__(self, "alpha", math.hypot(float(self.omega), float(self.mu)))

    @property
    def lambda1(self) -> float:
        return (self.alpha - float(self.mu)) / self.alpha

    @property
    def lambda2(self) -> float:
        return (self.alpha + float(self.mu)) / self.alpha

    @property
    def m(self) -> float:
        """cot θ = μ/ω of the underlying slant helix."""
        return float(self.mu) / float(self.omega)
