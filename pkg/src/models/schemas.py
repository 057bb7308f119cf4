"""Pydantic models for input documents, solver configuration and reports."""

import math
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator, model_validator

from ..core.config import settings
from ..core.exceptions import SpecError

# Expression string in ``s``, a constant, or uniform table values over the domain
FieldSource = Union[str, float, List[float]]
ExactNumber = Union[StrictInt, float, str]

Family = Literal["plane", "helix", "slant_helix", "salkowski", "constant_precession", "custom_development"]


def error_path(error: Dict[str, Any], prefix: str = "") -> str:
    parts = [prefix] if prefix else []
    parts.extend(str(p) for p in error.get("loc", ()))
    return ".".join(parts)


def spec_error_from(exc: ValidationError, prefix: str = "") -> SpecError:
    first = exc.errors()[0]
    return SpecError(first.get("msg", str(exc)), error_path(first, prefix))


# --- solver ---

class SolverOverrides(BaseModel):
    """Optional ``solver`` block of an input document"""
    model_config = ConfigDict(extra="forbid")

    step_count: Optional[int] = Field(default=None, ge=16)
    steps_per_unit: Optional[int] = Field(default=None, ge=1)
    renormalize_every: Optional[int] = Field(default=None, ge=1)
    tol_ortho: Optional[float] = Field(default=None, gt=0)


class SolverConfig(BaseModel):
    """Fixed-step RK4 settings; ``step_count`` wins over ``steps_per_unit``."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    step_count: Optional[int] = Field(default=None, ge=16)
    steps_per_unit: int = Field(default_factory=lambda: settings.steps_per_unit, ge=1)
    renormalize_every: int = Field(default_factory=lambda: settings.renormalize_every, ge=1)
    tol_ortho: float = Field(default_factory=lambda: settings.tol_ortho, gt=0)

    @classmethod
    def from_overrides(cls, overrides: Optional[SolverOverrides] = None, **extra) -> "SolverConfig":
        values = overrides.model_dump(exclude_none=True) if overrides else {}
        values.update({k: v for k, v in extra.items() if v is not None})
        return cls(**values)

    def steps_for(self, length: float) -> int:
        if self.step_count is not None:
            return self.step_count
        return max(settings.min_steps, math.ceil(self.steps_per_unit * length))


# --- family parameters ---

class PlaneFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kappa: FieldSource


class HelixFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    theta: float
    kappa: FieldSource
    omega0: float = 0.0


class SlantHelixFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    phi: FieldSource
    theta: Optional[float] = None
    m: Optional[float] = None
    reflected: bool = True

    @model_validator(mode="after")
    def one_slope(self):
        if (self.theta is None) == (self.m is None):
            raise ValueError("give exactly one of theta or m")
        return self

    def slope_angle(self) -> float:
        """θ = arccot m, in (0, π); only m > 0 gives an admissible slope angle."""
        if self.theta is not None:
            return self.theta
        return math.atan2(1.0, self.m)


class SalkowskiFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    m: float


class PrecessionFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    omega: ExactNumber
    mu: ExactNumber

    @field_validator("omega", "mu")
    @classmethod
    def as_number(cls, v):
        if isinstance(v, str):
            try:
                v = Fraction(v.strip())
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"{v!r} is not a number or fraction")
            return v.numerator if v.denominator == 1 else v
        return v


class CustomFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kappa: FieldSource
    tau: FieldSource


FAMILY_MODELS: Dict[str, Type[BaseModel]] = {
    "plane": PlaneFamily,
    "helix": HelixFamily,
    "slant_helix": SlantHelixFamily,
    "salkowski": SalkowskiFamily,
    "constant_precession": PrecessionFamily,
    "custom_development": CustomFamily,
}


# --- input documents ---

class _CurveDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    domain: Tuple[float, float]
    samples: int = Field(ge=16)
    initial_frame: Optional[List[float]] = None
    initial_position: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    solver: Optional[SolverOverrides] = None

    @field_validator("domain")
    @classmethod
    def increasing(cls, v):
        if not all(math.isfinite(x) for x in v) or not v[1] > v[0]:
            raise ValueError("domain must be [s_min, s_max] with s_min < s_max")
        return v

    @field_validator("initial_frame")
    @classmethod
    def nine_numbers(cls, v):
        if v is not None and len(v) != 9:
            raise ValueError("initial_frame needs 9 numbers (row-major T, N, B)")
        return v

    @field_validator("initial_position")
    @classmethod
    def three_numbers(cls, v):
        if len(v) != 3:
            raise ValueError("initial_position needs 3 numbers")
        return v

    def solver_config(self) -> SolverConfig:
        """Solver block merged over the defaults; ``samples`` fixes the step count."""
        return SolverConfig.from_overrides(self.solver, step_count=self.samples)


class CurveSpec(_CurveDocument):
    """Input of ``generate``: a named curve family and its parameters"""
    family: Family
    params: Dict[str, Any]

    def family_params(self) -> BaseModel:
        try:
            return FAMILY_MODELS[self.family].model_validate(self.params)
        except ValidationError as e:
            raise spec_error_from(e, "params")


class DevelopmentSpec(_CurveDocument):
    """Input of ``solve`` and ``classify``: raw natural equations"""
    kappa: FieldSource
    tau: FieldSource


# --- reports ---

class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float
    tolerance: float
    worst_node: Optional[int] = None
    worst_s: Optional[float] = None
    detail: str = ""


class VerificationReport(BaseModel):
    source: Optional[str] = None
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class ClosureVerdict(BaseModel):
    closed: bool
    method: Literal["exact", "numeric"]
    ratio: Optional[str] = None  # μ/α as p/q when rational
    period: Optional[float] = None


class QuadricFit(BaseModel):
    residual: float
    signature: str
    one_sheet: bool
    coefficients: List[float]
    conditioning: float


class ArcBalance(BaseModel):
    start: float
    stop: float
    signed_curvature: float
    unsigned_curvature: float
    tangent_image_length: float


class CurvatureBalance(BaseModel):
    total_curvature: float
    total_torsion: float
    arcs: List[ArcBalance]
    balanced: bool
    max_pair_mismatch: float
    tolerance: float


class Classification(BaseModel):
    family: Literal["plane", "general_helix", "slant_helix", "none"]
    theta: Optional[float] = None
    cot_theta: Optional[float] = None
    tolerance: float
    informative_nodes: int


class PeriodicityReport(BaseModel):
    period: float
    periodic: bool
    max_deviation: float
    total_torsion: float
    torsion_angle_mod_pi: float
    successor_periodic: bool
    torsion_ratio: Optional[str] = None  # total torsion / π as p/q when rational
    tolerance: float
