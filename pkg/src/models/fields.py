"""Scalar functions of arclength and Frenet developments."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.exceptions import DomainMismatch

logger = logging.getLogger(__name__)

Domain = Tuple[float, float]

# Evaluation slack at the domain ends, relative to the domain length
DOMAIN_SLACK = 1e-12


def uniform_grid(domain: Domain, steps: int) -> np.ndarray:
    """``steps`` equal intervals, ``steps + 1`` nodes, endpoints exact."""
    s_min, s_max = domain
    grid = np.linspace(s_min, s_max, steps + 1)
    grid[0], grid[-1] = s_min, s_max
    return grid


def same_domain(a: Domain, b: Domain) -> bool:
    scale = max(1.0, abs(a[0]), abs(a[1]))
    return abs(a[0] - b[0]) <= DOMAIN_SLACK * scale and abs(a[1] - b[1]) <= DOMAIN_SLACK * scale


@dataclass(frozen=True)
class ScalarField:
    """A continuous function of arclength on a closed interval.

    Either rule-backed (a pure vectorised callable, optionally with a closed-form
    derivative) or table-backed (uniform samples, linear interpolation between
    nodes). Evaluation outside the interval raises ``DomainMismatch``.
    """

    domain: Domain
    rule: Optional[Callable[[np.ndarray], np.ndarray]] = None
    values: Optional[np.ndarray] = None
    derivative: Optional["ScalarField"] = field(default=None, compare=False)

    def __post_init__(self):
        s_min, s_max = float(self.domain[0]), float(self.domain[1])
        if not s_max > s_min:
            raise DomainMismatch(f"empty domain [{s_min}, {s_max}]")
        object.__setattr__(self, "domain", (s_min, s_max))
        if (self.rule is None) == (self.values is None):
            raise ValueError("ScalarField needs exactly one of rule or values")
        if self.values is not None:
            values = np.array(self.values, dtype=float).reshape(-1)
            if values.size < 2:
                raise ValueError("a table needs at least 2 samples")
            values.flags.writeable = False
            object.__setattr__(self, "values", values)

    @classmethod
    def from_rule(cls, rule: Callable, domain: Domain, derivative: Optional[Callable] = None) -> "ScalarField":
        deriv = cls(domain=domain, rule=derivative) if derivative is not None else None
        return cls(domain=domain, rule=rule, derivative=deriv)

    @classmethod
    def constant(cls, value: float, domain: Domain) -> "ScalarField":
        value = float(value)
        return cls.from_rule(lambda s: np.full_like(np.asarray(s, dtype=float), value), domain,
                             derivative=lambda s: np.zeros_like(np.asarray(s, dtype=float)))

    @classmethod
    def from_table(cls, domain: Domain, values: np.ndarray) -> "ScalarField":
        return cls(domain=domain, values=values)

    @property
    def is_table(self) -> bool:
        return self.values is not None

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    def grid(self) -> np.ndarray:
        """Table nodes (tables only)."""
        if self.values is None:
            raise ValueError("rule-backed fields have no grid")
        return uniform_grid(self.domain, self.values.size - 1)

    def _check(self, s: np.ndarray) -> None:
        slack = DOMAIN_SLACK * max(1.0, self.length)
        if s.size and (s.min() < self.domain[0] - slack or s.max() > self.domain[1] + slack):
            raise DomainMismatch(
                f"evaluation at [{s.min():.17g}, {s.max():.17g}] outside domain {self.domain}"
            )

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        self._check(arr)
        if self.rule is not None:
            out = np.asarray(self.rule(arr), dtype=float)
            return np.broadcast_to(out, arr.shape).copy() if out.shape != arr.shape else out
        clipped = np.clip(arr, self.domain[0], self.domain[1])
        return np.interp(clipped, self.grid(), self.values)

    def sample(self, grid: np.ndarray) -> np.ndarray:
        return self(grid)

    def scaled(self, factor: float) -> "ScalarField":
        factor = float(factor)
        if self.values is not None:
            return ScalarField.from_table(self.domain, factor * self.values)
        rule = self.rule
        deriv = self.derivative
        return ScalarField(
            domain=self.domain,
            rule=lambda s: factor * rule(s),
            derivative=deriv.scaled(factor) if deriv is not None else None,
        )


@dataclass(frozen=True)
class Development:
    """A Frenet development (κ, τ): the natural equations of a curve."""

    kappa: ScalarField
    tau: ScalarField

    def __post_init__(self):
        if not same_domain(self.kappa.domain, self.tau.domain):
            raise DomainMismatch(f"kappa on {self.kappa.domain} but tau on {self.tau.domain}")

    @property
    def domain(self) -> Domain:
        return self.kappa.domain

    def sample(self, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.kappa(grid), self.tau(grid)

    def natural_grid(self, default_steps: int) -> np.ndarray:
        """The table grid when either field is a table, else a uniform grid."""
        for f in (self.kappa, self.tau):
            if f.is_table:
                return f.grid()
        return uniform_grid(self.domain, default_steps)
