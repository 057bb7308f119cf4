import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple, Union

import numpy as np

from ..core.config import settings
from ..core.exceptions import DomainMismatch, WrongApparatusKind
from ..models.apparatus import BishopApparatus, FrameField, FrenetApparatus
from ..models.fields import Development, ScalarField, same_domain, uniform_grid
from ..models.geometry import Frame, Vec3
from ..utils.quadrature import cumulative, simpson

logger = logging.getLogger(__name__)

Variant = Literal["a", "b", "c", "d", "e"]
Apparatus = Union[FrenetApparatus, BishopApparatus]

# Sign/permutation tables: new rows = signs * old rows[perm]
_REARRANGEMENTS = {
    "a": ((0, 1, 2), (1.0, -1.0, -1.0)),
    "b": ((0, 1, 2), (-1.0, -1.0, 1.0)),
    "c": ((2, 1, 0), (1.0, -1.0, 1.0)),
    "d": ((1, 0, 2), (1.0, -1.0, 1.0)),
    "e": ((1, 0, 2), (-1.0, 1.0, 1.0)),
}


@dataclass(frozen=True)
class Equivalence:
    """Outcome of a development comparison; ``witness`` is the rotation angle φ."""

    equivalent: bool
    witness: Optional[ScalarField] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.equivalent


class FrenetService:
    def __init__(self, eps_kappa: float = None, analysis_steps: int = None):
        """Initialize the service with optional overrides of the global thresholds"""
        self.eps_kappa = settings.eps_kappa if eps_kappa is None else eps_kappa
        self.analysis_steps = analysis_steps or settings.analysis_steps

    # --- pointwise identities ---

    def frenet_rhs(self, frame: Frame, kappa: float, tau: float) -> Tuple[Vec3, Vec3, Vec3]:
        """(T′, N′, B′) = (κN, −κT + τB, −τN)."""
        T, N, B = frame.e1, frame.e2, frame.e3
        return kappa * N, -kappa * T + tau * B, -tau * N

    def darboux_vector(self, frame: Frame, kappa: float, tau: float) -> Vec3:
        return tau * frame.e1 + kappa * frame.e3

    def lancret_curvature(self, kappa, tau):
        return np.hypot(kappa, tau)

    # --- rearrangements ---

    def rearrange(self, app: Apparatus, variant: Variant) -> Apparatus:
        """Equivalent systems obtained by permuting and reflecting the frame.

        a: (T, −N, −B; −κ, τ)    b: (−T, −N, B; κ, −τ)    c: (B, −N, T; τ, κ)
        d: Frenet → Bishop (N, −T, B; k₁=κ, k₂=τ)
        e: Bishop → Frenet (−N₁, T, N₂; κ=k₁, τ=k₂)
        """
        if variant not in _REARRANGEMENTS:
            raise ValueError(f"unknown rearrangement {variant!r}")
        wants_bishop = variant == "e"
        if wants_bishop != isinstance(app, BishopApparatus):
            expected = "BishopApparatus" if wants_bishop else "FrenetApparatus"
            raise WrongApparatusKind(f"variant {variant} needs a {expected}, got {type(app).__name__}")

        perm, signs = _REARRANGEMENTS[variant]
        frames = app.frames.frames[:, perm, :] * np.asarray(signs)[None, :, None]
        field = FrameField(app.frames.s, frames)

        if variant == "a":
            return FrenetApparatus(field, app.kappa.scaled(-1.0), app.tau)
        if variant == "b":
            return FrenetApparatus(field, app.kappa, app.tau.scaled(-1.0))
        if variant == "c":
            return FrenetApparatus(field, app.tau, app.kappa)
        if variant == "d":
            return BishopApparatus(field, app.kappa, app.tau)
        return FrenetApparatus(field, app.k1, app.k2)

    # --- development-level invariants ---

    def total_torsion(self, tau: ScalarField, a: float = None, b: float = None) -> float:
        """∫ₐᵇ τ ds by composite Simpson (on the table grid when it covers [a, b])."""
        s_min, s_max = tau.domain
        a = s_min if a is None else float(a)
        b = s_max if b is None else float(b)
        slack = 1e-12 * max(1.0, tau.length)
        if a < s_min - slack or b > s_max + slack or b < a:
            raise DomainMismatch(f"[{a}, {b}] is not inside the domain {tau.domain}")
        if b == a:
            return 0.0
        if tau.is_table and same_domain((a, b), tau.domain):
            grid = tau.grid()
        else:
            grid = uniform_grid((a, b), self._even_steps((b - a) / tau.length))
        return simpson(tau(grid), float(grid[1] - grid[0]))

    def _even_steps(self, fraction: float = 1.0) -> int:
        steps = max(settings.min_steps, int(np.ceil(self.analysis_steps * fraction)))
        return steps + steps % 2

    def comparison_grid(self, *devs: Development) -> np.ndarray:
        for dev in devs:
            for f in (dev.kappa, dev.tau):
                if f.is_table:
                    return f.grid()
        return uniform_grid(devs[0].domain, self._even_steps())

    def developments_equivalent(self, d1: Development, d2: Development, tol: float = 1e-7) -> Equivalence:
        """Search for φ with κ cos φ = κ̄, κ sin φ = 0 and φ′ = τ − τ̄.

        Wherever either curvature is non-zero φ is forced to 0 or π; across
        stretches where both vanish φ is integrated from φ′ = τ − τ̄ and must
        land on the next forced value modulo 2π. Only one witness is returned
        although φ is free on such stretches.
        """
        if not same_domain(d1.domain, d2.domain):
            raise DomainMismatch(f"developments on {d1.domain} and {d2.domain}")

        grid = self.comparison_grid(d1, d2)
        h = float(grid[1] - grid[0])
        k, t = d1.sample(grid)
        kb, tb = d2.sample(grid)
        scale = max(1.0, *(float(np.abs(v).max()) for v in (k, t, kb, tb)))
        atol = tol * scale
        dphi = t - tb

        forced = (np.abs(k) > self.eps_kappa) | (np.abs(kb) > self.eps_kappa)
        same = np.abs(kb - k) <= atol
        flipped = np.abs(kb + k) <= atol

        bad = forced & ~(same | flipped)
        if bad.any():
            i = int(np.argmax(bad))
            return Equivalence(False, reason=f"curvatures differ beyond sign at s={grid[i]:.6g}")
        bad = forced & (np.abs(dphi) > atol)
        if bad.any():
            i = int(np.argmax(bad))
            return Equivalence(False, reason=f"torsions differ at s={grid[i]:.6g} where curvature is non-zero")

        if not forced.any():
            logger.debug("both developments vanish identically; any φ with φ′ = τ − τ̄ is a witness")
            return Equivalence(True, ScalarField.from_table(d1.domain, cumulative(dphi, h)))

        # contiguous runs of forced nodes, as [start, stop) pairs
        edges = np.diff(np.concatenate(([0], forced.astype(np.int8), [0])))
        runs = list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))

        phi = np.empty(grid.size)
        current = None
        for start, stop in runs:
            options = []
            if same[start:stop].all():
                options.append(0.0)
            if flipped[start:stop].all():
                options.append(np.pi)
            if not options:
                return Equivalence(False, reason=f"curvature sign flips inside [{grid[start]:.6g}, {grid[stop - 1]:.6g}]")

            if current is None:
                value = options[0]
            else:
                # integrate the twist across the straight stretch before this run
                twist = cumulative(dphi[current - 1:start + 1], h, initial=phi[current - 1])
                landed = twist[-1]
                value, miss = None, np.inf
                for c in options:
                    candidate = c + 2 * np.pi * np.round((landed - c) / (2 * np.pi))
                    if abs(landed - candidate) < miss:
                        value, miss = candidate, abs(landed - candidate)
                if miss > atol * max(1.0, grid[start] - grid[current - 1]):
                    return Equivalence(
                        False,
                        reason=f"twist across the straight stretch ending at s={grid[start]:.6g} misses by {miss:.3g}",
                    )
                phi[current:start] = twist[1:-1]
            phi[start:stop] = value
            current = stop

        first_start = runs[0][0]
        if first_start > 0:
            back = cumulative(dphi[: first_start + 1], h)
            phi[:first_start] = phi[first_start] - (back[-1] - back[:-1])
        if current < grid.size:
            phi[current - 1:] = cumulative(dphi[current - 1:], h, initial=phi[current - 1])

        return Equivalence(True, ScalarField.from_table(d1.domain, phi))


frenet_service = FrenetService()
