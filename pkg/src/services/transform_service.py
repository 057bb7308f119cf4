import logging
from typing import Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import DomainMismatch, UnliftablePath, VanishingLancret
from ..models.apparatus import BishopApparatus, FrameField, FrenetApparatus, PolarDevelopment
from ..models.fields import ScalarField, same_domain, uniform_grid
from ..models.geometry import normal_plane_rotation
from ..utils.quadrature import central_difference, cumulative

logger = logging.getLogger(__name__)

# a sign flip of ω must pass this close to the origin, relative to the step length
ORIGIN_PASS_RATIO = 0.25


class TransformService:
    def __init__(self, eps_radius: float = None, analysis_steps: int = None):
        """Initialize the service with optional overrides of the global thresholds"""
        self.eps_radius = settings.eps_radius if eps_radius is None else eps_radius
        self.analysis_steps = analysis_steps or settings.analysis_steps

    def twist_angle(self, app: FrenetApparatus, phi0: float) -> ScalarField:
        """φ(s) = φ₀ + ∫ τ from the left end of the domain."""
        phi = cumulative(app.tau_values(), app.frames.step, initial=float(phi0))
        return ScalarField.from_table(app.domain, phi)

    def bishop_transform(self, app: FrenetApparatus, phi0: float) -> BishopApparatus:
        """Rotate (N, B) by φ = φ₀ + ∫τ into a parallel-transport pair (N₁, N₂)."""
        phi = self.twist_angle(app, phi0).values
        frames = normal_plane_rotation(phi) @ app.frames.frames
        frames[:, 0, :] = app.tangent
        kappa = app.kappa_values()
        logger.info(f"Bishop transform on {app.domain} with phi0={phi0:g}")
        return BishopApparatus(
            FrameField(app.s, frames),
            ScalarField.from_table(app.domain, kappa * np.cos(phi)),
            ScalarField.from_table(app.domain, kappa * np.sin(phi)),
        )

    def rotate_bishop(self, app: BishopApparatus, angle: float) -> BishopApparatus:
        """Another member of the Bishop family: (N₁, N₂) and (k₁, k₂) turned by a constant angle."""
        c, s = np.cos(angle), np.sin(angle)
        frames = normal_plane_rotation(angle) @ app.frames.frames
        frames[:, 0, :] = app.frames.e1
        k1, k2 = app.k1_values(), app.k2_values()
        return BishopApparatus(
            FrameField(app.s, frames),
            ScalarField.from_table(app.domain, c * k1 - s * k2),
            ScalarField.from_table(app.domain, s * k1 + c * k2),
        )

    def polar_unwrap(self, k1: ScalarField, k2: ScalarField, grid: Optional[np.ndarray] = None) -> PolarDevelopment:
        """Continuous polar angle φ and signed radius ω with (k₁, k₂) = ω (cos φ, sin φ).

        Adjacent angles are kept within π/2 of each other by letting ω change
        sign, which happens exactly where the development passes through the
        origin. φ is held across stretches where the radius vanishes, and
        ω ≥ 0 at the first node with a non-vanishing radius.
        """
        if not same_domain(k1.domain, k2.domain):
            raise DomainMismatch(f"k1 on {k1.domain} but k2 on {k2.domain}")
        if grid is None:
            grid = k1.grid() if k1.is_table else k2.grid() if k2.is_table else uniform_grid(k1.domain, self.analysis_steps)
        x, y = k1(grid), k2(grid)
        radius = np.hypot(x, y)
        r_max = float(radius.max())
        if r_max == 0.0:
            zero = ScalarField.from_table(k1.domain, np.zeros(grid.size))
            return PolarDevelopment(zero, zero)

        eps = self.eps_radius * r_max
        big = radius > eps
        first = int(np.argmax(big))
        # hold the last reliable angle across vanishing stretches
        last = np.maximum.accumulate(np.where(big, np.arange(grid.size), first))
        angles = np.arctan2(y, x)[last]
        phi = np.unwrap(angles, period=np.pi)
        omega = x * np.cos(phi) + y * np.sin(phi)

        flips = np.flatnonzero(
            (np.abs(omega[:-1]) > eps) & (np.abs(omega[1:]) > eps) & (np.sign(omega[:-1]) != np.sign(omega[1:]))
        )
        if flips.size:
            p0 = np.stack([x[flips], y[flips]], axis=1)
            d = np.stack([x[flips + 1], y[flips + 1]], axis=1) - p0
            length = np.linalg.norm(d, axis=1)
            t = np.clip(-np.einsum("ij,ij->i", p0, d) / np.maximum(length**2, np.finfo(float).tiny), 0.0, 1.0)
            miss = np.linalg.norm(p0 + t[:, None] * d, axis=1)
            bad = miss > ORIGIN_PASS_RATIO * length
            if bad.any():
                i = int(flips[np.argmax(bad)])
                raise UnliftablePath(
                    f"polar angle jumps by more than pi/2 between s={grid[i]:.6g} and s={grid[i + 1]:.6g} "
                    f"away from the origin"
                )
            logger.debug(f"signed radius changes sign {flips.size} times")

        return PolarDevelopment(
            ScalarField.from_table(k1.domain, omega),
            ScalarField.from_table(k1.domain, phi),
        )

    def inverse_bishop(self, app: BishopApparatus, polar: Optional[PolarDevelopment] = None) -> FrenetApparatus:
        """Frenet apparatus from a Bishop one: κ = ω, τ = φ′, (N, B) = (N₁, N₂) turned back by φ."""
        polar = polar or self.polar_unwrap(app.k1, app.k2, grid=app.s)
        phi = polar.phi(app.s)
        frames = normal_plane_rotation(-phi) @ app.frames.frames
        frames[:, 0, :] = app.frames.e1
        tau = self._angle_rate(polar.phi, app.s, app.frames.step)
        logger.info(f"Inverse Bishop transform on {app.domain}")
        return FrenetApparatus(
            FrameField(app.s, frames),
            ScalarField.from_table(app.domain, polar.omega(app.s)),
            ScalarField.from_table(app.domain, tau),
        )

    def _angle_rate(self, phi: ScalarField, grid: np.ndarray, h: float) -> np.ndarray:
        if phi.derivative is not None:
            return phi.derivative(grid)
        return central_difference(phi(grid), h)

    def successor_transform(self, app: FrenetApparatus, phi0: float) -> FrenetApparatus:
        """Apparatus of a successor curve: its principal normal is the input tangent.

        T₁ = −cos φ N + sin φ B, N₁ = T, B₁ = sin φ N + cos φ B with
        φ = φ₀ + ∫τ; then κ₁ = κ cos φ, τ₁ = κ sin φ.
        """
        phi = self.twist_angle(app, phi0).values
        c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
        N, B = app.normal, app.binormal
        frames = np.empty_like(app.frames.frames)
        frames[:, 0, :] = -c * N + s * B
        frames[:, 1, :] = app.tangent
        frames[:, 2, :] = s * N + c * B
        kappa = app.kappa_values()
        logger.info(f"Successor transform on {app.domain} with phi0={phi0:g}")
        return FrenetApparatus(
            FrameField(app.s, frames),
            ScalarField.from_table(app.domain, kappa * c[:, 0]),
            ScalarField.from_table(app.domain, kappa * s[:, 0]),
        )

    def predecessor_transform(self, app: FrenetApparatus, polar: Optional[PolarDevelopment] = None) -> FrenetApparatus:
        """Apparatus whose successor is ``app``.

        Without a polar form the Lancret curvature must stay away from zero;
        then B is the unit Darboux vector of the input and
        τ = (κ₁τ₁′ − κ₁′τ₁)/ω². The result depends on the apparatus passed,
        not only on the curve it frames.
        """
        s, h = app.s, app.frames.step
        T1, B1 = app.tangent, app.binormal
        frames = np.empty_like(app.frames.frames)
        frames[:, 0, :] = app.normal

        if polar is not None:
            if not same_domain(polar.domain, app.domain):
                raise DomainMismatch(f"polar form on {polar.domain}, apparatus on {app.domain}")
            phi = polar.phi(s)
            c, sn = np.cos(phi)[:, None], np.sin(phi)[:, None]
            frames[:, 1, :] = -c * T1 + sn * B1
            frames[:, 2, :] = sn * T1 + c * B1
            kappa = polar.omega(s)
            tau = self._angle_rate(polar.phi, s, h)
        else:
            k1, t1 = app.kappa_values(), app.tau_values()
            omega = np.hypot(k1, t1)
            floor = self.eps_radius * float(omega.max()) if omega.size else 0.0
            if omega.min() <= floor:
                i = int(np.argmin(omega))
                raise VanishingLancret(f"Lancret curvature {omega[i]:.3g} at s={s[i]:.6g}; supply a polar form")
            frames[:, 1, :] = (-k1[:, None] * T1 + t1[:, None] * B1) / omega[:, None]
            frames[:, 2, :] = (t1[:, None] * T1 + k1[:, None] * B1) / omega[:, None]
            kappa = omega
            tau = (k1 * central_difference(t1, h) - central_difference(k1, h) * t1) / omega**2

        logger.info(f"Predecessor transform on {app.domain}")
        return FrenetApparatus(
            FrameField(s, frames),
            ScalarField.from_table(app.domain, kappa),
            ScalarField.from_table(app.domain, tau),
        )


transform_service = TransformService()
