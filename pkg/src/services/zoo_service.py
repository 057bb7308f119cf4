import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..core.config import settings
from ..core.exceptions import DegenerateFit, DomainMismatch, EmptyDomain, GridTooSmall, NotClosed, ZeroSlopeParameter
from ..models.apparatus import CurveSamples, FrameField, FrenetApparatus
from ..models.families import HelixParams, PrecessionParams, check_slope
from ..models.fields import Development, Domain, ScalarField, uniform_grid
from ..models.geometry import Frame
from ..models.schemas import ArcBalance, ClosureVerdict, CurvatureBalance, QuadricFit
from ..utils.quadrature import central_difference, cumulative, simpson
from ..utils.rationality import precession_ratio

logger = logging.getLogger(__name__)

# the smallest-but-one singular value of the quadric design matrix, relative to the largest
FIT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class InvariantProfile:
    """Values of a pointwise invariant; NaN where a node was excluded."""

    s: np.ndarray
    values: np.ndarray
    valid: np.ndarray

    @property
    def excluded(self) -> int:
        return int((~self.valid).sum())

    def constant_value(self) -> float:
        return float(np.median(self.values[self.valid]))

    def spread(self) -> float:
        """Max deviation from the median over valid nodes."""
        v = self.values[self.valid]
        return float(np.abs(v - np.median(v)).max()) if v.size else math.inf


@dataclass(frozen=True)
class TorsionProfile:
    tau: ScalarField
    domain: Domain


@dataclass(frozen=True)
class SalkowskiCurve:
    """Salkowski development, its angle φ = arcsin(ms) and its helix predecessor."""

    m: float
    development: Development
    helix: Development
    phi: ScalarField

    @property
    def theta(self) -> float:
        return math.atan2(1.0, self.m)


@dataclass(frozen=True)
class PrecessionCurve:
    params: PrecessionParams
    development: Development
    closure: ClosureVerdict
    precession_period: float

    @property
    def domain(self) -> Domain:
        return self.development.domain

    def tangent(self, s) -> np.ndarray:
        """Closed-form unit tangent T_CP(s), shape ``(..., 3)``."""
        w, mu, a = float(self.params.omega), float(self.params.mu), self.params.alpha
        s = np.asarray(s, dtype=float)
        return np.stack(
            [
                ((a - mu) * np.cos((a + mu) * s) + (a + mu) * np.cos((a - mu) * s)) / (2 * a),
                ((a - mu) * np.sin((a + mu) * s) + (a + mu) * np.sin((a - mu) * s)) / (2 * a),
                w * np.sin(mu * s) / a,
            ],
            axis=-1,
        )

    def frames(self, s) -> np.ndarray:
        w, mu, a = float(self.params.omega), float(self.params.mu), self.params.alpha
        s = np.asarray(s, dtype=float)
        return _slant_frames(mu * s, a * s, w / a, mu / a, reflected=True)

    def initial_frame(self) -> Frame:
        return Frame.from_matrix(self.frames(self.domain[0]))

    def apparatus(self, steps: int) -> FrenetApparatus:
        grid = uniform_grid(self.domain, steps)
        return FrenetApparatus(FrameField(grid, self.frames(grid)), self.development.kappa, self.development.tau)


def _helix_frames(omega: np.ndarray, sin_t: float, cos_t: float) -> np.ndarray:
    """Rows T_H, N_H, B_H for phase Ω; valid for any (sin θ, cos θ) on the unit circle."""
    so, co = np.sin(omega), np.cos(omega)
    zero = np.zeros_like(omega)
    frames = np.empty(np.shape(omega) + (3, 3))
    frames[..., 0, :] = np.stack([sin_t * so, -sin_t * co, np.full_like(omega, cos_t)], axis=-1)
    frames[..., 1, :] = np.stack([co, so, zero], axis=-1)
    frames[..., 2, :] = np.stack([-cos_t * so, cos_t * co, np.full_like(omega, sin_t)], axis=-1)
    return frames


def _slant_frames(phi: np.ndarray, omega: np.ndarray, sin_t: float, cos_t: float, reflected: bool) -> np.ndarray:
    """Successor of the helix frame with angle φ: (−cφ N_H + sφ B_H, T_H, sφ N_H + cφ B_H)."""
    helix = _helix_frames(omega, sin_t, cos_t)
    c, s = np.cos(phi)[..., None], np.sin(phi)[..., None]
    frames = np.empty_like(helix)
    frames[..., 0, :] = -c * helix[..., 1, :] + s * helix[..., 2, :]
    frames[..., 1, :] = helix[..., 0, :]
    frames[..., 2, :] = s * helix[..., 1, :] + c * helix[..., 2, :]
    if reflected:
        # rotation by π about the slope axis
        frames = frames * np.array([-1.0, -1.0, 1.0])
    return frames


class ZooService:
    def __init__(self, analysis_steps: int = None):
        """Initialize the curve generators"""
        self.analysis_steps = analysis_steps or settings.analysis_steps

    def _grid(self, field: ScalarField, grid: Optional[np.ndarray] = None) -> np.ndarray:
        if grid is not None:
            grid = np.asarray(grid, dtype=float)
            if abs(grid[0] - field.domain[0]) > 1e-12 * max(1.0, field.length) or abs(grid[-1] - field.domain[1]) > 1e-12 * max(1.0, field.length):
                raise DomainMismatch(f"grid [{grid[0]}, {grid[-1]}] does not span {field.domain}")
            return grid
        return field.grid() if field.is_table else uniform_grid(field.domain, self.analysis_steps)

    # --- plane curves and general helices ---

    def plane_apparatus(self, kappa: ScalarField, grid: Optional[np.ndarray] = None) -> FrenetApparatus:
        """T_P = (cos Ω, sin Ω, 0), N_P = (−sin Ω, cos Ω, 0), B_P = e_z with Ω = ∫κ."""
        grid = self._grid(kappa, grid)
        omega = cumulative(kappa(grid), float(grid[1] - grid[0]))
        frames = np.zeros((grid.size, 3, 3))
        frames[:, 0, 0], frames[:, 0, 1] = np.cos(omega), np.sin(omega)
        frames[:, 1, 0], frames[:, 1, 1] = -np.sin(omega), np.cos(omega)
        frames[:, 2, 2] = 1.0
        return FrenetApparatus(FrameField(grid, frames), kappa, ScalarField.constant(0.0, kappa.domain))

    def helix_apparatus(self, p: HelixParams, grid: Optional[np.ndarray] = None) -> FrenetApparatus:
        """General helix with slope axis e_z: κ_H = sin θ κ, τ_H = cot θ κ_H."""
        grid = self._grid(p.kappa, grid)
        omega = p.omega0 + cumulative(p.kappa(grid), float(grid[1] - grid[0]))
        sin_t, cos_t = math.sin(p.theta), math.cos(p.theta)
        kappa_h = p.kappa.scaled(sin_t)
        tau_h = kappa_h.scaled(p.m)
        return FrenetApparatus(FrameField(grid, _helix_frames(omega, sin_t, cos_t)), kappa_h, tau_h)

    # --- slant helices ---

    def slant_helix_development(self, phi: ScalarField, m: float, grid: Optional[np.ndarray] = None) -> Development:
        """κ = φ′ cos φ / m, τ = φ′ sin φ / m.

        Rule-backed when φ carries its derivative; otherwise φ′ comes from
        central differences and the development is a table.
        """
        if m == 0:
            raise ZeroSlopeParameter("slant helix parameter m = cot(theta) must be non-zero")
        m = float(m)
        if phi.derivative is not None and grid is None:
            dphi = phi.derivative
            return Development(
                ScalarField.from_rule(lambda s: dphi(s) * np.cos(phi(s)) / m, phi.domain),
                ScalarField.from_rule(lambda s: dphi(s) * np.sin(phi(s)) / m, phi.domain),
            )
        grid = self._grid(phi, grid)
        values = phi(grid)
        rate = central_difference(values, float(grid[1] - grid[0]))
        return Development(
            ScalarField.from_table(phi.domain, rate * np.cos(values) / m),
            ScalarField.from_table(phi.domain, rate * np.sin(values) / m),
        )

    def slant_helix_tangent(self, phi: ScalarField, theta: float, s, reflected: bool = True) -> np.ndarray:
        """Closed-form unit tangent with Ω = φ/n, λ₁ = 1 − n, λ₂ = 1 + n, n = cos θ."""
        theta = check_slope(theta)
        n = math.cos(theta)
        l1, l2 = 1.0 - n, 1.0 + n
        Omega = phi(s) / n
        x = 0.5 * (l1 * np.cos(l2 * Omega) + l2 * np.cos(l1 * Omega))
        y = 0.5 * (l1 * np.sin(l2 * Omega) + l2 * np.sin(l1 * Omega))
        z = math.sin(theta) * np.sin(n * Omega)
        if not reflected:
            x, y = -x, -y
        return np.stack([x, y, z], axis=-1)

    def slant_helix_apparatus(
        self, phi: ScalarField, theta: float, grid: Optional[np.ndarray] = None, reflected: bool = True
    ) -> FrenetApparatus:
        """Full Frenet frame of a slant helix: successor of the helix with Ω₀ = φ₀/n.

        The principal normal is the helix tangent, so its slope against e_z is
        the constant cos θ.
        """
        theta = check_slope(theta)
        grid = self._grid(phi, grid)
        n = math.cos(theta)
        values = phi(grid)
        frames = _slant_frames(values, values / n, math.sin(theta), n, reflected)
        dev = self.slant_helix_development(phi, 1.0 / math.tan(theta))
        return FrenetApparatus(FrameField(grid, frames), dev.kappa, dev.tau)

    def slant_invariant(self, dev: Development, steps: int = None) -> InvariantProfile:
        """s ↦ (κτ′ − κ′τ)/(κ² + τ²)^{3/2}, the geodesic curvature of the normal image.

        Closed-form derivatives are used when both fields carry one. Otherwise
        κ′ and τ′ are central differences and the two end nodes are left out.
        Nodes with |κ| ≤ eps_kappa are excluded as well; ``valid`` reports both.
        Constant m for a slant helix whose angle increases where m > 0.
        """
        grid = dev.natural_grid(steps or self.analysis_steps)
        h = float(grid[1] - grid[0])
        k, t = dev.sample(grid)
        valid = np.ones(grid.size, dtype=bool)
        if dev.kappa.derivative is not None and dev.tau.derivative is not None:
            dk, dt = dev.kappa.derivative(grid), dev.tau.derivative(grid)
        else:
            dk, dt = central_difference(k, h), central_difference(t, h)
            valid[[0, -1]] = False
        lancret_cubed = np.hypot(k, t) ** 3
        flat = (np.abs(k) <= settings.eps_kappa) | (lancret_cubed == 0)
        valid &= ~flat
        values = np.full(grid.size, np.nan)
        values[valid] = (k[valid] * dt[valid] - dk[valid] * t[valid]) / lancret_cubed[valid]
        if flat.any():
            logger.warning(f"slant invariant: {int(flat.sum())} of {grid.size} nodes excluded (curvature near zero)")
        return InvariantProfile(grid, values, valid)

    def recover_slant_angle(self, dev: Development, m: float, phi_start: float = 0.0, steps: int = None) -> ScalarField:
        """φ from total curvature and total torsion: sin φ = sin φ₀ + m∫κ, cos φ = cos φ₀ − m∫τ."""
        grid = dev.natural_grid(steps or self.analysis_steps)
        h = float(grid[1] - grid[0])
        k, t = dev.sample(grid)
        sin_phi = math.sin(phi_start) + m * cumulative(k, h)
        cos_phi = math.cos(phi_start) - m * cumulative(t, h)
        phi = np.unwrap(np.arctan2(sin_phi, cos_phi))
        return ScalarField.from_table(dev.domain, phi + (phi_start - phi[0]))

    def torsion_from_curvature(
        self, kappa: ScalarField, m: float, total_curvature_at_start: float = 0.0, steps: int = None
    ) -> TorsionProfile:
        """τ = κ mK/√(1 − m²K²) with K = K₀ + ∫κ, on the admissible stretch from the left end."""
        if m == 0:
            raise ZeroSlopeParameter("m must be non-zero")
        grid = kappa.grid() if kappa.is_table else uniform_grid(kappa.domain, steps or self.analysis_steps)
        k = kappa(grid)
        K = cumulative(k, float(grid[1] - grid[0]), initial=total_curvature_at_start)
        mK2 = (m * K) ** 2
        admissible = mK2 < 1.0 - settings.eps_domain
        stop = grid.size if admissible.all() else int(np.argmin(admissible))
        if stop < 2:
            raise EmptyDomain(f"m^2 K^2 = {mK2[0]:.6g} at s={grid[0]:.6g}; no admissible interval starts there")
        domain = (float(grid[0]), float(grid[stop - 1]))
        if stop < grid.size:
            logger.info(f"torsion restricted to {domain}; m^2 K^2 reaches 1 near s={grid[stop]:.6g}")
        tau = k[:stop] * m * K[:stop] / np.sqrt(1.0 - mK2[:stop])
        return TorsionProfile(ScalarField.from_table(domain, tau), domain)

    def salkowski_development(self, m: float, domain: Optional[Domain] = None) -> SalkowskiCurve:
        """κ_S ≡ 1, τ_S = ms/√(1 − m²s²); predecessor helix κ_H = 1/√(1 − m²s²), τ_H = mκ_H."""
        if m == 0:
            raise ZeroSlopeParameter("Salkowski parameter m must be non-zero")
        m = float(m)
        limit = 1.0 / abs(m)
        if domain is None:
            bound = (1.0 - settings.eps_domain) * limit
            domain = (-bound, bound)
        if not -limit < domain[0] < domain[1] < limit:
            raise DomainMismatch(f"Salkowski domain must lie inside (-{limit:g}, {limit:g}), got {domain}")

        def root(s):
            return np.sqrt(1.0 - (m * s) ** 2)

        kappa = ScalarField.constant(1.0, domain)
        tau = ScalarField.from_rule(lambda s: m * s / root(s), domain, derivative=lambda s: m / root(s) ** 3)
        kappa_h = ScalarField.from_rule(lambda s: 1.0 / root(s), domain, derivative=lambda s: m * m * s / root(s) ** 3)
        phi = ScalarField.from_rule(lambda s: np.arcsin(m * s), domain, derivative=lambda s: m / root(s))
        return SalkowskiCurve(m, Development(kappa, tau), Development(kappa_h, kappa_h.scaled(m)), phi)

    # --- constant precession ---

    def constant_precession(self, p: PrecessionParams, domain: Optional[Domain] = None) -> PrecessionCurve:
        """κ = ω cos μs, τ = ω sin μs; closed iff μ/α is rational, with period 2πq/α for μ/α = p/q."""
        closed, ratio, method = precession_ratio(
            p.omega, p.mu, settings.rational_max_denominator, settings.rational_window
        )
        period = 2 * math.pi * ratio.denominator / p.alpha if closed else None
        precession_period = 2 * math.pi / abs(float(p.mu))
        if domain is None:
            domain = (0.0, period if closed else precession_period)
        verdict = ClosureVerdict(closed=closed, method=method, ratio=str(ratio) if ratio else None, period=period)
        logger.info(f"constant precession omega={p.omega}, mu={p.mu}: closed={closed} ({method})")

        w, mu = float(p.omega), float(p.mu)
        kappa = ScalarField.from_rule(
            lambda s: w * np.cos(mu * s), domain, derivative=lambda s: -w * mu * np.sin(mu * s)
        )
        tau = ScalarField.from_rule(
            lambda s: w * np.sin(mu * s), domain, derivative=lambda s: w * mu * np.cos(mu * s)
        )
        return PrecessionCurve(p, Development(kappa, tau), verdict, precession_period)

    # --- checks on sampled curves ---

    def hyperboloid_residual(self, positions: Union[CurveSamples, np.ndarray]) -> QuadricFit:
        """Least-squares quadric through the points and its eigenvalue signature.

        Coordinates are centred and scaled to unit radius; the coefficient
        vector has unit norm and the residual is max |Q(xᵢ)|.
        """
        X = positions.positions if isinstance(positions, CurveSamples) else np.asarray(positions, dtype=float)
        if X.shape[0] < 100:
            raise GridTooSmall(f"a quadric fit needs at least 100 points, got {X.shape[0]}")
        center = X.mean(axis=0)
        Y = X - center
        scale = float(np.linalg.norm(Y, axis=1).max()) or 1.0
        x, y, z = (Y / scale).T
        D = np.stack([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, np.ones_like(x)], axis=1)
        _, sigma, vt = np.linalg.svd(D, full_matrices=False)
        conditioning = float(sigma[-2] / sigma[0])
        if conditioning < FIT_RANK_TOL:
            raise DegenerateFit(f"points admit more than one quadric (sigma ratio {conditioning:.3g})")
        coef = vt[-1]
        residual = float(np.abs(D @ coef).max())

        a, b, c, d, e, f, g1, g2, g3, h = coef
        A = np.array([[a, d / 2, e / 2], [d / 2, b, f / 2], [e / 2, f / 2, c]])
        g = np.array([g1, g2, g3])
        x0 = np.linalg.lstsq(A, -g / 2, rcond=None)[0]
        constant = h + g @ x0 / 2
        eig = np.linalg.eigvalsh(A)
        if abs(constant) > 1e-12 * max(1.0, float(np.abs(eig).max())):
            eig = eig / -constant
        eig = np.sort(eig)[::-1]
        zero = 1e-9 * float(np.abs(eig).max())
        signs = ["+" if v > zero else "-" if v < -zero else "0" for v in eig]
        signature = "(" + ",".join(signs) + ")"
        logger.debug(f"quadric fit residual {residual:.3g}, signature {signature}")
        return QuadricFit(
            residual=residual,
            signature=signature,
            one_sheet=signs == ["+", "+", "-"],
            coefficients=[float(v) for v in coef],
            conditioning=conditioning,
        )

    def total_curvature_balance(
        self, samples: CurveSamples, closure: Union[ClosureVerdict, bool], tol: float = None
    ) -> CurvatureBalance:
        """Signed total curvature and the tangent-image length of every arc between inflections.

        Arcs of opposite curvature sign are paired by length; on a closed
        run the first and last arc are one arc.
        """
        closed = closure.closed if isinstance(closure, ClosureVerdict) else bool(closure)
        if not closed:
            raise NotClosed("total curvature balance needs a closed run")
        tol = settings.total_curvature_tol if tol is None else tol
        s, k, T = samples.s, samples.kappa, samples.tangents
        h = samples.step

        # zero crossings of κ, located by linear interpolation
        crossing = np.flatnonzero(np.sign(k[:-1]) * np.sign(k[1:]) < 0)
        weights = k[crossing] / (k[crossing] - k[crossing + 1])
        s_cross = s[crossing] + weights * h
        T_cross = T[crossing] + weights[:, None] * (T[crossing + 1] - T[crossing])

        arcs = []
        bounds = [0] + list(crossing + 1) + [s.size]
        for j in range(len(bounds) - 1):
            lo, hi = bounds[j], bounds[j + 1]
            T_pts = T[lo:hi]
            start, stop = float(s[lo]), float(s[hi - 1])
            # Simpson on the nodes, linear end pieces out to the zero crossings
            signed = simpson(k[lo:hi], h) if hi - lo > 1 else 0.0
            if j > 0:
                start = float(s_cross[j - 1])
                signed += 0.5 * k[lo] * (s[lo] - start)
                T_pts = np.concatenate((T_cross[j - 1][None], T_pts))
            if j < len(bounds) - 2:
                stop = float(s_cross[j])
                signed += 0.5 * k[hi - 1] * (stop - s[hi - 1])
                T_pts = np.concatenate((T_pts, T_cross[j][None]))
            image = float(np.linalg.norm(np.diff(T_pts, axis=0), axis=1).sum())
            arcs.append([start, stop, signed, abs(signed), image])

        if len(arcs) > 1 and np.sign(arcs[0][2]) == np.sign(arcs[-1][2]):
            first, last = arcs.pop(0), arcs.pop()
            signed = first[2] + last[2]
            arcs.append([last[0], first[1], signed, abs(signed), first[4] + last[4]])

        up = sorted(a[3] for a in arcs if a[2] > 0)
        down = sorted(a[3] for a in arcs if a[2] < 0)
        mismatch = max((abs(u - d) for u, d in zip(up, down)), default=0.0)
        balanced = len(up) == len(down) and mismatch <= tol * max(1.0, max(up + down, default=1.0))

        total_curvature = simpson(k, h)
        total_torsion = simpson(samples.tau, h)
        return CurvatureBalance(
            total_curvature=total_curvature,
            total_torsion=total_torsion,
            arcs=[
                ArcBalance(start=a[0], stop=a[1], signed_curvature=a[2], unsigned_curvature=a[3], tangent_image_length=a[4])
                for a in arcs
            ],
            balanced=balanced and abs(total_curvature) <= tol * max(1.0, sum(a[3] for a in arcs)),
            max_pair_mismatch=mismatch,
            tolerance=tol,
        )


zoo_service = ZooService()
