import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import DomainMismatch, GridTooSmall
from ..models.apparatus import CurveSamples, FrameField
from ..models.fields import Development, Domain, ScalarField, same_domain, uniform_grid
from ..models.geometry import Frame, Vec3, orthonormalize, orthonormalize_matrix, orthonormality_error, skew_coefficients
from ..models.schemas import SolverConfig
from ..utils.quadrature import cumulative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApparatusEstimate:
    """Finite-difference apparatus on the interior nodes of a sampled curve.

    ``normal`` is NaN on flagged nodes (inflection points and nodes next to a
    sign change of the principal normal).
    """

    s: np.ndarray
    kappa_plus: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    inflection: np.ndarray
    threshold: float

    @property
    def inflection_points(self) -> np.ndarray:
        return self.s[self.inflection]


class NaturalSolver:
    def __init__(self, config: Optional[SolverConfig] = None):
        """Initialize the solver with a default configuration"""
        self.config = config or SolverConfig()

    def _grid(self, domain: Domain, cfg: SolverConfig) -> np.ndarray:
        steps = cfg.steps_for(domain[1] - domain[0])
        return uniform_grid(domain, steps)

    def _start_frame(self, f0: Frame, tol: float) -> np.ndarray:
        if f0.is_valid(tol):
            return f0.as_matrix()
        logger.warning(f"initial frame off by {f0.orthonormality_error():.3g}; orthonormalizing")
        return orthonormalize(f0).as_matrix()

    def solve_frame_ode(
        self,
        k1: ScalarField,
        k2: ScalarField,
        k3: ScalarField,
        f0: Frame,
        domain: Optional[Domain] = None,
        cfg: Optional[SolverConfig] = None,
    ) -> FrameField:
        """Classical RK4 for F′ = K(s) F with K = [[0,k₁,k₂],[−k₁,0,k₃],[−k₂,−k₃,0]].

        The system is linear, so each step is the matrix
        P = I + h/6 (A + 2B + 2C + D) acting on the frame; the coefficient
        fields are evaluated once on nodes and midpoints.
        """
        cfg = cfg or self.config
        domain = domain or k1.domain
        for name, f in (("k1", k1), ("k2", k2), ("k3", k3)):
            if not same_domain(f.domain, domain):
                raise DomainMismatch(f"{name} on {f.domain}, integration domain {domain}")

        grid = self._grid(domain, cfg)
        n = grid.size - 1
        h = float((grid[-1] - grid[0]) / n)
        mid = grid[:-1] + 0.5 * h
        logger.debug(f"RK4 on {domain} with {n} steps, h={h:.3g}, renormalize every {cfg.renormalize_every}")

        K = skew_coefficients(k1(grid), k2(grid), k3(grid))
        Km = skew_coefficients(k1(mid), k2(mid), k3(mid))
        eye = np.eye(3)
        A = K[:-1]
        B = Km @ (eye + 0.5 * h * A)
        C = Km @ (eye + 0.5 * h * B)
        D = K[1:] @ (eye + h * C)
        steps = eye + (h / 6.0) * (A + 2.0 * B + 2.0 * C + D)

        frames = np.empty((n + 1, 3, 3))
        F = self._start_frame(f0, cfg.tol_ortho)
        frames[0] = F
        every = cfg.renormalize_every
        for i in range(n):
            F = steps[i] @ F
            if (i + 1) % every == 0:
                F = orthonormalize_matrix(F)
            frames[i + 1] = F

        drift = float(orthonormality_error(frames).max())
        if drift > cfg.tol_ortho:
            logger.warning(f"frame drift {drift:.3g} exceeds tol_ortho={cfg.tol_ortho:g}")
        else:
            logger.debug(f"max frame drift {drift:.3g}")
        return FrameField(grid, frames)

    def integrate_positions(self, frames: FrameField, x0: Vec3 = None) -> np.ndarray:
        """x(s) = x₀ + ∫ T ds, cumulative Simpson over the node tangents."""
        x0 = np.zeros(3) if x0 is None else np.asarray(x0, dtype=float).reshape(3)
        return cumulative(frames.e1, frames.step) + x0

    def solve_natural_equations(
        self,
        dev: Development,
        f0: Optional[Frame] = None,
        x0: Vec3 = None,
        cfg: Optional[SolverConfig] = None,
    ) -> CurveSamples:
        """Curve with prescribed curvature and torsion (Frenet case k₂ = 0)."""
        f0 = f0 or Frame.identity()
        logger.info(f"Solving natural equations on {dev.domain}")
        zero = ScalarField.constant(0.0, dev.domain)
        frames = self.solve_frame_ode(dev.kappa, zero, dev.tau, f0, dev.domain, cfg)
        positions = self.integrate_positions(frames, x0)
        kappa, tau = dev.sample(frames.s)
        logger.info(f"Solved {len(frames)} nodes; closure gap {np.linalg.norm(positions[-1] - positions[0]):.3g}")
        return CurveSamples(frames.s, positions, frames.frames, kappa, tau)

    def estimate_apparatus(self, s: np.ndarray, positions: np.ndarray) -> ApparatusEstimate:
        """κ₊ = ‖x″‖, T and N₊ = T′/κ₊ from central differences of the positions."""
        s = np.asarray(s, dtype=float)
        x = np.asarray(positions, dtype=float)
        if s.size < 5:
            raise GridTooSmall(f"need at least 5 nodes, got {s.size}")
        h = float((s[-1] - s[0]) / (s.size - 1))

        tangent = (x[2:] - x[:-2]) / (2.0 * h)
        second = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / (h * h)
        kappa_plus = np.linalg.norm(second, axis=1)

        threshold = max(settings.eps_inflection * float(kappa_plus.max()), settings.eps_inflection_floor)
        flags = kappa_plus < threshold
        normal = np.full_like(second, np.nan)
        ok = ~flags
        normal[ok] = second[ok] / kappa_plus[ok, None]

        # an inflection between two nodes shows up as a reversal of N₊
        both = ok[:-1] & ok[1:]
        dots = np.einsum("ij,ij->i", np.nan_to_num(normal[:-1]), np.nan_to_num(normal[1:]))
        for i in np.flatnonzero(both & (dots < 0)):
            flags[i if kappa_plus[i] <= kappa_plus[i + 1] else i + 1] = True
        # an inflection on a node leaves that node's normal without a definite sign
        outer = ok[:-2] & ok[2:]
        dots = np.einsum("ij,ij->i", np.nan_to_num(normal[:-2]), np.nan_to_num(normal[2:]))
        for i in np.flatnonzero(outer & (dots < 0)):
            if not flags[i:i + 3].any():
                flags[i + 1] = True
        normal[flags] = np.nan

        logger.debug(f"estimated apparatus on {s.size - 2} interior nodes, {int(flags.sum())} flagged")
        return ApparatusEstimate(s[1:-1], kappa_plus, tangent, normal, flags, threshold)


natural_solver = NaturalSolver()
