import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import GridMismatch, Inconclusive, SpecError
from ..models.apparatus import CurveSamples
from ..models.fields import Development
from ..models.geometry import orthonormality_error, skew_coefficients
from ..models.schemas import CheckResult, Classification, PeriodicityReport, VerificationReport
from ..utils.quadrature import simpson
from ..utils.rationality import approximate_fraction
from .frenet_service import FrenetService, frenet_service
from .zoo_service import ZooService, zoo_service

logger = logging.getLogger(__name__)

DEFAULT_CHECKS = ("orthonormality", "unit_speed", "frenet_consistency")
MIN_INFORMATIVE_NODES = 3


class AnalysisService:
    def __init__(self, frenet: FrenetService = None, zoo: ZooService = None):
        """Initialize the analysis service with the services it delegates to"""
        self.frenet = frenet or frenet_service
        self.zoo = zoo or zoo_service
        self.checks: Dict[str, Callable[[CurveSamples], CheckResult]] = {
            "orthonormality": self.check_orthonormality,
            "unit_speed": self.check_unit_speed,
            "frenet_consistency": self.check_frenet_consistency,
            "closure": self.check_closure,
            "total_curvature": self.check_total_curvature,
            "total_torsion": self.check_total_torsion,
            "hyperboloid": self.check_hyperboloid,
        }

    # --- classification ---

    def classify(self, dev: Development, tol: float = None, steps: int = None) -> Classification:
        """Plane, general helix or slant helix, tested in that order.

        Slopes are reported as θ ∈ (0, π/2) from |cot θ|, so equivalent
        developments (κ, τ) and (−κ, τ) classify alike.
        """
        tol = settings.classify_tol if tol is None else tol
        grid = dev.natural_grid(steps or settings.analysis_steps)
        k, t = dev.sample(grid)
        scale = max(1.0, float(np.abs(k).max()), float(np.abs(t).max()))
        informative = np.abs(k) > settings.eps_kappa
        count = int(informative.sum())
        if count < MIN_INFORMATIVE_NODES:
            raise Inconclusive(f"only {count} nodes with non-vanishing curvature")

        result = dict(tolerance=tol, informative_nodes=count)
        if float(np.abs(t[informative]).max()) < tol * scale:
            return Classification(family="plane", **result)

        ratio = t[informative] / k[informative]
        center = float(np.median(ratio))
        if float(np.abs(ratio - center).max()) <= tol * max(1.0, abs(center)):
            cot = abs(center)
            return Classification(family="general_helix", theta=math.atan2(1.0, cot), cot_theta=cot, **result)

        profile = self.zoo.slant_invariant(dev, steps=grid.size - 1)
        if profile.valid.sum() >= MIN_INFORMATIVE_NODES:
            m = profile.constant_value()
            if m != 0 and profile.spread() <= tol * max(1.0, abs(m)):
                return Classification(family="slant_helix", theta=math.atan2(1.0, abs(m)), cot_theta=abs(m), **result)
        return Classification(family="none", **result)

    # --- periodicity ---

    def periodicity_report(self, dev: Development, period: float, tol: float = None) -> PeriodicityReport:
        """P-periodicity of (κ, τ), total torsion over one period and its angle modulo π."""
        tol = settings.periodicity_tol if tol is None else tol
        s_min, s_max = dev.domain
        length = s_max - s_min
        grid = dev.natural_grid(settings.analysis_steps)
        h = float(grid[1] - grid[0])
        count = round(length / period) if period > 0 else 0
        if count < 1 or abs(length - count * period) > h:
            raise GridMismatch(f"period {period:g} does not divide the domain length {length:g}")

        # compare s against s + P on every node that has a partner
        shift = min(period, length)
        base = grid[grid <= s_max - shift + 1e-12 * max(1.0, length)]
        partner = np.minimum(base + shift, s_max)
        k0, t0 = dev.sample(base)
        k1, t1 = dev.sample(partner)
        scale = max(1.0, float(np.abs(k0).max()), float(np.abs(t0).max()))
        deviation = float(max(np.abs(k1 - k0).max(), np.abs(t1 - t0).max()))
        periodic = deviation <= tol * scale

        total = self.frenet.total_torsion(dev.tau, s_min, min(s_min + period, s_max))
        angle = total - math.pi * round(total / math.pi)
        frac = approximate_fraction(
            total / math.pi, settings.angle_rational_max_denominator, settings.angle_rational_window
        )
        logger.info(f"period {period:g}: periodic={periodic}, total torsion {total:.12g}")
        return PeriodicityReport(
            period=period,
            periodic=periodic,
            max_deviation=deviation,
            total_torsion=total,
            torsion_angle_mod_pi=angle,
            successor_periodic=periodic and frac is not None,
            torsion_ratio=str(frac) if frac is not None else None,
            tolerance=tol,
        )

    # --- verification checks ---

    def check_orthonormality(self, samples: CurveSamples) -> CheckResult:
        err = orthonormality_error(samples.frames)
        i = int(np.argmax(err))
        tol = settings.orthonormality_tol
        return CheckResult(name="orthonormality", passed=bool(err[i] <= tol), value=float(err[i]),
                           tolerance=tol, worst_node=i, worst_s=float(samples.s[i]))

    def check_unit_speed(self, samples: CurveSamples) -> CheckResult:
        speed = np.linalg.norm(np.diff(samples.positions, axis=0), axis=1) / np.diff(samples.s)
        dev = np.abs(speed - 1.0)
        i = int(np.argmax(dev))
        tol = settings.unit_speed_tol
        return CheckResult(name="unit_speed", passed=bool(dev[i] <= tol), value=float(dev[i]),
                           tolerance=tol, worst_node=i, worst_s=float(samples.s[i]))

    def check_frenet_consistency(self, samples: CurveSamples) -> CheckResult:
        """Central-difference F′Fᵀ against the coefficient matrix on interior nodes."""
        F = samples.frames
        h = samples.step
        measured = ((F[2:] - F[:-2]) / (2.0 * h)) @ np.swapaxes(F[1:-1], 1, 2)
        a, b = samples.kappa[1:-1], samples.tau[1:-1]
        zero = np.zeros_like(a)
        expected = skew_coefficients(a, zero, b) if samples.kind == "frenet" else skew_coefficients(a, b, zero)
        dev = np.abs(measured - expected).max(axis=(1, 2))
        i = int(np.argmax(dev))
        tol = settings.frenet_consistency_tol
        return CheckResult(name="frenet_consistency", passed=bool(dev[i] <= tol), value=float(dev[i]),
                           tolerance=tol, worst_node=i + 1, worst_s=float(samples.s[i + 1]), detail=samples.kind)

    def check_closure(self, samples: CurveSamples) -> CheckResult:
        gap = samples.closure_gap()
        tol = settings.closure_tol
        return CheckResult(name="closure", passed=gap <= tol, value=gap, tolerance=tol,
                           worst_node=len(samples) - 1, worst_s=float(samples.s[-1]))

    def check_total_curvature(self, samples: CurveSamples) -> CheckResult:
        total = simpson(samples.kappa, samples.step)
        tol = settings.total_curvature_tol
        return CheckResult(name="total_curvature", passed=abs(total) <= tol, value=total, tolerance=tol)

    def check_total_torsion(self, samples: CurveSamples) -> CheckResult:
        total = simpson(samples.tau, samples.step)
        tol = settings.total_torsion_tol
        return CheckResult(name="total_torsion", passed=abs(total) <= tol, value=total, tolerance=tol)

    def check_hyperboloid(self, samples: CurveSamples) -> CheckResult:
        fit = self.zoo.hyperboloid_residual(samples)
        tol = settings.hyperboloid_tol
        return CheckResult(name="hyperboloid", passed=fit.residual <= tol and fit.one_sheet, value=fit.residual,
                           tolerance=tol, detail=f"signature {fit.signature}")

    def verify(self, samples: CurveSamples, checks: Optional[Iterable[str]] = None, source: str = None) -> VerificationReport:
        names = list(dict.fromkeys(checks or DEFAULT_CHECKS))
        unknown = [n for n in names if n not in self.checks]
        if unknown:
            raise SpecError(f"unknown checks {unknown}; choose from {sorted(self.checks)}", "checks")
        with ThreadPoolExecutor(max_workers=min(len(names), 4) or 1) as pool:
            results = list(pool.map(lambda n: self.checks[n](samples), names))
        for r in results:
            log = logger.info if r.passed else logger.warning
            log(f"check {r.name}: value {r.value:.3g}, tolerance {r.tolerance:g}, passed={r.passed}")
        return VerificationReport(source=source, checks=results)


analysis_service = AnalysisService()
