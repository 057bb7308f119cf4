import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from ....core.config import settings
from ....core.exceptions import SpecError
from ....models.apparatus import CurveSamples
from ....models.families import HelixParams, PrecessionParams
from ....models.fields import Development, Domain, ScalarField, uniform_grid
from ....models.geometry import Frame
from ....models.schemas import (
    CurveSpec,
    CustomFamily,
    DevelopmentSpec,
    HelixFamily,
    PlaneFamily,
    PrecessionFamily,
    SalkowskiFamily,
    SlantHelixFamily,
)
from ....services.solver_service import natural_solver
from ....services.transform_service import transform_service
from ....services.zoo_service import zoo_service
from ....utils.csv_io import export_csv, import_csv, write_csv
from ....utils.expressions import field_from_source
from ....utils.json_io import load_json_file

logger = logging.getLogger(__name__)

TRANSFORM_OPS = ("successor", "predecessor", "bishop", "inverse-bishop")


def _start_grid(domain: Domain) -> np.ndarray:
    return uniform_grid(domain, settings.min_steps)


def family_development(spec: CurveSpec) -> Tuple[Development, Frame]:
    """Development of the requested family and its closed-form frame at s_min."""
    domain = spec.domain
    params = spec.family_params()

    if isinstance(params, PlaneFamily):
        kappa = field_from_source(params.kappa, domain, "params.kappa")
        return Development(kappa, ScalarField.constant(0.0, domain)), Frame.identity()

    if isinstance(params, HelixFamily):
        kappa = field_from_source(params.kappa, domain, "params.kappa")
        app = zoo_service.helix_apparatus(HelixParams(params.theta, kappa, params.omega0), _start_grid(domain))
        return app.development(), app.frames.frame_at(0)

    if isinstance(params, SlantHelixFamily):
        phi = field_from_source(params.phi, domain, "params.phi")
        app = zoo_service.slant_helix_apparatus(phi, params.slope_angle(), _start_grid(domain), params.reflected)
        return app.development(), app.frames.frame_at(0)

    if isinstance(params, SalkowskiFamily):
        curve = zoo_service.salkowski_development(params.m, domain)
        if params.m > 0:
            app = zoo_service.slant_helix_apparatus(curve.phi, curve.theta, _start_grid(domain))
            return curve.development, app.frames.frame_at(0)
        return curve.development, Frame.identity()

    if isinstance(params, PrecessionFamily):
        curve = zoo_service.constant_precession(PrecessionParams(params.omega, params.mu), domain)
        if curve.closure.closed:
            logger.info(f"closed curve, period {curve.closure.period:.12g} (mu/alpha = {curve.closure.ratio})")
        return curve.development, curve.initial_frame()

    if isinstance(params, CustomFamily):
        kappa = field_from_source(params.kappa, domain, "params.kappa")
        tau = field_from_source(params.tau, domain, "params.tau")
        return Development(kappa, tau), Frame.identity()

    raise SpecError(f"unsupported family {spec.family!r}", "family")


def spec_development(spec: DevelopmentSpec) -> Development:
    return Development(
        field_from_source(spec.kappa, spec.domain, "kappa"),
        field_from_source(spec.tau, spec.domain, "tau"),
    )


def _start_frame(initial_frame, default: Frame) -> Frame:
    return Frame.from_rows(initial_frame) if initial_frame is not None else default


def _emit(samples: CurveSamples, out: Optional[str]) -> None:
    if out:
        export_csv(samples, out)
    else:
        write_csv(samples, sys.stdout)


def generate(spec_path: str, out: Optional[str] = None) -> CurveSamples:
    """Closed-form family -> natural equations -> solver run."""
    spec = CurveSpec.model_validate(load_json_file(spec_path))
    dev, frame = family_development(spec)
    f0 = _start_frame(spec.initial_frame, frame)
    logger.info(f"Generating {spec.family} curve on {spec.domain} with {spec.samples} steps")
    samples = natural_solver.solve_natural_equations(dev, f0, spec.initial_position, spec.solver_config())
    _emit(samples, out)
    return samples


def solve(dev_path: str, out: Optional[str] = None) -> CurveSamples:
    spec = DevelopmentSpec.model_validate(load_json_file(dev_path))
    dev = spec_development(spec)
    f0 = _start_frame(spec.initial_frame, Frame.identity())
    samples = natural_solver.solve_natural_equations(dev, f0, spec.initial_position, spec.solver_config())
    _emit(samples, out)
    return samples


def transform(in_path: str, op: str, phi0: Optional[float] = None, out: Optional[str] = None) -> CurveSamples:
    """Apply a frame transformation to a sampled apparatus; positions are re-integrated from the new tangents."""
    if op not in TRANSFORM_OPS:
        raise SpecError(f"unknown operation {op!r}; choose from {', '.join(TRANSFORM_OPS)}", "--op")
    if op in ("successor", "bishop") and phi0 is None:
        raise SpecError(f"the {op} transformation needs a constant angle", "--phi0")

    samples = import_csv(in_path, kind="bishop" if op == "inverse-bishop" else "frenet")
    if op == "successor":
        result = transform_service.successor_transform(samples.frenet_apparatus(), phi0)
    elif op == "predecessor":
        result = transform_service.predecessor_transform(samples.frenet_apparatus())
    elif op == "bishop":
        result = transform_service.bishop_transform(samples.frenet_apparatus(), phi0)
    else:
        result = transform_service.inverse_bishop(samples.bishop_apparatus())

    positions = natural_solver.integrate_positions(result.frames, samples.positions[0])
    transformed = CurveSamples.from_apparatus(result, positions)
    logger.info(f"Applied {op} to {Path(in_path).name}")
    _emit(transformed, out)
    return transformed
