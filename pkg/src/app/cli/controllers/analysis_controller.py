import json
import logging
from typing import List, Optional

from ....models.schemas import DevelopmentSpec, VerificationReport
from ....services.analysis_service import analysis_service
from ....utils.csv_io import import_csv
from ....utils.json_io import load_json_file
from .curve_controller import spec_development

logger = logging.getLogger(__name__)


def verify(in_path: str, checks: Optional[List[str]] = None, kind: str = "frenet") -> VerificationReport:
    samples = import_csv(in_path, kind=kind)
    report = analysis_service.verify(samples, checks, source=in_path)
    print(report.model_dump_json(indent=2))
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        logger.warning(f"Verification of {in_path} failed: {', '.join(failed)}")
    return report


def classify(dev_path: str, period: Optional[float] = None) -> dict:
    """Classification of a development, plus a periodicity report when a period is given."""
    spec = DevelopmentSpec.model_validate(load_json_file(dev_path))
    dev = spec_development(spec)
    verdict = analysis_service.classify(dev)
    logger.info(f"{dev_path}: {verdict.family}")
    result = {"classification": verdict.model_dump()}
    if period is not None:
        result["periodicity"] = analysis_service.periodicity_report(dev, period).model_dump()
    print(json.dumps(result, indent=2))
    return result
