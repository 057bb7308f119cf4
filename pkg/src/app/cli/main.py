import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from ...core.config import settings
from ...core.exceptions import CurveError, SpecError
from ...models.schemas import error_path
from ...services.analysis_service import analysis_service
from .controllers import analysis_controller, curve_controller

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curves",
        description="Solve the natural equations of space curves and generate helices, slant helices and curves of constant precession",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a named curve family")
    p.add_argument("spec", help="curve spec JSON")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("solve", help="integrate raw natural equations")
    p.add_argument("dev", help="development JSON with kappa and tau")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("transform", help="Bishop, successor and predecessor transformations of a sampled curve")
    p.add_argument("input", help="curve CSV")
    p.add_argument("--op", required=True, choices=curve_controller.TRANSFORM_OPS)
    p.add_argument("--phi0", type=float, help="constant angle (required for successor and bishop)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("verify", help="run numeric checks on a curve CSV and print a JSON report")
    p.add_argument("input", help="curve CSV")
    p.add_argument("--checks", nargs="+", choices=sorted(analysis_service.checks), help="checks to run")
    p.add_argument("--kind", choices=("frenet", "bishop"), default="frenet", help="frame stored in the CSV")

    p = sub.add_parser("classify", help="plane curve, general helix or slant helix")
    p.add_argument("dev", help="development JSON with kappa and tau")
    p.add_argument("--period", type=float, help="also report periodicity for this candidate period")
    return parser


def run(args: argparse.Namespace) -> int:
    try:
        if args.command == "generate":
            curve_controller.generate(args.spec, args.out)
        elif args.command == "solve":
            curve_controller.solve(args.dev, args.out)
        elif args.command == "transform":
            curve_controller.transform(args.input, args.op, args.phi0, args.out)
        elif args.command == "verify":
            report = analysis_controller.verify(args.input, args.checks, args.kind)
            return EXIT_OK if report.passed else EXIT_FAILED
        elif args.command == "classify":
            analysis_controller.classify(args.dev, args.period)
        return EXIT_OK
    except ValidationError as e:
        for err in e.errors():
            logger.error(f"invalid input: {error_path(err) or '<document>'}: {err.get('msg')}")
        return EXIT_INPUT
    except SpecError as e:
        logger.error(f"invalid input: {e}")
        return EXIT_INPUT
    except CurveError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    except (OSError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    except Exception:
        logger.exception(f"Unexpected error in {args.command}")
        return EXIT_INPUT


def cli_main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    return run(args)


if __name__ == "__main__":
    sys.exit(cli_main())
