"""
Command-line entry point `eqrf`.

    eqrf phi --lambda 1.75 --re -50 --im 0
    eqrf study --config eqrf/studies/fig4.json --out results/
    eqrf accept --suite fig1
    eqrf presets

Machine-readable output goes to stdout, logs to stderr.
"""

import argparse
import json
import logging
import os
import sys
import traceback
from typing import Callable, Dict, Optional, Sequence

from eqrf import __version__
from eqrf.acceptance import SUITES, run_suite
from eqrf.exceptions import StudySpecError
from eqrf.problems import PRESETS
from eqrf.specialfun import phi_frac_report
from eqrf.study import load_studies, run_study

logger = logging.getLogger("eqrf.cli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
DEBUG_ENV = "EQRF_DEBUG"

EXIT_FAILURE = 1
EXIT_SPEC_ERROR = 2


def _env_debug() -> bool:
    return os.environ.get(DEBUG_ENV, "").strip().lower() in ("1", "true", "yes", "on")


def cmd_phi(args: argparse.Namespace) -> int:
    report = phi_frac_report(args.lam, complex(args.re, args.im))
    document = {
        "lambda": args.lam,
        "z": {"re": args.re, "im": args.im},
        "value": {"re": report.value.real, "im": report.value.imag},
        "method": report.method_used,
        "est_rel_error": report.est_rel_error,
    }
    print(json.dumps(document))
    return 0


def cmd_study(args: argparse.Namespace) -> int:
    specs = load_studies(args.config)
    logger.info("running %d studies from %s", len(specs), args.config)
    for spec in specs:
        report = run_study(spec, debug=args.debug)
        csv_path, json_path = report.write(args.out)
        print(f"{spec.name}: {csv_path} {json_path}")
    return 0


def cmd_accept(args: argparse.Namespace) -> int:
    result = run_suite(args.suite, out_dir=args.out, debug=args.debug)
    for criterion in result.criteria:
        print(criterion)
    failed = sum(not c.passed for c in result.criteria)
    print(f"{args.suite}: {len(result.criteria) - failed} passed, {failed} failed")
    return 0 if result.passed else EXIT_FAILURE


def cmd_presets(args: argparse.Namespace) -> int:
    names = [args.name] if args.name else list(PRESETS)
    document = {name: PRESETS[name].model_dump(mode="json") for name in names}
    print(json.dumps(document, indent=2))
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "phi": cmd_phi,
    "study": cmd_study,
    "accept": cmd_accept,
    "presets": cmd_presets,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqrf", description="Exponential quadrature rules for fractional sources.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")
    parser.add_argument(
        "--debug",
        action="store_true",
        default=_env_debug(),
        help=f"Enable numerical cross-checks and print tracebacks on errors (also ${DEBUG_ENV}=1).",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    phi = commands.add_parser("phi", help="Evaluate the fractional phi function phi_lambda(z).")
    phi.add_argument("--lambda", dest="lam", type=float, required=True, help="Order lambda > 0.")
    phi.add_argument("--re", type=float, required=True, help="Real part of z.")
    phi.add_argument("--im", type=float, default=0.0, help="Imaginary part of z (default: 0).")

    study = commands.add_parser("study", help="Run the convergence studies of a study file.")
    study.add_argument("--config", required=True, help="JSON study file (one study or {\"studies\": [...]}).")
    study.add_argument("--out", required=True, help="Directory for the CSV and JSON outputs.")

    accept = commands.add_parser("accept", help="Run an acceptance suite; exits nonzero when a criterion fails.")
    accept.add_argument("--suite", required=True, choices=SUITES)
    accept.add_argument("--out", default=None, help="Optional directory for the study outputs.")

    presets = commands.add_parser("presets", help="Print the benchmark presets as JSON.")
    presets.add_argument("name", nargs="?", choices=sorted(PRESETS), help="A single preset (default: all).")
    return parser


def _report_error(exc: Exception, debug: bool) -> None:
    if debug:
        document = {
            "detail": str(exc),
            "type": type(exc).__name__,
            "traceback": traceback.format_exc().split("\n"),
        }
        print(json.dumps(document, indent=2), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except StudySpecError as exc:
        _report_error(exc, args.debug)
        return EXIT_SPEC_ERROR
    except Exception as exc:
        _report_error(exc, args.debug)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
