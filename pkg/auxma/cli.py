"""Command line entry point.

::

    auxma <experiment> --config run.yaml [--out DIR] [--seed N] [--quiet]
    auxma validate-config --config run.yaml
    auxma list

Exit status is 0 when every gated check passes, 1 when a check fails or an
experiment stage raises, and 2 for configuration errors.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .config import load_config
from .constants import ExperimentName
from .errors import AuxmaError, ConfigError, StageFailure
from .experiments.runners import available
from .internal.file import FORMATS
from .lab import Laboratory

__all__ = ("main", "build_parser")

logger = logging.getLogger("auxma.lab")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")

    parser = argparse.ArgumentParser(prog="auxma", description="Numerical lab for the auxiliary Monge-Ampère method.")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("list", parents=[common], help="List the available experiments.")
    validate = commands.add_parser("validate-config", parents=[common], help="Parse a config and print it resolved.")
    validate.add_argument("--config", required=True, help="Path to the YAML config.")

    for name, summary in available():
        sub = commands.add_parser(name, parents=[common], help=summary)
        sub.add_argument("--config", required=True, help="Path to the YAML config.")
        sub.add_argument("--out", default=None, help="Output directory (overrides AUXMA_OUT_DIR and the config).")
        sub.add_argument("--seed", type=int, default=None, help="Density seed (overrides the config).")
        sub.add_argument("--field-format", choices=FORMATS, default="binary", dest="field_format")
    return parser


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config, ExperimentName(args.command)).resolved(seed=args.seed, out=args.out)
    lab = Laboratory(field_format=args.field_format)
    try:
        result = lab.run(config)
    finally:
        lab.close()

    for name, ok in result.checks.items():
        logger.info("check %-32s %s", name, "ok" if ok else "FAILED")
    for name, ok in result.controls.items():
        logger.info("control %-30s %s", name, "broke" if ok else "HELD")
    logger.info("%s %s; artifacts in %s", config.experiment.value, "passed" if result.passed else "failed", config.output_dir())
    return EXIT_OK if result.passed else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "list":
            for name, summary in available():
                print(f"{name:16s} {summary}")
            return EXIT_OK
        if args.command == "validate-config":
            config = load_config(args.config)
            print(f"{args.config}: ok ({config.experiment.value}, n={config.n}, N={config.N})")
            return EXIT_OK
        return _run(args)
    except ConfigError as error:
        logger.error("config error: %s", error)
        return EXIT_CONFIG
    except StageFailure as error:
        logger.error("%s: %s", error, error.diagnostics.get("error", ""))
        return EXIT_FAILED
    except AuxmaError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
