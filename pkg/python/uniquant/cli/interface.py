"""Command-line interface for uniquant.

This module provides the ``uniquant`` entry point with one subcommand per
operation: decompose, quantize, classify, wasserstein and rate-curve.
"""

import argparse
import sys
from dataclasses import asdict, fields

from uniquant.api.main import UniquantAPI
from uniquant.api.types import COMMANDS, OUTPUT_FORMATS, Settings
from uniquant.common import (
    configure_logging,
    get_order,
    get_pos_float,
    get_pos_number,
    get_version,
    write_output,
)
from uniquant.errors import ConfigError

EXIT_CONFIG_ERROR = 2

COMMAND_HELP = {
    "decompose": "Split a probability measure into n pieces of mass 1/n in small cubes",
    "quantize": "Build the deterministic n-point quantizer and its certified bounds",
    "classify": "Split N = c n points into n classes of c points",
    "wasserstein": "Exact W_p between two measures with an optimal plan",
    "rate-curve": "Measured error and bounds over a grid of n, with log-log slopes",
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)

    source = common.add_mutually_exclusive_group()
    source.add_argument("--input", metavar="PATH", help="Measure file (.csv with columns x0..,w or .json)")
    source.add_argument(
        "--gen",
        metavar="SPEC",
        help="Generated measure, e.g. grid:d=2,m=50,r=1, twodirac:gap=1, sample:dist=pareto,q=2,N=10000",
    )
    common.add_argument("--normalize", action="store_true", help="Rescale input weights to total mass 1")
    common.add_argument("--n", type=get_pos_number, help="Number of pieces, centers or classes")
    common.add_argument("--p", type=get_order, help="Transport order p >= 1 (default: 1)")
    common.add_argument("--seed", type=int, help="Seed for sampled measures and baselines (default: 0)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format (default: json)")
    common.add_argument("--out", metavar="PATH", help="Output file (default: stdout)")
    common.add_argument("--config", metavar="PATH", help="JSON settings file; flags given here override it")
    common.add_argument(
        "-v",
        "--verbose",
        dest="verbosity",
        action="count",
        help="More log output on stderr, repeat for debug details",
    )
    common.add_argument("--log-file", metavar="PATH", help="Also write the log to this file")
    return common


def create_parser() -> argparse.ArgumentParser:
    """Create the command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog="uniquant",
        description="uniquant - uniform decomposition and deterministic quantization of discrete measures",
    )
    parser.add_argument("--version", action="version", version=f"uniquant {get_version()}")
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    commands = {
        name: subparsers.add_parser(
            name, parents=[common], help=COMMAND_HELP[name], argument_default=argparse.SUPPRESS
        )
        for name in COMMANDS
    }

    commands["quantize"].add_argument(
        "--q", type=float, help="Moment order q > p; quantize after truncation for unbounded supports"
    )

    wasserstein = commands["wasserstein"].add_mutually_exclusive_group()
    wasserstein.add_argument("--target", metavar="PATH", help="Second measure file")
    wasserstein.add_argument("--target-gen", metavar="SPEC", help="Second measure as a generator spec")

    rate = commands["rate-curve"]
    rate.add_argument("--n-grid", metavar="GRID", help="Values of n: 4:100, 4:100:2, 8,16,32, odd:3:41, pow2:8:1024")
    rate.add_argument("--random-baseline", action="store_true", help="Add the i.i.d. empirical error")
    rate.add_argument("--trials", type=get_pos_number, help="Draws per n for the random baseline (default: 10)")
    rate.add_argument("--oracle", action="store_true", help="Add the brute-force optimal uniform error")
    rate.add_argument("--resolution", type=get_pos_float, help="Oracle candidate grid spacing (default: 0.001)")
    rate.add_argument("--workers", type=get_pos_number, help="Rows evaluated concurrently (default: 1)")
    return parser


def settings_from_args(args: argparse.Namespace) -> Settings:
    """Merge parsed flags over the settings file, if any, and the defaults.

    Raises:
        ConfigError: if the settings file or the merged settings are invalid

    """
    given = vars(args).copy()
    config = given.pop("config", None)
    base = UniquantAPI.load_settings(config) if config else Settings(command=given["command"])
    known = {f.name for f in fields(Settings)}
    merged = asdict(base) | {key: value for key, value in given.items() if key in known}
    try:
        return Settings(**merged)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def run(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        settings = settings_from_args(args)
    except ConfigError as e:
        configure_logging()
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    configure_logging(settings.verbosity, settings.log_file)
    result = UniquantAPI().execute(settings)
    if not result.success:
        print(f"Error: {result.error}", file=sys.stderr)
        return result.exit_code
    try:
        write_output(result.text, settings.out)
    except OSError as e:
        print(f"Error: cannot write {settings.out}: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return 0


def main() -> None:
    """Main CLI entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
