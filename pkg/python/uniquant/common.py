"""Utility functions for uniquant.

This module provides logging setup, argument validators for the CLI, the
n-grid parser and output writing.
"""

import argparse
import logging
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

from uniquant.errors import InvalidSpec
from uniquant.typedefs import NGrid

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity: int = 0, log_file: str | Path | None = None) -> None:
    """Send log records to stderr, and to ``log_file`` when given.

    stdout is left to command output. Verbosity 0 shows warnings, 1 adds
    progress, 2 and up adds details.
    """
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=VERBOSITY_LEVELS.get(verbosity, logging.DEBUG),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def get_version() -> str:
    try:
        return version("uniquant")
    except PackageNotFoundError:
        return "0.0.0+local"


def get_pos_number(arg: Any) -> int:
    """Validate and convert argument to a positive integer (>= 1).

    Raises:
        argparse.ArgumentTypeError: If value is not a positive integer

    """
    try:
        value = int(arg)
        if value >= 1:
            return value
        raise ValueError
    except (TypeError, ValueError) as e:
        msg = f"Invalid value '{arg}', use a positive integer number."
        raise argparse.ArgumentTypeError(msg) from e


def get_order(arg: Any) -> float:
    """Validate a transport order p >= 1."""
    try:
        value = float(arg)
        if value >= 1:
            return value
        raise ValueError
    except (TypeError, ValueError) as e:
        msg = f"Invalid order '{arg}', use a number of at least 1."
        raise argparse.ArgumentTypeError(msg) from e


def get_pos_float(arg: Any) -> float:
    try:
        value = float(arg)
        if value > 0:
            return value
        raise ValueError
    except (TypeError, ValueError) as e:
        msg = f"Invalid value '{arg}', use a positive number."
        raise argparse.ArgumentTypeError(msg) from e


def _int_field(text: str, spec: str) -> int:
    try:
        return int(text)
    except ValueError as e:
        msg = f"n-grid '{spec}': '{text}' is not an integer"
        raise InvalidSpec(msg) from e


def parse_n_grid(spec: str) -> NGrid:
    """Expand an n-grid string into a sorted list of distinct positive integers.

    Accepted forms: ``4:100`` (inclusive range), ``4:100:2`` (range with step),
    ``8,16,32`` (list), ``odd:3:41`` (odd values of a range) and
    ``pow2:8:1024`` (powers of two in a range).

    Raises:
        InvalidSpec: if the string matches none of these forms

    """
    text = spec.strip()
    if not text:
        msg = "Empty n-grid"
        raise InvalidSpec(msg)
    kind, _, rest = text.partition(":")
    match kind:
        case "odd" | "pow2":
            bounds = [_int_field(part, spec) for part in rest.split(":")]
            if len(bounds) != 2:  # noqa: PLR2004
                msg = f"n-grid '{spec}' needs the form {kind}:LOW:HIGH"
                raise InvalidSpec(msg)
            low, high = bounds
            if kind == "odd":
                values = [n for n in range(low, high + 1) if n % 2 == 1]
            else:
                values = [2**e for e in range(high.bit_length() + 1) if low <= 2**e <= high]
        case _ if "," in text:
            values = [_int_field(part.strip(), spec) for part in text.split(",") if part.strip()]
        case _ if ":" in text:
            fields = [_int_field(part, spec) for part in text.split(":")]
            if len(fields) not in (2, 3) or (len(fields) == 3 and fields[2] < 1):  # noqa: PLR2004
                msg = f"n-grid '{spec}' needs the form LOW:HIGH or LOW:HIGH:STEP"
                raise InvalidSpec(msg)
            step = fields[2] if len(fields) == 3 else 1  # noqa: PLR2004
            values = list(range(fields[0], fields[1] + 1, step))
        case _:
            values = [_int_field(text, spec)]
    if not values or any(n < 1 for n in values):
        msg = f"n-grid '{spec}' must produce positive integers"
        raise InvalidSpec(msg)
    return sorted(set(values))


def ensure_directory_exists(dir_path: str | Path) -> bool:
    try:
        Path(dir_path).mkdir(parents=True, exist_ok=True)
    except OSError:
        return False
    return True


def write_output(text: str, out: str | Path | None) -> None:
    """Write command output to ``out``, or to stdout when no path is given.

    Files are written with ``\\n`` line endings so reruns are byte-identical.
    """
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    ensure_directory_exists(path.parent)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        file.write(text)
