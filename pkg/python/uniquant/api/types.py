"""API data types for uniquant.

This module contains the settings and result envelope shared by the API
facade and the command line interface.
"""

from dataclasses import dataclass
from typing import Literal, get_args

from uniquant.typedefs import JsonDict, ValidationResult

type Command = Literal["decompose", "quantize", "classify", "wasserstein", "rate-curve"]
type OutputFormat = Literal["csv", "json"]

COMMANDS: tuple[str, ...] = get_args(Command.__value__)
OUTPUT_FORMATS: tuple[str, ...] = get_args(OutputFormat.__value__)
NEEDS_N: tuple[str, ...] = ("decompose", "quantize", "classify")


@dataclass
class CommandResult:
    """Outcome of one command.

    ``text`` is the rendered output (CSV or JSON) and ``payload`` the same
    result as a dictionary. On failure ``error`` holds the message and
    ``exit_code`` is 2 for configuration errors and 3 for numerical failures.
    """

    command: str
    success: bool
    payload: JsonDict | None = None
    text: str = ""
    error: str | None = None
    exit_code: int = 0


@dataclass
class Settings:
    """Everything a command needs, from CLI flags or a JSON settings file."""

    command: str = "quantize"

    # Measure sources: a file path or a generator spec string
    input: str | None = None
    gen: str | None = None
    target: str | None = None
    target_gen: str | None = None
    normalize: bool = False

    # Problem parameters
    n: int | None = None
    p: float = 1.0
    q: float | None = None
    seed: int = 0

    # Rate-curve experiments
    n_grid: str | None = None
    random_baseline: bool = False
    trials: int = 10
    oracle: bool = False
    resolution: float = 1e-3
    workers: int = 1

    # Output
    format: str = "json"
    out: str | None = None
    verbosity: int = 0
    log_file: str | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            msg = f"Unknown command '{self.command}', choose one of {', '.join(COMMANDS)}"
            raise ValueError(msg)
        if self.format not in OUTPUT_FORMATS:
            msg = f"Unknown format '{self.format}', choose csv or json"
            raise ValueError(msg)
        if self.input is not None and self.gen is not None:
            msg = "Use either input or gen, not both"
            raise ValueError(msg)
        if self.target is not None and self.target_gen is not None:
            msg = "Use either target or target_gen, not both"
            raise ValueError(msg)
        if self.n is not None and not self.n >= 1:
            msg = "n must be a positive integer"
            raise ValueError(msg)
        if not self.p >= 1:
            msg = "p must be at least 1"
            raise ValueError(msg)
        if not self.trials >= 1:
            msg = "trials must be at least 1"
            raise ValueError(msg)
        if not self.workers >= 1:
            msg = "workers must be at least 1"
            raise ValueError(msg)
        if not self.resolution > 0:
            msg = "resolution must be positive"
            raise ValueError(msg)
        if not self.verbosity >= 0:
            msg = "verbosity must be a non-negative integer"
            raise ValueError(msg)

    def validate(self) -> ValidationResult:
        """Check the fields the chosen command requires."""
        if self.input is None and self.gen is None:
            return False, f"{self.command} needs --input or --gen"
        if self.command in NEEDS_N and self.n is None:
            return False, f"{self.command} needs --n"
        if self.command == "wasserstein" and self.target is None and self.target_gen is None:
            return False, "wasserstein needs --target or --target-gen"
        if self.command == "rate-curve" and self.n_grid is None and self.n is None:
            return False, "rate-curve needs --n-grid"
        return True, ""

    @property
    def source_label(self) -> str:
        return self.gen if self.gen is not None else str(self.input)
