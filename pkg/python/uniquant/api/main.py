"""API facade for uniquant.

``UniquantAPI.execute`` runs one command from a ``Settings`` object and never
raises: every failure comes back as a ``CommandResult`` with an error message
and the exit code the CLI should use.
"""

import csv
import io
import json
import logging
from dataclasses import asdict, fields
from pathlib import Path

from uniquant.api.types import CommandResult, Settings
from uniquant.common import parse_n_grid
from uniquant.core.classification import classify
from uniquant.core.decomposition import decompose
from uniquant.core.measure import (
    DiscreteMeasure,
    load_measure_file,
    parse_generator_spec,
    synth,
)
from uniquant.core.quantization import quantize, quantize_unbounded
from uniquant.core.transport import coupling_cost, exact_wasserstein
from uniquant.errors import ConfigError, FormatError, UniquantError
from uniquant.experiments.rate_curve import RateExperimentConfig, run_rate_experiment
from uniquant.performance_monitor import PerformanceProfiler
from uniquant.typedefs import CsvRow, JsonDict

logger = logging.getLogger(__name__)


def _csv_text(header: list[str], rows: list[CsvRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(payload: JsonDict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _coords(point: object) -> list[str]:
    return [repr(float(x)) for x in point]  # type: ignore[attr-defined]


class UniquantAPI:
    """Runs uniquant commands and renders their results."""

    def __init__(self) -> None:
        self.profiler = PerformanceProfiler()

    @staticmethod
    def load_settings(path: str | Path) -> Settings:
        """Read settings from a JSON file.

        Raises:
            ConfigError: if the file is unreadable or holds unknown or invalid fields

        """
        try:
            with Path(path).open(encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            msg = f"Cannot read settings from {path}: {e}"
            raise ConfigError(msg) from e
        if not isinstance(data, dict):
            msg = f"Settings file {path} must hold a JSON object"
            raise ConfigError(msg)
        known = {f.name for f in fields(Settings)}
        unknown = sorted(set(data) - known)
        if unknown:
            msg = f"Unknown settings in {path}: {', '.join(unknown)}"
            raise ConfigError(msg)
        try:
            settings = Settings(**data)
        except (TypeError, ValueError) as e:
            msg = f"Invalid settings in {path}: {e}"
            raise ConfigError(msg) from e
        logger.info(f"Settings loaded from {path}: command {settings.command}")
        return settings

    @staticmethod
    def save_settings(settings: Settings, path: str | Path) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="\n") as f:
            json.dump(asdict(settings), f, indent=2)
            f.write("\n")
        logger.info(f"Settings saved to {path}")

    def execute(self, settings: Settings) -> CommandResult:
        """Run ``settings.command`` and return its rendered result."""
        self.profiler = PerformanceProfiler()
        is_valid, error_msg = settings.validate()
        if not is_valid:
            logger.error(f"Settings validation failed: {error_msg}")
            return CommandResult(command=settings.command, success=False, error=error_msg, exit_code=2)

        handlers = {
            "decompose": self._decompose,
            "quantize": self._quantize,
            "classify": self._classify,
            "wasserstein": self._wasserstein,
            "rate-curve": self._rate_curve,
        }
        logger.info(f"Executing {settings.command} on {settings.source_label}")
        try:
            payload, text = handlers[settings.command](settings)
        except UniquantError as e:
            logger.error(f"{settings.command} failed: {type(e).__name__}: {e}")  # noqa: TRY400
            return CommandResult(
                command=settings.command,
                success=False,
                error=f"{type(e).__name__}: {e}",
                exit_code=e.exit_code,
            )
        except Exception as e:
            logger.exception(f"{settings.command} failed unexpectedly")
            return CommandResult(command=settings.command, success=False, error=str(e), exit_code=3)
        self.profiler.log_summary()
        return CommandResult(command=settings.command, success=True, payload=payload, text=text)

    def load_source(self, settings: Settings) -> DiscreteMeasure:
        return self._load(settings.input, settings.gen, settings)

    def load_target(self, settings: Settings) -> DiscreteMeasure:
        return self._load(settings.target, settings.target_gen, settings)

    def _load(self, path: str | None, gen: str | None, settings: Settings) -> DiscreteMeasure:
        with self.profiler.step("load"):
            if gen is not None:
                return synth(parse_generator_spec(gen, default_seed=settings.seed))
            if path is None:
                msg = "No measure source given"
                raise ConfigError(msg)
            try:
                return load_measure_file(Path(path), normalize=settings.normalize)
            except OSError as e:
                msg = f"Cannot read {path}: {e}"
                raise FormatError(msg) from e

    def _decompose(self, settings: Settings) -> tuple[JsonDict, str]:
        rho = self.load_source(settings)
        if settings.normalize:
            rho = rho.normalized()
        with self.profiler.step("decompose"):
            dec = decompose(rho, settings.n)  # type: ignore[arg-type]
        payload = dec.to_dict()
        if settings.format == "json":
            return payload, _json_text(payload)
        header = ["k", "atom", *(f"x{i}" for i in range(dec.d)), "w"]
        rows: list[CsvRow] = [
            [piece.k, int(i), *_coords(x), repr(float(w))]
            for piece in dec.pieces
            for i, x, w in zip(piece.indices, piece.piece.points, piece.piece.weights, strict=True)
        ]
        return payload, _csv_text(header, rows)

    def _quantize(self, settings: Settings) -> tuple[JsonDict, str]:
        rho = self.load_source(settings)
        if settings.normalize:
            rho = rho.normalized()
        with self.profiler.step("quantize"):
            if settings.q is not None:
                quantizer = quantize_unbounded(rho, settings.n, settings.p, settings.q)  # type: ignore[arg-type]
            else:
                quantizer = quantize(rho, settings.n)  # type: ignore[arg-type]
        payload = quantizer.to_dict(settings.p)
        payload["certificates"]["coupling_cost"] = coupling_cost(
            quantizer.source_decomposition, quantizer, settings.p
        )
        if settings.format == "json":
            return payload, _json_text(payload)
        header = ["k", *(f"x{i}" for i in range(quantizer.centers.shape[1]))]
        rows: list[CsvRow] = [[k, *_coords(c)] for k, c in enumerate(quantizer.centers, start=1)]
        return payload, _csv_text(header, rows)

    def _classify(self, settings: Settings) -> tuple[JsonDict, str]:
        points = self.load_source(settings).points
        with self.profiler.step("classify"):
            classification = classify(points, settings.n)  # type: ignore[arg-type]
        payload = classification.to_dict(points)
        if settings.format == "json":
            return payload, _json_text(payload)
        labels = classification.labels()
        rows: list[CsvRow] = [[i, int(label) + 1] for i, label in enumerate(labels)]
        return payload, _csv_text(["i", "k"], rows)

    def _wasserstein(self, settings: Settings) -> tuple[JsonDict, str]:
        mu = self.load_source(settings)
        nu = self.load_target(settings)
        with self.profiler.step("transport"):
            _, plan = exact_wasserstein(mu, nu, settings.p, normalize=settings.normalize)
        payload = plan.to_dict()
        if settings.format == "json":
            return payload, _json_text(payload)
        rows: list[CsvRow] = [
            [int(i), int(j), repr(float(m))] for i, j, m in zip(plan.sources, plan.targets, plan.masses, strict=True)
        ]
        return payload, _csv_text(["i", "j", "m"], rows)

    def _rate_curve(self, settings: Settings) -> tuple[JsonDict, str]:
        rho = self.load_source(settings)
        if settings.normalize:
            rho = rho.normalized()
        n_grid = parse_n_grid(settings.n_grid) if settings.n_grid is not None else [settings.n]
        config = RateExperimentConfig(
            measure=rho,
            label=settings.source_label,
            p=settings.p,
            n_grid=n_grid,  # type: ignore[arg-type]
            random_baseline=settings.random_baseline,
            trials=settings.trials,
            seed=settings.seed,
            oracle=settings.oracle,
            oracle_resolution=settings.resolution,
            workers=settings.workers,
        )
        with self.profiler.step("rate-curve"):
            curve = run_rate_experiment(config)
        payload = curve.to_dict()
        if settings.format == "json":
            return payload, curve.to_json()
        return payload, curve.to_csv()
