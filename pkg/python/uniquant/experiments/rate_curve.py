"""Rate-curve experiments: measured error against the certified bounds over an n-grid."""

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from logging import getLogger

import numpy as np
from scipy import stats

from uniquant.core.measure import DiscreteMeasure
from uniquant.core.quantization import coupling_upper_bound, quantize, rate_bound
from uniquant.core.transport import coupling_cost, wasserstein
from uniquant.errors import CertificateViolation, InvalidParameter
from uniquant.experiments.baseline import random_empirical_error
from uniquant.experiments.oracle import optimal_uniform_search
from uniquant.typedefs import CsvRow, JsonDict, NGrid, SeriesName

logger = getLogger(__name__)

SANDWICH_SLACK = 1e-9
MIN_FIT_POINTS = 2

CSV_COLUMNS = ["n", "measured", "coupling_bound", "closed_form_bound", "random_baseline", "oracle_optimal"]
FIT_SERIES: tuple[SeriesName, ...] = ("measured", "coupling_bound", "random_baseline", "oracle_optimal")


@dataclass(frozen=True, eq=False)
class RateExperimentConfig:
    """One rate-curve experiment.

    Attributes:
        measure: the probability measure rho being quantized
        label: how the measure was obtained, for the JSON report
        p: transport order
        n_grid: values of n, evaluated independently
        random_baseline: also report the i.i.d. empirical error
        trials: draws per n for the random baseline
        seed: seed of the random baseline
        oracle: also report the brute-force optimal uniform error
        oracle_resolution: candidate grid spacing of the oracle
        workers: rows evaluated concurrently, 1 for sequential

    """

    measure: DiscreteMeasure
    label: str
    p: float
    n_grid: NGrid
    random_baseline: bool = False
    trials: int = 10
    seed: int = 0
    oracle: bool = False
    oracle_resolution: float = 1e-3
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.n_grid:
            msg = "The n-grid is empty"
            raise InvalidParameter(msg)
        if any(n < 1 for n in self.n_grid):
            msg = f"Every n must be a positive integer, got {self.n_grid}"
            raise InvalidParameter(msg)
        if not self.p >= 1:
            msg = f"Order p must be at least 1, got {self.p}"
            raise InvalidParameter(msg)
        if self.trials < 1:
            msg = "trials must be at least 1"
            raise InvalidParameter(msg)
        if self.workers < 1:
            msg = "workers must be at least 1"
            raise InvalidParameter(msg)


@dataclass(frozen=True)
class RateCurveRow:
    """Errors and bounds at one n.

    measured <= coupling_cost <= coupling_bound <= closed_form_bound, and
    oracle_optimal <= measured when present.
    """

    n: int
    measured: float
    coupling_cost: float
    coupling_bound: float
    closed_form_bound: float
    random_baseline: float | None = None
    random_baseline_std: float | None = None
    oracle_optimal: float | None = None

    def sandwich_violations(self, slack: float = SANDWICH_SLACK) -> list[str]:
        chain = [
            ("measured", self.measured, "coupling_cost", self.coupling_cost),
            ("coupling_cost", self.coupling_cost, "coupling_bound", self.coupling_bound),
            ("coupling_bound", self.coupling_bound, "closed_form_bound", self.closed_form_bound),
        ]
        if self.oracle_optimal is not None:
            chain.insert(0, ("oracle_optimal", self.oracle_optimal, "measured", self.measured))
        return [
            f"n={self.n}: {low_name} {low!r} > {high_name} {high!r}"
            for low_name, low, high_name, high in chain
            if low > high + slack
        ]

    def satisfies_sandwich(self, slack: float = SANDWICH_SLACK) -> bool:
        return not self.sandwich_violations(slack)

    def series(self, name: SeriesName) -> float | None:
        return getattr(self, name)

    def to_csv_row(self) -> CsvRow:
        return [self.n, *(_csv_value(getattr(self, column)) for column in CSV_COLUMNS[1:])]

    def to_dict(self) -> JsonDict:
        return {
            "n": self.n,
            "measured": self.measured,
            "coupling_cost": self.coupling_cost,
            "coupling_bound": self.coupling_bound,
            "closed_form_bound": self.closed_form_bound,
            "random_baseline": self.random_baseline,
            "random_baseline_std": self.random_baseline_std,
            "oracle_optimal": self.oracle_optimal,
        }


def _csv_value(value: float | None) -> str:
    return "" if value is None else repr(float(value))


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log(value) against log(n)."""

    slope: float
    stderr: float
    intercept: float
    points: int

    def to_dict(self) -> JsonDict:
        return {"slope": self.slope, "stderr": self.stderr, "intercept": self.intercept, "points": self.points}


def fit_slope(ns: NGrid, values: list[float | None]) -> SlopeFit | None:
    """Log-log slope over the upper half of the n-grid.

    Missing and nonpositive values are skipped. Returns None when fewer than
    two points remain.
    """
    order = np.argsort(ns, kind="stable")
    pairs = [(ns[i], values[i]) for i in order]
    upper = pairs[len(pairs) // 2 :]
    usable = [(n, v) for n, v in upper if v is not None and v > 0]
    if len({n for n, _ in usable}) < MIN_FIT_POINTS:
        return None
    x = np.log([n for n, _ in usable])
    y = np.log([v for _, v in usable])
    fit = stats.linregress(x, y)
    return SlopeFit(slope=float(fit.slope), stderr=float(fit.stderr), intercept=float(fit.intercept), points=len(usable))


@dataclass(frozen=True, eq=False)
class RateCurve:
    """Rows sorted by n and the slope fit of every reported series."""

    config: RateExperimentConfig
    rows: list[RateCurveRow]
    fits: dict[SeriesName, SlopeFit | None] = field(default_factory=dict)

    def violations(self) -> list[str]:
        return [problem for row in self.rows for problem in row.sandwich_violations()]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.to_csv_row())
        return buffer.getvalue()

    def to_dict(self) -> JsonDict:
        return {
            "measure": self.config.label,
            "p": self.config.p,
            "d": self.config.measure.dim,
            "rows": [row.to_dict() for row in self.rows],
            "fits": {name: None if fit is None else fit.to_dict() for name, fit in self.fits.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def evaluate_row(config: RateExperimentConfig, n: int) -> RateCurveRow:
    """Quantize at one n and measure the exact error next to every bound."""
    rho = config.measure
    quantizer = quantize(rho, n)
    dec = quantizer.source_decomposition
    measured = wasserstein(quantizer.empirical_measure(), rho, config.p, normalize=True)
    baseline = (
        random_empirical_error(rho, n, config.p, config.trials, config.seed) if config.random_baseline else None
    )
    oracle = (
        optimal_uniform_search(rho, n, config.p, config.oracle_resolution, extra_candidates=quantizer.centers)
        if config.oracle
        else None
    )
    row = RateCurveRow(
        n=n,
        measured=measured,
        coupling_cost=coupling_cost(dec, quantizer, config.p),
        coupling_bound=coupling_upper_bound(dec, config.p),
        closed_form_bound=4 * dec.r * rate_bound(config.p, dec.d, n),
        random_baseline=None if baseline is None else baseline.mean,
        random_baseline_std=None if baseline is None else baseline.std,
        oracle_optimal=None if oracle is None else oracle.value,
    )
    logger.info(f"n={n}: measured {measured:.6g}, closed-form bound {row.closed_form_bound:.6g}")
    return row


def run_rate_experiment(config: RateExperimentConfig, *, strict: bool = True) -> RateCurve:
    """Evaluate every n of the grid and fit log-log slopes.

    Rows run concurrently when ``config.workers`` > 1 and are reported in
    increasing n whatever their completion order.

    Raises:
        CertificateViolation: if ``strict`` and a row breaks its sandwich

    """
    ns = sorted(set(config.n_grid))
    logger.info(f"Rate experiment on {config.label}: p={config.p}, {len(ns)} values of n")
    rows: list[RateCurveRow] = []
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            futures = [executor.submit(evaluate_row, config, n) for n in ns]
            rows.extend(future.result() for future in as_completed(futures))
    else:
        rows.extend(evaluate_row(config, n) for n in ns)
    rows.sort(key=lambda row: row.n)

    curve_ns = [row.n for row in rows]
    fits = {
        name: fit_slope(curve_ns, [row.series(name) for row in rows])
        for name in FIT_SERIES
        if any(row.series(name) is not None for row in rows)
    }
    curve = RateCurve(config=config, rows=rows, fits=fits)
    problems = curve.violations()
    if problems:
        for problem in problems:
            logger.error(problem)
        if strict:
            msg = f"{len(problems)} sandwich violations, first: {problems[0]}"
            raise CertificateViolation(msg)
    if (fit := fits.get("measured")) is not None and math.isfinite(fit.slope):
        logger.info(f"Measured slope {fit.slope:.4f} +/- {fit.stderr:.4f}")
    return curve
