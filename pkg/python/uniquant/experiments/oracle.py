"""Brute-force search for the best uniformly weighted quantizer.

The search runs over center multisets drawn from a candidate set: a regular
grid of the given resolution over B_r, the support of rho, and any extra
positions supplied by the caller. Its minimum is an upper bound on the
optimal deterministic error that converges to it as the grid refines.

Three modes are available:

- ``separable`` (d = 1): with sorted centers the quantile coupling matches
  center k with the quantile interval ((k - 1)/n, k/n] of rho, so every
  center is optimized on its own interval. Exact over candidate multisets.
- ``exhaustive``: every multiset of n candidates, within an evaluation budget.
- ``descent``: coordinate descent from deterministic starting multisets.
"""

import itertools
import math
from dataclasses import dataclass
from logging import getLogger
from typing import Literal

import numpy as np

from uniquant.core.measure import DiscreteMeasure, bounding_radius
from uniquant.core.transport import wasserstein
from uniquant.errors import InvalidParameter, ProblemTooLarge
from uniquant.typedefs import Coords, FloatArray, JsonDict

logger = getLogger(__name__)

type OracleMode = Literal["auto", "separable", "exhaustive", "descent"]

MAX_CANDIDATES = 20_000
MAX_EVALUATIONS = 200_000
MAX_EXHAUSTIVE_N = 6
MAX_DESCENT_N = 16
MAX_DESCENT_SWEEPS = 50
CHUNK_ENTRIES = 4_000_000
IMPROVEMENT_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Best center multiset found and its exact W_p error."""

    value: float
    centers: Coords
    mode: OracleMode
    evaluations: int

    def to_dict(self) -> JsonDict:
        return {
            "value": self.value,
            "mode": self.mode,
            "evaluations": self.evaluations,
            "centers": [[float(x) for x in c] for c in self.centers],
        }


def candidate_grid(r: float, d: int, resolution: float) -> Coords:
    """Regular grid over B_r with spacing at most ``resolution``, faces included."""
    if not resolution > 0:
        msg = f"Grid resolution must be positive, got {resolution}"
        raise InvalidParameter(msg)
    if r == 0:
        return np.zeros((1, d))
    per_axis = math.ceil(2 * r / resolution - 1e-9) + 1
    if per_axis**d > MAX_CANDIDATES:
        msg = f"Candidate grid of {per_axis}^{d} points exceeds {MAX_CANDIDATES}"
        raise ProblemTooLarge(msg)
    axis = np.linspace(-r, r, per_axis)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def candidate_set(
    rho: DiscreteMeasure,
    resolution: float,
    extra_candidates: Coords | None = None,
) -> Coords:
    r = bounding_radius(rho)
    parts = [candidate_grid(r, rho.dim, resolution), rho.positive_part().points]
    if extra_candidates is not None:
        parts.append(np.asarray(extra_candidates, dtype=np.float64).reshape(-1, rho.dim))
    candidates = np.unique(np.vstack(parts), axis=0)
    if candidates.shape[0] > MAX_CANDIDATES:
        msg = f"{candidates.shape[0]} candidate centers exceed {MAX_CANDIDATES}"
        raise ProblemTooLarge(msg)
    return candidates


def _uniform(centers: Coords) -> DiscreteMeasure:
    n = centers.shape[0]
    return DiscreteMeasure(centers, np.full(n, 1.0 / n))


def quantile_overlaps(rho: DiscreteMeasure, n: int) -> tuple[FloatArray, FloatArray]:
    """Sorted atoms of a measure on the line and the mass each gives to every quantile interval.

    Returns (atoms, overlaps) where overlaps[k, i] is the length of
    ((k - 1)/n, k/n] intersected with the quantile interval of atom i.
    """
    positive = rho.normalized().positive_part()
    order = np.argsort(positive.points[:, 0], kind="stable")
    atoms = positive.points[order, 0]
    upper = np.cumsum(positive.weights[order])
    upper[-1] = 1.0
    lower = np.concatenate([[0.0], upper[:-1]])
    k = np.arange(n, dtype=np.float64)
    left, right = k / n, (k + 1) / n
    overlaps = np.minimum(right[:, np.newaxis], upper) - np.maximum(left[:, np.newaxis], lower)
    return atoms, np.maximum(overlaps, 0.0)


def _separable(rho: DiscreteMeasure, n: int, p: float, candidates: Coords) -> OracleResult:
    atoms, overlaps = quantile_overlaps(rho, n)
    values = candidates[:, 0]
    best_cost = np.full(n, np.inf)
    best_index = np.zeros(n, dtype=np.int64)
    chunk = max(1, CHUNK_ENTRIES // max(1, atoms.shape[0]))
    for start in range(0, values.shape[0], chunk):
        block = values[start : start + chunk]
        costs = overlaps @ (np.abs(block[:, np.newaxis] - atoms) ** p).T
        index = costs.argmin(axis=1)
        cost = costs[np.arange(n), index]
        better = cost < best_cost
        best_cost[better] = cost[better]
        best_index[better] = start + index[better]
    centers = np.sort(values[best_index]).reshape(n, 1)
    value = wasserstein(_uniform(centers), rho, p, normalize=True)
    return OracleResult(value=value, centers=centers, mode="separable", evaluations=values.shape[0] * n)


def _exhaustive(
    rho: DiscreteMeasure, n: int, p: float, candidates: Coords, max_evaluations: int
) -> OracleResult:
    total = math.comb(candidates.shape[0] + n - 1, n)
    if n > MAX_EXHAUSTIVE_N or total > max_evaluations:
        msg = f"Exhaustive search over {total} multisets of {n} centers is infeasible"
        raise ProblemTooLarge(msg)
    best_value = math.inf
    best: tuple[int, ...] = (0,) * n
    for combo in itertools.combinations_with_replacement(range(candidates.shape[0]), n):
        value = wasserstein(_uniform(candidates[list(combo)]), rho, p, normalize=True)
        if value < best_value - IMPROVEMENT_TOL:
            best_value, best = value, combo
    return OracleResult(value=best_value, centers=candidates[list(best)], mode="exhaustive", evaluations=total)


def _starts(rho: DiscreteMeasure, n: int, candidates: Coords, extra_candidates: Coords | None) -> list[Coords]:
    starts: list[Coords] = []
    if extra_candidates is not None:
        extra = np.asarray(extra_candidates, dtype=np.float64).reshape(-1, rho.dim)
        if extra.shape[0] == n:
            starts.append(extra)
    positive = rho.positive_part()
    heaviest = np.argsort(-positive.weights, kind="stable")
    starts.append(positive.points[np.resize(heaviest, n)])
    spread = np.linspace(0, candidates.shape[0] - 1, n).round().astype(np.int64)
    starts.append(candidates[spread])
    return starts


def _descent(
    rho: DiscreteMeasure,
    n: int,
    p: float,
    candidates: Coords,
    extra_candidates: Coords | None,
    max_evaluations: int,
) -> OracleResult:
    evaluations = 0
    best_value = math.inf
    best_centers = candidates[:1].repeat(n, axis=0)
    for start in _starts(rho, n, candidates, extra_candidates):
        centers = start.copy()
        value = wasserstein(_uniform(centers), rho, p, normalize=True)
        evaluations += 1
        for _ in range(MAX_DESCENT_SWEEPS):
            improved = False
            for k in range(n):
                for candidate in candidates:
                    if evaluations >= max_evaluations:
                        break
                    trial = centers.copy()
                    trial[k] = candidate
                    trial_value = wasserstein(_uniform(trial), rho, p, normalize=True)
                    evaluations += 1
                    if trial_value < value - IMPROVEMENT_TOL:
                        centers, value, improved = trial, trial_value, True
            if not improved or evaluations >= max_evaluations:
                break
        logger.debug(f"Descent start finished at {value:.6g} after {evaluations} evaluations")
        if value < best_value:
            best_value, best_centers = value, centers
    return OracleResult(value=best_value, centers=best_centers, mode="descent", evaluations=evaluations)


def optimal_uniform_search(
    rho: DiscreteMeasure,
    n: int,
    p: float,
    grid_resolution: float,
    *,
    mode: OracleMode = "auto",
    extra_candidates: Coords | None = None,
    max_evaluations: int = MAX_EVALUATIONS,
) -> OracleResult:
    """Best uniformly weighted quantizer over the candidate set, with its centers.

    ``auto`` picks ``separable`` on the line, ``exhaustive`` when the number
    of multisets fits the budget and ``descent`` otherwise.

    Raises:
        ProblemTooLarge: if the candidate set or the combinatorics are too large

    """
    if n < 1:
        msg = f"n must be a positive integer, got {n}"
        raise InvalidParameter(msg)
    candidates = candidate_set(rho, grid_resolution, extra_candidates)
    if mode == "auto":
        if rho.dim == 1:
            mode = "separable"
        elif n <= MAX_EXHAUSTIVE_N and math.comb(candidates.shape[0] + n - 1, n) <= max_evaluations:
            mode = "exhaustive"
        else:
            mode = "descent"
    logger.info(f"Oracle search n={n}, {candidates.shape[0]} candidates, mode {mode}")
    match mode:
        case "separable":
            if rho.dim != 1:
                msg = "Separable search needs a measure on the line"
                raise InvalidParameter(msg)
            return _separable(rho, n, p, candidates)
        case "exhaustive":
            return _exhaustive(rho, n, p, candidates, max_evaluations)
        case "descent":
            if n > MAX_DESCENT_N:
                msg = f"Coordinate descent is limited to n <= {MAX_DESCENT_N} centers, got {n}"
                raise ProblemTooLarge(msg)
            return _descent(rho, n, p, candidates, extra_candidates, max_evaluations)
        case _:
            msg = f"Unknown oracle mode {mode!r}"
            raise InvalidParameter(msg)


def brute_force_optimal_uniform(
    rho: DiscreteMeasure,
    n: int,
    p: float,
    grid_resolution: float,
    *,
    mode: OracleMode = "auto",
    extra_candidates: Coords | None = None,
) -> float:
    """Smallest W_p(n^-1 sum_k delta_{x_k}, rho) found over candidate multisets."""
    return optimal_uniform_search(
        rho, n, p, grid_resolution, mode=mode, extra_candidates=extra_candidates
    ).value
