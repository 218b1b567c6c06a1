"""Discrete measures, cubes and the arithmetic the decomposition is built from.

A measure is a finite list of weighted atoms in R^d. Every distance in this
package is taken in the maximum norm, so balls are axis-aligned cubes and the
centered ball of radius r is B_r = [-r, r]^d.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from logging import getLogger
from pathlib import Path
from typing import IO, Literal

import numpy as np

from uniquant.errors import (
    EmptyMeasure,
    FormatError,
    InsufficientMass,
    InvalidRadius,
    InvalidSpec,
)
from uniquant.typedefs import BoolArray, Coords, FloatArray, JsonDict, Weights

logger = getLogger(__name__)

PROBABILITY_TOL = 1e-9
MASS_TOL = 1e-12

type MeasureFormat = Literal["csv", "json"]
type GeneratorKind = Literal["grid", "twodirac", "sample"]
type SampleDistribution = Literal["gaussian", "pareto"]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite list of weighted atoms in R^d.

    Attributes:
        points: (N, d) array of atom coordinates
        weights: (N,) array of nonnegative atom weights

    Zero-weight atoms are kept so that pieces and remainders of a split share
    the atom list of the measure they came from.

    """

    points: Coords
    weights: Weights

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if points.ndim == 1:
            points = points.reshape(len(weights), -1) if len(weights) else points.reshape(0, 1)
        if points.ndim != 2 or points.shape[1] < 1:
            msg = f"Atom coordinates must form an (N, d) array with d >= 1, got shape {points.shape}"
            raise FormatError(msg)
        if points.shape[0] != weights.shape[0]:
            msg = f"{points.shape[0]} atoms but {weights.shape[0]} weights"
            raise FormatError(msg)
        if not np.all(np.isfinite(points)):
            msg = "Atom coordinates must be finite"
            raise FormatError(msg)
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            msg = "Atom weights must be finite and nonnegative"
            raise FormatError(msg)
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "weights", _frozen(weights))

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def mass(self) -> float:
        """Total mass |nu|."""
        return math.fsum(self.weights.tolist())

    def is_probability(self, tol: float = PROBABILITY_TOL) -> bool:
        return abs(self.mass - 1.0) <= tol

    @property
    def support_mask(self) -> BoolArray:
        """Atoms of positive weight."""
        return self.weights > 0

    def max_norms(self) -> FloatArray:
        """Maximum norm of every atom."""
        if len(self) == 0:
            return np.zeros(0)
        return np.abs(self.points).max(axis=1)

    def with_weights(self, weights: Weights) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, weights)

    def normalized(self) -> "DiscreteMeasure":
        """Same atoms, weights rescaled to total mass 1."""
        total = self.mass
        if total <= 0:
            msg = "Cannot normalize a measure of zero mass"
            raise EmptyMeasure(msg)
        return self.with_weights(self.weights / total)

    def positive_part(self) -> "DiscreteMeasure":
        """Atoms of positive weight only."""
        mask = self.support_mask
        return DiscreteMeasure(self.points[mask], self.weights[mask])

    def to_dict(self) -> JsonDict:
        return {
            "dim": self.dim,
            "atoms": [
                {"x": [float(c) for c in point], "w": float(w)}
                for point, w in zip(self.points, self.weights, strict=True)
            ],
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "DiscreteMeasure":
        try:
            dim = int(data["dim"])
            atoms = data["atoms"]
        except (KeyError, TypeError, ValueError) as e:
            msg = f"Measure JSON needs 'dim' and 'atoms': {e}"
            raise FormatError(msg) from e
        if dim < 1:
            msg = f"dim must be at least 1, got {dim}"
            raise FormatError(msg)
        points: list[list[float]] = []
        weights: list[float] = []
        for i, atom in enumerate(atoms):
            try:
                coords = [float(c) for c in atom["x"]]
                weight = float(atom["w"])
            except (KeyError, TypeError, ValueError) as e:
                msg = f"Atom {i} is malformed: {e}"
                raise FormatError(msg) from e
            if len(coords) != dim:
                msg = f"Atom {i} has dimension {len(coords)}, expected {dim}"
                raise FormatError(msg)
            if weight < 0:
                msg = f"Atom {i} has negative weight {weight}"
                raise FormatError(msg)
            points.append(coords)
            weights.append(weight)
        return cls(np.array(points, dtype=np.float64).reshape(len(points), dim), weights)


def point_mass(point: list[float] | FloatArray, weight: float = 1.0) -> DiscreteMeasure:
    """Dirac mass at a single point."""
    return DiscreteMeasure(np.asarray(point, dtype=np.float64).reshape(1, -1), [weight])


@dataclass(frozen=True, eq=False)
class Cube:
    """Axis-aligned cube, i.e. a ball of the maximum norm.

    The cube is stored by its faces. Membership is half-open ``[lower, upper)``
    on every axis except where ``closed_upper`` is set, which marks the upper
    face of the enclosing ball B_r. Cells of a regular partition of B_r
    therefore cover B_r exactly once.
    """

    lower: FloatArray
    upper: FloatArray
    closed_upper: BoolArray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        lower = np.array(self.lower, dtype=np.float64).reshape(-1)
        upper = np.array(self.upper, dtype=np.float64).reshape(-1)
        if self.closed_upper is None:
            closed = np.ones_like(lower, dtype=bool)
        else:
            closed = np.array(self.closed_upper, dtype=bool).reshape(-1)
        if lower.shape != upper.shape or lower.shape != closed.shape:
            msg = "Cube faces must share one dimension"
            raise ValueError(msg)
        if np.any(upper < lower):
            msg = "Cube upper faces must not lie below lower faces"
            raise ValueError(msg)
        object.__setattr__(self, "lower", _frozen(lower))
        object.__setattr__(self, "upper", _frozen(upper))
        object.__setattr__(self, "closed_upper", _frozen(closed))

    @classmethod
    def ball(cls, r: float, dim: int) -> "Cube":
        """Closed centered ball B_r = [-r, r]^d."""
        return cls(np.full(dim, -r), np.full(dim, r), np.ones(dim, dtype=bool))

    @classmethod
    def from_center(cls, center: FloatArray, half_side: float) -> "Cube":
        center = np.asarray(center, dtype=np.float64).reshape(-1)
        return cls(center - half_side, center + half_side, np.ones_like(center, dtype=bool))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> FloatArray:
        return (self.lower + self.upper) / 2

    @property
    def half_side(self) -> float:
        return float(np.max(self.upper - self.lower)) / 2

    @property
    def diameter(self) -> float:
        """Diam under the maximum norm, the largest side length."""
        return float(np.max(self.upper - self.lower))

    def contains(self, points: Coords) -> BoolArray:
        points = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        below_upper = (points < self.upper) | (self.closed_upper & (points <= self.upper))
        return np.all((points >= self.lower) & below_upper, axis=1)

    def to_dict(self) -> JsonDict:
        return {
            "center": [float(c) for c in self.center],
            "half_side": self.half_side,
        }

    def __repr__(self) -> str:
        return f"Cube(center={self.center.tolist()}, half_side={self.half_side})"


def bounding_radius(mu: DiscreteMeasure) -> float:
    """Smallest r with Supp(mu) inside B_r."""
    support = mu.support_mask
    if not np.any(support):
        msg = "Measure has no atom of positive weight"
        raise EmptyMeasure(msg)
    return float(mu.max_norms()[support].max())


@dataclass(frozen=True)
class Restriction:
    """Atomwise split of a measure by a cube, before packaging as measures."""

    indices: np.ndarray  # atoms of the piece, positive weight inside the cube
    piece_weights: Weights  # weights of those atoms in the piece
    remainder_weights: Weights  # full-length remainder weights


def split_weights(
    points: Coords,
    weights: Weights,
    cube: Cube,
    target_mass: float,
) -> Restriction:
    """Take ``target_mass`` out of the atoms inside ``cube``, proportionally.

    Raises:
        InsufficientMass: if the cube carries less than ``target_mass``

    """
    inside = cube.contains(points) & (weights > 0)
    mass_inside = math.fsum(weights[inside].tolist())
    if mass_inside <= 0 or mass_inside < target_mass - MASS_TOL:
        msg = f"Cube carries mass {mass_inside!r}, {target_mass!r} requested"
        raise InsufficientMass(msg)
    scale = target_mass / mass_inside
    indices = np.flatnonzero(inside)
    piece_weights = weights[indices] * scale
    remainder = weights.copy()
    remainder[indices] = np.maximum(weights[indices] - piece_weights, 0.0)
    return Restriction(indices, piece_weights, remainder)


def restrict_and_rescale(
    nu: DiscreteMeasure, cube: Cube, target_mass: float
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Split nu into a piece of mass ``target_mass`` inside ``cube`` and a remainder.

    The piece holds the positive-weight atoms of nu inside the cube, each
    weight scaled by target_mass / nu(cube). The remainder keeps the full atom
    list of nu, so piece + remainder reconstructs nu atomwise.

    Raises:
        InsufficientMass: if nu(cube) < target_mass - 1e-12

    """
    split = split_weights(nu.points, nu.weights, cube, target_mass)
    piece = DiscreteMeasure(nu.points[split.indices], split.piece_weights)
    return piece, nu.with_weights(split.remainder_weights)


def truncate(rho: DiscreteMeasure, r: float) -> DiscreteMeasure:
    """Keep the atoms of B_r and move all outside mass onto one atom at the origin.

    Raises:
        InvalidRadius: if r < 0

    """
    if r < 0:
        msg = f"Truncation radius must be nonnegative, got {r}"
        raise InvalidRadius(msg)
    kept = rho.max_norms() <= r
    if np.all(kept):
        return rho
    excluded = math.fsum(rho.weights[~kept].tolist())
    points = np.vstack([rho.points[kept], np.zeros((1, rho.dim))])
    weights = np.append(rho.weights[kept], excluded)
    logger.debug(f"Truncated at r={r}: {int(np.sum(~kept))} atoms, mass {excluded} moved to origin")
    return DiscreteMeasure(points, weights)


# Ingestion and persistence


def _read_text(source: IO[bytes] | IO[str] | bytes | str) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_csv(text: str) -> DiscreteMeasure:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        msg = "CSV input is empty"
        raise FormatError(msg)
    header = [cell.strip() for cell in rows[0]]
    dim = len(header) - 1
    expected = [f"x{i}" for i in range(dim)] + ["w"]
    if dim < 1 or header != expected:
        msg = f"CSV header must be {','.join(expected) if dim >= 1 else 'x0,...,w'}, got {','.join(header)}"
        raise FormatError(msg)
    points: list[list[float]] = []
    weights: list[float] = []
    for line_nr, row in enumerate(rows[1:], start=2):
        if len(row) != dim + 1:
            msg = f"Line {line_nr}: {len(row) - 1} coordinates, expected {dim}"
            raise FormatError(msg)
        try:
            values = [float(cell) for cell in row]
        except ValueError as e:
            msg = f"Line {line_nr}: {e}"
            raise FormatError(msg) from e
        if not all(math.isfinite(v) for v in values):
            msg = f"Line {line_nr}: non-finite value"
            raise FormatError(msg)
        if values[-1] < 0:
            msg = f"Line {line_nr}: negative weight {values[-1]}"
            raise FormatError(msg)
        points.append(values[:-1])
        weights.append(values[-1])
    return DiscreteMeasure(np.array(points, dtype=np.float64).reshape(len(points), dim), weights)


def load_measure(
    source: IO[bytes] | IO[str] | bytes | str,
    fmt: MeasureFormat,
    *,
    normalize: bool = False,
) -> DiscreteMeasure:
    """Parse a measure from CSV (``x0,...,x{d-1},w``) or JSON (``{"dim", "atoms"}``).

    Raises:
        FormatError: on dimension mismatches, negative weights or bad numbers

    """
    text = _read_text(source)
    if fmt == "csv":
        measure = _parse_csv(text)
    elif fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            msg = f"Invalid JSON: {e}"
            raise FormatError(msg) from e
        measure = DiscreteMeasure.from_dict(data)
    else:
        msg = f"Unknown measure format '{fmt}', use csv or json"
        raise FormatError(msg)
    if normalize:
        if measure.mass <= 0:
            msg = "Cannot normalize a measure of zero mass"
            raise FormatError(msg)
        measure = measure.normalized()
    logger.info(f"Loaded {len(measure)} atoms in dimension {measure.dim} ({fmt})")
    return measure


def measure_format_for(path: Path) -> MeasureFormat:
    match path.suffix.lower():
        case ".csv":
            return "csv"
        case ".json":
            return "json"
        case _:
            msg = f"Cannot infer measure format from '{path.name}', use a .csv or .json file"
            raise FormatError(msg)


def load_measure_file(
    path: str | Path, fmt: MeasureFormat | None = None, *, normalize: bool = False
) -> DiscreteMeasure:
    path = Path(path)
    try:
        with path.open("rb") as f:
            return load_measure(f, fmt or measure_format_for(path), normalize=normalize)
    except OSError as e:
        msg = f"Cannot read measure file {path}: {e}"
        raise FormatError(msg) from e


def dump_measure(measure: DiscreteMeasure, fmt: MeasureFormat) -> str:
    """Serialize a measure; JSON floats use repr so loading gives the same bits."""
    if fmt == "json":
        return json.dumps(measure.to_dict(), indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"x{i}" for i in range(measure.dim)] + ["w"])
    for point, weight in zip(measure.points, measure.weights, strict=True):
        writer.writerow([repr(float(c)) for c in point] + [repr(float(weight))])
    return buffer.getvalue()


def save_measure(measure: DiscreteMeasure, target: IO[str] | str | Path, fmt: MeasureFormat) -> None:
    text = dump_measure(measure, fmt)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


# Synthetic generators


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic probability measure.

    Kinds:
        grid: uniform weights on the m^d regular grid of [-r, r]^d
        twodirac: (delta_{-gap} + delta_{+gap}) / 2 in dimension 1
        sample: n_samples i.i.d. draws of ``dist`` with weights 1/n_samples

    """

    kind: GeneratorKind
    d: int = 1
    m: int = 2
    r: float = 1.0
    gap: float = 1.0
    dist: SampleDistribution = "gaussian"
    n_samples: int = 1000
    shape: float = 2.0  # Pareto tail index
    seed: int = 0

    def __str__(self) -> str:
        match self.kind:
            case "grid":
                return f"grid:d={self.d},m={self.m},r={self.r:g}"
            case "twodirac":
                return f"twodirac:gap={self.gap:g}"
            case _:
                extra = f",q={self.shape:g}" if self.dist == "pareto" else ""
                return f"sample:dist={self.dist}{extra},N={self.n_samples},d={self.d},seed={self.seed}"


_SPEC_KEYS: dict[str, dict[str, str]] = {
    "grid": {"d": "d", "m": "m", "r": "r"},
    "twodirac": {"gap": "gap"},
    "sample": {"dist": "dist", "q": "shape", "N": "n_samples", "d": "d", "seed": "seed"},
}
_INT_FIELDS = {"d", "m", "n_samples", "seed"}
_FLOAT_FIELDS = {"r", "gap", "shape"}


def parse_generator_spec(text: str, default_seed: int = 0) -> GeneratorSpec:
    """Parse ``grid:d=2,m=50,r=1``, ``twodirac:gap=1`` or ``sample:dist=pareto,q=2,N=10000``.

    Raises:
        InvalidSpec: on unknown kinds, unknown keys or malformed values

    """
    kind, _, body = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind not in _SPEC_KEYS:
        msg = f"Unknown generator '{kind}', use one of {sorted(_SPEC_KEYS)}"
        raise InvalidSpec(msg)
    values: dict[str, int | float | str] = {"seed": default_seed} if kind == "sample" else {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, raw = item.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or key not in _SPEC_KEYS[kind]:
            msg = f"Unknown or malformed key '{item}' for generator '{kind}'"
            raise InvalidSpec(msg)
        name = _SPEC_KEYS[kind][key]
        try:
            if name in _INT_FIELDS:
                values[name] = int(raw)
            elif name in _FLOAT_FIELDS:
                values[name] = float(raw)
            else:
                values[name] = raw.lower()
        except ValueError as e:
            msg = f"Invalid value for '{key}' in '{text}': {e}"
            raise InvalidSpec(msg) from e
    return GeneratorSpec(kind=kind, **values)  # type: ignore[arg-type]


def synth(spec: GeneratorSpec) -> DiscreteMeasure:
    """Build the probability measure described by ``spec``; deterministic for a fixed spec.

    Raises:
        InvalidSpec: for m < 1, N < 1, d < 1 or out-of-range parameters

    """
    if spec.d < 1:
        msg = f"Dimension must be at least 1, got {spec.d}"
        raise InvalidSpec(msg)
    match spec.kind:
        case "grid":
            if spec.m < 1:
                msg = f"Grid size m must be at least 1, got {spec.m}"
                raise InvalidSpec(msg)
            if spec.r < 0:
                msg = f"Grid radius must be nonnegative, got {spec.r}"
                raise InvalidSpec(msg)
            axis = np.linspace(-spec.r, spec.r, spec.m) if spec.m > 1 else np.zeros(1)
            mesh = np.meshgrid(*([axis] * spec.d), indexing="ij")
            points = np.stack([g.reshape(-1) for g in mesh], axis=1)
            weights = np.full(points.shape[0], 1.0 / points.shape[0])
        case "twodirac":
            if spec.gap < 0:
                msg = f"Dirac gap must be nonnegative, got {spec.gap}"
                raise InvalidSpec(msg)
            points = np.array([[-spec.gap], [spec.gap]])
            weights = np.array([0.5, 0.5])
        case "sample":
            if spec.n_samples < 1:
                msg = f"Sample size N must be at least 1, got {spec.n_samples}"
                raise InvalidSpec(msg)
            rng = np.random.default_rng(spec.seed)
            shape = (spec.n_samples, spec.d)
            match spec.dist:
                case "gaussian":
                    points = rng.standard_normal(shape)
                case "pareto":
                    if spec.shape <= 0:
                        msg = f"Pareto tail index q must be positive, got {spec.shape}"
                        raise InvalidSpec(msg)
                    signs = rng.choice(np.array([-1.0, 1.0]), size=shape)
                    points = signs * (rng.pareto(spec.shape, size=shape) + 1.0)
                case _:
                    msg = f"Unknown sample distribution '{spec.dist}', use gaussian or pareto"
                    raise InvalidSpec(msg)
            weights = np.full(spec.n_samples, 1.0 / spec.n_samples)
        case _:
            msg = f"Unknown generator kind '{spec.kind}'"
            raise InvalidSpec(msg)
    logger.debug(f"Generated {len(weights)} atoms from {spec}")
    return DiscreteMeasure(points, weights)
