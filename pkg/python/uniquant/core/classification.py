"""Equal-cardinality classification of a point cloud.

N = c n points are split into n classes of exactly c points. Class k sits
in a cube of diameter at most 4 r k^(-1/d), where r is the largest max-norm
of the points, and the mean distance to the cube centers is at most
4 r f_{1,d}(n).
"""

import math
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from uniquant.core.decomposition import (
    cell_cube,
    cell_masses,
    degenerate_cube,
    heaviest_cell,
    partition_faces,
    partition_resolution,
)
from uniquant.core.measure import Cube
from uniquant.core.quantization import rate_bound
from uniquant.errors import EmptyMeasure, FormatError, IndivisibleCount, InvalidParameter
from uniquant.typedefs import Coords, FloatArray, IntArray, JsonDict

logger = getLogger(__name__)


def point_set_diameter(points: Coords) -> float:
    """Max-norm diameter of a finite point set."""
    if points.shape[0] == 0:
        return 0.0
    return float(np.max(points.max(axis=0) - points.min(axis=0)))


@dataclass(frozen=True, eq=False)
class BalancedClassification:
    """n classes of c point indices each, with their cubes and representatives.

    Class k (1-based, as in the diameter bound 4 r k^(-1/d)) is stored at
    position k - 1. Point indices are 0-based.
    """

    n: int
    c: int
    r: float
    classes: list[IntArray]
    cubes: list[Cube]
    representatives: Coords

    @property
    def d(self) -> int:
        return self.representatives.shape[1]

    def labels(self) -> IntArray:
        """Class position k - 1 of every point."""
        labels = np.full(self.n * self.c, -1, dtype=np.int64)
        for position, members in enumerate(self.classes):
            labels[members] = position
        return labels

    def diameter_bounds(self) -> FloatArray:
        k = np.arange(1, self.n + 1, dtype=np.float64)
        return 4 * self.r * k ** (-1.0 / self.d)

    def class_diameters(self, points: Coords) -> FloatArray:
        return np.array([point_set_diameter(points[members]) for members in self.classes])

    def violations(self, points: Coords) -> list[str]:
        """Broken invariants as readable messages; empty when valid."""
        problems: list[str] = []
        counts = np.bincount(np.concatenate(self.classes), minlength=self.n * self.c)
        if np.any(counts != 1):
            problems.append("classes do not partition the points")
        for k, (members, cube, bound) in enumerate(
            zip(self.classes, self.cubes, self.diameter_bounds(), strict=True), start=1
        ):
            if members.shape[0] != self.c:
                problems.append(f"class {k}: {members.shape[0]} points, expected {self.c}")
            if not np.all(cube.contains(points[members])):
                problems.append(f"class {k}: points leave the cube")
            if point_set_diameter(points[members]) > cube.diameter:
                problems.append(f"class {k}: point diameter exceeds cube diameter")
            if cube.diameter > bound:
                problems.append(f"class {k}: Diam {cube.diameter!r} > {bound!r}")
        return problems

    def to_dict(self, points: Coords | None = None) -> JsonDict:
        data: JsonDict = {
            "n": self.n,
            "c": self.c,
            "classes": [[int(i) for i in members] for members in self.classes],
            "representatives": [[float(x) for x in rep] for rep in self.representatives],
        }
        if points is not None:
            data["cost"] = classification_cost(self, points)
            data["cost_bound"] = cost_bound(self)
        return data


def _as_points(points: Coords) -> Coords:
    array = np.asarray(points, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[1] < 1:  # noqa: PLR2004
        msg = f"Points must form an (N, d) array, got shape {array.shape}"
        raise FormatError(msg)
    if not np.all(np.isfinite(array)):
        msg = "Point coordinates must be finite"
        raise FormatError(msg)
    return array


def classify(points: Coords, n: int) -> BalancedClassification:
    """Split N = c n points into n classes of c points each.

    Works on the counting measure of the points not yet assigned. At step
    j = n, ..., 1 there are j c of them, the regular partition of B_r into
    floor(j^(1/d))^d cells has a cell holding at least c, and class j takes
    the c points of smallest index in the first such heaviest cell.

    Raises:
        IndivisibleCount: if n does not divide N
        EmptyMeasure: if there are no points

    """
    points = _as_points(points)
    total, d = points.shape
    if n < 1:
        msg = f"n must be a positive integer, got {n}"
        raise InvalidParameter(msg)
    if total == 0:
        msg = "Cannot classify an empty point cloud"
        raise EmptyMeasure(msg)
    if total % n:
        msg = f"{total} points cannot be split into {n} classes of equal size"
        raise IndivisibleCount(msg)
    c = total // n
    r = float(np.abs(points).max())
    logger.info(f"Classifying {total} points (d={d}, r={r:g}) into {n} classes of {c}")

    unassigned = np.ones(total, dtype=bool)
    classes: list[IntArray] = []
    cubes: list[Cube] = []
    for j in range(n, 0, -1):
        free = np.flatnonzero(unassigned)
        if r == 0:
            cube = degenerate_cube(d)
            members = free[:c]
        else:
            m = partition_resolution(j, d)
            faces = partition_faces(r, m)
            counts = cell_masses(points[free], np.ones(free.shape[0]), faces)
            flat = heaviest_cell(counts)
            multi_index = tuple(int(i) for i in np.unravel_index(flat, (m,) * d))
            cube = cell_cube(faces, multi_index)
            members = free[cube.contains(points[free])][:c]
        unassigned[members] = False
        classes.append(members)
        cubes.append(cube)

    classes.reverse()
    cubes.reverse()
    representatives = np.array([cube.center for cube in cubes]).reshape(n, d)
    return BalancedClassification(n=n, c=c, r=r, classes=classes, cubes=cubes, representatives=representatives)


def classification_cost(cls: BalancedClassification, points: Coords) -> float:
    """Mean max-norm distance N^-1 sum_i ||x_i - xbar_k(i)||."""
    points = _as_points(points)
    distances = np.abs(points - cls.representatives[cls.labels()]).max(axis=1)
    return math.fsum(distances.tolist()) / points.shape[0]


def cost_bound(cls: BalancedClassification) -> float:
    """4 r f_{1,d}(n), the guaranteed ceiling of :func:`classification_cost`."""
    return 4 * cls.r * rate_bound(1, cls.d, cls.n)
