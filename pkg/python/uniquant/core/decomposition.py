"""Heavy-cube search and the iterative uniform decomposition.

A probability measure rho supported in B_r is split into n pieces of mass
exactly 1/n. Piece k lives in a cube A_k with Diam(A_k) <= 4 r k^(-1/d).
The cubes come from a pigeonhole argument: partitioning B_r into
floor((n |nu|)^(1/d))^d congruent cells, one cell carries at least 1/n.
"""

import math
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from uniquant.core.measure import (
    MASS_TOL,
    PROBABILITY_TOL,
    Cube,
    DiscreteMeasure,
    bounding_radius,
    split_weights,
)
from uniquant.errors import InsufficientTotalMass, InvalidParameter
from uniquant.typedefs import Coords, FloatArray, IntArray, JsonDict, MultiIndex, Weights

logger = getLogger(__name__)

ROOT_TOL = 1e-9
TIE_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-9


def partition_resolution(count: float, d: int) -> int:
    """Largest m with m^d <= count, tolerant to rounding of count.

    ``count ** (1 / d)`` alone misses perfect powers (8 ** (1 / 3) < 2), which
    would halve the resolution of the partition.
    """
    slack = ROOT_TOL * max(1.0, count)
    if count < 1 - slack:
        return 0
    m = max(1, math.floor(count ** (1.0 / d)))
    while m > 1 and m**d > count + slack:
        m -= 1
    while (m + 1) ** d <= count + slack:
        m += 1
    return m


def cell_diameter_bound(n: int, mass: float, r: float, d: int) -> tuple[float, float]:
    """Diameter of the partition cells and the bound 4 r (n |nu|)^(-1/d) it satisfies."""
    count = n * mass
    m = partition_resolution(count, d)
    if m < 1:
        msg = f"n * |nu| = {count} is below 1"
        raise InsufficientTotalMass(msg)
    return 2 * r / m, 4 * r * count ** (-1.0 / d)


def partition_faces(r: float, m: int) -> FloatArray:
    """Faces of the regular m-cell partition of [-r, r], shared by every axis."""
    return np.linspace(-r, r, m + 1)


def cell_indices(points: Coords, faces: FloatArray) -> IntArray:
    """Per-axis cell index of every point; the last cell is closed above."""
    m = faces.shape[0] - 1
    idx = np.searchsorted(faces, points, side="right") - 1
    return np.clip(idx, 0, m - 1)


def cell_cube(faces: FloatArray, multi_index: MultiIndex) -> Cube:
    m = faces.shape[0] - 1
    idx = np.asarray(multi_index, dtype=np.int64)
    return Cube(faces[idx], faces[idx + 1], idx == m - 1)


def degenerate_cube(d: int) -> Cube:
    """The cube {0}, the whole of B_0."""
    return Cube(np.zeros(d), np.zeros(d), np.ones(d, dtype=bool))


def cell_masses(points: Coords, weights: Weights, faces: FloatArray) -> FloatArray:
    """Mass of every cell of the partition, flattened in lexicographic order."""
    m = faces.shape[0] - 1
    d = points.shape[1]
    if points.shape[0] == 0:
        return np.zeros(m**d)
    flat = np.ravel_multi_index(cell_indices(points, faces).T, (m,) * d)
    return np.bincount(flat, weights=weights, minlength=m**d)


def heaviest_cell(masses: FloatArray) -> int:
    """Flat index of the heaviest cell, lexicographically smallest among near-ties."""
    top = masses.max()
    return int(np.flatnonzero(masses >= top - TIE_TOL * max(1.0, abs(top)))[0])


@dataclass(frozen=True)
class HeavyCell:
    """Result of the heavy-cube search.

    Attributes:
        cube: the selected partition cell
        mass: its mass under the searched measure
        resolution: m, the number of cells per axis
        multi_index: position of the cell in the partition

    """

    cube: Cube
    mass: float
    resolution: int
    multi_index: MultiIndex


def find_heavy_cell(points: Coords, weights: Weights, n: int, r: float) -> HeavyCell:
    """Heavy-cube search on raw arrays; see :func:`heavy_cube`."""
    d = points.shape[1]
    mass = math.fsum(weights.tolist())
    if mass < 1.0 / n - MASS_TOL:
        msg = f"Total mass {mass!r} is below 1/n = {1.0 / n!r}"
        raise InsufficientTotalMass(msg)
    if r == 0:
        return HeavyCell(degenerate_cube(d), mass, 1, (0,) * d)
    m = partition_resolution(n * mass, d)
    faces = partition_faces(r, m)
    positive = weights > 0
    masses = cell_masses(points[positive], weights[positive], faces)
    flat = heaviest_cell(masses)
    multi_index = tuple(int(i) for i in np.unravel_index(flat, (m,) * d))
    return HeavyCell(cell_cube(faces, multi_index), float(masses[flat]), m, multi_index)


def heavy_cube(nu: DiscreteMeasure, n: int, r: float) -> Cube:
    """Cell of maximal nu-mass in the regular partition of B_r into m^d cubes.

    m = floor((n |nu|)^(1/d)). By pigeonhole the returned cube carries at least
    1/n and its diameter 2r/m is at most 4 r (n |nu|)^(-1/d).

    Raises:
        InsufficientTotalMass: if |nu| < 1/n

    """
    return find_heavy_cell(nu.points, nu.weights, n, r).cube


@dataclass(frozen=True, eq=False)
class DecompositionPiece:
    """Piece rho_k of a uniform decomposition and its cube A_k.

    ``indices`` maps the atoms of ``piece`` back to the decomposed measure.
    """

    k: int
    piece: DiscreteMeasure
    cube: Cube
    indices: IntArray

    def to_dict(self) -> JsonDict:
        return {
            "k": self.k,
            "cube": self.cube.to_dict(),
            "atoms": self.piece.to_dict()["atoms"],
        }


@dataclass(frozen=True, eq=False)
class UniformDecomposition:
    """rho = sum_k rho_k with |rho_k| = 1/n, Supp(rho_k) in A_k, Diam(A_k) <= 4 r k^(-1/d)."""

    n: int
    r: float
    d: int
    pieces: list[DecompositionPiece]
    source: DiscreteMeasure

    def piece(self, k: int) -> DecompositionPiece:
        return self.pieces[k - 1]

    def diameters(self) -> FloatArray:
        return np.array([p.cube.diameter for p in self.pieces])

    def diameter_bounds(self) -> FloatArray:
        k = np.arange(1, self.n + 1, dtype=np.float64)
        return 4 * self.r * k ** (-1.0 / self.d)

    def reconstruct(self) -> Weights:
        """Atomwise sum of the pieces, on the atom list of the source measure."""
        total = np.zeros(len(self.source))
        for p in self.pieces:
            np.add.at(total, p.indices, p.piece.weights)
        return total

    def violations(self, mass_tol: float = MASS_TOL) -> list[str]:
        """Invariants that do not hold, as readable messages; empty when valid."""
        problems: list[str] = []
        for p, bound in zip(self.pieces, self.diameter_bounds(), strict=True):
            if abs(p.piece.mass - 1.0 / self.n) > mass_tol:
                problems.append(f"piece {p.k}: mass {p.piece.mass!r} != 1/{self.n}")
            if not np.all(p.cube.contains(p.piece.points)):
                problems.append(f"piece {p.k}: support leaves its cube")
            if p.cube.diameter > bound:
                problems.append(f"piece {p.k}: Diam {p.cube.diameter!r} > {bound!r}")
        error = np.max(np.abs(self.reconstruct() - self.source.weights), initial=0.0)
        if error > RECONSTRUCTION_TOL:
            problems.append(f"reconstruction error {error!r}")
        return problems

    def to_dict(self) -> JsonDict:
        return {
            "n": self.n,
            "r": self.r,
            "d": self.d,
            "pieces": [p.to_dict() for p in self.pieces],
        }


def decompose(rho: DiscreteMeasure, n: int) -> UniformDecomposition:
    """Uniform decomposition of a probability measure into n pieces.

    Iterates j = n, ..., 1 on the remainder (mass j/n): the heavy cube A_j of
    the remainder in B_r receives the piece rho_j of mass 1/n, and the
    remainder is renormalized to (j - 1)/n. Since n |remainder| = j, the cube
    has diameter 2r / floor(j^(1/d)) <= 4 r j^(-1/d).

    Raises:
        InvalidParameter: if n < 1 or rho is not a probability measure
        InsufficientTotalMass: only on numerical drift

    """
    if n < 1:
        msg = f"n must be a positive integer, got {n}"
        raise InvalidParameter(msg)
    if not rho.is_probability(PROBABILITY_TOL):
        msg = f"Decomposition needs a probability measure, total mass is {rho.mass!r}"
        raise InvalidParameter(msg)
    r = bounding_radius(rho)
    d = rho.dim
    logger.info(f"Decomposing {len(rho)} atoms (d={d}, r={r:g}) into {n} pieces")

    points = rho.points
    weights = rho.weights / rho.mass
    pieces: list[DecompositionPiece] = []
    for j in range(n, 0, -1):
        cell = find_heavy_cell(points, weights, n, r)
        split = split_weights(points, weights, cell.cube, 1.0 / n)
        pieces.append(
            DecompositionPiece(
                k=j,
                piece=DiscreteMeasure(points[split.indices], split.piece_weights),
                cube=cell.cube,
                indices=split.indices,
            )
        )
        weights = split.remainder_weights
        left = math.fsum(weights.tolist())
        if j > 1 and left > 0:
            weights = weights * (((j - 1) / n) / left)
        logger.debug(f"  step {j}: m={cell.resolution}, cell mass {cell.mass:.6g}, remainder {left:.6g}")

    pieces.reverse()
    return UniformDecomposition(n=n, r=r, d=d, pieces=pieces, source=rho)
