"""Seeded random measures shared by the tests."""

import numpy as np

from uniquant.core.measure import DiscreteMeasure


def random_measure(seed: int, d: int | None = None, max_atoms: int = 200) -> DiscreteMeasure:
    """Probability measure with clustered, duplicated and zero-weight atoms."""
    rng = np.random.default_rng(seed)
    d = d or int(rng.integers(1, 4))
    size = int(rng.integers(1, max_atoms + 1))
    scale = float(rng.uniform(0.1, 10.0))
    points = rng.uniform(-scale, scale, size=(size, d))
    if size > 3:
        points[: size // 4] = points[0]
    weights = rng.dirichlet(np.ones(size))
    if size > 2:
        weights[-1] = 0.0
        weights /= weights.sum()
    return DiscreteMeasure(points, weights)


