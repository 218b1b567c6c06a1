"""Random empirical quantization, the i.i.d. baseline of the rate experiments."""

import math
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from uniquant.core.measure import DiscreteMeasure
from uniquant.core.transport import wasserstein
from uniquant.errors import InvalidParameter
from uniquant.typedefs import JsonDict

logger = getLogger(__name__)


@dataclass(frozen=True)
class RandomBaseline:
    """Sample mean and standard deviation of W_p over independent draws."""

    mean: float
    std: float
    errors: tuple[float, ...]

    @property
    def trials(self) -> int:
        return len(self.errors)

    def to_dict(self) -> JsonDict:
        return {"mean": self.mean, "std": self.std, "trials": self.trials}


def random_empirical_error(
    rho: DiscreteMeasure,
    n: int,
    p: float,
    trials: int,
    seed: int,
) -> RandomBaseline:
    """W_p between rho and the empirical measure of n i.i.d. draws from rho.

    The generator is seeded with (seed, n) so every row of an experiment draws
    its own reproducible stream, independent of the order rows are computed in.
    """
    if trials < 1:
        msg = f"trials must be at least 1, got {trials}"
        raise InvalidParameter(msg)
    if n < 1:
        msg = f"n must be a positive integer, got {n}"
        raise InvalidParameter(msg)
    rng = np.random.default_rng([seed, n])
    probabilities = rho.weights / rho.weights.sum()
    errors: list[float] = []
    for _ in range(trials):
        draws = rng.choice(len(rho), size=n, p=probabilities)
        empirical = DiscreteMeasure(rho.points[draws], np.full(n, 1.0 / n))
        errors.append(wasserstein(empirical, rho, p, normalize=True))
    mean = math.fsum(errors) / trials
    std = float(np.std(errors, ddof=1)) if trials > 1 else 0.0
    logger.debug(f"Random baseline n={n}: mean {mean:.6g}, std {std:.6g} over {trials} trials")
    return RandomBaseline(mean=mean, std=std, errors=tuple(errors))
