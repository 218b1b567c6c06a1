import pytest

from uniquant.core.measure import DiscreteMeasure


@pytest.fixture
def two_dirac() -> DiscreteMeasure:
    return DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
