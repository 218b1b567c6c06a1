"""Type aliases used throughout uniquant."""

from typing import Any

import numpy as np
from numpy.typing import NDArray

# Array types
type FloatArray = NDArray[np.float64]
type IntArray = NDArray[np.int64]
type BoolArray = NDArray[np.bool_]
type Coords = FloatArray  # (N, d) atom or center coordinates
type Weights = FloatArray  # (N,) nonnegative atom weights

# Index types
type AtomIndex = int  # 0-based position in a measure's atom list
type ClassIndex = int  # 0-based class position, class k is stored at k - 1
type MultiIndex = tuple[int, ...]  # cell of a regular cube partition

# Experiment types
type NGrid = list[int]
type SeriesName = str  # "measured", "oracle_optimal", "random_baseline"

# Serialization types
type JsonDict = dict[str, Any]
type CsvRow = list[str | int | float]
type ValidationResult = tuple[bool, str]  # (is_valid, error_message)
