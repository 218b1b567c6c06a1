"""uniquant test suite.

Unit tests for every module plus the acceptance runs marked ``slow``.
"""

__all__ = []
