"""uniquant API layer.

This package provides the settings, the result envelope and the facade that
runs commands for the CLI.
"""

from uniquant.api.main import UniquantAPI
from uniquant.api.types import CommandResult, Settings

__all__ = ["CommandResult", "Settings", "UniquantAPI"]
