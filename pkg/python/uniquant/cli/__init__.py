"""uniquant Command Line Interface Package.

This package provides the ``uniquant`` command.
"""

from uniquant.cli.interface import main

__all__ = ["main"]
