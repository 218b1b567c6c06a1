"""CLI entry point for uniquant.

This module provides the main entry point for running uniquant
from the command line using `python -m uniquant.cli`.
"""

from uniquant.cli.interface import main

if __name__ == "__main__":
    main()
