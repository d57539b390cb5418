"""Command-line interface for endofuse.

This package provides the Click-based CLI running the synth, backproject,
opjpo, render and metrics stages.
"""

from endofuse.cli.main import cli

__all__ = ["cli"]
