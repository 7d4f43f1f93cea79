"""Command-line pipeline for exact genus distributions"""

__version__ = "0.1.0"
