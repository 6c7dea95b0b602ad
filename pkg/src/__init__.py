"""GRAND - graph reconstruction from common-neighbors matrices."""

__version__ = "0.1.0"
