"""Braid monodromy and fundamental groups of real tetragonal curves and plane sextics."""

from __future__ import annotations

__version__ = "0.1.0"
