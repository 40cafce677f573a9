"""Closed-form spectral solutions of the radial Maxwellian Boltzmann equation
with a non-cutoff ``sin^-2`` angular kernel."""

from __future__ import annotations

__version__ = "0.1.0"
