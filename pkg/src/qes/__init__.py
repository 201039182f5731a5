"""Quasi-exactly-solvable spectra of the quartic oscillator family y'' - (z^4 - 2bz^2 + 2Jz)y."""

__version__ = "0.1.0"
