"""Loopshaped MPC - frequency-shaped SLQ trajectory optimization for a kinodynamic quadruped."""

__version__ = "0.1.0"
