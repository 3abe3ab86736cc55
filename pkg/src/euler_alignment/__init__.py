"""Uniform density bounds and numerical solvers for 1D Euler-alignment with weakly singular kernels."""

from . import bounds, eulerian, harness, kernels, lagrangian, presets
from .bounds import BoundInputs, BoundReport, Regime, compute_bounds
from .kernels import BoundedAnalytic, PowerLaw, Tabulated, constant_kernel, zero_kernel

__all__ = [
    "bounds", "eulerian", "harness", "kernels", "lagrangian", "presets",
    "BoundInputs", "BoundReport", "Regime", "compute_bounds",
    "BoundedAnalytic", "PowerLaw", "Tabulated", "constant_kernel", "zero_kernel",
]
__version__ = "0.1.0"
