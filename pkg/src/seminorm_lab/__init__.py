"""Seminorm toolkit.

``seminorm_lab.core`` holds the finite-dimensional interpolation engine,
``seminorm_lab.grid`` the periodic grid functions, and the top-level modules
the frequency-side seminorms, the screened Besov seminorms and the CLI.
"""
from ._backend import BACKEND
from .grid import GridFunction, GridSpec, modulus_of_continuity
from .littlewood_paley import (DyadicPartition, besov_lipschitz_seminorm, besov_seminorm,
                               build_partition, project, riesz_potential, riesz_seminorm)
from .reports import Check, EquivalenceReport
from .screened import (ScreenedParams, cube_k_decomposition, equivalence_suite,
                       generalized_frequency_seminorm, hl_decompose, highlow_decompose,
                       screened_seminorm, strichartz_seminorm)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GridFunction", "GridSpec", "modulus_of_continuity", "DyadicPartition",
    "besov_lipschitz_seminorm", "besov_seminorm", "build_partition", "project",
    "riesz_potential", "riesz_seminorm", "Check", "EquivalenceReport", "ScreenedParams",
    "cube_k_decomposition", "equivalence_suite", "generalized_frequency_seminorm",
    "hl_decompose", "highlow_decompose", "screened_seminorm", "strichartz_seminorm",
]
