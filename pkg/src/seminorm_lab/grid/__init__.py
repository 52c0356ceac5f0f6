"""Sampled periodic functions on uniform grids."""
from .field import (GridFunction, GridSpec, SpectralField, apply_multiplier, inverse_transform,
                    sample, transform)
from .io import FormatError, load, read_csv, read_raw, write_csv, write_raw
from .ops import (ModulusProfile, ResolutionWarning, check_resolution, difference, lp_norm,
                  modulus_of_continuity, shift_multiplier, spectral_gradient,
                  top_octave_fraction, translate, w1p_seminorm)
from .polar import GridEstimate, ShiftSampler, shift_sampler, shift_seminorm

__all__ = [
    "GridFunction", "GridSpec", "SpectralField", "apply_multiplier", "inverse_transform",
    "sample", "transform", "FormatError", "load", "read_csv", "read_raw", "write_csv",
    "write_raw", "ModulusProfile", "ResolutionWarning", "check_resolution", "difference",
    "lp_norm", "modulus_of_continuity", "shift_multiplier", "spectral_gradient",
    "top_octave_fraction", "translate", "w1p_seminorm", "GridEstimate", "ShiftSampler",
    "shift_sampler", "shift_seminorm",
]
