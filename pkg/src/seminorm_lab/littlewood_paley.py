"""Dyadic frequency bands on grids and the seminorms built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid.field import GridFunction, GridSpec, apply_multiplier
from .grid.ops import _norm_of, lp_norm, w1p_seminorm
from .grid.polar import GridEstimate, shift_seminorm
from .reports import EquivalenceReport


def _bump(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def transition(r):
    """Smooth cutoff: 1 on [0, 1], 0 on [2, inf), ``g(2-r)/(g(2-r)+g(r-1))`` between."""
    r = np.asarray(r, dtype=np.float64)
    a, b = _bump(2.0 - r), _bump(r - 1.0)
    mid = (r > 1.0) & (r < 2.0)
    out = np.where(r <= 1.0, 1.0, 0.0)
    out[mid] = a[mid] / (a[mid] + b[mid])
    return out


def profile(r):
    """Radial bump ``chi(r) - chi(2r)``, supported on ``1/2 <= r <= 2``."""
    return transition(r) - transition(2.0 * np.asarray(r, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """The bump and its dilates on the frequency lattice of one grid.

    ``bands`` lists the j whose multiplier ``psi(2^-j xi)`` is nonzero at
    some lattice frequency; ``multipliers[i]`` belongs to ``bands[i]``.
    """

    spec: GridSpec
    bands: np.ndarray
    multipliers: np.ndarray
    magnitude: np.ndarray = field(repr=False)

    @property
    def j_min(self) -> int:
        return int(self.bands[0])

    @property
    def j_max(self) -> int:
        return int(self.bands[-1])

    def index(self, j: int) -> int:
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"band {j} outside [{self.j_min}, {self.j_max}]")
        return int(j - self.j_min)

    def multiplier(self, j: int) -> np.ndarray:
        return self.multipliers[self.index(j)]

    def coverage(self) -> np.ndarray:
        """``sum_j psi(2^-j xi)`` on the lattice (1 away from the origin)."""
        return self.multipliers.sum(axis=0)

    def residual(self) -> float:
        """Largest deviation of the coverage from 1 at nonzero frequencies."""
        nz = self.magnitude > 0
        return float(np.abs(self.coverage()[nz] - 1.0).max())

    def profile_table(self, count: int = 512) -> np.ndarray:
        """``(|xi|, psi)`` rows across the support, for plots."""
        r = np.linspace(0.25, 4.0, count)
        return np.column_stack([r, profile(r)])


def build_partition(spec: GridSpec, band: tuple[int, int] | None = None) -> DyadicPartition:
    """Tabulate the dyadic bands meeting the lattice; ``band`` restricts them."""
    mag = spec.frequency_magnitude()
    nz = mag[mag > 0]
    lo = int(math.floor(math.log2(nz.min()))) - 1
    hi = int(math.ceil(math.log2(nz.max()))) + 1
    js, mults = [], []
    for j in range(lo, hi + 1):
        m = profile(mag * 2.0 ** -j)
        if np.any(m > 0):
            js.append(j)
            mults.append(m)
    js = np.array(js)
    mults = np.array(mults)
    if band is not None:
        keep = (js >= band[0]) & (js <= band[1])
        if not keep.any():
            raise ValueError(f"band {band} does not meet the lattice")
        js, mults = js[keep], mults[keep]
    js.setflags(write=False)
    mults.setflags(write=False)
    return DyadicPartition(spec, js, mults, mag)


def _same_grid(f: GridFunction, partition: DyadicPartition):
    if f.spec != partition.spec:
        raise ValueError("function and partition live on different grids")


def project(f: GridFunction, j: int, partition: DyadicPartition) -> GridFunction:
    """Localize f to frequencies near ``2^j``."""
    _same_grid(f, partition)
    return apply_multiplier(f, partition.multiplier(j))


def band_stack(f: GridFunction, partition: DyadicPartition) -> np.ndarray:
    """All band projections at once, shape ``(bands, *grid)``."""
    _same_grid(f, partition)
    axes = tuple(range(1, f.spec.n + 1))
    vals = np.fft.ifftn(partition.multipliers * np.fft.fftn(f.values), axes=axes)
    return vals.real if f.real else vals


def dropped_mass(f: GridFunction, partition: DyadicPartition) -> float:
    """Relative L^2 mass of the nonconstant part missed by the summed bands."""
    hat = np.fft.fftn(f.values)
    nz = partition.magnitude > 0
    total = np.sum(np.abs(hat[nz]) ** 2)
    if total == 0:
        return 0.0
    miss = np.sum(np.abs((1.0 - partition.coverage()[nz]) * hat[nz]) ** 2)
    return float(math.sqrt(miss / total))


class MeanError(ValueError):
    """The zero-frequency coefficient is not negligible."""


def riesz_potential(f: GridFunction, s: float, partition: DyadicPartition | None = None,
                    center: bool = False, tol: float = 1e-12) -> GridFunction:
    """Multiply nonzero modes by ``|xi|^s`` and the zero mode by 0.

    The mean must vanish to ``tol`` relative to ``||f||_2`` unless ``center``
    asks for it to be dropped.
    """
    spec = f.spec
    if partition is not None:
        _same_grid(f, partition)
    mean = abs(complex(f.values.mean()))
    if not center:
        zero = spec.L ** (spec.n / 2) * mean
        if zero > tol * max(lp_norm(f, 2), 1e-300):
            raise MeanError(f"mean {mean:.3g} is not negligible; pass center=True to drop it")
    mag = spec.frequency_magnitude() if partition is None else partition.magnitude
    m = np.zeros(spec.shape)
    nz = mag > 0
    m[nz] = mag[nz] ** s
    return apply_multiplier(f, m)


def _weights(partition: DyadicPartition, s: float) -> np.ndarray:
    return 2.0 ** (s * partition.bands.astype(np.float64))


def _lq(values, q: float) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    top = values.max()
    if top == 0.0:
        return 0.0
    if math.isinf(q):
        return float(top)
    return float(top * np.sum((values / top) ** q) ** (1.0 / q))


def square_function_norm(stack: np.ndarray, weights, p: float, cell: float) -> float:
    """``|| (sum_j |w_j u_j|^2)^(1/2) ||_p`` for a band stack."""
    w = np.asarray(weights, dtype=np.float64).reshape((-1,) + (1,) * (stack.ndim - 1))
    sq = np.sqrt(np.sum(np.abs(w * stack) ** 2, axis=0))
    return float(_norm_of(sq, p, cell))


def riesz_seminorm(f: GridFunction, s: float, p: float,
                   partition: DyadicPartition) -> GridEstimate:
    """Square-function seminorm ``|| (sum_j (2^(sj) |pi_j f|)^2)^(1/2) ||_p``."""
    stack = band_stack(f, partition)
    value = square_function_norm(stack, _weights(partition, s), p, f.spec.cell)
    return GridEstimate(value, dropped=dropped_mass(f, partition))


def lp_square_seminorm(f: GridFunction, p: float, partition: DyadicPartition) -> GridEstimate:
    """``|| (sum_j |pi_j f|^2)^(1/2) ||_p``."""
    return riesz_seminorm(f, 0.0, p, partition)


def band_norms(f: GridFunction, p: float, partition: DyadicPartition) -> np.ndarray:
    """``||pi_j f||_p`` for every band."""
    stack = band_stack(f, partition)
    axes = tuple(range(1, f.spec.n + 1))
    return np.atleast_1d(_norm_of(stack, float(p), f.spec.cell, axes=axes))


def besov_lipschitz_seminorm(f: GridFunction, s: float, p: float, q: float,
                             partition: DyadicPartition) -> GridEstimate:
    """l^q norm over the bands of ``2^(sj) ||pi_j f||_p``."""
    terms = _weights(partition, s) * band_norms(f, p, partition)
    return GridEstimate(_lq(terms, q), dropped=dropped_mass(f, partition))


def besov_seminorm(f: GridFunction, s: float, p: float, q: float,
                   mode: str = "modulus", **options) -> GridEstimate:
    """Besov seminorm from moduli of continuity or difference quotients.

    Radii run up to ``L/4``; ``truncation`` bounds the missing large-radius
    part through ``||f(. + h) - f||_p <= 2 ||f||_p``.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    return shift_seminorm(f, s, p, q, f.spec.L / 4, mode=mode, truncated=False, **options)


def sobolev_frequency_check(f: GridFunction, p: float, partition: DyadicPartition,
                            bracket: tuple | None = None, slack: float = 0.0,
                            reference: float | None = None) -> EquivalenceReport:
    """Gradient seminorm against the square-function seminorm at ``s = 1``.

    Without a bracket the comparison is empirical. ``reference`` is the same
    ratio on a refined grid and adds the drift test.
    """
    lhs = w1p_seminorm(f, p)
    rhs = riesz_seminorm(f, 1.0, p, partition).value
    return EquivalenceReport(f"sobolev-frequency:p={p:g}", lhs, rhs, bracket, slack, reference)


def almost_orthogonality(f: GridFunction, partition: DyadicPartition) -> float:
    """Largest ``|<pi_j f, pi_k f>|`` over ``|j - k| >= 2``, relative to ``||f||_2^2``."""
    stack = band_stack(f, partition)
    flat = stack.reshape(stack.shape[0], -1)
    gram = np.abs(flat @ flat.conj().T)
    total = float(np.sum(np.abs(f.values) ** 2))
    if total == 0:
        return 0.0
    j = partition.bands
    far = np.abs(j[:, None] - j[None, :]) >= 2
    return float(gram[far].max(initial=0.0) / total)


def band_masses(f: GridFunction, partition: DyadicPartition) -> np.ndarray:
    """Fraction of the nonconstant L^2 mass each band captures, ``||pi_j f||^2 / ||f - mean||^2``."""
    g = f.centered()
    total = float(np.sum(np.abs(g.values) ** 2))
    if total == 0:
        return np.zeros(partition.bands.size)
    stack = band_stack(g, partition)
    return np.sum(np.abs(stack.reshape(stack.shape[0], -1)) ** 2, axis=1) / total
