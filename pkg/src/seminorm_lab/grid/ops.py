"""Translations, differences, norms and moduli of continuity on grids."""
from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np

from .._backend import kernels
from .field import GridFunction, GridSpec, apply_multiplier

NYQUIST_ENERGY_LIMIT = 0.01
DEFAULT_DIRECTIONS = 64


class ResolutionWarning(UserWarning):
    """Too much spectral energy sits near the Nyquist frequency."""


def top_octave_fraction(f: GridFunction) -> float:
    """Share of spectral energy in modes with ``|k_i| > N_i/4`` on some axis."""
    spec = f.spec
    energy = np.abs(np.fft.fftn(f.values)) ** 2
    mask = np.zeros(spec.shape, dtype=bool)
    for i, N in enumerate(spec.sizes):
        k = np.abs(np.fft.fftfreq(N, 1.0 / N))
        shape = [1] * spec.n
        shape[i] = N
        mask |= (k > N // 4).reshape(shape)
    total = energy.sum()
    return float(energy[mask].sum() / total) if total > 0 else 0.0


def check_resolution(f: GridFunction, what: str = "spectral operation") -> float:
    frac = top_octave_fraction(f)
    if frac > NYQUIST_ENERGY_LIMIT:
        warnings.warn(f"{what}: {100 * frac:.1f}% of the spectral energy of "
                      f"{f.name or 'the input'} is in the top octave", ResolutionWarning,
                      stacklevel=3)
    return frac


def lattice_offset(spec: GridSpec, h, tol: float = 1e-9):
    """Integer cell offsets for h, or None when h is off the lattice."""
    cells = np.asarray(h, dtype=np.float64).reshape(spec.n) / spec.spacing
    rounded = np.rint(cells)
    if np.all(np.abs(cells - rounded) <= tol * np.maximum(1.0, np.abs(cells))):
        return tuple(int(c) for c in rounded)
    return None


def shift_multiplier(spec: GridSpec, h, real: bool = True) -> np.ndarray:
    """Symbol of ``f -> f(. - h)`` on the frequency lattice.

    Each axis contributes ``exp(-i xi_i h_i)``. For real fields the unpaired
    Nyquist index gets ``cos(xi_i h_i)`` instead, which keeps the symbol
    Hermitian; on lattice shifts the two agree.
    """
    h = np.asarray(h, dtype=np.float64).reshape(spec.n)
    m = np.ones(spec.shape, dtype=np.complex128)
    for i, k in enumerate(spec.wavenumbers()):
        phase = k * h[i]
        factor = np.exp(-1j * phase)
        if real:
            N = spec.sizes[i]
            idx = [0] * spec.n
            idx[i] = N // 2
            nyq = tuple(idx)
            factor[nyq] = math.cos(phase[nyq])
        m = m * factor
    return m


def translate(f: GridFunction, h) -> GridFunction:
    """``x -> f(x - h)``: a cyclic shift on the lattice, a spectral phase elsewhere."""
    off = lattice_offset(f.spec, h)
    if off is not None:
        return f.like(np.roll(f.values, off, axis=tuple(range(f.spec.n))))
    check_resolution(f, "off-lattice translation")
    return apply_multiplier(f, shift_multiplier(f.spec, h, f.real))


def difference(f: GridFunction, h) -> GridFunction:
    """``x -> f(x + h) - f(x)``."""
    return translate(f, -np.asarray(h, dtype=np.float64)) - f


def _norm_of(values: np.ndarray, p: float, cell: float, axes=None) -> np.ndarray:
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=axes)
    if p == 1.0:
        return cell * a.sum(axis=axes)
    if p == 2.0:
        return np.sqrt(cell * (a * a).sum(axis=axes))
    top = a.max(axis=axes, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = safe * (cell * ((a / safe) ** p).sum(axis=axes, keepdims=True)) ** (1.0 / p)
    return np.squeeze(np.where(top > 0, out, 0.0), axis=axes)


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return p


def lp_norm(f: GridFunction, p: float) -> float:
    """Riemann-sum ``L^p`` norm over the box; the max for ``p = inf``."""
    p = _check_p(p)
    return float(_norm_of(f.values, p, f.spec.cell))


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2 points when n = 1)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def angular_rule(n: int, count: int = DEFAULT_DIRECTIONS) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights integrating even functions over the unit sphere."""
    dirs = _directions(n, count)
    return dirs, np.full(len(dirs), sphere_area(n) / len(dirs))


@lru_cache(maxsize=8)
def _directions(n: int, count: int) -> np.ndarray:
    """Unit vectors covering the sphere up to the sign (``±u`` give equal norms)."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        half = max(1, count // 2)
        ang = np.pi * np.arange(half) / half
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    # Fibonacci points; the set is not antipodal, so keep all of them
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - math.sqrt(5.0)) * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _half_lattice(spec: GridSpec, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero lattice shifts with ``|h| <= radius``, one of each ``±h`` pair."""
    hs = spec.spacing
    reach = [int(math.floor(radius / d + 1e-9)) for d in hs]
    grids = np.meshgrid(*[np.arange(-r, r + 1) for r in reach], indexing="ij")
    cells = np.stack([g.ravel() for g in grids], axis=1)
    lengths = np.sqrt(((cells * hs) ** 2).sum(axis=1))
    keep = (lengths <= radius * (1 + 1e-12)) & (lengths > 0)
    # lexicographically positive representative
    sign = np.zeros(len(cells), dtype=int)
    for c in range(spec.n - 1, -1, -1):
        sign = np.where(cells[:, c] != 0, np.sign(cells[:, c]), sign)
    keep &= sign > 0
    cells, lengths = cells[keep], lengths[keep]
    order = np.argsort(lengths, kind="stable")
    return cells[order], lengths[order]


def shift_norm_table(f: GridFunction, p: float, radii, directions,
                     hat: np.ndarray | None = None) -> np.ndarray:
    """``||f(. + r u) - f||_p`` for every radius r (rows) and direction u (columns).

    Shifts act through ``shift_multiplier``; ``p = 2`` uses Plancherel and
    skips the inverse transforms. Real fields go through half spectra.
    """
    p = _check_p(p)
    spec = f.spec
    hat = np.fft.fftn(f.values) if hat is None else hat
    dirs = np.asarray(directions, dtype=np.float64).reshape(-1, spec.n)
    radii = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    out = np.empty((radii.size, len(dirs)))
    axes = tuple(range(1, spec.n + 1))
    if p == 2.0:
        energy = np.abs(hat) ** 2
        for i, r in enumerate(radii):
            mults = np.stack([shift_multiplier(spec, -r * u, f.real) - 1.0 for u in dirs])
            sq = (np.abs(mults) ** 2 * energy).sum(axis=axes)
            out[i] = np.sqrt(spec.cell * sq / spec.total)
        return out
    if f.real:
        half = spec.sizes[-1] // 2 + 1
        hat = hat[..., :half]
        for i, r in enumerate(radii):
            mults = np.stack([shift_multiplier(spec, -r * u, True)[..., :half] - 1.0
                              for u in dirs])
            vals = np.fft.irfftn(mults * hat, s=spec.shape, axes=axes)
            out[i] = _norm_of(vals, p, spec.cell, axes=axes)
        return out
    for i, r in enumerate(radii):
        mults = np.stack([shift_multiplier(spec, -r * u, False) - 1.0 for u in dirs])
        vals = np.fft.ifftn(mults * hat, axes=axes)
        out[i] = _norm_of(vals, p, spec.cell, axes=axes)
    return out


class ModulusProfile:
    """``t -> sup ||f(. + h) - f||_p`` over candidate shifts ``|h| <= t``.

    Candidates are the lattice vectors in the ball and, with
    ``strategy='spectral'``, ``directions`` unit directions scaled to each
    requested radius. Requested radii are processed together and a running
    max makes the result nondecreasing in t. Radii are limited to ``L/4``.
    """

    def __init__(self, f: GridFunction, p: float, strategy: str = "spectral",
                 directions: int = DEFAULT_DIRECTIONS):
        if strategy not in ("lattice", "spectral"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.f, self.p, self.strategy = f, _check_p(p), strategy
        self.directions = _directions(f.spec.n, directions)
        self.rmax = f.spec.L / 4
        if strategy == "spectral":
            check_resolution(f, "modulus of continuity")
        self._lattice_r, self._lattice_v = self._lattice()
        self._hat = np.fft.fftn(f.values)

    def _lattice(self):
        f, spec, p = self.f, self.f.spec, self.p
        cells, lengths = _half_lattice(spec, self.rmax)
        if not len(cells):
            return lengths, np.zeros(0)
        shifts = np.zeros((len(cells), 3), dtype=np.int64)
        shifts[:, :spec.n] = cells
        if f.real:
            cube = np.array(f.values.reshape(spec.shape + (1,) * (3 - spec.n)), order="C")
            raw = kernels.shift_diff_norms(cube, shifts, p)
        else:
            raw = _complex_shift_norms(f.values, cells, p)
        vals = np.asarray(raw, dtype=np.float64)
        if not math.isinf(p):
            vals = (spec.cell * vals) ** (1.0 / p)
        return lengths, np.maximum.accumulate(vals)

    def lattice_part(self, t: float) -> float | None:
        i = np.searchsorted(self._lattice_r, t * (1 + 1e-12), side="right")
        return float(self._lattice_v[i - 1]) if i > 0 else None

    def table(self, ts) -> np.ndarray:
        """Per-direction shift norms at the radii ts."""
        return shift_norm_table(self.f, self.p, ts, self.directions, self._hat)

    def __call__(self, ts, table: np.ndarray | None = None) -> np.ndarray:
        """Modulus at the radii ts; ``table`` reuses precomputed ``self.table(ts)``."""
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        if np.any(ts <= 0):
            raise ValueError("radii must be positive")
        if np.any(ts > self.rmax * (1 + 1e-12)):
            raise ValueError(f"radii are limited to L/4 = {self.rmax:g} on the torus")
        if self.strategy == "spectral":
            spectral = (self.table(ts) if table is None else table).max(axis=1)
        order = np.argsort(ts, kind="stable")
        out = np.empty(ts.size)
        running = 0.0
        for i in order:
            t = float(ts[i])
            lat = self.lattice_part(t)
            if self.strategy == "lattice":
                if lat is None:
                    raise ValueError(f"no lattice shift has length <= {t:g}")
                val = lat
            else:
                val = max(lat or 0.0, float(spectral[i]))
            running = max(running, val)
            out[i] = running
        return out


def _complex_shift_norms(values, cells, p):
    out = np.empty(len(cells))
    axes = tuple(range(values.ndim))
    for j, c in enumerate(cells):
        v = np.abs(np.roll(values, tuple(-int(x) for x in c), axis=axes) - values)
        out[j] = v.max() if math.isinf(p) else (v ** p).sum()
    return out


def modulus_of_continuity(f: GridFunction, t, p: float, strategy: str = "spectral",
                          directions: int = DEFAULT_DIRECTIONS):
    """Modulus of continuity at t (scalar or array); see ModulusProfile."""
    vals = ModulusProfile(f, p, strategy, directions)(t)
    return float(vals[0]) if np.ndim(t) == 0 else vals


def spectral_gradient(f: GridFunction) -> list[GridFunction]:
    """Partial derivatives through the symbols ``i xi_j`` (Nyquist index dropped)."""
    check_resolution(f, "spectral differentiation")
    spec = f.spec
    out = []
    for i, k in enumerate(spec.wavenumbers()):
        k = k.copy()
        k.flat[spec.sizes[i] // 2] = 0.0
        out.append(apply_multiplier(f, 1j * np.broadcast_to(k, spec.shape),
                                    name=f"d{i}{f.name}" if f.name else ""))
    return out


def w1p_seminorm(f: GridFunction, p: float) -> float:
    """Sum over the axes of the ``L^p`` norms of the partial derivatives."""
    p = _check_p(p)
    return float(sum(lp_norm(g, p) for g in spectral_gradient(f)))
