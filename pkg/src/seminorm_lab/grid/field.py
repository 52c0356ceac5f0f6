"""Periodic uniform grids, sampled functions and their spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class GridSpec:
    """A periodic box ``[0, L)^n`` sampled with ``sizes[i]`` points per axis."""

    n: int
    sizes: tuple
    L: float

    def __post_init__(self):
        sizes = tuple(int(v) for v in (self.sizes if np.iterable(self.sizes) else [self.sizes]))
        if len(sizes) == 1 and self.n > 1:
            sizes = sizes * self.n
        if self.n not in (1, 2, 3):
            raise ValueError("grids have dimension 1, 2 or 3")
        if len(sizes) != self.n:
            raise ValueError(f"expected {self.n} sizes, got {len(sizes)}")
        for v in sizes:
            if v < 8 or not _is_pow2(v):
                raise ValueError(f"grid size {v} is not a power of two >= 8")
        if not self.L > 0 or not math.isfinite(self.L):
            raise ValueError("box length must be positive")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "L", float(self.L))

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"n=2,N=64,L=8"``; ``N`` may be ``64x32`` for unequal sizes."""
        parts = dict(item.split("=", 1) for item in text.replace(" ", "").split(",") if item)
        n = int(parts.get("n", 1))
        sizes = tuple(int(v) for v in parts.get("N", "512").split("x"))
        return cls(n, sizes, float(parts.get("L", 16.0)))

    def __str__(self):
        return f"n={self.n},N={'x'.join(map(str, self.sizes))},L={self.L:g}"

    @property
    def shape(self) -> tuple:
        return self.sizes

    @property
    def total(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def spacing(self) -> np.ndarray:
        return self.L / np.array(self.sizes, dtype=np.float64)

    @property
    def cell(self) -> float:
        """Volume of one grid cell."""
        return self.L ** self.n / self.total

    def refined(self) -> "GridSpec":
        return GridSpec(self.n, tuple(2 * v for v in self.sizes), self.L)

    def coordinates(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        out = []
        for i, N in enumerate(self.sizes):
            shape = [1] * self.n
            shape[i] = N
            out.append((np.arange(N) * (self.L / N)).reshape(shape))
        return out

    def wavenumbers(self) -> list[np.ndarray]:
        """Broadcastable angular frequencies ``2 pi k / L`` in FFT order."""
        out = []
        for i, N in enumerate(self.sizes):
            shape = [1] * self.n
            shape[i] = N
            out.append((2 * np.pi / self.L * np.fft.fftfreq(N, 1.0 / N)).reshape(shape))
        return out

    def frequency_magnitude(self) -> np.ndarray:
        return np.sqrt(sum(k ** 2 for k in self.wavenumbers()))

    def nyquist_mask(self) -> np.ndarray:
        """Modes whose index equals -N/2 on some axis (they have no partner)."""
        mask = np.zeros(self.shape, dtype=bool)
        for i, N in enumerate(self.sizes):
            idx = [slice(None)] * self.n
            idx[i] = N // 2
            mask[tuple(idx)] = True
        return mask


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a periodic function; ``real`` tags real-valued fields."""

    spec: GridSpec
    values: np.ndarray
    real: bool = True
    name: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.spec.shape:
            v = v.reshape(self.spec.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        if self.real:
            if np.iscomplexobj(v):
                if np.any(np.abs(v.imag) > 1e-12 * max(1.0, float(np.abs(v).max()))):
                    raise ValueError("real-tagged samples have an imaginary part")
                v = v.real
            v = np.ascontiguousarray(v, dtype=np.float64)
        else:
            v = np.ascontiguousarray(v, dtype=np.complex128)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def like(self, values, name: str | None = None) -> "GridFunction":
        return GridFunction(self.spec, values, self.real, self.name if name is None else name)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.spec != self.spec:
                raise ValueError("grid functions live on different grids")
            return other.values, self.real and other.real
        return other, self.real and not np.iscomplexobj(other)

    def __add__(self, other):
        v, real = self._other(other)
        return GridFunction(self.spec, self.values + v, real)

    def __sub__(self, other):
        v, real = self._other(other)
        return GridFunction(self.spec, self.values - v, real)

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            return NotImplemented
        return GridFunction(self.spec, self.values * c, self.real and not np.iscomplexobj(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.like(-self.values)

    def mean(self):
        return self.values.mean()

    def centered(self) -> "GridFunction":
        """The function minus its mean (one shared instance, so caches keyed on it hit)."""
        return self._centered

    @cached_property
    def _centered(self) -> "GridFunction":
        return self.like(self.values - self.values.mean())

    @cached_property
    def spectrum(self) -> "SpectralField":
        return transform(self)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Unitary Fourier coefficients on the frequency lattice (FFT ordering).

    With ``F = L^(n/2) / N_tot * fft(f)`` the discrete Plancherel identity
    ``sum |F|^2 = ||f||_{L^2}^2`` holds exactly.
    """

    spec: GridSpec
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.complex128).reshape(self.spec.shape)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def norm_factor(self) -> float:
        return self.spec.L ** (self.spec.n / 2) / self.spec.total

    def conjugate_symmetry_defect(self) -> float:
        """``max |c(-k) - conj c(k)|``; zero for real fields."""
        c = self.coeffs
        flipped = np.roll(np.flip(c), 1, axis=tuple(range(c.ndim)))
        return float(np.abs(flipped - np.conj(c)).max())


def transform(f: GridFunction) -> SpectralField:
    spec = f.spec
    coeffs = np.fft.fftn(f.values) * (spec.L ** (spec.n / 2) / spec.total)
    return SpectralField(spec, coeffs, f.real)


def inverse_transform(F: SpectralField) -> GridFunction:
    spec = F.spec
    vals = np.fft.ifftn(F.coeffs) * (spec.total / spec.L ** (spec.n / 2))
    return GridFunction(spec, vals.real if F.real else vals, F.real)


def apply_multiplier(f: GridFunction, m: np.ndarray, name: str | None = None) -> GridFunction:
    """Fourier multiplier; real-tagged inputs stay real (m must be Hermitian)."""
    vals = np.fft.ifftn(np.fft.fftn(f.values) * m)
    return GridFunction(f.spec, vals.real if f.real else vals, f.real,
                        f.name if name is None else name)


def sample(spec: GridSpec, fn, name: str = "", real: bool = True) -> GridFunction:
    """Evaluate ``fn(*coords)`` on the grid."""
    vals = fn(*spec.coordinates())
    return GridFunction(spec, np.broadcast_to(vals, spec.shape), real, name)
