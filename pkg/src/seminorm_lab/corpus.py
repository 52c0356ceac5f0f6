"""Builtin test functions.

Every entry is defined on the continuum box, so sampling the same name on a
refined grid gives a consistent refinement. Random entries draw from a
generator seeded by ``(seed, entry index)`` and keep only modes that every
grid in use can represent.
"""
from __future__ import annotations

import math

import numpy as np

from .grid.field import GridFunction, GridSpec

DEFAULT_SEED = 7
STEP_WIDTH = 0.25
LOG_WIDTH = 0.5
RAMP_DAMPING = 0.25


def _wave(x, L, k):
    return 2 * np.pi * k * x / L


def _mode(k):
    def fn(spec, rng):
        x, = spec.coordinates()
        return np.sin(_wave(x, spec.L, k))
    return fn


def _mode2(k1, k2):
    def fn(spec, rng):
        x, y = spec.coordinates()
        return np.sin(_wave(x, spec.L, k1)) * np.cos(_wave(y, spec.L, k2))
    return fn


def _random(top):
    """Fourier series over ``1 <= |k|_inf <= top`` with amplitudes ``~ 1/|k|``."""
    def fn(spec, rng):
        coords = spec.coordinates()
        grids = np.meshgrid(*[np.arange(-top, top + 1)] * spec.n, indexing="ij")
        ks = np.stack([g.ravel() for g in grids], axis=1)
        # one representative of each +-k pair
        keep = [k for k in ks if _positive(k)]
        amp = rng.standard_normal((len(keep), 2))
        out = np.zeros(spec.shape)
        for k, (a, b) in zip(keep, amp):
            phase = sum(_wave(c, spec.L, kk) for c, kk in zip(coords, k))
            out = out + (a * np.cos(phase) + b * np.sin(phase)) / np.linalg.norm(k)
        return out
    return fn


def _positive(k) -> bool:
    nz = np.flatnonzero(k)
    return nz.size > 0 and k[nz[0]] > 0


def _step(spec, rng):
    x, = spec.coordinates()
    L, e = spec.L, STEP_WIDTH
    return 0.5 * (np.tanh((x - L / 4) / e) - np.tanh((x - 3 * L / 4) / e))


def _ramp(spec, rng):
    """Sawtooth rising from 0 to 1 across the box, Gaussian-damped in frequency."""
    x, = spec.coordinates()
    L = spec.L
    out = np.full(spec.shape, 0.5)
    top = min(spec.sizes[0] // 2 - 1, int(math.ceil(L / (2 * np.pi * RAMP_DAMPING) * 9)))
    for k in range(1, top + 1):
        damp = math.exp(-0.5 * (2 * np.pi * k * RAMP_DAMPING / L) ** 2)
        out = out - damp * np.sin(_wave(x, L, k)) / (np.pi * k)
    return out


def _logbump(spec, rng):
    """``log`` of a periodized distance to the center, smoothed at scale ``LOG_WIDTH``."""
    L = spec.L
    d2 = sum(((L / np.pi) * np.sin(np.pi * (c - L / 2) / L)) ** 2 for c in spec.coordinates())
    return 0.5 * np.log(d2 + LOG_WIDTH ** 2)


def _weierstrass(K, a=0.5, b=2):
    def fn(spec, rng):
        x, = spec.coordinates()
        if b ** K >= spec.sizes[0] // 2:
            raise ValueError(f"mode {b ** K} is not below the Nyquist index {spec.sizes[0] // 2}")
        return sum(a ** k * np.cos(_wave(x, spec.L, b ** k)) for k in range(K + 1))
    return fn


def _gauss(spec, rng):
    return np.exp(-0.5 * sum((c - spec.L / 2) ** 2 for c in spec.coordinates()))


def _disk(spec, rng):
    L = spec.L
    r = np.sqrt(sum((c - L / 2) ** 2 for c in spec.coordinates()))
    return 0.5 * (1 - np.tanh((r - L / 4) / (2 * STEP_WIDTH)))


BUILTIN = {
    1: {
        "mode-1": _mode(1), "mode-3": _mode(3), "mode-8": _mode(8), "mode-21": _mode(21),
        "random-a": _random(8), "random-b": _random(8), "random-c": _random(16),
        "step": _step, "ramp": _ramp, "logbump": _logbump,
        "weierstrass-2": _weierstrass(2), "weierstrass-4": _weierstrass(4),
        "weierstrass-6": _weierstrass(6), "gauss": _gauss,
    },
    2: {
        "mode-1-2": _mode2(1, 2), "mode-3-1": _mode2(3, 1),
        "random-a": _random(3), "random-b": _random(4),
        "logbump": _logbump, "disk": _disk,
    },
}


def names(n: int) -> list[str]:
    return list(BUILTIN.get(n, {}))


def builtin(name: str, spec: GridSpec, seed: int = DEFAULT_SEED) -> GridFunction:
    """Sample a builtin function on ``spec``; ``weierstrass-K`` accepts any K."""
    table = BUILTIN.get(spec.n, {})
    if name in table:
        fn, index = table[name], list(table).index(name)
    elif spec.n == 1 and name.startswith("weierstrass-") and name[12:].isdigit():
        fn, index = _weierstrass(int(name[12:])), len(table)
    else:
        raise KeyError(f"no builtin {name!r} in dimension {spec.n}")
    rng = np.random.default_rng([seed, spec.n, index])
    vals = np.broadcast_to(fn(spec, rng), spec.shape)
    return GridFunction(spec, np.array(vals, dtype=np.float64), True, name)


def corpus(spec: GridSpec, selection=None, seed: int = DEFAULT_SEED) -> list[GridFunction]:
    """The named builtins (all of them by default) in order."""
    return [builtin(name, spec, seed) for name in (names(spec.n) if selection is None else selection)]


def weierstrass(spec: GridSpec, K: int, a: float = 0.5, b: int = 2) -> GridFunction:
    """Partial sum ``sum_{k<=K} a^k cos(2 pi b^k x / L)``."""
    return GridFunction(spec, _weierstrass(K, a, b)(spec, None), True, f"weierstrass-{K}")
