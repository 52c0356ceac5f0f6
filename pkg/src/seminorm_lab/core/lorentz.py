"""Decreasing rearrangements and discrete Lorentz quasinorms."""
from __future__ import annotations

import math

import numpy as np

from .seminorms import as_vector


def rearrangement(x) -> np.ndarray:
    """Magnitudes of x sorted in decreasing order."""
    return np.sort(np.abs(as_vector(x)))[::-1]


def rearrangement_and_lorentz(x, p: float, q: float) -> tuple[np.ndarray, float]:
    """Decreasing rearrangement and the l^{p,q} quasinorm built from it.

    Counting measure with unit steps: ``(sum_k ((k+1)^(1/p - 1/q) x*_k)^q)^(1/q)``,
    or ``max_k (k+1)^(1/p) x*_k`` for q infinite.
    """
    if not 1.0 <= p < math.inf:
        raise ValueError("p must lie in [1, inf)")
    if not q >= 1.0:
        raise ValueError("q must lie in [1, inf]")
    xs = rearrangement(x)
    k1 = np.arange(1, xs.size + 1, dtype=np.float64)
    if math.isinf(q):
        return xs, float(np.max(k1 ** (1.0 / p) * xs)) if xs.size else 0.0
    terms = (k1 ** (1.0 / p - 1.0 / q) * xs) ** q
    return xs, float(terms.sum() ** (1.0 / q))


def integrated_rearrangement(x, t: float) -> float:
    """``int_0^t x*(u) du`` with x* the unit-step rearrangement of |x|."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    xs = rearrangement(x)
    whole = min(int(math.floor(t)), xs.size)
    acc = float(xs[:whole].sum())
    if whole < xs.size:
        acc += (t - whole) * float(xs[whole])
    return acc
