"""Seminorms on R^d / C^d and weakly compatible pairs of them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Return ``x`` as a 1-D float or complex array, checking its length."""
    v = np.asarray(x)
    if not np.iscomplexobj(v):
        v = v.astype(np.float64, copy=False)
    v = v.reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"vector has dimension {v.shape[0]}, expected {dim}")
    return v


class FiniteSeminorm:
    """Base class: a seminorm on a fixed finite-dimensional coordinate space.

    Subclasses implement ``_eval``. ``lattice`` is True when the seminorm only
    depends on coordinate magnitudes and is nondecreasing in each of them;
    such seminorms let K-functional searches confine themselves to the box
    spanned by 0 and x.
    """

    dim: int
    lattice: bool = False

    def __call__(self, x) -> float:
        return float(self._eval(as_vector(x, self.dim)))

    def _eval(self, v: np.ndarray) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def batch(self, rows) -> np.ndarray:
        """Evaluate on every row of a 2-D array."""
        return np.array([self._eval(v) for v in np.asarray(rows)])

    def annihilator_mask(self) -> np.ndarray | None:
        """Coordinates spanning the annihilator, when it is a coordinate subspace."""
        return None

    def scaled(self, c: float) -> "ScaledSeminorm":
        return ScaledSeminorm(self, c)


@dataclass(frozen=True, eq=False)
class WeightedNorm(FiniteSeminorm):
    """``(sum_i |w_i x_i|^p)^(1/p)``, or ``max_i |w_i x_i|`` when p is infinite.

    Zero weights are allowed and make the annihilator the span of the
    corresponding coordinates.
    """

    weights: np.ndarray
    p: float = 1.0
    lattice: bool = field(default=True, init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.size == 0:
            raise ValueError("empty weight vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        p = float(self.p)
        if not p >= 1.0:
            raise ValueError("exponent p must lie in [1, inf]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def _eval(self, v):
        a = np.abs(self.weights * v)
        if math.isinf(self.p):
            return a.max()
        if self.p == 1.0:
            return a.sum()
        top = a.max()
        if top == 0.0:
            return 0.0
        return top * np.sum((a / top) ** self.p) ** (1.0 / self.p)

    def batch(self, rows):
        a = np.abs(np.asarray(rows) * self.weights[None, :])
        if math.isinf(self.p):
            return a.max(axis=1)
        if self.p == 1.0:
            return a.sum(axis=1)
        top = a.max(axis=1)
        safe = np.where(top > 0, top, 1.0)
        return top * np.sum((a / safe[:, None]) ** self.p, axis=1) ** (1.0 / self.p)

    def annihilator_mask(self):
        return self.weights == 0.0

    def __repr__(self):
        return f"WeightedNorm(dim={self.dim}, p={self.p})"


@dataclass(frozen=True, eq=False)
class MaxSeminorm(FiniteSeminorm):
    """Pointwise maximum of several seminorms on the same space."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("need at least one seminorm")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError("all parts must share one dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    @property
    def lattice(self):
        return all(p.lattice for p in self.parts)

    def _eval(self, v):
        return max(p._eval(v) for p in self.parts)

    def batch(self, rows):
        return np.max([p.batch(rows) for p in self.parts], axis=0)

    def annihilator_mask(self):
        masks = [p.annihilator_mask() for p in self.parts]
        if any(m is None for m in masks):
            return None
        return np.logical_and.reduce(masks)


@dataclass(frozen=True, eq=False)
class ScaledSeminorm(FiniteSeminorm):
    """``c * base(x)`` for a constant ``c > 0``."""

    base: FiniteSeminorm
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("scale must be positive")

    @property
    def dim(self):
        return self.base.dim

    @property
    def lattice(self):
        return self.base.lattice

    def _eval(self, v):
        return self.c * self.base._eval(v)

    def batch(self, rows):
        return self.c * self.base.batch(rows)

    def annihilator_mask(self):
        return self.base.annihilator_mask()


class GridSeminorm(FiniteSeminorm):
    """Seminorm given by an arbitrary callable, e.g. a norm of grid samples.

    The callable receives the coordinate vector and must itself satisfy the
    seminorm axioms; nothing is assumed about its structure.
    """

    def __init__(self, dim: int, fn: Callable[[np.ndarray], float], name: str = "grid"):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        self._fn = fn
        self.name = name

    def _eval(self, v):
        return self._fn(v)

    def __repr__(self):
        return f"GridSeminorm({self.name!r}, dim={self.dim})"


def l1(dim: int, weights: Sequence[float] | None = None) -> WeightedNorm:
    return WeightedNorm(np.ones(dim) if weights is None else weights, 1.0)


def linf(dim: int, weights: Sequence[float] | None = None) -> WeightedNorm:
    return WeightedNorm(np.ones(dim) if weights is None else weights, math.inf)


def flatten_weighted(s: FiniteSeminorm) -> WeightedNorm | None:
    """Rewrite scaled weighted norms as plain weighted norms, else None."""
    if isinstance(s, WeightedNorm):
        return s
    if isinstance(s, ScaledSeminorm):
        inner = flatten_weighted(s.base)
        if inner is not None:
            return WeightedNorm(inner.weights * s.c, inner.p)
    return None


@dataclass(frozen=True, eq=False)
class WeightedSpacePair:
    """Two seminorms on one coordinate space (a weakly compatible couple)."""

    X0: FiniteSeminorm
    X1: FiniteSeminorm

    def __post_init__(self):
        if self.X0.dim != self.X1.dim:
            raise ValueError(
                f"factors act on different spaces: {self.X0.dim} vs {self.X1.dim}"
            )

    @property
    def dim(self) -> int:
        return self.X0.dim

    @property
    def kind(self) -> str:
        """'diag-l1', 'l1-linf', 'linf-l1', 'weighted' or 'general'."""
        a, b = flatten_weighted(self.X0), flatten_weighted(self.X1)
        if a is None or b is None:
            return "general"
        if a.p == 1.0 and b.p == 1.0:
            return "diag-l1"
        if a.p == 1.0 and math.isinf(b.p):
            return "l1-linf"
        if math.isinf(a.p) and b.p == 1.0:
            return "linf-l1"
        return "weighted"

    def swapped(self) -> "WeightedSpacePair":
        return WeightedSpacePair(self.X1, self.X0)

    def check(self, x) -> np.ndarray:
        return as_vector(x, self.dim)


def sum_and_intersection_seminorms(pair: WeightedSpacePair, x) -> tuple[float, float]:
    """Sum seminorm ``K(1, x)`` and intersection seminorm ``max([x]_0, [x]_1)``."""
    from .functionals import k_functional

    v = pair.check(x)
    total = k_functional(pair, 1.0, v).value
    return total, max(pair.X0(v), pair.X1(v))
