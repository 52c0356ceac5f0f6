"""Boundedness of linear maps between pairs and its interpolated form."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import CLOSED_FORM_KINDS
from .interpolation import InterpolationParams, interpolation_seminorm
from .seminorms import FiniteSeminorm, flatten_weighted, WeightedSpacePair


class UnboundedOperatorError(ValueError):
    """The map sends a null direction of the source to a nonzero image."""


def operator_seminorm_bound(T: np.ndarray, source: FiniteSeminorm, target: FiniteSeminorm,
                            rng: np.random.Generator | None = None, probes: int = 256) -> float:
    """``sup [T x]_target / [x]_source``.

    Exact for weighted l1 sources, whose unit balls are spanned by the
    extreme points ``+-e_j / w_j``. Otherwise it is the best ratio over
    coordinate vectors and random probes, hence a lower estimate.
    """
    T = np.asarray(T)
    d = T.shape[1]
    eye = np.eye(d)
    flat = flatten_weighted(source)
    if flat is not None and flat.p == 1.0:
        best = 0.0
        for j in range(d):
            img = target(T @ eye[j])
            if flat.weights[j] == 0.0:
                if img > 0.0:
                    raise UnboundedOperatorError(
                        f"coordinate {j} is null in the source but not in the image")
                continue
            best = max(best, img / flat.weights[j])
        return best
    rng = rng or np.random.default_rng(0)
    cands = np.vstack([eye, rng.normal(size=(probes, d))])
    best = 0.0
    for v in cands:
        den, num = source(v), target(T @ v)
        if den == 0.0:
            if num > 0.0:
                raise UnboundedOperatorError("a null direction of the source has a nonzero image")
            continue
        best = max(best, num / den)
    return best


@dataclass(frozen=True)
class OperatorCheckReport:
    c0: float
    c1: float
    lhs: np.ndarray
    rhs: np.ndarray
    slack: np.ndarray
    passed: bool

    @property
    def worst_ratio(self) -> float:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(self.rhs > 0, self.lhs / self.rhs, np.where(self.lhs > 0, np.inf, 0.0))
        return float(r.max()) if r.size else 0.0


def operator_interpolation_check(pair_x: WeightedSpacePair, pair_y: WeightedSpacePair,
                                 T, params: InterpolationParams, xs,
                                 rtol: float = 1e-9) -> OperatorCheckReport:
    """Check ``[T x]^(sigma) <= c0^(1-s) c1^s [x]^(sigma c1/c0)`` on samples.

    ``c0`` and ``c1`` are the operator bounds on the two factors. Seminorms use
    the exact backend when both pairs allow it; otherwise node quadrature, in
    which case the reported error estimates widen the tolerance.
    """
    T = np.asarray(T)
    if T.shape != (pair_y.dim, pair_x.dim):
        raise ValueError(f"T has shape {T.shape}, expected {(pair_y.dim, pair_x.dim)}")
    c0 = operator_seminorm_bound(T, pair_x.X0, pair_y.X0)
    c1 = operator_seminorm_bound(T, pair_x.X1, pair_y.X1)
    s, q, sigma = params.s, params.q, params.sigma
    nonzero = bool(np.any(T))
    if nonzero and (c0 == 0.0 or c1 == 0.0):
        raise UnboundedOperatorError(
            f"degenerate factor bounds c0={c0:.3g}, c1={c1:.3g} for a nonzero map")
    exact = pair_x.kind in CLOSED_FORM_KINDS and pair_y.kind in CLOSED_FORM_KINDS
    opts = {"backend": "exact"} if exact else {}
    src_sigma = sigma * c1 / c0 if nonzero else sigma
    src = InterpolationParams(s, q, src_sigma)
    const = c0 ** (1 - s) * c1 ** s if nonzero else 0.0
    lhs, rhs, slack = [], [], []
    for x in xs:
        a = interpolation_seminorm(pair_y, params, T @ pair_x.check(x), **opts)
        b = interpolation_seminorm(pair_x, src, x, **opts)
        lhs.append(a.value)
        rhs.append(const * b.value)
        slack.append(a.error + const * b.error + rtol * const * b.value)
    lhs, rhs, slack = np.array(lhs), np.array(rhs), np.array(slack)
    passed = bool(np.all(lhs <= rhs + slack)) if lhs.size else True
    return OperatorCheckReport(c0, c1, lhs, rhs, slack, passed)
