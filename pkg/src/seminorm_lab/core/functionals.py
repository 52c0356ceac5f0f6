"""K- and J-functionals, their witnesses and piecewise-linear profiles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .._backend import fallback, kernels
from .seminorms import FiniteSeminorm, WeightedSpacePair, as_vector, flatten_weighted

CLOSED_FORM_KINDS = ("diag-l1", "l1-linf", "linf-l1")


@dataclass(frozen=True)
class Decomposition:
    """A splitting ``x = x0 + x1`` with cost ``[x0]_0 + t [x1]_1``."""

    x0: np.ndarray
    x1: np.ndarray
    t: float
    value: float


@dataclass(frozen=True)
class KResult:
    value: float
    witness: Decomposition
    method: str
    converged: bool = True
    iterations: int = 0

    def __float__(self):
        return self.value


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0 or math.isnan(t):
        raise ValueError(f"scale t must be positive, got {t}")
    return t


def _decomposition(pair, x, x0, t) -> Decomposition:
    x1 = x - x0
    return Decomposition(x0, x1, t, pair.X0(x0) + t * pair.X1(x1))


def _diag_l1(pair, t, x):
    w0 = flatten_weighted(pair.X0).weights
    w1 = flatten_weighted(pair.X1).weights
    # ties go to X0
    to_x0 = w0 <= t * w1
    x0 = np.where(to_x0, x, 0)
    value = float(np.sum(np.minimum(w0, t * w1) * np.abs(x)))
    return KResult(value, Decomposition(x0, x - x0, t, value), "closed-form")


def _l1_linf_levels(a, b, ax):
    """Candidate clipping levels and the matching cost lines.

    With X0 = weighted l1 (weights a) and X1 = weighted l-infinity (weights b),
    clipping x at level ``lam`` in X1 costs ``lam`` there and
    ``sum a_i (|x_i| - lam/b_i)_+`` in X0. Returns (levels, costs).
    """
    live = b > 0
    levels = np.unique(np.concatenate([[0.0], (b * ax)[live]]))
    over = np.zeros((levels.size, ax.size))
    lv, bl, al = levels[:, None], b[live][None, :], ax[live][None, :]
    # compare against b|x| itself so that a coordinate clipped at its own level is exactly 0
    over[:, live] = np.where(lv >= bl * al, 0.0, al - lv / bl)
    costs = over @ a
    return levels, costs


def _l1_linf(pair, t, x, swap=False):
    if swap:
        inner = _l1_linf(pair.swapped(), 1.0 / t, x)
        w = inner.witness
        value = t * inner.value
        return KResult(value, Decomposition(w.x1, w.x0, t, value), "closed-form")
    a = flatten_weighted(pair.X0).weights
    b = flatten_weighted(pair.X1).weights
    ax = np.abs(x)
    levels, costs = _l1_linf_levels(a, b, ax)
    totals = costs + t * levels
    best = totals.min()
    # smallest minimising level keeps the most mass in X0
    k = int(np.flatnonzero(totals <= best * (1 + 1e-15) + 1e-300)[0])
    lam = levels[k]
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(b > 0, lam / np.where(b > 0, b, 1.0), np.inf)
        shrink = np.where(ax > cap, cap / np.where(ax > 0, ax, 1.0), 1.0)
    x1 = x * shrink
    x0 = x - x1
    return KResult(float(best), Decomposition(x0, x1, t, float(best)), "closed-form")


def _lattice_search(pair, t, x, tol, maxit):
    a = flatten_weighted(pair.X0)
    b = flatten_weighted(pair.X1)
    if np.iscomplexobj(x):
        # lattice norms only see magnitudes; solve for |x| and restore phases
        phase = np.where(np.abs(x) > 0, x / np.where(np.abs(x) > 0, np.abs(x), 1), 1)
        res = _lattice_search(pair, t, np.abs(x), tol, maxit)
        x0 = res.witness.x0 * phase
        return KResult(res.value, _decomposition(pair, x, x0, t), res.method,
                       res.converged, res.iterations)
    y, f, it, ok = kernels.lattice_pair_descent(
        np.ascontiguousarray(a.weights), a.p, np.ascontiguousarray(b.weights), b.p,
        np.ascontiguousarray(x, dtype=np.float64), t, tol, int(maxit),
    )
    dec = _decomposition(pair, x, np.asarray(y), t)
    return KResult(dec.value, dec, "convex-search", bool(ok), int(it))


def _generic_search(pair, t, x, tol, maxit, radius):
    if np.iscomplexobj(x):
        raise ValueError("general convex search supports real vectors only")
    if pair.X0.lattice and pair.X1.lattice:
        lo, hi = np.minimum(0.0, x), np.maximum(0.0, x)
    else:
        r = radius if radius is not None else 4.0 * float(np.max(np.abs(x)))
        lo, hi = np.full(x.size, -r), np.full(x.size, r)
    X0, X1 = pair.X0, pair.X1
    y, f, it, ok = fallback.box_descent(
        lambda y: X0(np.asarray(y)) + t * X1(x - np.asarray(y)), x, lo, hi, tol, maxit
    )
    dec = _decomposition(pair, x, np.asarray(y), t)
    return KResult(dec.value, dec, "convex-search", bool(ok), int(it))


def k_functional(pair: WeightedSpacePair, t: float, x, method: str = "auto",
                 tol: float = 1e-9, maxit: int = 100_000,
                 radius: float | None = None) -> KResult:
    """K(t, x) = inf over x = x0 + x1 of [x0]_0 + t [x1]_1, with a witness.

    ``method`` is 'closed-form', 'convex-search' or 'auto' (closed form when
    the pair admits one). The convex search reports ``converged=False`` when
    it hits ``maxit``; its value is then only an upper bound.
    """
    t = _check_t(t)
    x = pair.check(x)
    if not np.any(x):
        zero = np.zeros_like(x)
        return KResult(0.0, Decomposition(zero, zero.copy(), t, 0.0),
                       "closed-form" if method != "convex-search" else method)
    kind = pair.kind
    if method == "auto":
        method = "closed-form" if kind in CLOSED_FORM_KINDS else "convex-search"
    if method == "closed-form":
        if kind == "diag-l1":
            return _diag_l1(pair, t, x)
        if kind in ("l1-linf", "linf-l1"):
            return _l1_linf(pair, t, x, swap=(kind == "linf-l1"))
        raise ValueError(f"no closed form for a pair of kind {kind!r}")
    if method == "convex-search":
        if kind != "general":
            return _lattice_search(pair, t, x, tol, maxit)
        return _generic_search(pair, t, x, tol, maxit, radius)
    raise ValueError(f"unknown method {method!r}")


def k_functional_bruteforce(pair: WeightedSpacePair, t: float, x, points: int = 41,
                            levels: int = 30, radius: float | None = None) -> float:
    """Grid-search oracle for K in dimension at most 3.

    Evaluates the objective on a tensor grid, then repeatedly zooms in around
    the best point. Slow and independent of every other K routine.
    """
    t = _check_t(t)
    x = pair.check(x).astype(np.float64)
    d = x.size
    if d > 3:
        raise ValueError("brute-force oracle is limited to dimension <= 3")
    if pair.X0.lattice and pair.X1.lattice:
        lo, hi = np.minimum(0.0, x), np.maximum(0.0, x)
    else:
        r = radius if radius is not None else 4.0 * float(np.max(np.abs(x)) or 1.0)
        lo, hi = np.full(d, -r), np.full(d, r)
    best_val, best_y = math.inf, np.zeros(d)
    for _ in range(levels):
        axes = [np.linspace(lo[i], hi[i], points) for i in range(d)]
        ys = np.array(list(itertools.product(*axes)))
        vals = pair.X0.batch(ys) + t * pair.X1.batch(x[None, :] - ys)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_y = float(vals[k]), ys[k]
        width = (hi - lo) * 4.0 / (points - 1)
        lo_new = np.maximum(lo, best_y - width / 2)
        hi_new = np.minimum(hi, best_y + width / 2)
        if np.all(hi_new - lo_new <= 1e-15 * (1 + np.abs(best_y))):
            break
        lo, hi = lo_new, hi_new
    return float(best_val)


def k_profile(pair: WeightedSpacePair, x, ts, method: str = "auto", **kw) -> np.ndarray:
    """K(t, x) at every scale in ``ts``."""
    x = pair.check(x)
    ts = np.asarray(ts, dtype=np.float64)
    if np.any(ts <= 0):
        raise ValueError("scales must be positive")
    kind = pair.kind
    if method in ("auto", "closed-form") and kind == "diag-l1":
        w0 = np.ascontiguousarray(flatten_weighted(pair.X0).weights)
        w1 = np.ascontiguousarray(flatten_weighted(pair.X1).weights)
        return np.asarray(kernels.k_diag_l1(w0, w1, np.ascontiguousarray(np.abs(x)), ts))
    if method in ("auto", "closed-form") and kind in ("l1-linf", "linf-l1"):
        return k_envelope(pair, x)(ts)
    return np.array([k_functional(pair, t, x, method=method, **kw).value for t in ts])


def j_functional(pair: WeightedSpacePair, t: float, x) -> float:
    """J(t, x) = max([x]_0, t [x]_1)."""
    t = _check_t(t)
    x = pair.check(x)
    return max(pair.X0(x), t * pair.X1(x))


@dataclass(frozen=True)
class KEnvelope:
    """K(., x) as a lower envelope ``min_j (a_j + b_j t)`` of affine functions.

    Closed-form pairs have polyhedral K, so this representation is exact and
    allows interpolation integrals to be computed piece by piece.
    """

    intercepts: np.ndarray
    slopes: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        vals = self.intercepts[None, :] + np.multiply.outer(t.reshape(-1), self.slopes)
        return vals.min(axis=1).reshape(t.shape)

    def pieces(self):
        """Breakpoints ``0 = t_0 < t_1 < ... < t_m = inf`` with the active line.

        Returns (knots, intercepts, slopes) where piece i covers
        (knots[i], knots[i+1]).
        """
        a, b = self.intercepts, self.slopes
        # at t = 0+ the smallest intercept wins, ties go to the smaller slope
        cur = int(np.lexsort((b, a))[0])
        knots, ints, slo = [0.0], [a[cur]], [b[cur]]
        while True:
            cand = np.flatnonzero(b < b[cur])
            if cand.size == 0:
                break
            cross = np.maximum((a[cand] - a[cur]) / (b[cur] - b[cand]), knots[-1])
            tnext = cross.min()
            tied = cand[cross <= tnext]
            cur = int(tied[np.argmin(b[tied])])
            if tnext > knots[-1]:
                knots.append(tnext)
                ints.append(a[cur])
                slo.append(b[cur])
            else:
                ints[-1], slo[-1] = a[cur], b[cur]
        knots.append(math.inf)
        return np.array(knots), np.array(ints), np.array(slo)


def k_envelope(pair: WeightedSpacePair, x) -> KEnvelope:
    """Exact affine-envelope representation of K(., x) for closed-form pairs."""
    x = pair.check(x)
    kind = pair.kind
    ax = np.abs(x)
    if kind == "diag-l1":
        w0 = flatten_weighted(pair.X0).weights
        w1 = flatten_weighted(pair.X1).weights
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(w1 > 0, w0 / np.where(w1 > 0, w1, 1.0), np.inf)
        cuts = np.unique(np.concatenate([[0.0], ratios[np.isfinite(ratios)]]))
        # on [c_j, c_{j+1}] the coordinates with ratio <= c_j sit in X0
        in0 = ratios[None, :] <= cuts[:, None]
        ints = np.where(in0, w0 * ax, 0.0).sum(axis=1)
        slo = np.where(in0, 0.0, w1 * ax).sum(axis=1)
        return KEnvelope(ints, slo)
    if kind in ("l1-linf", "linf-l1"):
        p = pair if kind == "l1-linf" else pair.swapped()
        a = flatten_weighted(p.X0).weights
        b = flatten_weighted(p.X1).weights
        levels, costs = _l1_linf_levels(a, b, ax)
        if kind == "l1-linf":
            return KEnvelope(costs, levels)
        return KEnvelope(levels, costs)
    raise ValueError(f"no exact envelope for a pair of kind {kind!r}")


class KSeminorm(FiniteSeminorm):
    """x -> K(t, x) for a fixed scale, itself a seminorm."""

    def __init__(self, pair: WeightedSpacePair, t: float, **kw):
        self.pair, self.t, self.kw = pair, _check_t(t), kw
        self.dim = pair.dim
        self.lattice = pair.X0.lattice and pair.X1.lattice

    def _eval(self, v):
        return k_functional(self.pair, self.t, v, **self.kw).value


class JSeminorm(FiniteSeminorm):
    """x -> J(t, x) for a fixed scale."""

    def __init__(self, pair: WeightedSpacePair, t: float):
        self.pair, self.t = pair, _check_t(t)
        self.dim = pair.dim
        self.lattice = pair.X0.lattice and pair.X1.lattice

    def _eval(self, v):
        return j_functional(self.pair, self.t, v)
