"""Truncated K-method interpolation seminorms, continuous and discrete."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .functionals import CLOSED_FORM_KINDS, KEnvelope, k_envelope, k_profile
from .quadrature import DEFAULT_DEPTH, DEFAULT_INTERVALS, QuadratureGrid, gauss_legendre_log
from .seminorms import FiniteSeminorm, WeightedSpacePair


class QuadratureToleranceError(RuntimeError):
    """The requested tolerance is out of reach at the configured depth."""


@dataclass(frozen=True)
class InterpolationParams:
    """Exponents of a truncated K-method: ``0 < s < 1``, ``q >= 1``, ``sigma > 0``.

    ``q`` and ``sigma`` accept ``math.inf``.
    """

    s: float
    q: float = 2.0
    sigma: float = 1.0

    def __post_init__(self):
        s, q, sigma = float(self.s), float(self.q), float(self.sigma)
        if not 0.0 < s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {s}")
        if not q >= 1.0:
            raise ValueError(f"q must be >= 1, got {q}")
        if not sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class SeminormEstimate:
    """A computed seminorm value with an error estimate.

    ``error`` bounds the discretization and truncation error on the final
    value (after the 1/q power); ``tail`` is the truncated-tail contribution
    that was added analytically.
    """

    value: float
    error: float = 0.0
    tail: float = 0.0

    def __float__(self):
        return self.value


def _root(total: float, err: float, q: float) -> tuple[float, float]:
    if total <= 0.0:
        return 0.0, err ** (1.0 / q)
    v = total ** (1.0 / q)
    return v, (total + err) ** (1.0 / q) - v


def _checked(est: SeminormEstimate, rtol: float | None) -> SeminormEstimate:
    if rtol is not None and est.error > rtol * est.value:
        raise QuadratureToleranceError(
            f"estimated error {est.error:.3g} exceeds {rtol:.3g} relative on value {est.value:.6g}"
        )
    return est


def k_method_nodes(kfun: Callable[[np.ndarray], np.ndarray], params: InterpolationParams,
                   grid: QuadratureGrid, bound0: float, bound1: float) -> SeminormEstimate:
    """Node quadrature of ``(int (t^-s K(t))^q dt/t)^(1/q)`` for a K-like profile.

    ``kfun`` must be nondecreasing and concave in t (every K-functional is).
    ``bound0`` and ``bound1`` are the coarse bounds ``K(t) <= bound0`` and
    ``K(t) <= t bound1``; together with concavity they bracket the truncated
    tails, whose lower ends are added and whose widths enter the error.
    """
    s, q = params.s, params.q
    t = grid.nodes
    k = np.asarray(kfun(t), dtype=np.float64)
    t0, k0, tm, km = t[0], k[0], t[-1], k[-1]
    infinite = math.isinf(params.sigma)
    if math.isinf(q):
        vals = t ** -s * k
        best = float(vals.max())
        err = best * math.expm1(grid.step * max(s, 1.0 - s))
        # concavity caps the sup below t0 by t0^(1-s) bound1, above tm by tm^-s bound0
        below = t0 ** (1.0 - s) * bound1
        above = tm ** -s * bound0 if infinite else 0.0
        err += max(0.0, below - best) + max(0.0, above - best)
        return SeminormEstimate(best, err, 0.0)
    g = (t ** -s * k) ** q
    body, err = grid.integrate(g)
    sq, rq = s * q, (1.0 - s) * q
    # below t0: K(t0) t/t0 <= K(t) <= t bound1
    lo_tail = k0 ** q * t0 ** -sq / rq
    hi_tail = bound1 ** q * t0 ** rq / rq
    if infinite:
        # above tm: K(tm) <= K(t) <= bound0
        lo_tail += km ** q * tm ** -sq / sq
        hi_tail += bound0 ** q * tm ** -sq / sq
    total = body + lo_tail
    value, verr = _root(total, err + max(0.0, hi_tail - lo_tail), q)
    return SeminormEstimate(value, verr, lo_tail ** (1.0 / q))


def _power_integral(lo: float, hi: float, e: float) -> float:
    """``int_lo^hi t^e dt/t`` for 0 < lo < hi < inf, free of cancellation."""
    lr = math.log(lo / hi)
    if e == 0.0:
        return -lr
    return -(hi ** e) * math.expm1(e * lr) / e


def _piece_integral(a, b, lo, hi, s, q):
    """``int_lo^hi (t^-s (a + b t))^q dt/t`` on one affine piece."""
    if lo == 0.0:
        if a > 0.0:
            return math.inf
        return b ** q * hi ** ((1 - s) * q) / ((1 - s) * q) if b > 0 else 0.0
    if math.isinf(hi):
        if b > 0.0:
            return math.inf
        return a ** q * lo ** (-s * q) / (s * q) if a > 0 else 0.0
    if q == 1.0:
        return a * _power_integral(lo, hi, -s) + b * _power_integral(lo, hi, 1 - s)
    if q == 2.0:
        return (a * a * _power_integral(lo, hi, -2 * s)
                + 2 * a * b * _power_integral(lo, hi, 1 - 2 * s)
                + b * b * _power_integral(lo, hi, 2 - 2 * s))
    return gauss_legendre_log(lo, hi, lambda t: (t ** -s * (a + b * t)) ** q)


def k_method_exact(pair: WeightedSpacePair, params: InterpolationParams, x) -> SeminormEstimate:
    """Exact truncated K-method seminorm for pairs with a polyhedral K.

    K is a lower envelope of finitely many affine functions of t, so the
    integral splits into pieces with closed forms (q = 1, 2) or analytic
    integrands handled by Gauss-Legendre panels.
    """
    s, q, sigma = params.s, params.q, params.sigma
    knots, ints, slopes = k_envelope(pair, x).pieces()
    if math.isinf(q):
        # t^-s (a + b t) is quasi-convex on each piece: only knots and ends matter
        cand = [k for k in knots[1:-1] if k < sigma]
        if math.isfinite(sigma):
            cand.append(sigma)
        elif slopes[-1] > 0:
            return SeminormEstimate(math.inf)
        if ints[0] > 0:
            return SeminormEstimate(math.inf)
        if not cand:
            return SeminormEstimate(0.0)
        env = KEnvelope(ints, slopes)
        return SeminormEstimate(float(max(c ** -s * env(c) for c in cand)))
    total = 0.0
    for i in range(len(ints)):
        lo, hi = knots[i], min(knots[i + 1], sigma)
        if lo >= hi:
            break
        total += _piece_integral(ints[i], slopes[i], lo, hi, s, q)
    return SeminormEstimate(total ** (1.0 / q))


def _discrete(kfun, params, r, depth, bound0, bound1) -> SeminormEstimate:
    s, q, sigma = params.s, params.q, params.sigma
    if not r > 1.0:
        raise ValueError("discretization ratio r must exceed 1")
    span = math.ceil(depth * math.log(2.0) / math.log(r))
    infinite = math.isinf(sigma)
    ks = np.arange(-span if infinite else 0, span + 1)
    base = 1.0 if infinite else sigma
    a = r ** (s * ks) * np.asarray(kfun(base * r ** (-ks.astype(float))), dtype=np.float64)
    if math.isinf(q):
        best = float(a.max())
        # a_k <= r^(sk) base r^-k bound1 beyond the deep end, r^(sk) bound0 beyond the shallow one
        below = base * bound1 * r ** (-(1 - s) * (span + 1))
        above = bound0 * r ** (-s * (span + 1)) if infinite else 0.0
        return SeminormEstimate(best, max(0.0, below - best) + max(0.0, above - best))
    rq, sq = (1 - s) * q, s * q
    body = float(np.sum(a ** q))
    # K(base r^-k) >= r^-(k-span) K(base r^-span) by concavity
    lo_tail = a[-1] ** q / (r ** rq - 1.0)
    hi_tail = (base * bound1) ** q * r ** (-rq * (span + 1)) / (1.0 - r ** -rq)
    if infinite:
        lo_tail += a[0] ** q / (r ** sq - 1.0)
        hi_tail += bound0 ** q * r ** (-sq * (span + 1)) / (1.0 - r ** -sq)
    value, err = _root(body + lo_tail, max(0.0, hi_tail - lo_tail), q)
    return SeminormEstimate(value, err, lo_tail ** (1.0 / q))


def interpolation_seminorm(pair: WeightedSpacePair, params: InterpolationParams, x,
                           mode: str = "continuous", r: float = 2.0,
                           backend: str = "nodes", depth: int = DEFAULT_DEPTH,
                           intervals: int = DEFAULT_INTERVALS,
                           rtol: float | None = None, **kw) -> SeminormEstimate:
    """Truncated K-method seminorm ``[x]^(sigma)_{s,q}`` of the pair.

    ``mode='continuous'`` integrates ``(t^-s K(t,x))^q dt/t`` over
    ``(0, sigma)``; ``backend='nodes'`` uses log-uniform nodes with bracketed
    tails, ``backend='exact'`` integrates the polyhedral K piece by piece
    (closed-form pairs only). ``mode='discrete'`` returns the l^q norm of
    ``r^(sk) K(sigma r^-k, x)`` over k >= 0 (k in Z when sigma is infinite).
    Raises QuadratureToleranceError when ``rtol`` is given and the error
    estimate exceeds it.
    """
    x = pair.check(x)
    if not np.any(x):
        return SeminormEstimate(0.0)
    b0, b1 = pair.X0(x), pair.X1(x)

    def kfun(ts):
        return k_profile(pair, x, ts, **kw)

    if mode == "discrete":
        return _checked(_discrete(kfun, params, r, depth, b0, b1), rtol)
    if mode != "continuous":
        raise ValueError(f"unknown mode {mode!r}")
    if backend == "exact":
        if pair.kind not in CLOSED_FORM_KINDS:
            raise ValueError("exact backend needs a pair with closed-form K")
        return k_method_exact(pair, params, x)
    if backend != "nodes":
        raise ValueError(f"unknown backend {backend!r}")
    grid = QuadratureGrid(params.sigma, depth, intervals)
    return _checked(k_method_nodes(kfun, params, grid, b0, b1), rtol)


class InterpolationSeminorm(FiniteSeminorm):
    """x -> [x]^(sigma)_{s,q} of a pair, usable as a factor of a new pair."""

    def __init__(self, pair: WeightedSpacePair, params: InterpolationParams, **options):
        self.pair, self.params, self.options = pair, params, options
        self.dim = pair.dim
        self.lattice = pair.X0.lattice and pair.X1.lattice

    def _eval(self, v):
        return interpolation_seminorm(self.pair, self.params, v, **self.options).value

    def __repr__(self):
        p = self.params
        return f"InterpolationSeminorm(s={p.s}, q={p.q}, sigma={p.sigma})"
