"""Constructive decompositions built from near-optimal K witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .functionals import j_functional, k_functional
from .interpolation import InterpolationParams, InterpolationSeminorm, interpolation_seminorm
from .seminorms import WeightedNorm, WeightedSpacePair, flatten_weighted


class WitnessError(RuntimeError):
    """A witness decomposition could not be found to the required accuracy."""


def log_damping(t, s: float):
    """``t^s / (1 + log(t)^2)``: the slack schedule for near-optimal witnesses."""
    t = np.asarray(t, dtype=np.float64)
    return t ** s / (1.0 + np.log(t) ** 2)


def _witness(pair, t, x, **kw):
    res = k_functional(pair, t, x, **kw)
    if res.method == "convex-search" and not res.converged:
        raise WitnessError(f"K witness search did not converge at t={t:.6g}")
    return res


@dataclass(frozen=True)
class FundamentalDecomposition:
    """Differences of near-optimal witnesses at the scales ``r^k``, |k| <= depth.

    ``y[k]`` and ``z[k]`` are the X0 and X1 parts at scale ``r^k`` for
    ``k = -depth-1 .. depth`` (row ``k + depth + 1``); ``xi[k] = y[k] - y[k-1]``
    for ``k = -depth .. depth`` (row ``k + depth``).
    """

    r: float
    depth: int
    eps: float
    s: float
    y: np.ndarray
    z: np.ndarray
    xi: np.ndarray
    residual: float
    endpoint_decay: tuple[float, float]

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.depth, self.depth + 1)

    def partial_sum(self, m: int) -> np.ndarray:
        """``sum_{|k| <= m} xi_k``."""
        m = min(m, self.depth)
        return self.xi[self.depth - m: self.depth + m + 1].sum(axis=0)

    def as_j_sequence(self) -> dict[int, np.ndarray]:
        """The pieces re-indexed for ``j_method_upper_bound``.

        Piece ``k`` lives at scale about ``r^k`` while the J-method term
        ``r^(sj) J(r^-j, .)`` sits at scale ``r^-j``, hence ``j = -k``.
        """
        return {int(-k): self.xi[i] for i, k in enumerate(self.ks)}


def fundamental_decomposition(pair: WeightedSpacePair, x, r: float = 2.0,
                              eps: float | None = None, depth: int = 40,
                              s: float = 0.5, **kw) -> FundamentalDecomposition:
    """Split x into pieces ``xi_k`` localized at the scales ``r^k``.

    The witness at scale ``r^k`` is required to be within ``eps * phi(r^k)``
    of K, with ``phi = log_damping(., s)``; ``eps`` defaults to
    ``1e-8 [x]_sum``. The residual ``[x - sum xi_k]_sum`` is reported.
    """
    if not r > 1.0:
        raise ValueError("r must exceed 1")
    x = pair.check(x)
    total = k_functional(pair, 1.0, x).value
    if eps is None:
        eps = 1e-8 * total
    ks = np.arange(-depth - 1, depth + 1)
    y = np.zeros((ks.size, x.size), dtype=x.dtype)
    z = np.zeros_like(y)
    vals = np.zeros(ks.size)
    for i, k in enumerate(ks):
        t = r ** float(k)
        res = _witness(pair, t, x, **kw)
        y[i], z[i], vals[i] = res.witness.x0, res.witness.x1, res.value
    xi = np.diff(y, axis=0)
    rest = x - xi.sum(axis=0)
    residual = k_functional(pair, 1.0, rest).value if np.any(rest) else 0.0
    # K(t)/K(1) at the small end and K(t)/(t K(1)) at the large end
    scale = total if total > 0 else 1.0
    decay = (vals[0] / scale, vals[-1] / (r ** float(depth) * scale))
    return FundamentalDecomposition(float(r), int(depth), float(eps), float(s), y, z, xi,
                                    float(residual), decay)


def fundamental_bound_ratios(pair: WeightedSpacePair, x, dec: FundamentalDecomposition,
                             per_cell: int = 4) -> np.ndarray:
    """Ratios lhs/rhs of the pointwise J bound along a log grid.

    On ``[r^(k-1), r^k)`` the integrand is ``u = xi_k / log r`` and the bound
    reads ``J(t, u) <= r(1+r)/log r * (K(t, x) + eps phi(t))``. Ratios above 1
    are violations. Zero pieces at zero K give ratio 0.
    """
    r, lr = dec.r, math.log(dec.r)
    const = r * (1.0 + r) / lr
    out = []
    for i, k in enumerate(dec.ks):
        u = dec.xi[i] / lr
        for j in range(per_cell):
            t = r ** (k - 1 + j / per_cell)
            lhs = j_functional(pair, t, u)
            rhs = const * (k_functional(pair, t, x).value + dec.eps * float(log_damping(t, dec.s)))
            out.append(0.0 if lhs == 0.0 else lhs / rhs if rhs > 0 else math.inf)
    return np.array(out)


def _lq(values: np.ndarray, q: float) -> float:
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(values.max())
    top = values.max()
    if top == 0.0:
        return 0.0
    return float(top * np.sum((values / top) ** q) ** (1.0 / q))


def j_method_upper_bound(pair: WeightedSpacePair, s: float, q: float, x,
                         xi: Mapping[int, np.ndarray], r: float = 2.0,
                         rtol: float = 1e-6) -> float:
    """``|| {r^(sk) J(r^-k, xi_k)} ||_{l^q}`` for a decomposition ``x = sum xi_k``.

    ``xi`` maps integer indices to vectors. Raises ValueError when the pieces
    do not sum to x within ``rtol`` in the sum seminorm.
    """
    x = pair.check(x)
    ks = sorted(xi)
    pieces = [pair.check(xi[k]) for k in ks]
    rest = x - (np.sum(pieces, axis=0) if pieces else 0.0)
    if np.any(rest):
        scale = k_functional(pair, 1.0, x).value
        res = k_functional(pair, 1.0, rest).value
        if res > rtol * max(scale, 1e-300):
            raise ValueError(f"pieces miss x by {res:.3g} in the sum seminorm")
    terms = np.array([r ** (s * k) * j_functional(pair, r ** float(-k), v)
                      for k, v in zip(ks, pieces)])
    return _lq(terms, q)


@dataclass(frozen=True)
class SumWitness:
    """``x = eta + rest`` with ``eta`` priced in X1 and ``rest`` by a J sum."""

    eta: np.ndarray
    rest: np.ndarray
    bound0: float
    bound1: float
    pieces: dict
    residual: float


def sum_characterization_witness(pair: WeightedSpacePair, params: InterpolationParams, x,
                                 depth: int = 60, **kw) -> SumWitness:
    """Split x into an X1 part and a part of the untruncated space.

    With witnesses ``x = a_k + b_k`` at the scales ``sigma 2^-k``, take
    ``eta = b_0``, so ``[eta]_1 <= K(sigma, x) / sigma``. The rest
    ``a_0 = sum_k (a_k - a_(k+1))`` up to the residual ``a_(depth+1)``;
    ``bound0`` is the J-method sum ``|| {2^(sk) J(sigma 2^-k, a_k - a_(k+1))} ||_q``.
    """
    if math.isinf(params.sigma):
        raise ValueError("the sum characterization needs a finite sigma")
    x = pair.check(x)
    s, q, sigma = params.s, params.q, params.sigma
    a, b = [], []
    for k in range(depth + 2):
        res = _witness(pair, sigma * 2.0 ** -k, x, **kw)
        a.append(res.witness.x0)
        b.append(res.witness.x1)
    eta = b[0]
    rest = x - eta
    pieces = {k: a[k] - a[k + 1] for k in range(depth + 1)}
    terms = np.array([2.0 ** (s * k) * j_functional(pair, sigma * 2.0 ** -k, v)
                      for k, v in pieces.items()])
    tail = a[depth + 1]
    residual = k_functional(pair, 1.0, tail).value if np.any(tail) else 0.0
    return SumWitness(eta, rest, _lq(terms, q), pair.X1(eta), pieces, float(residual))


def _diag_weights(pair):
    a, b = flatten_weighted(pair.X0), flatten_weighted(pair.X1)
    if pair.kind != "diag-l1":
        raise ValueError("reiteration spot check expects a diagonal l1 pair")
    return a.weights, b.weights


def interpolated_l1_weights(pair: WeightedSpacePair, s: float) -> np.ndarray:
    """Weights of ``(X0, X1)_{s,1}`` (sigma infinite) for a diagonal l1 pair.

    ``int_0^inf t^-s min(w0, t w1) dt/t = w0^(1-s) w1^s / (s (1-s))``, so the
    space is again a diagonal weighted l1 space.
    """
    w0, w1 = _diag_weights(pair)
    return w0 ** (1 - s) * w1 ** s / (s * (1 - s))


@dataclass(frozen=True)
class ReiterationSample:
    x: np.ndarray
    outer: float
    direct: float

    @property
    def ratio(self) -> float:
        return self.outer / self.direct if self.direct > 0 else math.nan


def reiteration_spot_check(pair: WeightedSpacePair, s0: float, s1: float, theta: float,
                           q: float, xs, **options) -> list[ReiterationSample]:
    """Compare ``((X)_{s0,q}, (X)_{s1,q})_{theta,q}`` with ``(X)_{s,q}``.

    Here ``s = (1-theta) s0 + theta s1`` and all methods are untruncated. For
    ``q = 1`` the intermediate spaces are built as the weighted l1 spaces they
    are, so everything is exact; otherwise they are InterpolationSeminorm
    factors and the outer K comes from convex search (slow, keep dims small).
    ``options`` go to the outer interpolation_seminorm call.
    """
    s = (1 - theta) * s0 + theta * s1
    inf = math.inf
    if q == 1.0:
        outer_pair = WeightedSpacePair(WeightedNorm(interpolated_l1_weights(pair, s0), 1.0),
                                       WeightedNorm(interpolated_l1_weights(pair, s1), 1.0))
        opts = {"backend": "exact", **options}
    else:
        inner = {"backend": "exact"}
        outer_pair = WeightedSpacePair(
            InterpolationSeminorm(pair, InterpolationParams(s0, q, inf), **inner),
            InterpolationSeminorm(pair, InterpolationParams(s1, q, inf), **inner),
        )
        opts = {"depth": 12, "intervals": 96, **options}
    out = []
    for x in xs:
        x = pair.check(x)
        outer = interpolation_seminorm(outer_pair, InterpolationParams(theta, q, inf), x, **opts)
        direct = interpolation_seminorm(pair, InterpolationParams(s, q, inf), x, backend="exact")
        out.append(ReiterationSample(x, outer.value, direct.value))
    return out
