"""Exact evaluation of both sides of the Hardy inequalities for step functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

DIGITS = 30


@dataclass(frozen=True)
class HardyResult:
    lhs: float
    rhs: float
    constant: float
    passed: bool


def _exp_poly(a, base, slope, length, p):
    """``int_0^length e^(-a u) (base + slope u)^p du`` in closed form.

    Substituting ``w = a (base/slope + u)`` turns it into an incomplete gamma
    difference.
    """
    a, base, slope, length = (mpmath.mpf(float(v)) for v in (a, base, slope, length))
    if slope == 0:
        return base ** p * -mpmath.expm1(-a * length) / a
    w0 = a * base / slope
    w1 = w0 + a * length
    return mpmath.exp(w0) * (slope / a) ** p / a * mpmath.gammainc(p + 1, w0, w1)


def _validate(edges, omega):
    edges = np.asarray(edges, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    if edges.ndim != 1 or omega.shape != (edges.size - 1,):
        raise ValueError("need K+1 increasing edges and K step values")
    if not (edges[0] > 0 and np.all(np.diff(edges) > 0)):
        raise ValueError("edges must be positive and strictly increasing")
    if np.any(omega < 0) or not np.all(np.isfinite(omega)):
        raise ValueError("step values must be finite and nonnegative")
    return edges, omega


def hardy_verify(edges, omega, s: float, p: float, sigma: float | None = None,
                 form: int = 0, rtol: float = 1e-12) -> HardyResult:
    """Both sides of a Hardy inequality for a nonnegative step function.

    The step function equals ``omega[k]`` on ``(edges[k], edges[k+1])`` and 0
    elsewhere. ``form=0`` compares ``t^-s int_0^t Omega(r) dr/r`` with
    ``t^-s Omega`` in ``L^p((0, sigma), dt/t)``; sigma defaults to the last
    edge and may be infinite. ``form=1`` compares ``t^s int_t^inf Omega dr/r``
    with ``t^s Omega`` on the whole half line. Both sides are exact (up to
    30-digit arithmetic); the claim is ``lhs <= rhs / s``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    if not 1.0 <= p < math.inf:
        raise ValueError("p must lie in [1, inf)")
    edges, omega = _validate(edges, omega)
    if sigma is None:
        sigma = float(edges[-1])
    if sigma < edges[-1]:
        keep = edges < sigma
        edges = np.append(edges[keep], sigma)
        omega = omega[: edges.size - 1]
    with mpmath.workdps(DIGITS):
        lhs, rhs = _sides(edges, omega, s, p, sigma, form)
    lhs_v = float(lhs ** (1.0 / p))
    rhs_v = float(rhs ** (1.0 / p))
    const = 1.0 / s
    return HardyResult(lhs_v, rhs_v, const, lhs_v <= const * rhs_v * (1.0 + rtol))


def _sides(edges, omega, s, p, sigma, form):
    sp = s * p
    lengths = np.log(edges[1:] / edges[:-1])
    lhs = mpmath.mpf(0)
    rhs = mpmath.mpf(0)
    if form == 0:
        acc = 0.0
        for k, (w, ell) in enumerate(zip(omega, lengths)):
            lhs += mpmath.mpf(edges[k]) ** -sp * _exp_poly(sp, acc, w, ell, p)
            rhs += mpmath.mpf(w) ** p * (mpmath.mpf(edges[k]) ** -sp - mpmath.mpf(edges[k + 1]) ** -sp) / sp
            acc += w * ell
        if math.isinf(sigma):
            lhs += mpmath.mpf(acc) ** p * mpmath.mpf(edges[-1]) ** -sp / sp
    elif form == 1:
        if math.isfinite(sigma) and sigma != edges[-1]:
            raise ValueError("form 1 lives on the whole half line")
        acc = 0.0
        for k in range(omega.size - 1, -1, -1):
            w, ell = omega[k], lengths[k]
            lhs += mpmath.mpf(edges[k + 1]) ** sp * _exp_poly(sp, acc, w, ell, p)
            rhs += mpmath.mpf(w) ** p * (mpmath.mpf(edges[k + 1]) ** sp - mpmath.mpf(edges[k]) ** sp) / sp
            acc += w * ell
        lhs += mpmath.mpf(acc) ** p * mpmath.mpf(edges[0]) ** sp / sp
    else:
        raise ValueError("form must be 0 or 1")
    return lhs, rhs


def random_step_function(rng: np.random.Generator, cells: int = 12,
                         sigma: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Random log-spaced edges ending at sigma and random heights (some zero)."""
    spans = rng.uniform(0.05, 2.0, cells)
    edges = sigma * np.exp(-np.concatenate([np.cumsum(spans[::-1])[::-1], [0.0]]))
    omega = rng.exponential(1.0, cells) * (rng.random(cells) > 0.2)
    return edges, omega
