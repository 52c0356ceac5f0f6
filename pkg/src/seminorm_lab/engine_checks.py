"""Randomized property checks of the finite-dimensional engine.

Each routine draws its cases from the generator it is given and returns
:class:`~seminorm_lab.reports.Check` rows, so the CLI can merge them with the
grid reports and the tests can count violations.
"""
from __future__ import annotations

import math

import numpy as np

from .core import (
    InterpolationParams,
    WeightedNorm,
    WeightedSpacePair,
    fundamental_bound_ratios,
    fundamental_decomposition,
    hardy_verify,
    integrated_rearrangement,
    interpolation_seminorm,
    k_functional,
    k_functional_bruteforce,
    k_method_exact,
    l1,
    linf,
    random_step_function,
)
from .reports import Check

S_GRID = (0.25, 0.5, 0.75)
Q_GRID = (1.0, 2.0, math.inf)
P_GRID = (1.0, 1.5, 2.0, 3.0)


def random_element(rng: np.random.Generator, dim: int, zeros: float = 0.15) -> np.ndarray:
    x = rng.normal(size=dim) * np.exp(rng.uniform(-2, 2, dim))
    x[rng.random(dim) < zeros] = 0.0
    return x


def random_diag_pair(rng: np.random.Generator, dim: int, null: float = 0.1) -> WeightedSpacePair:
    """Weighted l1/l1 pair; some X0 weights vanish, so X0 may be a true seminorm."""
    w0 = np.exp(rng.uniform(-3, 3, dim))
    w1 = np.exp(rng.uniform(-3, 3, dim))
    w0[rng.random(dim) < null] = 0.0
    return WeightedSpacePair(WeightedNorm(w0, 1.0), WeightedNorm(w1, 1.0))


def _scale(rng):
    return math.exp(rng.uniform(-4, 4))


def _q(q):
    return "inf" if math.isinf(q) else f"{q:g}"


def k_oracle_checks(rng: np.random.Generator, cases: int = 1000, max_dim: int = 6,
                    rtol: float = 1e-7, brute_rtol: float = 1e-4,
                    brute_dim: int = 3) -> list[Check]:
    """Convex search and the grid oracle against the closed form on diagonal pairs."""
    out = []
    for i in range(cases):
        dim = int(rng.integers(1, max_dim + 1))
        pair = random_diag_pair(rng, dim)
        x, t = random_element(rng, dim), _scale(rng)
        exact = k_functional(pair, t, x, method="closed-form").value
        search = k_functional(pair, t, x, method="convex-search").value
        out.append(Check(f"engine:k-search:{i:04d}", abs(search - exact), exact, rtol))
        if dim <= brute_dim:
            brute = k_functional_bruteforce(pair, t, x, points=21 if dim == 3 else 41)
            out.append(Check(f"engine:k-brute:{i:04d}", abs(brute - exact), exact, brute_rtol))
    return out


def rearrangement_checks(rng: np.random.Generator, cases: int = 200, max_dim: int = 16,
                         rtol: float = 1e-7) -> list[Check]:
    """K for (l1, l_inf) against the integrated decreasing rearrangement."""
    out = []
    for i in range(cases):
        dim = int(rng.integers(1, max_dim + 1))
        pair = WeightedSpacePair(l1(dim), linf(dim))
        x = random_element(rng, dim)
        t = rng.uniform(0, dim + 2) if rng.random() < 0.7 else _scale(rng)
        t = max(t, 1e-6)
        oracle = integrated_rearrangement(x, t)
        for method in ("closed-form", "convex-search"):
            got = k_functional(pair, t, x, method=method).value
            out.append(Check(f"engine:l1-linf:{method}:{i:03d}", abs(got - oracle), oracle, rtol))
    return out


def discrete_constants(s: float, q: float, r: float = 2.0, sigma: float = 1.0,
                       corrected: bool = False) -> tuple[float, float]:
    """``(low, high)`` with ``low [x] <= ||r^(sk) K(sigma r^-k)||_q <= high [x]``.

    ``corrected`` adds the k = 0 term, bounded by the integral over
    ``(sigma / r, sigma)``, to the upper constant.
    """
    if math.isinf(q):
        return (sigma / r) ** s, sigma ** s
    c = (s * q * sigma ** (s * q) / (r ** (s * q) - 1.0)) ** (1.0 / q)
    high = r ** s * c
    if corrected:
        first = sigma ** (s * q) * q * (1 - s) / (1 - r ** (-q * (1 - s)))
        high = (first + high ** q) ** (1.0 / q)
    return c, high


def discrete_bracket_checks(rng: np.random.Generator, cases: int = 100, max_dim: int = 6,
                            r: float = 2.0, sigma: float = 1.0, slack: float = 1e-3,
                            corrected: bool = False) -> list[Check]:
    """Dyadic sums of K against the exact truncated integral."""
    out = []
    tag = "discrete-corrected" if corrected else "discrete"
    for i in range(cases):
        dim = int(rng.integers(1, max_dim + 1))
        pair = random_diag_pair(rng, dim)
        x = random_element(rng, dim)
        for s in S_GRID:
            for q in Q_GRID:
                params = InterpolationParams(s, q, sigma)
                cont = k_method_exact(pair, params, x).value
                disc = interpolation_seminorm(pair, params, x, mode="discrete", r=r).value
                lo, hi = discrete_constants(s, q, r, sigma, corrected)
                cid = f"engine:{tag}:s={s:g},q={_q(q)}:{i:03d}"
                out.append(Check(cid + ":lower", lo * cont, disc, 1 + slack))
                out.append(Check(cid + ":upper", disc, hi * cont, 1 + slack))
    return out


def inclusion_checks(rng: np.random.Generator, cases: int = 50, max_dim: int = 6,
                     rtol: float = 1e-9) -> list[Check]:
    """The five inclusion estimates between truncated K-method seminorms."""
    out = []
    c = 1 + rtol
    for i in range(cases):
        dim = int(rng.integers(1, max_dim + 1))
        pair = random_diag_pair(rng, dim)
        x = random_element(rng, dim)
        sigma, rho = _scale(rng), _scale(rng)
        x1 = pair.X1(x)

        def sem(s, q, radius):
            return k_method_exact(pair, InterpolationParams(s, q, radius), x).value

        for s in S_GRID:
            for q in Q_GRID:
                tag = f"s={s:g},q={_q(q)}:{i:03d}"
                out.append(Check(f"engine:inclusion-1:{tag}", sem(s, q, rho), sem(s, q, math.inf), c))
                k2 = max(rho ** s * sigma ** -s, sigma ** (1 - s) * rho ** (s - 1))
                out.append(Check(f"engine:inclusion-2:{tag}", sem(s, q, sigma),
                                 k2 * sem(s, q, rho), c))
                for t in S_GRID:
                    if t > s:
                        out.append(Check(f"engine:inclusion-3:t={t:g},{tag}", sem(s, q, sigma),
                                         sigma ** (t - s) * sem(t, q, sigma), c))
                d = sigma ** (1 - s)
                if math.isfinite(q):
                    d *= (q * (1 - s)) ** (-1.0 / q)
                out.append(Check(f"engine:inclusion-4:{tag}", sem(s, q, sigma), d * x1, c))
                for p in Q_GRID:
                    if p < q:
                        if math.isinf(q):
                            k5 = (p * (1 - s)) ** (1.0 / p)
                        else:
                            k5 = (p * (1 - s)) ** ((q - p) / (p * q))
                        out.append(Check(f"engine:inclusion-5:p={_q(p)},{tag}", sem(s, q, sigma),
                                         k5 * sem(s, p, sigma), c))
    return out


def fundamental_lemma_checks(rng: np.random.Generator, cases: int = 100, max_dim: int = 4,
                             r: float = 2.0, rtol: float = 1e-6) -> list[Check]:
    """Pointwise J bound for the pieces of the fundamental decomposition.

    Each row compares the worst ratio over the log grid with 1; the constant
    ``r (1 + r) / log r`` sits inside the ratio.
    """
    out = []
    for i in range(cases):
        dim = int(rng.integers(1, max_dim + 1))
        pair = random_diag_pair(rng, dim)
        x = random_element(rng, dim, zeros=0.0)
        s = float(rng.choice(S_GRID))
        dec = fundamental_decomposition(pair, x, r=r, s=s, depth=24)
        worst = float(fundamental_bound_ratios(pair, x, dec, per_cell=2).max())
        out.append(Check(f"engine:fundamental:{i:03d}", worst, 1.0, 1 + rtol))
    return out


def hardy_checks(rng: np.random.Generator, cases: int = 100, s_grid=S_GRID, p_grid=P_GRID,
                 rtol: float = 1e-12) -> list[Check]:
    """Both Hardy forms on random step functions, with finite and infinite radius."""
    out = []
    for i in range(cases):
        edges, omega = random_step_function(rng, int(rng.integers(1, 16)), _scale(rng))
        for s in s_grid:
            for p in p_grid:
                tag = f"s={s:g},p={p:g}:{i:03d}"
                for form, sigma in ((0, None), (0, math.inf), (1, None)):
                    res = hardy_verify(edges, omega, s, p, sigma, form=form)
                    where = "inf" if sigma == math.inf else "edge"
                    out.append(Check(f"hardy:form={form},sigma={where}:{tag}", res.lhs, res.rhs,
                                     res.constant * (1 + rtol)))
    return out


def engine_suite(seed: int, scale: float = 1.0) -> list[Check]:
    """All engine checks; ``scale`` multiplies the case counts."""
    def n(count):
        return max(1, int(round(count * scale)))

    out = []
    # independent streams per check keep each family stable when another changes
    streams = np.random.SeedSequence(seed).spawn(7)
    rngs = [np.random.default_rng(ss) for ss in streams]
    out += k_oracle_checks(rngs[0], n(1000))
    out += rearrangement_checks(rngs[1], n(200))
    out += discrete_bracket_checks(rngs[2], n(100), corrected=True)
    out += inclusion_checks(rngs[3], n(50))
    out += fundamental_lemma_checks(rngs[4], n(100))
    out += hardy_checks(rngs[5], n(100))
    return out
