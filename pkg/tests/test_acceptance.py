"""The twelve acceptance criteria, each at its stated tolerance.

Every test records one pass/fail line, printed in the terminal summary.
"""
import math

import numpy as np
import pytest

from conftest import ACCEPTANCE
from seminorm_lab import cli
from seminorm_lab.corpus import corpus
from seminorm_lab.engine_checks import (
    discrete_bracket_checks,
    fundamental_lemma_checks,
    hardy_checks,
    inclusion_checks,
    k_oracle_checks,
    rearrangement_checks,
)
from seminorm_lab.grid.ops import modulus_of_continuity
from seminorm_lab.littlewood_paley import almost_orthogonality, lp_square_seminorm
from seminorm_lab.screened import (ScreenedParams, cube_k_decomposition, equivalence_suite,
                                   hl_decompose)

SEED = 7
S_GRID = (0.25, 0.5, 0.75)
Q_GRID = (1.0, 2.0, math.inf)


def record(number, ok, detail):
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def worst(checks):
    out = 0.0
    for c in checks:
        if c.lhs == 0:
            continue
        out = max(out, c.lhs / (c.constant * c.rhs) if c.rhs > 0 else math.inf)
    return out


def summarize(number, label, checks):
    failed = [c for c in checks if not c.passed]
    record(number, not failed,
           f"{label}: {len(checks)} rows, {len(failed)} violations, "
           f"worst lhs/(constant*rhs) {worst(checks):.6g}")
    return failed


def test_c01_k_oracle():
    rows = k_oracle_checks(np.random.default_rng(SEED), cases=1000, max_dim=6,
                           rtol=1e-7, brute_rtol=1e-4)
    brute = [c for c in rows if ":k-brute:" in c.case_id]
    assert len(rows) - len(brute) == 1000 and brute
    failed = summarize(1, "convex search and grid oracle vs closed form", rows)
    assert not failed, failed[:5]


def test_c02_l1_linf_rearrangement():
    rows = rearrangement_checks(np.random.default_rng(SEED), cases=200, max_dim=16, rtol=1e-7)
    failed = summarize(2, "(l1, l_inf) K vs integrated rearrangement", rows)
    assert not failed, failed[:5]


@pytest.mark.xfail(strict=True, reason="the stated upper constant omits the k = 0 term; "
                                       "see test_discrete_bracket_corrected")
def test_c03_discrete_bracket():
    rows = discrete_bracket_checks(np.random.default_rng(SEED), cases=100, r=2.0, sigma=1.0,
                                   slack=1e-3)
    assert len(rows) == 100 * 9 * 2
    failed = summarize(3, "discrete vs continuous bracket, stated constants", rows)
    assert not failed, f"{len(failed)} violations, first {failed[0].case_id}"


def test_discrete_bracket_corrected():
    """Same cases, upper constant widened by the k = 0 term; the lower side is unchanged."""
    rows = discrete_bracket_checks(np.random.default_rng(SEED), cases=100, r=2.0, sigma=1.0,
                                   slack=1e-3, corrected=True)
    failed = [c for c in rows if not c.passed]
    assert not failed, failed[:5]
    stated = discrete_bracket_checks(np.random.default_rng(SEED), cases=100, slack=1e-3)
    lower = [c for c in stated if c.case_id.endswith(":lower")]
    assert all(c.passed for c in lower)
    bad = {c.case_id for c in stated if not c.passed}
    assert bad and all(":upper" in b for b in bad)


def test_c04_inclusions():
    rows = inclusion_checks(np.random.default_rng(SEED), cases=100, rtol=1e-9)
    items = {c.case_id.split(":")[1] for c in rows}
    assert items == {f"inclusion-{k}" for k in range(1, 6)}
    failed = summarize(4, "inclusion estimates, exact backend", rows)
    assert not failed, failed[:5]


def test_c05_fundamental_lemma():
    rows = fundamental_lemma_checks(np.random.default_rng(SEED), cases=100, r=2.0, rtol=1e-6)
    failed = summarize(5, "J bound on fundamental pieces, constant r(1+r)/log r", rows)
    assert not failed, failed[:5]


@pytest.mark.parametrize("which", [1, 2])
def test_c06_k_modulus_sandwich(which, corpus1, corpus2):
    fs = corpus1 if which == 1 else corpus2
    spec = fs[0].spec
    n = spec.n
    ts = np.geomspace(spec.L / 4 * 2.0 ** -8, spec.L / 4, 16)
    lower = upper = 0.0
    bad = []
    for f in fs:
        for p in (1.0, 2.0, math.inf):
            w = modulus_of_continuity(f, ts, p)
            k = np.array([cube_k_decomposition(f, t, p).k_upper for t in ts])
            lo, hi = w / (2 * k), k / ((1 + n ** 1.5) * w * 1.02)
            lower, upper = max(lower, lo.max()), max(upper, hi.max())
            # equality is attained when t is a whole number of periods; allow rounding only
            if lo.max() > 1 + 1e-12 or hi.max() > 1:
                bad.append((f.name, p))
    prev = ACCEPTANCE.get(6, (True, ""))
    detail = f"n={n}: max omega/(2 kUpper) {lower:.6g}, max kUpper/((1+n^1.5) omega 1.02) {upper:.6g}"
    record(6, prev[0] and not bad, (prev[1] + "; " if prev[1] else "") + detail)
    assert not bad


def _suite(fs, fine, params_list, items, refine):
    from seminorm_lab.littlewood_paley import build_partition

    spec = fs[0].spec
    part = build_partition(spec)
    fpart = build_partition(spec.refined()) if refine else None
    reports = []
    for f in fs:
        g = fine(f) if refine else None
        for prm in params_list:
            reports += equivalence_suite(f, prm, part, g, fpart, 0.02, items, f.name)
    return reports


def _record_reports(number, label, reports, extra=""):
    failed = [r for r in reports if not r.passed]
    ratios = [r.ratio for r in reports if r.rhs > 0]
    drift = [abs(r.ratio - r.reference) / abs(r.reference) for r in reports
             if r.reference is not None and r.rhs > 0]
    detail = (f"{label}: {len(reports)} reports, {len(failed)} failed, ratio range "
              f"[{min(ratios):.4g}, {max(ratios):.4g}]")
    if drift:
        detail += f", max drift {max(drift):.3g}"
    prev = ACCEPTANCE.get(number, (True, ""))
    record(number, prev[0] and not failed, (prev[1] + "; " if prev[1] else "") + detail + extra)
    return failed


@pytest.mark.parametrize("which", [1, 2])
def test_c07_truncated_interpolation_equivalence(which, corpus1, corpus2, fine):
    fs = corpus1 if which == 1 else corpus2
    params = [ScreenedParams(s, 2.0, q, 1.0) for s in S_GRID for q in Q_GRID]
    reports = _suite(fs, fine, params, "b", refine=False)
    n = fs[0].spec.n
    assert all(r.bracket == (0.5, 1 + n ** 1.5) and r.slack == 0.02 for r in reports)
    failed = _record_reports(7, f"n={n} kUpper form vs modulus form", reports)
    assert not failed, [r.name for r in failed]


def test_c08_strichartz(corpus1, corpus2, fine):
    fs = corpus1 + corpus2
    assert len(fs) == 20
    reports = []
    for group in (corpus1, corpus2):
        reports += _suite(group, fine, [ScreenedParams(s, 2.0, 2.0, 1.0) for s in S_GRID], "e",
                          refine=True)
    assert all(r.bracket is None and r.bound == 10 and r.drift == 0.2 for r in reports)
    failed = _record_reports(8, "screened vs Fourier weight, C = 10", reports)
    assert not failed, [r.name for r in failed]


D2_SUBSET = ("mode-1-2", "random-a", "logbump")


@pytest.mark.parametrize("which", [1, 2])
def test_c09_fundamental_decomposition(which, corpus1, grid2, fine):
    fs = corpus1 if which == 1 else corpus(grid2, D2_SUBSET)
    params = [ScreenedParams(s, p, q, 1.0) for p in (1.5, 2.0, 3.0) for s in S_GRID
              for q in Q_GRID]
    reports = _suite(fs, fine, params, "d", refine=True)
    defect = 0.0
    for f in fs:
        high, low = hl_decompose(f)
        defect = max(defect, float(np.abs((high + low).values - f.values).max()))
    n = fs[0].spec.n
    failed = _record_reports(9, f"n={n} unit-cube split vs screened", reports,
                             f", reconstruction {defect:.2g}")
    assert defect <= 1e-12
    assert not failed, [r.name for r in failed]


@pytest.mark.parametrize("which", [1, 2])
def test_c10_littlewood_paley(which, corpus1, corpus2, part1, part2):
    fs, part = (corpus1, part1) if which == 1 else (corpus2, part2)
    residual = part.residual()
    ortho = max(almost_orthogonality(f.centered(), part) for f in fs)
    ratios = []
    for f in fs:
        g = f.centered()
        l2 = math.sqrt(float(np.sum(g.values ** 2)) * g.spec.cell)
        ratios.append(lp_square_seminorm(g, 2.0, part).value / l2)
    lo, hi = min(ratios), max(ratios)
    ok = residual < 1e-12 and ortho < 1e-12 and 1 / math.sqrt(3) <= lo and hi <= math.sqrt(3)
    prev = ACCEPTANCE.get(10, (True, ""))
    detail = (f"n={fs[0].spec.n}: residual {residual:.2g}, orthogonality {ortho:.2g}, "
              f"square ratio [{lo:.4g}, {hi:.4g}]")
    record(10, prev[0] and ok, (prev[1] + "; " if prev[1] else "") + detail)
    assert ok


def test_c11_hardy():
    rows = hardy_checks(np.random.default_rng(SEED), cases=100, rtol=1e-12)
    failed = summarize(11, "Hardy inequalities on step functions", rows)
    assert not failed, failed[:5]


def test_c12_determinism(tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert cli.main(["verify", "--seed", str(SEED), "--out", str(out)]) == 0
        outs.append((out / "verify.csv").read_bytes())
    same = outs[0] == outs[1]
    rows = outs[0].count(b"\n") - 1
    record(12, same, f"two verify runs, seed {SEED}: {rows} rows, "
                     f"{'byte-identical' if same else 'different'}")
    assert same
