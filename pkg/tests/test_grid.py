import math
import subprocess
import sys
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from seminorm_lab.grid import (
    FormatError,
    GridFunction,
    GridSpec,
    ResolutionWarning,
    apply_multiplier,
    check_resolution,
    difference,
    inverse_transform,
    load,
    lp_norm,
    modulus_of_continuity,
    read_csv,
    read_raw,
    sample,
    shift_seminorm,
    spectral_gradient,
    top_octave_fraction,
    transform,
    translate,
    w1p_seminorm,
    write_csv,
    write_raw,
)
from seminorm_lab.grid.io import to_bytes
from seminorm_lab.grid.ops import angular_rule, shift_multiplier

from conftest import GRID_1D, GRID_2D

SMALL = GridSpec(1, 64, 16.0)


def sine(spec, k=1):
    return sample(spec, lambda x: np.sin(2 * np.pi * k * x / spec.L), "sine")


class TestSpec:
    def test_parse_roundtrip(self):
        spec = GridSpec.parse("n=2,N=64x32,L=8")
        assert spec.sizes == (64, 32) and spec.L == 8.0
        assert GridSpec.parse(str(spec)) == spec
        assert GridSpec.parse("n=2,N=16") == GridSpec(2, 16, 16.0)

    @pytest.mark.parametrize("args", [(4, 16, 1.0), (1, 12, 1.0), (1, 4, 1.0), (2, (16,) * 3, 1.0),
                                      (1, 16, 0.0), (1, 16, math.inf)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            GridSpec(*args)

    def test_geometry(self):
        assert GRID_2D.cell == pytest.approx((8 / 64) ** 2)
        assert GRID_2D.refined().sizes == (128, 128)
        assert GRID_1D.nyquist_mask().sum() == 1
        assert GRID_2D.nyquist_mask().sum() == 2 * 64 - 1


class TestFunction:
    def test_immutable_and_finite(self):
        f = sine(SMALL)
        with pytest.raises(ValueError):
            f.values[0] = 1.0
        with pytest.raises(ValueError):
            GridFunction(SMALL, np.full(64, np.nan))
        with pytest.raises(ValueError):
            GridFunction(SMALL, np.full(64, 1j), real=True)

    def test_arithmetic(self):
        f = sine(SMALL)
        g = 2 * f - f + 1.0
        assert np.allclose(g.values, f.values + 1)
        assert g.centered().mean() == pytest.approx(0.0, abs=1e-15)
        assert f.centered() is f.centered()
        with pytest.raises(ValueError):
            f + sine(GridSpec(1, 32, 16.0))

    def test_plancherel(self, rng):
        f = GridFunction(GRID_2D, rng.normal(size=GRID_2D.shape))
        F = transform(f)
        assert np.sum(np.abs(F.coeffs) ** 2) == pytest.approx(lp_norm(f, 2) ** 2, rel=1e-12)
        assert F.conjugate_symmetry_defect() < 1e-12
        assert np.allclose(inverse_transform(F).values, f.values)

    def test_multiplier_identity(self, rng):
        f = GridFunction(SMALL, rng.normal(size=64))
        assert np.allclose(apply_multiplier(f, np.ones(64)).values, f.values)


class TestOps:
    def test_lattice_translation_is_roll(self):
        f = sine(SMALL, 3)
        g = translate(f, [2 * SMALL.spacing[0]])
        assert np.array_equal(g.values, np.roll(f.values, 2))

    def test_off_lattice_translation_exact_for_modes(self):
        f = sine(SMALL, 3)
        h = 0.37
        g = translate(f, [h])
        x, = SMALL.coordinates()
        assert np.allclose(g.values, np.sin(2 * np.pi * 3 * (x - h) / SMALL.L), atol=1e-13)

    def test_shift_multiplier_hermitian(self):
        m = shift_multiplier(GRID_2D, [0.3, -0.11])
        flipped = np.roll(np.flip(m), 1, axis=(0, 1))
        assert np.allclose(flipped, np.conj(m))

    def test_difference_sign(self):
        f = sine(SMALL)
        d = difference(f, [SMALL.spacing[0]])
        assert np.allclose(d.values, np.roll(f.values, -1) - f.values)

    @pytest.mark.parametrize("p,expected", [(1.0, 2 * 16 / np.pi), (2.0, math.sqrt(8.0)),
                                            (math.inf, 1.0), (3.0, None)])
    def test_lp_norms_of_sine(self, p, expected):
        f = sine(GRID_1D)
        if expected is None:
            # int |sin|^3 over a period is 4/3 of L/pi
            expected = (16 / np.pi * 4 / 3) ** (1 / 3)
        # Riemann sums of |sin|^p are exact for p = 2 only; the sampled max misses the peak
        tol = 1e-12 if p == 2.0 else 1e-4
        assert lp_norm(f, p) == pytest.approx(expected, rel=tol)
        with pytest.raises(ValueError):
            lp_norm(f, 0.5)

    @pytest.mark.parametrize("p", [2.0, math.inf])
    def test_modulus_of_sine(self, p):
        f = sine(GRID_1D)
        ts = np.array([0.01, 0.3, 1.7, 4.0])
        w = modulus_of_continuity(f, ts, p)
        scale = math.sqrt(GRID_1D.L / 2) if p == 2 else 1.0
        exact = 2 * np.sin(np.pi * ts / GRID_1D.L) * scale
        assert np.allclose(w, exact, rtol=1e-12 if p == 2 else 1e-4)
        assert modulus_of_continuity(f, 0.3, p, strategy="lattice") <= w[1] * (1 + 1e-12)

    def test_modulus_limits(self):
        f = sine(GRID_1D)
        with pytest.raises(ValueError):
            modulus_of_continuity(f, 4.5, 2.0)
        with pytest.raises(ValueError):
            modulus_of_continuity(f, [0.0], 2.0)
        with pytest.raises(ValueError):
            modulus_of_continuity(f, 0.001, 2.0, strategy="lattice")

    def test_modulus_monotone_2d(self, corpus2):
        f = corpus2[2]
        ts = np.geomspace(0.01, 2.0, 12)
        w = modulus_of_continuity(f, ts, 1.5)
        assert np.all(np.diff(w) >= 0)

    def test_gradient_of_sine(self):
        f = sine(GRID_1D)
        (g,) = spectral_gradient(f)
        x, = GRID_1D.coordinates()
        w = 2 * np.pi / GRID_1D.L
        assert np.allclose(g.values, w * np.cos(w * x), atol=1e-12)
        assert w1p_seminorm(f, 2.0) == pytest.approx(w * math.sqrt(8.0), rel=1e-12)

    def test_resolution_warning(self, rng):
        noise = GridFunction(SMALL, rng.normal(size=64), name="noise")
        assert top_octave_fraction(noise) > 0.3
        with pytest.warns(ResolutionWarning):
            check_resolution(noise)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert check_resolution(sine(SMALL)) < 1e-20

    def test_angular_weights(self):
        for n, area in ((1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)):
            dirs, w = angular_rule(n)
            assert w.sum() == pytest.approx(area)
            assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)


class TestPolar:
    @pytest.mark.parametrize("s,q", [(0.25, 2.0), (0.5, 1.0), (0.75, 3.0)])
    def test_difference_seminorm_of_sine(self, s, q):
        f, L, sigma = sine(GRID_1D), GRID_1D.L, 2.0
        c = math.sqrt(L / 2)

        # both signs of h contribute, each with norm 2 sin(pi t / L) sqrt(L/2)
        def integrand(t):
            return 2 * (t ** -s * 2 * mpmath.sin(mpmath.pi * t / L) * c) ** q / t

        exact = float(mpmath.quad(integrand, [0, sigma])) ** (1 / q)
        est = shift_seminorm(f, s, 2.0, q, sigma)
        assert abs(est.value - exact) <= max(est.error, 1e-9 * exact)
        assert est.error < 1e-3 * exact

    def test_modulus_sup_of_sine(self):
        f, L = sine(GRID_1D), GRID_1D.L
        est = shift_seminorm(f, 0.5, math.inf, math.inf, 4.0, mode="modulus")
        # t^-1/2 2 sin(pi t / L) increases on (0, 4]
        exact = 4.0 ** -0.5 * 2 * math.sin(math.pi * 4 / L)
        assert abs(est.value - exact) <= est.error + 1e-12

    def test_truncation_bound(self):
        f = sine(GRID_1D)
        a = shift_seminorm(f, 0.5, 2.0, 2.0, 4.0)
        b = shift_seminorm(f, 0.5, 2.0, 2.0, 4.0, truncated=False)
        assert b.value == a.value and b.truncation > 0
        with pytest.raises(ValueError):
            shift_seminorm(f, 0.5, 2.0, 2.0, 5.0)
        with pytest.raises(ValueError):
            shift_seminorm(f, 0.5, 2.0, 2.0, 1.0, mode="both")

    @given(st.floats(0.1, 0.9), st.sampled_from([1.0, 2.0, math.inf]))
    def test_modulus_below_difference_sup(self, s, q):
        # in 1D the modulus is the running max of the two-sided shift norms
        f = sine(GRID_1D, 3)
        m = shift_seminorm(f, s, 2.0, q, 2.0, mode="modulus")
        d = shift_seminorm(f, s, 2.0, q, 2.0, mode="difference")
        scale = 1.0 if math.isinf(q) else 2 ** (1 / q)
        assert d.value <= scale * m.value * (1 + 1e-9) + d.error


class TestIO:
    def test_raw_roundtrip(self, tmp_path, rng):
        f = GridFunction(GRID_2D, rng.normal(size=GRID_2D.shape))
        path = write_raw(f, tmp_path / "f.snlb")
        g = read_raw(path)
        assert g.spec == f.spec and np.array_equal(g.values, f.values)
        assert path.stat().st_size == 32 + 8 * 64 * 64
        assert load(path).name == "f"

    def test_csv_roundtrip(self, tmp_path, rng):
        f = GridFunction(GridSpec(2, (8, 16), 3.0), rng.normal(size=(8, 16)))
        g = load(write_csv(f, tmp_path / "f.csv"))
        assert g.spec == f.spec and np.array_equal(g.values, f.values)

    def test_csv_without_header(self, tmp_path):
        p = tmp_path / "bare.csv"
        p.write_text("i0,value\n" + "".join(f"{i},{i}\n" for i in range(8)))
        f = read_csv(p, GridSpec(1, 8, 1.0))
        assert list(f.values) == list(range(8))
        with pytest.raises(FormatError):
            read_csv(p)
        p.write_text("i0,value\n0,1\n")
        with pytest.raises(FormatError, match="missing"):
            read_csv(p, GridSpec(1, 8, 1.0))

    @pytest.mark.parametrize("mutate,match", [
        (lambda b: b[:10], "truncated"),
        (lambda b: b"XXXX" + b[4:], "magic"),
        (lambda b: b[:4] + (2).to_bytes(4, "little") + b[8:], "version"),
        (lambda b: b[:-8], "bytes of samples"),
        (lambda b: b[:12] + (12).to_bytes(4, "little") + b[16:], "power of two"),
    ])
    def test_raw_rejects(self, tmp_path, mutate, match):
        p = tmp_path / "bad.snlb"
        p.write_bytes(mutate(to_bytes(sine(SMALL))))
        with pytest.raises(FormatError, match=match):
            read_raw(p)

    def test_complex_not_stored(self, tmp_path):
        f = GridFunction(SMALL, np.ones(64) * 1j, real=False)
        with pytest.raises(FormatError):
            write_raw(f, tmp_path / "c.snlb")


def test_pure_backend_agrees():
    """A fresh interpreter with the fallback forced gives the same seminorms."""
    code = (
        "import math, numpy as np\n"
        "from seminorm_lab import BACKEND\n"
        "from seminorm_lab.corpus import builtin\n"
        "from seminorm_lab.grid import GridSpec, shift_seminorm, modulus_of_continuity\n"
        "from seminorm_lab.core import WeightedNorm, WeightedSpacePair, k_functional\n"
        "f = builtin('random-a', GridSpec(2, 32, 8.0))\n"
        "vals = [shift_seminorm(f, 0.5, p, 2.0, 2.0).value for p in (1.0, 1.5, 3.0)]\n"
        "vals.append(float(modulus_of_continuity(f, 1.3, 3.0, strategy='lattice')))\n"
        "pair = WeightedSpacePair(WeightedNorm([1.0, 2.0, 0.5], 2.0), WeightedNorm([3.0, 1.0, 1.0], 3.0))\n"
        "vals.append(k_functional(pair, 0.7, [1.0, -2.0, 0.5]).value)\n"
        "print(BACKEND, *(repr(float(v)) for v in vals))\n"
    )
    outs = {}
    for pure in ("0", "1"):
        env = {"SEMINORM_LAB_PURE": pure, "PATH": "", "PYTHONHASHSEED": "0"}
        res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                             env=env, check=True)
        backend, *vals = res.stdout.split()
        outs[backend] = np.array([float(v) for v in vals])
    assert set(outs) == {"compiled", "numpy"}
    assert np.allclose(outs["compiled"], outs["numpy"], rtol=1e-9, atol=0)
