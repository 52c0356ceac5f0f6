import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from seminorm_lab.core import (
    InterpolationParams,
    InterpolationSeminorm,
    KSeminorm,
    MaxSeminorm,
    QuadratureGrid,
    QuadratureToleranceError,
    UnboundedOperatorError,
    WeightedNorm,
    WeightedSpacePair,
    fundamental_decomposition,
    gauss_legendre_log,
    hardy_verify,
    integrated_rearrangement,
    interpolated_l1_weights,
    interpolation_seminorm,
    j_functional,
    j_method_upper_bound,
    k_envelope,
    k_functional,
    k_functional_bruteforce,
    k_method_exact,
    k_profile,
    l1,
    linf,
    operator_interpolation_check,
    operator_seminorm_bound,
    pair_from_table,
    random_step_function,
    rearrangement_and_lorentz,
    reiteration_spot_check,
    sum_and_intersection_seminorms,
    sum_characterization_witness,
    write_table,
)
from seminorm_lab.core.seminorms import GridSeminorm
from seminorm_lab.engine_checks import random_diag_pair, random_element

INF = math.inf
UNIT = WeightedSpacePair(l1(1), l1(1))  # K(t, 1) = min(1, t)

finite = st.floats(-1e3, 1e3, allow_nan=False)
vectors = st.lists(finite, min_size=1, max_size=6)
weights = st.lists(st.floats(0.01, 100.0), min_size=6, max_size=6)
scales = st.floats(1e-3, 1e3)


def diag(w0, w1):
    return WeightedSpacePair(WeightedNorm(w0, 1.0), WeightedNorm(w1, 1.0))


class TestSeminorms:
    def test_weighted_values(self):
        x = [3.0, -4.0]
        assert WeightedNorm([1, 1], 2)(x) == pytest.approx(5.0)
        assert WeightedNorm([2, 1], INF)(x) == 6.0
        assert WeightedNorm([0, 1], 1)(x) == 4.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            WeightedNorm([1, -1])
        with pytest.raises(ValueError):
            WeightedNorm([1, 1], 0.5)
        with pytest.raises(ValueError):
            WeightedSpacePair(l1(2), l1(3))
        with pytest.raises(ValueError):
            l1(2)([1, 2, 3])

    def test_pair_kinds(self):
        assert diag([1], [1]).kind == "diag-l1"
        assert WeightedSpacePair(l1(2), linf(2)).kind == "l1-linf"
        assert WeightedSpacePair(linf(2), l1(2).scaled(3)).kind == "linf-l1"
        assert WeightedSpacePair(WeightedNorm([1], 2), l1(1)).kind == "weighted"
        assert WeightedSpacePair(MaxSeminorm((l1(1),)), l1(1)).kind == "general"

    def test_batch_matches_call(self, rng):
        rows = rng.normal(size=(5, 4))
        for s in (WeightedNorm(rng.random(4), 3.0), linf(4), MaxSeminorm((l1(4), linf(4).scaled(2)))):
            assert np.allclose(s.batch(rows), [s(r) for r in rows])

    def test_annihilator(self):
        assert list(WeightedNorm([0, 1]).annihilator_mask()) == [True, False]
        assert GridSeminorm(2, lambda v: abs(v[0])).annihilator_mask() is None

    @given(vectors, vectors)
    def test_triangle_and_homogeneity(self, a, b):
        n = min(len(a), len(b))
        a, b = np.array(a[:n]), np.array(b[:n])
        for s in (l1(n), linf(n), WeightedNorm(np.arange(1, n + 1), 1.5)):
            assert s(a + b) <= (s(a) + s(b)) * (1 + 1e-12) + 1e-12
            assert s(-2.5 * a) == pytest.approx(2.5 * s(a), rel=1e-12, abs=1e-300)

    def test_sum_and_intersection(self):
        total, inter = sum_and_intersection_seminorms(diag([1, 4], [2, 1]), [1.0, 1.0])
        assert total == pytest.approx(2.0)
        assert inter == 5.0


class TestK:
    def test_diag_closed_form_frozen(self):
        pair = diag([1, 2, 0], [3, 1, 1])
        res = k_functional(pair, 0.5, [1, -2, 4])
        assert res.value == 2.0
        assert list(res.witness.x0) == [1.0, 0.0, 4.0]
        assert np.allclose(k_profile(pair, [1, -2, 4], [0.1, 1, 10]), [0.5, 3.0, 5.0])

    def test_l1_linf_is_integrated_rearrangement(self):
        x = [3.0, -1.0, 2.0, 0.5]
        pair = WeightedSpacePair(l1(4), linf(4))
        assert k_functional(pair, 2.5, x).value == pytest.approx(5.5)
        assert integrated_rearrangement(x, 2.5) == pytest.approx(5.5)

    def test_swapped_pair_scales(self, rng):
        pair = WeightedSpacePair(l1(5, rng.random(5) + 0.1), linf(5, rng.random(5) + 0.1))
        x = rng.normal(size=5)
        for t in (0.01, 0.7, 30.0):
            a = k_functional(pair, t, x).value
            b = k_functional(pair.swapped(), 1 / t, x).value
            assert a == pytest.approx(t * b, rel=1e-12)

    def test_zero_vector_and_bad_scale(self):
        assert k_functional(UNIT, 1.0, [0.0]).value == 0.0
        with pytest.raises(ValueError):
            k_functional(UNIT, 0.0, [1.0])
        with pytest.raises(ValueError):
            k_functional(WeightedSpacePair(WeightedNorm([1], 2), l1(1)), 1.0, [1.0],
                         method="closed-form")

    @given(weights, weights, vectors, scales)
    def test_search_matches_closed_form(self, w0, w1, x, t):
        n = len(x)
        pair = diag(w0[:n], w1[:n])
        exact = k_functional(pair, t, x, method="closed-form")
        search = k_functional(pair, t, x, method="convex-search")
        assert search.value == pytest.approx(exact.value, rel=1e-7, abs=1e-9)
        w = exact.witness
        assert np.allclose(w.x0 + w.x1, x)

    @given(weights, vectors, scales, scales)
    def test_k_concave_nondecreasing(self, w, x, s, t):
        n = len(x)
        pair = WeightedSpacePair(l1(n, w[:n]), linf(n))
        lo, hi = sorted((s, t))
        k = k_profile(pair, x, [lo, 0.5 * (lo + hi), hi])
        assert k[0] <= k[2] * (1 + 1e-12) + 1e-12
        assert k[1] >= 0.5 * (k[0] + k[2]) * (1 - 1e-12) - 1e-12
        assert k[2] <= (hi / lo) * k[0] * (1 + 1e-12) + 1e-12

    def test_general_pair_search(self, rng):
        a = MaxSeminorm((l1(2), linf(2).scaled(2.0)))
        pair = WeightedSpacePair(a, WeightedNorm([1.0, 3.0], 2.0))
        x = np.array([1.0, -0.5])
        got = k_functional(pair, 0.8, x).value
        brute = k_functional_bruteforce(pair, 0.8, x, points=41)
        assert got == pytest.approx(brute, rel=1e-5)

    def test_complex_vectors_use_magnitudes(self):
        pair = WeightedSpacePair(WeightedNorm([1, 2], 2.0), WeightedNorm([1, 1], 3.0))
        x = np.array([3 + 4j, -1j])
        a = k_functional(pair, 0.9, x).value
        b = k_functional(pair, 0.9, np.abs(x)).value
        assert a == pytest.approx(b, rel=1e-9)

    def test_bruteforce_limits(self):
        with pytest.raises(ValueError):
            k_functional_bruteforce(diag([1] * 4, [1] * 4), 1.0, np.ones(4))

    def test_j_functional_and_seminorm_wrappers(self):
        pair = diag([1, 2], [3, 1])
        assert j_functional(pair, 2.0, [1, 1]) == 8.0
        ks = KSeminorm(pair, 0.5)
        assert ks([1, 1]) == k_functional(pair, 0.5, [1, 1]).value

    def test_envelope_pieces(self):
        env = k_envelope(UNIT, [1.0])
        knots, ints, slopes = env.pieces()
        assert list(knots) == [0.0, 1.0, INF]
        assert list(ints) == [0.0, 1.0] and list(slopes) == [1.0, 0.0]


class TestInterpolation:
    @pytest.mark.parametrize("s,q,sigma,expected", [
        (0.5, 2.0, INF, math.sqrt(2.0)),
        (0.5, 2.0, 1.0, 1.0),
        (0.25, 3.0, INF, (1 / 2.25 + 1 / 0.75) ** (1 / 3)),
        (0.5, INF, INF, 1.0),
        (0.75, 1.0, 4.0, 1 / 0.25 + (1 - 4 ** -0.75) / 0.75),
    ])
    def test_unit_profile_frozen(self, s, q, sigma, expected):
        prm = InterpolationParams(s, q, sigma)
        assert k_method_exact(UNIT, prm, [1.0]).value == pytest.approx(expected, rel=1e-13)
        est = interpolation_seminorm(UNIT, prm, [1.0])
        assert abs(est.value - expected) <= est.error + 1e-12

    def test_discrete_frozen(self):
        # sum over k >= 0 of (2^(k/2) 2^-k)^2 = 2
        est = interpolation_seminorm(UNIT, InterpolationParams(0.5, 2.0, 1.0), [1.0],
                                     mode="discrete")
        assert est.value == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_params_validation(self):
        for bad in ((0.0, 2, 1), (1.0, 2, 1), (0.5, 0.5, 1), (0.5, 2, 0)):
            with pytest.raises(ValueError):
                InterpolationParams(*bad)

    def test_tolerance_error(self):
        with pytest.raises(QuadratureToleranceError):
            interpolation_seminorm(UNIT, InterpolationParams(0.5), [1.0], depth=2, intervals=4,
                                   rtol=1e-12)

    def test_nodes_bracket_exact(self, rng):
        for _ in range(20):
            dim = int(rng.integers(1, 6))
            pair, x = random_diag_pair(rng, dim), random_element(rng, dim)
            for q in (1.0, 2.0, 3.0, INF):
                prm = InterpolationParams(float(rng.choice([0.25, 0.5, 0.75])), q, 2.0)
                exact = k_method_exact(pair, prm, x).value
                est = interpolation_seminorm(pair, prm, x)
                assert abs(est.value - exact) <= est.error + 1e-12 * exact

    def test_seminorm_as_factor(self):
        sem = InterpolationSeminorm(UNIT, InterpolationParams(0.5, 2.0, INF), backend="exact")
        assert sem([-3.0]) == pytest.approx(3 * math.sqrt(2.0))

    def test_null_direction_has_zero_seminorm(self):
        pair = diag([1.0, 0.0], [1.0, 1.0])
        for q in (1.0, INF):
            assert k_method_exact(pair, InterpolationParams(0.5, q, INF), [0.0, 1.0]).value == 0.0


class TestDecompositions:
    def test_fundamental_reconstructs(self, rng):
        pair, x = random_diag_pair(rng, 4, null=0.0), random_element(rng, 4, zeros=0.0)
        dec = fundamental_decomposition(pair, x, depth=30)
        assert dec.residual <= 1e-6 * k_functional(pair, 1.0, x).value
        assert np.allclose(dec.partial_sum(30), x, rtol=1e-6, atol=1e-9)

    def test_j_bound_dominates_k_method(self, rng):
        pair, x = random_diag_pair(rng, 3, null=0.0), random_element(rng, 3, zeros=0.0)
        dec = fundamental_decomposition(pair, x, depth=30)
        r, s = dec.r, 0.5
        # K(t) <= sum_j min(1, t/t_j) J(t_j, xi_j), then Young on each log cell
        young = 1 / (1 - r ** -s) + 1 / (1 - r ** (s - 1))
        for q in (1.0, 2.0, INF):
            j = j_method_upper_bound(pair, s, q, x, dec.as_j_sequence())
            k = k_method_exact(pair, InterpolationParams(s, q, INF), x).value
            c = young * (1.0 if math.isinf(q) else math.log(r) ** (1 / q))
            assert j <= k * 100 and k <= c * j * (1 + 1e-9)

    def test_j_bound_rejects_bad_pieces(self):
        with pytest.raises(ValueError):
            j_method_upper_bound(UNIT, 0.5, 2.0, [1.0], {0: np.array([0.5])})

    def test_sum_witness(self, rng):
        pair, x = random_diag_pair(rng, 3, null=0.0), random_element(rng, 3, zeros=0.0)
        prm = InterpolationParams(0.5, 2.0, 1.0)
        w = sum_characterization_witness(pair, prm, x, depth=40)
        assert np.allclose(w.eta + w.rest, x)
        assert w.bound1 <= k_functional(pair, 1.0, x).value * (1 + 1e-9)
        with pytest.raises(ValueError):
            sum_characterization_witness(pair, InterpolationParams(0.5, 2.0, INF), x)

    def test_reiteration_q1_is_exact(self, rng):
        pair = random_diag_pair(rng, 4, null=0.0)
        xs = [random_element(rng, 4) for _ in range(3)]
        for smp in reiteration_spot_check(pair, 0.25, 0.75, 0.5, 1.0, xs):
            if smp.direct > 0:
                # equivalence, with a constant that only depends on the exponents
                assert 0.1 < smp.ratio < 10

    def test_interpolated_weights(self):
        w = interpolated_l1_weights(diag([4.0], [1.0]), 0.5)
        assert w[0] == pytest.approx(2.0 / 0.25)


class TestLorentzHardyOperators:
    def test_lorentz_frozen(self):
        xs, v = rearrangement_and_lorentz([3, -1, 2, 0.5], 2, 2)
        assert list(xs) == [3, 2, 1, 0.5]
        assert v == pytest.approx(math.sqrt(14.25))
        _, vinf = rearrangement_and_lorentz([3, -1, 2, 0.5], 1, INF)
        assert vinf == 4.0

    def test_integrated_rearrangement_edges(self):
        assert integrated_rearrangement([1, 2], 0) == 0.0
        assert integrated_rearrangement([1, 2], 10) == 3.0
        with pytest.raises(ValueError):
            integrated_rearrangement([1], -1)

    def test_hardy_frozen(self):
        res = hardy_verify([1, 2, 4], [1, 1], 0.5, 2)
        L = math.log(4)
        assert res.lhs == pytest.approx(math.sqrt(2 - (L * L + 2 * L + 2) / 4), rel=1e-14)
        assert res.rhs == pytest.approx(math.sqrt(0.75), rel=1e-14)
        assert res.constant == 2.0 and res.passed

    def test_hardy_random(self, rng):
        for _ in range(10):
            edges, omega = random_step_function(rng, 8, 3.0)
            for form, sigma in ((0, None), (0, INF), (1, None)):
                assert hardy_verify(edges, omega, 0.4, 1.5, sigma, form).passed

    def test_hardy_validation(self):
        with pytest.raises(ValueError):
            hardy_verify([1, 0.5], [1], 0.5, 2)
        with pytest.raises(ValueError):
            hardy_verify([1, 2], [1], 0.5, INF)

    def test_operator_bound_exact_for_l1(self):
        T = np.array([[1.0, 2.0], [0.0, -3.0]])
        assert operator_seminorm_bound(T, l1(2), l1(2)) == 5.0
        with pytest.raises(UnboundedOperatorError):
            operator_seminorm_bound(T, WeightedNorm([1.0, 0.0]), l1(2))

    def test_operator_interpolation(self, rng):
        px = random_diag_pair(rng, 3, null=0.0)
        py = random_diag_pair(rng, 2, null=0.0)
        T = rng.normal(size=(2, 3))
        rep = operator_interpolation_check(px, py, T, InterpolationParams(0.5, 2.0, 1.0),
                                           [rng.normal(size=3) for _ in range(5)])
        assert rep.passed and rep.worst_ratio <= 1 + 1e-9
        with pytest.raises(ValueError):
            operator_interpolation_check(px, py, T.T, InterpolationParams(0.5), [])


class TestQuadratureTables:
    def test_grid_bounds(self):
        g = QuadratureGrid(2.0, 3, 6)
        assert g.bounds == (0.25, 2.0)
        assert g.nodes[0] == pytest.approx(0.25) and g.nodes[-1] == pytest.approx(2.0)
        assert QuadratureGrid(INF, 2, 4).bounds == (0.25, 4.0)
        with pytest.raises(ValueError):
            QuadratureGrid(1.0, 0, 4)

    def test_trapezoid_exact_on_linear_log(self):
        g = QuadratureGrid(1.0, 4, 16)
        val, err = g.integrate(np.log(g.nodes))
        assert val == pytest.approx(-0.5 * (4 * math.log(2)) ** 2, rel=1e-12)
        assert err == pytest.approx(0.0, abs=1e-12)

    def test_gauss_legendre(self):
        assert gauss_legendre_log(1, math.e, np.ones_like) == pytest.approx(1.0, rel=1e-14)
        assert gauss_legendre_log(1, 8, lambda t: t) == pytest.approx(7.0, rel=1e-13)
        with pytest.raises(ValueError):
            gauss_legendre_log(0, 1, np.ones_like)

    def test_table_roundtrip(self, tmp_path):
        cols = {"w0": [1.0, 0.1], "w1": [2.0, 1 / 3], "x": [-1.5, 2e-17]}
        path = write_table(cols, tmp_path / "t.csv")
        pair, x = pair_from_table(path)
        assert list(x) == cols["x"]
        assert list(pair.X1.weights) == cols["w1"]

    def test_table_errors(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("w0,x\n1,2\n")
        with pytest.raises(ValueError, match="missing"):
            pair_from_table(p)
        p.write_text("a,b\n1\n")
        with pytest.raises(ValueError, match="ragged"):
            pair_from_table(p)
