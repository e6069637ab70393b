"""Sketch observations, operator reliability state, and the marginalized
sketch likelihood with its fixed-reliability special cases."""

import numpy as np
import pytest
from scipy import integrate, special

from sketchtrack import (
    Bounds,
    Polygon,
    ReliabilityState,
    SketchObservation,
    build_grid,
    marginal_log_values,
    marginal_sketch_likelihood,
    multi_draw_likelihood,
    single_draw_likelihood,
)


class TestReliabilityState:
    def test_mean_and_variance(self):
        rel = ReliabilityState(2.0, 2.0)
        assert rel.mean == pytest.approx(0.5)
        assert rel.variance == pytest.approx(0.05)  # ab / ((a+b)^2 (a+b+1))

    def test_asymmetric(self):
        rel = ReliabilityState(8.0, 2.0)
        assert rel.mean == pytest.approx(0.8)

    def test_parameters_must_be_positive(self):
        with pytest.raises(ValueError):
            ReliabilityState(0.0, 2.0)
        with pytest.raises(ValueError):
            ReliabilityState(2.0, -1.0)


class TestSketchObservation:
    def test_mask_coerced_and_frozen(self):
        sk = SketchObservation(operator_id="h1", mask=[1, 0, 1, 1], t=0)
        assert sk.mask.dtype == bool
        assert sk.n_enclosed == 3
        with pytest.raises(ValueError):
            sk.mask[0] = False

    def test_from_polygon(self):
        g = build_grid(Bounds(0.0, 0.0, 4.0, 4.0), rows=4, cols=4)
        square = Polygon(np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]))
        sk = SketchObservation.from_polygon(g, square, "h1", t=5)
        assert sk.n_enclosed == 4
        assert sk.t == 5
        assert sk.polygon is square

    def test_operator_id_required(self):
        with pytest.raises(ValueError):
            SketchObservation(operator_id="", mask=[True], t=0)


class TestFixedReliabilityDraws:
    def test_single_draw(self):
        assert single_draw_likelihood(0.7, True) == pytest.approx(0.7)
        assert single_draw_likelihood(0.7, False) == pytest.approx(0.3)

    def test_multi_draw_uniform_reliability(self):
        # a = 0.5, M = 4: enclosed and excluded particles score the same
        assert multi_draw_likelihood(0.5, 4, True) == pytest.approx(0.0625)
        assert multi_draw_likelihood(0.5, 4, False) == pytest.approx(0.0625)

    def test_multi_draw_reduces_to_single(self):
        for a in (0.2, 0.5, 0.9):
            assert multi_draw_likelihood(a, 1, True) == pytest.approx(
                single_draw_likelihood(a, True))
            assert multi_draw_likelihood(a, 1, False) == pytest.approx(
                single_draw_likelihood(a, False))

    def test_reliability_out_of_range(self):
        with pytest.raises(ValueError):
            single_draw_likelihood(1.2, True)


class TestMarginalValues:
    def test_flat_prior_single_particle(self):
        # Beta(1,1), w = 1, M = 1: both branches integrate to 1/2
        log_in, log_out = marginal_log_values(ReliabilityState(1.0, 1.0), 1.0, 1)
        assert np.exp(log_in) == pytest.approx(0.5, rel=1e-12)
        assert np.exp(log_out) == pytest.approx(0.5, rel=1e-12)

    def test_symmetric_prior_four_particles(self):
        # Beta(2,2), w = 1, M = 4: inside 2/35, outside 1/7
        log_in, log_out = marginal_log_values(ReliabilityState(2.0, 2.0), 1.0, 4)
        assert np.exp(log_in) == pytest.approx(2.0 / 35.0, rel=1e-12)
        assert np.exp(log_out) == pytest.approx(1.0 / 7.0, rel=1e-12)

    def test_zero_weight_is_exact_no_op(self):
        log_in, log_out = marginal_log_values(ReliabilityState(3.0, 5.0), 0.0, 7)
        assert log_in == 0.0
        assert log_out == 0.0

    def test_beta_function_identity(self):
        # B(wd + a, w(M - d) + b) / B(a, b) for several corners
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = rng.uniform(0.5, 8.0, size=2)
            w = rng.uniform(0.1, 1.0)
            m = int(rng.integers(1, 30))
            log_in, log_out = marginal_log_values(ReliabilityState(a, b), w, m)
            want_in = special.betaln(w + a, w * (m - 1) + b) - special.betaln(a, b)
            want_out = special.betaln(a, w * m + b) - special.betaln(a, b)
            assert log_in == pytest.approx(want_in, abs=1e-12)
            assert log_out == pytest.approx(want_out, abs=1e-12)

    def test_against_numerical_quadrature(self):
        def integrand(x, a, b, w, m, inside):
            prior = x ** (a - 1) * (1 - x) ** (b - 1) / special.beta(a, b)
            d = 1 if inside else 0
            return prior * x ** (w * d) * (1 - x) ** (w * (m - d))

        for a, b, w, m in [(2.0, 2.0, 1.0, 4), (0.5, 8.0, 0.3, 10), (5.0, 1.0, 0.7, 2)]:
            for inside in (True, False):
                want, _ = integrate.quad(integrand, 0.0, 1.0, args=(a, b, w, m, inside))
                log_in, log_out = marginal_log_values(ReliabilityState(a, b), w, m)
                got = np.exp(log_in if inside else log_out)
                assert got == pytest.approx(want, rel=1e-9)


class TestMarginalVector:
    def test_mask_structure(self):
        mask = np.array([False, True, True, False, False])
        sk = SketchObservation(operator_id="h1", mask=mask, t=1)
        vec = marginal_sketch_likelihood(sk, ReliabilityState(2.0, 2.0), 1.0)
        log_in, log_out = marginal_log_values(ReliabilityState(2.0, 2.0), 1.0, 2)
        np.testing.assert_allclose(vec[mask], np.exp(log_in), rtol=1e-12)
        np.testing.assert_allclose(vec[~mask], np.exp(log_out), rtol=1e-12)

    def test_accurate_history_repels_less(self):
        # an operator with a strong accurate record pushes mass into the sketch
        # harder than a distrusted one
        mask = np.array([True, False, False, False])
        sk = SketchObservation(operator_id="h1", mask=mask, t=1)
        trusted = marginal_sketch_likelihood(sk, ReliabilityState(20.0, 2.0), 1.0)
        distrusted = marginal_sketch_likelihood(sk, ReliabilityState(2.0, 20.0), 1.0)
        assert trusted[0] / trusted[1] > 1.0 > distrusted[0] / distrusted[1]
