"""Estimator facade: params roundtrip, cloning, fit/predict surface."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sketchtrack import (
    CameraPose,
    ObservationBundle,
    RangeObservation,
    SketchFusionTracker,
    SketchObservation,
)


def make_bundles(n_ticks, with_sketch=False):
    pose = CameraPose.nadir(5.0, 5.0, altitude=10.0)
    bundles = []
    for t in range(1, n_ticks + 1):
        r = RangeObservation(sensor_id="u1", range=10.5, detected=True,
                             pose=pose, sigma_d=0.3)
        sketches = ()
        if with_sketch and t % 3 == 0:
            mask = np.zeros(400, dtype=bool)
            mask[200:220] = True
            sketches = (SketchObservation(operator_id="h1", mask=mask, t=t),)
        bundles.append(ObservationBundle(t=t, ranges=(r,), sketches=sketches))
    return bundles


class TestParams:
    def test_get_set_roundtrip(self):
        est = SketchFusionTracker(rows=10, cols=10, sigma_p=0.7)
        params = est.get_params()
        assert params["rows"] == 10
        assert params["sigma_p"] == 0.7
        est2 = SketchFusionTracker().set_params(**params)
        assert est2.get_params() == params

    def test_clone(self):
        est = SketchFusionTracker(rows=5, cols=5, operator_ids=("h1",))
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()
        assert cloned is not est


class TestFitPredict:
    def test_not_fitted_raises(self):
        with pytest.raises(NotFittedError):
            SketchFusionTracker().predict()

    def test_fit_sets_state(self):
        est = SketchFusionTracker(sensor_ids=("u1",))
        est.fit(make_bundles(5))
        assert est.n_steps_ == 5
        assert est.track_.shape == (5, 2)
        assert est.belief_.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_predict_current_estimate(self):
        est = SketchFusionTracker(sensor_ids=("u1",))
        est.fit(make_bundles(4))
        out = est.predict()
        assert out.shape == (2,)
        np.testing.assert_allclose(out, est.track_[-1])

    def test_fit_predict_matches_track(self):
        bundles = make_bundles(6)
        track = SketchFusionTracker(sensor_ids=("u1",)).fit_predict(bundles)
        assert track.shape == (6, 2)

    def test_partial_fit_incremental(self):
        bundles = make_bundles(4)
        whole = SketchFusionTracker(sensor_ids=("u1",)).fit(bundles)
        inc = SketchFusionTracker(sensor_ids=("u1",))
        for b in bundles:
            inc.partial_fit(b)
        np.testing.assert_array_equal(whole.belief_.weights, inc.belief_.weights)

    def test_refit_resets(self):
        est = SketchFusionTracker(sensor_ids=("u1",))
        est.fit(make_bundles(3))
        est.fit(make_bundles(3))
        assert est.n_steps_ == 3

    def test_reliability_learning(self):
        est = SketchFusionTracker(sensor_ids=("u1",), operator_ids=("h1",))
        est.fit(make_bundles(6, with_sketch=True))
        rel = est.reliabilities_["h1"]
        assert (rel.alpha, rel.beta) != (2.0, 2.0)

    def test_point_mass_initial_belief(self):
        est = SketchFusionTracker(sensor_ids=("u1",), initial_belief=(5.0, 5.0))
        est.fit(make_bundles(2))
        assert est.n_steps_ == 2

    def test_rejects_non_bundle(self):
        est = SketchFusionTracker()
        with pytest.raises(TypeError):
            est.fit([{"t": 1}])
