"""Sklearn-style estimator facade over the tracker.

Wraps grid construction, weight assignment, and the filter recursion behind
the familiar fit / partial_fit / predict surface so the tracker composes with
get_params/set_params tooling. fit consumes a sequence of observation bundles
(one per tick), runs the forward pass, and exposes the learned reliabilities
and the estimate track as fitted attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .grid import Bounds, build_grid
from .human import ReliabilityState
from .motion import build_kernel
from .tracker import (Belief, FusionWeights, ObservationBundle, StepResult,
                      Tracker, assign_weights)


class SketchFusionTracker(BaseEstimator):
    """Grid filter with sketch fusion, packaged as an estimator.

    Parameters mirror the scenario configuration: workspace bounds and grid
    shape, motion model, source ids, operator priors, and the fusion /
    variance / velocity modes. All learning state lives in trailing-underscore
    attributes created by fit or partial_fit.
    """

    def __init__(self, bounds=(0.0, 0.0, 10.0, 10.0), rows=20, cols=20,
                 sigma_p=0.5, t_s=0.1, v0=(1.0, 1.0), sensor_ids=("u1",),
                 operator_ids=(), operator_priors=None, weights=None,
                 velocity_mode="fixed", variance_mode="paper",
                 initial_belief="uniform"):
        self.bounds = bounds
        self.rows = rows
        self.cols = cols
        self.sigma_p = sigma_p
        self.t_s = t_s
        self.v0 = v0
        self.sensor_ids = sensor_ids
        self.operator_ids = operator_ids
        self.operator_priors = operator_priors
        self.weights = weights
        self.velocity_mode = velocity_mode
        self.variance_mode = variance_mode
        self.initial_belief = initial_belief

    def _initialize(self):
        bounds = Bounds(*self.bounds)
        self.grid_ = build_grid(bounds, self.rows, self.cols)
        if self.weights is not None:
            self.weights_ = FusionWeights(by_source=dict(self.weights))
        else:
            self.weights_ = assign_weights(list(self.sensor_ids), list(self.operator_ids))
        priors = dict(self.operator_priors or {})
        reliabilities = {}
        for oid in self.operator_ids:
            alpha, beta = priors.get(oid, (2.0, 2.0))
            reliabilities[oid] = ReliabilityState(alpha=alpha, beta=beta, operator_id=oid)
        belief = self._build_initial_belief()
        self.tracker_ = Tracker(
            grid=self.grid_, weights=self.weights_, belief=belief,
            reliabilities=reliabilities, sigma_p=self.sigma_p, t_s=self.t_s,
            velocity=np.asarray(self.v0, dtype=float),
            velocity_mode=self.velocity_mode, variance_mode=self.variance_mode)
        self.kernel_ = self.tracker_.kernel()
        self.history_ = []
        self.n_steps_ = 0

    def _build_initial_belief(self) -> Belief:
        n = self.rows * self.cols
        if isinstance(self.initial_belief, str):
            if self.initial_belief == "uniform":
                return Belief.uniform(n)
            raise ValueError(f"unknown initial_belief {self.initial_belief!r}")
        spec = np.asarray(self.initial_belief, dtype=float)
        if spec.shape == (2,):
            # Point mass at the particle nearest the given position.
            d2 = ((self.grid_.positions - spec[None, :]) ** 2).sum(axis=1)
            return Belief.point_mass(int(np.argmin(d2)), n)
        return Belief(weights=spec)

    def _check_fitted(self):
        if not hasattr(self, "tracker_"):
            raise NotFittedError("call fit or partial_fit before using this estimator")

    def fit(self, X, y=None):
        """Run the forward filter over a sequence of ObservationBundle."""
        self._initialize()
        for bundle in X:
            self._step(bundle)
        self._finalize()
        return self

    def partial_fit(self, bundle: ObservationBundle):
        """Process one bundle, initializing on first call."""
        if not hasattr(self, "tracker_"):
            self._initialize()
        self._step(bundle)
        self._finalize()
        return self

    def _step(self, bundle: ObservationBundle) -> StepResult:
        if not isinstance(bundle, ObservationBundle):
            raise TypeError(f"expected ObservationBundle, got {type(bundle).__name__}")
        result = self.tracker_.step(bundle)
        self.history_.append(result)
        self.n_steps_ += 1
        return result

    def _finalize(self):
        self.belief_ = self.tracker_.belief
        self.reliabilities_ = dict(self.tracker_.reliabilities)
        self.track_ = (np.array([r.mmse for r in self.history_])
                       if self.history_ else np.empty((0, 2)))

    def predict(self, X=None):
        """MMSE estimates: current one, or one per bundle after filtering X."""
        self._check_fitted()
        if X is None:
            from .tracker import mmse_estimate
            return mmse_estimate(self.tracker_.belief, self.grid_)
        estimates = [self._step(bundle).mmse for bundle in X]
        self._finalize()
        return np.array(estimates)

    def fit_predict(self, X, y=None):
        """fit(X) then return the MMSE track, one row per bundle."""
        self.fit(X)
        return self.track_
