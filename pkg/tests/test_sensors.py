"""Slant-range geometry and the Gaussian range likelihood."""

import numpy as np
import pytest

from sketchtrack import (
    Bounds,
    CameraPose,
    ParticleGrid,
    RangeObservation,
    particle_ranges,
    range_likelihood,
    range_log_likelihood,
)


def two_particle_grid():
    return ParticleGrid.from_positions(
        np.array([[0.0, 0.0], [3.0, 4.0]]), Bounds(-1.0, -1.0, 5.0, 5.0))


class TestParticleRanges:
    def test_pythagorean_triples(self):
        g = two_particle_grid()
        pose = CameraPose.nadir(0.0, 0.0, altitude=12.0)
        r = particle_ranges(g, pose)
        # directly below: range is the altitude; offset (3,4) gives 5-12-13
        np.testing.assert_allclose(r, [12.0, 13.0], atol=1e-12)

    def test_yaw_does_not_change_ranges(self):
        g = two_particle_grid()
        for yaw in (0.0, 0.7, np.pi / 2, 3.0):
            pose = CameraPose.nadir(1.0, 2.0, altitude=9.0, yaw=yaw)
            r = particle_ranges(g, pose)
            base = particle_ranges(g, CameraPose.nadir(1.0, 2.0, altitude=9.0))
            np.testing.assert_array_equal(r, base)


class TestRangeLikelihood:
    def test_peak_value(self):
        g = two_particle_grid()
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        obs = RangeObservation(sensor_id="u1", range=10.0, detected=True,
                               pose=pose, sigma_d=0.05)
        lik = range_likelihood(g, obs)
        assert lik[0] == pytest.approx(1.0 / (0.05 * np.sqrt(2 * np.pi)), rel=1e-12)

    def test_two_sigma_ratio(self):
        g = two_particle_grid()
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        at_peak = RangeObservation(sensor_id="u1", range=10.0, detected=True,
                                   pose=pose, sigma_d=0.05)
        off_peak = RangeObservation(sensor_id="u1", range=10.1, detected=True,
                                    pose=pose, sigma_d=0.05)
        ratio = range_likelihood(g, off_peak)[0] / range_likelihood(g, at_peak)[0]
        assert ratio == pytest.approx(np.exp(-2.0), rel=1e-10)

    def test_likelihood_ring(self):
        # equidistant particles get equal likelihood regardless of direction
        pos = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        g = ParticleGrid.from_positions(pos, Bounds(-2.0, -2.0, 2.0, 2.0))
        pose = CameraPose.nadir(0.0, 0.0, altitude=5.0)
        obs = RangeObservation(sensor_id="u1", range=5.05, detected=True,
                               pose=pose, sigma_d=0.1)
        lik = range_likelihood(g, obs)
        np.testing.assert_allclose(lik, lik[0], rtol=1e-12)

    def test_missed_detection_is_uninformative(self):
        g = two_particle_grid()
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        obs = RangeObservation(sensor_id="u1", range=0.0, detected=False,
                               pose=pose, sigma_d=0.05)
        np.testing.assert_array_equal(range_likelihood(g, obs), 1.0)
        np.testing.assert_array_equal(range_log_likelihood(g, obs), 0.0)

    def test_log_matches_linear(self):
        g = two_particle_grid()
        pose = CameraPose.nadir(2.0, 2.0, altitude=8.0)
        obs = RangeObservation(sensor_id="u2", range=8.3, detected=True,
                               pose=pose, sigma_d=0.2)
        np.testing.assert_allclose(
            np.exp(range_log_likelihood(g, obs)), range_likelihood(g, obs), rtol=1e-12)


class TestRangeObservation:
    def test_undetected_forces_zero_range(self):
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        obs = RangeObservation(sensor_id="u1", range=7.5, detected=False,
                               pose=pose, sigma_d=0.05)
        assert obs.range == 0.0

    def test_negative_range_rejected(self):
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        with pytest.raises(ValueError):
            RangeObservation(sensor_id="u1", range=-1.0, detected=True,
                             pose=pose, sigma_d=0.05)

    def test_sigma_must_be_positive(self):
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        with pytest.raises(ValueError):
            RangeObservation(sensor_id="u1", range=1.0, detected=True,
                             pose=pose, sigma_d=0.0)

    def test_sensor_id_required(self):
        pose = CameraPose.nadir(0.0, 0.0, altitude=10.0)
        with pytest.raises(ValueError):
            RangeObservation(sensor_id="", range=1.0, detected=True,
                             pose=pose, sigma_d=0.05)
