"""Grid-based target tracking fusing sensor ranges with human sketches."""

from .errors import (ConfigError, DegenerateLikelihoodError, EmptySketchError,
                     InfeasibleMomentsError, ProjectionError, SketchTrackError)
from .estimator import SketchFusionTracker
from .grid import (Bounds, CameraPose, ParticleGrid, Polygon, build_grid,
                   points_in_polygon, polygon_mask, project_polygon,
                   project_to_ground, project_to_pixels)
from .human import (ReliabilityState, SketchObservation, marginal_log_values,
                    marginal_sketch_likelihood, multi_draw_likelihood,
                    single_draw_likelihood)
from .learning import (BetaMixture, ReliabilityUpdate, enclosed_mass,
                       exact_mixture_moments, fit_beta_from_moments,
                       paper_moments, posterior_mixture, update_reliability)
from .motion import (TransitionKernel, VelocityState, build_kernel, predict,
                     sample_velocity, transition_std, velocity_walk_std)
from .sensors import (RangeObservation, particle_ranges, range_likelihood,
                      range_log_likelihood)
from .sim import (OperatorConfig, ScenarioConfig, SensorConfig,
                  reference_scenario, run_scenario)
from .tracker import (Belief, FusionWeights, ObservationBundle, StepResult,
                      Tracker, assign_weights, fuse, joint_step, map_estimate,
                      mmse_estimate, update, weight_values)

__version__ = "0.1.0"

__all__ = [
    "Belief", "BetaMixture", "Bounds", "CameraPose", "ConfigError",
    "DegenerateLikelihoodError", "EmptySketchError", "FusionWeights",
    "InfeasibleMomentsError", "ObservationBundle", "OperatorConfig",
    "ParticleGrid", "Polygon", "ProjectionError", "RangeObservation",
    "ReliabilityState", "ReliabilityUpdate", "ScenarioConfig", "SensorConfig",
    "SketchFusionTracker", "SketchObservation", "SketchTrackError",
    "StepResult", "Tracker", "TransitionKernel", "VelocityState",
    "assign_weights", "build_grid", "build_kernel", "enclosed_mass",
    "exact_mixture_moments", "fit_beta_from_moments", "fuse", "joint_step",
    "map_estimate", "marginal_log_values", "marginal_sketch_likelihood",
    "mmse_estimate", "multi_draw_likelihood", "paper_moments",
    "particle_ranges", "points_in_polygon", "polygon_mask", "posterior_mixture",
    "predict", "project_polygon", "project_to_ground", "project_to_pixels",
    "range_likelihood", "range_log_likelihood", "reference_scenario",
    "run_scenario", "sample_velocity", "single_draw_likelihood",
    "transition_std", "update", "update_reliability", "velocity_walk_std",
    "weight_values",
]
