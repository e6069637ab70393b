"""Online learning of operator reliability from sketch outcomes.

After the target posterior absorbs a sketch, the reliability posterior for
that operator becomes a two-component Beta mixture: with probability q_s (the
posterior mass enclosed by the sketch) the target was inside, and the
reliability evidence is one success in M weighted draws; otherwise it was
outside and all M draws were misses. The mixture is collapsed back to a single
Beta by moment matching so the next sketch starts from conjugate form again.

Both mixture components share the same concentration w_h * M + alpha + beta,
so the reference-mode mean below is identical to the exact mixture mean; the
two modes differ only in the variance (the reference mode squares the mixture
weights, the exact mode uses the standard law of total variance).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleMomentsError
from .human import ReliabilityState, SketchObservation
from .validation import check_mask, check_probability, check_scalar, check_weight_vector

logger = logging.getLogger(__name__)

VARIANCE_MODES = ("paper", "exact")


@dataclass(frozen=True)
class BetaMixture:
    """Two-component Beta mixture: inside component weighted by q_s."""

    q_s: float
    alpha_in: float
    beta_in: float
    alpha_out: float
    beta_out: float

    def __post_init__(self):
        check_probability(self.q_s, "q_s")
        for name in ("alpha_in", "beta_in", "alpha_out", "beta_out"):
            check_scalar(getattr(self, name), name, minimum=0.0, include_min=False)


@dataclass(frozen=True)
class ReliabilityUpdate:
    """Result of one reliability update: new state plus trace fields."""

    state: ReliabilityState
    q_s: float
    n_enclosed: int
    variance_mode: str  # "paper", "exact", or "hold" when both were infeasible
    mean: float
    variance: float


def enclosed_mass(weights: np.ndarray, mask: np.ndarray) -> float:
    """Posterior mass inside the sketch: sum of weights over masked particles."""
    w = check_weight_vector(weights, len(np.asarray(weights).reshape(-1)))
    m = check_mask(mask, len(w))
    return float(w[m].sum())


def posterior_mixture(rel: ReliabilityState, w_h: float, n_enclosed: int,
                      q_s: float) -> BetaMixture:
    """Mixture over reliability after a sketch with enclosed mass q_s."""
    w_h = check_scalar(w_h, "w_h", minimum=0.0)
    q_s = check_probability(q_s, "q_s")
    m = int(n_enclosed)
    if m < 1:
        raise ValueError(f"n_enclosed must be >= 1, got {n_enclosed}")
    return BetaMixture(
        q_s=q_s,
        alpha_in=w_h + rel.alpha,
        beta_in=w_h * (m - 1) + rel.beta,
        alpha_out=rel.alpha,
        beta_out=w_h * m + rel.beta,
    )


def paper_moments(mix: BetaMixture) -> tuple[float, float]:
    """Reference-form mixture moments with the shared concentration denominator.

    mean = (q_s * alpha_in + (1 - q_s) * alpha_out) / s
    var  = (q_s^2 * alpha_in * beta_in + (1 - q_s)^2 * alpha_out * beta_out)
           / (s^2 * (s + 1))

    with s = alpha_in + beta_in (= alpha_out + beta_out for sketch mixtures).
    Note the squared mixture weights in the variance; see exact_mixture_moments
    for the standard alternative.
    """
    s = mix.alpha_in + mix.beta_in
    q = mix.q_s
    mean = (q * mix.alpha_in + (1.0 - q) * mix.alpha_out) / s
    var = (q * q * mix.alpha_in * mix.beta_in
           + (1.0 - q) * (1.0 - q) * mix.alpha_out * mix.beta_out) / (s * s * (s + 1.0))
    return float(mean), float(var)


def exact_mixture_moments(mix: BetaMixture) -> tuple[float, float]:
    """Standard mixture moments: law of total expectation and variance."""
    q = mix.q_s
    s_in = mix.alpha_in + mix.beta_in
    s_out = mix.alpha_out + mix.beta_out
    m_in = mix.alpha_in / s_in
    m_out = mix.alpha_out / s_out
    v_in = mix.alpha_in * mix.beta_in / (s_in * s_in * (s_in + 1.0))
    v_out = mix.alpha_out * mix.beta_out / (s_out * s_out * (s_out + 1.0))
    mean = q * m_in + (1.0 - q) * m_out
    var = q * (v_in + m_in * m_in) + (1.0 - q) * (v_out + m_out * m_out) - mean * mean
    return float(mean), float(var)


def fit_beta_from_moments(mean: float, variance: float) -> tuple[float, float]:
    """Invert Beta moments: alpha = mean * nu, beta = (1 - mean) * nu.

    nu = mean * (1 - mean) / variance - 1. Raises InfeasibleMomentsError when
    no Beta distribution has these moments (variance >= mean * (1 - mean)).
    """
    mean = check_scalar(mean, "mean", minimum=0.0, maximum=1.0,
                        include_min=False, include_max=False)
    variance = check_scalar(variance, "variance", minimum=0.0, include_min=False)
    bound = mean * (1.0 - mean)
    if variance >= bound:
        raise InfeasibleMomentsError(
            f"variance {variance!r} >= mean*(1-mean) {bound!r}: no Beta matches")
    nu = bound / variance - 1.0
    return mean * nu, (1.0 - mean) * nu


def update_reliability(rel: ReliabilityState, sketch: SketchObservation,
                       posterior_weights: np.ndarray, w_h: float,
                       variance_mode: str = "paper") -> ReliabilityUpdate:
    """One conjugate reliability update against the already-updated posterior.

    Ordering matters: the target posterior absorbs the sketch first, then q_s
    is read off that posterior. q_s of exactly 0 or 1 collapses the mixture to
    the corresponding component with no moment-matching error. If the requested
    variance mode yields infeasible moments the exact mode is tried; if that is
    also infeasible the state is held unchanged and flagged.
    """
    if variance_mode not in VARIANCE_MODES:
        raise ValueError(f"variance_mode must be one of {VARIANCE_MODES}, got {variance_mode!r}")
    if rel.operator_id and sketch.operator_id != rel.operator_id:
        raise ValueError(f"sketch from {sketch.operator_id!r} does not match "
                         f"reliability state for {rel.operator_id!r}")
    q = check_weight_vector(posterior_weights, len(np.asarray(posterior_weights).reshape(-1)),
                            "posterior_weights")
    mask = check_mask(sketch.mask, len(q), "sketch.mask")
    q_s = float(q[mask].sum())
    q_s = min(max(q_s, 0.0), 1.0)
    m = sketch.n_enclosed
    mix = posterior_mixture(rel, w_h, m, q_s)

    if q_s == 1.0:
        alpha, beta = mix.alpha_in, mix.beta_in
        mean = alpha / (alpha + beta)
        var = alpha * beta / ((alpha + beta) ** 2 * (alpha + beta + 1.0))
        state = ReliabilityState(alpha=alpha, beta=beta, operator_id=rel.operator_id)
        return ReliabilityUpdate(state, q_s, m, variance_mode, mean, var)
    if q_s == 0.0:
        alpha, beta = mix.alpha_out, mix.beta_out
        mean = alpha / (alpha + beta)
        var = alpha * beta / ((alpha + beta) ** 2 * (alpha + beta + 1.0))
        state = ReliabilityState(alpha=alpha, beta=beta, operator_id=rel.operator_id)
        return ReliabilityUpdate(state, q_s, m, variance_mode, mean, var)

    ladder = [variance_mode] + [m_ for m_ in ("exact",) if m_ != variance_mode]
    for mode in ladder:
        mean, var = paper_moments(mix) if mode == "paper" else exact_mixture_moments(mix)
        try:
            alpha, beta = fit_beta_from_moments(mean, var)
        except InfeasibleMomentsError:
            logger.warning("operator %s: infeasible moments in %s mode (mean=%g var=%g)",
                           rel.operator_id, mode, mean, var)
            continue
        state = ReliabilityState(alpha=alpha, beta=beta, operator_id=rel.operator_id)
        return ReliabilityUpdate(state, q_s, m, mode, mean, var)

    logger.warning("operator %s: reliability held, no feasible moment match", rel.operator_id)
    mean, var = rel.mean, rel.variance
    return ReliabilityUpdate(rel, q_s, m, "hold", mean, var)
