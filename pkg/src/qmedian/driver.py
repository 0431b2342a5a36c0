"""End-to-end execution of the amplification experiment on the simulator.

One experiment is: prepare the register against a threshold oracle, run the
amplification loop beta times, then read out the below-threshold fraction —
exactly (a simulator privilege) or by sampling the final state alpha times.

Sampling alpha indices from the single final state is distributionally
identical to re-preparing per sample, because preparation is deterministic;
``resimulate=True`` forces the literal re-preparation anyway as a paranoia
path.  Per-sample randomness comes from indexed sub-streams of the plan
seed, so results do not depend on sampling order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import ThresholdOracle
from .errors import NumericalError, ParameterError
from .rng import SALT_SAMPLES, RandomStream, bulk_uniforms, derive_seed
from .statevector import (
    StateVector,
    conditional_phase,
    diffusion,
    probability_of,
    sample,
    sample_many,
    shift,
    uniform_state,
)

MODES = ("exact", "sampled")

_NORM_TOL = 1e-6
_HALF_PI = math.pi / 2


@dataclass(frozen=True)
class RunPlan:
    """Parameters of one estimation run.

    eps0: prior bound on the magnitude of the imbalance (0 < eps0 <= 0.1);
    theta: relative precision target; kappa: confidence multiplier;
    alpha: number of measurement repetitions; beta: amplification loop
    repetitions; mode: "exact" or "sampled"; seed: 64-bit master seed.
    """

    eps0: float
    theta: float
    kappa: float
    alpha: int
    beta: int
    mode: str
    seed: int
    resimulate: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.eps0 <= 0.1):
            raise ParameterError(f"eps0 must be in (0, 0.1], got {self.eps0}")
        if not self.theta > 0.0:
            raise ParameterError(f"theta must be > 0, got {self.theta}")
        if not self.kappa > 0.0:
            raise ParameterError(f"kappa must be > 0, got {self.kappa}")
        if self.alpha < 1:
            raise ParameterError(f"alpha must be >= 1, got {self.alpha}")
        if self.beta < 1:
            raise ParameterError(f"beta must be >= 1, got {self.beta}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of one experiment.

    f_hat is the measured below-threshold fraction (equals exact_p in exact
    mode); exact_p is always the simulator's exact below probability;
    outcomes holds the per-sample below/above booleans in sampled mode.
    """

    f_hat: float
    exact_p: float
    alpha: int
    outcomes: Optional[np.ndarray] = None


def choose_beta(eps0: float) -> int:
    """Loop count for a given prior bound: max(1, floor(1/(20*eps0))).

    Guarantees beta*|eps| <= 0.1 for every |eps| <= eps0, which keeps the
    fraction-vs-imbalance curve strictly monotone (invertible).
    """
    if not (0.0 < eps0 <= 0.1):
        raise ParameterError(f"eps0 must be in (0, 0.1], got {eps0}")
    return max(1, math.floor(1.0 / (20.0 * eps0) + 1e-9))


def choose_alpha(theta: float) -> int:
    """Repetition count for a target relative precision: ceil(1/theta^2)."""
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must be in (0, 1], got {theta}")
    return math.ceil(1.0 / (theta * theta) - 1e-9)


def prepare(o: ThresholdOracle) -> StateVector:
    """Initial distribution: uniform state, then a pi/2 phase on every
    above-threshold basis state, then the shift transform.

    Leaves every below amplitude at eps/sqrt(N) and every above amplitude
    at ((1+eps) + i)/sqrt(N).
    """
    state = uniform_state(o.n)
    conditional_phase(state, o.above_mask, _HALF_PI)
    shift(state)
    return state


def amplification_loop(state: StateVector, o: ThresholdOracle, beta: int) -> StateVector:
    """beta repetitions of: pi phase below, diffusion, pi phase above,
    diffusion.  Mutates and returns the state."""
    if beta < 0:
        raise ParameterError(f"loop count must be >= 0, got {beta}")
    below = o.below_mask
    above = o.above_mask
    for _ in range(beta):
        conditional_phase(state, below, math.pi)
        diffusion(state)
        conditional_phase(state, above, math.pi)
        diffusion(state)
    return state


def _final_state(o: ThresholdOracle, beta: int) -> StateVector:
    state = amplification_loop(prepare(o), o, beta)
    drift = abs(state.norm_sq() - 1.0)
    if drift > _NORM_TOL:
        raise NumericalError(
            f"state norm drifted by {drift:.3e} after {beta} loop iterations"
        )
    return state


def run_experiment(o: ThresholdOracle, plan: RunPlan) -> ExperimentResult:
    """Run the full experiment for one oracle under one plan.

    Exact mode reads the below probability off the state.  Sampled mode
    draws plan.alpha basis indices from the final state and reports the
    fraction that landed below the threshold.  Deterministic given
    (oracle, plan).
    """
    state = _final_state(o, plan.beta)
    exact_p = probability_of(state, o.below_mask)
    if plan.mode == "exact":
        return ExperimentResult(exact_p, exact_p, plan.alpha, None)

    below = o.below_mask
    draw_seed = derive_seed(plan.seed, SALT_SAMPLES)
    if plan.resimulate:
        outcomes = np.empty(plan.alpha, dtype=bool)
        for j in range(plan.alpha):
            st = _final_state(o, plan.beta)
            idx = sample(st, RandomStream(derive_seed(draw_seed, j)))
            outcomes[j] = below[idx]
    else:
        uniforms = bulk_uniforms(draw_seed, plan.alpha)
        indices = sample_many(state, uniforms)
        outcomes = below[indices]
    hits = int(outcomes.sum())
    return ExperimentResult(hits / plan.alpha, exact_p, plan.alpha, outcomes)
