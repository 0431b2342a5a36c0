"""Classical Monte Carlo reference: estimate the imbalance by direct
uniform sampling of the dataset.

With m independent draws, f_hat is the fraction below the threshold and
2*f_hat - 1 estimates the imbalance with standard error ~ 1/sqrt(m); the
amplified experiment reaches the same precision with ~ 1/eps loop passes
instead of ~ 1/eps^2 draws, which is the contrast this module exists to
measure.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .dataset import ThresholdOracle
from .errors import ParameterError
from .rng import SALT_BASELINE, bulk_uniforms, derive_seed


def classical_estimate(o: ThresholdOracle, m: int, seed: int) -> Tuple[float, float]:
    """m uniform draws with replacement: returns (f_hat, 2*f_hat - 1)."""
    if m < 1:
        raise ParameterError(f"sample count must be >= 1, got {m}")
    u = bulk_uniforms(derive_seed(seed, SALT_BASELINE), m)
    idx = np.minimum((u * o.size).astype(np.int64), o.size - 1)
    hits = int(o.below_mask[idx].sum())
    f_hat = hits / m
    return f_hat, 2.0 * f_hat - 1.0


def classical_sample_budget(precision: float) -> int:
    """Draws needed for a target absolute error in the imbalance:
    ceil(1/precision^2)."""
    if not (0.0 < precision <= 1.0):
        raise ParameterError(f"precision must be in (0, 1], got {precision}")
    return math.ceil(1.0 / (precision * precision) - 1e-9)
