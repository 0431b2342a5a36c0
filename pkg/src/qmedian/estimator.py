"""Turning a measured below-threshold fraction into a signed imbalance.

The amplified fraction f depends on the imbalance magnitude only to
leading order, so estimation proceeds in three stages:

1. invert f on the positive branch by bisection (the curve is strictly
   increasing on the bracket, so this is unconditionally safe);
2. attach a confidence interval by inverting the endpoints of the
   Hoeffding band f_hat +- kappa*sqrt(1/alpha);
3. resolve the sign by re-running the experiment with the threshold bumped
   just past the next at-or-above dataset value: that moves at least one
   value into the below set, so the magnitude grows when the imbalance was
   already positive and shrinks when it was negative.

A fraction too large for the bracket is reported as a verdict (the true
imbalance exceeds the prior bound), not an error; the adaptive driver
reacts by accepting the scale.  When the sign comes back negative the
magnitude is refit on the negative branch, which removes the small odd-order
asymmetry between f(+eps) and f(-eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .baseline import classical_estimate
from .dataset import Dataset, ThresholdOracle, make_oracle
from .driver import RunPlan, choose_alpha, choose_beta, run_experiment
from .errors import DegenerateThresholdError, FractionOutOfRange, ParameterError
from .model import predicted_fraction
from .rng import SALT_PROBE, SALT_SIGN, derive_seed

BRACKET_TOL = 1e-12

# The fraction curve eps -> f(eps, beta) peaks near beta*eps ~ 0.53..0.79;
# it is verified strictly increasing on [0, MONOTONE_CAP/beta] for every
# beta up to 200, which is the widest bracket any caller here uses.
MONOTONE_CAP = 0.45

# On the negative branch, m -> f(-m, beta) is strictly increasing on
# [0, NEG_CAP/beta] (narrower: the branches differ at odd orders in eps).
NEG_CAP = 0.1

# Forgives simulator-vs-model rounding at the very top of a bracket; a
# genuinely out-of-range fraction overshoots by orders of magnitude more.
_TOP_TOL = 1e-9

_SLACK = 1e-9

# Finest imbalance the sign probe must still resolve, as a fraction of the
# scale bound: matches the smallest magnitude the adaptive driver accepts.
_PROBE_RESOLUTION_FACTOR = 0.2


@dataclass(frozen=True)
class EstimateRecord:
    """Signed imbalance estimate plus everything needed to reproduce it.

    sign is +1, -1, or None (undecided); eps_hat equals sign times the
    magnitude when the sign is known and the bare magnitude otherwise.
    (ci_lo, ci_hi) bound the magnitude.  verdict is "ok", or
    "eps_exceeds_eps0" when the measured fraction exceeded what any
    magnitude within the prior bound could produce (then eps_hat is the
    signed prior bound and the interval is (eps0, 1.0)).
    """

    eps_hat: float
    sign: Optional[int]
    ci_lo: float
    ci_hi: float
    f_hat: float
    exact_p: float
    alpha: int
    beta: int
    theta: float
    kappa: float
    eps0: float
    mode: str
    seed: int
    n: int
    verdict: str = "ok"


def sign_bracket(beta: int) -> float:
    """Widest inversion bracket safe at a given loop count."""
    return min(1.0, MONOTONE_CAP / beta)


def invert_fraction(f_hat: float, beta: int, eps_hi: float) -> float:
    """Magnitude m in [0, eps_hi] with predicted_fraction(m, beta) == f_hat.

    Bisects to a bracket width of 1e-12.  Raises FractionOutOfRange when
    f_hat exceeds the curve's value at eps_hi (beyond rounding forgiveness).
    """
    if beta < 1:
        raise ParameterError(f"loop count must be >= 1, got {beta}")
    if not f_hat >= 0.0:
        raise ParameterError(f"fraction must be >= 0, got {f_hat}")
    if not (0.0 < eps_hi <= sign_bracket(beta)):
        raise ParameterError(
            f"bracket top must be in (0, {sign_bracket(beta)}] for beta={beta}, "
            f"got {eps_hi}"
        )
    top = predicted_fraction(eps_hi, beta)
    if f_hat > top:
        if f_hat > top + _TOP_TOL:
            raise FractionOutOfRange(f_hat, top)
        f_hat = top
    if f_hat == 0.0:
        return 0.0
    lo, hi = 0.0, eps_hi
    while hi - lo > BRACKET_TOL:
        mid = 0.5 * (lo + hi)
        if predicted_fraction(mid, beta) < f_hat:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _invert_negative(f_hat: float, beta: int, eps_hi: float) -> float:
    """Magnitude m with predicted_fraction(-m, beta) == f_hat."""
    top_m = min(eps_hi, NEG_CAP / beta, 1.0)
    top = predicted_fraction(-top_m, beta)
    if f_hat > top:
        if f_hat > top + _TOP_TOL:
            raise FractionOutOfRange(f_hat, top)
        f_hat = top
    if f_hat <= 0.0:
        return 0.0
    lo, hi = 0.0, top_m
    while hi - lo > BRACKET_TOL:
        mid = 0.5 * (lo + hi)
        if predicted_fraction(-mid, beta) < f_hat:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def confidence_interval(
    f_hat: float,
    alpha: Optional[int],
    kappa: float,
    beta: int,
    eps_hi: float,
) -> Tuple[float, float]:
    """Magnitude interval from the Hoeffding band f_hat +- kappa*sqrt(1/alpha).

    The band holds with probability at least 1 - 2*exp(-2*kappa^2).  The
    upper endpoint clamps at eps_hi.  alpha=None means an exact readout
    (no statistical width): the interval collapses to a point.
    """
    if alpha is None:
        m = invert_fraction(f_hat, beta, eps_hi)
        return (m, m)
    if alpha < 1:
        raise ParameterError(f"alpha must be >= 1, got {alpha}")
    half = kappa * math.sqrt(1.0 / alpha)
    top = predicted_fraction(eps_hi, beta)
    lo = invert_fraction(max(0.0, f_hat - half), beta, eps_hi)
    hi = invert_fraction(min(f_hat + half, top), beta, eps_hi)
    return (lo, hi)


def _threshold_bump(d: Dataset, mu: float) -> float:
    """Next threshold up: just past the smallest value at or above mu, so
    that value (and its ties) flips into the below set."""
    vals = d.values
    at_or_above = vals[vals >= mu]
    if at_or_above.size == 0:
        raise DegenerateThresholdError(
            f"no dataset value at or above threshold {mu!r}"
        )
    return float(np.nextafter(at_or_above.min(), math.inf))


def _measure_magnitude(
    o: ThresholdOracle, plan: RunPlan, seed: int
) -> Tuple[float, float]:
    """One experiment inverted on the widest bracket.

    Returns (magnitude, ci_half_width); magnitude is +inf when the fraction
    exceeds even the widest bracket's range.
    """
    res = run_experiment(o, replace(plan, seed=seed))
    cap = sign_bracket(plan.beta)
    try:
        m = invert_fraction(res.f_hat, plan.beta, cap)
    except FractionOutOfRange:
        return math.inf, 0.0
    if plan.mode == "exact":
        return m, 0.0
    lo, hi = confidence_interval(res.f_hat, plan.alpha, plan.kappa, plan.beta, cap)
    return m, 0.5 * (hi - lo)


def resolve_sign(
    d: Dataset,
    mu: float,
    plan: RunPlan,
    baseline: Optional[Tuple[float, float]] = None,
) -> Optional[int]:
    """Sign of the imbalance at mu: +1, -1, or None when undecidable.

    Measures the magnitude at mu and at the bumped threshold; raising the
    threshold always moves mass into the below set, so the magnitude grows
    for a positive imbalance and shrinks for a negative one.  Decisions
    require the gap to clear the combined confidence half-widths.  (If the
    value next above mu is heavily tied, the bump can overshoot; the
    comparison then reflects the shifted partition.)

    baseline optionally supplies an already-measured (magnitude,
    ci_half_width) at mu under this plan, avoiding a duplicate experiment.
    """
    if baseline is None:
        baseline = _measure_magnitude(make_oracle(d, mu), plan, plan.seed)
    m0, hw0 = baseline
    if not m0 > hw0 + _SLACK:  # indistinguishable from perfect balance
        return None
    o1 = make_oracle(d, _threshold_bump(d, mu))
    m1, hw1 = _measure_magnitude(o1, plan, derive_seed(plan.seed, SALT_SIGN))
    if math.isinf(m1):
        return 1 if not math.isinf(m0) else None
    slack = hw0 + hw1 + _SLACK
    if m1 > m0 + slack:
        return 1
    if m1 < m0 - slack:
        return -1
    return None


def _probe_sign(
    o: ThresholdOracle, plan: RunPlan, resolution: Optional[float] = None
) -> Optional[int]:
    """Sign decision from the unamplified uniform distribution, whose below
    probability is (1 + eps)/2, so sign(2f - 1) = sign(eps).

    Exact mode reads it off.  In sampled mode a classical draw sized so its
    noise gate equals ``resolution`` (default eps0) decides, returning None
    when the estimate is inside the gate.  Used when the amplified fraction
    overflowed the bracket, and as the fallback when the bumped-threshold
    comparison is inconclusive under sampling noise.
    """
    if plan.mode == "exact":
        est = (2 * o.n_below - o.size) / o.size
        if est > 0.0:
            return 1
        if est < 0.0:
            return -1
        return None
    res = plan.eps0 if resolution is None else resolution
    m_probe = max(1, math.ceil((2.0 * plan.kappa / res) ** 2 - 1e-9))
    _, est = classical_estimate(o, m_probe, derive_seed(plan.seed, SALT_PROBE))
    gate = 2.0 * plan.kappa * math.sqrt(1.0 / m_probe)
    if est > gate:
        return 1
    if est < -gate:
        return -1
    return None


def _refit_negative(
    f_hat: float,
    alpha: Optional[int],
    kappa: float,
    beta: int,
    eps_hi: float,
    fallback: Tuple[float, Tuple[float, float]],
) -> Tuple[float, Tuple[float, float]]:
    """Re-invert magnitude and interval on the negative branch.

    Falls back to the positive-branch numbers if the fraction overflows the
    narrower negative bracket (only possible when the sign decision itself
    was noise).
    """
    try:
        m = _invert_negative(f_hat, beta, eps_hi)
    except FractionOutOfRange:
        return fallback
    if alpha is None:
        return m, (m, m)
    half = kappa * math.sqrt(1.0 / alpha)
    top_m = min(eps_hi, NEG_CAP / beta, 1.0)
    top = predicted_fraction(-top_m, beta)
    lo = _invert_negative(max(0.0, f_hat - half), beta, eps_hi)
    hi = _invert_negative(min(f_hat + half, top), beta, eps_hi)
    return m, (lo, hi)


def eps_est(
    d: Dataset,
    mu: float,
    eps0: float = 0.1,
    theta: float = 0.1,
    kappa: float = 3.0,
    mode: str = "exact",
    seed: int = 0,
    alpha: Optional[int] = None,
    beta: Optional[int] = None,
    resimulate: bool = False,
) -> EstimateRecord:
    """Full signed-imbalance estimate at threshold mu.

    Chooses beta = max(1, floor(1/(20*eps0))) and alpha = ceil(1/theta^2)
    unless overridden, runs the experiment, inverts the fraction on
    [0, eps0], attaches the confidence interval, resolves the sign via the
    bumped threshold, and refits on the negative branch when the sign is
    negative.  A fraction beyond the bracket yields verdict
    "eps_exceeds_eps0" with eps_hat = sign * eps0 and interval (eps0, 1).
    """
    if beta is None:
        beta = choose_beta(eps0)
    if alpha is None:
        alpha = choose_alpha(theta)
    plan = RunPlan(eps0, theta, kappa, alpha, beta, mode, seed, resimulate)
    o = make_oracle(d, mu)
    res = run_experiment(o, plan)
    exact = mode == "exact"
    try:
        m = invert_fraction(res.f_hat, beta, eps0)
    except FractionOutOfRange:
        sgn = _probe_sign(o, plan)
        eps_hat = eps0 if sgn is None else sgn * eps0
        return EstimateRecord(
            eps_hat=eps_hat, sign=sgn, ci_lo=eps0, ci_hi=1.0,
            f_hat=res.f_hat, exact_p=res.exact_p, alpha=alpha, beta=beta,
            theta=theta, kappa=kappa, eps0=eps0, mode=mode, seed=seed,
            n=d.n, verdict="eps_exceeds_eps0",
        )
    if exact:
        ci = (m, m)
        hw = 0.0
    else:
        ci = confidence_interval(res.f_hat, alpha, kappa, beta, eps0)
        hw = 0.5 * (ci[1] - ci[0])
    sgn = resolve_sign(d, mu, plan, baseline=(m, hw))
    if exact:
        # Aliasing guard.  Far outside the bracket the fraction curve bends
        # back down, so an extreme imbalance can masquerade as a small
        # in-range one.  The exact partition counts are free here; when
        # they contradict the fitted estimate, report the overflow verdict
        # instead of the aliased magnitude.
        probe = _probe_sign(o, plan)
        if probe is not None and (m == 0.0 or (sgn is not None and sgn != probe)):
            return EstimateRecord(
                eps_hat=probe * eps0, sign=probe, ci_lo=eps0, ci_hi=1.0,
                f_hat=res.f_hat, exact_p=res.exact_p, alpha=alpha, beta=beta,
                theta=theta, kappa=kappa, eps0=eps0, mode=mode, seed=seed,
                n=d.n, verdict="eps_exceeds_eps0",
            )
        if sgn is None and probe is not None and m > 0.0:
            sgn = probe
    elif sgn is None and m > hw + 1e-9:
        # magnitude resolved but the bump comparison drowned in sampling
        # noise: let the gated classical probe pick the sign
        sgn = _probe_sign(o, plan, resolution=_PROBE_RESOLUTION_FACTOR * eps0)
    if sgn == -1:
        m, ci = _refit_negative(
            res.f_hat, None if exact else alpha, kappa, beta, eps0, (m, ci)
        )
    eps_hat = m if sgn is None else sgn * m
    return EstimateRecord(
        eps_hat=eps_hat, sign=sgn, ci_lo=ci[0], ci_hi=ci[1],
        f_hat=res.f_hat, exact_p=res.exact_p, alpha=alpha, beta=beta,
        theta=theta, kappa=kappa, eps0=eps0, mode=mode, seed=seed,
        n=d.n, verdict="ok",
    )
