"""End-to-end experiment driver: preparation, amplification, readout."""

import math

import numpy as np
import pytest

from qmedian import (
    ParameterError,
    RunPlan,
    amplification_loop,
    choose_alpha,
    choose_beta,
    conserved_quantity,
    dataset_from_values,
    k_closed_form,
    l_closed_form,
    make_oracle,
    oracle_from_mask,
    predicted_fraction,
    prepare,
    probability_of,
    run_experiment,
)


def head_oracle(n, n_below):
    return oracle_from_mask(n, list(range(n_below)))


# --------------------------------------------------------- parameter choice

def test_choose_beta_table():
    assert choose_beta(0.1) == 1
    assert choose_beta(0.05) == 1
    assert choose_beta(0.025) == 2
    assert choose_beta(0.0125) == 4
    assert choose_beta(0.01) == 5
    assert choose_beta(0.004) == 12
    assert choose_beta(0.003) == 16


def test_choose_beta_keeps_loop_angle_invertible():
    for eps0 in (0.1, 0.07, 0.03, 0.011, 0.005, 0.0003):
        assert choose_beta(eps0) * eps0 <= 0.1 + 1e-12
        assert choose_beta(eps0) >= 1


def test_choose_beta_bounds():
    for bad in (0.0, -0.1, 0.11, 1.0):
        with pytest.raises(ParameterError):
            choose_beta(bad)


def test_choose_alpha_table():
    assert choose_alpha(1.0) == 1
    assert choose_alpha(0.1) == 100
    assert choose_alpha(0.05) == 400
    assert choose_alpha(0.03) == 1112
    assert choose_alpha(0.01) == 10000


def test_choose_alpha_bounds():
    for bad in (0.0, -0.5, 1.0001):
        with pytest.raises(ParameterError):
            choose_alpha(bad)


def test_run_plan_validation():
    good = dict(eps0=0.1, theta=0.1, kappa=3.0, alpha=100, beta=1,
                mode="exact", seed=0)
    RunPlan(**good)
    for field, bad in [("eps0", 0.0), ("eps0", 0.2), ("theta", 0.0),
                       ("kappa", -1.0), ("alpha", 0), ("beta", 0),
                       ("mode", "weird")]:
        with pytest.raises(ParameterError):
            RunPlan(**{**good, field: bad})


# --------------------------------------------------------- preparation

def test_prepare_amplitudes_small_register():
    o = head_oracle(5, 18)  # eps = (36 - 32)/32 = 0.125
    assert o.eps == 0.125
    state = prepare(o)
    below = state.amps[o.below_mask]
    above = state.amps[o.above_mask]
    assert np.max(np.abs(below - 0.022097086912079608)) < 1e-13
    assert np.max(np.abs(above - complex(0.1988737822087165,
                                         0.17677669529663687))) < 1e-13
    assert abs(state.norm_sq() - 1.0) < 1e-13


def test_prepare_matches_model_across_grid():
    n = 8
    size = 1 << n
    scale = math.sqrt(1.0 / size)
    for n_below in (96, 128, 129, 160):
        o = head_oracle(n, n_below)
        state = prepare(o)
        below = state.amps[o.below_mask]
        above = state.amps[o.above_mask]
        assert np.max(np.abs(below - o.eps * scale)) < 1e-13
        assert np.max(np.abs(above - complex(1 + o.eps, 1) * scale)) < 1e-13


def test_amplification_loop_tracks_closed_form():
    n = 10
    o = head_oracle(n, 576)
    assert o.eps == 0.125
    root_n = math.sqrt(1 << n)
    state = prepare(o)
    for r in range(101):
        k_sim = complex(state.amps[0]) * root_n
        l_sim = complex(state.amps[-1]) * root_n
        assert abs(k_sim - k_closed_form(o.eps, r)) < 1e-10
        assert abs(l_sim - l_closed_form(o.eps, r)) < 1e-10
        amplification_loop(state, o, 1)


def test_amplification_loop_zero_passes_is_identity():
    o = head_oracle(4, 10)
    state = prepare(o)
    before = state.amps.copy()
    amplification_loop(state, o, 0)
    assert np.all(state.amps == before)
    with pytest.raises(ParameterError):
        amplification_loop(state, o, -1)


# --------------------------------------------------------- experiments

def test_exact_experiment_reads_model_fraction():
    o = head_oracle(10, 576)
    plan = RunPlan(0.1, 0.1, 3.0, 100, 1, "exact", 0)
    res = run_experiment(o, plan)
    assert res.f_hat == res.exact_p
    assert res.outcomes is None
    assert res.alpha == 100
    assert abs(res.f_hat - predicted_fraction(0.125, 1)) < 1e-12
    assert res.exact_p == pytest.approx(26937 / 262144, abs=1e-13)


def test_sampled_experiment_known_counts():
    o = head_oracle(10, 576)
    plan = RunPlan(0.1, 0.1, 3.0, 100, 1, "sampled", 0)
    res = run_experiment(o, plan)
    assert res.f_hat == 0.09
    assert int(res.outcomes.sum()) == 9
    assert res.exact_p == pytest.approx(26937 / 262144, abs=1e-13)
    assert res.outcomes.shape == (100,)
    assert res.outcomes.dtype == bool


def test_sampled_experiment_deterministic_and_seed_sensitive():
    o = head_oracle(8, 144)
    plan = RunPlan(0.1, 0.1, 3.0, 500, 1, "sampled", 7)
    a = run_experiment(o, plan)
    b = run_experiment(o, plan)
    assert a.f_hat == b.f_hat
    assert a.outcomes.tolist() == b.outcomes.tolist()
    c = run_experiment(o, RunPlan(0.1, 0.1, 3.0, 500, 1, "sampled", 8))
    assert c.outcomes.tolist() != a.outcomes.tolist()


def test_resampling_every_draw_changes_nothing():
    o = head_oracle(6, 36)
    base = RunPlan(0.1, 0.1, 3.0, 64, 2, "sampled", 11)
    slow = RunPlan(0.1, 0.1, 3.0, 64, 2, "sampled", 11, resimulate=True)
    a = run_experiment(o, base)
    b = run_experiment(o, slow)
    assert a.f_hat == b.f_hat
    assert a.outcomes.tolist() == b.outcomes.tolist()


def test_sampled_fraction_concentrates_near_exact():
    o = head_oracle(10, 576)
    plan = RunPlan(0.1, 0.01, 5.0, 10000, 1, "sampled", 3)
    res = run_experiment(o, plan)
    assert abs(res.f_hat - res.exact_p) <= 5.0 * math.sqrt(1.0 / 10000)


def test_experiment_preserves_conserved_pair_quantity():
    o = head_oracle(10, 576)
    root_n = math.sqrt(1 << 10)
    state = prepare(o)
    for _ in range(50):
        amplification_loop(state, o, 1)
        k = complex(state.amps[0]) * root_n
        l = complex(state.amps[-1]) * root_n
        c = (1 + o.eps) * abs(k) ** 2 + (1 - o.eps) * abs(l) ** 2
        assert abs(c - 2.0) < 1e-12
        assert abs(state.norm_sq() - 1.0) < 1e-12


def test_below_probability_after_loop_matches_formula_negative_side():
    o = head_oracle(10, 448)  # eps = -0.125
    assert o.eps == -0.125
    state = amplification_loop(prepare(o), o, 3)
    p = probability_of(state, o.below_mask)
    assert abs(p - predicted_fraction(-0.125, 3)) < 1e-12


def test_run_experiment_with_real_dataset_oracle():
    d = dataset_from_values(np.arange(1024.0))
    o = make_oracle(d, 575.5)
    plan = RunPlan(0.1, 0.1, 3.0, 100, 1, "exact", 0)
    assert run_experiment(o, plan).exact_p == pytest.approx(
        26937 / 262144, abs=1e-13)
