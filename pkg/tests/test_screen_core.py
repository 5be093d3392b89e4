import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import screened_mc as sm
from screened_mc.screen_core import StreamState


def test_update_stream_single_and_double():
    s1 = sm.update_stream(StreamState(), 3.0, 5.0)
    assert (s1.k, s1.s_hat, s1.t_hat) == (1, 3.0, 5.0)
    s2 = sm.update_stream(s1, 1.0, 1.0)
    assert (s2.k, s2.s_hat, s2.t_hat) == (2, 2.0, 3.0)


def test_running_mean_matches_batch_recomputation():
    rng = np.random.default_rng(42)
    f = (1.0 - rng.random(10_000)) ** -0.3  # heavy-tailed magnitudes
    u = (1.0 - rng.random(10_000)) ** -0.4
    state = StreamState()
    for fv, uv in zip(f, u):
        state = sm.update_stream(state, float(fv), float(uv))
    assert state.s_hat == pytest.approx(float(np.mean(f)), rel=1e-12)
    assert state.t_hat == pytest.approx(float(np.mean(u)), rel=1e-12)


@given(
    st.lists(
        st.tuples(
            st.floats(min_value=-1e6, max_value=1e6),
            st.floats(min_value=-1e6, max_value=1e6),
        ),
        min_size=1,
        max_size=200,
    )
)
@settings(max_examples=150, deadline=None)
def test_running_mean_property(pairs):
    state = StreamState()
    for fv, uv in pairs:
        state = sm.update_stream(state, fv, uv)
    f = np.array([p[0] for p in pairs])
    scale = 1.0 + abs(float(np.mean(f)))
    assert abs(state.s_hat - float(np.mean(f))) <= 1e-9 * scale
    assert state.k == len(pairs)


def test_screen_decision_arithmetic():
    nu, u = 5.0 / 3.0, 0.005
    near = StreamState(k=10, s_hat=0.0, t_hat=1.668)
    far = StreamState(k=10, s_hat=0.0, t_hat=1.675)
    assert sm.screen_decision(near, nu, u, "two_sided") is True
    assert sm.screen_decision(far, nu, u, "two_sided") is False


def test_screen_decision_strict_boundary():
    nu, u = 1.0, 0.25
    boundary = StreamState(k=3, s_hat=0.0, t_hat=nu + u)
    assert sm.screen_decision(boundary, nu, u, "two_sided") is False
    assert sm.screen_decision(boundary, nu, u, "one_sided") is False


def test_screen_decision_empty_stream():
    with pytest.raises(sm.EmptyStreamError):
        sm.screen_decision(StreamState(), 0.0, 1.0)


def test_one_sided_allows_low_side():
    low = StreamState(k=2, s_hat=0.0, t_hat=-100.0)
    assert sm.screen_decision(low, 0.0, 0.1, "one_sided") is True
    assert sm.screen_decision(low, 0.0, 0.1, "two_sided") is False


def test_control_variate_identity_and_centering():
    assert sm.control_variate_estimate([1.0, 3.0], [9.0, 9.0], 0.0, 0.0) == 2.0
    got = sm.control_variate_estimate([1.0, 1.0, 1.0], [2.0, 4.0, 6.0], 1.0, 4.0)
    assert got == 1.0
    with pytest.raises(sm.InputError):
        sm.control_variate_estimate([], [], 0.5, 0.0)
    with pytest.raises(sm.InputError):
        sm.control_variate_estimate([1.0], [1.0, 2.0], 0.5, 0.0)


def test_control_variate_reduces_variance_at_optimal_beta():
    model, pair = sm.heavy_tail_pair()
    xs = sm.sample(model, sm.RandomStream(2718).substream(0), 100_000)
    f = xs**0.75
    u = xs
    beta_star = (20.0 / 21.0) / (20.0 / 9.0)  # Cov / Var(U) = 3/7
    assert beta_star == pytest.approx(3.0 / 7.0, rel=1e-12)
    corrected = f - beta_star * (u - pair.nu)
    assert float(np.var(corrected)) < float(np.var(f))


def test_control_variate_is_unbiased():
    model, pair = sm.heavy_tail_pair()
    n, trials = 100, 10_000
    root = sm.RandomStream(1009)
    ests = np.empty(trials)
    for t in range(trials):
        xs = sm.sample(model, root.substream(t), n)
        ests[t] = sm.control_variate_estimate(xs**0.75, xs, 3.0 / 7.0, pair.nu)
    se = ests.std(ddof=1) / math.sqrt(trials)
    assert abs(ests.mean() - pair.mu) <= 4.0 * se


def test_run_trajectory_single_step():
    model, pair = sm.heavy_tail_pair()
    cfg = sm.ScreenConfig(epsilon=0.1, u=0.5, n=1)
    stream = sm.RandomStream(55).substream(0)
    recs = sm.run_trajectory(model, pair, cfg, stream)
    x = sm.sample(model, sm.RandomStream(55).substream(0), 1)
    assert len(recs) == 1
    assert recs[0].k == 1
    assert recs[0].s_hat == pytest.approx(float(x[0] ** 0.75), rel=1e-15)


def test_trajectory_screened_set_is_consistent():
    model, pair = sm.heavy_tail_pair()
    cfg = sm.ScreenConfig(epsilon=0.2, u=0.005, n=2000)
    recs = sm.run_trajectory(model, pair, cfg, sm.RandomStream(99).substream(0))
    for rec in recs:
        state = StreamState(k=rec.k, s_hat=rec.s_hat, t_hat=rec.t_hat)
        assert rec.screened == sm.screen_decision(state, pair.nu, cfg.u, cfg.sidedness)


def test_trajectory_screened_times_are_strict_subset_with_late_mass():
    model, pair = sm.heavy_tail_pair()
    cfg = sm.ScreenConfig(epsilon=0.2, u=0.005, n=5000)
    recs = sm.run_trajectory(model, pair, cfg, sm.RandomStream(2026).substream(0))
    screened = [r.k for r in recs if r.screened]
    assert 0 < len(screened) < cfg.n
    assert sum(k > cfg.n // 2 for k in screened) > 0


def test_final_means_permutation_invariant():
    rng = np.random.default_rng(7)
    f = (1.0 - rng.random(500)) ** -0.3
    u = (1.0 - rng.random(500)) ** -0.4
    state = StreamState()
    for fv, uv in zip(f, u):
        state = sm.update_stream(state, float(fv), float(uv))
    perm = rng.permutation(500)
    state_p = StreamState()
    for fv, uv in zip(f[perm], u[perm]):
        state_p = sm.update_stream(state_p, float(fv), float(uv))
    assert state_p.s_hat == pytest.approx(state.s_hat, rel=1e-12)
    assert state_p.t_hat == pytest.approx(state.t_hat, rel=1e-12)


def test_event_inclusion_per_trial():
    model, pair = sm.heavy_tail_pair()
    cfg = sm.ScreenConfig(epsilon=0.3, u=0.05, n=50)
    screened_err = unscreened_err = 0
    for t in range(500):
        recs = sm.run_trajectory(model, pair, cfg, sm.RandomStream(8).substream(t))
        last = recs[-1]
        err = last.s_hat - pair.mu > cfg.epsilon
        unscreened_err += err
        screened_err += err and last.screened
        assert not (err and last.screened) or err  # the screened error implies the error
    assert screened_err <= unscreened_err


def test_screen_config_validation():
    with pytest.raises(sm.ConfigError):
        sm.ScreenConfig(epsilon=0.0, u=0.1, n=10)
    with pytest.raises(sm.ConfigError):
        sm.ScreenConfig(epsilon=0.1, u=-1.0, n=10)
    with pytest.raises(sm.ConfigError):
        sm.ScreenConfig(epsilon=0.1, u=0.1, n=0)
    with pytest.raises(sm.ConfigError):
        sm.ScreenConfig(epsilon=0.1, u=0.1, n=10, sidedness="diagonal")
