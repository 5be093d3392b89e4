import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import screened_mc as sm
from screened_mc.dist_models import Identity, Power, log_mgf_signed, transform_uniforms


def test_pareto_quantile_endpoints():
    model = sm.pareto_like()
    assert model.quantile(0.0) == 1.0
    # solve 1 - x^{-5/2} = 1/2 analytically
    assert model.quantile(0.5) == pytest.approx(2.0**0.4, rel=1e-15)


def test_pareto_sample_mean_matches_known_mean():
    model, pair = sm.heavy_tail_pair()
    xs = sm.sample(model, sm.RandomStream(123).substream(0), 10**6)
    tol = 3.0 * math.sqrt((20.0 / 9.0) / 10**6)
    assert abs(xs.mean() - 5.0 / 3.0) <= tol


def test_pareto_empirical_cdf_sup_distance():
    model = sm.pareto_like()
    xs = np.sort(sm.sample(model, sm.RandomStream(5).substream(0), 10**6))
    n = len(xs)
    cdf = 1.0 - xs**-2.5
    upper = np.abs(np.arange(1, n + 1) / n - cdf).max()
    lower = np.abs(np.arange(0, n) / n - cdf).max()
    assert max(upper, lower) <= 0.002


def test_sampling_is_bit_reproducible():
    model = sm.pareto_like()
    a = sm.sample(model, sm.RandomStream(77).substream(3), 1000)
    b = sm.sample(model, sm.RandomStream(77).substream(3), 1000)
    c = sm.sample(model, sm.RandomStream(77).substream(4), 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_finite_support_sampling_frequencies():
    model = sm.finite_support([1.0, 2.0, 5.0], [0.2, 0.3, 0.5])
    xs = sm.sample(model, sm.RandomStream(9).substream(0), 200_000)
    freq = {v: float(np.mean(xs == v)) for v in (1.0, 2.0, 5.0)}
    assert freq[1.0] == pytest.approx(0.2, abs=0.01)
    assert freq[2.0] == pytest.approx(0.3, abs=0.01)
    assert freq[5.0] == pytest.approx(0.5, abs=0.01)


def test_invalid_pmf_rejected():
    with pytest.raises(sm.ConfigError):
        sm.finite_support([1.0, 2.0], [0.6, 0.6])
    with pytest.raises(sm.ConfigError):
        sm.finite_support([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(sm.ConfigError):
        sm.sign_product([0.0, 1.0], [0.5, 0.5])


def test_heavy_tail_pair_exact_moments():
    model, pair = sm.heavy_tail_pair()
    mu, nu, var_f, var_u, gamma = sm.exact_moments(model, pair)
    assert mu == pytest.approx(10.0 / 7.0, rel=1e-12)
    assert nu == pytest.approx(5.0 / 3.0, rel=1e-12)
    assert var_u == pytest.approx(20.0 / 9.0, rel=1e-12)
    assert gamma == pytest.approx(20.0 / 21.0, rel=1e-12)
    assert var_f == pytest.approx(45.0 / 98.0, rel=1e-12)
    # the declared statistics carry the same values
    assert (pair.mu, pair.nu) == (mu, nu)


def test_two_point_moments():
    model = sm.finite_support([-1.0, 1.0], [0.5, 0.5])
    pair = sm.tabulated_pair(model, [-1.0, 1.0], [-1.0, 1.0])
    mu, nu, var_f, var_u, gamma = sm.exact_moments(model, pair)
    assert (mu, nu) == (0.0, 0.0)
    assert var_f == var_u == 1.0
    assert gamma == 1.0


def test_divergent_moment_is_named():
    model = sm.pareto_like()
    with pytest.raises(sm.DivergenceError, match="E\\[F\\^2\\]"):
        sm.pair_from_callables(model, Power(1.3), Identity())


def test_log_mgf_trivial_and_divergent():
    model, pair = sm.heavy_tail_pair()
    assert sm.log_mgf_joint(model, pair, 0.0, 0.0) == 0.0
    assert sm.log_mgf_joint(model, pair, 0.1, 0.0) == math.inf
    with pytest.raises(sm.DomainError):
        sm.log_mgf_joint(model, pair, -0.1, 0.5)


def test_log_mgf_two_point_closed_form():
    model = sm.finite_support([-1.0, 1.0], [0.5, 0.5])
    pair = sm.tabulated_pair(model, [-1.0, 1.0], [0.0, 0.0])
    got = sm.log_mgf_joint(model, pair, 1.0, 0.0)
    assert got == pytest.approx(math.log(math.cosh(1.0)), rel=1e-12)
    assert sm.log_mgf_joint(model, pair, 0.0, 5.0) == 0.0


@pytest.mark.parametrize("theta", [(0.3, 0.5), (1.0, 1.0), (0.0, 2.0), (1.5, 0.7)])
def test_log_mgf_quadrature_vs_monte_carlo(theta):
    model, pair = sm.heavy_tail_pair()
    t1, t2 = theta
    xs = sm.sample(model, sm.RandomStream(31).substream(0), 10**6)
    vals = np.exp(t1 * xs**0.75 - t2 * xs)
    est = vals.mean()
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    got = sm.log_mgf_joint(model, pair, t1, t2)
    assert abs(got - math.log(est)) <= 3.0 * se / est


@pytest.mark.parametrize(
    "a,b",
    [((0.2, 0.3), (1.0, 1.5)), ((0.0, 0.5), (2.0, 0.5)), ((0.5, 2.0), (1.5, 4.0))],
)
def test_log_mgf_midpoint_convexity_pareto(a, b):
    model, pair = sm.heavy_tail_pair()
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    fa = sm.log_mgf_joint(model, pair, *a)
    fb = sm.log_mgf_joint(model, pair, *b)
    fm = sm.log_mgf_joint(model, pair, *mid)
    assert fm <= (fa + fb) / 2 + 1e-9


def test_log_mgf_midpoint_convexity_finite():
    model = sm.finite_support([1.0, 2.0, 3.0], [0.2, 0.3, 0.5])
    pair = sm.tabulated_pair(model, [0.4, -1.0, 2.0], [1.0, 0.0, -1.0])
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.uniform(0, 3, size=2)
        b = rng.uniform(0, 3, size=2)
        fa = sm.log_mgf_joint(model, pair, *a)
        fb = sm.log_mgf_joint(model, pair, *b)
        fm = sm.log_mgf_joint(model, pair, *((a + b) / 2))
        assert fm <= (fa + fb) / 2 + 1e-9


def test_log_mgf_zero_at_origin_every_kind():
    cases = [
        sm.heavy_tail_pair(),
        (
            sm.finite_support([1.0, 4.0], [0.5, 0.5]),
            sm.tabulated_pair(sm.finite_support([1.0, 4.0], [0.5, 0.5]), [1.0, -1.0], [0.0, 2.0]),
        ),
        sm.counterexample_pair([1.0, 2.0], [0.5, 0.5]),
    ]
    for model, pair in cases:
        assert sm.log_mgf_joint(model, pair, 0.0, 0.0) == 0.0


def test_sign_product_expands_to_signed_atoms():
    model, pair = sm.counterexample_pair([1.0, 2.0], [0.25, 0.75])
    assert sorted(model.atoms.tolist()) == [-2.0, -1.0, 1.0, 2.0]
    xs = sm.sample(model, sm.RandomStream(3).substream(1), 100_000)
    assert abs(np.mean(np.sign(xs))) < 0.02
    # F(X) = |X| - E|X| and U(X) = sign(X) are uncorrelated
    assert pair.gamma == pytest.approx(0.0, abs=1e-15)


def test_gamma_invariant_enforced_for_exact_flag():
    model = sm.finite_support([-1.0, 1.0], [0.5, 0.5])
    with pytest.raises(sm.ConfigError):
        sm.ObservablePair(
            f=lambda x: x, u=lambda x: x, mu=0.0, nu=0.0,
            var_f=1.0, var_u=1.0, gamma=1.5, gamma_flag="exact",
        )
    # bound-flagged surrogates are exempt from the Cauchy-Schwarz check
    sm.ObservablePair(
        f=lambda x: x, u=lambda x: x, mu=0.0, nu=0.0,
        var_f=1.0, var_u=1.0, gamma=-1.5, gamma_flag="upper_bound",
    )
    del model


def test_substream_sampler_bit_compatible():
    from screened_mc.streams import SubstreamSampler

    sampler = SubstreamSampler(31415)
    for t in (0, 1, 5, 123456):
        direct = sm.RandomStream(31415).substream(t).uniform(64)
        assert np.array_equal(sampler.uniforms(t, 64), direct)


@given(st.lists(st.floats(min_value=1e-6, max_value=1 - 1e-6), min_size=1, max_size=64))
@settings(max_examples=100, deadline=None)
def test_transform_uniforms_stays_on_support(ps):
    model = sm.pareto_like()
    xs = transform_uniforms(model, np.array(ps))
    assert np.all(xs >= 1.0)


def test_log_mgf_signed_divergence_rules():
    model, pair = sm.heavy_tail_pair()
    assert log_mgf_signed(model, pair, 0.5, 0.1) == math.inf  # e^{bU} with b>0
    assert log_mgf_signed(model, pair, -1.0, 0.0) < 0.0  # bounded above by 0
    assert log_mgf_signed(model, pair, -0.5, -0.5) < 0.0
