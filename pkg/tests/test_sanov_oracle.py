import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import screened_mc as sm
from screened_mc.sanov_oracle import _project_constrained_simplex, _project_simplex


def four_atom():
    model = sm.finite_support([1.0, 2.0, 3.0, 4.0], [0.25] * 4)
    pair = sm.tabulated_pair(
        model, [-1.0, 0.0, 0.0, 1.0], [-1.0, -1.0, 1.0, 1.0]
    )
    return model, pair


# ---------------------------------------------------------------------------
# relative entropy
# ---------------------------------------------------------------------------


def test_relative_entropy_basics():
    assert sm.relative_entropy([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert sm.relative_entropy([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0))
    assert sm.relative_entropy([0.5, 0.5], [1.0, 0.0]) == math.inf
    with pytest.raises(sm.InputError):
        sm.relative_entropy([0.5, 0.5], [1.0])


@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=100, deadline=None)
def test_relative_entropy_nonnegative(m, seed):
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(m))
    p = rng.dirichlet(np.ones(m))
    p = np.maximum(p, 1e-9)
    p /= p.sum()
    assert sm.relative_entropy(q, p) >= -1e-12


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


def test_simplex_projection_known_points():
    assert np.allclose(_project_simplex(np.array([2.0, 0.0])), [1.0, 0.0])
    assert np.allclose(_project_simplex(np.array([0.6, 0.6])), [0.5, 0.5])
    z = _project_simplex(np.array([-1.0, 0.2, 0.4]))
    assert z.min() >= 0.0 and z.sum() == pytest.approx(1.0)


def test_constrained_projection_feasible_and_optimal():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = 6
        v = rng.normal(size=m)
        a = rng.normal(size=m)
        b = float(rng.uniform(0.0, 0.3))
        z = _project_constrained_simplex(v, [(a, b)])
        assert z.sum() == pytest.approx(1.0, abs=1e-9)
        assert float(a @ z) <= b + 1e-9
        assert z.min() >= -1e-10
        # optimality: no feasible random perturbation is closer to v
        for _ in range(50):
            d = rng.normal(size=m) * 1e-3
            cand = z + d - d.mean()  # stay on the affine hull
            if cand.min() < 0 or float(a @ cand) > b:
                continue
            assert np.sum((z - v) ** 2) <= np.sum((cand - v) ** 2) + 1e-12


# ---------------------------------------------------------------------------
# the oracle
# ---------------------------------------------------------------------------


def test_sanov_inactive_constraints_give_p():
    model, pair = four_atom()
    res = sm.sanov_rate(model, pair, -0.5, 10.0)
    assert res.feasible
    assert res.entropy == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(res.q_star, model.probs, atol=1e-8)


def test_sanov_infeasible_two_point():
    model = sm.finite_support([-1.0, 1.0], [0.5, 0.5])
    pair = sm.tabulated_pair(model, [-1.0, 1.0], [-1.0, 1.0])
    res = sm.sanov_rate(model, pair, 0.2, 0.1)
    assert not res.feasible
    assert res.entropy == math.inf
    assert res.fenchel_value == math.inf


def test_sanov_matches_fenchel_on_four_atom():
    model, pair = four_atom()
    res = sm.sanov_rate(model, pair, 0.1, 0.05)
    assert res.feasible
    assert res.gap <= 1e-4
    assert abs(res.primal_entropy - res.dual_entropy) <= 1e-6
    # the minimizer satisfies the moment constraints
    f = np.asarray(pair.f(model.atoms))
    uv = np.asarray(pair.u(model.atoms))
    assert float(f @ res.q_star) >= pair.mu + 0.1 - 1e-8
    assert float(uv @ res.q_star) <= pair.nu + 0.05 + 1e-8
    assert res.q_star.sum() == pytest.approx(1.0, abs=1e-10)


def test_sanov_two_sided_constraint():
    model, pair = four_atom()
    one = sm.sanov_rate(model, pair, 0.1, 0.05, sidedness="one_sided")
    two = sm.sanov_rate(model, pair, 0.1, 0.05, sidedness="two_sided")
    # the two-sided set is smaller, so its entropy can only be larger
    assert two.entropy >= one.entropy - 1e-10


def test_sanov_support_cap():
    atoms = np.arange(65, dtype=float)
    probs = np.ones(65) / 65.0
    model = sm.finite_support(atoms, probs)
    pair = sm.tabulated_pair(model, atoms, atoms)
    with pytest.raises(sm.CapabilityError):
        sm.sanov_rate(model, pair, 0.1, 0.1)
    model_p, pair_p = sm.heavy_tail_pair()
    with pytest.raises(sm.CapabilityError):
        sm.sanov_rate(model_p, pair_p, 0.1, 0.1)


def test_duality_suite_agreement():
    suite = sm.duality_suite(count=25, seed=77)
    assert len(suite) == 25
    for res in suite:
        assert res.feasible
        assert res.gap <= 1e-4
        assert abs(res.primal_entropy - res.dual_entropy) <= 1e-6


def test_sanov_bound_validates_against_simulation():
    # the entropy is a certified per-sample exponent: the screened error
    # frequency at horizon n can exceed e^{-n H} only by sampling noise
    model, pair = four_atom()
    eps, u_thr, n, trials = 0.1, 0.05, 200, 100_000
    res = sm.sanov_rate(model, pair, eps, u_thr)
    bound = math.exp(-n * res.entropy)
    hits = 0
    from screened_mc.streams import SubstreamSampler
    from screened_mc.dist_models import transform_uniforms

    sampler = SubstreamSampler(12345)
    f, uo = pair.f, pair.u
    for t in range(trials):
        p = sampler.uniforms(t, n)
        x = transform_uniforms(model, p)
        s_hat = float(np.asarray(f(x)).sum()) / n
        t_hat = float(np.asarray(uo(x)).sum()) / n
        if s_hat - pair.mu > eps and t_hat - pair.nu < u_thr:
            hits += 1
    p_hat = hits / trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    assert p_hat <= bound + 3.0 * se


def test_heavy_tail_truncation_trend():
    # finite truncations of the heavy-tailed law: the plain excess-mean
    # rate sinks toward zero as the support grows, while the screened
    # rate stays bounded away from zero
    plain = []
    screened = []
    for x_max in (10.0, 100.0, 1000.0):
        grid = np.geomspace(1.0, x_max, 24)
        cdf = 1.0 - grid**-2.5
        probs = np.diff(np.concatenate([[0.0], cdf]))
        probs = np.maximum(probs, 1e-12)
        probs = probs / probs.sum()
        model = sm.finite_support(grid, probs)
        pair = sm.tabulated_pair(model, grid**0.75, grid)
        eps = 0.03
        plain.append(sm.sanov_rate(model, pair, eps, math.inf).entropy)
        screened.append(sm.sanov_rate(model, pair, eps, 0.05).entropy)
    # the unconstrained rate sinks toward zero with the support size
    assert plain[0] > plain[1] > plain[2]
    # ... while the screened rate stays pinned near its positive limit
    assert all(math.isfinite(s) for s in screened)
    assert min(screened) > 0.8 * max(screened)
    assert min(screened) > 1e-3
    # so screening's relative advantage grows without bound
    ratios = [s / p for s, p in zip(screened, plain)]
    assert ratios[0] < ratios[1] < ratios[2]
