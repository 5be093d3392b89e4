import math

import pytest

import screened_mc as sm


def two_point():
    model = sm.finite_support([-1.0, 1.0], [0.5, 0.5])
    pair = sm.tabulated_pair(model, [-1.0, 1.0], [-1.0, 1.0])
    return model, pair


def four_atom_correlated():
    r2 = math.sqrt(2.0)
    model = sm.finite_support([1.0, 2.0, 3.0, 4.0], [0.25] * 4)
    pair = sm.tabulated_pair(model, [-r2, 0.0, 0.0, r2], [-1.0, -1.0, 1.0, 1.0])
    return model, pair


# ---------------------------------------------------------------------------
# the shared maximizer
# ---------------------------------------------------------------------------


def test_legendre_sup_gaussian_rate():
    eps = 0.7
    value, arg = sm.legendre_sup(lambda t: float(t[0]) * eps - float(t[0]) ** 2 / 2.0, dim=1)
    assert value == pytest.approx(eps**2 / 2.0, rel=1e-9)
    assert float(arg[0]) == pytest.approx(eps, abs=1e-5)


def test_legendre_sup_constant_zero():
    value, _ = sm.legendre_sup(lambda t: 0.0, dim=1)
    assert value == 0.0


def test_legendre_sup_binary_rate():
    value, _ = sm.legendre_sup(
        lambda t: float(t[0]) * 0.5 - math.log(math.cosh(float(t[0]))), dim=1
    )
    assert value == pytest.approx(sm.binary_kl(0.75, 0.5), rel=1e-9)


def test_legendre_sup_nan_objective_raises():
    with pytest.raises(sm.NumericError):
        sm.legendre_sup(lambda t: math.nan, dim=1)


# ---------------------------------------------------------------------------
# plain Chernoff rate
# ---------------------------------------------------------------------------


def test_lambda_star_two_point():
    model, pair = two_point()
    assert sm.rate_lambda_star(model, pair, 0.5) == pytest.approx(
        sm.binary_kl(0.75, 0.5), rel=1e-8
    )
    assert sm.rate_lambda_star(model, pair, 0.0) == 0.0


def test_lambda_star_heavy_tail_is_zero():
    model, pair = sm.heavy_tail_pair()
    assert sm.rate_lambda_star(model, pair, 0.5) == 0.0


# ---------------------------------------------------------------------------
# screened rates
# ---------------------------------------------------------------------------


def test_lambda_plus_inactive_constraint_matches_lambda_star():
    model, pair = two_point()
    lam_star = sm.rate_lambda_star(model, pair, 0.2)
    # u > eps keeps the event feasible; u >= spread makes it inactive
    assert sm.rate_plus_star(model, pair, 0.2, 0.3) == pytest.approx(lam_star, rel=1e-8)
    assert sm.rate_plus_star(model, pair, 0.2, 5.0) == pytest.approx(lam_star, rel=1e-8)


def test_lambda_plus_infeasible_certified_infinite():
    model, pair = two_point()
    assert sm.rate_plus_star(model, pair, 0.2, 0.1) == math.inf


def test_independent_factorization():
    model, pair = sm.counterexample_pair([1.0, 2.0], [0.5, 0.5])
    for eps in (0.05, 0.15, 0.25):
        lam_star = sm.rate_lambda_star(model, pair, eps)
        lam_plus = sm.rate_plus_star(model, pair, eps, 0.05)
        assert lam_plus == pytest.approx(lam_star, abs=1e-9)


def test_heavy_tail_pair_rate_positive_finite_in_feasible_window():
    model, pair = sm.heavy_tail_pair()
    # the event is feasible only while epsilon < (nu + u)^{3/4} - mu
    value = sm.rate_plus_star(model, pair, 0.03, 0.005)
    assert 0.0 < value < math.inf
    norm = sm.normalize_observables(pair, var_f_bound=4.0, mu_lower=1.0)
    eps_n, u_n = norm.map_thresholds(0.03, 0.005)
    rep = sm.bound_thm31_ii(norm, eps_n, u_n)
    assert rep.exponent <= value + 1e-9


def test_heavy_tail_pair_rate_infinite_beyond_concavity_threshold():
    # averaging cannot raise the mean of x^{3/4} above the 3/4 power of
    # the mean of x, so the screened error event is empty at the
    # worked example's thresholds and the rate is +inf
    model, pair = sm.heavy_tail_pair()
    threshold = (5.0 / 3.0 + 0.005) ** 0.75 - 10.0 / 7.0
    assert threshold == pytest.approx(0.0416, abs=1e-3)
    assert sm.rate_plus_star(model, pair, 0.1, 0.005) == math.inf
    assert sm.rate_plus_star(model, pair, 0.1, 0.005) > 0.0


def test_variant_capability_errors():
    model, pair = sm.heavy_tail_pair()
    with pytest.raises(sm.CapabilityError, match="sum_margin"):
        sm.rate_plus_star(model, pair, 0.05, 0.01, "gamma_plus")
    with pytest.raises(sm.CapabilityError):
        sm.rate_plus_star(model, pair, 0.05, 0.01, "no_such_variant")


def test_rate_monotonicity_on_grids():
    model, pair = four_atom_correlated()
    eps_grid = (0.02, 0.05, 0.1, 0.2)
    vals = [sm.rate_plus_star(model, pair, e, 0.05) for e in eps_grid]
    assert all(a <= b + 1e-10 for a, b in zip(vals, vals[1:]))
    u_grid = (0.01, 0.05, 0.2, 1.0)
    vals_u = [sm.rate_plus_star(model, pair, 0.1, u) for u in u_grid]
    assert all(a >= b - 1e-10 for a, b in zip(vals_u, vals_u[1:]))
    assert all(v >= 0.0 for v in vals + vals_u)


# ---------------------------------------------------------------------------
# two-sided combination
# ---------------------------------------------------------------------------


def test_two_sided_symmetric_model():
    model, pair = sm.counterexample_pair([1.0, 2.0], [0.5, 0.5])
    lam_plus = sm.rate_plus_star(model, pair, 0.1, 0.05, "lambda_plus")
    lam_minus = sm.rate_plus_star(model, pair, 0.1, 0.05, "lambda_minus")
    assert lam_minus == pytest.approx(lam_plus, rel=1e-8)
    got = sm.two_sided_bound(model, pair, 0.1, 0.05, 100)
    assert got == pytest.approx(2.0 * math.exp(-100 * lam_plus), rel=1e-7)


def test_two_sided_vacuous_at_n_zero():
    model, pair = two_point()
    assert sm.two_sided_bound(model, pair, 0.5, 2.0, 0) == 2.0


def test_two_sided_two_point_large_u():
    model, pair = two_point()
    rate = sm.binary_kl(0.75, 0.5)
    got = sm.two_sided_bound(model, pair, 0.5, 2.0, 50)
    assert got == pytest.approx(2.0 * math.exp(-50 * rate), rel=1e-6)


# ---------------------------------------------------------------------------
# the exponent gap
# ---------------------------------------------------------------------------


def test_delta_zero_at_independence_grid():
    model, pair = sm.counterexample_pair([1.0, 2.0], [0.5, 0.5])
    grid = [(e, u) for e in (0.05, 0.1, 0.15, 0.2, 0.25) for u in (0.02, 0.1)]
    assert len(grid) == 10
    for eps, u in grid:
        point = sm.delta_exponent(model, pair, eps, u)
        assert abs(point.delta) <= 1e-6


def test_delta_positive_with_correlation():
    model, pair = four_atom_correlated()
    g = pair.gamma
    assert g == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-12)
    for eps in (0.02, 0.05, 0.1):
        point = sm.delta_exponent(model, pair, eps, abs(g) * eps / 4.0)
        assert point.delta >= g * g * eps * eps / 8.0


def test_delta_vanishes_for_large_u():
    model, pair = four_atom_correlated()
    point = sm.delta_exponent(model, pair, 0.1, 50.0)
    assert point.delta == 0.0
    assert point.lambda_plus_star == pytest.approx(point.lambda_star, abs=1e-9)


def test_delta_requires_light_tails():
    model, pair = sm.heavy_tail_pair()
    with pytest.raises(sm.CapabilityError):
        sm.delta_exponent(model, pair, 0.1, 0.05)


def test_rate_point_contents():
    model, pair = four_atom_correlated()
    point = sm.delta_exponent(model, pair, 0.1, 0.05)
    assert point.epsilon == 0.1 and point.u == 0.05
    assert point.delta >= 0.0
    assert point.lambda_plus_star >= point.lambda_star - 1e-10
    assert point.theta_star is not None and len(point.theta_star) == 2
    doc = point.to_dict()
    assert set(doc) == {
        "epsilon", "u", "lambda_star", "lambda_plus_star",
        "gamma_plus_star", "delta", "theta_star",
    }
