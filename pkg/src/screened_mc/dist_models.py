"""Distribution models and observable pairs.

A :class:`DistributionModel` is a law P on the reals that supports exact
sampling, an exact (or quadrature) moment oracle, and a joint log-MGF
oracle.  Three kinds are provided:

``pareto_like``
    The fixed heavy-tailed density f(x) = 5 / (2 x^{7/2}) on [1, inf),
    with CDF F(x) = 1 - x^{-5/2} and quantile x = (1 - p)^{-2/5}.  Every
    positive exponential moment is infinite.

``finite_support``
    Atoms x_j with probabilities p_j (p_j > 0, sum p_j = 1).

``sign_product``
    A finite-support magnitude law times an independent +/-1 sign,
    stored internally as the expanded signed-atom law.

An :class:`ObservablePair` bundles the two observables F (the quantity
whose mean is estimated) and U (the screening function with known mean)
together with their known statistics and margin oracles.  The margin
``m(beta)`` is an upper bound on ess sup[F(X) - beta U(X)]; its
finiteness for every beta > 0 is what makes screened errors
exponentially rare even when F(X) is heavy-tailed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    CapabilityError,
    ConfigError,
    DivergenceError,
    DomainError,
    InputError,
    NumericError,
)
from .streams import RandomStream

KIND_PARETO = "pareto_like"
KIND_FINITE = "finite_support"
KIND_SIGN = "sign_product"

_PMF_TOL = 1e-12


# ---------------------------------------------------------------------------
# observable forms (picklable callables; carry enough metadata for
# closed-form moments and for the experiment-config surface)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Power:
    """x -> x**exponent."""

    exponent: float

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.exponent


@dataclass(frozen=True)
class Identity:
    def __call__(self, x):
        return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Standardized:
    """x -> (inner(x) - shift) / scale."""

    inner: Callable
    shift: float
    scale: float

    def __call__(self, x):
        return (self.inner(x) - self.shift) / self.scale


@dataclass(frozen=True)
class AbsCentered:
    """x -> |x| - center."""

    center: float

    def __call__(self, x):
        return np.abs(np.asarray(x, dtype=float)) - self.center


@dataclass(frozen=True)
class SignOf:
    def __call__(self, x):
        return np.sign(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Table:
    """Exact lookup on a finite support; rejects off-support points."""

    atoms: tuple
    values: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        atoms = np.asarray(self.atoms)
        values = np.asarray(self.values, dtype=float)
        order = np.argsort(atoms)
        idx = np.searchsorted(atoms[order], x)
        idx = np.clip(idx, 0, len(atoms) - 1)
        if not np.all(atoms[order][idx] == x):
            raise InputError("table form evaluated off the model support")
        return values[order][idx]


def canonical_power(form) -> tuple[float, float, float] | None:
    """Decompose a form as alpha * x**a + delta, if possible."""
    if isinstance(form, Identity):
        return (1.0, 1.0, 0.0)
    if isinstance(form, Power):
        return (1.0, form.exponent, 0.0)
    if isinstance(form, Standardized):
        inner = canonical_power(form.inner)
        if inner is None:
            return None
        alpha, a, delta = inner
        return (alpha / form.scale, a, (delta - form.shift) / form.scale)
    return None


# ---------------------------------------------------------------------------
# margin oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarginOracle:
    """beta -> bound on an essential extremum of F -/+ beta*U.

    ``fn`` must return a finite value for every beta in the open domain
    (beta_min, beta_max]; ``exact`` records whether the value is the
    essential extremum itself or only a one-sided bound.
    """

    fn: Callable[[float], float]
    beta_min: float = 0.0
    beta_max: float = math.inf
    exact: bool = True

    def __call__(self, beta: float) -> float:
        if not (self.beta_min < beta <= self.beta_max):
            raise DomainError(
                f"margin argument beta={beta} outside domain "
                f"({self.beta_min}, {self.beta_max}]"
            )
        return float(self.fn(beta))


@dataclass(frozen=True)
class ParetoPowerMargin:
    """sup over x >= 1 of x**(3/4) - b*x, in closed form.

    The stationary point x* = (3/(4b))**4 lies inside the support only
    for b <= 3/4; beyond that the maximum sits at x = 1.
    """

    def __call__(self, b: float) -> float:
        if b <= 0.75:
            return 0.25 * (3.0 / (4.0 * b)) ** 3
        return 1.0 - b


@dataclass(frozen=True)
class ParetoSumInf:
    """inf over x >= 1 of x**(3/4) + b*x = 1 + b (both terms increase)."""

    def __call__(self, b: float) -> float:
        return 1.0 + b


@dataclass(frozen=True)
class FiniteMargin:
    """Exact extremum of f +/- beta*u over a finite support."""

    f_values: tuple
    u_values: tuple
    u_sign: float  # +1 for f + beta*u, -1 for f - beta*u
    sense: str  # "max" | "min"

    def __call__(self, beta: float) -> float:
        f = np.asarray(self.f_values, dtype=float)
        u = np.asarray(self.u_values, dtype=float)
        vals = f + self.u_sign * beta * u
        return float(vals.max() if self.sense == "max" else vals.min())


@dataclass(frozen=True)
class GridSearchMargin:
    """Bracketed scalar search for sup over x >= 1 of f(x) - beta*u(x).

    Assumes the profile is unimodal in x (true for the concave-minus-
    linear families used here).  Coarse log grid, then golden-section
    refinement around the best point.
    """

    f: Callable
    u: Callable
    x_max: float = 1e12

    def __call__(self, beta: float) -> float:
        grid = np.geomspace(1.0, self.x_max, 600)
        vals = self.f(grid) - beta * self.u(grid)
        j = int(np.argmax(vals))
        lo = grid[max(j - 1, 0)]
        hi = grid[min(j + 1, len(grid) - 1)]
        # golden section in log-x
        a, b = math.log(lo), math.log(hi)
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        c, d = b - phi * (b - a), a + phi * (b - a)
        for _ in range(120):
            fc = self.f(math.exp(c)) - beta * self.u(math.exp(c))
            fd = self.f(math.exp(d)) - beta * self.u(math.exp(d))
            if fc >= fd:
                b, d = d, c
                c = b - phi * (b - a)
            else:
                a, c = c, d
                d = a + phi * (b - a)
            if b - a < 1e-13 * (1.0 + abs(a)):
                break
        x_best = math.exp(0.5 * (a + b))
        return float(max(vals[j], self.f(x_best) - beta * self.u(x_best)))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionModel:
    kind: str
    atoms: np.ndarray | None = None
    probs: np.ndarray | None = None
    magnitude_atoms: np.ndarray | None = None
    magnitude_probs: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (KIND_PARETO, KIND_FINITE, KIND_SIGN):
            raise ConfigError(f"unknown model kind: {self.kind!r}")
        if self.kind != KIND_PARETO:
            if self.atoms is None or self.probs is None:
                raise ConfigError(f"{self.kind} model requires atoms and probs")
            atoms = np.asarray(self.atoms, dtype=float)
            probs = np.asarray(self.probs, dtype=float)
            if atoms.ndim != 1 or probs.shape != atoms.shape or atoms.size == 0:
                raise ConfigError("atoms and probs must be equal-length 1-d arrays")
            if np.any(probs <= 0.0):
                raise ConfigError("all atom probabilities must be strictly positive")
            if abs(float(probs.sum()) - 1.0) > _PMF_TOL:
                raise ConfigError(
                    f"atom probabilities sum to {probs.sum()!r}, not 1 within {_PMF_TOL}"
                )

    @property
    def is_finite(self) -> bool:
        return self.kind in (KIND_FINITE, KIND_SIGN)

    @property
    def finite_exponential_moments(self) -> bool:
        """True when E[exp(theta * X)] is finite for every real theta."""
        return self.is_finite

    def quantile(self, p):
        """Inverse CDF; only defined for the pareto_like kind."""
        if self.kind != KIND_PARETO:
            raise CapabilityError("quantile is defined for the pareto_like kind only")
        p = np.asarray(p, dtype=float)
        return (1.0 - p) ** (-0.4)


def pareto_like() -> DistributionModel:
    return DistributionModel(kind=KIND_PARETO)


def finite_support(atoms, probs) -> DistributionModel:
    return DistributionModel(
        kind=KIND_FINITE,
        atoms=np.asarray(atoms, dtype=float),
        probs=np.asarray(probs, dtype=float),
    )


def sign_product(magnitude_atoms, magnitude_probs) -> DistributionModel:
    """Magnitude law times an independent +/-1 fair sign.

    Stored as the expanded signed-atom law, so every finite-support code
    path applies unchanged.
    """
    mags = np.asarray(magnitude_atoms, dtype=float)
    mprobs = np.asarray(magnitude_probs, dtype=float)
    if np.any(mags <= 0.0):
        raise ConfigError("sign_product magnitudes must be strictly positive")
    atoms = np.concatenate([mags, -mags])
    probs = np.concatenate([mprobs / 2.0, mprobs / 2.0])
    return DistributionModel(
        kind=KIND_SIGN,
        atoms=atoms,
        probs=probs,
        magnitude_atoms=mags,
        magnitude_probs=mprobs,
    )


@dataclass(frozen=True)
class ObservablePair:
    """Observables F, U with their known statistics and margin oracles.

    ``gamma_flag`` is "exact" when gamma is Cov(F(X), U(X)) itself, and
    "upper_bound" when the stored value is a conservative surrogate to be
    plugged into bound formulas as-is.  The explicit-bound exponent is
    increasing in gamma, so a sound surrogate must not exceed the true
    covariance; when only |gamma| <= g is known, pass -g.
    """

    f: Callable
    u: Callable
    mu: float
    nu: float
    var_f: float
    var_u: float
    gamma: float
    gamma_flag: str = "exact"
    margin: MarginOracle | None = None  # bound on sup[F - beta U]
    sum_lower_margin: MarginOracle | None = None  # bound on inf[F + beta U]
    sum_margin: MarginOracle | None = None  # bound on sup[F + beta U]
    lower_margin: MarginOracle | None = None  # bound on inf[F - beta U]
    f_unbounded_above: bool = False
    u_unbounded_above: bool = False
    normalized: bool = False
    f_scale: float | None = None
    u_scale: float | None = None

    def __post_init__(self):
        if self.gamma_flag not in ("exact", "upper_bound"):
            raise ConfigError(f"bad gamma_flag: {self.gamma_flag!r}")
        if self.gamma_flag == "exact":
            cap = math.sqrt(max(self.var_f, 0.0) * max(self.var_u, 0.0))
            if abs(self.gamma) > cap + 1e-9:
                raise ConfigError(
                    f"exact gamma={self.gamma} violates |gamma| <= "
                    f"sqrt(var_f*var_u)={cap}"
                )

    def map_thresholds(self, epsilon: float, u: float) -> tuple[float, float]:
        """Raw-scale (epsilon, u) -> thresholds for this normalized pair."""
        if not self.normalized or self.f_scale is None or self.u_scale is None:
            raise CapabilityError("threshold mapping requires a normalized pair")
        return epsilon / self.f_scale, u / self.u_scale


# ---------------------------------------------------------------------------
# pair constructors
# ---------------------------------------------------------------------------


def heavy_tail_pair() -> tuple[DistributionModel, ObservablePair]:
    """The running heavy-tail example: F(x) = x**(3/4), U(x) = x.

    Exact statistics: E F = 10/7, E U = 5/3, Var F = 45/98,
    Var U = 20/9, Cov = 20/21.
    """
    model = pareto_like()
    pair = ObservablePair(
        f=Power(0.75),
        u=Identity(),
        mu=10.0 / 7.0,
        nu=5.0 / 3.0,
        var_f=45.0 / 98.0,
        var_u=20.0 / 9.0,
        gamma=20.0 / 21.0,
        gamma_flag="exact",
        margin=MarginOracle(ParetoPowerMargin(), exact=True),
        sum_lower_margin=MarginOracle(ParetoSumInf(), exact=True),
        f_unbounded_above=True,
        u_unbounded_above=True,
    )
    return model, pair


def tabulated_pair(
    model: DistributionModel, f_values, u_values
) -> ObservablePair:
    """Pair on a finite support given per-atom values of F and U."""
    if not model.is_finite:
        raise CapabilityError("tabulated_pair requires a finite-support model")
    f_values = np.asarray(f_values, dtype=float)
    u_values = np.asarray(u_values, dtype=float)
    if f_values.shape != model.atoms.shape or u_values.shape != model.atoms.shape:
        raise InputError("value tables must match the model support size")
    p = model.probs
    mu = float(p @ f_values)
    nu = float(p @ u_values)
    var_f = float(p @ f_values**2 - mu**2)
    var_u = float(p @ u_values**2 - nu**2)
    gamma = float(p @ (f_values * u_values) - mu * nu)
    fv, uv = tuple(f_values), tuple(u_values)
    return ObservablePair(
        f=Table(tuple(model.atoms), fv),
        u=Table(tuple(model.atoms), uv),
        mu=mu,
        nu=nu,
        var_f=var_f,
        var_u=var_u,
        gamma=gamma,
        margin=MarginOracle(FiniteMargin(fv, uv, -1.0, "max")),
        lower_margin=MarginOracle(FiniteMargin(fv, uv, -1.0, "min")),
        sum_margin=MarginOracle(FiniteMargin(fv, uv, +1.0, "max")),
        sum_lower_margin=MarginOracle(FiniteMargin(fv, uv, +1.0, "min")),
    )


def pair_from_callables(model: DistributionModel, f, u) -> ObservablePair:
    """Generic pair construction; statistics come from exact_moments."""
    if model.is_finite:
        return tabulated_pair(model, f(model.atoms), u(model.atoms))
    probe = ObservablePair(
        f=f, u=u, mu=0.0, nu=0.0, var_f=0.0, var_u=0.0, gamma=0.0
    )
    mu, nu, var_f, var_u, gamma = exact_moments(model, probe)
    cf, cu = canonical_power(f), canonical_power(u)
    f_unbounded = cf is None or (cf[1] > 0 and cf[0] > 0)
    u_unbounded = cu is None or (cu[1] > 0 and cu[0] > 0)
    if isinstance(f, Power) and f.exponent == 0.75 and isinstance(u, Identity):
        margin = MarginOracle(ParetoPowerMargin(), exact=True)
        sum_lower = MarginOracle(ParetoSumInf(), exact=True)
    else:
        margin = MarginOracle(GridSearchMargin(f, u), exact=False)
        sum_lower = None
    return ObservablePair(
        f=f,
        u=u,
        mu=mu,
        nu=nu,
        var_f=var_f,
        var_u=var_u,
        gamma=gamma,
        margin=margin,
        sum_lower_margin=sum_lower,
        f_unbounded_above=f_unbounded,
        u_unbounded_above=u_unbounded,
    )


def counterexample_pair(
    magnitude_atoms, magnitude_probs
) -> tuple[DistributionModel, ObservablePair]:
    """Sign-product pair with F(x) = |x| - E|X| and U(x) = sign(x).

    F(X) and U(X) are independent here, so screening buys nothing: the
    screened and plain error exponents coincide.
    """
    model = sign_product(magnitude_atoms, magnitude_probs)
    center = float(model.magnitude_probs @ model.magnitude_atoms)
    f, u = AbsCentered(center), SignOf()
    fv = tuple(f(model.atoms))
    uv = tuple(u(model.atoms))
    p = model.probs
    fa = np.asarray(fv)
    ua = np.asarray(uv)
    pair = ObservablePair(
        f=f,
        u=u,
        mu=float(p @ fa),
        nu=float(p @ ua),
        var_f=float(p @ fa**2 - (p @ fa) ** 2),
        var_u=float(p @ ua**2 - (p @ ua) ** 2),
        gamma=float(p @ (fa * ua) - (p @ fa) * (p @ ua)),
        margin=MarginOracle(FiniteMargin(fv, uv, -1.0, "max")),
        lower_margin=MarginOracle(FiniteMargin(fv, uv, -1.0, "min")),
        sum_margin=MarginOracle(FiniteMargin(fv, uv, +1.0, "max")),
        sum_lower_margin=MarginOracle(FiniteMargin(fv, uv, +1.0, "min")),
    )
    return model, pair


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample(model: DistributionModel, stream: RandomStream, count: int) -> np.ndarray:
    """``count`` i.i.d. draws; identical (seed, count) is bit-for-bit stable."""
    if count < 1:
        raise InputError("count must be >= 1")
    p = stream.uniform(count)
    return transform_uniforms(model, p)


def transform_uniforms(model: DistributionModel, p: np.ndarray) -> np.ndarray:
    """Inverse-CDF map from uniforms to samples (shared with the harness)."""
    if model.kind == KIND_PARETO:
        return (1.0 - p) ** (-0.4)
    cum = np.cumsum(model.probs)
    cum[-1] = 1.0  # guard rounding so every uniform lands on an atom
    idx = np.searchsorted(cum, p, side="right")
    return model.atoms[idx]


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def _pareto_power_moment(a: float, name: str) -> float:
    """E[X**a] = 5 / (5 - 2a) for a < 5/2; diverges otherwise."""
    if a >= 2.5:
        raise DivergenceError(f"{name} diverges: E[X**{a}] is infinite for this tail")
    return 5.0 / (5.0 - 2.0 * a)


def _pareto_expectation_quadrature(g: Callable) -> float:
    """E[g(X)] = int_0^1 g(w**-2) * 5 w**4 dw by dyadic panels toward w=0.

    Accurate when g grows slower than ~x**2.3; the power-form path should
    be preferred whenever it applies.
    """
    nodes, weights = np.polynomial.legendre.leggauss(32)
    total = 0.0
    prev = math.inf
    for k in range(400):
        hi = 2.0 ** (-k)
        lo = hi / 2.0
        w = lo + (nodes * 0.5 + 0.5) * (hi - lo)
        wt = weights * 0.5 * (hi - lo)
        vals = g(w**-2.0) * 5.0 * w**4
        panel = float(vals @ wt)
        total += panel
        if abs(panel) <= prev and abs(panel) < 1e-13 * max(abs(total), 1e-300):
            return total
        prev = abs(panel)
    raise NumericError("pareto moment quadrature did not converge in 400 panels")


def exact_moments(
    model: DistributionModel, pair: ObservablePair
) -> tuple[float, float, float, float, float]:
    """(mu, nu, var_F, var_U, gamma) computed from the model itself."""
    if model.is_finite:
        p = model.probs
        f = np.asarray(pair.f(model.atoms), dtype=float)
        u = np.asarray(pair.u(model.atoms), dtype=float)
        mu, nu = float(p @ f), float(p @ u)
        return (
            mu,
            nu,
            float(p @ f**2 - mu**2),
            float(p @ u**2 - nu**2),
            float(p @ (f * u) - mu * nu),
        )

    cf = canonical_power(pair.f)
    cu = canonical_power(pair.u)
    if cf is not None and cu is not None:
        af_alpha, af, af_delta = cf
        au_alpha, au, au_delta = cu
        ef = af_alpha * _pareto_power_moment(af, "E[F]") + af_delta
        eu = au_alpha * _pareto_power_moment(au, "E[U]") + au_delta
        ef2 = (
            af_alpha**2 * _pareto_power_moment(2 * af, "E[F^2]")
            + 2 * af_alpha * af_delta * _pareto_power_moment(af, "E[F]")
            + af_delta**2
        )
        eu2 = (
            au_alpha**2 * _pareto_power_moment(2 * au, "E[U^2]")
            + 2 * au_alpha * au_delta * _pareto_power_moment(au, "E[U]")
            + au_delta**2
        )
        efu = (
            af_alpha * au_alpha * _pareto_power_moment(af + au, "E[F*U]")
            + af_alpha * au_delta * _pareto_power_moment(af, "E[F]")
            + au_alpha * af_delta * _pareto_power_moment(au, "E[U]")
            + af_delta * au_delta
        )
        return (ef, eu, ef2 - ef**2, eu2 - eu**2, efu - ef * eu)

    ef = _pareto_expectation_quadrature(pair.f)
    eu = _pareto_expectation_quadrature(pair.u)
    ef2 = _pareto_expectation_quadrature(lambda x: pair.f(x) ** 2)
    eu2 = _pareto_expectation_quadrature(lambda x: pair.u(x) ** 2)
    efu = _pareto_expectation_quadrature(lambda x: pair.f(x) * pair.u(x))
    return (ef, eu, ef2 - ef**2, eu2 - eu**2, efu - ef * eu)


# ---------------------------------------------------------------------------
# joint log-MGF
# ---------------------------------------------------------------------------

_LOG_REL_CUTOFF = math.log(1e-15)


def _logsumexp(values: np.ndarray) -> float:
    m = float(np.max(values))
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.sum(np.exp(values - m))))


_PANEL_BLOCK = 16


@functools.lru_cache(maxsize=256)
def _panel_block_nodes(k0: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/log-weights for panels k0..k0+block-1, flattened."""
    nodes, weights = np.polynomial.legendre.leggauss(32)
    half = 0.5 * (nodes + 1.0)
    ks = np.arange(k0, k0 + _PANEL_BLOCK)
    hi = 2.0 ** (-ks)[:, None]
    lo = hi / 2.0
    q = lo + half[None, :] * (hi - lo)
    logw = np.log(weights)[None, :] + np.log(0.5 * (hi - lo))
    return q.ravel(), logw.ravel()


def _pareto_log_exp_integral(h: Callable, panel_cap: int = 1280) -> float:
    """log of int_0^1 exp(h(x(q))) dq with x(q) = q**(-2/5).

    Dyadic panels [2^-k-1, 2^-k] with fixed Gauss-Legendre nodes,
    evaluated a block at a time; the panel walk continues past any
    pre-peak dip (the integrand maximum is still rising) and stops only
    once both the panel contribution is below 1e-15 of the running
    total and the integrand is decaying.  All accumulation is in the
    log domain: for small theta2/theta1 the integrand peaks at
    astronomically large x and exp(h) overflows any linear-scale
    representation long before the result does.
    """
    total = -math.inf
    last_max = math.inf
    for k0 in range(0, panel_cap, _PANEL_BLOCK):
        q, logw = _panel_block_nodes(k0)
        x = q ** (-0.4)
        vals = np.asarray(h(x), dtype=float)
        if np.any(np.isnan(vals)):
            raise NumericError(f"log-MGF integrand produced NaN near panel k={k0}")
        terms = (vals + logw).reshape(_PANEL_BLOCK, -1)
        vmaxes = vals.reshape(_PANEL_BLOCK, -1).max(axis=1)
        for i in range(_PANEL_BLOCK):
            panel = _logsumexp(terms[i])
            total = float(np.logaddexp(total, panel))
            vmax = float(vmaxes[i])
            decaying = vmax <= last_max
            last_max = vmax
            if decaying and panel < total + _LOG_REL_CUTOFF:
                return total
    raise NumericError("log-MGF quadrature did not converge within the panel cap")


def log_mgf_signed(model: DistributionModel, pair: ObservablePair, a: float, b: float) -> float:
    """log E[exp(a F(X) + b U(X))] for arbitrary real coefficients.

    Returns +inf (a value, not an error) when the integral diverges.
    """
    if a == 0.0 and b == 0.0:
        return 0.0
    if model.is_finite:
        p = model.probs
        f = np.asarray(pair.f(model.atoms), dtype=float)
        u = np.asarray(pair.u(model.atoms), dtype=float)
        return _logsumexp(np.log(p) + a * f + b * u)

    # divergence is decided by metadata, not by numeric overflow
    if b > 0.0 and pair.u_unbounded_above:
        return math.inf
    if b == 0.0 and a > 0.0 and pair.f_unbounded_above:
        return math.inf
    if b < 0.0 and a > 0.0 and pair.f_unbounded_above and pair.margin is None:
        raise CapabilityError(
            "log-MGF with an unbounded F needs a finite margin oracle for F - beta*U"
        )
    return _pareto_log_exp_integral(lambda x: a * pair.f(x) + b * pair.u(x))


def log_mgf_joint(
    model: DistributionModel, pair: ObservablePair, theta1: float, theta2: float
) -> float:
    """log E[exp(theta1 F(X) - theta2 U(X))] on theta1, theta2 >= 0."""
    if theta1 < 0.0 or theta2 < 0.0:
        raise DomainError("log_mgf_joint requires theta1 >= 0 and theta2 >= 0")
    return log_mgf_signed(model, pair, theta1, -theta2)


def with_gamma(pair: ObservablePair, gamma: float, flag: str = "upper_bound") -> ObservablePair:
    """Copy of the pair with a substituted covariance surrogate."""
    return replace(pair, gamma=gamma, gamma_flag=flag)
