"""Experiment runner: config ingestion, seeded parallel validation,
heavy-tail decay measurement, and byte-deterministic result emission.

Determinism contract: identical (config, seed) produce byte-identical
output files regardless of worker count or scheduling.  Trials draw
from substreams keyed by (master seed, trial index), batches have a
fixed size independent of the worker pool, and aggregation is exact
integer addition.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bound_engine import (
    BoundReport,
    CONSTANT_III_QUOTED,
    CONSTANT_IV_QUOTED,
    bound_thm31_ii,
    bound_thm31_iii,
    normalize_observables,
)
from .dist_models import (
    AbsCentered,
    DistributionModel,
    Identity,
    ObservablePair,
    Power,
    SignOf,
    counterexample_pair,
    finite_support,
    pair_from_callables,
    heavy_tail_pair,
    pareto_like,
    sign_product,
    tabulated_pair,
    transform_uniforms,
    with_gamma,
)
from .errors import (
    CapabilityError,
    ConfigError,
    InputError,
    InsufficientTrialsError,
    ScreenedMcError,
)
from .rate_functions import rate_plus_star
from .screen_core import SIDEDNESS, ScreenConfig, TrajectoryRecord
from .streams import SubstreamSampler

BATCH_SIZE = 8192  # fixed: batch decomposition must not depend on --jobs
OUTPUT_KINDS = ("trajectory_csv", "report", "rates_table")
WILSON_Z = 3.0  # 99.7%-equivalent score interval
SLOPE_INDEX_STRIDE = 1 << 40  # trial-index namespace per horizon


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutputSpec:
    kind: str
    path: str


@dataclass(frozen=True)
class ExperimentConfig:
    model: dict
    observables: dict
    screen: ScreenConfig
    trials: int
    master_seed: int
    outputs: tuple[OutputSpec, ...] = field(default_factory=tuple)


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a config document; unknown keys are rejected outright."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(
        doc,
        {"model", "observables", "screen", "trials", "seed", "outputs"},
        {"model", "observables", "screen", "trials", "seed"},
        "config",
    )
    model_spec = doc["model"]
    if not isinstance(model_spec, dict) or "kind" not in model_spec:
        raise ConfigError("model must be an object with a 'kind' tag")
    kind = model_spec["kind"]
    if kind == "pareto_like":
        _require_keys(model_spec, {"kind"}, {"kind"}, "model")
    elif kind == "finite_support":
        _require_keys(model_spec, {"kind", "atoms", "probs"}, {"kind", "atoms", "probs"}, "model")
    elif kind == "sign_product":
        _require_keys(
            model_spec,
            {"kind", "magnitude_atoms", "magnitude_probs"},
            {"kind", "magnitude_atoms", "magnitude_probs"},
            "model",
        )
    else:
        raise ConfigError(f"unknown model kind {kind!r}")

    obs = doc["observables"]
    if not isinstance(obs, dict):
        raise ConfigError("observables must be an object")
    if "preset" in obs:
        _require_keys(obs, {"preset"}, {"preset"}, "observables")
        if obs["preset"] not in ("heavy_tail",):
            raise ConfigError(f"unknown observables preset {obs['preset']!r}")
    else:
        _require_keys(obs, {"f", "u"}, {"f", "u"}, "observables")
        for name in ("f", "u"):
            _validate_form(obs[name], f"observables.{name}")

    screen = doc["screen"]
    _require_keys(screen, {"epsilon", "u", "n", "sidedness"}, {"epsilon", "u", "n"}, "screen")
    sidedness = screen.get("sidedness", "two_sided")
    if sidedness not in SIDEDNESS:
        raise ConfigError(f"sidedness must be one of {SIDEDNESS}")
    screen_cfg = ScreenConfig(
        epsilon=float(screen["epsilon"]),
        u=float(screen["u"]),
        n=int(screen["n"]),
        sidedness=sidedness,
    )

    trials = int(doc["trials"])
    if trials < 1:
        raise ConfigError("trials must be >= 1")

    outputs = []
    for entry in doc.get("outputs", []):
        _require_keys(entry, {"kind", "path"}, {"kind", "path"}, "outputs[]")
        if entry["kind"] not in OUTPUT_KINDS:
            raise ConfigError(f"unknown output kind {entry['kind']!r}")
        outputs.append(OutputSpec(kind=entry["kind"], path=str(entry["path"])))
    paths = [o.path for o in outputs]
    if len(set(paths)) != len(paths):
        raise ConfigError("output paths must be distinct")

    return ExperimentConfig(
        model=model_spec,
        observables=obs,
        screen=screen_cfg,
        trials=trials,
        master_seed=int(doc["seed"]),
        outputs=tuple(outputs),
    )


_FORM_KEYS = {
    "power": ({"form", "exponent"}, {"form", "exponent"}),
    "identity": ({"form"}, {"form"}),
    "table": ({"form", "values"}, {"form", "values"}),
    "abs_centered": ({"form", "center"}, {"form"}),
    "sign": ({"form"}, {"form"}),
}


def _validate_form(spec: dict, where: str) -> None:
    if not isinstance(spec, dict) or "form" not in spec:
        raise ConfigError(f"{where} must be an object with a 'form' tag")
    if spec["form"] not in _FORM_KEYS:
        raise ConfigError(f"unknown form {spec['form']!r} in {where}")
    allowed, required = _FORM_KEYS[spec["form"]]
    _require_keys(spec, allowed, required, where)


def build_model(spec: dict) -> DistributionModel:
    kind = spec["kind"]
    if kind == "pareto_like":
        return pareto_like()
    if kind == "finite_support":
        return finite_support(spec["atoms"], spec["probs"])
    return sign_product(spec["magnitude_atoms"], spec["magnitude_probs"])


def _build_form(spec: dict, model: DistributionModel):
    form = spec["form"]
    if form == "power":
        return Power(float(spec["exponent"]))
    if form == "identity":
        return Identity()
    if form == "table":
        values = np.asarray(spec["values"], dtype=float)
        if not model.is_finite or values.shape != model.atoms.shape:
            raise ConfigError("table forms need a finite model with matching size")
        return values  # consumed by tabulated_pair
    if form == "abs_centered":
        if "center" in spec:
            center = float(spec["center"])
        else:
            if not model.is_finite:
                raise ConfigError("abs_centered without center needs a finite model")
            center = float(model.probs @ np.abs(model.atoms))
        return AbsCentered(center)
    return SignOf()


def build_pair(model: DistributionModel, obs: dict) -> ObservablePair:
    if obs.get("preset") == "heavy_tail":
        if model.kind != "pareto_like":
            raise ConfigError("the heavy_tail preset pairs with the pareto_like model")
        return heavy_tail_pair()[1]
    f = _build_form(obs["f"], model)
    u = _build_form(obs["u"], model)
    if model.is_finite:
        f_vals = f if isinstance(f, np.ndarray) else np.asarray(f(model.atoms), dtype=float)
        u_vals = u if isinstance(u, np.ndarray) else np.asarray(u(model.atoms), dtype=float)
        if model.kind == "sign_product" and isinstance(f, AbsCentered) and isinstance(u, SignOf):
            return counterexample_pair(model.magnitude_atoms, model.magnitude_probs)[1]
        return tabulated_pair(model, f_vals, u_vals)
    if isinstance(f, np.ndarray) or isinstance(u, np.ndarray):
        raise ConfigError("table forms need a finite-support model")
    return pair_from_callables(model, f, u)


# ---------------------------------------------------------------------------
# validation run
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    report: BoundReport
    bound_value: float
    skipped: bool = False
    skip_reason: str = ""

    def to_dict(self) -> dict:
        doc = self.report.to_dict()
        doc["bound_value"] = self.bound_value
        doc["skipped"] = self.skipped
        if self.skip_reason:
            doc["skip_reason"] = self.skip_reason
        return doc


@dataclass
class ValidationReport:
    epsilon: float
    u: float
    n: int
    sidedness: str
    trials: int
    seed: int
    screened_count: int
    screened_error_count: int
    unscreened_error_count: int
    bounds: list[BoundEntry]
    bound_passes: list[bool]
    event_inclusion: bool
    runtime: dict

    @property
    def screened_error_rate(self) -> float:
        return self.screened_error_count / self.trials

    @property
    def unscreened_error_rate(self) -> float:
        return self.unscreened_error_count / self.trials

    @property
    def all_sound(self) -> bool:
        return self.event_inclusion and all(
            ok for ok, entry in zip(self.bound_passes, self.bounds) if not entry.skipped
        )

    def to_document(self) -> dict:
        se_lo, se_hi = wilson_interval(self.screened_error_count, self.trials)
        ue_lo, ue_hi = wilson_interval(self.unscreened_error_count, self.trials)
        bounds_doc = []
        for entry, ok in zip(self.bounds, self.bound_passes):
            d = entry.to_dict()
            d["sound"] = bool(ok)
            bounds_doc.append(d)
        return {
            "kind": "validation_report",
            "epsilon": self.epsilon,
            "u": self.u,
            "n": self.n,
            "sidedness": self.sidedness,
            "trials": self.trials,
            "seed": self.seed,
            "counts": {
                "screened": self.screened_count,
                "screened_error": self.screened_error_count,
                "unscreened_error": self.unscreened_error_count,
            },
            "empirical": {
                "screened_rate": self.screened_count / self.trials,
                "screened_error_rate": self.screened_error_rate,
                "screened_error_interval": [se_lo, se_hi],
                "unscreened_error_rate": self.unscreened_error_rate,
                "unscreened_error_interval": [ue_lo, ue_hi],
            },
            "bounds": bounds_doc,
            "checks": {
                "event_inclusion": self.event_inclusion,
                "all_bounds_sound": self.all_sound,
            },
            "runtime": self.runtime,
        }


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Score interval; behaves sensibly at zero and tiny counts."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _is_heavy_tail_preset(obs: dict) -> bool:
    return obs.get("preset") == "heavy_tail"


def compute_bounds(
    model: DistributionModel,
    pair: ObservablePair,
    obs_spec: dict,
    epsilon: float,
    u: float,
    n: int,
) -> list[BoundEntry]:
    """Every applicable certified bound for the configured event."""
    entries: list[BoundEntry] = []

    def add(report: BoundReport) -> None:
        entries.append(BoundEntry(report=report, bound_value=report.bound_at(n)))

    def skip(method: str, reason: str) -> None:
        entries.append(
            BoundEntry(
                report=BoundReport(method=method, exponent=0.0, note=reason),
                bound_value=1.0,
                skipped=True,
                skip_reason=reason,
            )
        )

    if _is_heavy_tail_preset(obs_spec):
        norm = normalize_observables(pair, var_f_bound=4.0, mu_lower=1.0)
        eps_n, u_n = norm.map_thresholds(epsilon, u)
        rep = bound_thm31_ii(norm, eps_n, u_n)
        add(BoundReport(rep.method, rep.exponent, rep.alpha_star, rep.zero_event, "gamma=exact"))
        worst = with_gamma(norm, -1.0)
        rep_w = bound_thm31_ii(worst, eps_n, u_n)
        add(
            BoundReport(
                rep_w.method, rep_w.exponent, rep_w.alpha_star, rep_w.zero_event, "gamma=worst_case"
            )
        )
        K = u_n / eps_n
        rep3 = bound_thm31_iii(norm, eps_n, K)
        add(BoundReport(rep3.method, rep3.exponent, rep3.alpha_star, rep3.zero_event, f"K={K!r}"))
        if 0.0 < u <= epsilon / 20.0:
            add(
                BoundReport(
                    "thm31_ii",
                    CONSTANT_III_QUOTED * epsilon**2,
                    None,
                    False,
                    "quoted_constant_iii",
                )
            )
            add(
                BoundReport(
                    "thm31_ii",
                    CONSTANT_IV_QUOTED * epsilon**2,
                    None,
                    False,
                    "quoted_constant_iv",
                )
            )
        else:
            skip("thm31_ii", "quoted constants require u <= epsilon/20")
    elif model.is_finite:
        try:
            norm = normalize_observables(pair)
            eps_n, u_n = norm.map_thresholds(epsilon, u)
            rep = bound_thm31_ii(norm, eps_n, u_n)
            add(BoundReport(rep.method, rep.exponent, rep.alpha_star, rep.zero_event, "gamma=exact"))
            rep3 = bound_thm31_iii(norm, eps_n, u_n / eps_n)
            add(BoundReport(rep3.method, rep3.exponent, rep3.alpha_star, rep3.zero_event, ""))
        except ScreenedMcError as exc:
            skip("thm31_ii", f"normalization unavailable: {exc}")

    try:
        lam_plus = rate_plus_star(model, pair, epsilon, u, "lambda_plus")
        add(BoundReport("chernoff_rate", lam_plus, None, math.isinf(lam_plus), "lambda_plus"))
    except CapabilityError as exc:
        skip("chernoff_rate", str(exc))
    return entries


def _batch_counts(args) -> tuple[int, int, int]:
    """Event counts for one contiguous block of trials. Must stay picklable."""
    (model_spec, obs_spec, epsilon, u, n, sidedness, seed, lo, hi, offset) = args
    model = build_model(model_spec)
    pair = build_pair(model, obs_spec)
    sampler = SubstreamSampler(seed)
    f, uo = pair.f, pair.u
    mu, nu = pair.mu, pair.nu
    two_sided = sidedness == "two_sided"
    screened = screened_err = unscreened_err = 0
    for t in range(lo, hi):
        p = sampler.uniforms(offset + t, n)
        x = transform_uniforms(model, p)
        s_hat = float(f(x).sum()) / n
        t_hat = float(uo(x).sum()) / n
        err = s_hat - mu > epsilon
        dev = t_hat - nu
        sc = abs(dev) < u if two_sided else dev < u
        screened += sc
        unscreened_err += err
        screened_err += err and sc
    return screened, screened_err, unscreened_err


def _run_batches(worker, arg_list, jobs: int):
    if jobs <= 1:
        return [worker(a) for a in arg_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, arg_list, chunksize=1))


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)


def run_validation(config: ExperimentConfig, jobs: int = 1) -> ValidationReport:
    """Monte Carlo validation of every applicable bound at the configured event.

    Final-step screened and unscreened error events are counted over
    ``trials`` independent trajectories; a bound fails only if the
    empirical rate exceeds it by more than three binomial standard
    errors.
    """
    model = build_model(config.model)
    pair = build_pair(model, config.observables)
    sc = config.screen
    bounds = compute_bounds(model, pair, config.observables, sc.epsilon, sc.u, sc.n)

    args = []
    for lo in range(0, config.trials, BATCH_SIZE):
        hi = min(lo + BATCH_SIZE, config.trials)
        args.append(
            (
                config.model,
                config.observables,
                sc.epsilon,
                sc.u,
                sc.n,
                sc.sidedness,
                config.master_seed,
                lo,
                hi,
                0,
            )
        )
    results = _run_batches(_batch_counts, args, jobs)
    screened = sum(r[0] for r in results)
    screened_err = sum(r[1] for r in results)
    unscreened_err = sum(r[2] for r in results)

    p_hat = screened_err / config.trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / config.trials)
    passes = []
    for entry in bounds:
        if entry.skipped:
            passes.append(True)
        else:
            passes.append(p_hat <= entry.bound_value + 3.0 * se)

    return ValidationReport(
        epsilon=sc.epsilon,
        u=sc.u,
        n=sc.n,
        sidedness=sc.sidedness,
        trials=config.trials,
        seed=config.master_seed,
        screened_count=screened,
        screened_error_count=screened_err,
        unscreened_error_count=unscreened_err,
        bounds=bounds,
        bound_passes=passes,
        event_inclusion=screened_err <= unscreened_err,
        runtime={"batch_size": BATCH_SIZE, "package_version": __version__},
    )


# ---------------------------------------------------------------------------
# heavy-tail decay slope
# ---------------------------------------------------------------------------


def fit_log_slope(n_list, rates) -> float:
    """Least-squares slope of log(rate) against log(n)."""
    n_arr = np.asarray(n_list, dtype=float)
    r_arr = np.asarray(rates, dtype=float)
    if n_arr.size != r_arr.size or n_arr.size < 2:
        raise InputError("need matching n and rate sequences of length >= 2")
    if np.any(r_arr <= 0.0):
        raise InputError("rates must be strictly positive for a log fit")
    x = np.log(n_arr)
    y = np.log(r_arr)
    x_c = x - x.mean()
    return float((x_c @ (y - y.mean())) / (x_c @ x_c))


def _slope_batch(args) -> int:
    (model_spec, obs_spec, epsilon, n, seed, lo, hi, offset) = args
    model = build_model(model_spec)
    pair = build_pair(model, obs_spec)
    sampler = SubstreamSampler(seed)
    f = pair.f
    mu = pair.mu
    hits = 0
    for t in range(lo, hi):
        p = sampler.uniforms(offset + t, n)
        x = transform_uniforms(model, p)
        if float(f(x).sum()) / n - mu > epsilon:
            hits += 1
    return hits


@dataclass(frozen=True)
class SlopeResult:
    n_list: tuple[int, ...]
    counts: tuple[int, ...]
    trials: int
    slope: float

    def to_dict(self) -> dict:
        return {
            "n_list": list(self.n_list),
            "counts": list(self.counts),
            "trials": self.trials,
            "rates": [c / self.trials for c in self.counts],
            "slope": self.slope,
        }


def run_heavy_tail_slope(
    model_spec: dict,
    obs_spec: dict,
    epsilon: float,
    n_list,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> SlopeResult:
    """Fitted decay slope of the plain estimator's error rate in n.

    Each horizon uses its own substream namespace; at least three
    horizons are required, and every horizon must register at least one
    hit (a hundred or more is advisable for a stable fit).
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise InputError("need at least 3 horizons for a slope fit")
    counts = []
    for i, n in enumerate(n_list):
        offset = i * SLOPE_INDEX_STRIDE
        args = []
        for lo in range(0, trials, BATCH_SIZE):
            hi = min(lo + BATCH_SIZE, trials)
            args.append((model_spec, obs_spec, epsilon, n, seed, lo, hi, offset))
        hits = sum(_run_batches(_slope_batch, args, jobs))
        if hits == 0:
            raise InsufficientTrialsError(
                f"no error events at n={n} in {trials} trials; "
                "increase trials or reduce epsilon (target >= 100 hits per horizon)"
            )
        counts.append(hits)
    slope = fit_log_slope(n_list, [c / trials for c in counts])
    return SlopeResult(
        n_list=tuple(n_list), counts=tuple(counts), trials=trials, slope=slope
    )


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------


def emit_trajectory_csv(records: list[TrajectoryRecord], path: str) -> None:
    """One row per step; floats carry 17 significant digits (exact round trip)."""
    lines = ["k,s_hat,t_hat,screened"]
    for rec in records:
        lines.append(f"{rec.k},{rec.s_hat:.17g},{rec.t_hat:.17g},{int(rec.screened)}")
    _write_text(path, "\n".join(lines) + "\n")


def canonicalize(obj):
    """Map a result tree onto JSON-safe, byte-stable values."""
    if isinstance(obj, dict):
        return {str(k): canonicalize(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [canonicalize(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.ndarray):
        return [canonicalize(v) for v in obj.tolist()]
    raise InputError(f"cannot serialize {type(obj).__name__} into a report")


def emit_report(document: dict, path: str) -> None:
    """Sorted-key JSON with canonical float text; rerunning is byte-identical."""
    _write_text(path, json.dumps(canonicalize(document), sort_keys=True, indent=2) + "\n")


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write output file {path!r}: {exc}") from exc
