"""Experiment configs, verification suites, parameter selection, and
report serialization.

A TOML config file describes one task.  ``load_config`` validates it
eagerly (unknown keys are rejected so typos cannot silently fall back
to defaults), ``execute`` runs the task and returns a ``RunReport``,
and ``write_report`` persists the report as JSON plus a CSV trial
summary.  Verification verdicts are also reflected in the command line
exit code: pass -> 0, violation -> 1.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from . import kernels, lattice, operators, search, witness as wt
from .errors import UsageError
from .functionals import (
    PairReport,
    check_moment_exponent,
    check_type_exponent,
    scaled_enflo_pair,
    theorem_margin,
)
from .lattice import DEFAULT_CAP, SamplingPlan, TorusDomain, random_grid
from .search import SearchBudget
from .space import REAL, LpSpace
from .tolerance import margin_tolerance

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

TASKS = (
    "estimate_T",
    "estimate_tau",
    "verify_theorem",
    "verify_witness",
    "verify_smoothing",
    "verify_chain",
    "oracle",
)

# tasks built on half and quarter period shifts of the torus
TAU_TASKS = ("estimate_tau", "verify_theorem", "verify_witness")


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    dim: int = 1
    exponent: float = 2.0
    scalar_mode: str = REAL
    p: float = 2.0
    n: int = 1
    m: int = 4
    k: int = 1
    plan_mode: str = lattice.EXHAUSTIVE
    samples: int = 4096
    trials: int = 20
    seed: int = 0
    cap: int = DEFAULT_CAP
    restarts: int = 8
    steps: int = 60
    step_scale: float = 0.5
    cooling: float = 0.9
    reference_T: float | None = None
    alphabet: tuple[float, ...] = (0.0, 1.0)
    out: str = "report.json"

    def space(self) -> LpSpace:
        return LpSpace(self.dim, self.exponent, self.scalar_mode)

    def plan(self, stream: int = 0) -> SamplingPlan:
        if self.plan_mode == lattice.EXHAUSTIVE:
            return SamplingPlan.exhaustive(cap=self.cap)
        return SamplingPlan.monte_carlo(
            self.samples, seed=(self.seed * 1_000_003 + stream) % (1 << 63), cap=self.cap
        )

    def budget(self) -> SearchBudget:
        return SearchBudget(
            restarts=self.restarts,
            steps_per_restart=self.steps,
            seed=self.seed,
            step_scale=self.step_scale,
            cooling=self.cooling,
        )


_INT_KEYS = {"dim", "n", "m", "k", "samples", "trials", "seed", "cap", "restarts", "steps"}
_FLOAT_KEYS = {"exponent", "p", "step_scale", "cooling", "reference_T"}
_STR_KEYS = {"task", "scalar_mode", "plan_mode", "out"}


def config_from_mapping(raw: dict) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    if "task" not in raw:
        raise UsageError(f"config needs a task, one of: {', '.join(TASKS)}")
    clean: dict = {}
    for key, value in raw.items():
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise UsageError(f"config key {key!r} must be an integer, got {value!r}")
            clean[key] = value
        elif key in _FLOAT_KEYS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise UsageError(f"config key {key!r} must be a number, got {value!r}")
            clean[key] = float(value)
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise UsageError(f"config key {key!r} must be a string, got {value!r}")
            clean[key] = value
        elif key == "alphabet":
            try:
                clean[key] = tuple(float(a) for a in value)
            except (TypeError, ValueError):
                raise UsageError("config key 'alphabet' must be a list of numbers") from None
        else:
            raise UsageError(f"unknown config key {key!r}")
    cfg = ExperimentConfig(**clean)
    validate_config(cfg)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path} is not valid TOML: {exc}") from None
    return config_from_mapping(raw)


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.task not in TASKS:
        raise UsageError(f"unknown task {cfg.task!r}, expected one of: {', '.join(TASKS)}")
    cfg.space()
    if cfg.task == "verify_smoothing":
        check_moment_exponent(cfg.p)
    else:
        check_type_exponent(cfg.p)
    if cfg.n < 1:
        raise UsageError(f"n must be a positive integer, got {cfg.n}")
    if cfg.trials < 1:
        raise UsageError(f"trials must be a positive integer, got {cfg.trials}")
    if cfg.cap < 1:
        raise UsageError(f"cap must be a positive integer, got {cfg.cap}")
    if cfg.plan_mode not in (lattice.EXHAUSTIVE, lattice.MONTE_CARLO):
        raise UsageError(f"plan_mode must be 'exhaustive' or 'monte_carlo', got {cfg.plan_mode!r}")
    if cfg.plan_mode == lattice.MONTE_CARLO and cfg.samples < 1:
        raise UsageError(f"samples must be a positive integer, got {cfg.samples}")
    uses_torus = cfg.task in TAU_TASKS + ("verify_smoothing", "oracle")
    if uses_torus:
        if cfg.m < 2 or cfg.m % 2 != 0:
            raise UsageError(f"m must be an even integer >= 2, got {cfg.m}")
        if cfg.task in TAU_TASKS and cfg.m % 4 != 0:
            raise UsageError(
                f"task {cfg.task!r} uses half and quarter period shifts, so m must be "
                f"divisible by 4, got {cfg.m}"
            )
    if cfg.task == "verify_smoothing" and (cfg.k < 1 or cfg.k % 2 == 0):
        raise UsageError(f"window size k must be a positive odd integer, got {cfg.k}")
    if cfg.task in ("estimate_T", "estimate_tau"):
        cfg.budget()
    if cfg.task == "oracle" and not cfg.alphabet:
        raise UsageError("oracle task needs a non-empty alphabet")
    if cfg.reference_T is not None and not (
        math.isfinite(cfg.reference_T) and cfg.reference_T > 0
    ):
        raise UsageError(f"reference_T must be a positive finite number, got {cfg.reference_T}")


def select_parameters(n: int, p) -> tuple[int, int]:
    """Smallest admissible torus side m (divisible by 4) and odd window k.

    Admissibility: m >= 3 n^(3 - 2/p) and there is an odd k with
    4 n^(2 - 1/p) <= k <= min(3 m / (2 n^(1 - 1/p)), m/2 - 1).  The
    returned k is the smallest odd integer meeting its lower bound.
    """
    pf = check_type_exponent(p)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    k_low = 4.0 * float(n) ** (2.0 - 1.0 / pf)
    k = math.ceil(k_low - 1e-9)
    if k % 2 == 0:
        k += 1
    m = 4 * max(1, math.ceil(3.0 * float(n) ** (3.0 - 2.0 / pf) / 4.0 - 1e-9))
    while True:
        k_high = min(3.0 * m / (2.0 * float(n) ** (1.0 - 1.0 / pf)), m / 2.0 - 1.0)
        if k <= k_high + 1e-9:
            return m, k
        m += 4


def known_type_constant(space: LpSpace, p, reference_T=None) -> float:
    """Reference Rademacher type constant for the margin comparisons.

    Only analytically safe values are built in: type 1 always has
    constant 1, and exponent-2 spaces have type 2 constant 1.  Anything
    else must be supplied by the caller.
    """
    if reference_T is not None:
        t = float(reference_T)
        if not (math.isfinite(t) and t > 0):
            raise UsageError(f"reference_T must be a positive finite number, got {reference_T!r}")
        return t
    pf = check_type_exponent(p)
    if pf == 1.0:
        return 1.0
    if pf == 2.0 and space.exponent == 2.0:
        return 1.0
    raise UsageError(
        f"no built-in type {pf} constant for exponent {space.exponent}; set reference_T"
    )


def derived_se(pair: PairReport) -> float:
    """First-order std error of the derived constant under a MC plan."""
    if pair.derived_constant is None or pair.derived_constant == 0.0:
        return 0.0
    rel = 0.0
    if pair.lhs > 0.0:
        rel += pair.lhs_error / pair.lhs
    if pair.rhs_raw > 0.0:
        rel += pair.rhs_error / pair.rhs_raw
    return pair.derived_constant * rel / pair.exponent_p


@dataclass
class RunReport:
    task: str
    verdict: str
    config: dict
    seed: int
    backend: str
    trials: list
    skipped: int
    min_margin: float | None
    counterexample: dict | None
    extra: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    tool_version: str = TOOL_VERSION
    wall_clock_seconds: float = 0.0


def _trial_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed=[seed, stream]))


def _finish(report: RunReport, started: float) -> RunReport:
    report.wall_clock_seconds = round(time.perf_counter() - started, 6)
    return report


def _config_echo(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["alphabet"] = list(d["alphabet"])
    return d


def _base_report(cfg: ExperimentConfig) -> RunReport:
    return RunReport(
        task=cfg.task,
        verdict="pass",
        config=_config_echo(cfg),
        seed=cfg.seed,
        backend=kernels.get_backend(),
        trials=[],
        skipped=0,
        min_margin=None,
        counterexample=None,
    )


def _note_margin(report: RunReport, margin: float) -> None:
    if report.min_margin is None or margin < report.min_margin:
        report.min_margin = margin


def _upper_trial(cfg: ExperimentConfig, report: RunReport, trial: int, t_ref: float) -> None:
    space = cfg.space()
    domain = TorusDomain(cfg.n, cfg.m)
    f = random_grid(domain, space, _trial_rng(cfg.seed, trial))
    pair = scaled_enflo_pair(f, cfg.p, cfg.plan(stream=trial))
    if pair.derived_constant is None:
        report.skipped += 1
        return
    margin = theorem_margin(pair, t_ref)
    tol = margin_tolerance(pair.derived_constant, 5.0 * t_ref, extra_se=derived_se(pair))
    ok = margin >= -tol
    report.trials.append(
        {
            "trial": trial,
            "label": "upper",
            "lhs": pair.lhs,
            "rhs": pair.rhs,
            "constant": pair.derived_constant,
            "margin": margin,
            "ok": ok,
        }
    )
    _note_margin(report, margin)
    if not ok and report.counterexample is None:
        report.verdict = "fail"
        report.counterexample = {
            "trial": trial,
            "label": "upper",
            "margin": margin,
            "values": f.values.tolist(),
        }
    elif not ok:
        report.verdict = "fail"


def _lower_trial(cfg: ExperimentConfig, report: RunReport, trial: int) -> None:
    space = cfg.space()
    domain = TorusDomain(cfg.n, cfg.m)
    rng = _trial_rng(cfg.seed, 1_000_000 + trial)
    vectors = rng.standard_normal((cfg.n, space.coord_len))
    cert = wt.certify_T_le_2pi_tau(space, vectors, cfg.p, domain, cfg.plan(stream=trial))
    if cert.degenerate or cert.tau_ratio is None or cert.type_ratio is None:
        report.skipped += 1
        return
    margin = 2.0 * math.pi * cert.tau_ratio - cert.type_ratio
    tol = margin_tolerance(cert.type_ratio, 2.0 * math.pi * cert.tau_ratio)
    ok = cert.chain_ok and margin >= -tol
    report.trials.append(
        {
            "trial": trial,
            "label": "lower",
            "lhs": cert.type_ratio,
            "rhs": 2.0 * math.pi * cert.tau_ratio,
            "constant": cert.tau_ratio,
            "margin": margin,
            "ok": ok,
        }
    )
    _note_margin(report, margin)
    if not ok:
        report.verdict = "fail"
        if report.counterexample is None:
            report.counterexample = {
                "trial": trial,
                "label": "lower",
                "margin": margin,
                "checks": dict(cert.checks),
                "vectors": vectors.tolist(),
            }


def verify_theorem_suite(cfg: ExperimentConfig) -> RunReport:
    started = time.perf_counter()
    report = _base_report(cfg)
    t_ref = known_type_constant(cfg.space(), cfg.p, cfg.reference_T)
    report.extra["reference_T"] = t_ref
    for trial in range(cfg.trials):
        _upper_trial(cfg, report, trial, t_ref)
    for trial in range(cfg.trials):
        _lower_trial(cfg, report, trial)
    return _finish(report, started)


def verify_witness_suite(cfg: ExperimentConfig) -> RunReport:
    started = time.perf_counter()
    report = _base_report(cfg)
    for trial in range(cfg.trials):
        _lower_trial(cfg, report, trial)
    return _finish(report, started)


def verify_smoothing_suite(cfg: ExperimentConfig) -> RunReport:
    started = time.perf_counter()
    report = _base_report(cfg)
    space = cfg.space()
    domain = TorusDomain(cfg.n, cfg.m)
    bound_coeff = float(cfg.k - 1) ** cfg.p * float(cfg.n) ** (cfg.p - 1.0)
    for trial in range(cfg.trials):
        f = random_grid(domain, space, _trial_rng(cfg.seed, trial))
        pair = operators.smoothing_bound_report(f, cfg.k, cfg.p, cfg.plan(stream=trial))
        margin = operators.smoothing_margin(pair, cfg.k, cfg.n)
        extra_se = pair.lhs_error + bound_coeff * pair.rhs_error
        tol = margin_tolerance(pair.lhs, bound_coeff * pair.rhs_raw, extra_se=extra_se)
        ok = margin >= -tol
        report.trials.append(
            {
                "trial": trial,
                "label": "smoothing",
                "lhs": pair.lhs,
                "rhs": bound_coeff * pair.rhs_raw,
                "constant": pair.derived_constant,
                "margin": margin,
                "ok": ok,
            }
        )
        _note_margin(report, margin)
        if not ok:
            report.verdict = "fail"
            if report.counterexample is None:
                report.counterexample = {
                    "trial": trial,
                    "label": "smoothing",
                    "margin": margin,
                    "values": f.values.tolist(),
                }
    return _finish(report, started)


def verify_composite_smoothing_chain(cfg: ExperimentConfig) -> RunReport:
    """Composite comparison on auto-selected (m, k): for every grid
    function, lhs <= 5^p m^p T^p * rhs_raw, alongside the smoothing
    bound for the same f and the selected window k."""
    started = time.perf_counter()
    report = _base_report(cfg)
    space = cfg.space()
    t_ref = known_type_constant(space, cfg.p, cfg.reference_T)
    m, k = select_parameters(cfg.n, cfg.p)
    report.extra.update({"selected_m": m, "selected_k": k, "reference_T": t_ref})
    domain = TorusDomain(cfg.n, m)
    coeff = (5.0 * float(m) * t_ref) ** cfg.p
    smooth_coeff = float(k - 1) ** cfg.p * float(cfg.n) ** (cfg.p - 1.0)
    for trial in range(cfg.trials):
        f = random_grid(domain, space, _trial_rng(cfg.seed, trial))
        pair = scaled_enflo_pair(f, cfg.p, cfg.plan(stream=trial))
        margin = coeff * pair.rhs_raw - pair.lhs
        extra_se = pair.lhs_error + coeff * pair.rhs_error
        tol = margin_tolerance(pair.lhs, coeff * pair.rhs_raw, extra_se=extra_se)
        ok = margin >= -tol

        spair = operators.smoothing_bound_report(f, k, cfg.p, cfg.plan(stream=trial))
        smargin = operators.smoothing_margin(spair, k, cfg.n)
        s_se = spair.lhs_error + smooth_coeff * spair.rhs_error
        stol = margin_tolerance(spair.lhs, smooth_coeff * spair.rhs_raw, extra_se=s_se)
        sok = smargin >= -stol

        report.trials.append(
            {
                "trial": trial,
                "label": "chain",
                "lhs": pair.lhs,
                "rhs": coeff * pair.rhs_raw,
                "constant": pair.derived_constant,
                "margin": margin,
                "ok": ok,
            }
        )
        report.trials.append(
            {
                "trial": trial,
                "label": "smoothing",
                "lhs": spair.lhs,
                "rhs": smooth_coeff * spair.rhs_raw,
                "constant": spair.derived_constant,
                "margin": smargin,
                "ok": sok,
            }
        )
        _note_margin(report, margin)
        _note_margin(report, smargin)
        if not (ok and sok):
            report.verdict = "fail"
            if report.counterexample is None:
                report.counterexample = {
                    "trial": trial,
                    "label": "chain" if not ok else "smoothing",
                    "margin": margin if not ok else smargin,
                    "values": f.values.tolist(),
                }
    return _finish(report, started)


def estimate_suite(cfg: ExperimentConfig) -> RunReport:
    started = time.perf_counter()
    report = _base_report(cfg)
    space = cfg.space()
    if cfg.task == "estimate_T":
        est = search.maximize_rademacher_ratio(space, cfg.n, cfg.p, cfg.budget(), cfg.plan())
    else:
        est = search.maximize_scaled_enflo_ratio(
            space, cfg.n, cfg.m, cfg.p, cfg.budget(), cfg.plan()
        )
    for tr in est.trace:
        report.trials.append(
            {
                "trial": tr.restart,
                "label": tr.kind,
                "lhs": tr.plan_value,
                "rhs": None,
                "constant": tr.final_value,
                "margin": None,
                "ok": True,
            }
        )
    report.extra.update(
        {
            "best_constant": est.best_constant,
            "scope": est.scope,
            "witness": est.best_witness.tolist(),
        }
    )
    return _finish(report, started)


def oracle_suite(cfg: ExperimentConfig) -> RunReport:
    started = time.perf_counter()
    report = _base_report(cfg)
    ratio, argmax = search.brute_force_tau_oracle(cfg.m, cfg.n, cfg.alphabet, cfg.p)
    report.extra.update(
        {
            "max_ratio": ratio,
            "argmax": None if argmax is None else argmax.tolist(),
        }
    )
    report.trials.append(
        {
            "trial": 0,
            "label": "oracle",
            "lhs": None,
            "rhs": None,
            "constant": ratio,
            "margin": None,
            "ok": True,
        }
    )
    return _finish(report, started)


_SUITES = {
    "estimate_T": estimate_suite,
    "estimate_tau": estimate_suite,
    "verify_theorem": verify_theorem_suite,
    "verify_witness": verify_witness_suite,
    "verify_smoothing": verify_smoothing_suite,
    "verify_chain": verify_composite_smoothing_chain,
    "oracle": oracle_suite,
}


def execute(cfg: ExperimentConfig) -> RunReport:
    validate_config(cfg)
    return _SUITES[cfg.task](cfg)


def report_to_dict(report: RunReport) -> dict:
    return dataclasses.asdict(report)


def report_to_json(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


CSV_COLUMNS = ("trial", "label", "lhs", "rhs", "constant", "margin", "ok")


def report_to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.trials:
        writer.writerow(["" if row[c] is None else row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def write_report(report: RunReport, out_path: str) -> tuple[str, str]:
    """Write the JSON report and its CSV trial summary; returns both paths."""
    json_path = out_path
    base = out_path[:-5] if out_path.endswith(".json") else out_path
    csv_path = base + ".csv"
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_to_csv(report))
    return json_path, csv_path
