"""Randomized maximization of the derived constants, plus a brute-force
oracle for cross-checking on tiny instances.

The climbers are restarted Gaussian hill searches.  Proposals are
evaluated under the caller's sampling plan with draws fixed per restart
(common random numbers), and every restart's best candidate is then
re-evaluated under an exhaustive plan whenever it fits the cap, so the
reported best constant never rests on a lucky sample.  Restart r uses
the generator keyed by (seed, r); adding restarts never changes the
candidates produced by earlier ones, so the reported constant is
monotone in the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, lattice, space as sp, witness as wt
from .errors import CapacityError, InternalError, UsageError
from .functionals import _scaled_terms, check_type_exponent
from .lattice import GridFunction, SamplingPlan, TorusDomain
from .space import LpSpace


@dataclass(frozen=True)
class SearchBudget:
    restarts: int
    steps_per_restart: int
    seed: int
    step_scale: float = 0.5
    cooling: float = 0.9
    patience: int = 10

    def __post_init__(self):
        if not isinstance(self.restarts, int) or self.restarts < 1:
            raise UsageError(f"restarts must be a positive integer, got {self.restarts!r}")
        if not isinstance(self.steps_per_restart, int) or self.steps_per_restart < 0:
            raise UsageError(
                f"steps_per_restart must be a nonnegative integer, got {self.steps_per_restart!r}"
            )
        if not isinstance(self.seed, int):
            raise UsageError("budget seed must be an integer")
        if not (self.step_scale > 0.0 and math.isfinite(self.step_scale)):
            raise UsageError(f"step_scale must be positive, got {self.step_scale!r}")
        if not (0.0 < self.cooling < 1.0):
            raise UsageError(f"cooling must lie in (0, 1), got {self.cooling!r}")
        if not isinstance(self.patience, int) or self.patience < 1:
            raise UsageError(f"patience must be a positive integer, got {self.patience!r}")

    def rng(self, restart: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(seed=[self.seed, restart]))


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    kind: str
    plan_value: float | None
    final_value: float | None


@dataclass(frozen=True, eq=False)
class EstimateReport:
    best_constant: float
    best_witness: np.ndarray
    trace: tuple[RestartTrace, ...]
    scope: dict
    plan: SamplingPlan | None = None
    budget: SearchBudget | None = None


def _climb(state, value_of, perturb, budget: SearchBudget, rng) -> tuple[object, float]:
    best, best_val = state, value_of(state)
    sigma = budget.step_scale
    fails = 0
    for _ in range(budget.steps_per_restart):
        cand = perturb(best, sigma, rng)
        if cand is None:
            fails += 1
        else:
            val = value_of(cand)
            if val > best_val:
                best, best_val = cand, val
                fails = 0
            else:
                fails += 1
        if fails >= budget.patience:
            sigma *= budget.cooling
            fails = 0
    return best, best_val


def maximize_rademacher_ratio(
    space: LpSpace, n: int, p, budget: SearchBudget, plan: SamplingPlan
) -> EstimateReport:
    """Search vector tuples of length n for the largest Rademacher ratio."""
    pf = check_type_exponent(p)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    L = space.coord_len

    if plan.is_exhaustive:
        plan.require_capacity(1 << n, f"{{-1, +1}}^{n}")
        plan_signs = lattice.enumerate_signs(n)
    else:
        plan_signs = lattice.mc_signs(n, plan, plan.rng())
    final_signs = lattice.enumerate_signs(n) if (1 << n) <= plan.cap else plan_signs

    def normalize(mat):
        s = kernels.fold(sp.norm_pows(space, mat, pf))
        if s <= 0.0 or not math.isfinite(s):
            return None
        return mat / s ** (1.0 / pf)

    def ratio(mat, signs) -> float:
        lhs = kernels.exact_mean(sp.norm_pows(space, kernels.sign_combos(signs, mat), pf))
        rhs = kernels.fold(sp.norm_pows(space, mat, pf))
        return (lhs / rhs) ** (1.0 / pf)

    def value_of(mat) -> float:
        return ratio(mat, plan_signs)

    def perturb(mat, sigma, rng):
        return normalize(mat + sigma * rng.standard_normal(mat.shape))

    seeded = np.zeros((n, L))
    for j in range(n):
        col = 2 * (j % space.dim) if space.is_complex else j % space.dim
        seeded[j, col] = 1.0

    candidates = []
    trace = []
    for r in range(budget.restarts):
        rng = budget.rng(r)
        if r == 0:
            start, kind = normalize(seeded), "seeded"
        else:
            start, kind = normalize(rng.standard_normal((n, L))), "random"
        if start is None:
            start, kind = normalize(rng.standard_normal((n, L))), "random"
        if start is None:
            continue
        best, plan_val = _climb(start, value_of, perturb, budget, rng)
        final_val = ratio(best, final_signs)
        candidates.append((final_val, r, best))
        trace.append(RestartTrace(r, kind, plan_val, final_val))

    if not candidates:
        raise InternalError("no search candidate survived")
    best_val, _, best_mat = max(candidates, key=lambda t: (t[0], -t[1]))
    return EstimateReport(best_val, best_mat.copy(), tuple(trace), {"n": n, "p": pf}, plan, budget)


def maximize_scaled_enflo_ratio(
    space: LpSpace, n: int, m: int, p, budget: SearchBudget, plan: SamplingPlan
) -> EstimateReport:
    """Search grid functions on Z_m^n for the largest scaled ratio."""
    pf = check_type_exponent(p)
    domain = TorusDomain(n, m)
    if m % 4 != 0:
        raise UsageError(f"the search seeds need m divisible by 4, got m={m}")
    if domain.size > plan.cap:
        raise CapacityError(
            f"grid search on {domain.size} points exceeds the cap {plan.cap}"
        )
    L = space.coord_len
    scale = float(m) ** pf
    final_plan = SamplingPlan.exhaustive(cap=plan.cap)

    def ratio(values, eval_plan) -> float | None:
        lhs, _, rhs, _ = _scaled_terms(values, domain, space, pf, eval_plan)
        if rhs <= 0.0:
            return None
        return (lhs / (scale * rhs)) ** (1.0 / pf)

    def gauge(values):
        vals = values - values[0]
        r = ratio(vals, plan)
        if r is None:
            return None
        return vals

    def value_of(values) -> float:
        r = ratio(values, plan)
        return -math.inf if r is None else r

    def perturb(values, sigma, rng):
        return gauge(values + sigma * rng.standard_normal(values.shape))

    coords = lattice.all_points(domain)
    if space.is_complex:
        basis = np.zeros((n, L))
        for j in range(n):
            basis[j, 2 * (j % space.dim)] = 1.0
        table = wt.rotation_table(space, basis, domain)
        seeded = kernels.witness_assemble(table)
    else:
        seeded = np.zeros((domain.size, L))
        for j in range(n):
            seeded[:, j % space.dim] += (coords[:, j] >= m // 2).astype(np.float64)

    candidates = []
    trace = []
    for r in range(budget.restarts):
        rng = budget.rng(r)
        if r == 0:
            start, kind = gauge(seeded), "seeded"
        else:
            start, kind = gauge(rng.standard_normal((domain.size, L))), "random"
        if start is None:
            start, kind = gauge(rng.standard_normal((domain.size, L))), "random"
        if start is None:
            continue
        best, plan_val = _climb(start, value_of, perturb, budget, rng)
        final_val = ratio(best, final_plan)
        if final_val is None:
            continue
        candidates.append((final_val, r, best))
        trace.append(RestartTrace(r, kind, None if plan_val == -math.inf else plan_val, final_val))

    if not candidates:
        raise InternalError("no search candidate survived")
    best_val, _, best_vals = max(candidates, key=lambda t: (t[0], -t[1]))
    return EstimateReport(
        best_val, best_vals.copy(), tuple(trace), {"n": n, "m": m, "p": pf}, plan, budget
    )


def brute_force_tau_oracle(m: int, n: int, alphabet, p) -> tuple[float, np.ndarray | None]:
    """Exact maximum of the scaled ratio over all scalar grid functions
    with values restricted to a finite alphabet.

    Enumerates every f: Z_m^n -> alphabet (at most 2^20 of them) with
    plain numpy arithmetic, independent of the kernel backends, and
    returns the largest ratio with the first maximizing value table in
    enumeration order.  Functions with zero edge sum are skipped; if all
    are skipped the result is (0.0, None).
    """
    pf = check_type_exponent(p)
    domain = TorusDomain(n, m)
    letters = np.ascontiguousarray(sorted(set(float(a) for a in alphabet)), dtype=np.float64)
    if letters.size == 0:
        raise UsageError("alphabet must not be empty")
    if not np.isfinite(letters).all():
        raise UsageError("alphabet values must be finite")
    size = domain.size
    count = letters.size**size
    if count > (1 << 20):
        raise CapacityError(
            f"{letters.size}^{size} = {count} candidate functions exceed the oracle cap {1 << 20}"
        )

    idx = np.arange(size, dtype=np.int64)
    digits = np.arange(count, dtype=np.int64)
    tables = np.empty((count, size))
    for cell in range(size):
        weight = letters.size ** (size - 1 - cell)
        tables[:, cell] = letters[(digits // weight) % letters.size]

    half = lattice.shifted_indices(domain, idx, np.full(n, m // 2, dtype=np.int64))
    lhs = np.mean(np.abs(tables[:, half] - tables) ** pf, axis=1)
    rhs = np.zeros(count)
    for axis in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[axis] = 1
        nbr = lattice.shifted_indices(domain, idx, e)
        rhs += np.mean(np.abs(tables[:, nbr] - tables) ** pf, axis=1)

    defined = rhs > 0.0
    if not defined.any():
        return 0.0, None
    ratios = np.where(defined, lhs / np.where(defined, rhs, 1.0), -np.inf)
    best = int(np.argmax(ratios))
    best_ratio = (ratios[best] / float(m) ** pf) ** (1.0 / pf)
    return float(best_ratio), tables[best].copy()
