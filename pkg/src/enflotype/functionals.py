"""The three type functionals and their paired-moment reports.

Each functional compares a p-th moment on the left against a weighted
sum of p-th moments on the right:

* Rademacher: E |sum_j eps_j v_j|^p  vs  sum_j |v_j|^p.
* Hypercube:  E d(f(eps), f(-eps))^p  vs  sum_j E d(f(eps), f(eps^j))^p,
  where eps^j flips sign j.
* Scaled torus: E_eps Int d(f(x + (m/2) eps), f(x))^p dmu(x)  vs
  m^p sum_j Int d(f(x + e_j), f(x))^p dmu(x).

Because (m/2) eps_j is congruent to m/2 mod m for either sign, the
scaled left side does not depend on eps, so no sign enumeration is
needed there.  A report stores the raw right side and the scale
separately; the derived constant is (lhs / (scale * rhs_raw))^(1/p),
the best constant the pair witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, lattice, space as sp
from .errors import InternalError, UsageError
from .lattice import GridFunction, SamplingPlan, TorusDomain
from .space import LpSpace


@dataclass(frozen=True)
class PairReport:
    lhs: float
    rhs_raw: float
    exponent_p: float
    scale: float
    derived_constant: float | None
    lhs_error: float = 0.0
    rhs_error: float = 0.0

    @property
    def rhs(self) -> float:
        return self.scale * self.rhs_raw


def check_type_exponent(p) -> float:
    try:
        pf = float(p)
    except (TypeError, ValueError):
        raise UsageError(f"p must be a number, got {p!r}") from None
    if not (1.0 <= pf <= 2.0):
        raise UsageError(f"type exponent p must satisfy 1 <= p <= 2, got {p!r}")
    return pf


def check_moment_exponent(p) -> float:
    try:
        pf = float(p)
    except (TypeError, ValueError):
        raise UsageError(f"p must be a number, got {p!r}") from None
    if not (pf >= 1.0 and math.isfinite(pf)):
        raise UsageError(f"moment exponent p must be a finite number >= 1, got {p!r}")
    return pf


def _derive(lhs: float, rhs_raw: float, scale: float, p: float) -> float | None:
    if rhs_raw <= 0.0:
        return None
    return (lhs / (scale * rhs_raw)) ** (1.0 / p)


def rademacher_pair(space: LpSpace, vectors, p, plan: SamplingPlan) -> PairReport:
    """Paired moments of the Rademacher sum of a finite vector tuple."""
    pf = check_type_exponent(p)
    mat = sp.as_matrix(space, vectors)
    n = mat.shape[0]
    rhs = kernels.fold(sp.norm_pows(space, mat, pf))
    if plan.is_exhaustive:
        plan.require_capacity(1 << n, f"{{-1, +1}}^{n}")
        combos = kernels.sign_combos(lattice.enumerate_signs(n), mat)
        lhs, lhs_err = kernels.exact_mean(sp.norm_pows(space, combos, pf)), 0.0
    else:
        combos = kernels.sign_combos(lattice.mc_signs(n, plan, plan.rng()), mat)
        lhs, lhs_err = kernels.mean_and_se(sp.norm_pows(space, combos, pf))
    if rhs == 0.0 and plan.is_exhaustive and lhs != 0.0:
        raise InternalError("zero vectors produced a nonzero sign-average")
    return PairReport(lhs, rhs, pf, 1.0, _derive(lhs, rhs, 1.0, pf), lhs_err, 0.0)


def enflo_pair(space: LpSpace, table, p, plan: SamplingPlan) -> PairReport:
    """Paired moments of a function on the sign hypercube {-1, +1}^n.

    ``table`` lists f over the canonical sign enumeration, so it must
    have length 2^n; entry i is the value at the sign vector whose j-th
    sign is +1 iff bit n-1-j of i is set.
    """
    pf = check_type_exponent(p)
    mat = sp.as_matrix(space, table)
    count = mat.shape[0]
    n = count.bit_length() - 1
    if count < 2 or (1 << n) != count:
        raise UsageError(f"table length must be a power of two >= 2, got {count}")
    idx = np.arange(count, dtype=np.int64)
    if plan.is_exhaustive:
        plan.require_capacity(count, f"{{-1, +1}}^{n}")
        lhs, lhs_err = kernels.exact_mean(sp.norm_pows_diff(space, mat, mat[::-1], pf)), 0.0
        rhs = 0.0
        for j in range(n):
            flipped = mat[idx ^ (1 << (n - 1 - j))]
            rhs += kernels.exact_mean(sp.norm_pows_diff(space, mat, flipped, pf))
        rhs_err = 0.0
    else:
        draws = plan.rng().integers(0, count, size=plan.samples, dtype=np.int64)
        base = mat[draws]
        lhs, lhs_err = kernels.mean_and_se(
            sp.norm_pows_diff(space, base, mat[count - 1 - draws], pf)
        )
        totals = np.zeros(plan.samples)
        for j in range(n):
            flipped = mat[draws ^ (1 << (n - 1 - j))]
            totals += sp.norm_pows_diff(space, base, flipped, pf)
        rhs, rhs_err = kernels.mean_and_se(totals)
    return PairReport(lhs, rhs, pf, 1.0, _derive(lhs, rhs, 1.0, pf), lhs_err, rhs_err)


def scaled_enflo_pair(f: GridFunction, p, plan: SamplingPlan) -> PairReport:
    """Paired moments of a grid function under the m-scaled comparison.

    The left side averages d(f(x + (m/2) * 1), f(x))^p over the torus;
    the right side is the sum over axes of the unit-edge moment, carried
    with scale m^p in the report.
    """
    pf = check_type_exponent(p)
    lhs, lhs_err, rhs, rhs_err = _scaled_terms(f.values, f.domain, f.space, pf, plan)
    if plan.is_exhaustive and rhs == 0.0 and lhs != 0.0:
        raise InternalError("edge-constant grid produced a nonzero half-shift average")
    scale = float(f.domain.m) ** pf
    return PairReport(lhs, rhs, pf, scale, _derive(lhs, rhs, scale, pf), lhs_err, rhs_err)


def _scaled_terms(
    values: np.ndarray, domain: TorusDomain, space: LpSpace, pf: float, plan: SamplingPlan
) -> tuple[float, float, float, float]:
    m, n = domain.m, domain.n
    if plan.is_exhaustive:
        plan.require_capacity(domain.size, f"Z_{m}^{n}")
        half = lattice.full_roll(values, domain, np.full(n, m // 2, dtype=np.int64))
        lhs = kernels.exact_mean(sp.norm_pows_diff(space, half, values, pf))
        rhs = 0.0
        for axis in range(n):
            rolled = lattice.axis_roll(values, domain, axis, 1)
            rhs += kernels.exact_mean(sp.norm_pows_diff(space, rolled, values, pf))
        return lhs, 0.0, rhs, 0.0
    idx = lattice.mc_indices(domain, plan, plan.rng())
    base = values[idx]
    half_idx = lattice.shifted_indices(domain, idx, np.full(n, m // 2, dtype=np.int64))
    lhs, lhs_err = kernels.mean_and_se(sp.norm_pows_diff(space, values[half_idx], base, pf))
    totals = np.zeros(idx.size)
    for axis in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[axis] = 1
        totals += sp.norm_pows_diff(space, values[lattice.shifted_indices(domain, idx, e)], base, pf)
    rhs, rhs_err = kernels.mean_and_se(totals)
    return lhs, lhs_err, rhs, rhs_err


def theorem_margin(pair: PairReport, reference_T) -> float:
    """Slack of the upper comparison: 5 * reference_T - derived constant.

    Nonnegative margins (up to tolerance) confirm the two-sided
    equivalence on the upper side for this instance.
    """
    try:
        t = float(reference_T)
    except (TypeError, ValueError):
        raise UsageError(f"reference_T must be a number, got {reference_T!r}") from None
    if not (math.isfinite(t) and t > 0.0):
        raise UsageError(f"reference_T must be a positive finite number, got {reference_T!r}")
    if pair.derived_constant is None:
        raise UsageError("pair is degenerate (zero right side); no constant to compare")
    return 5.0 * t - pair.derived_constant
