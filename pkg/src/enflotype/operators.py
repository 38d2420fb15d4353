"""Averaging operators on grid functions.

``smooth`` averages f over the even offsets of the open box (-k, k)^n
shifted to each point; ``project`` averages over the slab of offsets in
[-k, k]^n whose coordinate j is even while all others are odd.  Both
sets are separable products, so the operators factor into one
normalized box pass per axis; passes run in ascending axis order with
ascending offsets, which keeps results reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from . import kernels, lattice, space as sp
from .errors import UsageError
from .functionals import PairReport, check_moment_exponent
from .lattice import GridFunction, SamplingPlan, _check_window


def smooth(f: GridFunction, k: int) -> GridFunction:
    """Box average over even offsets: k taps per axis, k odd.

    With k = 1 the only offset is 0 and the function is returned
    value-identical.
    """
    _check_window(k)
    offsets = np.arange(-(k - 1), k, 2, dtype=np.int64)
    vals = f.values
    for axis in range(f.domain.n):
        vals = kernels.box_pass(vals, f.domain.m, f.domain.n, axis, offsets) / k
    return GridFunction(f.domain, f.space, vals)


def project(f: GridFunction, j: int, k: int) -> GridFunction:
    """Parity-slab average: axis j uses the k even offsets of [-k, k],
    every other axis the k + 1 odd ones.  j is 1-based."""
    _check_window(k)
    if not isinstance(j, int) or not 1 <= j <= f.domain.n:
        raise UsageError(f"axis j must satisfy 1 <= j <= {f.domain.n}, got {j!r}")
    evens = np.arange(-(k - 1), k, 2, dtype=np.int64)
    odds = np.arange(-k, k + 1, 2, dtype=np.int64)
    vals = f.values
    for axis in range(f.domain.n):
        offsets = evens if axis == j - 1 else odds
        vals = kernels.box_pass(vals, f.domain.m, f.domain.n, axis, offsets) / offsets.size
    return GridFunction(f.domain, f.space, vals)


def smoothing_bound_report(f: GridFunction, k: int, p, plan: SamplingPlan) -> PairReport:
    """Paired moments for the smoothing comparison.

    lhs = Int d(smooth(f, k)(x), f(x))^p dmu(x); rhs_raw is the sum over
    axes of the unit-edge moment Int d(f(x + e_j), f(x))^p dmu(x).  The
    bound lhs <= (k-1)^p n^(p-1) rhs_raw holds for every grid function;
    use :func:`smoothing_margin` for the slack.
    """
    pf = check_moment_exponent(p)
    _check_window(k)
    g = smooth(f, k)
    domain, space = f.domain, f.space
    if plan.is_exhaustive:
        plan.require_capacity(domain.size, f"Z_{domain.m}^{domain.n}")
        lhs, lhs_err = kernels.exact_mean(sp.norm_pows_diff(space, g.values, f.values, pf)), 0.0
        rhs = 0.0
        for axis in range(domain.n):
            rolled = lattice.axis_roll(f.values, domain, axis, 1)
            rhs += kernels.exact_mean(sp.norm_pows_diff(space, rolled, f.values, pf))
        rhs_err = 0.0
    else:
        idx = lattice.mc_indices(domain, plan, plan.rng())
        base = f.values[idx]
        lhs, lhs_err = kernels.mean_and_se(sp.norm_pows_diff(space, g.values[idx], base, pf))
        totals = np.zeros(idx.size)
        for axis in range(domain.n):
            e = np.zeros(domain.n, dtype=np.int64)
            e[axis] = 1
            shifted = f.values[lattice.shifted_indices(domain, idx, e)]
            totals += sp.norm_pows_diff(space, shifted, base, pf)
        rhs, rhs_err = kernels.mean_and_se(totals)
    derived = None if rhs <= 0.0 else (lhs / rhs) ** (1.0 / pf)
    return PairReport(lhs, rhs, pf, 1.0, derived, lhs_err, rhs_err)


def smoothing_margin(pair: PairReport, k: int, n: int) -> float:
    """(k-1)^p n^(p-1) rhs_raw - lhs; nonnegative up to tolerance."""
    _check_window(k)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    p = pair.exponent_p
    bound = float(k - 1) ** p * float(n) ** (p - 1.0) * pair.rhs_raw
    return bound - pair.lhs
