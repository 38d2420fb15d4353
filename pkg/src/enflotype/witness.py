"""The exponential witness and the certificate chain built on it.

For vectors v_1..v_n in a complexified space and an m-torus with m
divisible by 4, the witness is f(x) = sum_j exp(2 pi i x_j / m) v_j.
Its rotation table is assembled antisymmetrically, R[j, r + m/2] =
-R[j, r] exactly, so the half-period identities below hold bit for bit,
not just to rounding:

* edge identity: sum_j Int d(f(x+e_j), f(x))^p = |e^(2 pi i/m) - 1|^p
  * sum_j norm(v_j)^p, and the factor is at most (2 pi / m)^p.
* half-shift identity: Int d(f(x + (m/2) 1), f(x))^p = 2^p Int norm(f)^p.
* symmetrization: Int norm(f)^p equals the joint sign-and-point average
  of norm(sum_j eps_j R[j, x_j])^p (each sign pattern is a coordinate
  translation of f), and that average is at least 2^(-p) times the
  Rademacher moment of the v_j by the contraction principle.

Chaining the three links gives T_est <= 2 pi tau_est on the witness,
which :func:`certify_T_le_2pi_tau` packages as a checked report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels, lattice, space as sp
from .errors import UsageError
from .functionals import check_moment_exponent, check_type_exponent, scaled_enflo_pair
from .lattice import GridFunction, SamplingPlan, TorusDomain
from .space import LpSpace
from .tolerance import le_with_slack, rel_close


class CheckResult(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


class SymmetrizationResult(NamedTuple):
    sym_integral: float
    rademacher_lhs: float
    ok: bool


@dataclass(frozen=True, eq=False)
class WitnessReport:
    edge_sum: float
    edge_factor: float
    half_shift_lhs: float
    sym_integral: float
    rademacher_lhs: float
    tau_ratio: float | None
    type_ratio: float | None
    chain_ok: bool
    degenerate: bool
    checks: dict


def _require_quarter_turns(domain: TorusDomain) -> None:
    if domain.m % 4 != 0:
        raise UsageError(
            f"the witness needs m divisible by 4 (quarter turns must be grid shifts), got m={domain.m}"
        )


def _complex_setup(space: LpSpace, vectors) -> tuple[LpSpace, np.ndarray]:
    if space.is_complex:
        return space, sp.as_matrix(space, vectors)
    lifted = [sp.lift_to_complex(space, v) for v in vectors]
    if not lifted:
        raise UsageError("expected at least one vector")
    return space.complexified(), np.stack(lifted)


def rotation_table(space: LpSpace, vectors, domain: TorusDomain) -> np.ndarray:
    """Table R of shape (n, m, 2 dim) with R[j, r] = exp(2 pi i r / m) v_j.

    The first half of each row of rotations is computed from cos/sin and
    the second half is its exact negation, so R[j, r + m/2] == -R[j, r]
    holds bitwise.
    """
    _require_quarter_turns(domain)
    cspace, mat = _complex_setup(space, vectors)
    if mat.shape[0] != domain.n:
        raise UsageError(f"expected {domain.n} vectors for a {domain.n}-torus, got {mat.shape[0]}")
    m = domain.m
    table = np.empty((domain.n, m, cspace.coord_len))
    for j in range(domain.n):
        for r in range(m // 2):
            table[j, r] = sp.unit_rotate(cspace, mat[j], 2.0 * math.pi * r / m)
        table[j, m // 2 :] = -table[j, : m // 2]
    return table


def build_witness(space: LpSpace, vectors, domain: TorusDomain) -> GridFunction:
    """Grid function f(x) = sum_j exp(2 pi i x_j / m) v_j."""
    cspace, _ = _complex_setup(space, vectors)
    table = rotation_table(space, vectors, domain)
    return GridFunction(domain, cspace, kernels.witness_assemble(table))


def _norm_integral(f: GridFunction, pf: float, plan: SamplingPlan) -> tuple[float, float]:
    if plan.is_exhaustive:
        plan.require_capacity(f.domain.size, f"Z_{f.domain.m}^{f.domain.n}")
        return kernels.exact_mean(sp.norm_pows(f.space, f.values, pf)), 0.0
    idx = lattice.mc_indices(f.domain, plan, plan.rng())
    return kernels.mean_and_se(sp.norm_pows(f.space, f.values[idx], pf))


def check_edge_identity(
    space: LpSpace, vectors, domain: TorusDomain, p, plan: SamplingPlan
) -> CheckResult:
    """Edge moment of the witness against its closed form."""
    pf = check_type_exponent(p)
    cspace, mat = _complex_setup(space, vectors)
    f = build_witness(space, vectors, domain)
    pair = scaled_enflo_pair(f, pf, plan)
    edge_sum = pair.rhs_raw
    vnorm_sum = kernels.fold(sp.norm_pows(cspace, mat, pf))
    factor = (2.0 * math.sin(math.pi / domain.m)) ** pf  # |exp(2 pi i / m) - 1|^p
    rhs = factor * vnorm_sum
    cap = (2.0 * math.pi / domain.m) ** pf * vnorm_sum
    tol = 4.0 * pair.rhs_error
    ok = rel_close(edge_sum, rhs) or abs(edge_sum - rhs) <= tol
    ok = ok and (le_with_slack(edge_sum, cap) or edge_sum <= cap + tol)
    return CheckResult(edge_sum, rhs, ok)


def check_half_shift_identity(
    space: LpSpace, vectors, domain: TorusDomain, p, plan: SamplingPlan
) -> CheckResult:
    """Half-period moment of the witness against 2^p times its norm moment."""
    pf = check_type_exponent(p)
    f = build_witness(space, vectors, domain)
    pair = scaled_enflo_pair(f, pf, plan)
    integral, int_err = _norm_integral(f, pf, plan)
    rhs = 2.0**pf * integral
    tol = 4.0 * (pair.lhs_error + 2.0**pf * int_err)
    ok = rel_close(pair.lhs, rhs) or abs(pair.lhs - rhs) <= tol
    return CheckResult(pair.lhs, rhs, ok)


def check_contraction_principle(
    space: LpSpace, vectors, coeffs, p, plan: SamplingPlan
) -> CheckResult:
    """E norm(sum eps_j a_j v_j)^p <= max|a_j|^p E norm(sum eps_j v_j)^p."""
    pf = check_moment_exponent(p)
    mat = sp.as_matrix(space, vectors)
    n = mat.shape[0]
    c = np.ascontiguousarray(coeffs, dtype=np.float64)
    if c.shape != (n,):
        raise UsageError(f"expected {n} coefficients, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise UsageError("coefficients must be finite")
    scaled = c[:, None] * mat
    if plan.is_exhaustive:
        plan.require_capacity(1 << n, f"{{-1, +1}}^{n}")
        signs = lattice.enumerate_signs(n)
        lhs = kernels.exact_mean(sp.norm_pows(space, kernels.sign_combos(signs, scaled), pf))
        rhs_base = kernels.exact_mean(sp.norm_pows(space, kernels.sign_combos(signs, mat), pf))
        tol = 0.0
    else:
        signs = lattice.mc_signs(n, plan, plan.rng())
        lhs, lhs_err = kernels.mean_and_se(
            sp.norm_pows(space, kernels.sign_combos(signs, scaled), pf)
        )
        rhs_base, rhs_err = kernels.mean_and_se(
            sp.norm_pows(space, kernels.sign_combos(signs, mat), pf)
        )
        tol = 4.0 * (lhs_err + rhs_err)
    rhs = float(np.max(np.abs(c))) ** pf * rhs_base
    ok = le_with_slack(lhs, rhs) or lhs <= rhs + tol
    return CheckResult(lhs, rhs, ok)


def _sign_point_average(
    table: np.ndarray, cspace: LpSpace, domain: TorusDomain, pf: float, plan: SamplingPlan
) -> tuple[float, float]:
    """Joint average over (eps, x) of norm(sum_j eps_j R[j, x_j])^p."""
    n = domain.n
    if plan.is_exhaustive:
        plan.require_capacity((1 << n) * domain.size, "sign-and-point pairs")
        signs = lattice.enumerate_signs(n)
        per_sign = np.empty(signs.shape[0])
        for s in range(signs.shape[0]):
            flipped = signs[s][:, None, None] * table
            rows = kernels.witness_assemble(flipped)
            per_sign[s] = kernels.exact_mean(sp.norm_pows(cspace, rows, pf))
        return kernels.exact_mean(per_sign), 0.0
    rng = plan.rng()
    signs = lattice.mc_signs(n, plan, rng)
    coords = lattice.decode_indices(domain, lattice.mc_indices(domain, plan, rng))
    acc = np.zeros((plan.samples, cspace.coord_len))
    for j in range(n):
        acc += signs[:, j : j + 1] * table[j][coords[:, j]]
    return kernels.mean_and_se(sp.norm_pows(cspace, acc, pf))


def _rademacher_moment(
    cspace: LpSpace, mat: np.ndarray, pf: float, plan: SamplingPlan
) -> tuple[float, float]:
    n = mat.shape[0]
    if plan.is_exhaustive:
        plan.require_capacity(1 << n, f"{{-1, +1}}^{n}")
        combos = kernels.sign_combos(lattice.enumerate_signs(n), mat)
        return kernels.exact_mean(sp.norm_pows(cspace, combos, pf)), 0.0
    combos = kernels.sign_combos(lattice.mc_signs(n, plan, plan.rng()), mat)
    return kernels.mean_and_se(sp.norm_pows(cspace, combos, pf))


def check_symmetrization(
    space: LpSpace, vectors, domain: TorusDomain, p, plan: SamplingPlan
) -> SymmetrizationResult:
    """Norm moment of the witness against the symmetrized sign average.

    Part (a): the joint (eps, x) average equals Int norm(f)^p, because
    flipping sign j is the translation x_j -> x_j + m/2 of the grid.
    Part (b): that average is at least 2^(-p) times the Rademacher
    moment of the vectors.
    """
    pf = check_type_exponent(p)
    _require_quarter_turns(domain)
    cspace, mat = _complex_setup(space, vectors)
    table = rotation_table(space, vectors, domain)
    f = GridFunction(domain, cspace, kernels.witness_assemble(table))
    sym_integral, sym_err = _norm_integral(f, pf, plan)
    dist_lhs, dist_err = _sign_point_average(table, cspace, domain, pf, plan)
    rad_lhs, rad_err = _rademacher_moment(cspace, mat, pf, plan)
    tol_a = 4.0 * (sym_err + dist_err)
    ok_a = rel_close(dist_lhs, sym_integral) or abs(dist_lhs - sym_integral) <= tol_a
    lower = 2.0**-pf * rad_lhs
    tol_b = 4.0 * (dist_err + 2.0**-pf * rad_err)
    ok_b = le_with_slack(lower, dist_lhs) or lower <= dist_lhs + tol_b
    return SymmetrizationResult(sym_integral, rad_lhs, ok_a and ok_b)


def certify_T_le_2pi_tau(
    space: LpSpace, vectors, p, domain: TorusDomain, plan: SamplingPlan
) -> WitnessReport:
    """Run the full witness chain and report every link.

    Real inputs are lifted to the complexified space first.  The report
    is degenerate when all vectors are zero; the ratios are then
    undefined and only the identity links are asserted.
    """
    pf = check_type_exponent(p)
    _require_quarter_turns(domain)
    cspace, mat = _complex_setup(space, vectors)
    if mat.shape[0] != domain.n:
        raise UsageError(f"expected {domain.n} vectors for a {domain.n}-torus, got {mat.shape[0]}")
    table = rotation_table(space, vectors, domain)
    f = GridFunction(domain, cspace, kernels.witness_assemble(table))
    m = domain.m

    pair = scaled_enflo_pair(f, pf, plan)
    vnorm_sum = kernels.fold(sp.norm_pows(cspace, mat, pf))
    degenerate = vnorm_sum == 0.0

    # edge link
    factor = (2.0 * math.sin(math.pi / m)) ** pf
    edge_rhs = factor * vnorm_sum
    edge_cap = (2.0 * math.pi / m) ** pf * vnorm_sum
    edge_tol = 4.0 * pair.rhs_error
    edge_ok = rel_close(pair.rhs_raw, edge_rhs) or abs(pair.rhs_raw - edge_rhs) <= edge_tol
    edge_ok = edge_ok and (le_with_slack(pair.rhs_raw, edge_cap) or pair.rhs_raw <= edge_cap + edge_tol)

    # half-shift link
    sym_integral, sym_err = _norm_integral(f, pf, plan)
    half_rhs = 2.0**pf * sym_integral
    half_tol = 4.0 * (pair.lhs_error + 2.0**pf * sym_err)
    half_ok = rel_close(pair.lhs, half_rhs) or abs(pair.lhs - half_rhs) <= half_tol

    # symmetrization link
    dist_lhs, dist_err = _sign_point_average(table, cspace, domain, pf, plan)
    rad_lhs, rad_err = _rademacher_moment(cspace, mat, pf, plan)
    tol_a = 4.0 * (sym_err + dist_err)
    sym_ok = rel_close(dist_lhs, sym_integral) or abs(dist_lhs - sym_integral) <= tol_a
    lower = 2.0**-pf * rad_lhs
    tol_b = 4.0 * (dist_err + 2.0**-pf * rad_err)
    sym_ok = sym_ok and (le_with_slack(lower, dist_lhs) or lower <= dist_lhs + tol_b)

    tau_ratio = pair.derived_constant
    type_ratio = None if degenerate or vnorm_sum == 0.0 else (rad_lhs / vnorm_sum) ** (1.0 / pf)

    if degenerate:
        final_ok = True
    elif tau_ratio is None or type_ratio is None:
        final_ok = False
    else:
        bound = 2.0 * math.pi * tau_ratio
        final_ok = type_ratio <= bound + 1e-8 * max(1.0, type_ratio, bound)

    checks = {
        "edge_identity": bool(edge_ok),
        "half_shift_identity": bool(half_ok),
        "symmetrization": bool(sym_ok),
        "type_le_2pi_tau": bool(final_ok),
    }
    return WitnessReport(
        edge_sum=pair.rhs_raw,
        edge_factor=factor,
        half_shift_lhs=pair.lhs,
        sym_integral=sym_integral,
        rademacher_lhs=rad_lhs,
        tau_ratio=tau_ratio,
        type_ratio=type_ratio,
        chain_ok=all(checks.values()),
        degenerate=degenerate,
        checks=checks,
    )
