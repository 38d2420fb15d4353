"""Discrete torus domains, sign vectors, structured offset sets, grid
functions, and evaluation plans.

Torus points of ``Z_m^n`` are int64 coordinate vectors taken mod m.
Grid functions store one value row per point in row-major order: the
flat index of x is ``((x_1 m + x_2) m + ...) + x_n``, so the first
coordinate varies slowest.  Sign vectors are float64 arrays over
{-1, +1}; the canonical enumeration of all 2^n of them puts sign j of
row i at ``+1`` iff bit ``n - 1 - j`` of i is set, which makes the
antipode of row i sit at row ``2^n - 1 - i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable

import numpy as np

from . import kernels
from .errors import CapacityError, InvalidInputError, UsageError
from .space import LpSpace

DEFAULT_CAP = 1 << 24

EXHAUSTIVE = "exhaustive"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class TorusDomain:
    n: int
    m: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise UsageError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.m, int) or self.m < 2 or self.m % 2 != 0:
            raise UsageError(f"m must be an even integer >= 2, got {self.m!r}")

    @property
    def size(self) -> int:
        return self.m**self.n


@dataclass(frozen=True)
class SamplingPlan:
    mode: str
    samples: int | None = None
    seed: int | None = None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.mode not in (EXHAUSTIVE, MONTE_CARLO):
            raise UsageError(f"unknown plan mode {self.mode!r}")
        if not isinstance(self.cap, int) or self.cap < 1:
            raise UsageError(f"cap must be a positive integer, got {self.cap!r}")
        if self.mode == MONTE_CARLO:
            if not isinstance(self.samples, int) or self.samples < 1:
                raise UsageError(f"samples must be a positive integer, got {self.samples!r}")
            if not isinstance(self.seed, int):
                raise UsageError("monte carlo plans need an integer seed")

    @classmethod
    def exhaustive(cls, cap: int = DEFAULT_CAP) -> "SamplingPlan":
        return cls(EXHAUSTIVE, cap=cap)

    @classmethod
    def monte_carlo(cls, samples: int, seed: int, cap: int = DEFAULT_CAP) -> "SamplingPlan":
        return cls(MONTE_CARLO, samples=samples, seed=seed, cap=cap)

    @property
    def is_exhaustive(self) -> bool:
        return self.mode == EXHAUSTIVE

    def require_capacity(self, count: int, what: str) -> None:
        if self.is_exhaustive and count > self.cap:
            raise CapacityError(
                f"exhaustive enumeration of {what} needs {count} evaluations, "
                f"cap is {self.cap}"
            )

    def rng(self) -> np.random.Generator:
        """Counter-based generator so draws are a pure function of the seed."""
        return np.random.Generator(np.random.Philox(self.seed))


@dataclass(frozen=True, eq=False)
class GridFunction:
    domain: TorusDomain
    space: LpSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        expected = (self.domain.size, self.space.coord_len)
        if v.shape != expected:
            raise UsageError(f"values must have shape {expected}, got {v.shape}")
        if not np.isfinite(v).all():
            raise InvalidInputError("grid values contain non-finite entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(
        cls, domain: TorusDomain, space: LpSpace, fn: Callable[[np.ndarray], Iterable[float]]
    ) -> "GridFunction":
        pts = all_points(domain)
        vals = np.stack([np.asarray(fn(pts[i]), dtype=np.float64) for i in range(pts.shape[0])])
        return cls(domain, space, vals)

    def value_at(self, point) -> np.ndarray:
        return self.values[point_index(self.domain, point)]


def as_point(domain: TorusDomain, coords) -> np.ndarray:
    pt = np.ascontiguousarray(coords, dtype=np.int64)
    if pt.ndim != 1 or pt.size != domain.n:
        raise UsageError(f"expected {domain.n} coordinates, got shape {pt.shape}")
    return np.mod(pt, domain.m)


def as_signs(n: int, signs) -> np.ndarray:
    s = np.ascontiguousarray(signs, dtype=np.float64)
    if s.ndim != 1 or s.size != n:
        raise UsageError(f"expected {n} signs, got shape {s.shape}")
    if not np.all(np.abs(s) == 1.0):
        raise InvalidInputError("signs must be +1 or -1")
    return s


def shift(domain: TorusDomain, point, offset) -> np.ndarray:
    """point + offset reduced mod m coordinatewise."""
    pt = as_point(domain, point)
    off = np.ascontiguousarray(offset, dtype=np.int64)
    if off.shape != pt.shape:
        raise UsageError(f"offset shape {off.shape} does not match point shape {pt.shape}")
    return np.mod(pt + off, domain.m)


def point_index(domain: TorusDomain, point) -> int:
    pt = as_point(domain, point)
    idx = 0
    for j in range(domain.n):
        idx = idx * domain.m + int(pt[j])
    return idx


def decode_indices(domain: TorusDomain, idx) -> np.ndarray:
    """Flat indices to coordinate rows, shape (count, n)."""
    flat = np.ascontiguousarray(idx, dtype=np.int64)
    out = np.empty((flat.size, domain.n), dtype=np.int64)
    for j in range(domain.n):
        stride = domain.m ** (domain.n - 1 - j)
        out[:, j] = (flat // stride) % domain.m
    return out


def shifted_indices(domain: TorusDomain, idx, offset) -> np.ndarray:
    """Flat indices of x + offset for an array of flat indices of x."""
    flat = np.ascontiguousarray(idx, dtype=np.int64)
    off = np.ascontiguousarray(offset, dtype=np.int64)
    if off.shape != (domain.n,):
        raise UsageError(f"expected an offset of length {domain.n}, got shape {off.shape}")
    out = np.zeros_like(flat)
    for j in range(domain.n):
        stride = domain.m ** (domain.n - 1 - j)
        c = (flat // stride) % domain.m
        out += ((c + off[j]) % domain.m) * stride
    return out


def all_points(domain: TorusDomain) -> np.ndarray:
    """All m^n coordinate rows in flat-index order."""
    return decode_indices(domain, np.arange(domain.size, dtype=np.int64))


def enumerate_signs(n: int) -> np.ndarray:
    """All 2^n sign rows in canonical order, shape (2^n, n) float64."""
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.empty((1 << n, n))
    for j in range(n):
        bit = (idx >> (n - 1 - j)) & 1
        out[:, j] = 2.0 * bit - 1.0
    return out


def mc_signs(n: int, plan: SamplingPlan, rng: np.random.Generator) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size=(plan.samples, n)).astype(np.float64) - 1.0


def mc_indices(domain: TorusDomain, plan: SamplingPlan, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, domain.size, size=plan.samples, dtype=np.int64)


def even_box(k: int, n: int) -> list[tuple[int, ...]]:
    """Even offsets of the open box (-k, k)^n, in lexicographic order.

    k must be odd, so the even points of (-k, k) are -(k-1), ..., k-1
    and there are exactly k of them per axis, k^n in total.
    """
    _check_window(k)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    evens = range(-(k - 1), k, 2)
    return list(product(evens, repeat=n))


def parity_slab(j: int, k: int, n: int) -> list[tuple[int, ...]]:
    """Offsets of [-k, k]^n with coordinate j even and all others odd.

    j is 1-based.  For odd k the even axis has k choices and each odd
    axis has k + 1, giving k (k+1)^(n-1) offsets, in lexicographic order.
    """
    _check_window(k)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    if not isinstance(j, int) or not 1 <= j <= n:
        raise UsageError(f"axis j must satisfy 1 <= j <= {n}, got {j!r}")
    evens = range(-(k - 1), k, 2)
    odds = range(-k, k + 1, 2)
    per_axis = [evens if axis == j - 1 else odds for axis in range(n)]
    return list(product(*per_axis))


def _check_window(k: int) -> None:
    if not isinstance(k, int) or k < 1 or k % 2 == 0:
        raise UsageError(f"window size k must be a positive odd integer, got {k!r}")


def expect_signs(n: int, plan: SamplingPlan, evaluator) -> tuple[float, float]:
    """Mean of evaluator(signs) over uniform sign vectors, with std error.

    Exhaustive plans enumerate all 2^n sign vectors (zero error); monte
    carlo plans draw ``plan.samples`` of them.
    """
    if plan.is_exhaustive:
        plan.require_capacity(1 << n, f"{{-1, +1}}^{n}")
        rows = enumerate_signs(n)
        vals = np.array([float(evaluator(rows[i])) for i in range(rows.shape[0])])
        return kernels.exact_mean(vals), 0.0
    rows = mc_signs(n, plan, plan.rng())
    vals = np.array([float(evaluator(rows[i])) for i in range(rows.shape[0])])
    return kernels.mean_and_se(vals)


def integrate_torus(domain: TorusDomain, plan: SamplingPlan, evaluator) -> tuple[float, float]:
    """Mean of evaluator(point) over the uniform measure on Z_m^n."""
    if plan.is_exhaustive:
        plan.require_capacity(domain.size, f"Z_{domain.m}^{domain.n}")
        pts = all_points(domain)
        vals = np.array([float(evaluator(pts[i])) for i in range(pts.shape[0])])
        return kernels.exact_mean(vals), 0.0
    pts = decode_indices(domain, mc_indices(domain, plan, plan.rng()))
    vals = np.array([float(evaluator(pts[i])) for i in range(pts.shape[0])])
    return kernels.mean_and_se(vals)


def random_grid(
    domain: TorusDomain, space: LpSpace, rng: np.random.Generator, scale: float = 1.0
) -> GridFunction:
    """Gaussian random grid function, mainly for randomized verification."""
    if domain.size > DEFAULT_CAP:
        raise CapacityError(
            f"materializing a grid on {domain.size} points exceeds the cap {DEFAULT_CAP}"
        )
    vals = scale * rng.standard_normal((domain.size, space.coord_len))
    return GridFunction(domain, space, vals)


def axis_roll(values: np.ndarray, domain: TorusDomain, axis: int, delta: int) -> np.ndarray:
    """Rows of f(x + delta e_axis) for a full-grid value table."""
    rows, L = values.shape
    arr = values.reshape((domain.m,) * domain.n + (L,))
    return np.ascontiguousarray(np.roll(arr, -int(delta), axis=axis).reshape(rows, L))


def full_roll(values: np.ndarray, domain: TorusDomain, deltas) -> np.ndarray:
    """Rows of f(x + delta) for a full coordinate offset."""
    off = np.ascontiguousarray(deltas, dtype=np.int64)
    if off.shape != (domain.n,):
        raise UsageError(f"expected an offset of length {domain.n}, got shape {off.shape}")
    rows, L = values.shape
    arr = values.reshape((domain.m,) * domain.n + (L,))
    arr = np.roll(arr, tuple(-int(d) for d in off), axis=tuple(range(domain.n)))
    return np.ascontiguousarray(arr.reshape(rows, L))
