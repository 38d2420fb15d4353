"""Finite-dimensional lp spaces, real or complexified.

A point of a real space is a float64 vector of length ``dim``.  A
complexified space stores each complex coordinate as an adjacent
(real, imaginary) pair, so its storage length is ``2 * dim``.  The norm
is the coordinate q-norm of the (real or complex) coordinate moduli,
with ``q = exponent`` in ``[1, inf]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidInputError, UsageError

REAL = "real"
COMPLEXIFIED = "complexified"


@dataclass(frozen=True)
class LpSpace:
    dim: int
    exponent: float
    scalar_mode: str = REAL

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise UsageError(f"dim must be a positive integer, got {self.dim!r}")
        try:
            q = float(self.exponent)
        except (TypeError, ValueError):
            raise UsageError(f"exponent must be a number, got {self.exponent!r}") from None
        if math.isnan(q) or q < 1.0:
            raise UsageError(f"exponent must satisfy 1 <= q <= inf, got {self.exponent!r}")
        object.__setattr__(self, "exponent", q)
        if self.scalar_mode not in (REAL, COMPLEXIFIED):
            raise UsageError(
                f"scalar_mode must be {REAL!r} or {COMPLEXIFIED!r}, got {self.scalar_mode!r}"
            )

    @property
    def is_complex(self) -> bool:
        return self.scalar_mode == COMPLEXIFIED

    @property
    def coord_len(self) -> int:
        """Length of the storage vector: dim for real, 2*dim for complexified."""
        return 2 * self.dim if self.is_complex else self.dim

    def complexified(self) -> "LpSpace":
        """The same (dim, exponent) space with complex scalars."""
        return LpSpace(self.dim, self.exponent, COMPLEXIFIED)


def as_vector(space: LpSpace, coords) -> np.ndarray:
    """Validate and convert one point of the space to a float64 array."""
    v = np.ascontiguousarray(coords, dtype=np.float64)
    if v.ndim != 1 or v.size != space.coord_len:
        raise UsageError(
            f"expected a vector of length {space.coord_len}, got shape {v.shape}"
        )
    if not np.isfinite(v).all():
        raise InvalidInputError("vector has non-finite coordinates")
    return v


def as_matrix(space: LpSpace, vectors) -> np.ndarray:
    """Validate a non-empty sequence of points, returned as (count, coord_len)."""
    rows = [as_vector(space, v) for v in vectors]
    if not rows:
        raise UsageError("expected at least one vector")
    return np.stack(rows)


def norm(space: LpSpace, v) -> float:
    arr = as_vector(space, v)
    return float(
        kernels.row_norm_pows(arr[None, :], space.exponent, 1.0, space.is_complex)[0]
    )


def norm_pows(space: LpSpace, rows: np.ndarray, p: float) -> np.ndarray:
    """norm(row)**p for each row of a (rows, coord_len) batch."""
    return kernels.row_norm_pows(rows, space.exponent, p, space.is_complex)


def norm_pows_diff(space: LpSpace, a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """norm(a_row - b_row)**p for each row."""
    return kernels.row_norm_pows_diff(a, b, space.exponent, p, space.is_complex)


def combine(space: LpSpace, coeffs, vectors) -> np.ndarray:
    """Linear combination sum_i coeffs[i] * vectors[i], accumulated in order."""
    mat = as_matrix(space, vectors)
    c = np.ascontiguousarray(coeffs, dtype=np.float64)
    if c.ndim != 1 or c.size != mat.shape[0]:
        raise UsageError(
            f"expected {mat.shape[0]} coefficients, got shape {c.shape}"
        )
    if not np.isfinite(c).all():
        raise InvalidInputError("coefficients have non-finite entries")
    out = np.zeros(space.coord_len)
    for i in range(c.size):
        out += c[i] * mat[i]
    return out


def unit_rotate(space: LpSpace, v, theta: float) -> np.ndarray:
    """Multiply every complex coordinate by exp(i theta).

    Only defined on complexified spaces; rotation by any theta preserves
    every coordinate modulus and hence the norm.
    """
    if not space.is_complex:
        raise UsageError("unit_rotate needs a complexified space")
    arr = as_vector(space, v)
    c, s = math.cos(theta), math.sin(theta)
    re = arr[0::2]
    im = arr[1::2]
    out = np.empty_like(arr)
    out[0::2] = c * re - s * im
    out[1::2] = s * re + c * im
    return out


def lift_to_complex(space: LpSpace, v) -> np.ndarray:
    """Embed a real vector as a complex vector with zero imaginary parts."""
    if space.is_complex:
        raise UsageError("vector already lives in a complexified space")
    arr = as_vector(space, v)
    out = np.zeros(2 * space.dim)
    out[0::2] = arr
    return out
