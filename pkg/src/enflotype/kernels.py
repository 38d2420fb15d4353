"""Numeric kernels in two interchangeable backends.

The hot loops exist twice: a numba ``@njit`` build and a pure numpy
build.  The active backend is picked at import time from the
``ENFLOTYPE_BACKEND`` environment variable (``"numba"`` or ``"numpy"``;
default is numba when importable, numpy otherwise) and can be switched
at runtime with :func:`set_backend`.  ``ENFLOTYPE_THREADS`` caps the
numba thread pool.

Both builds perform floating point operations in the same order:
reductions use an adjacent-pair folding tree and accumulations run in
ascending index order.  Repeated runs on the same backend are therefore
bit-identical, and the two backends agree to the last bit on all paths
that avoid the libm ``pow`` (exponents in {0.5, 1, 2}).

Value layout: a batch of vectors is a C-contiguous ``(rows, L)``
float64 array.  For a complexified space of dimension d, ``L == 2 d``
and coordinate t occupies columns ``2 t`` (real part) and ``2 t + 1``
(imaginary part).
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import UsageError

ENV_BACKEND = "ENFLOTYPE_BACKEND"
ENV_THREADS = "ENFLOTYPE_THREADS"

# aggregation codes for the norm kernels
Q_GENERAL = 0
Q_ONE = 1
Q_TWO = 2
Q_INF = 3


def q_code_of(q: float) -> int:
    if q == 1.0:
        return Q_ONE
    if q == 2.0:
        return Q_TWO
    if math.isinf(q):
        return Q_INF
    return Q_GENERAL


# ---------------------------------------------------------------------------
# numpy backend


def _fold_np(buf):
    n = buf.size
    if n == 0:
        return 0.0
    b = buf.copy()
    while n > 1:
        h = n // 2
        s = b[0 : 2 * h : 2] + b[1 : 2 * h : 2]
        if n % 2 == 1:
            # odd tail element is carried up one level unchanged
            s = np.concatenate((s, b[n - 1 : n]))
        b = s
        n = b.size
    return float(b[0])


def _pow_p_np(x, p):
    if p == 1.0:
        return x.copy()
    if p == 2.0:
        return x * x
    return x**p


def _pow_ratio_np(s, q, p):
    e = p / q
    if e == 1.0:
        return s.copy()
    if e == 0.5:
        return np.sqrt(s)
    if e == 2.0:
        return s * s
    return s**e


def _colsum_np(a):
    s = a[:, 0].copy()
    for t in range(1, a.shape[1]):
        s += a[:, t]
    return s


def _row_norm_pows_np(vals, is_complex, q_code, q, p):
    if is_complex:
        re = vals[:, 0::2]
        im = vals[:, 1::2]
        if q_code == Q_TWO:
            # sum of squared moduli, no square root needed
            return _pow_ratio_np(_colsum_np(re * re + im * im), 2.0, p)
        mags = np.sqrt(re * re + im * im)
    else:
        if q_code == Q_TWO:
            return _pow_ratio_np(_colsum_np(vals * vals), 2.0, p)
        mags = np.abs(vals)
    if q_code == Q_INF:
        agg = mags[:, 0].copy()
        for t in range(1, mags.shape[1]):
            np.maximum(agg, mags[:, t], out=agg)
        return _pow_p_np(agg, p)
    if q_code == Q_ONE:
        return _pow_p_np(_colsum_np(mags), p)
    return _pow_ratio_np(_colsum_np(mags**q), q, p)


def _row_norm_pows_diff_np(a, b, is_complex, q_code, q, p):
    return _row_norm_pows_np(a - b, is_complex, q_code, q, p)


def _box_pass_np(vals, m, n, axis, offsets):
    rows, L = vals.shape
    arr = vals.reshape((m,) * n + (L,))
    acc = None
    for o in offsets:
        # g(x) = f(x + o e_axis) on the torus
        shifted = np.roll(arr, -int(o), axis=axis)
        acc = shifted.copy() if acc is None else acc + shifted
    return np.ascontiguousarray(acc.reshape(rows, L))


def _sign_combos_np(signs, vectors):
    rows = signs.shape[0]
    n, L = vectors.shape
    out = np.zeros((rows, L))
    for j in range(n):
        out += signs[:, j : j + 1] * vectors[j]
    return out


def _witness_assemble_np(table):
    n, m, L = table.shape
    rows = m**n
    idx = np.arange(rows)
    out = np.zeros((rows, L))
    for j in range(n):
        stride = m ** (n - 1 - j)
        coords = (idx // stride) % m
        out += table[j][coords]
    return out


_NUMPY_IMPL = {
    "fold": _fold_np,
    "row_norm_pows": _row_norm_pows_np,
    "row_norm_pows_diff": _row_norm_pows_diff_np,
    "box_pass": _box_pass_np,
    "sign_combos": _sign_combos_np,
    "witness_assemble": _witness_assemble_np,
}


# ---------------------------------------------------------------------------
# numba backend

_IMPLS: dict[str, dict] = {"numpy": _NUMPY_IMPL}

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an install-time dependency
    njit = None

if njit is not None:

    @njit(cache=True)
    def _fold_nb(buf):
        n = buf.size
        if n == 0:
            return 0.0
        b = buf.copy()
        while n > 1:
            h = n // 2
            for i in range(h):
                b[i] = b[2 * i] + b[2 * i + 1]
            if n % 2 == 1:
                b[h] = b[n - 1]
                n = h + 1
            else:
                n = h
        return b[0]

    @njit(cache=True)
    def _pow_p_nb(x, p):
        if p == 1.0:
            return x
        if p == 2.0:
            return x * x
        return x**p

    @njit(cache=True)
    def _pow_ratio_nb(s, q, p):
        e = p / q
        if e == 1.0:
            return s
        if e == 0.5:
            return math.sqrt(s)
        if e == 2.0:
            return s * s
        return s**e

    @njit(cache=True)
    def _row_norm_pows_nb(vals, is_complex, q_code, q, p):
        rows, L = vals.shape
        d = L // 2 if is_complex else L
        out = np.empty(rows)
        for i in range(rows):
            if q_code == 2:
                s = 0.0
                for t in range(d):
                    if is_complex:
                        a = vals[i, 2 * t]
                        b = vals[i, 2 * t + 1]
                        s += a * a + b * b
                    else:
                        a = vals[i, t]
                        s += a * a
                out[i] = _pow_ratio_nb(s, 2.0, p)
            elif q_code == 3:
                agg = 0.0
                for t in range(d):
                    if is_complex:
                        a = vals[i, 2 * t]
                        b = vals[i, 2 * t + 1]
                        mag = math.sqrt(a * a + b * b)
                    else:
                        mag = abs(vals[i, t])
                    if mag > agg:
                        agg = mag
                out[i] = _pow_p_nb(agg, p)
            elif q_code == 1:
                s = 0.0
                for t in range(d):
                    if is_complex:
                        a = vals[i, 2 * t]
                        b = vals[i, 2 * t + 1]
                        s += math.sqrt(a * a + b * b)
                    else:
                        s += abs(vals[i, t])
                out[i] = _pow_p_nb(s, p)
            else:
                s = 0.0
                for t in range(d):
                    if is_complex:
                        a = vals[i, 2 * t]
                        b = vals[i, 2 * t + 1]
                        mag = math.sqrt(a * a + b * b)
                    else:
                        mag = abs(vals[i, t])
                    s += mag**q
                out[i] = _pow_ratio_nb(s, q, p)
        return out

    @njit(cache=True)
    def _row_norm_pows_diff_nb(a, b, is_complex, q_code, q, p):
        return _row_norm_pows_nb(a - b, is_complex, q_code, q, p)

    @njit(cache=True)
    def _box_pass_nb(vals, m, n, axis, offsets):
        rows, L = vals.shape
        stride = 1
        for _ in range(n - 1 - axis):
            stride *= m
        block = stride * m
        out = np.zeros((rows, L))
        for idx in range(rows):
            c = (idx % block) // stride
            base = idx - c * stride
            for oi in range(offsets.size):
                cc = (c + offsets[oi]) % m
                src = base + cc * stride
                for l in range(L):
                    out[idx, l] += vals[src, l]
        return out

    @njit(cache=True)
    def _sign_combos_nb(signs, vectors):
        rows = signs.shape[0]
        n, L = vectors.shape
        out = np.zeros((rows, L))
        for j in range(n):
            for s in range(rows):
                sj = signs[s, j]
                for l in range(L):
                    out[s, l] += sj * vectors[j, l]
        return out

    @njit(cache=True)
    def _witness_assemble_nb(table):
        n, m, L = table.shape
        rows = m**n
        out = np.zeros((rows, L))
        for j in range(n):
            stride = m ** (n - 1 - j)
            for idx in range(rows):
                c = (idx // stride) % m
                for l in range(L):
                    out[idx, l] += table[j, c, l]
        return out

    _IMPLS["numba"] = {
        "fold": _fold_nb,
        "row_norm_pows": _row_norm_pows_nb,
        "row_norm_pows_diff": _row_norm_pows_diff_nb,
        "box_pass": _box_pass_nb,
        "sign_combos": _sign_combos_nb,
        "witness_assemble": _witness_assemble_nb,
    }

    threads = os.environ.get(ENV_THREADS)
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
        except (ValueError, RuntimeError):
            pass


def _default_backend() -> str:
    requested = os.environ.get(ENV_BACKEND, "").strip().lower()
    if requested:
        if requested not in _IMPLS:
            known = ", ".join(sorted(_IMPLS))
            raise UsageError(f"{ENV_BACKEND}={requested!r} is not available (choose from: {known})")
        return requested
    return "numba" if "numba" in _IMPLS else "numpy"


_active = _default_backend()


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _IMPLS:
        known = ", ".join(sorted(_IMPLS))
        raise UsageError(f"unknown backend {name!r} (choose from: {known})")
    _active = name


# ---------------------------------------------------------------------------
# dispatch wrappers; these normalize dtypes so both backends see identical input


def _as_f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def fold(values) -> float:
    """Sum a 1-d array with the adjacent-pair folding tree."""
    return float(_IMPLS[_active]["fold"](_as_f64(np.ravel(values))))


def exact_mean(values) -> float:
    v = np.ravel(values)
    if v.size == 0:
        raise UsageError("mean of an empty array is undefined")
    return fold(v) / v.size


def mean_and_se(values) -> tuple[float, float]:
    """Sample mean and standard error of the mean."""
    v = _as_f64(np.ravel(values))
    if v.size == 0:
        raise UsageError("mean of an empty array is undefined")
    mean = fold(v) / v.size
    if v.size == 1:
        return mean, 0.0
    dev = v - mean
    var = fold(dev * dev) / (v.size - 1)
    return mean, math.sqrt(var / v.size)


def row_norm_pows(vals, q: float, p: float, is_complex: bool) -> np.ndarray:
    """Per-row ``norm(row)**p`` for the coordinate q-norm, shape (rows,)."""
    v = _as_f64(vals)
    return _IMPLS[_active]["row_norm_pows"](v, bool(is_complex), q_code_of(q), float(q), float(p))


def row_norm_pows_diff(a, b, q: float, p: float, is_complex: bool) -> np.ndarray:
    """Per-row ``norm(a_row - b_row)**p``, shape (rows,)."""
    return _IMPLS[_active]["row_norm_pows_diff"](
        _as_f64(a), _as_f64(b), bool(is_complex), q_code_of(q), float(q), float(p)
    )


def box_pass(vals, m: int, n: int, axis: int, offsets) -> np.ndarray:
    """Sum of axis-shifted copies: out(x) = sum_o f(x + o e_axis).

    ``vals`` holds one row per torus point in row-major order (first
    coordinate slowest).  Offsets are applied in ascending array order.
    """
    off = np.ascontiguousarray(offsets, dtype=np.int64)
    if off.size == 0:
        raise UsageError("box_pass needs at least one offset")
    return _IMPLS[_active]["box_pass"](_as_f64(vals), int(m), int(n), int(axis), off)


def sign_combos(signs, vectors) -> np.ndarray:
    """Rows of sum_j signs[s, j] * vectors[j], shape (rows, L)."""
    return _IMPLS[_active]["sign_combos"](_as_f64(signs), _as_f64(vectors))


def witness_assemble(table) -> np.ndarray:
    """Grid rows of f(x) = sum_j table[j, x_j], table shape (n, m, L)."""
    return _IMPLS[_active]["witness_assemble"](_as_f64(table))
