"""Compare the numba and numpy kernel backends.

Runs each hot kernel on representative shapes plus two end-to-end
pipelines, timing both backends and printing a speedup table.  The
numba backend is warmed up first so compilation is excluded.

Usage:
    python3 benchmarks/bench_backends.py [--repeats N] [--scale small|large]
"""

import argparse
import statistics
import time

import numpy as np

from enflotype import (
    LpSpace,
    SamplingPlan,
    TorusDomain,
    certify_T_le_2pi_tau,
    scaled_enflo_pair,
)
from enflotype import kernels
from enflotype.lattice import enumerate_signs, random_grid

EXH = SamplingPlan.exhaustive()


def _cases(scale: str):
    rng = np.random.Generator(np.random.Philox(seed=20240815))
    big = scale == "large"
    rows = 1 << (16 if big else 13)
    vec = rng.standard_normal(rows * 4)
    mat = rng.standard_normal((rows, 8))
    mat2 = rng.standard_normal((rows, 8))

    box_m, box_n = (16, 4) if big else (8, 4)
    box_vals = rng.standard_normal((box_m**box_n, 4))
    offsets = np.array([-2, 0, 2], dtype=np.int64)

    sign_n = 14 if big else 10
    signs = enumerate_signs(sign_n).astype(np.float64)
    sign_vecs = rng.standard_normal((sign_n, 8))

    table_m = 32 if big else 16
    table = rng.standard_normal((4, table_m, 6))

    pair_dom = TorusDomain(3, 16 if big else 8)
    pair_space = LpSpace(4, 2.0)
    pair_f = random_grid(pair_dom, pair_space, rng)

    cert_space = LpSpace(3, 2.0)
    cert_dom = TorusDomain(3, 16)
    cert_vecs = rng.standard_normal((3, 3))

    return [
        (f"fold ({vec.size} values)", lambda: kernels.fold(vec)),
        (f"mean_and_se ({vec.size} values)", lambda: kernels.mean_and_se(vec)),
        (f"row_norm_pows q=2 p=2 ({rows}x8)", lambda: kernels.row_norm_pows(mat, 2.0, 2.0, False)),
        (f"row_norm_pows q=2 p=1.5 ({rows}x8)", lambda: kernels.row_norm_pows(mat, 2.0, 1.5, False)),
        (f"row_norm_pows_diff q=1 p=1 ({rows}x8)", lambda: kernels.row_norm_pows_diff(mat, mat2, 1.0, 1.0, False)),
        (f"box_pass ({box_m}^{box_n} grid, 3 taps)", lambda: kernels.box_pass(box_vals, box_m, box_n, 0, offsets)),
        (f"sign_combos (2^{sign_n} x {sign_n})", lambda: kernels.sign_combos(signs, sign_vecs)),
        (f"witness_assemble ({table_m}^4 points)", lambda: kernels.witness_assemble(table)),
        (f"scaled_enflo_pair (Z_{pair_dom.m}^3)", lambda: scaled_enflo_pair(pair_f, 2.0, EXH)),
        ("certify chain (Z_16^3)", lambda: certify_T_le_2pi_tau(cert_space, cert_vecs, 2.0, cert_dom, EXH)),
    ]


def _time(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7, help="timed runs per case (median reported)")
    ap.add_argument("--scale", choices=("small", "large"), default="large")
    args = ap.parse_args()

    if "numba" not in kernels.available_backends():
        print("numba backend unavailable; nothing to compare")
        return 1

    cases = _cases(args.scale)
    original = kernels.get_backend()
    timings = {}
    try:
        for backend in ("numpy", "numba"):
            kernels.set_backend(backend)
            for label, fn in cases:
                fn()  # warm-up: triggers jit compilation on the numba side
            timings[backend] = [_time(fn, args.repeats) for _, fn in cases]
    finally:
        kernels.set_backend(original)

    width = max(len(label) for label, _ in cases)
    print(f"{'case':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for i, (label, _) in enumerate(cases):
        t_np, t_nb = timings["numpy"][i], timings["numba"][i]
        print(f"{label:<{width}}  {t_np * 1e3:>8.3f}ms  {t_nb * 1e3:>8.3f}ms  {t_np / t_nb:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
