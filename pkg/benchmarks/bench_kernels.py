#!/usr/bin/env python3
"""Compare the numba and numpy grid kernels, micro and end to end.

Usage: python3 benchmarks/bench_kernels.py [--mission]

The micro section times the two kernel implementations in-process. The
optional --mission section runs the same desk-scale mission twice in
subprocesses, once per backend (the backend is fixed at import time by
PAINTRIG_NUMBA), and reports wall-clock plus a byte-identity check on the
event logs.
"""

import argparse
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from paintrig import kernels

DESK_GRID = (457, 457)
# one spraying tick sweeps ~0.32 mm of a 10 mm wide stroke band
TICK_REGION = (1, 10)


def timeit(fn, *args, repeat=5, inner=1000):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_deposit(impl, name):
    coats = np.zeros(DESK_GRID, dtype=np.uint32)
    r0, c0 = 100, 200
    r1, c1 = r0 + TICK_REGION[0], c0 + TICK_REGION[1]
    impl(coats, r0, r1, c0, c1)  # warm (JIT compile / cache load)
    per_call = timeit(impl, coats, r0, r1, c0, c1)
    print(f"  deposit   {name:<6} {per_call * 1e6:8.2f} us/call  (tick-sized region)")
    return per_call


def bench_grid_stats(impl, name):
    coats = np.random.default_rng(0).integers(0, 3, size=DESK_GRID).astype(np.uint32)
    impl(coats)
    per_call = timeit(impl, coats, inner=50)
    print(f"  grid_stats {name:<6} {per_call * 1e3:7.3f} ms/call  (full desk grid)")
    return per_call


def bench_mission():
    scenario = (
        "[wall]\nwidth_mm = 457.0\nheight_mm = 457.0\n"
        "[stroke]\nwidth_mm = 10.0\noverlap_ratio = 0.45\n"
        "[sim]\nseed = 8\nnoise_cm = 2.0\n"
    )
    print("\nfull desk-scale mission (subprocess per backend):")
    logs = {}
    with tempfile.TemporaryDirectory() as td:
        scn = Path(td) / "desk.toml"
        scn.write_text(scenario)
        for flag, name in (("1", "numba"), ("0", "numpy")):
            out = Path(td) / f"out-{name}"
            env = dict(os.environ, PAINTRIG_NUMBA=flag)
            t0 = time.perf_counter()
            subprocess.run(
                [sys.executable, "-m", "paintrig", "run", str(scn), "--out", str(out)],
                check=True, env=env, capture_output=True,
            )
            elapsed = time.perf_counter() - t0
            logs[name] = (out / "events.jsonl").read_bytes()
            print(f"  mission   {name:<6} {elapsed:7.2f} s")
    same = logs["numba"] == logs["numpy"]
    print(f"  event logs byte-identical across backends: {same}")
    if not same:
        raise SystemExit("backend mismatch: kernels disagree")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mission", action="store_true",
                    help="also time a full desk-scale mission per backend")
    args = ap.parse_args()

    print(f"active backend: {kernels.BACKEND} (numba available: {kernels.HAVE_NUMBA})")
    print("micro benchmarks:")
    d_np = bench_deposit(kernels.deposit_numpy, "numpy")
    s_np = bench_grid_stats(kernels.grid_stats_numpy, "numpy")
    if kernels.HAVE_NUMBA:
        d_nb = bench_deposit(kernels.deposit_numba, "numba")
        s_nb = bench_grid_stats(kernels.grid_stats_numba, "numba")
        print(f"  speedup: deposit x{d_np / d_nb:.1f}, grid_stats x{s_np / s_nb:.1f}")
    if args.mission:
        bench_mission()


if __name__ == "__main__":
    main()
