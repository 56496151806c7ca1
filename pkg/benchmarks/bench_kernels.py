"""Timing comparison between the compiled kernels and the python fallback.

Run as ``python3 benchmarks/bench_kernels.py``.  Each row times one hot
operation with both backends and reports the speedup.  The final row
times a complete five-slug optimization in a subprocess per backend so
the import-time backend selection stays untouched.
"""

import argparse
import math
import os
import subprocess
import sys
import time

import numpy as np

from gvbopt._kernels import COMPILED, _pykernels

if COMPILED:
    from gvbopt._kernels import _core


def best_time(fn, repeat, inner):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.3f} s "


OPTIMIZE_CHILD = """\
import time
import gvbopt

fluid = gvbopt.LinearViscosity(1.0, 9.0)
fingering = gvbopt.GeneralizedKoval(gvbopt.KovalFlux(0.22))
opts = gvbopt.OptimizerOptions(multi_starts=4)
gvbopt.optimize(fingering, fluid, 2, gvbopt.OptimizerOptions(multi_starts=1))
start = time.perf_counter()
gvbopt.optimize(fingering, fluid, 5, opts)
print(time.perf_counter() - start)
"""


def time_optimize_cell(force_python, repeat):
    env = dict(os.environ, GVBOPT_PURE_PYTHON="1" if force_python else "0")
    best = math.inf
    for _ in range(min(repeat, 3)):
        out = subprocess.run(
            [sys.executable, "-c", OPTIMIZE_CHILD],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        best = min(best, float(out.stdout.strip()))
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--repeat", type=int, default=5, help="timing repeats per row (default 5)"
    )
    args = parser.parse_args(argv)
    repeat = max(1, args.repeat)

    partition = np.linspace(1.0, 0.0, 11)
    grid = np.linspace(1.0, 0.0, 1001)
    prefix = np.log1p(9.0 * grid) / 9.0
    mobility = 1.0 / (1.0 + 9.0 * grid)
    m_top = 0.1

    rows = [
        (
            "mean mobility integral",
            lambda k: k.mobility_integral(0, 1.0, 9.0, 1.0, 0.0, 1.0),
            400,
        ),
        (
            "breakthrough times, 10 slugs (tfe)",
            lambda k: k.times_tfe(0, 1.0, 9.0, 1.0, partition),
            200,
        ),
        (
            "breakthrough times, 10 slugs (koval)",
            lambda k: k.times_gk(0, 0.22, 0, 1.0, 9.0, 1.0, partition),
            200,
        ),
        (
            "partition volume, 10 slugs (koval)",
            lambda k: k.partition_volume_gk(0, 0.22, 0, 1.0, 9.0, 1.0, partition),
            200,
        ),
        (
            "three-slug scan, 1001 grid (tfe)",
            lambda k: k.scan_three_tfe(grid, prefix, m_top),
            3,
        ),
        (
            "three-slug scan, 1001 grid (koval)",
            lambda k: k.scan_three_gk(0, 0.22, grid, mobility),
            3,
        ),
    ]

    print(f"kernel timings, best of {repeat} (1001-point scans, 10-slug partitions)")
    print()
    header = f"{'operation':38s} {'python':>11s} {'compiled':>11s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, op, inner in rows:
        t_py = best_time(lambda: op(_pykernels), repeat, inner)
        if COMPILED:
            t_c = best_time(lambda: op(_core), repeat, inner)
            print(f"{name:38s} {fmt(t_py)} {fmt(t_c)} {t_py / t_c:7.1f}x")
        else:
            print(f"{name:38s} {fmt(t_py)} {'-':>11s} {'-':>8s}")

    t_py = time_optimize_cell(True, repeat)
    if COMPILED:
        t_c = time_optimize_cell(False, repeat)
        print(f"{'full optimize, 5 slugs (koval)':38s} {fmt(t_py)} {fmt(t_c)} "
              f"{t_py / t_c:7.1f}x")
    else:
        print(f"{'full optimize, 5 slugs (koval)':38s} {fmt(t_py)} {'-':>11s} {'-':>8s}")

    if not COMPILED:
        print()
        print("compiled backend unavailable; python timings only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
