"""Compare the numba and numpy kernel paths.

    python benchmarks/bench_kernels.py            # per-kernel timings
    python benchmarks/bench_kernels.py --e2e      # also time N=12 enumeration per backend
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from fermicluster._kernels import numba_kernels, numpy_kernels

HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def kernel_cases(n):
    rng = np.random.default_rng(0)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v /= np.linalg.norm(v)
    mid = n // 2
    return {
        "apply_1q": (v, mid, HAD),
        "apply_cz": (v, 0, n - 1),
        "project_zparity": (v, mid, mid + 1, True),
        "project_xparity": (v, mid, mid + 1, False),
        "measure_x_reduce": (v, mid, True),
        "pauli_expectation": (v, (1 << n) - 1 ^ 0b101, 0b110110),
        "norm2": (v,),
    }


def best_of(fn, args, repeat=5):
    number = max(1, 20000 >> (len(args[0]).bit_length() // 2))
    times = timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)
    return min(times) / number


def bench_kernels(sizes):
    print(f"{'kernel':<20}{'n':>4}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}")
    for n in sizes:
        for name, args in kernel_cases(n).items():
            getattr(numba_kernels, name)(*args)  # compile outside the timing
            t_np = best_of(getattr(numpy_kernels, name), args)
            t_nb = best_of(getattr(numba_kernels, name), args)
            print(f"{name:<20}{n:>4}{t_np * 1e6:>14.2f}{t_nb * 1e6:>14.2f}{t_np / t_nb:>10.2f}")


E2E = (
    "import time; from fermicluster import cluster, _kernels;"
    "cluster.prepare_cluster(4);"
    "t=time.perf_counter(); r=cluster.prepare_cluster(12);"
    "print(_kernels.BACKEND, len(r), f'{time.perf_counter()-t:.3f}')"
)


def bench_end_to_end():
    print("\nN=12 enumeration (2048 branches, stabilizer checks included)")
    for flag in ("0", "1"):
        env = dict(os.environ, FERMICLUSTER_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        backend, branches, secs = out.stdout.split()
        print(f"  {backend:<6} {branches} branches in {secs} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 12, 16])
    ap.add_argument("--e2e", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.sizes)
    if args.e2e:
        bench_end_to_end()
