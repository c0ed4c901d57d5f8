"""Time the numba and numpy backends against each other.

    python3 benchmarks/bench_kernels.py [--T 4096] [--repeat 5]

Kernel timings call both backend tables directly in one process. The
end-to-end row runs network inference in two subprocesses, one with
BOCSE_DISABLE_NUMBA=1, so the dispatch path is what gets measured.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bocse.kernels import BACKENDS, xlog2x_table

E2E = """
import time, numpy as np
from bocse import SignificanceConfig, infer_network, random_network
from bocse.bench import network_pairs
rng = np.random.default_rng(0)
net = random_network({n}, 3, rng)
data = network_pairs(net, {T}, rng, segment=20)
cfg = SignificanceConfig(permutations=200)
infer_network(data.subset(np.arange(64)), cfg)  # warm-up
t0 = time.perf_counter()
infer_network(data, cfg)
print(time.perf_counter() - t0)
"""


def kernel_cases(T, rng):
    J, ax, ncell, R = 50, 2, 8, 1000
    xs = rng.integers(0, ax, (T, J)).astype(np.uint8)
    cell = np.sort(rng.integers(0, ncell, T)).astype(np.int64)
    perms = np.argsort(rng.random((R, T)), axis=1).astype(np.int64)
    counts = rng.integers(0, T // ncell, (R, ax, ncell)).astype(np.int64)
    starts = np.arange(0, ncell, 2, dtype=np.int64)
    L = xlog2x_table(T)
    return {
        "contingency": (xs, cell, ax, ncell),
        "permuted_contingency": (xs[:, 0].copy(), perms, cell, ax, ncell),
        "cmi_from_counts": (counts, starts, L, float(T)),
    }


def best_of(fn, args, repeat):
    fn(*args)  # warm-up, includes numba compilation
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def end_to_end(n, T, disable):
    env = dict(os.environ, BOCSE_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", E2E.format(n=n, T=T)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=20)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()

    cases = kernel_cases(args.T, np.random.default_rng(0))
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call_args in cases.items():
        t_np = best_of(BACKENDS["numpy"][name], call_args, args.repeat)
        t_nb = best_of(BACKENDS["numba"][name], call_args, args.repeat)
        print(f"{name:<24}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.2f}")

    if not args.skip_e2e:
        t_np = end_to_end(args.nodes, args.T, disable=True)
        t_nb = end_to_end(args.nodes, args.T, disable=False)
        label = f"infer_network n={args.nodes}"
        print(f"{label:<24}{t_np * 1e3:>12.1f}{t_nb * 1e3:>12.1f}{t_np / t_nb:>10.2f}")


if __name__ == "__main__":
    main()
