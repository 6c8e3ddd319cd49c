"""Timing comparison of the pure-python and compiled kernel backends.

Usage:  python bench/bench_kernels.py [--n 1000000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from offshell_gf import _kernels_py as pyk

try:
    from offshell_gf import _kernels as ck
except ImportError:
    ck = None


def sample(n, seed=12345):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-4.0, 4.0, n)
    r = rng.uniform(0.0, 4.0, n)
    tau = rng.uniform(-4.0, 4.0, n)
    return t, r, tau


def best_of(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    t, r, tau = sample(args.n)
    ha = 2.0 * (4.0 / 63.0) ** 2
    rp = np.abs(tau[: args.n // 4])

    cases = [
        ("region_code", "region_code_batch", (t, r, tau, 1e-9)),
        ("canonical", "canonical_batch", (t, r, tau)),
        ("retarded", "retarded_batch", (t, r, tau)),
        ("principal(+)", "principal_o41_batch", (t, r, tau)),
        ("oh_published", "oh_published_batch", (t, r, tau)),
        ("k5_route", "k5_route_batch", (t, r, tau)),
        ("split_terms", "g1g2_batch", (t, r, tau)),
        ("static_profile", "static_profile_batch",
         (rp, t[: rp.size], r[: rp.size] + 0.05, 0.0, 0.35, ha)),
    ]

    print(f"n = {args.n}, best of {args.repeats}")
    print(f"{'kernel':<16}{'python':>12}{'compiled':>12}{'speedup':>10}")
    with np.errstate(divide="ignore", invalid="ignore"):
        for label, name, a in cases:
            tp = best_of(getattr(pyk, name), a, args.repeats)
            if ck is None:
                print(f"{label:<16}{tp * 1e3:>10.1f}ms{'--':>12}{'--':>10}")
                continue
            tc = best_of(getattr(ck, name), a, args.repeats)
            print(f"{label:<16}{tp * 1e3:>10.1f}ms{tc * 1e3:>10.1f}ms"
                  f"{tp / tc:>9.1f}x")
    if ck is None:
        print("compiled extension not available; showing python only")


if __name__ == "__main__":
    main()
