"""Time the compiled and pure-Python allocation kernels on the same inputs.

    python benchmarks/bench_kernels.py [--trials 500] [--repeat 3]
"""

import argparse
import time

import numpy as np

from noma_ra.channel import ChannelConfig, drop_users, make_rng, realize_snapshot
from noma_ra.experiments import DEFAULT_POWER_GRID_DBM
from noma_ra.kernels import available_backends
from noma_ra.pairing import nlupa


def inputs(trials, seed=0):
    cfg = ChannelConfig()
    plan = nlupa(cfg.num_users)
    g = np.empty((trials, cfg.num_users))
    for t in range(trials):
        rng = make_rng(seed, t)
        g[t] = realize_snapshot(drop_users(cfg, rng), cfg, rng).gains
    gs = np.ascontiguousarray(g[:, plan.strong_ranks()])
    gw = np.ascontiguousarray(g[:, plan.weak_ranks()])
    budgets = 10 ** (np.asarray(DEFAULT_POWER_GRID_DBM) / 10) / 1000
    return gs, gw, budgets


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    gs, gw, budgets = inputs(args.trials)
    backends = available_backends()
    results = {}
    print(f"sweep: {args.trials} trials x {len(budgets)} powers x 4 schemes, 8 clusters")
    for name, mod in backends.items():
        dt, out = best_of(lambda: mod.sweep(gs, gw, 1.0, 1.0, budgets, True), args.repeat)
        results[name] = out
        print(f"  {name:7s} {dt * 1e3:9.1f} ms  ({dt / args.trials * 1e6:8.1f} us/trial)")
    if len(results) == 2:
        same = all(np.array_equal(a, b) for a, b in zip(*results.values()))
        print(f"  outputs identical: {same}")
    print("allocate: C-NOMA, one trial, repeated 2000 times")
    r = np.ones(gs.shape[1])
    for name, mod in backends.items():
        def loop():
            for _ in range(2000):
                mod.allocate(1, gs[0], gw[0], r, r, 1.0, True)
        dt, _ = best_of(loop, args.repeat)
        print(f"  {name:7s} {dt / 2000 * 1e6:9.2f} us/call")
    if len(backends) == 1:
        print("  compiled extension not available; only the Python backend was timed")


if __name__ == "__main__":
    main()
