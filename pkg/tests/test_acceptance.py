"""Acceptance suite: one test per criterion, each reporting PASS or FAIL.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
are printed at the end of the session.
"""

from __future__ import annotations

import math
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import (
    grid_dynamic_interval,
    grid_max_min,
    grid_min_total_power,
    grid_sum_rate,
    pairwise_sum_rate,
    sum_rate,
)

from noma_ra import cli
from noma_ra.channel import ChannelConfig, drop_users, make_rng, order_gains, realize_snapshot
from noma_ra.experiments import SCHEMES, ExperimentSpec, run, run_trials
from noma_ra.pairing import Cluster, PairingPlan, d_nlupa, nlupa
from noma_ra.power import (
    QosTarget,
    allocate_scheme,
    dynamic_pa,
    max_min_bisection,
    noma_required_powers,
    water_fill,
)
from noma_ra.rates import cluster_gain, noma_pair_rates, oma_pair_rates

Z99 = 2.576  # two-sided 99% normal quantile


def report(number, title, failures, elapsed, limit):
    if elapsed > limit:
        failures = [*failures, f"runtime {elapsed:.1f}s exceeds {limit:g}s"]
    status = "PASS" if not failures else "FAIL"
    detail = "" if not failures else ": " + "; ".join(failures[:6])
    if len(failures) > 6:
        detail += f" (+{len(failures) - 6} more)"
    line = f"criterion {number} [{title}] {status} ({elapsed:.2f}s){detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not failures, line


# --- 1 -------------------------------------------------------------------


def test_criterion_1_dnlupa_minimum_range():
    t0 = time.perf_counter()
    fails = []
    mr_d = int(d_nlupa(16, 4).ranges().min())
    mr_n = int(nlupa(16).ranges().min())
    if (mr_d, mr_n) != (5, 1):
        fails.append(f"N=16 z=4 min range {mr_d} vs NLUPA {mr_n}, expected 5 vs 1")
    for n in range(2, 65, 2):
        for z in range(1, n // 2 + 1):
            if n % (2 * z):
                continue
            plan = d_nlupa(n, z)
            got = int(plan.ranges().min())
            if got != n // 2 - z + 1:
                fails.append(f"N={n} z={z}: min range {got} != {n // 2 - z + 1}")
            if n >= 4 * z and got < z + 1:
                fails.append(f"N={n} z={z}: min range {got} < z+1")
            if 2 * z < n and got <= int(nlupa(n).ranges().min()):
                fails.append(f"N={n} z={z}: no improvement over NLUPA")
    report(1, "D-NLUPA minimum range", fails, time.perf_counter() - t0, 1.0)


# --- 2, 3 ----------------------------------------------------------------


@pytest.fixture(scope="module")
def gain_records():
    spec = ExperimentSpec(kind="gain_vs_distance", trials=10_000, seed=1,
                          workers=os.cpu_count() or 1)
    t0 = time.perf_counter()
    rec = run_trials(spec)
    return spec, rec, time.perf_counter() - t0


def test_criterion_2_minimum_distance(gain_records):
    spec, rec, t_run = gain_records
    t0 = time.perf_counter()
    d_min = rec.distance_db["dnlupa"].min(axis=1)
    n_min = rec.distance_db["nlupa"].min(axis=1)
    above = float(np.mean(d_min > 10.0))
    med_d, med_n = float(np.median(d_min)), float(np.median(n_min))
    run(spec, rec)
    fails = []
    if above < 0.99:
        fails.append(f"D-NLUPA min distance > 10 dB in {above:.2%} of trials (need >= 99%)")
    if not 12.0 <= med_d <= 18.0:
        fails.append(f"D-NLUPA median min distance {med_d:.2f} dB outside [12, 18]")
    if not med_n < 5.0:
        fails.append(f"NLUPA median min distance {med_n:.2f} dB not < 5")
    report(2, "minimum cluster distance", fails, t_run + time.perf_counter() - t0, 30.0)


def test_criterion_3_gain_by_cluster_index(gain_records):
    spec, rec, t_run = gain_records
    t0 = time.perf_counter()
    stats = run(spec.with_kind("gain_vs_cluster_index"), rec)
    mean = {a: np.array([r["mean_gain"] for r in stats.where(algorithm=a)])
            for a in spec.pairing_algorithms}
    frac = float(np.mean(mean["dnlupa"] > mean["nlupa"]))
    totals = {a: float(v.sum()) for a, v in mean.items()}
    fails = []
    if abs(frac - 0.5) > 0.15:
        fails.append(f"D-NLUPA beats NLUPA on {frac:.1%} of indices")
    if min(totals, key=totals.get) != "random":
        fails.append(f"lowest total mean gain is not random pairing: {totals}")
    report(3, "gain by cluster index", fails, t_run + time.perf_counter() - t0, 60.0)


# --- 4 -------------------------------------------------------------------


def test_criterion_4_aggregate_throughput_invariance():
    t0 = time.perf_counter()
    cfg = ChannelConfig()
    plans = {"nlupa": nlupa(16), "dnlupa": d_nlupa(16, 4)}
    worst = 0.0
    for t in range(1000):
        rng = make_rng(2024, t)
        g = realize_snapshot(drop_users(cfg, rng), cfg, rng).gains
        totals = {}
        for name, plan in plans.items():
            r = noma_pair_rates(g[plan.strong_ranks()], g[plan.weak_ranks()], 0.4, 0.6)
            totals[name] = float(np.sum(r.total))
        worst = max(worst, abs(totals["nlupa"] - totals["dnlupa"]))
    fails = [] if worst <= 1e-9 else [f"max per-trial difference {worst:.3e}"]
    report(4, "aggregate throughput invariance", fails, time.perf_counter() - t0, 5.0)


# --- 5, 6 ----------------------------------------------------------------


@pytest.fixture(scope="module")
def sweep_records():
    spec = ExperimentSpec(kind="outage_sweep", trials=10_000, seed=1,
                          workers=os.cpu_count() or 1)
    t0 = time.perf_counter()
    rec = run_trials(spec)
    return spec, rec, time.perf_counter() - t0


def _significantly_greater(k1, k2, n):
    """Two-proportion z-test: is rate k1/n significantly above k2/n?"""
    p1, p2 = k1 / n, k2 / n
    pool = (k1 + k2) / (2 * n)
    if pool in (0.0, 1.0):
        return False
    se = math.sqrt(2 * pool * (1 - pool) / n)
    return (p1 - p2) / se > Z99


def test_criterion_5_outage_orderings(sweep_records):
    spec, rec, t_run = sweep_records
    t0 = time.perf_counter()
    run(spec, rec)
    k = spec.channel.num_users // 2
    n = rec.trials * k
    idx = {s: SCHEMES.index(s) for s in SCHEMES}
    counts = {
        "strong": rec.out_strong.sum(axis=1),
        "weak": rec.out_weak.sum(axis=1),
    }
    fails = []

    def le(role, a, b, p):
        ka, kb = int(counts[role][p, idx[a]]), int(counts[role][p, idx[b]])
        if _significantly_greater(ka, kb, n):
            fails.append(f"{spec.power_grid_dbm[p]:g} dBm {role}: {a} {ka / n:.4f} > {b} {kb / n:.4f}")

    for p in range(len(spec.power_grid_dbm)):
        for role in ("strong", "weak"):
            for other in ("E-NOMA", "E-OMA", "C-OMA"):
                le(role, "C-NOMA", other, p)
            le(role, "C-OMA", "E-OMA", p)
        le("weak", "C-NOMA", "C-OMA", p)
        le("weak", "E-NOMA", "E-OMA", p)
        en, eo = int(counts["strong"][p, idx["E-NOMA"]]), int(counts["strong"][p, idx["E-OMA"]])
        if en != eo:
            fails.append(f"{spec.power_grid_dbm[p]:g} dBm strong: E-NOMA {en} != E-OMA {eo} outages")
    report(5, "outage orderings", fails, t_run + time.perf_counter() - t0, 300.0)


def test_criterion_6_sum_rate_orderings(sweep_records):
    spec, rec, t_run = sweep_records
    t0 = time.perf_counter()
    run(spec.with_kind("sumrate_sweep"), rec)
    idx = {s: SCHEMES.index(s) for s in SCHEMES}
    fails = []

    def ge(a, b, p):
        d = rec.sum_rate[p, :, idx[a]] - rec.sum_rate[p, :, idx[b]]
        se = d.std(ddof=1) / math.sqrt(d.size)
        if d.mean() < -Z99 * se:
            fails.append(
                f"{spec.power_grid_dbm[p]:g} dBm: {a} {rec.sum_rate[p, :, idx[a]].mean():.3f}"
                f" < {b} {rec.sum_rate[p, :, idx[b]].mean():.3f}"
            )

    for p in range(len(spec.power_grid_dbm)):
        ge("C-NOMA", "C-OMA", p)
        ge("E-NOMA", "E-OMA", p)
    ge("E-NOMA", "C-NOMA", 0)
    report(6, "sum-rate orderings", fails, t_run + time.perf_counter() - t0, 300.0)


# --- 7 -------------------------------------------------------------------


def test_criterion_7_solver_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    fails = []
    for _ in range(200):
        n = int(rng.integers(1, 7))
        g = 10 ** rng.uniform(-1, 1.5, n)
        b = float(rng.uniform(0.1, 5))
        ours = sum_rate(water_fill(g, b), g)
        best, _ = pairwise_sum_rate(g, b)
        if n <= 3:
            best = max(best, grid_sum_rate(g, b, step=b / 300 if n == 3 else 1e-3))
        if abs(ours - best) > 1e-6 and ours < best:
            fails.append(f"water_fill {ours:.9f} vs oracle {best:.9f} (n={n})")
    for _ in range(200):
        n = int(rng.integers(2, 5))
        g = np.sort(10 ** rng.uniform(-0.5, 1.5, n))[::-1]
        b = float(rng.uniform(0.2, 5))
        ours = max_min_bisection(g, b).rate
        ref = grid_max_min(g, b)
        if abs(ours - ref) > 1e-4:
            fails.append(f"max-min {ours:.6f} vs grid {ref:.6f} (n={n})")
    for _ in range(200):
        gs, gw = sorted(10 ** rng.uniform(-0.5, 1.0, 2), reverse=True)
        rs, rw = rng.uniform(0.1, 1.5, 2)
        qs, qw = noma_required_powers(gs, gw, rs, rw)
        ref = grid_min_total_power(gs, gw, rs, rw, step=(qs + qw) / 400, hi=2 * (qs + qw))
        if qs + qw > ref + 1e-12:
            fails.append(f"required total {qs + qw:.6f} > grid {ref:.6f}")
    for _ in range(200):
        gs, gw = sorted(10 ** rng.uniform(-1, 2, 2), reverse=True)
        b = float(rng.uniform(0.1, 10))
        dpa = dynamic_pa(gs, gw, b)
        ref = grid_dynamic_interval(gs, gw, b)
        step = 1e-4
        if ref is None:
            if not dpa.empty and dpa.upper - dpa.lower > step:
                fails.append(f"dynamic_pa {dpa.lower}, {dpa.upper} but grid empty")
            continue
        if dpa.empty or not (
            dpa.lower - 1e-12 <= ref[0] <= dpa.lower + step
            and dpa.upper - step <= ref[1] <= dpa.upper + 1e-12
        ):
            fails.append(f"dynamic_pa {dpa.lower}, {dpa.upper} vs grid {ref}")
    report(7, "solver oracles", fails, time.perf_counter() - t0, 120.0)


# --- 8 -------------------------------------------------------------------


def test_criterion_8_hand_values():
    t0 = time.perf_counter()
    fails = []

    def check(name, got, want):
        try:
            np.testing.assert_almost_equal(got, want, decimal=4)
        except AssertionError:
            fails.append(f"{name}: {got} != {want}")

    g = cluster_gain(noma_pair_rates(4, 1, 0.4, 0.6), oma_pair_rates(4, 1, 1, 1))
    check("cluster gain", g, 0.2321)
    check("water-fill powers", water_fill([1, 2], 3), [1.25, 1.75])
    check("max-min rate", max_min_bisection([3, 1], 1).rate, 0.7188)
    d = dynamic_pa(4, 1, 1)
    check("dynamic interval", [d.lower, d.upper], [0.3090, 0.4142])
    check("required powers", noma_required_powers(4, 1, 1, 1), [0.25, 1.25])
    snap = order_gains([4, 2, 1, 0.5])
    plan = PairingPlan((Cluster(0, 1), Cluster(2, 3)), "manual")
    res = allocate_scheme("C-OMA", snap, plan, 5.0, QosTarget(1.0))
    admitted = sorted(int(i) + 1 for i in np.flatnonzero(res.admitted))
    if admitted != [1, 2]:
        fails.append(f"C-OMA admission trace {admitted} != [1, 2]")
    report(8, "hand values", fails, time.perf_counter() - t0, 1.0)


# --- 9 -------------------------------------------------------------------


def test_criterion_9_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    names = ["gain_distance.csv", "gain_index.csv", "outage.csv", "sumrate.csv"]
    outs = {}
    for tag, extra in (("a", []), ("b", []), ("c", ["--workers", str(max(4, os.cpu_count() or 1))])):
        d = tmp_path / tag
        rc = cli.main(["all", "--seed", "1", "--out", str(d), *extra])
        assert rc == 0
        outs[tag] = {n: (d / n).read_bytes() for n in names}
    fails = [f"{n} differs ({tag})" for tag in ("b", "c") for n in names
             if outs[tag][n] != outs["a"][n]]
    report(9, "CLI determinism", fails, time.perf_counter() - t0, math.inf)
