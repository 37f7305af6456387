from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noma_ra.channel import make_rng, order_gains
from noma_ra.pairing import (
    Cluster,
    PairingPlan,
    d_nlupa,
    make_plan,
    next_best_diversity,
    nlupa,
    plan_diagnostics,
    random_pairing,
)


def pairs(plan):
    return {(c.strong_rank, c.weak_rank) for c in plan}


def valid_nz():
    return st.integers(1, 32).flatmap(
        lambda z: st.integers(1, 64 // (2 * z)).map(lambda m: (2 * z * m, z))
    )


def test_nlupa_examples():
    assert pairs(nlupa(6)) == {(0, 5), (1, 4), (2, 3)}
    assert pairs(nlupa(2)) == {(0, 1)}
    p = nlupa(16)
    assert p.clusters[0] == Cluster(0, 15)
    assert p.ranges().tolist() == [15, 13, 11, 9, 7, 5, 3, 1]


def test_next_best_diversity_examples():
    assert pairs(next_best_diversity(6)) == {(0, 1), (2, 3), (4, 5)}
    assert pairs(next_best_diversity(2)) == {(0, 1)}
    assert set(next_best_diversity(16).ranges().tolist()) == {1}


def test_dnlupa_reference_construction():
    p = d_nlupa(16, 4)
    assert pairs(p) == {
        (0, 11), (1, 10), (2, 9), (3, 8),
        (4, 15), (5, 14), (6, 13), (7, 12),
    }
    assert p.ranges().min() == 5
    low = [(c.strong_rank, c.weak_rank) for c in p if c.range == 5]
    assert sorted(low) == [(3, 8), (7, 12)]


def test_dnlupa_half_population_is_nlupa():
    assert pairs(d_nlupa(16, 8)) == pairs(nlupa(16))


@pytest.mark.parametrize("fn", [nlupa, next_best_diversity])
@pytest.mark.parametrize("n", [0, 3, 7])
def test_odd_sizes_rejected(fn, n):
    with pytest.raises(ValueError):
        fn(n)


@pytest.mark.parametrize("n, z", [(16, 3), (12, 4), (16, 0), (0, 1)])
def test_dnlupa_divisibility(n, z):
    with pytest.raises(ValueError):
        d_nlupa(n, z)


def test_random_pairing_rejects_odd():
    with pytest.raises(ValueError):
        random_pairing(5, make_rng(0))


def test_random_pairing_single_cluster():
    assert pairs(random_pairing(2, make_rng(1))) == {(0, 1)}


def test_random_pairing_uniform_over_matchings():
    rng = make_rng(11)
    n = 100_000
    counts = Counter(frozenset(pairs(random_pairing(4, rng))) for _ in range(n))
    assert len(counts) == 3
    for c in counts.values():
        assert abs(c / n - 1 / 3) < 0.02


@given(st.integers(1, 32).map(lambda k: 2 * k), st.integers(0, 2**32))
def test_every_algorithm_partitions(n, seed):
    for plan in (nlupa(n), next_best_diversity(n), random_pairing(n, make_rng(seed))):
        ranks = sorted(r for c in plan for r in (c.strong_rank, c.weak_rank))
        assert ranks == list(range(n))
        assert all(c.strong_rank < c.weak_rank for c in plan)


@given(valid_nz())
def test_dnlupa_partition_and_min_range(nz):
    n, z = nz
    plan = d_nlupa(n, z)
    assert len(plan) == n // 2
    assert int(plan.ranges().min()) == n // 2 - z + 1
    if n >= 4 * z:
        assert plan.ranges().min() >= z + 1
    if 2 * z < n:
        assert plan.ranges().min() > nlupa(n).ranges().min()


def test_dnlupa_keeps_nlupa_strong_set():
    for n, z in [(16, 4), (32, 2), (64, 8)]:
        assert sorted(d_nlupa(n, z).strong_ranks()) == sorted(nlupa(n).strong_ranks())


def test_plan_validation():
    with pytest.raises(ValueError):
        Cluster(3, 3)
    with pytest.raises(ValueError):
        PairingPlan((Cluster(0, 1), Cluster(1, 2)), "bad")


def test_make_plan_dispatch():
    assert make_plan("nbd", 4).algorithm == "nbd"
    assert make_plan("dnlupa", 16, z=4) == d_nlupa(16, 4)
    with pytest.raises(ValueError):
        make_plan("random", 4)
    with pytest.raises(ValueError):
        make_plan("greedy", 4)


def test_plan_diagnostics():
    g = np.ones(16)
    g[0] = 100.0
    diag = plan_diagnostics(nlupa(16), order_gains(g))
    assert diag[0]["range"] == 15
    assert diag[0]["distance_db"] == pytest.approx(20.0)
    assert diag[-1] == {"range": 1, "distance_db": 0.0}
    with pytest.raises(ValueError):
        plan_diagnostics(nlupa(4), order_gains(g))
