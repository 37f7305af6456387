"""User-pairing algorithms over channel ranks.

All algorithms work on ranks of an ordered snapshot (rank 0 = strongest),
so they are independent of the actual gain values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnapshot, distance_db


@dataclass(frozen=True)
class Cluster:
    strong_rank: int
    weak_rank: int

    def __post_init__(self):
        if not 0 <= self.strong_rank < self.weak_rank:
            raise ValueError(
                f"strong rank must precede weak rank, got "
                f"({self.strong_rank}, {self.weak_rank})"
            )

    @property
    def range(self) -> int:
        return self.weak_rank - self.strong_rank


@dataclass(frozen=True)
class PairingPlan:
    clusters: tuple[Cluster, ...]
    algorithm: str

    def __post_init__(self):
        ranks = sorted(r for c in self.clusters for r in (c.strong_rank, c.weak_rank))
        if ranks != list(range(len(ranks))):
            raise ValueError("clusters must partition ranks 0..N-1")

    @property
    def num_users(self) -> int:
        return 2 * len(self.clusters)

    def strong_ranks(self) -> np.ndarray:
        return np.array([c.strong_rank for c in self.clusters], dtype=np.intp)

    def weak_ranks(self) -> np.ndarray:
        return np.array([c.weak_rank for c in self.clusters], dtype=np.intp)

    def ranges(self) -> np.ndarray:
        return self.weak_ranks() - self.strong_ranks()

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)


def _check_even(n_users: int):
    if n_users < 2 or n_users % 2:
        raise ValueError(f"n_users must be even and >= 2, got {n_users}")


def _plan(pairs, algorithm: str) -> PairingPlan:
    return PairingPlan(
        tuple(Cluster(min(a, b), max(a, b)) for a, b in pairs), algorithm
    )


def random_pairing(n_users: int, rng: np.random.Generator) -> PairingPlan:
    """Uniformly random perfect matching; the lower rank of a pair is strong."""
    _check_even(n_users)
    perm = rng.permutation(n_users)
    return _plan(zip(perm[0::2].tolist(), perm[1::2].tolist()), "random")


def nlupa(n_users: int) -> PairingPlan:
    """Best-with-worst pairing: rank k with rank N-1-k."""
    _check_even(n_users)
    return _plan(((k, n_users - 1 - k) for k in range(n_users // 2)), "nlupa")


def next_best_diversity(n_users: int) -> PairingPlan:
    """Adjacent pairing: rank 2k with rank 2k+1."""
    _check_even(n_users)
    return _plan(((2 * k, 2 * k + 1) for k in range(n_users // 2)), "nbd")


def d_nlupa(n_users: int, set_size_z: int) -> PairingPlan:
    """Divide-and-NLUPA.

    Ranks are cut into ``N/z`` consecutive sets of ``z`` users.  Set ``i`` is
    merged with set ``i + N/(2z)``, and best-with-worst pairing is applied
    inside each merged set of ``2z`` ranks.  Every cluster then has range at
    least ``N/2 - z + 1``; ``z = N/2`` reduces to plain NLUPA.
    """
    z = set_size_z
    if z < 1 or n_users < 2 or n_users % (2 * z):
        raise ValueError(
            f"n_users ({n_users}) must be a positive multiple of 2*z (z={z})"
        )
    n_merged = n_users // (2 * z)
    pairs = []
    for i in range(n_merged):
        upper = range(i * z, (i + 1) * z)
        lower = range((i + n_merged) * z, (i + n_merged + 1) * z)
        merged = list(upper) + list(lower)
        for j in range(z):
            pairs.append((merged[j], merged[2 * z - 1 - j]))
    return _plan(pairs, "dnlupa")


ALGORITHMS = ("random", "nlupa", "nbd", "dnlupa")


def make_plan(
    algorithm: str,
    n_users: int,
    *,
    z: int = 4,
    rng: np.random.Generator | None = None,
) -> PairingPlan:
    """Dispatch by name (one of ``ALGORITHMS``)."""
    if algorithm == "random":
        if rng is None:
            raise ValueError("random pairing needs a random generator")
        return random_pairing(n_users, rng)
    if algorithm == "nlupa":
        return nlupa(n_users)
    if algorithm == "nbd":
        return next_best_diversity(n_users)
    if algorithm == "dnlupa":
        return d_nlupa(n_users, z)
    raise ValueError(f"unknown pairing algorithm {algorithm!r}")


def plan_diagnostics(plan: PairingPlan, snapshot: ChannelSnapshot) -> list[dict]:
    """Per-cluster ``{"range", "distance_db"}`` for ``plan`` on ``snapshot``."""
    if plan.num_users != snapshot.num_users:
        raise ValueError(
            f"plan covers {plan.num_users} users, snapshot has {snapshot.num_users}"
        )
    g = snapshot.gains
    return [
        {
            "range": c.range,
            "distance_db": distance_db(g[c.strong_rank], g[c.weak_rank]),
        }
        for c in plan
    ]
