"""Rates, NOMA-over-OMA gains, outage and fairness metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .power import TOL, AllocationResult, QosLike, QosTarget


@dataclass(frozen=True)
class PairRates:
    """Strong/weak rates of one cluster (scalars or aligned arrays)."""

    r_strong: float | np.ndarray
    r_weak: float | np.ndarray
    scheme: str

    @property
    def total(self):
        return self.r_strong + self.r_weak


def _nonneg(*powers):
    for p in powers:
        if np.any(np.asarray(p) < 0):
            raise ValueError("powers must be non-negative")


def noma_pair_rates(g_strong, g_weak, p_strong, p_weak) -> PairRates:
    """Downlink SIC rates; accepts scalars or broadcastable arrays."""
    _nonneg(p_strong, p_weak)
    r_s = np.log2(1.0 + np.multiply(p_strong, g_strong))
    r_w = np.log2(
        1.0 + np.multiply(p_weak, g_weak) / (np.multiply(p_strong, g_weak) + 1.0)
    )
    return PairRates(_scalar(r_s), _scalar(r_w), "NOMA")


def oma_pair_rates(g_strong, g_weak, p_strong, p_weak, share: float = 0.5) -> PairRates:
    """Orthogonal rates ``share * log2(1 + p*g)`` for each user."""
    _nonneg(p_strong, p_weak)
    if not 0.0 < share <= 1.0:
        raise ValueError(f"share must lie in (0, 1], got {share}")
    r_s = share * np.log2(1.0 + np.multiply(p_strong, g_strong))
    r_w = share * np.log2(1.0 + np.multiply(p_weak, g_weak))
    return PairRates(_scalar(r_s), _scalar(r_w), "OMA")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def cluster_gain(noma: PairRates, oma: PairRates):
    """NOMA sum rate minus OMA sum rate; negative values are kept."""
    return _scalar(noma.total - oma.total)


def fpa_cluster_gain(g_strong, g_weak, transmit_power: float, ratio_weak: float):
    """Gain of fixed-ratio NOMA over OMA in which each user has full power.

    This is the comparison used for the pairing experiments: NOMA splits
    ``transmit_power`` as ``(1 - ratio_weak, ratio_weak)``; OMA gives each
    user ``transmit_power`` on half the resource.
    """
    p_s = (1.0 - ratio_weak) * transmit_power
    p_w = ratio_weak * transmit_power
    noma = noma_pair_rates(g_strong, g_weak, p_s, p_w)
    oma = oma_pair_rates(g_strong, g_weak, transmit_power, transmit_power)
    return cluster_gain(noma, oma)


def effective_sum_rate(alloc: AllocationResult) -> float:
    """Sum of rates over admitted users."""
    return float(alloc.rate[alloc.admitted].sum())


def _qos_vector(qos: QosLike, n: int) -> np.ndarray:
    if isinstance(qos, QosTarget):
        qos = qos.min_rate_bps_hz
    return np.broadcast_to(np.asarray(qos, dtype=np.float64), (n,))


def outage_flags(alloc: AllocationResult, qos: QosLike) -> dict[str, np.ndarray]:
    """Outage per user, split by role: ``{"strong": ..., "weak": ...}``."""
    r = _qos_vector(qos, len(alloc.rate))
    out = ~alloc.admitted | (alloc.rate < r - TOL)
    return {"strong": out[alloc.strong], "weak": out[~alloc.strong]}


def jain_index(rates) -> float:
    """Jain's fairness index ``(sum r)^2 / (n * sum r^2)``."""
    r = np.asarray(rates, dtype=np.float64)
    if r.size == 0:
        raise ValueError("rates must be non-empty")
    if np.any(r < 0):
        raise ValueError("rates must be non-negative")
    top = r.max()
    if top == 0.0:
        raise ValueError("Jain index is undefined for all-zero rates")
    r = r / top  # keeps r**2 clear of underflow
    return float(r.sum()) ** 2 / (r.size * float(np.dot(r, r)))


def sic_shortfall(g_strong, p_strong, p_weak, rate_weak) -> bool:
    """True when the strong user cannot decode the weak signal at ``rate_weak``.

    Rate formulas elsewhere assume SIC always succeeds; this reports when
    that assumption is violated.
    """
    r = np.log2(1.0 + p_weak * g_strong / (p_strong * g_strong + 1.0))
    return bool(r < rate_weak - TOL)


@dataclass(frozen=True)
class TrialMetrics:
    cluster_gain: np.ndarray | None
    effective_sum_rate: float
    outage: dict
    jain_index: float


def trial_metrics(
    alloc: AllocationResult, qos: QosLike, cluster_gains=None
) -> TrialMetrics:
    """Bundle the per-trial metrics of one allocation.

    The Jain index is taken over admitted users' rates; it is 1 when no user
    is admitted (no one is treated unequally).
    """
    rates = alloc.rate[alloc.admitted]
    fair = jain_index(rates) if rates.size and np.any(rates > 0) else 1.0
    return TrialMetrics(
        cluster_gain=None if cluster_gains is None else np.asarray(cluster_gains),
        effective_sum_rate=effective_sum_rate(alloc),
        outage=outage_flags(alloc, qos),
        jain_index=fair,
    )
