"""Power allocation: intra-cluster splits and QoS-constrained schemes.

Gains are noise-normalised (``p * g`` is an SNR) and rates are in
bits/s/Hz.  Two-user NOMA uses the usual downlink SIC model: the strong
user cancels the weak user's signal, the weak user treats the strong user's
signal as noise.  OMA users get disjoint halves of the sub-channel with
dedicated power, ``rate = share * log2(1 + p * g)``.

The four QoS schemes (E-NOMA, C-NOMA, E-OMA, C-OMA) run in
:mod:`noma_ra.kernels`; this module wraps them for snapshots and plans.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2, sqrt
from typing import Sequence, Union

import numpy as np

from . import kernels
from .channel import ChannelSnapshot
from .pairing import PairingPlan

TOL = kernels.TOL


@dataclass(frozen=True)
class QosTarget:
    min_rate_bps_hz: float = 1.0

    def __post_init__(self):
        if not self.min_rate_bps_hz >= 0:
            raise ValueError("min_rate_bps_hz must be >= 0")


QosLike = Union[float, QosTarget, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class PowerSplit:
    p_strong: float
    p_weak: float

    @property
    def total(self) -> float:
        return self.p_strong + self.p_weak


@dataclass
class AllocationResult:
    """Per-user outcome of one scheme on one trial.

    Arrays are indexed by user slot: channel rank for plan-level schemes,
    ``[strong, weak]`` for single-cluster ones.  ``rate`` is the physical
    rate of the assigned power; unadmitted users do not count towards the
    effective sum rate.
    """

    admitted: np.ndarray
    power: np.ndarray
    rate: np.ndarray
    strong: np.ndarray
    scheme: str

    @property
    def total_power(self) -> float:
        return float(self.power.sum())

    @property
    def num_admitted(self) -> int:
        return int(self.admitted.sum())


# --- intra-cluster splits -------------------------------------------------


def f_pa(ratio_weak: float, *, allow_weak_minority: bool = False) -> PowerSplit:
    """Fixed split of a unit budget; the weak user takes ``ratio_weak``.

    The weak share must exceed one half unless ``allow_weak_minority``.
    """
    if not 0.0 < ratio_weak < 1.0:
        raise ValueError(f"ratio_weak must lie in (0, 1), got {ratio_weak}")
    if ratio_weak <= 0.5 and not allow_weak_minority:
        raise ValueError(
            f"ratio_weak must exceed 0.5 so the weak user gets more power, "
            f"got {ratio_weak}"
        )
    return PowerSplit(p_strong=1.0 - ratio_weak, p_weak=ratio_weak)


def ftpc(gains, beta: float) -> np.ndarray:
    """Fractional transmit power control shares ``g**-beta / sum(g**-beta)``."""
    g = np.asarray(gains, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("gains must be positive")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    w = g ** (-beta)
    return w / w.sum()


def noma_required_powers(
    g_strong: float, g_weak: float, rate_strong: float, rate_weak: float
) -> tuple[float, float]:
    """Minimum (strong, weak) powers meeting both rates under SIC."""
    if g_strong <= 0 or g_weak <= 0:
        raise ValueError("gains must be positive")
    q_s = (2.0 ** rate_strong - 1.0) / g_strong
    q_w = (2.0 ** rate_weak - 1.0) * (q_s * g_weak + 1.0) / g_weak
    return q_s, q_w


def oma_required_power(g: float, rate: float, share: float = 0.5) -> float:
    """Power for ``rate = share * log2(1 + q*g)``."""
    if g <= 0:
        raise ValueError("gain must be positive")
    if not 0.0 < share <= 1.0:
        raise ValueError(f"bandwidth share must lie in (0, 1], got {share}")
    return (2.0 ** (rate / share) - 1.0) / g


def water_fill(gains, budget: float, *, return_level: bool = False):
    """Classic water-filling ``p_i = max(0, mu - 1/g_i)``, ``sum(p) = budget``."""
    g = np.asarray(gains, dtype=np.float64)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if g.size == 0:
        if budget > 0:
            raise ValueError("cannot water-fill a positive budget over no entries")
        return (np.zeros(0), 0.0) if return_level else np.zeros(0)
    if np.any(g <= 0):
        raise ValueError("gains must be positive")
    x, mu = kernels.water_fill_levels((1.0 / g).tolist(), float(budget))
    p = np.asarray(x)
    return (p, mu) if return_level else p


@dataclass(frozen=True)
class MaxMinResult:
    powers: np.ndarray
    rate: float


def _sic_power_for_rate(g: np.ndarray, rate: float) -> np.ndarray:
    # user k cancels every weaker user and sees the stronger ones as noise
    s = 2.0 ** rate - 1.0
    p = np.empty_like(g)
    above = 0.0
    for k in range(len(g)):
        p[k] = s * (above + 1.0 / g[k])
        above += p[k]
    return p


def max_min_bisection(gains, budget: float, tol: float = 1e-6) -> MaxMinResult:
    """Largest common SIC rate for users with descending ``gains``.

    Bisects on the rate until the bracket is narrower than ``tol``; the
    returned powers deliver exactly the lower (feasible) end of the bracket.
    """
    g = np.asarray(gains, dtype=np.float64)
    if g.size == 0 or np.any(g <= 0):
        raise ValueError("gains must be non-empty and positive")
    if np.any(np.diff(g) > 0):
        raise ValueError("gains must be sorted in descending order")
    if not budget > 0 or not tol > 0:
        raise ValueError("budget and tol must be positive")
    if g.size == 1:
        return MaxMinResult(np.array([float(budget)]), log2(1.0 + g[0] * budget))
    lo, hi = 0.0, log2(1.0 + g[0] * budget)
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if _sic_power_for_rate(g, mid).sum() <= budget:
            lo = mid
        else:
            hi = mid
    return MaxMinResult(_sic_power_for_rate(g, lo), lo)


def cr_inspired_pa(
    g_strong: float, g_weak: float, budget: float, rate_weak: float
) -> PowerSplit | None:
    """Serve the weak user first; the strong user gets the most power left.

    Returns ``None`` when the weak rate is out of reach even with the whole
    budget.
    """
    if g_strong <= 0 or g_weak <= 0 or budget <= 0:
        raise ValueError("gains and budget must be positive")
    s = 2.0 ** rate_weak - 1.0
    if budget * g_weak < s - TOL:
        return None
    p_s = (budget * g_weak - s) / (g_weak * (1.0 + s))
    p_s = min(max(p_s, 0.0), budget)
    return PowerSplit(p_strong=p_s, p_weak=budget - p_s)


@dataclass(frozen=True)
class DynamicPA:
    lower: float | None
    upper: float | None
    split: PowerSplit | None

    @property
    def empty(self) -> bool:
        return self.split is None


def _oma_break_even(x: float) -> float:
    # smallest share a with log2(1 + a*x) >= 0.5*log2(1 + x), i.e.
    # (sqrt(1+x) - 1) / x written without cancellation
    return 1.0 / (sqrt(1.0 + x) + 1.0)


def dynamic_pa(g_strong: float, g_weak: float, budget: float) -> DynamicPA:
    """Strong-user power shares for which both NOMA rates beat OMA.

    The OMA baseline gives each user the full ``budget`` on half the
    resource.  The strong condition bounds the share from below, the weak
    condition from above; the midpoint is returned as the split.  The
    interval is empty only when ``g_strong < g_weak``.
    """
    if g_strong <= 0 or g_weak <= 0 or budget <= 0:
        raise ValueError("gains and budget must be positive")
    lo = _oma_break_even(g_strong * budget)
    hi = _oma_break_even(g_weak * budget)
    if lo > hi:
        return DynamicPA(None, None, None)
    a = 0.5 * (lo + hi)
    return DynamicPA(lo, hi, PowerSplit(a * budget, (1.0 - a) * budget))


# --- QoS-constrained schemes ---------------------------------------------

SCHEME_CODES = {name: i for i, name in enumerate(kernels.SCHEMES)}


def _pair_qos(qos: QosLike, plan: PairingPlan | None, n: int):
    if isinstance(qos, QosTarget):
        qos = qos.min_rate_bps_hz
    if np.ndim(qos) == 0:
        r = np.full(n, float(qos))
    else:
        r = np.asarray(qos, dtype=np.float64)
        if r.shape != (n,):
            raise ValueError(f"per-user QoS must have length {n}")
    if np.any(r < 0):
        raise ValueError("QoS rates must be >= 0")
    if plan is None:
        return r[:1], r[1:2]
    return r[plan.strong_ranks()], r[plan.weak_ranks()]


def _cluster_result(scheme, g_s, g_w, budget, qos, lone_full_band=True):
    if g_s <= 0 or g_w <= 0 or budget < 0:
        raise ValueError("gains must be positive and budget non-negative")
    rs, rw = _pair_qos(qos, None, 2)
    out = kernels.allocate(
        SCHEME_CODES[scheme], [g_s], [g_w], rs, rw, float(budget), lone_full_band
    )
    ps, pw, ra_s, ra_w, adm_s, adm_w = out
    return AllocationResult(
        admitted=np.array([adm_s[0], adm_w[0]], dtype=bool),
        power=np.array([ps[0], pw[0]]),
        rate=np.array([ra_s[0], ra_w[0]]),
        strong=np.array([True, False]),
        scheme=scheme,
    )


def e_noma_cluster(g_strong, g_weak, cluster_budget, qos: QosLike) -> AllocationResult:
    """Equal-power NOMA for one cluster.

    If both QoS targets fit, the weak user gets exactly the power for its
    target given that the strong user takes the rest; otherwise the strong
    user gets the whole budget and the weak user is not admitted.  The
    strong user is admitted iff ``log2(1 + budget*g_strong)`` meets its QoS.
    """
    return _cluster_result("E-NOMA", g_strong, g_weak, cluster_budget, qos)


def e_oma_cluster(
    g_strong, g_weak, cluster_budget, qos: QosLike, *, lone_full_band: bool = True
) -> AllocationResult:
    """Equal-power OMA for one cluster.

    Both users on half the sub-channel when both targets fit (floors plus
    water-filled residual); otherwise the strong user gets all the power and,
    with ``lone_full_band``, the whole sub-channel.
    """
    return _cluster_result(
        "E-OMA", g_strong, g_weak, cluster_budget, qos, lone_full_band
    )


def allocate_scheme(
    scheme: str,
    snapshot: ChannelSnapshot,
    plan: PairingPlan,
    total_budget: float,
    qos: QosLike,
    *,
    lone_full_band: bool = True,
) -> AllocationResult:
    """Run ``scheme`` (one of ``kernels.SCHEMES``) on every cluster of ``plan``."""
    if scheme not in SCHEME_CODES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {kernels.SCHEMES}")
    n = snapshot.num_users
    if plan.num_users != n:
        raise ValueError(f"plan covers {plan.num_users} users, snapshot has {n}")
    if total_budget < 0:
        raise ValueError("budget must be >= 0")
    s_idx, w_idx = plan.strong_ranks(), plan.weak_ranks()
    g = snapshot.gains
    rs, rw = _pair_qos(qos, plan, n)
    ps, pw, ra_s, ra_w, adm_s, adm_w = kernels.allocate(
        SCHEME_CODES[scheme], g[s_idx], g[w_idx], rs, rw, float(total_budget),
        lone_full_band,
    )
    admitted = np.zeros(n, dtype=bool)
    power = np.zeros(n)
    rate = np.zeros(n)
    strong = np.zeros(n, dtype=bool)
    admitted[s_idx], admitted[w_idx] = adm_s, adm_w
    power[s_idx], power[w_idx] = ps, pw
    rate[s_idx], rate[w_idx] = ra_s, ra_w
    strong[s_idx] = True
    return AllocationResult(admitted, power, rate, strong, scheme)


def e_noma(snapshot, plan, total_budget, qos) -> AllocationResult:
    """E-NOMA with ``total_budget / K`` per cluster."""
    return allocate_scheme("E-NOMA", snapshot, plan, total_budget, qos)


def e_oma(snapshot, plan, total_budget, qos, *, lone_full_band=True) -> AllocationResult:
    """E-OMA with ``total_budget / K`` per cluster."""
    return allocate_scheme(
        "E-OMA", snapshot, plan, total_budget, qos, lone_full_band=lone_full_band
    )


def c_noma(snapshot, plan, total_budget, qos) -> AllocationResult:
    """Cross-cluster NOMA.

    When the total requirement fits, every user gets its SIC requirement
    and the residual is water-filled across clusters.  Extra cluster power
    ``x`` is split so the weak user stays exactly at its QoS, which leaves
    the strong rate ``log2(2**r_s + g_s*x/2**r_w)``: a water-filling
    problem in the strong gains alone.  Otherwise users are admitted
    greedily in ascending order of required power.  A strong user costs
    ``q_s``; a weak user costs its increment ``q_w`` once its partner is
    in.  A weak user whose partner is still out would cost ``q_s + q_w``,
    and that is never cheaper than the partner alone.
    """
    return allocate_scheme("C-NOMA", snapshot, plan, total_budget, qos)


def c_oma(snapshot, plan, total_budget, qos) -> AllocationResult:
    """Cross-cluster OMA: floors plus global water-filling, else greedy by gain."""
    return allocate_scheme("C-OMA", snapshot, plan, total_budget, qos)
