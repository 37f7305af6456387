"""Downlink NOMA resource allocation: user pairing, power allocation and a
seeded Monte Carlo harness comparing NOMA with OMA."""

__version__ = "0.1.0"

from .channel import ChannelConfig, ChannelSnapshot, distance_db, drop_users, realize_snapshot
from .experiments import AggregateStats, ExperimentSpec, run, run_trials
from .kernels import BACKEND
from .pairing import Cluster, PairingPlan, d_nlupa, next_best_diversity, nlupa, random_pairing
from .power import AllocationResult, PowerSplit, QosTarget

__all__ = [
    "AggregateStats",
    "AllocationResult",
    "BACKEND",
    "ChannelConfig",
    "ChannelSnapshot",
    "Cluster",
    "ExperimentSpec",
    "PairingPlan",
    "PowerSplit",
    "QosTarget",
    "d_nlupa",
    "distance_db",
    "drop_users",
    "next_best_diversity",
    "nlupa",
    "random_pairing",
    "realize_snapshot",
    "run",
    "run_trials",
]
