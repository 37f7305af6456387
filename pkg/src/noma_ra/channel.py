"""User drops and channel snapshots.

Composite power gains combine distance path loss, log-normal shadowing and
Rayleigh fading, and are normalised by the noise power so that ``p * g`` is
the receive SNR for a transmit power ``p`` in watts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# cell-edge user (100 m, alpha 2.5, no shadowing/fading) sees 30 dB SNR at 1 W
DEFAULT_NOISE_POWER_W = 1e-8


@dataclass(frozen=True)
class ChannelConfig:
    """Geometry and propagation parameters for one cell.

    ``fading`` and ``shadowing_std_db = 0`` switch the random factors off,
    which gives deterministic gains for tests and degenerate experiments.
    """

    cell_radius_m: float = 100.0
    min_distance_m: float = 1.0
    path_loss_exponent: float = 2.5
    shadowing_std_db: float = 3.0
    noise_power_w: float = DEFAULT_NOISE_POWER_W
    num_users: int = 16
    fading: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.min_distance_m > 0:
            raise ValueError("min_distance_m must be positive")
        if self.cell_radius_m < self.min_distance_m:
            raise ValueError("cell_radius_m must be >= min_distance_m")
        if self.path_loss_exponent < 2:
            raise ValueError("path_loss_exponent must be >= 2")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be >= 0")
        if not self.noise_power_w > 0:
            raise ValueError("noise_power_w must be positive")
        if self.num_users < 2 or self.num_users % 2:
            raise ValueError("num_users must be even and >= 2")


@dataclass(frozen=True)
class ChannelSnapshot:
    """Normalised gains for one trial.

    ``gains`` is in rank order (rank 0 strongest when ``descending``) and
    ``order[rank]`` is the original user id of that rank.
    """

    gains: np.ndarray
    order: np.ndarray
    descending: bool = True

    @property
    def num_users(self) -> int:
        return len(self.gains)

    def unordered(self) -> np.ndarray:
        """Gains indexed by original user id."""
        out = np.empty_like(self.gains)
        out[self.order] = self.gains
        return out


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Generator for ``seed``, or for the independent sub-stream ``stream``.

    Sub-streams use the ``SeedSequence`` spawn key, so ``make_rng(s, t)`` is
    the ``t``-th child of ``SeedSequence(s)`` no matter how many siblings
    were created before it.
    """
    if stream is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ss = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def drop_users(config: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Distances of ``num_users`` users dropped uniformly over the annulus."""
    r0, r1 = config.min_distance_m, config.cell_radius_m
    u = rng.random(config.num_users)
    # inverse CDF of the area-uniform radius on [r0, r1]
    return np.sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0))


def order_gains(gains) -> ChannelSnapshot:
    """Sort gains descending; ties keep the lower user id as stronger."""
    g = np.asarray(gains, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gains must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise ValueError("gains must be positive and finite")
    order = np.argsort(-g, kind="stable")
    return ChannelSnapshot(gains=g[order], order=order, descending=True)


def realize_snapshot(
    distances, config: ChannelConfig, rng: np.random.Generator
) -> ChannelSnapshot:
    """Draw fading and shadowing for ``distances`` and return ordered gains.

    ``g = |h|^2 * 10**(X/10) * d**(-alpha) / noise`` with ``|h|^2`` unit-mean
    exponential and ``X ~ N(0, shadowing_std_db**2)``.  Draws are made in a
    fixed order (fading, then shadowing) whether or not a factor is enabled,
    so toggling one factor does not shift the other's random stream.
    """
    if not config.noise_power_w > 0:
        raise ValueError("noise power must be positive")
    d = np.asarray(distances, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    n = d.shape[0]
    h2 = rng.standard_exponential(n)
    x_db = rng.standard_normal(n) * config.shadowing_std_db
    if not config.fading:
        h2 = np.ones(n)
    g = h2 * 10.0 ** (x_db / 10.0) * d ** (-config.path_loss_exponent)
    return order_gains(g / config.noise_power_w)


def distance_db(g_strong, g_weak):
    """Gain separation ``10*log10(g_strong/g_weak)`` in dB (array-friendly)."""
    gs = np.asarray(g_strong, dtype=np.float64)
    gw = np.asarray(g_weak, dtype=np.float64)
    if np.any(gs <= 0) or np.any(gw <= 0):
        raise ValueError("gains must be positive")
    out = 10.0 * np.log10(gs / gw)
    return float(out) if out.ndim == 0 else out
