"""Seeded Monte Carlo harness for the pairing and power-allocation studies.

Trial ``t`` draws everything from its own stream ``make_rng(seed, t)``: user
distances, fading, shadowing and then one permutation for random pairing.
Trials are processed in contiguous chunks, possibly on several threads, and
concatenated in trial order, so results do not depend on ``workers``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels, pairing
from .channel import ChannelConfig, drop_users, make_rng, realize_snapshot
from .power import QosTarget, f_pa
from .rates import fpa_cluster_gain

KINDS = ("gain_vs_distance", "gain_vs_cluster_index", "outage_sweep", "sumrate_sweep")
GAIN_KINDS = KINDS[:2]
SWEEP_KINDS = KINDS[2:]
SCHEMES = kernels.SCHEMES
ROLES = ("strong", "weak")
DEFAULT_POWER_GRID_DBM = tuple(float(p) for p in range(0, 41, 5))
MAX_SEED = 2**64


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment.

    ``pairing_algorithms`` drive the gain experiments; the sweeps pair users
    with ``sweep_pairing``.  Sweep powers are total transmit powers in dBm.
    """

    kind: str = "gain_vs_distance"
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    pairing_algorithms: tuple[str, ...] = ("nlupa", "dnlupa", "random")
    sweep_pairing: str = "nlupa"
    z: int = 4
    fpa_ratio_weak: float = 0.6
    transmit_power_w: float = 1.0
    qos: QosTarget = field(default_factory=QosTarget)
    power_grid_dbm: tuple[float, ...] = DEFAULT_POWER_GRID_DBM
    schemes: tuple[str, ...] = SCHEMES
    trials: int = 10_000
    seed: int = 0
    bin_width_db: float = 1.0
    workers: int = 1
    oma_lone_full_band: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.pairing_algorithms:
            raise ValueError("pairing_algorithms: must not be empty")
        for alg in self.pairing_algorithms:
            if alg not in pairing.ALGORITHMS:
                raise ValueError(f"pairing_algorithms: unknown algorithm {alg!r}")
        if self.sweep_pairing not in pairing.ALGORITHMS:
            raise ValueError(f"sweep_pairing: unknown algorithm {self.sweep_pairing!r}")
        n = self.channel.num_users
        uses_z = "dnlupa" in self.pairing_algorithms or self.sweep_pairing == "dnlupa"
        if uses_z and (self.z < 1 or n % (2 * self.z)):
            raise ValueError(f"z: num_users ({n}) must be a multiple of 2*z (z={self.z})")
        try:
            f_pa(self.fpa_ratio_weak)
        except ValueError as exc:
            raise ValueError(f"fpa_ratio_weak: {exc}") from None
        if not self.transmit_power_w > 0:
            raise ValueError("transmit_power_w must be positive")
        grid = self.power_grid_dbm
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("power_grid_dbm must be non-empty and strictly increasing")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"schemes: unknown scheme {s!r}")
        if not self.schemes:
            raise ValueError("schemes: must not be empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.bin_width_db > 0:
            raise ValueError("bin_width_db must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def with_kind(self, kind: str) -> "ExperimentSpec":
        return replace(self, kind=kind)

    @property
    def power_grid_w(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.power_grid_dbm) / 10.0) / 1000.0


@dataclass
class TrialRecords:
    """Raw per-trial outputs, ordered by trial index.

    Gain kinds fill ``distance_db``/``gain`` (algorithm -> (T, K) arrays);
    sweep kinds fill ``out_strong``/``out_weak``/``sum_rate`` with shape
    (P, T, 4), scheme axis in ``SCHEMES`` order.
    """

    kind: str
    trials: int
    distance_db: dict = field(default_factory=dict)
    gain: dict = field(default_factory=dict)
    out_strong: np.ndarray | None = None
    out_weak: np.ndarray | None = None
    sum_rate: np.ndarray | None = None

    def arrays(self):
        for alg in sorted(self.distance_db):
            yield f"distance_db/{alg}", self.distance_db[alg]
            yield f"gain/{alg}", self.gain[alg]
        for name in ("out_strong", "out_weak", "sum_rate"):
            arr = getattr(self, name)
            if arr is not None:
                yield name, arr

    def digest(self) -> str:
        h = hashlib.sha256()
        for name, arr in self.arrays():
            h.update(name.encode())
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


def _trial_gains(spec: ExperimentSpec, start: int, stop: int):
    n = spec.channel.num_users
    gains = np.empty((stop - start, n))
    perms = np.empty((stop - start, n), dtype=np.intp)
    for i, t in enumerate(range(start, stop)):
        rng = make_rng(spec.seed, t)
        snap = realize_snapshot(drop_users(spec.channel, rng), spec.channel, rng)
        gains[i] = snap.gains
        # drawn for every spec so the stream layout never depends on the
        # selected algorithms
        plan = pairing.random_pairing(n, rng)
        perms[i] = np.concatenate([plan.strong_ranks(), plan.weak_ranks()])
    return gains, perms


def _plan_indices(spec, alg, perms):
    k = spec.channel.num_users // 2
    if alg == "random":
        return perms[:, :k], perms[:, k:]
    plan = pairing.make_plan(alg, spec.channel.num_users, z=spec.z)
    t = perms.shape[0]
    return (
        np.broadcast_to(plan.strong_ranks(), (t, k)),
        np.broadcast_to(plan.weak_ranks(), (t, k)),
    )


def _chunk(spec: ExperimentSpec, start: int, stop: int):
    gains, perms = _trial_gains(spec, start, stop)
    if spec.kind in GAIN_KINDS:
        out = {}
        for alg in spec.pairing_algorithms:
            s_idx, w_idx = _plan_indices(spec, alg, perms)
            gs = np.take_along_axis(gains, s_idx, axis=1)
            gw = np.take_along_axis(gains, w_idx, axis=1)
            out[alg] = (
                10.0 * np.log10(gs / gw),
                fpa_cluster_gain(gs, gw, spec.transmit_power_w, spec.fpa_ratio_weak),
            )
        return out
    s_idx, w_idx = _plan_indices(spec, spec.sweep_pairing, perms)
    gs = np.take_along_axis(gains, s_idx, axis=1)
    gw = np.take_along_axis(gains, w_idx, axis=1)
    r = spec.qos.min_rate_bps_hz
    return kernels.sweep(gs, gw, r, r, spec.power_grid_w, spec.oma_lone_full_band)


def run_trials(spec: ExperimentSpec) -> TrialRecords:
    """Run every trial of ``spec`` and return the raw records."""
    spec.validate()
    n_chunks = min(spec.workers, spec.trials)
    edges = np.linspace(0, spec.trials, n_chunks + 1).astype(int)
    bounds = list(zip(edges[:-1].tolist(), edges[1:].tolist()))
    if n_chunks == 1:
        parts = [_chunk(spec, *bounds[0])]
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            parts = list(pool.map(lambda b: _chunk(spec, *b), bounds))
    rec = TrialRecords(kind=spec.kind, trials=spec.trials)
    if spec.kind in GAIN_KINDS:
        for alg in spec.pairing_algorithms:
            rec.distance_db[alg] = np.concatenate([p[alg][0] for p in parts])
            rec.gain[alg] = np.concatenate([p[alg][1] for p in parts])
    else:
        rec.out_strong = np.concatenate([p[0] for p in parts], axis=1)
        rec.out_weak = np.concatenate([p[1] for p in parts], axis=1)
        rec.sum_rate = np.concatenate([p[2] for p in parts], axis=1)
    return rec


# --- aggregation ----------------------------------------------------------

COLUMNS = {
    "gain_vs_distance": (
        ("algorithm", str), ("distance_db", float), ("mean_gain", float),
        ("stderr", float), ("count", int),
    ),
    "gain_vs_cluster_index": (
        ("algorithm", str), ("cluster_index", int), ("mean_gain", float),
        ("stderr", float), ("trials", int),
    ),
    "outage_sweep": (
        ("power", float), ("scheme", str), ("role", str), ("outage_prob", float),
        ("stderr", float), ("trials", int),
    ),
    "sumrate_sweep": (
        ("power", float), ("scheme", str), ("mean_sum_rate", float),
        ("stderr", float), ("trials", int),
    ),
}


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


@dataclass
class AggregateStats:
    """Tabular experiment output; one row per reported point."""

    kind: str
    rows: list[tuple]

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(name for name, _ in COLUMNS[self.kind])

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def where(self, **match) -> list[dict]:
        """Rows (as dicts) whose columns equal every ``match`` value."""
        out = []
        for row in self.rows:
            d = dict(zip(self.columns, row))
            if all(d[k] == v for k, v in match.items()):
                out.append(d)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, kind: str, text: str) -> "AggregateStats":
        schema = COLUMNS[kind]
        reader = csv.reader(io.StringIO(text, newline=""))
        header = next(reader)
        if tuple(header) != tuple(name for name, _ in schema):
            raise ValueError(f"unexpected CSV header {header}")
        rows = [tuple(typ(v) for (_, typ), v in zip(schema, rec)) for rec in reader]
        return cls(kind, rows)


def _mean_se(x: np.ndarray, axis: int = 0):
    n = x.shape[axis]
    mean = x.mean(axis=axis)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, x.std(axis=axis, ddof=1) / math.sqrt(n)


def _require(spec, kinds):
    if spec.kind not in kinds:
        raise ValueError(f"spec.kind is {spec.kind!r}; expected one of {kinds}")


def run_gain_vs_distance(spec: ExperimentSpec, records: TrialRecords | None = None):
    """Mean NOMA-over-OMA gain per distance bin, per pairing algorithm."""
    _require(spec, ("gain_vs_distance",))
    rec = records or run_trials(spec)
    rows = []
    bw = spec.bin_width_db
    for alg in spec.pairing_algorithms:
        d = rec.distance_db[alg].ravel()
        g = rec.gain[alg].ravel()
        bins = np.floor(d / bw).astype(np.int64)
        for b in np.unique(bins):
            sel = g[bins == b]
            mean, se = _mean_se(sel)
            rows.append((alg, float((b + 0.5) * bw), float(mean), float(se), int(sel.size)))
    return AggregateStats(spec.kind, rows)


def run_gain_vs_cluster_index(spec: ExperimentSpec, records: TrialRecords | None = None):
    """Per-trial cluster gains sorted descending, averaged by sorted index."""
    _require(spec, ("gain_vs_cluster_index",))
    rec = records or run_trials(spec)
    rows = []
    for alg in spec.pairing_algorithms:
        ranked = -np.sort(-rec.gain[alg], axis=1)
        mean, se = _mean_se(ranked)
        for i in range(ranked.shape[1]):
            rows.append((alg, i + 1, float(mean[i]), float(se[i]), rec.trials))
    return AggregateStats(spec.kind, rows)


def _sweep_records(spec, records):
    if records is not None:
        return records
    return run_trials(spec)


def run_outage_sweep(spec: ExperimentSpec, records: TrialRecords | None = None):
    """Outage probability per power, scheme and role."""
    _require(spec, SWEEP_KINDS)
    rec = _sweep_records(spec, records)
    k = spec.channel.num_users // 2
    rows = []
    for ip, p_dbm in enumerate(spec.power_grid_dbm):
        for scheme in spec.schemes:
            s = SCHEMES.index(scheme)
            for role, arr in (("strong", rec.out_strong), ("weak", rec.out_weak)):
                mean, se = _mean_se(arr[ip, :, s] / k)
                rows.append((float(p_dbm), scheme, role, float(mean), float(se), rec.trials))
    return AggregateStats("outage_sweep", rows)


def run_sumrate_sweep(spec: ExperimentSpec, records: TrialRecords | None = None):
    """Mean effective sum rate per power and scheme."""
    _require(spec, SWEEP_KINDS)
    rec = _sweep_records(spec, records)
    rows = []
    for ip, p_dbm in enumerate(spec.power_grid_dbm):
        for scheme in spec.schemes:
            mean, se = _mean_se(rec.sum_rate[ip, :, SCHEMES.index(scheme)])
            rows.append((float(p_dbm), scheme, float(mean), float(se), rec.trials))
    return AggregateStats("sumrate_sweep", rows)


RUNNERS = {
    "gain_vs_distance": run_gain_vs_distance,
    "gain_vs_cluster_index": run_gain_vs_cluster_index,
    "outage_sweep": run_outage_sweep,
    "sumrate_sweep": run_sumrate_sweep,
}


def run(spec: ExperimentSpec, records: TrialRecords | None = None) -> AggregateStats:
    return RUNNERS[spec.kind](spec, records)
