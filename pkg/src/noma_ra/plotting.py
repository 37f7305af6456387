"""Optional SVG figures for experiment aggregates (needs matplotlib)."""

from __future__ import annotations

from collections import defaultdict

from .experiments import AggregateStats


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("plotting needs matplotlib (pip install noma-ra[plot])") from exc
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "noma-ra"
    return plt


def plot_aggregate(stats: AggregateStats, path) -> None:
    """Write one SVG figure for ``stats`` to ``path``."""
    plt = _pyplot()
    if stats.kind == "outage_sweep":
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
        for ax, role in zip(axes, ("strong", "weak")):
            series = defaultdict(list)
            for r in stats.where(role=role):
                series[r["scheme"]].append((r["power"], r["outage_prob"]))
            for name, pts in series.items():
                ax.semilogy(*zip(*pts), marker="o", label=name)
            ax.set_title(f"{role.capitalize()} user")
            ax.set_xlabel("Transmit power (dBm)")
        axes[0].set_ylabel("Outage probability")
        axes[0].legend()
    else:
        x_col, y_col, group, xlabel, ylabel = {
            "gain_vs_distance": ("distance_db", "mean_gain", "algorithm",
                                 "Distance (dB)", "Sum rate gain (bit/s/Hz)"),
            "gain_vs_cluster_index": ("cluster_index", "mean_gain", "algorithm",
                                      "Cluster index", "Sum rate gain (bit/s/Hz)"),
            "sumrate_sweep": ("power", "mean_sum_rate", "scheme",
                              "Transmit power (dBm)", "Effective sum rate (bit/s/Hz)"),
        }[stats.kind]
        fig, ax = plt.subplots(figsize=(6, 4))
        series = defaultdict(list)
        for r in stats.where():
            series[r[group]].append((r[x_col], r[y_col]))
        for name, pts in series.items():
            ax.plot(*zip(*pts), marker=".", label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
