"""Command-line front end.

    noma-ra {gain-distance,gain-index,outage,sumrate,all} [options]

Each experiment writes ``<name>.csv`` into ``--out`` together with
``manifest.ini``, a config file that reproduces the run.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys

from . import __version__, kernels
from .config import ConfigError, parse_config, spec_to_config
from .experiments import AggregateStats, ExperimentSpec, run, run_trials
from .pairing import ALGORITHMS

COMMANDS = {
    "gain-distance": "gain_vs_distance",
    "gain-index": "gain_vs_cluster_index",
    "outage": "outage_sweep",
    "sumrate": "sumrate_sweep",
}
OUTPUT_NAMES = {
    "gain_vs_distance": "gain_distance",
    "gain_vs_cluster_index": "gain_index",
    "outage_sweep": "outage",
    "sumrate_sweep": "sumrate",
}


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="sectioned key-value config file")
    common.add_argument("--seed", type=_u64, help="64-bit RNG seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per experiment")
    common.add_argument("--out", metavar="DIR", default="results", help="output directory")
    common.add_argument("--plot", action="store_true", help="also write SVG figures")
    common.add_argument("--pairing", choices=ALGORITHMS,
                        help="pairing algorithm (replaces the configured list)")
    common.add_argument("--z", type=int, help="D-NLUPA set size")
    common.add_argument("--workers", type=int, help="worker threads for the trial loop")

    parser = argparse.ArgumentParser(
        prog="noma-ra",
        description="Downlink NOMA user pairing and power allocation experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "all"):
        sub.add_parser(name, parents=[common])
    return parser


def _overrides(args) -> dict:
    out = {"seed": args.seed, "trials": args.trials, "z": args.z, "workers": args.workers}
    if args.pairing:
        out["pairing_algorithms"] = (args.pairing,)
        out["sweep_pairing"] = args.pairing
    return out


def run_command(command: str, spec: ExperimentSpec, out_dir, *, plot=False,
                argv=None) -> dict[str, AggregateStats]:
    """Run ``command`` and write CSVs, manifest and (optionally) SVGs."""
    kinds = list(COMMANDS.values()) if command == "all" else [COMMANDS[command]]
    os.makedirs(out_dir, exist_ok=True)
    results = {}
    cache = {}
    for kind in kinds:
        s = spec.with_kind(kind)
        # the two gain kinds share trial records, as do the two sweeps
        family = "gain" if kind.startswith("gain") else "sweep"
        if family not in cache:
            cache[family] = run_trials(s)
        results[kind] = run(s, cache[family])
    outputs = []
    for kind, stats in results.items():
        path = os.path.join(out_dir, OUTPUT_NAMES[kind] + ".csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(stats.to_csv())
        outputs.append(path)
        if plot:
            from .plotting import plot_aggregate

            svg = os.path.join(out_dir, OUTPUT_NAMES[kind] + ".svg")
            plot_aggregate(stats, svg)
            outputs.append(svg)
    meta = {
        "tool_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "argv": " ".join(argv or []),
        "outputs": ", ".join(os.path.basename(p) for p in outputs),
    }
    with open(os.path.join(out_dir, "manifest.ini"), "w", encoding="utf-8") as fh:
        fh.write(spec_to_config(spec, meta))
    return results


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    try:
        spec = parse_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"noma-ra: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"noma-ra: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        run_command(args.command, spec, args.out, plot=args.plot, argv=argv)
    except OSError as exc:
        print(f"noma-ra: I/O error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"noma-ra: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
