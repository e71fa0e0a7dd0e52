"""Command-line front end.

Subcommands map to experiment modes; every config key has a flag and flags
win over the config file. Exit codes: 0 success, 1 config error,
2 numerical failure, 3 degraded ensemble (some members failed but the
experiment completed).
"""

from __future__ import annotations

import argparse
import sys

from .engine import NumericalBlowupError
from .experiments import (
    ConfigError,
    analyze_directory,
    load_config,
    run_experiment,
)
from .io import write_json
from .measures import BracketError

_SUBCOMMAND_MODE = {
    "run": None,  # single, or ensemble when --ensemble > 1
    "sweep": "tau-sweep",
    "tauc": "tau-c-search",
    "scaling": "scaling-study",
    "bestresponse": "best-response-curve",
}

# flag name -> config key
_FLAG_KEYS = {
    "alpha": "params.alpha",
    "delta": "params.delta",
    "tau": "params.tau",
    "eps-width": "params.eps_width",
    "big-l": "params.big_l",
    "n": "params.n",
    "dt": "params.dt",
    "horizon": "params.horizon",
    "seed": "params.seed",
    "theta": "params.theta",
    "rho": "params.rho",
    "topology": "topology.kind",
    "p": "topology.p",
    "k-ring": "topology.k_ring",
    "p-rewire": "topology.p_rewire",
    "require-connected": "topology.require_connected",
    "k0": "init.k0",
    "s0-mode": "init.s0_mode",
    "s0-value": "init.s0_value",
    "aggregate-stride": "record.aggregate_stride",
    "snapshot-stride": "record.snapshot_stride",
    "events": "record.events",
    "out": "experiment.out",
    "ensemble": "experiment.ensemble",
    "tau-grid": "experiment.tau_grid",
    "tau-lo": "experiment.tau_lo",
    "tau-hi": "experiment.tau_hi",
    "rel-width": "experiment.rel_width",
    "n-grid": "experiment.n_grid",
    "p-grid": "experiment.p_grid",
    "br-tau-min": "experiment.br_tau_min",
    "br-tau-max": "experiment.br_tau_max",
    "br-points": "experiment.br_points",
    "br-delta": "experiment.br_delta",
    "schedule": "experiment.schedule",
    "workers": "experiment.workers",
    "burn-in": "experiment.burn_in",
    "preset": "experiment.preset",
}


def _experiment_parser(sub, name: str, help_text: str) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    parser.add_argument("--config", help="INI config file (or a prior manifest.txt)")
    for flag in _FLAG_KEYS:
        parser.add_argument(f"--{flag}", metavar="V")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imitecon",
        description="Simulate and analyze the imitate-the-best household economy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _experiment_parser(sub, "run", "one trajectory (or an ensemble at one tau)")
    _experiment_parser(sub, "sweep", "ensembles over a tau grid with histograms")
    _experiment_parser(sub, "tauc", "bisect for the critical interaction time")
    _experiment_parser(sub, "scaling", "tau_c over an ER (n, p) grid plus scaling fit")
    _experiment_parser(sub, "bestresponse", "analytic best-response curve over tau")
    analyze = sub.add_parser("analyze", help="re-analyze a written run directory")
    analyze.add_argument("--dir", required=True, help="directory with trajectory.csv")
    analyze.add_argument("--burn-in", type=float, default=0.5)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            report = analyze_directory(args.dir, burn_in=args.burn_in)
            write_json(report, f"{args.dir}/analysis.json")
            print(f"wrote {args.dir}/analysis.json ({report['classification']})")
            return 0
        overrides = {}
        for flag, key in _FLAG_KEYS.items():
            value = getattr(args, flag.replace("-", "_"), None)
            if value is not None:
                overrides[key] = value
        forced_mode = _SUBCOMMAND_MODE[args.command]
        if forced_mode is not None:
            overrides["experiment.mode"] = forced_mode
        spec = load_config(args.config, overrides)
        if args.command == "run":
            # `run` is single unless an ensemble is requested explicitly
            # (via flag or a config file already in ensemble mode).
            if "experiment.ensemble" in overrides and spec.ensemble > 1:
                mode = "ensemble"
            elif spec.mode in ("single", "ensemble"):
                mode = spec.mode
            else:
                mode = "single"
            if mode != spec.mode:
                spec = load_config(args.config, {**overrides, "experiment.mode": mode})
        result = run_experiment(spec)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalBlowupError, BracketError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out}/report.json")
    if result.degraded:
        print("warning: some ensemble members failed; result is degraded", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
