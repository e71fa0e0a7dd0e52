"""Reproducible experiment front door.

A flat INI config (every key mirrored by a CLI flag, flag wins) resolves to
an ExperimentSpec; each experiment directory gets a manifest echoing the
fully resolved spec, and re-running from that manifest reproduces every
output byte for byte.

Seed layout: run seeds derive from (master, 0, member, tau-key), graph
seeds from (master, 1, member), and scaling-study points namespace their
own master under (master, 2, n-index, p-index). Members are therefore
independent of ensemble size and of execution order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .econ import Params
from .engine import (
    InitSpec,
    NumericalBlowupError,
    RecordSpec,
    SimConfig,
    Trajectory,
    derive_seed,
    run,
)
from .io import (
    write_events_csv,
    write_histogram_csv,
    write_json,
    write_snapshots_csv,
    write_trajectory_csv,
)
from .measures import (
    BracketError,
    classify_regime,
    estimate_tau_c,
    oscillation_period,
    savings_histogram,
    scaling_fit,
)
from .network import TopologySpec, avg_shortest_path, mean_degree
from .theory import best_response, s_star_tau


class ConfigError(ValueError):
    """A config key is unknown, malformed, or out of range."""


MODES = (
    "single",
    "ensemble",
    "tau-sweep",
    "tau-c-search",
    "scaling-study",
    "best-response-curve",
)

_PRESETS = {
    "none": {},
    # Network-structure studies: faster depreciation, random graphs.
    "network-study": {("params", "delta"): "0.2", ("topology", "kind"): "er"},
}


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    return int(s)


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_str(s: str) -> str:
    return s.strip()


def _parse_auto_float(s: str) -> float | None:
    s = s.strip().lower()
    return None if s in ("auto", "") else float(s)


def _parse_auto_int(s: str) -> int | None:
    s = s.strip().lower()
    return None if s in ("auto", "") else int(s)


def _parse_float_list(s: str):
    return tuple(float(tok) for tok in s.replace(",", " ").split())


def _parse_int_list(s: str):
    return tuple(int(tok) for tok in s.replace(",", " ").split())


def _parse_opt_float_list(s: str):
    s = s.strip()
    return None if not s else _parse_float_list(s)


def _fmt_value(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# section -> key -> (parser, default-as-string)
_SCHEMA: dict[str, dict[str, tuple]] = {
    "params": {
        "alpha": (_parse_float, "0.5"),
        "delta": (_parse_float, "0.05"),
        "tau": (_parse_float, "500.0"),
        "eps_width": (_parse_float, "0.01"),
        "big_l": (_parse_float, "1.0"),
        "n": (_parse_int, "100"),
        "dt": (_parse_float, "1.0"),
        "horizon": (_parse_auto_float, "auto"),  # auto -> 5e3 * tau
        "seed": (_parse_int, "0"),
        "theta": (_parse_float, "1.0"),
        "rho": (_parse_float, "0.0"),
    },
    "topology": {
        "kind": (_parse_str, "complete"),
        "p": (_parse_float, "0.1"),
        "k_ring": (_parse_int, "4"),
        "p_rewire": (_parse_float, "0.1"),
        "require_connected": (_parse_bool, "false"),
    },
    "init": {
        "k0": (_parse_float, "1.0"),
        "s0_mode": (_parse_str, "uniform"),
        "s0_value": (_parse_auto_float, ""),
        "s0_values": (_parse_opt_float_list, ""),
    },
    "record": {
        "aggregate_stride": (_parse_auto_int, "auto"),
        "snapshot_stride": (_parse_auto_int, "auto"),
        "events": (_parse_bool, "false"),
    },
    "experiment": {
        "mode": (_parse_str, "single"),
        "out": (_parse_str, "out"),
        "ensemble": (_parse_int, "20"),
        "tau_grid": (_parse_float_list, "10,50,100,250,500"),
        "tau_lo": (_parse_float, "50"),
        "tau_hi": (_parse_float, "600"),
        "rel_width": (_parse_float, "0.2"),
        "n_grid": (_parse_int_list, "50,100,200"),
        "p_grid": (_parse_float_list, "0.2,0.5,1.0"),
        "br_tau_min": (_parse_float, "10"),
        "br_tau_max": (_parse_float, "5000"),
        "br_points": (_parse_int, "25"),
        "br_delta": (_parse_float, "1e-7"),
        "schedule": (_parse_str, "bernoulli"),
        "workers": (_parse_auto_int, "auto"),
        "burn_in": (_parse_float, "0.5"),
        "preset": (_parse_str, "none"),
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment description."""

    mode: str
    params: Params
    topology: TopologySpec
    init: InitSpec
    record: RecordSpec
    schedule: str
    out: Path
    ensemble: int
    tau_grid: tuple[float, ...]
    tau_lo: float
    tau_hi: float
    rel_width: float
    n_grid: tuple[int, ...]
    p_grid: tuple[float, ...]
    br_tau_min: float
    br_tau_max: float
    br_points: int
    br_delta: float
    workers: int | None
    burn_in: float
    preset: str

    def to_manifest(self) -> str:
        values = {
            ("params", "alpha"): self.params.alpha,
            ("params", "delta"): self.params.delta,
            ("params", "tau"): self.params.tau,
            ("params", "eps_width"): self.params.eps_width,
            ("params", "big_l"): self.params.big_l,
            ("params", "n"): self.params.n,
            ("params", "dt"): self.params.dt,
            ("params", "horizon"): self.params.horizon,
            ("params", "seed"): self.params.seed,
            ("params", "theta"): self.params.theta,
            ("params", "rho"): self.params.rho,
            ("topology", "kind"): self.topology.kind,
            ("topology", "p"): self.topology.p,
            ("topology", "k_ring"): self.topology.k_ring,
            ("topology", "p_rewire"): self.topology.p_rewire,
            ("topology", "require_connected"): self.topology.require_connected,
            ("init", "k0"): self.init.k0,
            ("init", "s0_mode"): self.init.s0_mode,
            ("init", "s0_value"): "" if self.init.s0_value is None else self.init.s0_value,
            ("init", "s0_values"): "" if self.init.s0_values is None else self.init.s0_values,
            ("record", "aggregate_stride"): self.record.aggregate_stride,
            ("record", "snapshot_stride"): self.record.snapshot_stride,
            ("record", "events"): self.record.events,
            ("experiment", "mode"): self.mode,
            ("experiment", "out"): str(self.out),
            ("experiment", "ensemble"): self.ensemble,
            ("experiment", "tau_grid"): self.tau_grid,
            ("experiment", "tau_lo"): self.tau_lo,
            ("experiment", "tau_hi"): self.tau_hi,
            ("experiment", "rel_width"): self.rel_width,
            ("experiment", "n_grid"): self.n_grid,
            ("experiment", "p_grid"): self.p_grid,
            ("experiment", "br_tau_min"): self.br_tau_min,
            ("experiment", "br_tau_max"): self.br_tau_max,
            ("experiment", "br_points"): self.br_points,
            ("experiment", "br_delta"): self.br_delta,
            ("experiment", "schedule"): self.schedule,
            ("experiment", "workers"): self.workers,
            ("experiment", "burn_in"): self.burn_in,
            ("experiment", "preset"): self.preset,
        }
        lines = [f"# imitecon manifest (version {__version__})"]
        for section, keys in _SCHEMA.items():
            lines.append(f"[{section}]")
            for key in keys:
                v = values[(section, key)]
                lines.append(f"{key} = {'' if v == '' else _fmt_value(v)}")
            lines.append("")
        return "\n".join(lines)


def _read_ini(path) -> dict[tuple[str, str], str]:
    import configparser

    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    out: dict[tuple[str, str], str] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            out[(section, key)] = value
    return out


def load_config(
    path=None, overrides: dict[str, str] | None = None
) -> ExperimentSpec:
    """Resolve file values, preset, and flag overrides into an ExperimentSpec.

    Precedence: override > file > preset > built-in default. Raises
    ConfigError naming the offending key on unknown or out-of-range values.
    """
    file_vals = _read_ini(path) if path is not None else {}
    over_vals: dict[tuple[str, str], str] = {}
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown config key [{section}] {key}")
        over_vals[(section, key)] = value

    preset_name = over_vals.get(
        ("experiment", "preset"),
        file_vals.get(("experiment", "preset"), "none"),
    ).strip()
    if preset_name not in _PRESETS:
        raise ConfigError(f"unknown preset {preset_name!r}")
    preset_vals = _PRESETS[preset_name]

    def raw(section: str, key: str) -> str:
        for layer in (over_vals, file_vals, preset_vals):
            if (section, key) in layer:
                return layer[(section, key)]
        return _SCHEMA[section][key][1]

    parsed: dict[tuple[str, str], object] = {}
    for section, keys in _SCHEMA.items():
        for key, (parser, _default) in keys.items():
            text = raw(section, key)
            try:
                parsed[(section, key)] = parser(text)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc

    def grab(section: str, names: tuple[str, ...]) -> dict:
        return {name: parsed[(section, name)] for name in names}

    try:
        params = Params(**grab("params", tuple(_SCHEMA["params"])))
        s0_values = parsed[("init", "s0_values")]
        init = InitSpec(
            k0=parsed[("init", "k0")],
            s0_mode=parsed[("init", "s0_mode")],
            s0_value=parsed[("init", "s0_value")],
            s0_values=s0_values,
        )
        topology = TopologySpec(**grab("topology", tuple(_SCHEMA["topology"])))
        record = RecordSpec(
            aggregate_stride=parsed[("record", "aggregate_stride")],
            snapshot_stride=parsed[("record", "snapshot_stride")],
            events=parsed[("record", "events")],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    mode = parsed[("experiment", "mode")]
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
    schedule = parsed[("experiment", "schedule")]
    if schedule not in ("bernoulli", "exact", "cyclic"):
        raise ConfigError(f"unknown schedule {schedule!r}")
    burn_in = parsed[("experiment", "burn_in")]
    if not 0.0 <= burn_in < 1.0:
        raise ConfigError(f"burn_in must be in [0, 1), got {burn_in}")
    ensemble = parsed[("experiment", "ensemble")]
    if ensemble < 1:
        raise ConfigError(f"ensemble must be >= 1, got {ensemble}")

    return ExperimentSpec(
        mode=mode,
        params=params,
        topology=topology,
        init=init,
        record=record,
        schedule=schedule,
        out=Path(parsed[("experiment", "out")]),
        ensemble=ensemble,
        tau_grid=parsed[("experiment", "tau_grid")],
        tau_lo=parsed[("experiment", "tau_lo")],
        tau_hi=parsed[("experiment", "tau_hi")],
        rel_width=parsed[("experiment", "rel_width")],
        n_grid=parsed[("experiment", "n_grid")],
        p_grid=parsed[("experiment", "p_grid")],
        br_tau_min=parsed[("experiment", "br_tau_min")],
        br_tau_max=parsed[("experiment", "br_tau_max")],
        br_points=parsed[("experiment", "br_points")],
        br_delta=parsed[("experiment", "br_delta")],
        workers=parsed[("experiment", "workers")],
        burn_in=burn_in,
        preset=preset_name,
    )


@dataclass
class ExperimentResult:
    out: Path
    report: dict
    degraded: bool = False


def _tau_key(tau: float) -> int:
    return int(round(tau * 1000.0)) % (2**32)


def _member_config(spec: ExperimentSpec, tau: float, member: int) -> SimConfig:
    graph_rng = np.random.default_rng(derive_seed(spec.params.seed, 1, member))
    graph = spec.topology.sample(spec.params.n, graph_rng)
    run_params = spec.params.with_(
        tau=tau, seed=derive_seed(spec.params.seed, 0, member, _tau_key(tau))
    )
    return SimConfig(
        params=run_params,
        graph=graph,
        init=spec.init,
        record=spec.record,
        schedule=spec.schedule,
    )


def _member_stats(config: SimConfig, burn_in: float) -> dict:
    """Run one member and reduce it to plain-python summary statistics."""
    try:
        traj = run(config)
    except NumericalBlowupError as exc:
        return {"error": str(exc), "seed": config.params.seed}
    window = traj.times >= burn_in * traj.horizon
    report = classify_regime(traj, burn_in=burn_in)
    period = oscillation_period(traj, burn_in=burn_in)
    return {
        "error": None,
        "seed": config.params.seed,
        "final_savings": [float(v) for v in traj.final_savings()],
        "s_tilde_final": float(traj.s_tilde[-1]),
        "s_tilde_time_mean": float(traj.s_tilde[window].mean()),
        "y_time_mean": float(traj.y_total[window].mean()),
        "c_time_mean": float(traj.c_total[window].mean()),
        "classification": report.classification,
        "order_parameter": report.order_parameter,
        "modes": [list(m) for m in report.modes],
        "period": None if period is None else period.period,
    }


def _stats_task(args) -> dict:
    return _member_stats(*args)


def _run_members(
    configs: list[SimConfig], burn_in: float, workers: int | None
) -> list[dict]:
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(configs) <= 1:
        return [_member_stats(cfg, burn_in) for cfg in configs]
    tasks = [(cfg, burn_in) for cfg in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_stats_task, tasks))


def _ensemble_payload(spec: ExperimentSpec, tau: float, stats: list[dict]) -> dict:
    ok = [s for s in stats if s["error"] is None]
    failures = [
        {"member": i, "error": s["error"], "seed": s["seed"]}
        for i, s in enumerate(stats)
        if s["error"] is not None
    ]
    if not ok:
        raise RuntimeError(f"every ensemble member failed at tau={tau}")
    pooled = np.concatenate([np.asarray(s["final_savings"]) for s in ok])
    pooled_report = classify_regime(pooled)
    payload = {
        "tau": tau,
        "members": len(stats),
        "failed": len(failures),
        "failures": failures,
        "s_tilde_final_mean": float(np.mean([s["s_tilde_final"] for s in ok])),
        "s_tilde_time_mean": float(np.mean([s["s_tilde_time_mean"] for s in ok])),
        "y_time_mean": float(np.mean([s["y_time_mean"] for s in ok])),
        "c_time_mean": float(np.mean([s["c_time_mean"] for s in ok])),
        "oscillatory_fraction": float(
            np.mean([s["classification"] == "oscillatory" for s in ok])
        ),
        "pooled_classification": pooled_report.classification,
        "pooled_modes": [list(m) for m in pooled_report.modes],
    }
    if spec.params.alpha == 0.5:
        payload["s_star_prediction"] = s_star_tau(tau, spec.params.delta)
    return payload, pooled


def _histogram_row(pooled: np.ndarray) -> np.ndarray:
    return savings_histogram(pooled, bins=50)


def _mode_single(spec: ExperimentSpec) -> ExperimentResult:
    config = _member_config(spec, spec.params.tau, 0)
    traj = run(config)
    write_trajectory_csv(traj, spec.out / "trajectory.csv")
    write_snapshots_csv(traj, spec.out / "snapshots.csv")
    if traj.events is not None:
        write_events_csv(traj.events, spec.out / "events.csv")
    config.graph.to_edge_list(spec.out / "graph.txt")
    window = traj.times >= spec.burn_in * traj.horizon
    report_obj = classify_regime(traj, burn_in=spec.burn_in)
    period = oscillation_period(traj, burn_in=spec.burn_in)
    report = {
        "mode": "single",
        "tau": spec.params.tau,
        "seed": spec.params.seed,
        "classification": report_obj.classification,
        "modes": [list(m) for m in report_obj.modes],
        "order_parameter": report_obj.order_parameter,
        "s_tilde_final": float(traj.s_tilde[-1]),
        "s_tilde_time_mean": float(traj.s_tilde[window].mean()),
        "y_time_mean": float(traj.y_total[window].mean()),
        "c_time_mean": float(traj.c_total[window].mean()),
        "k_final": float(traj.k_total[-1]),
        "period": None if period is None else period.period,
    }
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report)


def _mode_ensemble(spec: ExperimentSpec) -> ExperimentResult:
    tau = spec.params.tau
    configs = [_member_config(spec, tau, i) for i in range(spec.ensemble)]
    stats = _run_members(configs, spec.burn_in, spec.workers)
    payload, pooled = _ensemble_payload(spec, tau, stats)
    report = {"mode": "ensemble", "seed": spec.params.seed, **payload}
    write_histogram_csv([tau], _histogram_row(pooled)[None, :], spec.out / "histogram.csv")
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report, degraded=bool(payload["failed"]))


def _mode_tau_sweep(spec: ExperimentSpec) -> ExperimentResult:
    rows = []
    matrix = []
    degraded = False
    for tau in spec.tau_grid:
        configs = [_member_config(spec, tau, i) for i in range(spec.ensemble)]
        stats = _run_members(configs, spec.burn_in, spec.workers)
        payload, pooled = _ensemble_payload(spec, tau, stats)
        degraded = degraded or bool(payload["failed"])
        rows.append(payload)
        matrix.append(_histogram_row(pooled))
    report = {"mode": "tau-sweep", "seed": spec.params.seed, "rows": rows}
    write_histogram_csv(spec.tau_grid, np.asarray(matrix), spec.out / "histogram.csv")
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report, degraded=degraded)


def _mode_tau_c_search(spec: ExperimentSpec) -> ExperimentResult:
    estimate = estimate_tau_c(
        spec.params,
        spec.topology,
        spec.tau_lo,
        spec.tau_hi,
        ensemble=spec.ensemble,
        seed=spec.params.seed,
        rel_width=spec.rel_width,
        classify_kwargs={"burn_in": spec.burn_in},
    )
    report = {
        "mode": "tau-c-search",
        "seed": spec.params.seed,
        "tau_c": estimate.tau_c,
        "bracket_lo": estimate.bracket_lo,
        "bracket_hi": estimate.bracket_hi,
        "probes": [list(p) for p in estimate.probes],
    }
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report)


def _point_tau_c(
    spec: ExperimentSpec, point_seed: int, n: int, p: float
) -> tuple[dict, tuple[float, float, float] | None]:
    """tau_c plus graph metrics for one (n, p) grid point, with bracket
    auto-adjustment; returns (payload, fit point or None on failure)."""
    params = spec.params.with_(n=n)
    topology = TopologySpec(
        kind="er", p=p, require_connected=spec.topology.require_connected
    )
    chis, degs = [], []
    for member in range(spec.ensemble):
        graph = topology.sample(
            n, np.random.default_rng(derive_seed(point_seed, 1, member))
        )
        chis.append(avg_shortest_path(graph))
        degs.append(mean_degree(graph))
    chi, k_mean = float(np.mean(chis)), float(np.mean(degs))

    lo, hi = spec.tau_lo, spec.tau_hi
    estimate = None
    failure = None
    for _ in range(8):
        try:
            estimate = estimate_tau_c(
                params,
                topology,
                lo,
                hi,
                ensemble=spec.ensemble,
                seed=point_seed,
                rel_width=spec.rel_width,
                classify_kwargs={"burn_in": spec.burn_in},
            )
            break
        except BracketError as exc:
            failure = str(exc)
            if "already classifies oscillatory" in failure:
                lo = lo / 2.0
                if lo < params.dt:
                    break
            else:
                hi = hi * 2.0
                if hi > 1e5:
                    break
    payload = {"n": n, "p": p, "chi": chi, "k_mean": k_mean}
    if estimate is None:
        payload["error"] = failure or "bracket adjustment exhausted"
        return payload, None
    payload["tau_c"] = estimate.tau_c
    payload["bracket"] = [estimate.bracket_lo, estimate.bracket_hi]
    return payload, (chi, k_mean, estimate.tau_c)


def _mode_scaling_study(spec: ExperimentSpec) -> ExperimentResult:
    points = []
    payloads = []
    degraded = False
    for n_idx, n in enumerate(spec.n_grid):
        for p_idx, p in enumerate(spec.p_grid):
            point_seed = derive_seed(spec.params.seed, 2, n_idx, p_idx)
            payload, point = _point_tau_c(spec, point_seed, n, p)
            payloads.append(payload)
            if point is None:
                degraded = True
            else:
                points.append(point)
    report: dict = {"mode": "scaling-study", "seed": spec.params.seed, "points": payloads}
    if len(points) >= 3:
        fit = scaling_fit(points)
        report["fit"] = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "slope_stderr": fit.slope_stderr,
            "residuals": list(fit.residuals),
        }
    else:
        report["fit"] = None
        degraded = True
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report, degraded=degraded)


def _mode_best_response(spec: ExperimentSpec) -> ExperimentResult:
    delta = spec.params.delta
    taus = np.geomspace(spec.br_tau_min, spec.br_tau_max, spec.br_points)
    rows = []
    for tau in taus:
        s_eq = s_star_tau(tau, delta)
        k0 = spec.params.big_l * s_eq**2 / delta**2
        plus = best_response(s_eq + spec.br_delta, tau, spec.params, k0)
        minus = best_response(s_eq - spec.br_delta, tau, spec.params, k0)
        rows.append((float(tau), s_eq, plus, minus))
    with open(spec.out / "bestresponse.csv", "w", encoding="ascii") as fh:
        fh.write("tau,s_star,br_plus,br_minus\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    report = {
        "mode": "best-response-curve",
        "delta_perturbation": spec.br_delta,
        "rows": [list(r) for r in rows],
    }
    write_json(report, spec.out / "report.json")
    return ExperimentResult(out=spec.out, report=report)


_MODE_RUNNERS = {
    "single": _mode_single,
    "ensemble": _mode_ensemble,
    "tau-sweep": _mode_tau_sweep,
    "tau-c-search": _mode_tau_c_search,
    "scaling-study": _mode_scaling_study,
    "best-response-curve": _mode_best_response,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute one experiment, writing all artifacts under spec.out."""
    spec.out.mkdir(parents=True, exist_ok=True)
    (spec.out / "manifest.txt").write_text(spec.to_manifest(), encoding="ascii")
    return _MODE_RUNNERS[spec.mode](spec)


def analyze_directory(directory, burn_in: float = 0.5) -> dict:
    """Regime/period analysis of a previously written single-run directory."""
    from .io import read_snapshots_csv, read_trajectory_csv

    directory = Path(directory)
    series = read_trajectory_csv(directory / "trajectory.csv")
    snap_t, snap_k, snap_s = read_snapshots_csv(directory / "snapshots.csv")
    traj = Trajectory(
        params=None,
        times=series["t"],
        k_total=series["K"],
        y_total=series["Y"],
        c_total=series["C"],
        s_tilde=series["s_tilde"],
        r=series["r"],
        w=series["w"],
        snap_times=snap_t,
        snap_savings=snap_s,
        snap_capital=snap_k,
    )
    report = classify_regime(traj, burn_in=burn_in)
    period = oscillation_period(traj, burn_in=burn_in)
    window = traj.times >= burn_in * traj.horizon
    return {
        "classification": report.classification,
        "modes": [list(m) for m in report.modes],
        "order_parameter": report.order_parameter,
        "s_tilde_time_mean": float(traj.s_tilde[window].mean()),
        "y_time_mean": float(traj.y_total[window].mean()),
        "c_time_mean": float(traj.c_total[window].mean()),
        "period": None if period is None else period.period,
    }
