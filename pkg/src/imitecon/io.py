"""Plot-ready, reproducible file formats.

All floats are written with 17 significant digits so re-reading loses
nothing; files carry no timestamps so identical runs produce identical
bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import EventLog, Trajectory

FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,K,Y,C,s_tilde,r,w\n")
        for row in zip(
            traj.times, traj.k_total, traj.y_total, traj.c_total,
            traj.s_tilde, traj.r, traj.w,
        ):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    names = ("t", "K", "Y", "C", "s_tilde", "r", "w")
    return {name: data[:, i] for i, name in enumerate(names)}


def write_snapshots_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,i,K_i,s_i\n")
        for row, t in enumerate(traj.snap_times):
            t_s = _fmt(t)
            for i in range(traj.snap_savings.shape[1]):
                fh.write(
                    f"{t_s},{i},{_fmt(traj.snap_capital[row, i])},"
                    f"{_fmt(traj.snap_savings[row, i])}\n"
                )


def read_snapshots_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (times, capital, savings) with shape (n_snapshots, n)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = np.unique(data[:, 0])
    n = int(data[:, 1].max()) + 1
    capital = data[:, 2].reshape(times.size, n)
    savings = data[:, 3].reshape(times.size, n)
    return times, capital, savings


def write_events_csv(events: EventLog, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,i,old_s,new_s,copied_from\n")
        for t, i, old, new, src in zip(
            events.t, events.household, events.old_s, events.new_s,
            events.copied_from,
        ):
            fh.write(f"{_fmt(t)},{i},{_fmt(old)},{_fmt(new)},{src}\n")


def write_histogram_csv(taus, matrix: np.ndarray, path) -> None:
    """One row per tau; columns are savings-rate bins, normalized per row."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    bins = matrix.shape[1]
    centers = (np.arange(bins) + 0.5) / bins
    with open(path, "w", encoding="ascii") as fh:
        fh.write("tau," + ",".join(f"s_{c:.3f}" for c in centers) + "\n")
        for tau, row in zip(taus, matrix):
            fh.write(_fmt(tau) + "," + ",".join(_fmt(v) for v in row) + "\n")


def write_phase_portrait_csv(portrait, locus_path, saddle_path) -> None:
    """Plot-ready (k, c) tables for the reference-model phase plane."""
    with open(locus_path, "w", encoding="ascii") as fh:
        fh.write("k,c\n")
        for k, c in zip(portrait.k_grid, portrait.c_locus):
            fh.write(f"{_fmt(k)},{_fmt(c)}\n")
    with open(saddle_path, "w", encoding="ascii") as fh:
        fh.write("k,c\n")
        for k, c in zip(portrait.saddle_k, portrait.saddle_c):
            fh.write(f"{_fmt(k)},{_fmt(c)}\n")


def write_json(obj, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="ascii"))
