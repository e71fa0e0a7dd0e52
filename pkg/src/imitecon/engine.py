"""Time evolution of the household economy.

Each step of size dt does, in order:

1. factor prices from current aggregate capital,
2. incomes and consumption flows at those prices,
3. imitate-the-best savings updates for the households scheduled this step,
   all reading the phase-2 consumption snapshot (an update earlier in the
   same step is invisible to a later one),
4. explicit-Euler capital update for every household with post-update rates,
5. advance time by dt.

``step`` composes the phases one step at a time with per-step RNG draws and
is the granular, inspectable path. ``run`` executes the same dynamics over
the full horizon in a compiled kernel, with every random draw (update
schedule, within-step ordering, copy noise, tie breaks) materialized up
front from the run's generator; update times are state-independent, so the
two realizations are distributionally identical. Each path is bit-for-bit
deterministic given (config, seed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .econ import EconomyState, Params, factor_prices
from .network import SocialGraph


class NumericalBlowupError(ArithmeticError):
    """Capital left the finite positive range mid-run; dt is too coarse."""

    def __init__(self, step_index: int, t: float):
        self.step_index = step_index
        self.t = t
        super().__init__(
            f"non-finite or non-positive aggregate capital at step {step_index} "
            f"(t={t}); reduce dt"
        )


def derive_seed(master: int, *key: int) -> int:
    """Stable per-stream seed from a master seed and an index path.

    Streams are independent of how many siblings exist, so ensembles can be
    extended without reshuffling earlier members.
    """
    seq = np.random.SeedSequence(entropy=master, spawn_key=tuple(key))
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class InitSpec:
    """Initial cross-section: common capital k0 and a savings-rate recipe."""

    k0: float = 1.0
    s0_mode: str = "uniform"  # uniform | constant | explicit
    s0_value: float | None = None
    s0_values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.k0 > 0.0:
            raise ValueError(f"k0 must be > 0, got {self.k0}")
        if self.s0_mode not in ("uniform", "constant", "explicit"):
            raise ValueError(f"unknown s0_mode {self.s0_mode!r}")
        if self.s0_mode == "constant":
            if self.s0_value is None or not 0.0 <= self.s0_value <= 1.0:
                raise ValueError("constant s0 needs s0_value in [0, 1]")
        if self.s0_mode == "explicit" and self.s0_values is None:
            raise ValueError("explicit s0 needs s0_values")

    def build(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        capital = np.full(n, self.k0, dtype=float)
        if self.s0_mode == "uniform":
            savings = rng.random(n)
        elif self.s0_mode == "constant":
            savings = np.full(n, float(self.s0_value))
        else:
            savings = np.asarray(self.s0_values, dtype=float)
            if savings.shape != (n,):
                raise ValueError(f"s0_values must have length {n}")
            if savings.min() < 0.0 or savings.max() > 1.0:
                raise ValueError("s0_values must lie in [0, 1]")
            savings = savings.copy()
        return capital, savings


@dataclass(frozen=True)
class RecordSpec:
    """What to keep from a run. ``None`` strides are sized from the horizon."""

    aggregate_stride: int | None = None  # None -> about 200k rows
    snapshot_stride: int | None = None   # None -> about 100 snapshots
    events: bool = False

    def resolve(self, n_steps: int) -> tuple[int, int]:
        agg = self.aggregate_stride or max(1, -(-n_steps // 200_000))
        snap = self.snapshot_stride or max(1, -(-n_steps // 100))
        if agg < 1 or snap < 1:
            raise ValueError("record strides must be >= 1")
        return agg, snap


@dataclass(frozen=True)
class SimConfig:
    """Everything one run needs; the seed lives in params."""

    params: Params
    graph: SocialGraph
    init: InitSpec = field(default_factory=InitSpec)
    record: RecordSpec = field(default_factory=RecordSpec)
    schedule: str = "bernoulli"  # bernoulli | exact | cyclic

    def __post_init__(self) -> None:
        if self.graph.n != self.params.n:
            raise ValueError(
                f"graph has {self.graph.n} nodes but params.n = {self.params.n}"
            )
        if self.schedule not in ("bernoulli", "exact", "cyclic"):
            raise ValueError(f"unknown schedule {self.schedule!r}")


@dataclass
class EventLog:
    """One row per scheduled update; copied_from is -1 when nothing changed."""

    t: np.ndarray
    household: np.ndarray
    old_s: np.ndarray
    new_s: np.ndarray
    copied_from: np.ndarray


@dataclass
class Trajectory:
    """Recorded aggregates, periodic per-household snapshots, optional events."""

    params: Params | None
    times: np.ndarray
    k_total: np.ndarray
    y_total: np.ndarray
    c_total: np.ndarray
    s_tilde: np.ndarray
    r: np.ndarray
    w: np.ndarray
    snap_times: np.ndarray
    snap_savings: np.ndarray   # shape (n_snapshots, n)
    snap_capital: np.ndarray
    events: EventLog | None = None

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def final_savings(self) -> np.ndarray:
        return self.snap_savings[-1]


def schedule_updates(params: Params, rng: np.random.Generator) -> np.ndarray:
    """Households updating this step: independent Bernoulli draws with
    probability 1 - e^(-dt/tau), the thinning of a rate-1/tau process."""
    p = -math.expm1(-params.dt / params.tau)
    return np.flatnonzero(rng.random(params.n) < p)


def imitate_best(
    i: int,
    state: EconomyState,
    graph: SocialGraph,
    rng: np.random.Generator,
    eps_width: float,
    alpha: float,
) -> float:
    """New savings rate for household i under imitate-the-best.

    Copies the rate of the highest-consuming neighbor (ties broken uniformly
    at random) plus uniform noise, clamped to [0, 1] -- but only when that
    neighbor consumes strictly more than i does; otherwise i keeps its rate.
    """
    cons = state.consumptions(alpha)
    neigh = graph.neighbors(i)
    best_c = cons[neigh].max()
    if not best_c > cons[i]:
        return float(state.savings_rate[i])
    candidates = neigh[cons[neigh] == best_c]
    j = candidates[0] if candidates.size == 1 else rng.choice(candidates)
    new_s = float(state.savings_rate[j])
    if eps_width > 0.0:
        new_s += rng.uniform(-eps_width, eps_width)
    return min(max(new_s, 0.0), 1.0)


def step(state: EconomyState, config: SimConfig, rng: np.random.Generator) -> EconomyState:
    """Advance one step of size dt; returns a new state."""
    params = config.params
    updaters = schedule_updates(params, rng)
    if updaters.size:
        updaters = rng.permutation(updaters)
    new_savings = state.savings_rate.copy()
    for i in updaters:
        # All updaters read the same pre-update state.
        new_savings[i] = imitate_best(
            int(i), state, config.graph, rng, params.eps_width, params.alpha
        )
    k_total = float(state.capital.sum())
    if not 0.0 < k_total < 1e290:
        raise NumericalBlowupError(-1, state.t)
    r, w = factor_prices(k_total, float(state.labor.sum()), params.alpha)
    incomes = r * state.capital + w * state.labor
    new_capital = state.capital + params.dt * (
        new_savings * incomes - params.delta * state.capital
    )
    if not np.all(np.isfinite(new_capital)):
        raise NumericalBlowupError(-1, state.t)
    np.clip(new_capital, 0.0, None, out=new_capital)
    return EconomyState(
        t=state.t + params.dt,
        capital=new_capital,
        savings_rate=new_savings,
        labor=state.labor.copy(),
    )


@dataclass
class _EventTable:
    """All scheduled updates of one run, sorted by (step, within-step order)."""

    step: np.ndarray   # int64, ascending
    house: np.ndarray  # int64
    eps: np.ndarray    # pre-drawn copy noise, applied only on an actual copy
    tie: np.ndarray    # pre-drawn uniform for argmax tie-breaking


def _geometric_event_steps(
    rng: np.random.Generator, p: float, n_steps: int
) -> np.ndarray:
    """Step indices of a per-step Bernoulli(p) process via geometric gaps."""
    out = []
    total = 0
    chunk = int(n_steps * p + 6.0 * math.sqrt(n_steps * p + 1.0)) + 16
    while True:
        cum = total + np.cumsum(rng.geometric(p, size=chunk))
        out.append(cum[cum <= n_steps] - 1)
        if cum[-1] > n_steps:
            return np.concatenate(out)
        total = int(cum[-1])
        chunk = max(chunk // 4, 16)


def _build_event_table(
    params: Params, rng: np.random.Generator, n_steps: int, mode: str
) -> _EventTable:
    n, dt, tau = params.n, params.dt, params.tau
    if dt > tau:
        warnings.warn(
            f"dt={dt} exceeds tau={tau}; update scheduling is poorly resolved",
            stacklevel=2,
        )
    steps_parts: list[np.ndarray] = []
    house_parts: list[np.ndarray] = []
    if mode == "bernoulli":
        p = -math.expm1(-dt / tau)
        if p > 0.0:
            for i in range(n):
                s = _geometric_event_steps(rng, p, n_steps)
                steps_parts.append(s)
                house_parts.append(np.full(s.size, i, dtype=np.int64))
    elif mode == "exact":
        for i in range(n):
            t_events: list[float] = []
            t_acc = 0.0
            horizon = n_steps * dt
            while True:
                t_acc += rng.exponential(tau)
                if t_acc >= horizon:
                    break
                t_events.append(t_acc)
            s = np.floor(np.asarray(t_events) / dt).astype(np.int64)
            steps_parts.append(s)
            house_parts.append(np.full(s.size, i, dtype=np.int64))
    elif mode == "cyclic":
        # Deterministic round robin, one household per slot of length tau/n.
        slot = tau / n
        m = int(n_steps * dt / slot)
        times = (np.arange(m, dtype=float) + 1.0) * slot
        s = np.floor(times / dt).astype(np.int64)
        keep = s < n_steps
        steps_parts.append(s[keep])
        house_parts.append((np.arange(m, dtype=np.int64) % n)[keep])
    else:
        raise ValueError(f"unknown schedule {mode!r}")

    steps = (
        np.concatenate(steps_parts) if steps_parts else np.empty(0, dtype=np.int64)
    )
    house = (
        np.concatenate(house_parts) if house_parts else np.empty(0, dtype=np.int64)
    )
    m = steps.size
    if mode == "cyclic":
        order_key = np.arange(m, dtype=float)  # fixed within-step order
    else:
        order_key = rng.random(m)              # uniform within-step permutation
    eps = rng.uniform(-params.eps_width, params.eps_width, m)
    tie = rng.random(m)
    order = np.lexsort((order_key, steps))
    return _EventTable(
        step=steps[order], house=house[order], eps=eps[order], tie=tie[order]
    )


@njit(cache=True)
def _run_kernel(
    capital,
    savings,
    labor,
    alpha,
    delta,
    dt,
    n_steps,
    indptr,
    indices,
    ev_step,
    ev_house,
    ev_eps,
    ev_tie,
    agg_stride,
    snap_stride,
    out_t,
    out_k,
    out_y,
    out_c,
    out_st,
    out_r,
    out_w,
    snap_t,
    snap_s,
    snap_k,
    log_events,
    ev_old,
    ev_new,
    ev_from,
):  # pragma: no cover - exercised through run()
    n = capital.shape[0]
    l_total = 0.0
    for i in range(n):
        l_total += labor[i]
    l_fac = l_total ** (1.0 - alpha)
    c_snap = np.empty(n)
    s_snap = np.empty(n)
    n_events = ev_step.shape[0]
    ev_ptr = 0
    agg_row = 0
    snap_row = 0
    for t_idx in range(n_steps + 1):
        k_total = 0.0
        for i in range(n):
            k_total += capital[i]
        if not (0.0 < k_total < 1e290):
            return t_idx
        y_total = k_total**alpha * l_fac
        r = alpha * y_total / k_total
        w = (1.0 - alpha) * y_total / l_total
        last = t_idx == n_steps

        if ev_ptr < n_events and ev_step[ev_ptr] == t_idx:
            for i in range(n):
                inc = r * capital[i] + w * labor[i]
                c_snap[i] = (1.0 - savings[i]) * inc
                s_snap[i] = savings[i]
            while ev_ptr < n_events and ev_step[ev_ptr] == t_idx:
                i = ev_house[ev_ptr]
                best_c = -1.0
                best_j = -1
                ties = 0
                for a in range(indptr[i], indptr[i + 1]):
                    j = indices[a]
                    cj = c_snap[j]
                    if cj > best_c:
                        best_c = cj
                        best_j = j
                        ties = 1
                    elif cj == best_c:
                        ties += 1
                if ties > 1:
                    pick = int(ev_tie[ev_ptr] * ties)
                    if pick >= ties:
                        pick = ties - 1
                    seen = 0
                    for a in range(indptr[i], indptr[i + 1]):
                        j = indices[a]
                        if c_snap[j] == best_c:
                            if seen == pick:
                                best_j = j
                                break
                            seen += 1
                old_s = savings[i]
                if best_c > c_snap[i]:
                    new_s = s_snap[best_j] + ev_eps[ev_ptr]
                    if new_s < 0.0:
                        new_s = 0.0
                    elif new_s > 1.0:
                        new_s = 1.0
                    savings[i] = new_s
                    src = best_j
                else:
                    new_s = old_s
                    src = -1
                if log_events:
                    ev_old[ev_ptr] = old_s
                    ev_new[ev_ptr] = new_s
                    ev_from[ev_ptr] = src
                ev_ptr += 1

        if last or t_idx % snap_stride == 0:
            row = snap_row if not last else snap_t.shape[0] - 1
            snap_t[row] = t_idx * dt
            for i in range(n):
                snap_s[row, i] = savings[i]
                snap_k[row, i] = capital[i]
            if not last:
                snap_row += 1

        inc_sum = 0.0
        sinc_sum = 0.0
        for i in range(n):
            inc = r * capital[i] + w * labor[i]
            sinc = savings[i] * inc
            inc_sum += inc
            sinc_sum += sinc
            if not last:
                k_new = capital[i] + dt * (sinc - delta * capital[i])
                capital[i] = k_new if k_new > 0.0 else 0.0

        if last or t_idx % agg_stride == 0:
            row = agg_row if not last else out_t.shape[0] - 1
            out_t[row] = t_idx * dt
            out_k[row] = k_total
            out_y[row] = y_total
            out_c[row] = inc_sum - sinc_sum
            out_st[row] = sinc_sum / inc_sum
            out_r[row] = r
            out_w[row] = w
            if not last:
                agg_row += 1
    return -1


def run(config: SimConfig) -> Trajectory:
    """Simulate the full horizon; deterministic given (config, params.seed).

    RNG draw order: initial savings rates, then the whole pre-drawn event
    table (update steps per household, within-step order keys, copy noise,
    tie breaks).
    """
    params = config.params
    n_steps = params.n_steps
    rng = np.random.default_rng(params.seed)
    capital, savings = config.init.build(params.n, rng)
    labor = np.full(params.n, params.labor_per_household)
    table = _build_event_table(params, rng, n_steps, config.schedule)

    agg_stride, snap_stride = config.record.resolve(n_steps)
    n_agg = len(range(0, n_steps, agg_stride)) + 1
    n_snap = len(range(0, n_steps, snap_stride)) + 1
    out = {k: np.empty(n_agg) for k in ("t", "k", "y", "c", "st", "r", "w")}
    snap_t = np.empty(n_snap)
    snap_s = np.empty((n_snap, params.n))
    snap_k = np.empty((n_snap, params.n))
    m = table.step.size
    log_events = config.record.events
    ev_old = np.empty(m if log_events else 1)
    ev_new = np.empty(m if log_events else 1)
    ev_from = np.empty(m if log_events else 1, dtype=np.int64)

    status = _run_kernel(
        capital,
        savings,
        labor,
        params.alpha,
        params.delta,
        params.dt,
        n_steps,
        config.graph.indptr,
        config.graph.indices,
        table.step,
        table.house,
        table.eps,
        table.tie,
        agg_stride,
        snap_stride,
        out["t"],
        out["k"],
        out["y"],
        out["c"],
        out["st"],
        out["r"],
        out["w"],
        snap_t,
        snap_s,
        snap_k,
        log_events,
        ev_old,
        ev_new,
        ev_from,
    )
    if status >= 0:
        raise NumericalBlowupError(int(status), float(status * params.dt))

    events = None
    if log_events:
        events = EventLog(
            t=table.step * params.dt,
            household=table.house,
            old_s=ev_old,
            new_s=ev_new,
            copied_from=ev_from,
        )
    return Trajectory(
        params=params,
        times=out["t"],
        k_total=out["k"],
        y_total=out["y"],
        c_total=out["c"],
        s_tilde=out["st"],
        r=out["r"],
        w=out["w"],
        snap_times=snap_t,
        snap_savings=snap_s,
        snap_capital=snap_k,
        events=events,
    )
