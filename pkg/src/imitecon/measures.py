"""Empirical analysis of trajectories and ensembles: regime classification,
critical interaction time search, network scaling fit, period estimation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .econ import Params
from .engine import InitSpec, RecordSpec, SimConfig, Trajectory, derive_seed, run
from .network import TopologySpec


class BracketError(ValueError):
    """The tau bracket does not straddle the regime change."""


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of classifying a savings-rate distribution / trajectory."""

    classification: str                     # stable | oscillatory
    modes: tuple[tuple[float, float], ...]  # (location, mass) per mode
    order_parameter: float | None           # std of aggregate savings rate
    s_tilde_mean: float

    @property
    def oscillatory(self) -> bool:
        return self.classification == "oscillatory"


def savings_histogram(sample: np.ndarray, bins: int = 50) -> np.ndarray:
    """Histogram over [0, 1] normalized to unit mass."""
    counts, _ = np.histogram(np.asarray(sample, dtype=float), bins=bins, range=(0.0, 1.0))
    total = counts.sum()
    return counts / total if total else counts.astype(float)


def _find_modes(
    hist: np.ndarray, smooth: int, mass_threshold: float
) -> list[tuple[float, float]]:
    """Local maxima of the smoothed histogram with their basin masses.

    Basins are split at the minimum between adjacent peaks; each mode's
    location is the raw-mass-weighted mean of its basin.
    """
    bins = hist.size
    centers = (np.arange(bins) + 0.5) / bins
    kernel = np.ones(smooth) / smooth
    smoothed = np.convolve(hist, kernel, mode="same")
    padded = np.concatenate([[0.0], smoothed, [0.0]])
    peaks, _ = find_peaks(padded, height=mass_threshold)
    peaks -= 1
    if peaks.size == 0:
        return []
    cuts = [0]
    for left, right in zip(peaks[:-1], peaks[1:]):
        cuts.append(left + int(np.argmin(smoothed[left : right + 1])))
    cuts.append(bins)
    modes = []
    for peak, lo, hi in zip(peaks, cuts[:-1], cuts[1:]):
        mass = float(hist[lo:hi].sum())
        if mass > 0.0:
            location = float(hist[lo:hi] @ centers[lo:hi]) / mass
        else:
            location = float(centers[peak])
        modes.append((location, mass))
    return modes


def classify_regime(
    source: Trajectory | np.ndarray,
    *,
    bins: int = 50,
    smooth: int = 3,
    mass_threshold: float | None = None,
    order_threshold: float = 0.05,
    burn_in: float = 0.5,
) -> RegimeReport:
    """Stable vs oscillatory from the savings-rate distribution.

    For a trajectory, per-household snapshots past the burn-in fraction are
    pooled into a bin-width-0.02 histogram; oscillatory means at least two
    modes above the mass threshold or an aggregate-savings standard
    deviation above ``order_threshold``. A bare savings-rate sample is
    classified from its modes alone.
    """
    if mass_threshold is None:
        mass_threshold = 0.5 / bins
    if isinstance(source, Trajectory):
        t_cut = burn_in * source.horizon
        rows = source.snap_times >= t_cut
        if rows.sum() < 2:
            raise ValueError("not enough snapshots past burn-in to classify")
        sample = source.snap_savings[rows].ravel()
        window = source.times >= t_cut
        s_series = source.s_tilde[window]
        order_parameter = float(s_series.std())
        s_mean = float(s_series.mean())
    else:
        sample = np.asarray(source, dtype=float).ravel()
        if sample.size == 0:
            raise ValueError("empty savings-rate sample")
        order_parameter = None
        s_mean = float(sample.mean())
    modes = _find_modes(savings_histogram(sample, bins), smooth, mass_threshold)
    oscillatory = len(modes) >= 2 or (
        order_parameter is not None and order_parameter > order_threshold
    )
    return RegimeReport(
        classification="oscillatory" if oscillatory else "stable",
        modes=tuple(modes),
        order_parameter=order_parameter,
        s_tilde_mean=s_mean,
    )


@dataclass(frozen=True)
class TauCEstimate:
    """Bisection result: midpoint and final bracket."""

    tau_c: float
    bracket_lo: float
    bracket_hi: float
    probes: tuple[tuple[float, float], ...]  # (tau, oscillatory vote fraction)


def _ensemble_oscillatory(
    params: Params,
    topology: TopologySpec,
    tau: float,
    ensemble: int,
    seed: int,
    classify_kwargs: dict,
) -> float:
    """Fraction of ensemble members classifying oscillatory at this tau.

    Oscillatory means a strict majority of members. Graphs are keyed by
    member index only, so every probe of the search reuses the same graph
    sample per member; dynamics seeds are keyed by (member, tau). Stops
    early once the majority is decided, which cannot change the decision.
    """
    votes = 0
    done = ensemble
    tau_key = int(round(tau * 1000.0)) % (2**32)
    for member in range(ensemble):
        graph_rng = np.random.default_rng(derive_seed(seed, 1, member))
        graph = topology.sample(params.n, graph_rng)
        run_params = params.with_(
            tau=tau, horizon=None, seed=derive_seed(seed, 0, member, tau_key)
        )
        config = SimConfig(params=run_params, graph=graph, init=InitSpec())
        report = classify_regime(run(config), **classify_kwargs)
        votes += int(report.oscillatory)
        done = member + 1
        if 2 * votes > ensemble or 2 * (votes + ensemble - done) <= ensemble:
            break
    if 2 * votes > ensemble:
        return votes / done  # > 1/2 by the early-exit condition
    return votes / ensemble


def estimate_tau_c(
    params: Params,
    topology: TopologySpec = TopologySpec(kind="complete"),
    tau_lo: float = 50.0,
    tau_hi: float = 600.0,
    *,
    ensemble: int = 10,
    seed: int = 0,
    rel_width: float = 0.2,
    max_iter: int = 16,
    probe_fn=None,
    classify_kwargs: dict | None = None,
) -> TauCEstimate:
    """Critical interaction time by bisection on majority-vote classification.

    ``probe_fn(tau) -> bool`` (oscillatory) replaces the simulation ensemble
    when given, which makes the bisection harness testable on its own.
    Raises BracketError unless tau_lo classifies stable and tau_hi
    oscillatory.
    """
    if not 0.0 < tau_lo < tau_hi:
        raise ValueError(f"need 0 < tau_lo < tau_hi, got ({tau_lo}, {tau_hi})")
    ck = classify_kwargs or {}
    probes: list[tuple[float, float]] = []

    def oscillatory(tau: float) -> bool:
        if probe_fn is not None:
            frac = float(bool(probe_fn(tau)))
        else:
            frac = _ensemble_oscillatory(params, topology, tau, ensemble, seed, ck)
        probes.append((tau, frac))
        return frac > 0.5

    if oscillatory(tau_lo):
        raise BracketError(f"tau_lo={tau_lo} already classifies oscillatory")
    if not oscillatory(tau_hi):
        raise BracketError(f"tau_hi={tau_hi} still classifies stable")
    lo, hi = tau_lo, tau_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_width * mid:
            break
        if oscillatory(mid):
            hi = mid
        else:
            lo = mid
    return TauCEstimate(
        tau_c=0.5 * (lo + hi),
        bracket_lo=lo,
        bracket_hi=hi,
        probes=tuple(probes),
    )


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log(<k> tau_c) against average shortest path."""

    points: tuple[tuple[float, float, float], ...]  # (chi, k_mean, tau_c)
    slope: float
    intercept: float
    slope_stderr: float
    residuals: tuple[float, ...]


def scaling_fit(points) -> ScalingFit:
    """Fit log(<k> * tau_c) = a * chi + b over >= 3 (chi, <k>, tau_c) points."""
    pts = [(float(c), float(k), float(t)) for c, k, t in points]
    if len(pts) < 3:
        raise ValueError(f"scaling fit needs >= 3 points, got {len(pts)}")
    chi = np.array([p[0] for p in pts])
    log_ktau = np.log([p[1] * p[2] for p in pts])
    sxx = float(((chi - chi.mean()) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("degenerate design: all chi values are equal")
    slope = float((chi - chi.mean()) @ (log_ktau - log_ktau.mean())) / sxx
    intercept = float(log_ktau.mean() - slope * chi.mean())
    residuals = log_ktau - (slope * chi + intercept)
    dof = len(pts) - 2
    sigma2 = float(residuals @ residuals) / dof if dof else 0.0
    return ScalingFit(
        points=tuple(pts),
        slope=slope,
        intercept=intercept,
        slope_stderr=float(np.sqrt(sigma2 / sxx)),
        residuals=tuple(float(r) for r in residuals),
    )


@dataclass(frozen=True)
class PeriodEstimate:
    """Dominant oscillation period with any secondary autocorrelation peaks."""

    period: float
    strength: float                       # autocorrelation value at the peak
    secondary: tuple[float, ...] = field(default=())


def _autocorrelation(x: np.ndarray) -> np.ndarray:
    n = x.size
    x = x - x.mean()
    var = float(x @ x)
    if var == 0.0:
        return np.zeros(n)
    m = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(x, m)
    acf = np.fft.irfft(spectrum * np.conj(spectrum), m)[:n]
    return acf / var


def oscillation_period(
    source: Trajectory | np.ndarray,
    *,
    spacing: float | None = None,
    burn_in: float = 0.5,
    noise_floor: float = 0.1,
    max_lag_fraction: float = 0.5,
) -> PeriodEstimate | None:
    """Dominant period of the aggregate savings rate via its autocorrelation.

    The series is linearly detrended first. Returns None when no
    autocorrelation peak clears the noise floor (e.g. a constant series).
    """
    if isinstance(source, Trajectory):
        window = source.times >= burn_in * source.horizon
        series = source.s_tilde[window]
        spacing = float(source.times[1] - source.times[0])
    else:
        series = np.asarray(source, dtype=float)
        if spacing is None:
            spacing = 1.0
    n = series.size
    if n < 8:
        return None
    t_idx = np.arange(n, dtype=float)
    trend = np.polynomial.Polynomial.fit(t_idx, series, 1)(t_idx)
    detrended = series - trend
    if detrended.std() == 0.0:
        return None
    acf = _autocorrelation(detrended)
    max_lag = max(2, int(n * max_lag_fraction))
    peaks, props = find_peaks(acf[1:max_lag], height=noise_floor)
    if peaks.size == 0:
        return None
    peaks += 1
    heights = props["peak_heights"]
    order = np.argsort(heights)[::-1]
    peaks, heights = peaks[order], heights[order]

    def refine(lag: int) -> float:
        if 1 <= lag < acf.size - 1:
            y0, y1, y2 = acf[lag - 1], acf[lag], acf[lag + 1]
            denom = y0 - 2.0 * y1 + y2
            if denom != 0.0:
                return lag + 0.5 * (y0 - y2) / denom
        return float(lag)

    return PeriodEstimate(
        period=refine(int(peaks[0])) * spacing,
        strength=float(heights[0]),
        secondary=tuple(refine(int(p)) * spacing for p in peaks[1:4]),
    )


def lead_lag(
    x: np.ndarray, y: np.ndarray, max_lag: int
) -> tuple[int, float]:
    """Lag of y (in samples) maximizing corr(x_t, y_{t+lag}).

    Positive lag means y follows x.
    """
    x = np.asarray(x, float) - np.mean(x)
    y = np.asarray(y, float) - np.mean(y)
    n = x.size
    best_lag, best_c = 0, -np.inf
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            a, b = x[: n - lag], y[lag:]
        else:
            a, b = x[-lag:], y[: n + lag]
        denom = np.sqrt((a @ a) * (b @ b))
        if denom == 0.0:
            continue
        c = float(a @ b) / denom
        if c > best_c:
            best_lag, best_c = lag, c
    return best_lag, best_c


def orbit_signed_area(k: np.ndarray, c: np.ndarray) -> float:
    """Shoelace area of the closed (k, c) path; positive is counterclockwise."""
    k = np.asarray(k, float)
    c = np.asarray(c, float)
    return 0.5 * float(k @ np.roll(c, -1) - np.roll(k, -1) @ c)
