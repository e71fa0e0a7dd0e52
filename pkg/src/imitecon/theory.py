"""Closed-form results: reference steady state, stable-regime approximations,
horizon-consumption analysis, and the classical saddle path.

The horizon formulas are exact only for capital elasticity 1/2 and are
guarded accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .econ import Params


@dataclass(frozen=True)
class RckSteadyState:
    """Golden-rule state of the representative-agent economy (per capita)."""

    k_star: float
    c_star: float
    s_star_rck: float


def golden_rule(alpha: float, delta: float, rho: float) -> RckSteadyState:
    """Modified golden rule: k* = (alpha/(rho+delta))^(1/(1-alpha)).

    At rho = 0 the savings rate reduces to alpha and consumption is the
    largest sustainable one.
    """
    if rho < 0.0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    k_star = (alpha / (rho + delta)) ** (1.0 / (1.0 - alpha))
    c_star = k_star**alpha - delta * k_star
    s_star = alpha * delta / (rho + delta)
    return RckSteadyState(k_star=k_star, c_star=c_star, s_star_rck=s_star)


def s_star_tau(tau: float, delta: float) -> float:
    """Stable-regime aggregate savings rate (1-e^(-dt/2))/(2-e^(-dt/2)).

    Valid for capital elasticity 1/2 only. Increasing in tau, -> 1/2.
    """
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    u = -math.expm1(-delta * tau / 2.0)  # 1 - e^(-delta tau / 2)
    return u / (1.0 + u)


def rho_of_tau(tau: float, delta: float) -> float:
    """Effective discount rate matching a given social interaction time."""
    if tau <= 0.0:
        raise ValueError(f"tau must be > 0, got {tau}")
    return (delta / 2.0) / math.expm1(delta * tau / 2.0)


def tau_of_rho(rho: float, delta: float) -> float:
    """Exact inverse of rho_of_tau."""
    if rho <= 0.0:
        raise ValueError(f"rho must be > 0, got {rho}")
    return (2.0 / delta) * math.log1p(delta / (2.0 * rho))


def _exprel(x):
    """expm1(x)/x with the x = 0 limit filled in; accurate for small x."""
    x = np.asarray(x, dtype=float)
    out = np.where(x == 0.0, 1.0, np.expm1(np.where(x == 0.0, 1.0, x)) / np.where(x == 0.0, 1.0, x))
    return out if out.ndim else float(out)


def _dexprel(x):
    """Derivative of expm1(x)/x; equals 1/2 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 0.0, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.exp(xs) * (xs - 1.0) + 1.0) / xs**2
    series = 0.5 + x / 3.0 + x**2 / 8.0 + x**3 / 30.0
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def _sqrt_coeffs(k0: float, s: float, big_l: float, delta: float):
    """Shared coefficients of the square-root capital dynamics (elasticity 1/2)."""
    if k0 <= 0.0:
        raise ValueError(f"k0 must be > 0, got {k0}")
    a = delta * math.sqrt(big_l) / 2.0
    b = s * math.sqrt(big_l)
    e = b - delta * math.sqrt(k0)
    return a, b, e


def aggregate_capital_closed_form(
    k0: float, s: float, big_l: float, delta: float, t
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact (K(t), r(t), w(t)) for constant savings rate s at elasticity 1/2.

    The fixed point is K = L s^2 / delta^2; starting there keeps K constant.
    """
    a, b, e = _sqrt_coeffs(k0, s, big_l, delta)
    t = np.asarray(t, dtype=float)
    base = b - e * np.exp(-delta * t / 2.0)
    if np.any(base <= 0.0):
        raise ValueError("closed form leaves its domain: B - E e^(-dt/2) <= 0")
    k_t = (base / delta) ** 2
    r_t = a / base
    w_t = base / (4.0 * a)
    return k_t, r_t, w_t


def consumption_at_horizon(
    k_i0: float,
    l_i: float,
    s_i,
    s: float,
    k0: float,
    big_l: float,
    delta: float,
    tau: float,
):
    """Approximate consumption of one household at time tau.

    The household holds rate ``s_i`` while the rest of the economy sits at
    rate ``s`` with aggregate capital ``k0``; prices over [0, tau] are
    approximated by their mid-term values. Vectorized over ``s_i``.
    """
    a, b, e = _sqrt_coeffs(k0, s, big_l, delta)
    p_mid = b - e * math.exp(-delta * tau / 4.0)
    d_end = b - e * math.exp(-delta * tau / 2.0)
    if p_mid <= 0.0 or d_end <= 0.0:
        raise ValueError("price path leaves its domain before the horizon")
    h = a / d_end
    s_i = np.asarray(s_i, dtype=float)
    g_i = s_i * a / p_mid - delta
    f_i = p_mid / (4.0 * a) * s_i * l_i
    x = g_i * tau
    k_i_tau = k_i0 * np.exp(x) + f_i * tau * _exprel(x)
    out = (1.0 - s_i) * (h * k_i_tau + l_i / (4.0 * h))
    return out if out.ndim else float(out)


def ds_criterion(s: float, k0: float, big_l: float, delta: float, tau: float) -> float:
    """d/ds_i of N * consumption_at_horizon at s_i = s, K_i0 = K0/N, L_i = L/N.

    Positive means a slightly thriftier household out-consumes the crowd at
    the horizon, so imitation pushes the common rate up; negative pushes it
    down. Its root in s jointly with the capital fixed point K0 = L s^2 /
    delta^2 is s_star_tau(tau, delta).
    """
    a, b, e = _sqrt_coeffs(k0, s, big_l, delta)
    p_mid = b - e * math.exp(-delta * tau / 4.0)
    d_end = b - e * math.exp(-delta * tau / 2.0)
    if p_mid <= 0.0 or d_end <= 0.0:
        raise ValueError("price path leaves its domain before the horizon")
    h = a / d_end
    g_rate = a / p_mid
    big_f = s * big_l * p_mid / (4.0 * a)
    big_g = s * g_rate - delta
    x = big_g * tau
    k_hat = k0 * math.exp(x) + big_f * tau * _exprel(x)
    dk_ds = (
        k0 * tau * g_rate * math.exp(x)
        + (big_l / (4.0 * g_rate)) * tau * _exprel(x)
        + big_f * tau**2 * g_rate * _dexprel(x)
    )
    return (1.0 - s) * h * dk_ds - (h * k_hat + big_l / (4.0 * h))


def _golden_max(fn, lo: float, hi: float, tol: float) -> float:
    """Golden-section search for the maximizer of a unimodal fn on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = fn(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = fn(x1)
    return (lo + hi) / 2.0


def best_response(
    s: float,
    tau: float,
    params: Params,
    k0: float | None = None,
    *,
    grid: int = 4096,
    tol: float = 1e-6,
) -> float:
    """Savings rate maximizing one household's consumption at horizon tau.

    All other households hold rate ``s``. Aggregate capital defaults to the
    equilibrium stock of the unperturbed rate s_star_tau(tau, delta), which
    is the state a small shock to the aggregate rate perturbs. A coarse grid
    locates the global optimum (the objective grows extra local maxima past
    the critical interaction time); golden-section search then refines it.
    """
    if params.alpha != 0.5:
        raise ValueError("horizon-consumption analysis requires alpha = 1/2")
    if k0 is None:
        s_eq = s_star_tau(tau, params.delta)
        k0 = params.big_l * s_eq**2 / params.delta**2
    k_i0 = k0 / params.n
    l_i = params.big_l / params.n

    def objective(s_i):
        return consumption_at_horizon(
            k_i0, l_i, s_i, s, k0, params.big_l, params.delta, tau
        )

    s_grid = np.linspace(0.0, 1.0, grid + 1)
    values = objective(s_grid)
    best = int(np.argmax(values))
    lo = s_grid[max(best - 1, 0)]
    hi = s_grid[min(best + 1, grid)]
    return _golden_max(objective, lo, hi, tol)


@dataclass(frozen=True)
class RckPhasePortrait:
    """Phase-plane reference objects of the representative-agent model."""

    k_grid: np.ndarray
    c_locus: np.ndarray       # consumption keeping capital constant
    saddle_k: np.ndarray
    saddle_c: np.ndarray
    steady: RckSteadyState


def rck_reference_trajectory(params: Params, k_range) -> RckPhasePortrait:
    """k-dot = 0 locus, saddle path, and steady state on a capital grid.

    The saddle path is traced by integrating the (k, c) system backward in
    time from a small displacement off the steady state along its stable
    eigenvector, in both directions; segments are truncated where they leave
    the positive quadrant or the grid.
    """
    alpha, delta, rho, theta = params.alpha, params.delta, params.rho, params.theta
    if theta <= 0.0:
        raise ValueError("saddle path requires theta > 0")
    steady = golden_rule(alpha, delta, rho)
    k_grid = np.asarray(k_range, dtype=float)
    if np.any(k_grid <= 0.0):
        raise ValueError("k_range must be positive")
    c_locus = k_grid**alpha - delta * k_grid

    k_star, c_star = steady.k_star, steady.c_star

    def rhs(_t, y):
        k, c = y
        k_dot = k**alpha - delta * k - c
        c_dot = c * (alpha * k ** (alpha - 1.0) - delta - rho) / theta
        return (-k_dot, -c_dot)  # backward time

    j21 = c_star * alpha * (alpha - 1.0) * k_star ** (alpha - 2.0) / theta
    lam_stable = (rho - math.sqrt(rho**2 - 4.0 * j21)) / 2.0
    v = np.array([1.0, rho - lam_stable])
    v /= np.linalg.norm(v)

    k_lo, k_hi = float(k_grid.min()), float(k_grid.max())

    def make_events():
        def hit_lo(_t, y):
            return y[0] - k_lo * 0.999

        def hit_hi(_t, y):
            return y[0] - k_hi * 1.001

        def hit_floor(_t, y):
            return min(y[0], y[1])

        for ev in (hit_lo, hit_hi, hit_floor):
            ev.terminal = True
        return [hit_lo, hit_hi, hit_floor]

    eta = 1e-6 * max(k_star, 1.0)
    branches = []
    for sign in (-1.0, 1.0):
        y0 = np.array([k_star, c_star]) + sign * eta * v
        sol = solve_ivp(
            rhs,
            (0.0, 1e5),
            y0,
            rtol=1e-10,
            atol=1e-12,
            dense_output=False,
            events=make_events(),
            max_step=1.0,
        )
        branches.append((sol.y[0], sol.y[1]))

    saddle_k = np.concatenate([branches[0][0][::-1], [k_star], branches[1][0]])
    saddle_c = np.concatenate([branches[0][1][::-1], [c_star], branches[1][1]])
    order = np.argsort(saddle_k)
    return RckPhasePortrait(
        k_grid=k_grid,
        c_locus=c_locus,
        saddle_k=saddle_k[order],
        saddle_c=saddle_c[order],
        steady=steady,
    )
