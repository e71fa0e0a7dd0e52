"""Core one-good economy: production, factor prices, incomes, capital dynamics.

Everything here is a pure function of its inputs and safe to call from any
thread. The simulation engine re-expresses the same formulas in vectorized
form; the test suite pins both paths to each other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np


class DegenerateEconomyError(ValueError):
    """Raised when factor prices are requested for a zero-capital economy."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Params:
    """All economic and behavioral constants of one simulation.

    ``theta`` and ``rho`` only enter the classical representative-agent
    reference solution, never the agent dynamics.
    """

    alpha: float = 0.5        # capital elasticity, in (0, 1)
    delta: float = 0.05       # depreciation rate per unit time
    tau: float = 500.0        # mean time between savings-rate updates
    eps_width: float = 0.01   # copy-noise half-width
    big_l: float = 1.0        # total labor
    n: int = 100              # number of households
    dt: float = 1.0           # integration step
    horizon: float | None = None  # total simulated time; None -> 5e3 * tau
    seed: int = 0             # 64-bit RNG seed
    theta: float = 1.0        # CRRA parameter (reference model only)
    rho: float = 0.0          # discount rate (reference model only)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not 0.0 <= self.eps_width < 0.5:
            raise ValueError(f"eps_width must be in [0, 0.5), got {self.eps_width}")
        if not self.big_l > 0.0:
            raise ValueError(f"big_l must be > 0, got {self.big_l}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        # Guarantees capital can never be driven negative by depreciation alone.
        if not self.dt * self.delta < 1.0:
            raise ValueError(f"dt * delta must be < 1, got {self.dt * self.delta}")
        if self.horizon is not None and not self.horizon > 0.0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if self.theta < 0.0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")
        if self.rho < 0.0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.dt > self.tau:
            warnings.warn(
                f"dt={self.dt} exceeds tau={self.tau}; update scheduling is "
                "poorly resolved at this step size",
                stacklevel=2,
            )

    @property
    def horizon_resolved(self) -> float:
        """Horizon with the 5e3 * tau default materialized."""
        return 5e3 * self.tau if self.horizon is None else self.horizon

    @property
    def n_steps(self) -> int:
        return max(1, round(self.horizon_resolved / self.dt))

    @property
    def labor_per_household(self) -> float:
        return self.big_l / self.n

    def with_(self, **changes) -> "Params":
        return replace(self, **changes)


@dataclass
class Household:
    """One agent: its capital stock, savings rate, and labor endowment."""

    capital: float
    savings_rate: float
    labor: float

    def __post_init__(self) -> None:
        if self.capital < 0.0:
            raise ValueError(f"capital must be >= 0, got {self.capital}")
        if not 0.0 <= self.savings_rate <= 1.0:
            raise ValueError(f"savings_rate must be in [0, 1], got {self.savings_rate}")
        if self.labor < 0.0:
            raise ValueError(f"labor must be >= 0, got {self.labor}")


def production(k_total: float, l_total: float, alpha: float):
    """Cobb-Douglas output K^alpha * L^(1-alpha). Accepts scalars or arrays."""
    k_arr = np.asarray(k_total, dtype=float)
    l_arr = np.asarray(l_total, dtype=float)
    if not (np.all(np.isfinite(k_arr)) and np.all(np.isfinite(l_arr))):
        raise ValueError("production inputs must be finite")
    if np.any(k_arr < 0.0):
        raise ValueError("capital must be >= 0")
    if np.any(l_arr <= 0.0):
        raise ValueError("labor must be > 0")
    out = k_arr**alpha * l_arr ** (1.0 - alpha)
    return out if out.ndim else float(out)


def factor_prices(k_total: float, l_total: float, alpha: float) -> tuple[float, float]:
    """Marginal-product rent and wage: r = alpha*y/k, w = (1-alpha)*y.

    Marginal-product pricing exhausts output exactly: r*K + w*L = Y.
    """
    if k_total == 0.0:
        raise DegenerateEconomyError(
            "capital rent is undefined at zero aggregate capital"
        )
    y_total = production(k_total, l_total, alpha)
    r = alpha * y_total / k_total
    w = (1.0 - alpha) * y_total / l_total
    return r, w


def household_income(h: Household, r: float, w: float) -> float:
    """Income from capital rents plus wages: r*K_i + w*L_i."""
    _require_finite("r", r)
    _require_finite("w", w)
    if r < 0.0 or w < 0.0:
        raise ValueError("factor prices must be >= 0")
    return r * h.capital + w * h.labor


def consumption(h: Household, income: float) -> float:
    """Consumption flow (1 - s_i) * I_i."""
    if income < 0.0:
        raise ValueError(f"income must be >= 0, got {income}")
    return (1.0 - h.savings_rate) * income


def capital_step(h: Household, r: float, w: float, delta: float, dt: float) -> float:
    """Explicit-Euler capital update K_i + dt*(s_i*I_i - delta*K_i), floored at 0."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    income = household_income(h, r, w)
    new_capital = h.capital + dt * (h.savings_rate * income - delta * h.capital)
    if not math.isfinite(new_capital):
        raise ArithmeticError(
            f"non-finite capital {new_capital!r} from K_i={h.capital}, dt={dt}; "
            "the step size is numerically unstable"
        )
    return max(new_capital, 0.0)


@dataclass(frozen=True)
class Aggregates:
    """Economy-wide quantities derived from one cross-section."""

    k_total: float
    y_total: float
    r: float
    w: float
    s_tilde: float
    c_total: float


@dataclass
class EconomyState:
    """Full cross-section at one instant, stored as parallel arrays.

    Array index doubles as the household's node index in the social graph.
    """

    t: float
    capital: np.ndarray
    savings_rate: np.ndarray
    labor: np.ndarray

    def __post_init__(self) -> None:
        self.capital = np.asarray(self.capital, dtype=float)
        self.savings_rate = np.asarray(self.savings_rate, dtype=float)
        self.labor = np.asarray(self.labor, dtype=float)
        n = self.capital.shape[0]
        if self.savings_rate.shape != (n,) or self.labor.shape != (n,):
            raise ValueError("capital, savings_rate, labor must share one length")

    @property
    def n(self) -> int:
        return self.capital.shape[0]

    def household(self, i: int) -> Household:
        return Household(
            capital=float(self.capital[i]),
            savings_rate=float(self.savings_rate[i]),
            labor=float(self.labor[i]),
        )

    def households(self) -> list[Household]:
        return [self.household(i) for i in range(self.n)]

    def incomes(self, alpha: float) -> np.ndarray:
        r, w = factor_prices(float(self.capital.sum()), float(self.labor.sum()), alpha)
        return r * self.capital + w * self.labor

    def consumptions(self, alpha: float) -> np.ndarray:
        return (1.0 - self.savings_rate) * self.incomes(alpha)

    def aggregates(self, alpha: float) -> Aggregates:
        k_total = float(self.capital.sum())
        l_total = float(self.labor.sum())
        r, w = factor_prices(k_total, l_total, alpha)
        incomes = r * self.capital + w * self.labor
        income_total = float(incomes.sum())
        s_tilde = float(self.savings_rate @ incomes) / income_total
        return Aggregates(
            k_total=k_total,
            y_total=production(k_total, l_total, alpha),
            r=r,
            w=w,
            s_tilde=s_tilde,
            c_total=income_total * (1.0 - s_tilde),
        )

    def copy(self) -> "EconomyState":
        return EconomyState(
            t=self.t,
            capital=self.capital.copy(),
            savings_rate=self.savings_rate.copy(),
            labor=self.labor.copy(),
        )
