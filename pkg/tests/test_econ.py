import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imitecon.econ import (
    DegenerateEconomyError,
    EconomyState,
    Household,
    Params,
    capital_step,
    consumption,
    factor_prices,
    household_income,
    production,
)


def make_state(capital, savings, n=None):
    capital = np.asarray(capital, dtype=float)
    n = capital.size if n is None else n
    return EconomyState(
        t=0.0,
        capital=capital,
        savings_rate=np.asarray(savings, dtype=float),
        labor=np.full(n, 1.0 / n),
    )


class TestProduction:
    def test_hand_example(self):
        assert production(100.0, 1.0, 0.5) == pytest.approx(10.0, abs=1e-12)

    def test_zero_capital(self):
        assert production(0.0, 1.0, 0.5) == 0.0

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.9])
    def test_unit_inputs(self, alpha):
        assert production(1.0, 1.0, alpha) == pytest.approx(1.0, abs=1e-15)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            production(-1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            production(math.nan, 1.0, 0.5)
        with pytest.raises(ValueError):
            production(1.0, 0.0, 0.5)


class TestFactorPrices:
    def test_hand_examples(self):
        r, w = factor_prices(100.0, 1.0, 0.5)
        assert (r, w) == (pytest.approx(0.05), pytest.approx(5.0))
        r, w = factor_prices(25.0, 1.0, 0.5)
        assert (r, w) == (pytest.approx(0.1), pytest.approx(2.5))

    def test_symmetric_case(self):
        r, w = factor_prices(7.0, 7.0, 0.5)
        assert (r, w) == (pytest.approx(0.5), pytest.approx(0.5))

    def test_zero_capital_degenerate(self):
        with pytest.raises(DegenerateEconomyError):
            factor_prices(0.0, 1.0, 0.5)

    @given(
        k=st.floats(0.01, 1e6),
        l=st.floats(0.01, 1e3),
        alpha=st.floats(0.05, 0.95),
        c=st.floats(1e-3, 1e3),
    )
    @settings(max_examples=200, deadline=None)
    def test_scale_invariance(self, k, l, alpha, c):
        r1, w1 = factor_prices(k, l, alpha)
        r2, w2 = factor_prices(c * k, c * l, alpha)
        assert r2 == pytest.approx(r1, rel=1e-9)
        assert w2 == pytest.approx(w1, rel=1e-9)

    @given(k=st.floats(0.01, 1e6), l=st.floats(0.01, 1e3), alpha=st.floats(0.05, 0.95))
    @settings(max_examples=200, deadline=None)
    def test_euler_exhaustion(self, k, l, alpha):
        r, w = factor_prices(k, l, alpha)
        assert r * k + w * l == pytest.approx(production(k, l, alpha), rel=1e-12)


class TestHouseholdIncome:
    def test_hand_example(self):
        h = Household(capital=1.0, savings_rate=0.5, labor=0.01)
        assert household_income(h, 0.05, 5.0) == pytest.approx(0.1)

    def test_wage_only(self):
        h = Household(capital=0.0, savings_rate=0.2, labor=0.01)
        assert household_income(h, 123.0, 5.0) == pytest.approx(0.05)

    def test_identical_households_split_output(self):
        n = 25
        state = make_state(np.full(n, 4.0), np.full(n, 0.3))
        incomes = state.incomes(0.5)
        y = production(4.0 * n, 1.0, 0.5)
        np.testing.assert_allclose(incomes, y / n, rtol=1e-12)

    def test_rejects_negative_prices(self):
        h = Household(capital=1.0, savings_rate=0.5, labor=0.01)
        with pytest.raises(ValueError):
            household_income(h, -0.1, 1.0)


class TestConsumption:
    def test_hand_example(self):
        h = Household(capital=1.0, savings_rate=0.5, labor=0.01)
        assert consumption(h, 0.1) == pytest.approx(0.05)

    def test_full_saving(self):
        h = Household(capital=1.0, savings_rate=1.0, labor=0.01)
        assert consumption(h, 17.3) == 0.0

    def test_full_consumption(self):
        h = Household(capital=1.0, savings_rate=0.0, labor=0.01)
        assert consumption(h, 0.1) == pytest.approx(0.1)


class TestCapitalStep:
    def test_fixed_point(self):
        # s*I = delta*K keeps capital unchanged
        h = Household(capital=2.0, savings_rate=0.5, labor=0.0)
        r = 0.1  # income = 0.2, saved 0.1 = delta*K with delta 0.05
        assert capital_step(h, r, 0.0, 0.05, 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_hand_example(self):
        h = Household(capital=1.0, savings_rate=0.0, labor=0.01)
        assert capital_step(h, 0.05, 5.0, 0.05, 1.0) == pytest.approx(0.95)

    def test_aggregate_identity(self):
        rng = np.random.default_rng(42)
        n = 40
        state = make_state(rng.uniform(0.1, 5.0, n), rng.random(n))
        agg = state.aggregates(0.5)
        new = np.array(
            [
                capital_step(state.household(i), agg.r, agg.w, 0.05, 1.0)
                for i in range(n)
            ]
        )
        deltas = new - state.capital
        incomes = state.incomes(0.5)
        expected = 1.0 * (float(state.savings_rate @ incomes) - 0.05 * agg.k_total)
        assert deltas.sum() == pytest.approx(expected, rel=1e-12)

    def test_clamped_at_zero(self):
        h = Household(capital=1.0, savings_rate=0.0, labor=0.0)
        assert capital_step(h, 0.0, 0.0, 0.5, 1.9999) >= 0.0

    def test_nonfinite_aborts(self):
        h = Household(capital=1e308, savings_rate=1.0, labor=0.0)
        with pytest.raises(ArithmeticError):
            capital_step(h, 1e10, 0.0, 0.05, 1.0)


class TestParams:
    def test_defaults_are_valid(self):
        p = Params()
        assert p.alpha == 0.5 and p.delta == 0.05 and p.n == 100
        assert p.horizon_resolved == pytest.approx(5e3 * p.tau)
        assert p.labor_per_household == pytest.approx(0.01)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": 0.0},
            {"alpha": 1.0},
            {"delta": 0.0},
            {"tau": 0.0},
            {"eps_width": 0.5},
            {"eps_width": -0.01},
            {"n": 1},
            {"dt": 0.0},
            {"dt": 25.0, "delta": 0.05, "tau": 30.0},  # dt*delta >= 1
            {"theta": -1.0},
            {"rho": -0.1},
            {"big_l": 0.0},
            {"horizon": -5.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            Params(**kwargs)

    def test_dt_above_tau_warns(self):
        with pytest.warns(UserWarning):
            Params(tau=0.5, dt=1.0)

    def test_with_override(self):
        p = Params().with_(tau=10.0, seed=5)
        assert p.tau == 10.0 and p.seed == 5 and p.delta == 0.05


class TestHouseholdValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"capital": -1.0, "savings_rate": 0.5, "labor": 0.01},
            {"capital": 1.0, "savings_rate": 1.5, "labor": 0.01},
            {"capital": 1.0, "savings_rate": -0.1, "labor": 0.01},
            {"capital": 1.0, "savings_rate": 0.5, "labor": -0.01},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            Household(**kwargs)


class TestEconomyState:
    @given(
        data=st.lists(
            st.tuples(st.floats(0.01, 100.0), st.floats(0.0, 1.0)),
            min_size=2,
            max_size=30,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_s_tilde_is_convex_combination(self, data):
        capital = [k for k, _ in data]
        savings = [s for _, s in data]
        agg = make_state(capital, savings).aggregates(0.5)
        assert min(savings) - 1e-12 <= agg.s_tilde <= max(savings) + 1e-12

    @given(
        data=st.lists(
            st.tuples(st.floats(0.01, 100.0), st.floats(0.0, 1.0)),
            min_size=2,
            max_size=30,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_income_exhaustion(self, data):
        state = make_state([k for k, _ in data], [s for _, s in data])
        agg = state.aggregates(0.5)
        assert float(state.incomes(0.5).sum()) == pytest.approx(
            agg.y_total, rel=1e-9
        )

    def test_accounting_identity(self):
        rng = np.random.default_rng(0)
        state = make_state(rng.uniform(0.5, 3.0, 20), rng.random(20))
        agg = state.aggregates(0.5)
        invest = agg.s_tilde * (agg.r * agg.k_total + agg.w * 1.0)
        assert agg.c_total + invest == pytest.approx(agg.y_total, rel=1e-12)

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            EconomyState(
                t=0.0,
                capital=np.ones(3),
                savings_rate=np.ones(2),
                labor=np.ones(3),
            )
