import numpy as np
import pytest

from imitecon.econ import Params
from imitecon.engine import Trajectory
from imitecon.measures import (
    BracketError,
    classify_regime,
    estimate_tau_c,
    lead_lag,
    orbit_signed_area,
    oscillation_period,
    savings_histogram,
    scaling_fit,
)


def synthetic_trajectory(s_tilde, snap_savings, horizon=None):
    """Wrap raw series into a Trajectory for classifier input."""
    s_tilde = np.asarray(s_tilde, dtype=float)
    n_rows = s_tilde.size
    times = np.linspace(0.0, horizon or float(n_rows - 1), n_rows)
    snap = np.atleast_2d(np.asarray(snap_savings, dtype=float))
    snap_times = np.linspace(0.0, times[-1], snap.shape[0])
    filler = np.ones(n_rows)
    return Trajectory(
        params=Params(),
        times=times,
        k_total=filler,
        y_total=filler,
        c_total=filler,
        s_tilde=s_tilde,
        r=filler,
        w=filler,
        snap_times=snap_times,
        snap_savings=snap,
        snap_capital=np.ones_like(snap),
    )


class TestSavingsHistogram:
    def test_normalized(self):
        h = savings_histogram(np.array([0.1, 0.1, 0.9]))
        assert h.sum() == pytest.approx(1.0)
        assert h.size == 50

    def test_boundary_values_binned(self):
        h = savings_histogram(np.array([0.0, 1.0]))
        assert h[0] == pytest.approx(0.5)
        assert h[-1] == pytest.approx(0.5)


class TestClassifyRegime:
    def test_degenerate_point_mass_is_stable(self):
        report = classify_regime(np.full(500, 0.3))
        assert report.classification == "stable"
        assert len(report.modes) == 1
        location, mass = report.modes[0]
        assert location == pytest.approx(0.3, abs=0.02)
        assert mass == pytest.approx(1.0)

    def test_synthetic_bimodal_is_oscillatory(self):
        rng = np.random.default_rng(0)
        sample = np.concatenate(
            [0.05 + 0.01 * rng.uniform(-1, 1, 500), 0.9 + 0.01 * rng.uniform(-1, 1, 500)]
        )
        report = classify_regime(sample)
        assert report.classification == "oscillatory"
        assert len(report.modes) == 2
        locations = sorted(loc for loc, _ in report.modes)
        assert locations[0] == pytest.approx(0.05, abs=0.02)
        assert locations[1] == pytest.approx(0.9, abs=0.02)
        assert sum(m for _, m in report.modes) <= 1.0 + 1e-12

    def test_order_parameter_triggers_oscillatory(self):
        t = np.linspace(0, 60 * np.pi, 4000)
        s_series = 0.4 + 0.2 * np.sin(t)
        snaps = np.tile(np.full(50, 0.4), (40, 1))  # unimodal snapshots
        traj = synthetic_trajectory(s_series, snaps)
        report = classify_regime(traj)
        assert report.order_parameter > 0.05
        assert report.classification == "oscillatory"

    def test_quiet_trajectory_is_stable(self):
        s_series = np.full(2000, 0.35)
        snaps = np.tile(np.full(50, 0.35), (40, 1))
        report = classify_regime(synthetic_trajectory(s_series, snaps))
        assert report.classification == "stable"
        assert report.order_parameter == pytest.approx(0.0)
        assert report.s_tilde_mean == pytest.approx(0.35)

    def test_burn_in_respected(self):
        # wild first half, quiet second half: burn-in hides the transient
        s_series = np.concatenate([0.1 + 0.8 * np.random.default_rng(0).random(1000),
                                   np.full(1000, 0.3)])
        snaps = np.vstack([np.full((20, 50), 0.8), np.full((20, 50), 0.3)])
        report = classify_regime(synthetic_trajectory(s_series, snaps), burn_in=0.55)
        assert report.classification == "stable"

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            classify_regime(np.array([]))


class TestEstimateTauC:
    def test_bisection_against_stub(self):
        est = estimate_tau_c(
            Params(),
            tau_lo=10.0,
            tau_hi=1000.0,
            probe_fn=lambda tau: tau > 100.0,
            rel_width=0.05,
        )
        assert est.bracket_lo <= 100.0 <= est.bracket_hi
        assert est.tau_c == pytest.approx(100.0, rel=0.06)
        assert est.bracket_hi - est.bracket_lo <= 0.05 * est.tau_c + 1e-9

    def test_bracket_errors(self):
        with pytest.raises(BracketError):
            estimate_tau_c(Params(), tau_lo=200.0, tau_hi=400.0, probe_fn=lambda t: True)
        with pytest.raises(BracketError):
            estimate_tau_c(Params(), tau_lo=10.0, tau_hi=20.0, probe_fn=lambda t: False)
        with pytest.raises(ValueError):
            estimate_tau_c(Params(), tau_lo=50.0, tau_hi=10.0, probe_fn=lambda t: True)

    def test_probe_log_recorded(self):
        est = estimate_tau_c(
            Params(), tau_lo=1.0, tau_hi=64.0, probe_fn=lambda tau: tau > 7.0
        )
        taus = [t for t, _ in est.probes]
        assert taus[0] == 1.0 and taus[1] == 64.0
        assert all(f in (0.0, 1.0) for _, f in est.probes)


class TestScalingFit:
    def test_recovers_exact_law(self):
        chis = [1.0, 1.5, 2.0, 2.5, 3.0]
        points = []
        for i, chi in enumerate(chis):
            k_mean = 10.0 + 7.0 * i
            tau_c = np.exp(-chi) / k_mean
            points.append((chi, k_mean, tau_c))
        fit = scaling_fit(points)
        assert fit.slope == pytest.approx(-1.0, abs=1e-10)
        assert fit.intercept == pytest.approx(0.0, abs=1e-10)
        assert max(abs(r) for r in fit.residuals) < 1e-10

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            scaling_fit([(1.0, 10.0, 1.0), (2.0, 10.0, 0.5)])

    def test_degenerate_design_rejected(self):
        with pytest.raises(ValueError):
            scaling_fit([(1.0, 10.0, 1.0), (1.0, 20.0, 0.5), (1.0, 5.0, 2.0)])

    def test_stderr_positive_with_noise(self):
        rng = np.random.default_rng(0)
        pts = [(chi, 10.0, float(np.exp(-chi) * np.exp(0.1 * rng.normal())))
               for chi in (1.0, 1.5, 2.0, 2.5)]
        fit = scaling_fit(pts)
        assert fit.slope_stderr > 0.0


class TestOscillationPeriod:
    def test_pure_sine(self):
        t = np.arange(800.0)
        est = oscillation_period(np.sin(2 * np.pi * t / 80.0), spacing=1.0)
        assert est is not None
        assert est.period == pytest.approx(80.0, abs=1.0)
        assert est.strength > 0.5

    def test_constant_series(self):
        assert oscillation_period(np.full(500, 0.4), spacing=1.0) is None

    def test_white_noise_has_no_period(self):
        rng = np.random.default_rng(1)
        assert oscillation_period(rng.normal(size=2000), spacing=1.0) is None

    def test_spacing_scales_period(self):
        t = np.arange(800.0)
        est = oscillation_period(np.sin(2 * np.pi * t / 80.0), spacing=2.5)
        assert est.period == pytest.approx(200.0, abs=2.5)

    def test_trajectory_input_uses_burn_in(self):
        t = np.arange(2000.0)
        series = 0.5 + 0.1 * np.sin(2 * np.pi * t / 100.0)
        traj = synthetic_trajectory(series, np.full((10, 20), 0.5))
        est = oscillation_period(traj)
        assert est.period == pytest.approx(100.0, abs=1.5)


class TestLeadLag:
    def test_detects_follower(self):
        t = np.arange(2000.0)
        x = np.sin(2 * np.pi * t / 125.0)
        shift = 7
        y = np.roll(x, shift)  # y follows x by `shift` samples
        lag, corr = lead_lag(x[100:-100], y[100:-100], max_lag=40)
        assert lag == shift
        assert corr > 0.99

    def test_negative_direction(self):
        t = np.arange(2000.0)
        x = np.sin(2 * np.pi * t / 125.0)
        y = np.roll(x, -11)
        lag, _ = lead_lag(x[100:-100], y[100:-100], max_lag=40)
        assert lag == -11


class TestOrbitArea:
    def test_counterclockwise_positive(self):
        theta = np.linspace(0, 2 * np.pi, 400, endpoint=False)
        assert orbit_signed_area(np.cos(theta), np.sin(theta)) == pytest.approx(
            np.pi, rel=1e-3
        )

    def test_clockwise_negative(self):
        theta = np.linspace(0, 2 * np.pi, 400, endpoint=False)[::-1]
        assert orbit_signed_area(np.cos(theta), np.sin(theta)) == pytest.approx(
            -np.pi, rel=1e-3
        )
