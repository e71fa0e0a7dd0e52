"""Networked imitate-the-best household economy: engine and analytics."""

__version__ = "0.1.0"

from .econ import (
    Aggregates,
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
from .engine import (
    EventLog,
    InitSpec,
    NumericalBlowupError,
    RecordSpec,
    SimConfig,
    Trajectory,
    derive_seed,
    imitate_best,
    run,
    schedule_updates,
    step,
)
from .measures import (
    BracketError,
    PeriodEstimate,
    RegimeReport,
    ScalingFit,
    TauCEstimate,
    classify_regime,
    estimate_tau_c,
    lead_lag,
    orbit_signed_area,
    oscillation_period,
    savings_histogram,
    scaling_fit,
)
from .network import (
    DisconnectedGraphError,
    GraphSampleError,
    SocialGraph,
    TopologySpec,
    avg_shortest_path,
    complete_graph,
    erdos_renyi,
    mean_degree,
    watts_strogatz,
)
from .theory import (
    RckPhasePortrait,
    RckSteadyState,
    aggregate_capital_closed_form,
    best_response,
    consumption_at_horizon,
    ds_criterion,
    golden_rule,
    rck_reference_trajectory,
    rho_of_tau,
    s_star_tau,
    tau_of_rho,
)

__all__ = [name for name in dir() if not name.startswith("_")]
