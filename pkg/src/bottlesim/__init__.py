"""Two-route bottleneck day-to-day route choice simulator.

Human drivers repeatedly choose between a short low-capacity route and
a long high-capacity one, learning travel times from their own
experience, while an optional centrally coordinated vehicle fleet picks
its daily split to optimize a configurable collective objective.
"""

from .agents import (
    ROUTE_A,
    ROUTE_B,
    EstimateVector,
    HumanAgent,
    HumanParams,
    TasteProfile,
    choose_route,
    logit_probability,
    perceived_utility,
    sample_taste,
    update_estimate,
)
from .engine import (
    DayRecord,
    ScenarioConfig,
    SimulationLog,
    SimulationState,
    apply_mday,
    init_simulation,
    run_scenario,
    step_day,
)
from .fleet import (
    STRATEGY_NAMES,
    FleetDecision,
    StrategyWeights,
    fleet_objective,
    fleet_optimize,
    strategy_weights,
)
from .metrics import (
    RatioReport,
    TTestResult,
    WindowAverages,
    compute_window_averages,
    day_statistics,
    optimality_and_equity,
    paired_t_test,
    ratio_report,
    system_optimum,
    window_average,
)
from .expcli import (
    ConfigError,
    ExperimentSpec,
    load_config,
    replicate_and_test,
    run_experiment,
    write_outputs,
)
from .network import RouteParams, TwoRouteNetwork, bpr_travel_time, network_travel_times

__all__ = [
    "ROUTE_A",
    "ROUTE_B",
    "ConfigError",
    "DayRecord",
    "EstimateVector",
    "ExperimentSpec",
    "FleetDecision",
    "HumanAgent",
    "HumanParams",
    "RatioReport",
    "RouteParams",
    "STRATEGY_NAMES",
    "ScenarioConfig",
    "SimulationLog",
    "SimulationState",
    "StrategyWeights",
    "TTestResult",
    "TasteProfile",
    "TwoRouteNetwork",
    "WindowAverages",
    "apply_mday",
    "bpr_travel_time",
    "choose_route",
    "compute_window_averages",
    "day_statistics",
    "fleet_objective",
    "fleet_optimize",
    "init_simulation",
    "load_config",
    "logit_probability",
    "network_travel_times",
    "optimality_and_equity",
    "paired_t_test",
    "perceived_utility",
    "ratio_report",
    "replicate_and_test",
    "run_experiment",
    "run_scenario",
    "sample_taste",
    "step_day",
    "strategy_weights",
    "system_optimum",
    "update_estimate",
    "window_average",
    "write_outputs",
]
