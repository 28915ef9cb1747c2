"""Contention games and a CSMA/CA simulator for multi-rate 802.11 senders."""

from .channel import (
    DEFAULT_THRESHOLDS_DBM,
    FadingChannel,
    FadingSampler,
    SuccessTable,
    TableSampler,
    log_distance_rx_power_dbm,
    rayleigh_success_fraction,
    rbar_select_rate_bps,
)
from .errors import DomainError, ScenarioError
from .game import (
    BurstPolicy,
    Discipline,
    EquilibriumReport,
    Outcome,
    PayoffMatrix,
    SpeClass,
    StageGame,
    Witness,
    check_rate_drop_tradeoff,
    classify_equilibria,
    dcf_occupancy_s,
    edcf_occupancy_s,
    expected_burst_frames,
    find_pure_nash,
    is_dominant_strategy,
    most_efficient_strategy,
    payoff_matrix,
    stage_payoff,
    undesirability_witness,
    unique_nash_condition,
)
from .phy import (
    DOT11B,
    MBPS,
    PhyProfile,
    Strategy,
    achievable_throughput_bps,
    frame_airtime_s,
    max_burst_frames,
    peak_throughput_bps,
    validate_strategy,
)
from .scenario import (
    Scenario,
    bundled_scenario_names,
    load_bundled_scenario,
    load_scenario,
    load_scenario_text,
)
from .sim import (
    BestResponseConfig,
    DcfStarConfig,
    SimNode,
    SimReport,
    SimScenario,
    Simulator,
    StrategyPolicy,
    dcf_star_cw_update,
    execute_txop,
    run_sim,
    substream,
)

__version__ = "0.1.0"
