"""Full-duplex mmWave backhaul scheduling simulator."""

from .phy import (
    AntennaPattern,
    LinkBudget,
    RadioConstants,
    antenna_gain,
    boresight_angle,
    link_budget,
    noise_power,
    received_power,
    slot_rate,
    solo_rate,
)
from .scenario import (
    BaseStation,
    Flow,
    FrameTiming,
    GenParams,
    Scenario,
    generate,
    load_scenario,
    save_scenario,
    validate,
)
from .contention import (
    ContentionGraph,
    EdgeCause,
    PairKind,
    build_graph,
    classify_pair,
    hd_graph,
    relative_interference,
)
from .schedulers import (
    SCHEDULERS,
    Schedule,
    export_schedule,
    fdp,
    mqis,
    proposed_fd,
    proposed_hd,
    slot_demand,
    tdma,
    validate_schedule,
)
from .engine import (
    SweepSpec,
    TrialMetrics,
    aggregate,
    derive_seed,
    run_sweep,
    run_trial,
)
from .oracle import (
    Allocation,
    FeasibleSet,
    enumerate_feasible_sets,
    recompute_metrics,
    solve_exact,
)

__version__ = "0.1.0"
