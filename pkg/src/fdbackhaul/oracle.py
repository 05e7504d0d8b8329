"""Exact solver for the completed-flow maximization on tiny instances,
plus an independent metric recomputation used to cross-check the engine.

The exact search enumerates slot-count allocations over the feasible
concurrent sets instead of per-slot sequences: frame throughput is a sum
of per-slot rates, so permuting slots never changes it, and a count
vector per feasible set captures every schedule.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, ScheduleError
from .phy import link_budget, slot_rate
from .scenario import Scenario
from .schedulers import Schedule, validate_schedule
from .engine import TrialMetrics

__all__ = [
    "FeasibleSet",
    "Allocation",
    "enumerate_feasible_sets",
    "solve_exact",
    "recompute_metrics",
    "MAX_ORACLE_FLOWS",
    "DEFAULT_COMPOSITION_BUDGET",
]

MAX_ORACLE_FLOWS = 6
# Upper bound on the number of enumerated slot allocations, i.e.
# C(M + K, K) for K nonempty feasible sets and M slots.
DEFAULT_COMPOSITION_BUDGET = 2_000_000


@dataclass(frozen=True)
class FeasibleSet:
    """A concurrently schedulable set of flows with its per-flow rates."""

    flows: tuple[int, ...]
    rates_bps: tuple[float, ...]


@dataclass
class Allocation:
    """Slot counts per feasible set; unallocated slots stay idle."""

    counts: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def total_slots(self) -> int:
        return sum(self.counts.values())


def enumerate_feasible_sets(scenario: Scenario) -> list[FeasibleSet]:
    """All flow subsets satisfying the hard full-duplex constraints (at
    most two flows per base station, opposite roles), the empty set
    included, each with its concurrent rates."""
    flows = scenario.flows
    if len(flows) > MAX_ORACLE_FLOWS:
        raise BudgetError(
            f"{len(flows)} flows exceed the oracle guard of {MAX_ORACLE_FLOWS}"
        )
    out = [FeasibleSet(flows=(), rates_bps=())]
    ids = [f.id for f in flows]
    by_id = {f.id: f for f in flows}
    for size in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, size):
            if _role_conflict(combo, by_id):
                continue
            rates = tuple(slot_rate(fid, combo, scenario) for fid in combo)
            out.append(FeasibleSet(flows=combo, rates_bps=rates))
    return out


def _role_conflict(combo, by_id) -> bool:
    for a, b in itertools.combinations(combo, 2):
        fa, fb = by_id[a], by_id[b]
        if fa.tx == fb.tx or fa.rx == fb.rx:
            return True
    return False


def solve_exact(
    scenario: Scenario, budget: int = DEFAULT_COMPOSITION_BUDGET
) -> tuple[int, Allocation]:
    """Exhaustive optimum of the completed-flow count over all feasible
    slot allocations; among optima, the one with the fewest busy slots
    found first in enumeration order.

    Refuses instances whose composition count C(M + K, K) exceeds the
    budget.
    """
    sets = [s for s in enumerate_feasible_sets(scenario) if s.flows]
    k = len(sets)
    t = scenario.timing
    m = t.num_slots
    if math.comb(m + k, k) > budget:
        raise BudgetError(
            f"composition count C({m + k},{k}) exceeds the budget of {budget}"
        )
    flows = scenario.flows
    n = len(flows)
    index = {f.id: i for i, f in enumerate(flows)}
    qos = np.array([f.qos_bps for f in flows])
    target_bits = qos * t.frame_duration_s
    gain = np.zeros((k, n))
    for si, s in enumerate(sets):
        for fid, rate in zip(s.flows, s.rates_bps):
            gain[si, index[fid]] = rate * t.slot_duration_s

    best_completed = -1
    best_slots = m + 1
    best_counts: tuple[int, ...] = ()

    counts = [0] * k

    def descend(si: int, remaining: int, bits: np.ndarray) -> None:
        nonlocal best_completed, best_slots, best_counts
        if si == k:
            completed = int((bits >= target_bits).sum())
            used = m - remaining
            if completed > best_completed or (
                completed == best_completed and used < best_slots
            ):
                best_completed = completed
                best_slots = used
                best_counts = tuple(counts)
            return
        for c in range(remaining + 1):
            counts[si] = c
            descend(si + 1, remaining - c, bits + c * gain[si])
        counts[si] = 0

    descend(0, m, np.zeros(n))
    allocation = Allocation(
        counts={
            sets[si].flows: c for si, c in enumerate(best_counts) if c > 0
        }
    )
    return max(best_completed, 0), allocation


def recompute_metrics(schedule: Schedule, scenario: Scenario) -> TrialMetrics:
    """Independent re-derivation of the trial metrics from an exported
    schedule, walking the cells slot by slot. Raises ScheduleError when
    the schedule fails validation."""
    problems = validate_schedule(schedule, scenario)
    if problems:
        raise ScheduleError(f"invalid schedule: {problems}")
    lb = link_budget(scenario)
    t = scenario.timing
    bits = np.zeros(lb.num_flows)
    for i in range(schedule.num_slots):
        active = schedule.cells[:, i] == 1
        bits += lb.rates_for(active) * t.slot_duration_s
    throughput = bits / t.frame_duration_s
    done = throughput >= lb.qos
    return TrialMetrics(
        completed_count=int(done.sum()),
        system_throughput=float(throughput.sum()),
        per_flow_throughput=tuple(float(x) for x in throughput),
        per_flow_completed=tuple(bool(x) for x in done),
    )
