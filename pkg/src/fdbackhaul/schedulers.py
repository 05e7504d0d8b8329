"""Five slot schedulers behind one interface.

Every scheduler maps a validated Scenario to a Schedule: an F x M cell
matrix over {unscheduled 0, scheduled 1, completed -1} plus the set of
dropped flows. A flow's cell stays 1 through the slot in which it reaches
its QoS target; the completed marker fills the remaining slots, so frame
throughput is always recomputable from the cells alone.

All schedulers accumulate delivered bits slot by slot with the shared
LinkBudget rate kernel, which keeps their completion decisions bit-equal
to the engine's metric replay.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .contention import ContentionGraph, build_graph, hd_graph
from .phy import link_budget
from .scenario import Scenario

__all__ = [
    "UNSCHEDULED",
    "SCHEDULED",
    "COMPLETED",
    "Schedule",
    "slot_demand",
    "proposed_fd",
    "proposed_hd",
    "mqis",
    "tdma",
    "fdp",
    "SCHEDULERS",
    "greedy_independent_set",
    "validate_schedule",
    "export_schedule",
]

UNSCHEDULED = 0
SCHEDULED = 1
COMPLETED = -1


@dataclass(eq=False)
class Schedule:
    """Scheduling decision for one frame.

    ``cells[f, i]`` is the state of flow index f in slot i; ``dropped``
    holds the ids of flows removed before scheduling (demand above the
    frame capacity), whose rows stay all zero.
    """

    cells: np.ndarray
    dropped: frozenset[int] = frozenset()

    @property
    def num_flows(self) -> int:
        return self.cells.shape[0]

    @property
    def num_slots(self) -> int:
        return self.cells.shape[1]

    def active_in_slot(self, i: int) -> np.ndarray:
        return self.cells[:, i] == SCHEDULED


class AdmissionRecord(NamedTuple):
    """Trace entry for one profit-checked admission (slot, flow index,
    rate sum before, rate sum after, active indices before)."""

    slot: int
    flow: int
    sum_before: float
    sum_after: float
    active_before: tuple[int, ...]


def slot_demand(scenario: Scenario) -> np.ndarray:
    """Slots each flow needs at its interference-free rate to meet its
    QoS demand within the frame: q * (Ts + M*dt) / (R * dt).

    A zero solo rate yields an infinite demand (the flow is droppable).
    """
    lb = link_budget(scenario)
    t = scenario.timing
    with np.errstate(divide="ignore"):
        return lb.qos * t.frame_duration_s / (lb.solo_rates * t.slot_duration_s)


def _mark_completed(cells: np.ndarray, flow_indices: np.ndarray, next_slot: int) -> None:
    if next_slot < cells.shape[1]:
        cells[flow_indices, next_slot:] = COMPLETED


def _qos_aware(
    scenario: Scenario,
    graph: ContentionGraph,
    trace: list[AdmissionRecord] | None = None,
) -> Schedule:
    """QoS-aware concurrent scheduling over an arbitrary contention graph.

    Drops flows whose interference-free demand exceeds the frame, scans
    survivors in nondecreasing demand order at every change event, and
    admits a candidate only when it has no contention edge to the ongoing
    flows and strictly raises the slot's total instantaneous rate.
    """
    lb = link_budget(scenario)
    t = scenario.timing
    n_flows = lb.num_flows
    n_slots = t.num_slots
    dt = t.slot_duration_s
    frame_s = t.frame_duration_s

    xi = slot_demand(scenario)
    drop_mask = xi > n_slots
    dropped = frozenset(scenario.flows[i].id for i in np.flatnonzero(drop_mask))
    order = sorted(np.flatnonzero(~drop_mask), key=lambda f: (xi[f], f))

    cells = np.zeros((n_flows, n_slots), dtype=np.int8)
    adj = graph.adjacency
    contrib = lb.denom_contrib
    sig = lb.signal
    eta_w = lb.eta_w

    active = np.zeros(n_flows, dtype=bool)
    completed = np.zeros(n_flows, dtype=bool)
    bits = np.zeros(n_flows)
    qos = lb.qos
    change = True
    active_idx = np.zeros(0, dtype=int)
    rate_dt = np.zeros(n_flows)

    for i in range(n_slots):
        if change:
            # Rebuild the interference state of the carried-over set, then
            # scan candidates in demand order.
            den = lb.noise_w + contrib.T @ active.astype(float)
            idx = list(np.flatnonzero(active))
            blocked = adj[:, active].any(axis=1) if idx else np.zeros(n_flows, dtype=bool)
            cur_sum = float(np.sum(eta_w * np.log2(1.0 + sig[idx] / den[idx]))) if idx else 0.0
            for f in order:
                if active[f] or completed[f] or blocked[f]:
                    continue
                ia = np.array(idx, dtype=int)
                degraded = den[ia] + contrib[f, ia]
                new_sum = float(
                    np.sum(eta_w * np.log2(1.0 + sig[ia] / degraded))
                ) + float(eta_w * np.log2(1.0 + sig[f] / den[f]))
                if new_sum > cur_sum:
                    if trace is not None:
                        trace.append(
                            AdmissionRecord(i, int(f), cur_sum, new_sum, tuple(idx))
                        )
                    active[f] = True
                    idx.append(int(f))
                    den += contrib[f]
                    blocked |= adj[f]
                    cur_sum = new_sum
            active_idx = np.flatnonzero(active)
            rate_dt = lb.rates_for(active) * dt
            change = False
            if active_idx.size == 0:
                break
        bits += rate_dt
        cells[active_idx, i] = SCHEDULED
        throughput = bits / frame_s
        newly = active & (throughput >= qos)
        if newly.any():
            completed |= newly
            active &= ~newly
            _mark_completed(cells, np.flatnonzero(newly), i + 1)
            change = True
    return Schedule(cells=cells, dropped=dropped)


def proposed_fd(
    scenario: Scenario, trace: list[AdmissionRecord] | None = None
) -> Schedule:
    """QoS-aware full-duplex concurrent scheduler. Pass a list as
    ``trace`` to record every profit-checked admission."""
    return _qos_aware(scenario, build_graph(scenario), trace)


def proposed_hd(
    scenario: Scenario, trace: list[AdmissionRecord] | None = None
) -> Schedule:
    """Same algorithm restricted to half-duplex: any shared base station
    is a conflict."""
    return _qos_aware(scenario, hd_graph(scenario), trace)


def greedy_independent_set(
    adjacency: np.ndarray, candidates: np.ndarray, xi: np.ndarray
) -> np.ndarray:
    """Maximal independent set by repeatedly taking the minimum-degree
    vertex of the residual graph (ties: smaller demand, then smaller
    index) and deleting it with its neighbors."""
    alive = candidates.copy()
    chosen = np.zeros_like(alive)
    while alive.any():
        deg = adjacency[:, alive].sum(axis=1)
        alive_idx = np.flatnonzero(alive)
        d = deg[alive_idx]
        tie = alive_idx[d == d.min()]
        pick = int(tie[np.lexsort((tie, xi[tie]))[0]])
        chosen[pick] = True
        alive[pick] = False
        alive &= ~adjacency[pick]
    return chosen


def mqis(scenario: Scenario) -> Schedule:
    """Maximum QoS-aware independent set baseline (half-duplex).

    Repeatedly schedules a greedy maximal independent set of the
    not-yet-completed flows; no flow dropping, no profit evaluation.
    """
    lb = link_budget(scenario)
    graph = hd_graph(scenario)
    t = scenario.timing
    n_flows, n_slots = lb.num_flows, t.num_slots
    dt = t.slot_duration_s
    frame_s = t.frame_duration_s
    xi = slot_demand(scenario)

    cells = np.zeros((n_flows, n_slots), dtype=np.int8)
    completed = np.zeros(n_flows, dtype=bool)
    bits = np.zeros(n_flows)
    rederive = True
    active = np.zeros(n_flows, dtype=bool)
    active_idx = np.zeros(0, dtype=int)
    rate_dt = np.zeros(n_flows)

    for i in range(n_slots):
        if rederive:
            if completed.all():
                break
            active = greedy_independent_set(graph.adjacency, ~completed, xi)
            active_idx = np.flatnonzero(active)
            rate_dt = lb.rates_for(active) * dt
            rederive = False
        bits += rate_dt
        cells[active_idx, i] = SCHEDULED
        throughput = bits / frame_s
        newly = active & (throughput >= lb.qos)
        if newly.any():
            completed |= newly
            _mark_completed(cells, np.flatnonzero(newly), i + 1)
            rederive = True
    return Schedule(cells=cells)


def tdma(scenario: Scenario) -> Schedule:
    """Serial baseline: one flow at a time, shortest demand first, each
    at its interference-free rate until its QoS target is met."""
    lb = link_budget(scenario)
    t = scenario.timing
    n_flows, n_slots = lb.num_flows, t.num_slots
    dt = t.slot_duration_s
    frame_s = t.frame_duration_s
    xi = slot_demand(scenario)
    order = sorted(range(n_flows), key=lambda f: (xi[f], f))

    cells = np.zeros((n_flows, n_slots), dtype=np.int8)
    bits = np.zeros(n_flows)
    pos = 0
    rate_dt = np.zeros(n_flows)
    current = -1
    for i in range(n_slots):
        if pos >= len(order):
            break
        f = order[pos]
        if f != current:
            mask = np.zeros(n_flows, dtype=bool)
            mask[f] = True
            rate_dt = lb.rates_for(mask) * dt
            current = f
        bits += rate_dt
        cells[f, i] = SCHEDULED
        if bits[f] / frame_s >= lb.qos[f]:
            _mark_completed(cells, np.array([f]), i + 1)
            pos += 1
    return Schedule(cells=cells)


def fdp(scenario: Scenario) -> Schedule:
    """Phase-based full-duplex baseline.

    Each phase anchors on the uncompleted flow with the largest remaining
    demand, adds compatible flows in decreasing demand order, and runs
    until every member meets its QoS target; members keep transmitting
    until the whole phase completes.
    """
    lb = link_budget(scenario)
    graph = build_graph(scenario)
    t = scenario.timing
    n_flows, n_slots = lb.num_flows, t.num_slots
    dt = t.slot_duration_s
    frame_s = t.frame_duration_s

    cells = np.zeros((n_flows, n_slots), dtype=np.int8)
    completed = np.zeros(n_flows, dtype=bool)
    bits = np.zeros(n_flows)
    adj = graph.adjacency
    i = 0
    while i < n_slots and not completed.all():
        with np.errstate(divide="ignore"):
            remaining_xi = (lb.qos * frame_s - bits) / (lb.solo_rates * dt)
        order = sorted(np.flatnonzero(~completed), key=lambda f: (-remaining_xi[f], f))
        members = np.zeros(n_flows, dtype=bool)
        member_idx: list[int] = []
        for f in order:
            if not member_idx or not adj[f, members].any():
                members[f] = True
                member_idx.append(int(f))
        midx = np.array(member_idx, dtype=int)
        rate_dt = lb.rates_for(members) * dt
        throughput = bits / frame_s
        while i < n_slots:
            bits += rate_dt
            cells[midx, i] = SCHEDULED
            i += 1
            throughput = bits / frame_s
            if np.all(throughput[midx] >= lb.qos[midx]):
                break
        done = members & (throughput >= lb.qos)
        completed |= done
        _mark_completed(cells, np.flatnonzero(done), i)
    return Schedule(cells=cells)


SCHEDULERS: dict[str, Callable[[Scenario], Schedule]] = {
    "tdma": tdma,
    "mqis": mqis,
    "proposed-hd": proposed_hd,
    "proposed-fd": proposed_fd,
    "fdp": fdp,
}


def validate_schedule(schedule: Schedule, scenario: Scenario) -> list[str]:
    """Check the structural Schedule invariants; return all violations.

    Verifies cell values, the per-slot full-duplex constraints (at most
    two flows per base station, opposite roles when two share one), that
    completed flows are never rescheduled, and that dropped flows have
    empty rows.
    """
    problems: list[str] = []
    cells = schedule.cells
    n_flows = len(scenario.flows)
    n_slots = scenario.timing.num_slots
    if cells.shape != (n_flows, n_slots):
        return [f"bad-shape:{cells.shape}"]
    if not np.isin(cells, (UNSCHEDULED, SCHEDULED, COMPLETED)).all():
        problems.append("bad-cell-value")

    tx = np.array([f.tx for f in scenario.flows])
    rx = np.array([f.rx for f in scenario.flows])
    for i in range(n_slots):
        idx = np.flatnonzero(cells[:, i] == SCHEDULED)
        if idx.size < 2:
            continue
        if len(set(tx[idx])) < idx.size:
            problems.append(f"shared-transmitter:slot{i}")
        if len(set(rx[idx])) < idx.size:
            problems.append(f"shared-receiver:slot{i}")
        usage = np.concatenate([tx[idx], rx[idx]])
        _, counts = np.unique(usage, return_counts=True)
        if (counts > 2).any():
            problems.append(f"bs-overuse:slot{i}")

    for f in range(n_flows):
        row = cells[f]
        marks = np.flatnonzero(row == COMPLETED)
        if marks.size and not (row[marks[0]:] == COMPLETED).all():
            problems.append(f"rescheduled-after-completion:{f}")

    index = {fl.id: k for k, fl in enumerate(scenario.flows)}
    for fid in schedule.dropped:
        if fid not in index:
            problems.append(f"unknown-dropped-flow:{fid}")
        elif (cells[index[fid]] != UNSCHEDULED).any():
            problems.append(f"dropped-flow-scheduled:{fid}")
    return problems


def export_schedule(schedule: Schedule, scenario: Scenario) -> dict:
    """Structured dump: per-slot active flow ids and per-flow completion
    slot (1-based slot after which the QoS target was met, or None)."""
    lb = link_budget(scenario)
    t = scenario.timing
    dt = t.slot_duration_s
    frame_s = t.frame_duration_s
    ids = [f.id for f in scenario.flows]
    bits = np.zeros(len(ids))
    completion: dict[int, int | None] = {fid: None for fid in ids}
    per_slot: list[list[int]] = []
    for i in range(schedule.num_slots):
        mask = schedule.active_in_slot(i)
        per_slot.append([ids[k] for k in np.flatnonzero(mask)])
        bits += lb.rates_for(mask) * dt
        crossed = (bits / frame_s >= lb.qos) & np.array(
            [completion[fid] is None for fid in ids]
        )
        for k in np.flatnonzero(crossed):
            completion[ids[k]] = i + 1
    return {
        "active": per_slot,
        "completion_slot": completion,
        "dropped": sorted(schedule.dropped),
    }
