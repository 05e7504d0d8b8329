"""Shared builders for hand-made and randomized scenarios."""
from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from fdbackhaul.phy import RadioConstants, link_budget
from fdbackhaul.scenario import BaseStation, Flow, FrameTiming, GenParams, Scenario, generate


def make_scenario(
    positions,
    flow_specs,
    betas=None,
    sigma=1e-3,
    constants=None,
    timing=None,
) -> Scenario:
    """Build a scenario from explicit positions and (tx, rx, qos_bps) triples."""
    constants = constants or RadioConstants.default()
    timing = timing or FrameTiming.default()
    if betas is None:
        betas = [3.0] * len(positions)
    stations = tuple(
        BaseStation(id=i, x_m=float(x), y_m=float(y), si_cancel=float(betas[i]))
        for i, (x, y) in enumerate(positions)
    )
    flows = tuple(
        Flow(id=i, tx=tx, rx=rx, qos_bps=float(q))
        for i, (tx, rx, q) in enumerate(flow_specs)
    )
    return Scenario(
        stations=stations,
        flows=flows,
        constants=constants,
        timing=timing,
        contention_threshold=sigma,
    )


def rescale_qos(scenario: Scenario, xi_targets) -> Scenario:
    """Set each flow's QoS so its interference-free slot demand equals the
    given target."""
    lb = link_budget(scenario)
    t = scenario.timing
    flows = tuple(
        dataclasses.replace(
            f,
            qos_bps=float(
                xi_targets[i] * lb.solo_rates[i] * t.slot_duration_s / t.frame_duration_s
            ),
        )
        for i, f in enumerate(scenario.flows)
    )
    return dataclasses.replace(scenario, flows=flows)


def random_scenario(seed: int, max_flows: int = 18, max_slots: int = 220) -> Scenario:
    """Mid-size random scenario with varied demand pressure: some flows
    complete, some cannot, occasionally some are droppable."""
    rng = np.random.default_rng(seed)
    num_bs = int(rng.integers(3, 9))
    num_flows = int(rng.integers(2, max_flows + 1))
    num_slots = int(rng.integers(20, max_slots + 1))
    sigma = float(10.0 ** rng.uniform(-5, -1))
    timing = FrameTiming(slot_duration_s=18e-6, scheduling_phase_s=850e-6, num_slots=num_slots)
    magnitude = float(rng.integers(0, 4))
    base = generate(
        int(rng.integers(0, 2**63)),
        GenParams(
            num_bs=num_bs,
            num_flows=num_flows,
            sigma=sigma,
            timing=timing,
            beta_low=2.0 * 10**magnitude,
            beta_high=4.0 * 10**magnitude,
        ),
    )
    xi = rng.uniform(1.0, 2.0 * num_slots, size=num_flows)
    return rescale_qos(base, xi)


def tiny_scenario(seed: int) -> Scenario:
    """Oracle-sized instance: at most 4 flows and 6 slots, demands scaled
    to a handful of slots."""
    rng = np.random.default_rng(seed)
    num_bs = int(rng.integers(3, 7))
    num_flows = int(rng.integers(1, 5))
    num_slots = int(rng.integers(2, 7))
    timing = FrameTiming(slot_duration_s=18e-6, scheduling_phase_s=850e-6, num_slots=num_slots)
    base = generate(
        int(rng.integers(0, 2**63)),
        GenParams(num_bs=num_bs, num_flows=num_flows, timing=timing),
    )
    xi = rng.uniform(0.5, num_slots + 1.5, size=num_flows)
    return rescale_qos(base, xi)


@pytest.fixture
def square_scenario() -> Scenario:
    """Four stations on a 50 m square with two parallel west-east flows."""
    return make_scenario(
        positions=[(0.0, 0.0), (50.0, 0.0), (0.0, 50.0), (50.0, 50.0)],
        flow_specs=[(0, 1, 2e9), (2, 3, 2e9)],
    )
