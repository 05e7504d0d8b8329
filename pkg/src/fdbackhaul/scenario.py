"""Scenario construction: base stations, flows, frame timing, seeded
generation, validation and JSON round-tripping.

Generation is a pure function of the seed and parameters. The PRNG is
NumPy's PCG64 seeded through ``SeedSequence(seed)``; the draw order is
station positions, SI-cancelation levels, flow endpoints, QoS demands.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .phy import RadioConstants

__all__ = [
    "BaseStation",
    "Flow",
    "FrameTiming",
    "Scenario",
    "GenParams",
    "generate",
    "validate",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
]


@dataclass(frozen=True)
class BaseStation:
    """One full-duplex base station with its SI-cancelation level."""

    id: int
    x_m: float
    y_m: float
    si_cancel: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x_m, self.y_m)


@dataclass(frozen=True)
class Flow:
    """Directed traffic demand between two base stations."""

    id: int
    tx: int
    rx: int
    qos_bps: float


@dataclass(frozen=True)
class FrameTiming:
    """Frame structure: scheduling phase followed by equal transmission slots."""

    slot_duration_s: float
    scheduling_phase_s: float
    num_slots: int

    @classmethod
    def default(cls) -> "FrameTiming":
        """18 us slots, 850 us scheduling phase, 2000 slots."""
        return cls(slot_duration_s=18e-6, scheduling_phase_s=850e-6, num_slots=2000)

    @property
    def frame_duration_s(self) -> float:
        """Denominator of the per-frame throughput: Ts + M * dt."""
        return self.scheduling_phase_s + self.num_slots * self.slot_duration_s


@dataclass(frozen=True)
class Scenario:
    """Immutable input of one trial."""

    stations: tuple[BaseStation, ...]
    flows: tuple[Flow, ...]
    constants: RadioConstants
    timing: FrameTiming
    contention_threshold: float


@dataclass(frozen=True)
class GenParams:
    """Generation parameters; defaults follow the standard 60 GHz setup."""

    num_bs: int = 10
    area_m: float = 100.0
    num_flows: int = 90
    qos_low_bps: float = 1e9
    qos_high_bps: float = 3e9
    beta_low: float = 2.0
    beta_high: float = 4.0
    sigma: float = 1e-3
    constants: RadioConstants = field(default_factory=RadioConstants.default)
    timing: FrameTiming = field(default_factory=FrameTiming.default)

    def with_axis(self, axis: str, value) -> "GenParams":
        """Copy with one sweep axis applied."""
        if axis == "num_flows":
            return replace(self, num_flows=int(value))
        if axis == "beta_magnitude":
            scale = 10.0 ** float(value)
            return replace(self, beta_low=2.0 * scale, beta_high=4.0 * scale)
        if axis == "sigma_magnitude":
            return replace(self, sigma=10.0 ** float(value))
        raise ConfigurationError(f"unknown sweep axis {axis!r}")


def generate(seed: int, params: GenParams = GenParams()) -> Scenario:
    """Deterministically generate a scenario from a 64-bit seed.

    Station positions are i.i.d. uniform over the square, SI-cancelation
    levels uniform in [beta_low, beta_high], flow endpoints uniform over
    ordered distinct station pairs (whole pair redrawn on tx == rx), QoS
    demands uniform in [qos_low, qos_high].
    """
    if params.num_bs < 2:
        raise ConfigurationError("need at least 2 base stations")
    if params.num_flows < 0:
        raise ConfigurationError("negative flow count")
    if params.qos_high_bps < params.qos_low_bps or params.beta_high < params.beta_low:
        raise ConfigurationError("empty qos or beta range")
    if params.area_m <= 0:
        raise ConfigurationError("area must be positive")
    if params.sigma <= 0:
        raise ConfigurationError("contention threshold must be positive")

    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        pos = rng.uniform(0.0, params.area_m, size=(params.num_bs, 2))
        # Coincident draws have probability ~0; redraw defensively.
        if len({(x, y) for x, y in pos.tolist()}) == params.num_bs:
            break
    betas = rng.uniform(params.beta_low, params.beta_high, size=params.num_bs)
    stations = tuple(
        BaseStation(id=i, x_m=float(pos[i, 0]), y_m=float(pos[i, 1]), si_cancel=float(betas[i]))
        for i in range(params.num_bs)
    )

    endpoints = []
    for _ in range(params.num_flows):
        while True:
            pair = rng.integers(0, params.num_bs, size=2)
            if pair[0] != pair[1]:
                break
        endpoints.append((int(pair[0]), int(pair[1])))
    qos = rng.uniform(params.qos_low_bps, params.qos_high_bps, size=params.num_flows)
    flows = tuple(
        Flow(id=i, tx=endpoints[i][0], rx=endpoints[i][1], qos_bps=float(qos[i]))
        for i in range(params.num_flows)
    )
    return Scenario(
        stations=stations,
        flows=flows,
        constants=params.constants,
        timing=params.timing,
        contention_threshold=params.sigma,
    )


def validate(scenario: Scenario) -> list[str]:
    """Check every structural invariant; return all violations (empty when ok)."""
    problems: list[str] = []
    c = scenario.constants
    if not c.tx_power_w > 0:
        problems.append("nonpositive-tx-power")
    if not c.bandwidth_hz > 0:
        problems.append("nonpositive-bandwidth")
    if not c.noise_psd_w_per_hz > 0:
        problems.append("nonpositive-noise-psd")
    if not 0 < c.transceiver_efficiency < 1:
        problems.append("efficiency-out-of-range")
    if not c.pathloss_exponent >= 1:
        problems.append("pathloss-exponent-below-1")
    if not c.pathloss_constant > 0:
        problems.append("nonpositive-pathloss-constant")
    if not 0 < c.halfpower_beamwidth_deg < 360.0 / 2.6:
        problems.append("beamwidth-out-of-range")

    t = scenario.timing
    if not t.slot_duration_s > 0:
        problems.append("nonpositive-slot-duration")
    if not t.num_slots >= 1:
        problems.append("no-slots")
    if not scenario.contention_threshold > 0:
        problems.append("nonpositive-sigma")

    ids = [b.id for b in scenario.stations]
    if len(set(ids)) != len(ids):
        problems.append("duplicate-bs-id")
    station_ids = set(ids)
    seen_pos: dict[tuple[float, float], int] = {}
    for b in scenario.stations:
        if b.si_cancel < 0:
            problems.append(f"negative-beta:{b.id}")
        if b.position in seen_pos:
            problems.append(f"colocated-bs:{seen_pos[b.position]},{b.id}")
        else:
            seen_pos[b.position] = b.id

    fids = [f.id for f in scenario.flows]
    if len(set(fids)) != len(fids):
        problems.append("duplicate-flow-id")
    for f in scenario.flows:
        if f.tx == f.rx:
            problems.append(f"self-flow:{f.id}")
        if f.tx not in station_ids or f.rx not in station_ids:
            problems.append(f"dangling-endpoint:{f.id}")
        if not f.qos_bps > 0:
            problems.append(f"nonpositive-qos:{f.id}")
    return problems


def scenario_to_dict(scenario: Scenario) -> dict:
    c = scenario.constants
    t = scenario.timing
    return {
        "stations": [
            {"id": b.id, "x_m": b.x_m, "y_m": b.y_m, "beta": b.si_cancel}
            for b in scenario.stations
        ],
        "flows": [
            {"id": f.id, "tx": f.tx, "rx": f.rx, "qos_bps": f.qos_bps}
            for f in scenario.flows
        ],
        "constants": {
            "carrier_wavelength_m": c.carrier_wavelength_m,
            "tx_power_w": c.tx_power_w,
            "pathloss_exponent": c.pathloss_exponent,
            "mui_factor": c.mui_factor,
            "transceiver_efficiency": c.transceiver_efficiency,
            "bandwidth_hz": c.bandwidth_hz,
            "noise_psd_w_per_hz": c.noise_psd_w_per_hz,
            "pathloss_constant": c.pathloss_constant,
            "halfpower_beamwidth_deg": c.halfpower_beamwidth_deg,
        },
        "timing": {
            "slot_duration_s": t.slot_duration_s,
            "scheduling_phase_s": t.scheduling_phase_s,
            "num_slots": t.num_slots,
        },
        "sigma": scenario.contention_threshold,
    }


def scenario_from_dict(data: dict) -> Scenario:
    stations = tuple(
        BaseStation(id=s["id"], x_m=s["x_m"], y_m=s["y_m"], si_cancel=s["beta"])
        for s in data["stations"]
    )
    flows = tuple(
        Flow(id=f["id"], tx=f["tx"], rx=f["rx"], qos_bps=f["qos_bps"])
        for f in data["flows"]
    )
    constants = RadioConstants(**data["constants"])
    timing = FrameTiming(**data["timing"])
    return Scenario(
        stations=stations,
        flows=flows,
        constants=constants,
        timing=timing,
        contention_threshold=data["sigma"],
    )


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
