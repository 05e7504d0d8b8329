"""Closed-form physical layer: directional antenna gains, link budget,
noise, residual self-interference and Shannon rates.

All internal computation uses SI linear units (watts, hertz, meters,
seconds). Decibel values appear only at construction/IO boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import FeasibilityError, GeometryError

if TYPE_CHECKING:
    from .scenario import Scenario

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Width of the antenna main lobe relative to the half-power beamwidth.
MAINLOBE_FACTOR = 2.6


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(lin: float) -> float:
    return 10.0 * math.log10(lin)


def dbm_per_mhz_to_w_per_hz(dbm_per_mhz: float) -> float:
    """Convert a noise PSD quoted in dBm/MHz to W/Hz."""
    return 10.0 ** ((dbm_per_mhz - 30.0) / 10.0) / 1e6


def friis_constant(wavelength_m: float) -> float:
    """Free-space reference factor (wavelength / 4 pi)^2."""
    return (wavelength_m / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class RadioConstants:
    """Radio-level parameters of one scenario.

    ``pathloss_constant`` is the Friis factor multiplying the power law,
    ``mui_factor`` scales interference received from other flows'
    transmitters, and ``transceiver_efficiency`` scales the Shannon rate.
    """

    carrier_wavelength_m: float
    tx_power_w: float
    pathloss_exponent: float
    mui_factor: float
    transceiver_efficiency: float
    bandwidth_hz: float
    noise_psd_w_per_hz: float
    pathloss_constant: float
    halfpower_beamwidth_deg: float

    @classmethod
    def default(cls) -> "RadioConstants":
        """60 GHz defaults: 1 W transmit power, pathloss exponent 2,
        MUI factor 1, efficiency 0.5, 1200 MHz bandwidth, -134 dBm/MHz
        noise PSD, 30 degree half-power beamwidth."""
        lam = SPEED_OF_LIGHT_M_S / 60e9
        return cls(
            carrier_wavelength_m=lam,
            tx_power_w=1.0,
            pathloss_exponent=2.0,
            mui_factor=1.0,
            transceiver_efficiency=0.5,
            bandwidth_hz=1200e6,
            noise_psd_w_per_hz=dbm_per_mhz_to_w_per_hz(-134.0),
            pathloss_constant=friis_constant(lam),
            halfpower_beamwidth_deg=30.0,
        )


@dataclass(frozen=True)
class AntennaPattern:
    """Piecewise directional gain model: quadratic main lobe roll-off out
    to half the main-lobe width, flat sidelobe floor beyond."""

    g0_db: float
    mainlobe_width_deg: float
    sidelobe_gain_db: float
    halfpower_beamwidth_deg: float

    @classmethod
    def from_beamwidth(cls, halfpower_beamwidth_deg: float) -> "AntennaPattern":
        th = halfpower_beamwidth_deg
        if not 0.0 < th < 360.0 / MAINLOBE_FACTOR:
            raise GeometryError(
                f"half-power beamwidth {th} deg outside (0, {360.0 / MAINLOBE_FACTOR:.3f})"
            )
        g0_db = 10.0 * math.log10((1.6162 / math.sin(math.radians(th / 2.0))) ** 2)
        sidelobe_db = -0.4111 * math.log(th) - 10.579
        return cls(
            g0_db=g0_db,
            mainlobe_width_deg=MAINLOBE_FACTOR * th,
            sidelobe_gain_db=sidelobe_db,
            halfpower_beamwidth_deg=th,
        )


def antenna_gain(pattern: AntennaPattern, theta_deg: float) -> float:
    """Linear gain of a steered antenna at angular offset ``theta_deg``
    from boresight.

    Raises GeometryError for offsets outside [0, 180] degrees.
    """
    if not 0.0 <= theta_deg <= 180.0:
        raise GeometryError(f"boresight offset {theta_deg} deg outside [0, 180]")
    if theta_deg <= pattern.mainlobe_width_deg / 2.0:
        g_db = pattern.g0_db - 3.01 * (2.0 * theta_deg / pattern.halfpower_beamwidth_deg) ** 2
    else:
        g_db = pattern.sidelobe_gain_db
    return db_to_linear(g_db)


def boresight_angle(antenna_at, aimed_at, other) -> float:
    """Planar angle in degrees between the antenna's boresight direction
    (antenna_at -> aimed_at) and the direction toward ``other``.

    Result lies in [0, 180]. Raises GeometryError when either direction
    is degenerate (coincident points).
    """
    antenna_at = np.asarray(antenna_at, dtype=float)
    u = np.asarray(aimed_at, dtype=float) - antenna_at
    v = np.asarray(other, dtype=float) - antenna_at
    nu = math.hypot(*u)
    nv = math.hypot(*v)
    if nu == 0.0:
        raise GeometryError("antenna aim point coincides with the antenna position")
    if nv == 0.0:
        raise GeometryError("target point coincides with the antenna position")
    cos_t = float(np.dot(u, v)) / (nu * nv)
    cos_t = min(1.0, max(-1.0, cos_t))
    return math.degrees(math.acos(cos_t))


def received_power(
    tx,
    tx_aim,
    rx,
    rx_aim,
    constants: RadioConstants,
    pattern: AntennaPattern,
    is_interference: bool = False,
) -> float:
    """Received power in watts over the directional line-of-sight link
    from a transmit antenna at ``tx`` (boresight on ``tx_aim``) to a
    receive antenna at ``rx`` (boresight on ``rx_aim``).

    With ``is_interference`` the result is scaled by the MUI factor.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    d = math.hypot(*(rx - tx))
    if d == 0.0:
        raise GeometryError("zero transmitter-receiver distance")
    g_t = antenna_gain(pattern, boresight_angle(tx, tx_aim, rx))
    g_r = antenna_gain(pattern, boresight_angle(rx, rx_aim, tx))
    power = (
        constants.pathloss_constant
        * constants.tx_power_w
        * g_t
        * g_r
        * d ** (-constants.pathloss_exponent)
    )
    if is_interference:
        power *= constants.mui_factor
    return power


def noise_power(constants: RadioConstants) -> float:
    """Thermal noise power N0*W in watts."""
    return constants.noise_psd_w_per_hz * constants.bandwidth_hz


def solo_rate(flow_id: int, scenario: "Scenario") -> float:
    """Interference-free Shannon rate of one flow in bits/second."""
    return slot_rate(flow_id, {flow_id}, scenario)


def slot_rate(flow_id: int, active: Iterable[int], scenario: "Scenario") -> float:
    """Instantaneous rate of ``flow_id`` while the flows in ``active``
    transmit concurrently, in bits/second.

    Reference scalar implementation built from first principles; the
    vectorized :class:`LinkBudget` kernel is cross-checked against it.
    The denominator collects thermal noise, residual self-interference
    from any active flow transmitting at this flow's receiver, and MUI
    from active flows sharing no node with this flow. Returns 0 when the
    flow is not active. Raises FeasibilityError when the active set
    violates the hard full-duplex role constraints.
    """
    active = set(active)
    flows = {f.id: f for f in scenario.flows}
    for fid in active | {flow_id}:
        if fid not in flows:
            raise FeasibilityError(f"unknown flow id {fid}")
    act = sorted(active)
    for i, a in enumerate(act):
        for b in act[i + 1 :]:
            fa, fb = flows[a], flows[b]
            if fa.tx == fb.tx or fa.rx == fb.rx:
                raise FeasibilityError(
                    f"flows {a} and {b} share a transmitter or receiver role"
                )
    if flow_id not in active:
        return 0.0

    stations = {b.id: b for b in scenario.stations}
    consts = scenario.constants
    pattern = AntennaPattern.from_beamwidth(consts.halfpower_beamwidth_deg)
    pos = {b.id: (b.x_m, b.y_m) for b in scenario.stations}
    f = flows[flow_id]
    n0w = noise_power(consts)

    signal = received_power(
        pos[f.tx], pos[f.rx], pos[f.rx], pos[f.tx], consts, pattern
    )
    denom = n0w
    for other_id in act:
        if other_id == flow_id:
            continue
        o = flows[other_id]
        if o.tx == f.rx:
            # The receiver of f transmits for o: residual self-interference.
            denom += stations[o.tx].si_cancel * n0w
        elif len({o.tx, o.rx, f.tx, f.rx}) == 4:
            denom += received_power(
                pos[o.tx], pos[o.rx], pos[f.rx], pos[f.tx],
                consts, pattern, is_interference=True,
            )
        # Other shared-node arrangements contribute nothing to f's rate.
    eta_w = consts.transceiver_efficiency * consts.bandwidth_hz
    return eta_w * math.log2(1.0 + signal / denom)


class LinkBudget:
    """Vectorized per-scenario power and rate kernel.

    Precomputes the full flow-pair power matrix and the per-pair
    denominator contributions once, then serves per-active-set rate
    vectors from a cache. Shared by the contention-graph builder, all
    schedulers, the engine and the metric recomputation so that every
    consumer sees bit-identical rates for a given active set.
    """

    def __init__(self, scenario: "Scenario"):
        consts = scenario.constants
        pattern = AntennaPattern.from_beamwidth(consts.halfpower_beamwidth_deg)
        flows = scenario.flows
        n_flows = len(flows)
        self.scenario = scenario
        self.pattern = pattern
        self.num_flows = n_flows
        self.noise_w = noise_power(consts)
        self.eta_w = consts.transceiver_efficiency * consts.bandwidth_hz
        self.rho = consts.mui_factor

        bs_index = {b.id: i for i, b in enumerate(scenario.stations)}
        pos = np.array([[b.x_m, b.y_m] for b in scenario.stations], dtype=float)
        beta = np.array([b.si_cancel for b in scenario.stations], dtype=float)
        self.tx_idx = np.array([bs_index[f.tx] for f in flows], dtype=int)
        self.rx_idx = np.array([bs_index[f.rx] for f in flows], dtype=int)
        self.qos = np.array([f.qos_bps for f in flows], dtype=float)
        self.beta_tx = beta[self.tx_idx] if n_flows else np.zeros(0)

        tx_pos = pos[self.tx_idx] if n_flows else np.zeros((0, 2))
        rx_pos = pos[self.rx_idx] if n_flows else np.zeros((0, 2))
        self.tx_pos = tx_pos
        self.rx_pos = rx_pos

        t = self.tx_idx
        r = self.rx_idx
        eye = np.eye(n_flows, dtype=bool)
        self.same_tx = (t[:, None] == t[None, :]) & ~eye
        self.same_rx = (r[:, None] == r[None, :]) & ~eye
        # rsi[l, f]: flow l transmits at the base station receiving flow f.
        self.rsi = (t[:, None] == r[None, :]) & ~eye
        shared = (
            self.same_tx
            | self.same_rx
            | self.rsi
            | self.rsi.T
        )
        self.shared_node = shared
        self.no_common = ~shared & ~eye
        self.same_role = self.same_tx | self.same_rx

        # Raw directional power from flow l's transmitter toward flow f's
        # receiver (diagonal: the flow's own signal). Entries where the two
        # points coincide (t_l == r_f) are masked; they are never consumed.
        if n_flows:
            vec = rx_pos[None, :, :] - tx_pos[:, None, :]
            dist = np.hypot(vec[..., 0], vec[..., 1])
            safe = np.where(self.rsi, 1.0, dist)
            bore_t = rx_pos[:, None, :] - tx_pos[:, None, :]  # l's boresight
            bore_r = tx_pos[None, :, :] - rx_pos[None, :, :]  # f's rx boresight
            theta_t = _angle_deg(bore_t, vec, safe)
            theta_r = _angle_deg(bore_r, -vec, safe)
            gains_t = _gain_linear(pattern, theta_t)
            gains_r = _gain_linear(pattern, theta_r)
            p_raw = (
                consts.pathloss_constant
                * consts.tx_power_w
                * gains_t
                * gains_r
                * safe ** (-consts.pathloss_exponent)
            )
            p_raw = np.where(self.rsi, 0.0, p_raw)
        else:
            p_raw = np.zeros((0, 0))
        self.p_raw = p_raw
        self.signal = np.ascontiguousarray(np.diagonal(p_raw)) if n_flows else np.zeros(0)

        # denom_contrib[l, f]: what active flow l adds to flow f's rate
        # denominator (before the thermal noise floor).
        contrib = np.zeros((n_flows, n_flows))
        if n_flows:
            contrib[self.rsi] = (self.beta_tx[:, None] * self.noise_w * np.ones(
                (n_flows, n_flows)
            ))[self.rsi]
            contrib[self.no_common] = (self.rho * p_raw)[self.no_common]
        self.denom_contrib = contrib
        self._contrib_t = np.ascontiguousarray(contrib.T)

        with np.errstate(divide="ignore"):
            self.solo_rates = self.eta_w * np.log2(1.0 + self.signal / self.noise_w)
        self._rate_cache: dict[bytes, np.ndarray] = {}

    def rates_for(self, active: np.ndarray) -> np.ndarray:
        """Per-flow instantaneous rates (bits/s) under the given boolean
        active mask; zero for inactive flows. Cached per mask."""
        key = active.tobytes()
        hit = self._rate_cache.get(key)
        if hit is not None:
            return hit
        den = self.noise_w + self._contrib_t @ active.astype(float)
        with np.errstate(divide="ignore"):
            rates = np.where(
                active, self.eta_w * np.log2(1.0 + self.signal / den), 0.0
            )
        rates.setflags(write=False)
        self._rate_cache[key] = rates
        return rates

    def is_feasible(self, active: np.ndarray) -> bool:
        """True when no two active flows share a transmitter or receiver
        role (the hard full-duplex constraints)."""
        idx = np.flatnonzero(active)
        if len(idx) < 2:
            return True
        return not self.same_role[np.ix_(idx, idx)].any()


def _angle_deg(bore: np.ndarray, vec: np.ndarray, safe_norm: np.ndarray) -> np.ndarray:
    """Offset angle (degrees) between boresight vectors and target vectors."""
    bore_norm = np.hypot(bore[..., 0], bore[..., 1])
    dot = bore[..., 0] * vec[..., 0] + bore[..., 1] * vec[..., 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_t = dot / (bore_norm * safe_norm)
    cos_t = np.clip(np.nan_to_num(cos_t, nan=1.0), -1.0, 1.0)
    return np.degrees(np.arccos(cos_t))


def _gain_linear(pattern: AntennaPattern, theta_deg: np.ndarray) -> np.ndarray:
    """Vectorized piecewise antenna gain, linear scale."""
    main = pattern.g0_db - 3.01 * (2.0 * theta_deg / pattern.halfpower_beamwidth_deg) ** 2
    g_db = np.where(theta_deg <= pattern.mainlobe_width_deg / 2.0, main, pattern.sidelobe_gain_db)
    return 10.0 ** (g_db / 10.0)


@lru_cache(maxsize=4)
def link_budget(scenario: "Scenario") -> LinkBudget:
    """Cached LinkBudget for a scenario (scenarios are immutable)."""
    return LinkBudget(scenario)
