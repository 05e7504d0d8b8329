"""Flow-pair classification, relative interference, and contention graphs.

A pair of flows is in contention when they may not transmit in the same
slot: either they need the same antenna role at a shared base station, or
the relative interference between them exceeds the scenario threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import FeasibilityError
from .phy import link_budget
from .scenario import Flow, Scenario

__all__ = [
    "PairKind",
    "EdgeCause",
    "ContentionGraph",
    "classify_pair",
    "relative_interference",
    "build_graph",
    "hd_graph",
]


class PairKind(Enum):
    SAME_TX = "same-tx"
    SAME_RX = "same-rx"
    RSI_ONE_WAY = "rsi-one-way"
    RSI_BOTH_WAYS = "rsi-both-ways"
    NO_COMMON_NODE = "no-common-node"


class EdgeCause(Enum):
    ROLE_CONFLICT = "role-conflict"
    RI_EXCEEDED = "ri-exceeded"


@dataclass(eq=False)
class ContentionGraph:
    """Symmetric conflict graph over flow indices with per-edge causes."""

    num_flows: int
    adjacency: np.ndarray
    causes: dict[tuple[int, int], EdgeCause] = field(default_factory=dict)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def degree(self, i: int) -> int:
        return int(self.adjacency[i].sum())

    def edge_list(self) -> list[tuple[int, int, str]]:
        """Sorted (i, j, cause) dump for debugging and golden tests."""
        return [
            (i, j, self.causes[(i, j)].value)
            for (i, j) in sorted(self.causes)
        ]


def classify_pair(f: Flow, l: Flow) -> PairKind:
    """Classify an unordered pair of distinct flows.

    Role conflicts (shared transmitter or shared receiver) take
    precedence over the self-interference cases.
    """
    if f.tx == l.tx:
        return PairKind.SAME_TX
    if f.rx == l.rx:
        return PairKind.SAME_RX
    f_feeds_l = f.tx == l.rx
    l_feeds_f = l.tx == f.rx
    if f_feeds_l and l_feeds_f:
        return PairKind.RSI_BOTH_WAYS
    if f_feeds_l or l_feeds_f:
        return PairKind.RSI_ONE_WAY
    return PairKind.NO_COMMON_NODE


def relative_interference(
    f: Flow, l: Flow, kind: PairKind, scenario: Scenario
) -> tuple[float, float]:
    """Relative interference (RI_f_to_l, RI_l_to_f) for a concurrently
    schedulable pair.

    When the interferer's transmitter is the victim's receiving station
    the coupling is residual self-interference; otherwise it is MUI from
    the interferer's transmitter into the victim's receiver. Both are
    normalized by the victim's own received signal power. Raises
    FeasibilityError for role-conflict pairs, whose RI is undefined.
    """
    if kind in (PairKind.SAME_TX, PairKind.SAME_RX):
        raise FeasibilityError("relative interference undefined for role-conflict pairs")
    lb = link_budget(scenario)
    index = {fl.id: i for i, fl in enumerate(scenario.flows)}
    fi, li = index[f.id], index[l.id]
    ri = _ri_matrix(lb)
    return float(ri[fi, li]), float(ri[li, fi])


def _ri_matrix(lb) -> np.ndarray:
    """RI[x, y]: relative interference caused by flow x at flow y.

    Valid wherever x and y are not a role-conflict pair; other entries
    are computed but ignored by the graph builders.
    """
    n = lb.noise_w
    if lb.num_flows == 0:
        return np.zeros((0, 0))
    rsi_numer = n + lb.beta_tx[:, None] * n * np.ones((lb.num_flows, lb.num_flows))
    mui_numer = n + lb.rho * lb.p_raw
    numer = np.where(lb.rsi, rsi_numer, mui_numer)
    return numer / lb.signal[None, :]


def _graph_from_masks(
    lb, role_mask: np.ndarray, ri_eligible: np.ndarray, sigma: float
) -> ContentionGraph:
    n = lb.num_flows
    if n == 0:
        return ContentionGraph(num_flows=0, adjacency=np.zeros((0, 0), dtype=bool))
    ri = _ri_matrix(lb)
    ri_pairwise = np.maximum(ri, ri.T)
    ri_edges = ri_eligible & (ri_pairwise > sigma)
    adjacency = role_mask | ri_edges
    causes: dict[tuple[int, int], EdgeCause] = {}
    for i, j in zip(*np.nonzero(np.triu(adjacency, k=1))):
        causes[(int(i), int(j))] = (
            EdgeCause.ROLE_CONFLICT if role_mask[i, j] else EdgeCause.RI_EXCEEDED
        )
    return ContentionGraph(num_flows=n, adjacency=adjacency, causes=causes)


def build_graph(scenario: Scenario) -> ContentionGraph:
    """Full-duplex contention graph.

    Edges join pairs that share an antenna role, and pairs whose mutual
    relative interference (in either direction, RSI or MUI as the pair
    geometry dictates) strictly exceeds the contention threshold.
    """
    lb = link_budget(scenario)
    role = lb.same_role
    eligible = ~role & ~np.eye(lb.num_flows, dtype=bool)
    return _graph_from_masks(lb, role, eligible, scenario.contention_threshold)


def hd_graph(scenario: Scenario) -> ContentionGraph:
    """Half-duplex contention graph: any shared base station is a role
    conflict; only no-common-node pairs are tested against the threshold
    (MUI in both directions)."""
    lb = link_budget(scenario)
    return _graph_from_masks(
        lb, lb.shared_node, lb.no_common, scenario.contention_threshold
    )
