"""Pair classification, relative interference and contention graphs."""
import dataclasses

import numpy as np
import pytest

from conftest import make_scenario, random_scenario
from fdbackhaul.contention import (
    ContentionGraph,
    EdgeCause,
    PairKind,
    build_graph,
    classify_pair,
    hd_graph,
    relative_interference,
)
from fdbackhaul.errors import FeasibilityError
from fdbackhaul.phy import AntennaPattern, noise_power, received_power
from fdbackhaul.scenario import Flow


def _flow(i, tx, rx):
    return Flow(id=i, tx=tx, rx=rx, qos_bps=1e9)


class TestClassifyPair:
    def test_same_tx(self):
        assert classify_pair(_flow(0, 1, 2), _flow(1, 1, 3)) == PairKind.SAME_TX

    def test_same_rx(self):
        assert classify_pair(_flow(0, 1, 3), _flow(1, 2, 3)) == PairKind.SAME_RX

    def test_mutual_rsi(self):
        assert classify_pair(_flow(0, 1, 2), _flow(1, 2, 1)) == PairKind.RSI_BOTH_WAYS

    def test_one_way_rsi_both_orientations(self):
        # f transmits at l's receiving station, and the mirror case.
        assert classify_pair(_flow(0, 1, 2), _flow(1, 3, 1)) == PairKind.RSI_ONE_WAY
        assert classify_pair(_flow(0, 1, 2), _flow(1, 2, 3)) == PairKind.RSI_ONE_WAY

    def test_no_common_node(self):
        assert classify_pair(_flow(0, 1, 2), _flow(1, 3, 4)) == PairKind.NO_COMMON_NODE

    def test_duplicate_flows_are_role_conflict(self):
        assert classify_pair(_flow(0, 1, 2), _flow(1, 1, 2)) == PairKind.SAME_TX

    def test_symmetric(self):
        cases = [
            (_flow(0, 1, 2), _flow(1, 1, 3)),
            (_flow(0, 1, 2), _flow(1, 2, 1)),
            (_flow(0, 1, 2), _flow(1, 3, 1)),
            (_flow(0, 1, 2), _flow(1, 3, 4)),
        ]
        for f, l in cases:
            assert classify_pair(f, l) == classify_pair(l, f)


class TestRelativeInterference:
    def test_role_conflict_rejected(self):
        sc = make_scenario([(0, 0), (30, 0), (0, 40)], [(0, 1, 1e9), (0, 2, 1e9)])
        with pytest.raises(FeasibilityError):
            relative_interference(sc.flows[0], sc.flows[1], PairKind.SAME_TX, sc)

    def test_zero_beta_rsi_limit(self):
        # With beta = 0 at f's transmitter, RI_{f,l} = N0 W / P_r(t_l, r_l).
        sc = make_scenario(
            [(0, 0), (30, 0), (0, 55)],
            [(1, 2, 1e9), (0, 1, 1e9)],  # f: B->C, l: A->B, so t_f == r_l
            betas=[3.0, 0.0, 3.0],
        )
        f, l = sc.flows
        assert classify_pair(f, l) == PairKind.RSI_ONE_WAY
        ri_fl, ri_lf = relative_interference(f, l, PairKind.RSI_ONE_WAY, sc)
        pattern = AntennaPattern.from_beamwidth(30.0)
        pos = {b.id: (b.x_m, b.y_m) for b in sc.stations}
        p_l = received_power(pos[0], pos[1], pos[1], pos[0], sc.constants, pattern)
        assert ri_fl == pytest.approx(noise_power(sc.constants) / p_l, rel=1e-12)
        # Reverse direction is MUI into f's receiver.
        p_f = received_power(pos[1], pos[2], pos[2], pos[1], sc.constants, pattern)
        p_int = received_power(
            pos[0], pos[1], pos[2], pos[1], sc.constants, pattern, is_interference=True
        )
        expected = (noise_power(sc.constants) + p_int) / p_f
        assert ri_lf == pytest.approx(expected, rel=1e-12)

    def test_square_symmetry_and_value(self, square_scenario):
        f, l = square_scenario.flows
        kind = classify_pair(f, l)
        assert kind == PairKind.NO_COMMON_NODE
        ri_fl, ri_lf = relative_interference(f, l, kind, square_scenario)
        # Congruent parallel links: both directions identical; frozen from a
        # hand evaluation (sidelobe gains at 45 deg, distance 50*sqrt(2)).
        assert ri_fl == pytest.approx(ri_lf, rel=1e-12)
        assert ri_fl == pytest.approx(1.8197318060685996e-06, rel=1e-9)


class TestBuildGraph:
    def test_huge_sigma_keeps_only_role_edges(self):
        sc = dataclasses.replace(random_scenario(11), contention_threshold=1e30)
        g = build_graph(sc)
        for (i, j), cause in g.causes.items():
            assert cause == EdgeCause.ROLE_CONFLICT
            kind = classify_pair(sc.flows[i], sc.flows[j])
            assert kind in (PairKind.SAME_TX, PairKind.SAME_RX)

    def test_tiny_sigma_connects_everything(self):
        # RI >= N0W / signal > 0 for every eligible pair, so sigma -> 0+
        # puts an edge on every pair.
        sc = dataclasses.replace(random_scenario(12), contention_threshold=1e-300)
        g = build_graph(sc)
        n = g.num_flows
        expected = n * (n - 1) // 2
        assert len(g.causes) == expected

    def test_edges_match_pairwise_ri(self):
        for seed in range(6):
            sc = random_scenario(seed)
            g = build_graph(sc)
            for i in range(len(sc.flows)):
                for j in range(i + 1, len(sc.flows)):
                    kind = classify_pair(sc.flows[i], sc.flows[j])
                    if kind in (PairKind.SAME_TX, PairKind.SAME_RX):
                        assert g.has_edge(i, j)
                        assert g.causes[(i, j)] == EdgeCause.ROLE_CONFLICT
                    else:
                        ri = relative_interference(sc.flows[i], sc.flows[j], kind, sc)
                        assert g.has_edge(i, j) == (max(ri) > sc.contention_threshold)

    def test_sigma_monotonicity(self):
        base = random_scenario(21)
        sigmas = [1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]
        edges = []
        for s in sigmas:
            g = build_graph(dataclasses.replace(base, contention_threshold=s))
            edges.append(set(g.causes))
        for larger, smaller in zip(edges, edges[1:]):
            assert smaller <= larger

    def test_relabeling_invariance(self):
        sc = random_scenario(5)
        n = len(sc.flows)
        rng = np.random.default_rng(0)
        perm = rng.permutation(n)
        permuted = dataclasses.replace(
            sc,
            flows=tuple(
                dataclasses.replace(sc.flows[perm[i]], id=i) for i in range(n)
            ),
        )
        g = build_graph(sc)
        gp = build_graph(permuted)
        for i in range(n):
            for j in range(n):
                assert gp.adjacency[i, j] == g.adjacency[perm[i], perm[j]]

    def test_fig6_shape_representable(self):
        adjacency = np.zeros((4, 4), dtype=bool)
        for i, j in [(0, 1), (0, 3)]:
            adjacency[i, j] = adjacency[j, i] = True
        g = ContentionGraph(
            num_flows=4,
            adjacency=adjacency,
            causes={(0, 1): EdgeCause.RI_EXCEEDED, (0, 3): EdgeCause.RI_EXCEEDED},
        )
        assert g.has_edge(0, 1) and g.has_edge(1, 0)
        assert g.has_edge(0, 3)
        assert not g.has_edge(0, 2)
        assert not g.has_edge(1, 3)
        assert g.degree(0) == 2 and g.degree(2) == 0
        assert g.edge_list() == [(0, 1, "ri-exceeded"), (0, 3, "ri-exceeded")]


class TestHdGraph:
    def test_shared_node_always_conflicts(self):
        # A->B and B->C share station B: HD edge, FD edge only if RI binds.
        sc = make_scenario(
            [(0, 0), (30, 0), (0, 30)],
            [(0, 1, 1e9), (1, 2, 1e9)],
            sigma=1e-3,
        )
        assert hd_graph(sc).has_edge(0, 1)
        assert not build_graph(sc).has_edge(0, 1)

    def test_far_disjoint_flows_no_edges(self):
        sc = make_scenario(
            [(0, 0), (10, 0), (5000, 5000), (5010, 5000)],
            [(0, 1, 1e9), (2, 3, 1e9)],
            sigma=1e-1,
        )
        assert len(build_graph(sc).causes) == 0
        assert len(hd_graph(sc).causes) == 0

    def test_hd_superset_of_fd(self):
        for seed in range(8):
            sc = random_scenario(seed)
            fd_edges = set(build_graph(sc).causes)
            hd_edges = set(hd_graph(sc).causes)
            assert fd_edges <= hd_edges
