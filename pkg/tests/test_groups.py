import itertools

import pytest

from topocode.graphs import ColoredGraph, Graph
from topocode.groups import (
    GroupError,
    MultipleJoinNetwork,
    build_graphic_group,
    color_host_by_group,
    graph_based_string,
    graphic_group_op,
    group_compound,
    replay_join_transcript,
)
from topocode.topcode import PermIndex


def p3_graceful():
    g = Graph.path(3)
    return ColoredGraph(g, {1: 0, 2: 2, 3: 1}, {(1, 2): 2, (2, 3): 1})


def p3_odd_graceful():
    g = Graph.path(3)
    return ColoredGraph(g, {1: 0, 2: 3, 3: 2}, {(1, 2): 3, (2, 3): 1})


class TestGraphicGroup:
    def test_zero_element_is_base(self):
        group = build_graphic_group(p3_odd_graceful(), (10, 10))
        e = group.element(0, 0)
        assert e.vcolors == p3_odd_graceful().vcolors
        assert e.ecolors == p3_odd_graceful().ecolors

    def test_default_window_is_2q(self):
        group = build_graphic_group(p3_odd_graceful())
        assert group.p_window == group.q_window == 4

    def test_shift_by_one(self):
        group = build_graphic_group(p3_odd_graceful(), (10, 10))
        e = group.element(1, 0)
        assert [e.vcolor(v) for v in (1, 2, 3)] == [1, 4, 3]
        assert e.ecolors == p3_odd_graceful().ecolors

    def test_order_when_injective(self):
        group = build_graphic_group(p3_odd_graceful(), (4, 4))
        assert group.distinct_elements() == 16

    def test_op_index_arithmetic(self):
        group = build_graphic_group(p3_odd_graceful(), (4, 4))
        assert graphic_group_op(group, (1, 2), (2, 1), (1, 1)) == (2, 2)

    def test_zero_law(self):
        group = build_graphic_group(p3_odd_graceful(), (4, 4))
        for a in itertools.product(range(4), repeat=2):
            for z in itertools.product(range(4), repeat=2):
                assert graphic_group_op(group, a, z, z) == a

    def test_full_table_laws(self):
        group = build_graphic_group(p3_odd_graceful(), (4, 4))
        idx = list(itertools.product(range(4), repeat=2))
        for a in idx:
            for b in idx:
                for z in idx:
                    lam = graphic_group_op(group, a, b, z)
                    assert lam == graphic_group_op(group, b, a, z)
                    # associativity under the fixed zero
                    for c in idx:
                        left = graphic_group_op(group, graphic_group_op(group, a, b, z), c, z)
                        right = graphic_group_op(group, a, graphic_group_op(group, b, c, z), z)
                        assert left == right

    def test_base_color_bound(self):
        with pytest.raises(GroupError):
            build_graphic_group(p3_odd_graceful(), (2, 2))


class TestGroupCompound:
    def test_p3_m4(self):
        group, matrices, strings = group_compound(p3_graceful(), 4)
        assert len(matrices) == 4
        assert strings.order == 4
        for i in range(4):
            for j in range(4):
                for z in range(4):
                    assert strings.op(i, j, z) == (i + j - z) % 4

    def test_m2_degenerate(self):
        base = ColoredGraph(Graph.path(2), {1: 0, 2: 1}, {(1, 2): 1})
        group, matrices, strings = group_compound(base, 2)
        assert strings.op(0, 1, 1) == 0
        assert strings.op(1, 1, 0) == 0

    def test_perm_changes_strings_not_law(self):
        _, _, row_major = group_compound(p3_graceful(), 4)
        col = PermIndex.column_major(2)
        _, _, col_major = group_compound(p3_graceful(), 4, col)
        assert row_major.strings != col_major.strings
        for i in range(4):
            for j in range(4):
                for z in range(4):
                    assert col_major.op(i, j, z) == row_major.op(i, j, z)

    def test_rejects_large_colors(self):
        with pytest.raises(GroupError):
            group_compound(p3_graceful(), 2)


class TestHostColoring:
    def _identity_group_order(self, n):
        return n

    def test_k3_explicit(self):
        gc = color_host_by_group(Graph.cycle(3), order=6, zero=0,
                                 vertex_assignment={1: 1, 2: 2, 3: 3})
        assert gc.edge_index[(1, 2)] == 3
        assert gc.edge_index[(1, 3)] == 4
        assert gc.edge_index[(2, 3)] == 5
        assert gc.law_holds()

    def test_star_proper(self):
        star = Graph.star(5, center=0)
        gc = color_host_by_group(star, order=6, zero=0, proper=True)
        center = gc.vertex_index[0]
        for leaf in range(1, 6):
            assert gc.vertex_index[leaf] != center
        assert gc.law_holds()

    def test_order_too_small(self):
        star = Graph.star(5, center=0)
        with pytest.raises(GroupError):
            color_host_by_group(star, order=5, zero=0, proper=True)


class TestMultipleJoin:
    def test_single_edge_growth(self):
        net = MultipleJoinNetwork(seed=1)
        net.start(0, (0, 0))
        net.add_vertex(1, [0], (2, 3))
        assert len(net.edges) == 1
        su, ku = net.vertices[1]
        sx, kx = net.vertices[0]
        assert net.edges[(0, 1)] == (su + sx - 2, ku + kx - 3)

    def test_ba_style_growth(self):
        net = MultipleJoinNetwork(seed=7)
        net.start(0, (0, 0))
        net.add_vertex(1, [0], (1, 1))
        for t in range(2, 12):
            attach = [t - 1, t - 2]
            net.add_vertex(t, attach, (t, t))
        assert len(net.edges) == 1 + 10 * 2
        assert net.edge_law_holds()

    def test_replay_reproduces(self):
        net = MultipleJoinNetwork(seed=42)
        net.start(0, (0, 0))
        net.add_vertex(1, [0], (5, 5))
        net.add_vertex(2, [0, 1], (1, 2))
        replayed = replay_join_transcript(net.to_json())
        assert replayed.vertices == net.vertices
        assert replayed.edges == net.edges

    def test_zero_only_affects_its_step(self):
        a = MultipleJoinNetwork(seed=3)
        a.start(0, (0, 0))
        a.add_vertex(1, [0], (1, 1))
        a.add_vertex(2, [1], (2, 2))
        b = MultipleJoinNetwork(seed=3)
        b.start(0, (0, 0))
        b.add_vertex(1, [0], (1, 1))
        b.add_vertex(2, [1], (9, 9))
        assert a.edges[(0, 1)] == b.edges[(0, 1)]
        assert a.edges[(1, 2)] != b.edges[(1, 2)]

    def test_missing_attach_vertex(self):
        net = MultipleJoinNetwork(seed=1)
        net.start(0, (0, 0))
        with pytest.raises(GroupError):
            net.add_vertex(1, [5], (0, 0))


class TestGraphBasedString:
    def leaf(self, a, b, e):
        return ColoredGraph(Graph.path(2), {1: a, 2: b}, {(1, 2): e})

    def test_k2_host(self):
        host = Graph.path(2)
        values = {1: self.leaf(1, 2, 1), 2: self.leaf(3, 4, 1)}
        s = graph_based_string(host, values)
        assert str(s) == "112" + "314"

    def test_p3_host_lengths(self):
        host = Graph.path(3)
        two_edge = ColoredGraph(
            Graph.path(3), {1: 0, 2: 2, 3: 1}, {(1, 2): 2, (2, 3): 1}
        )
        values = {v: two_edge for v in host.vertices}
        s = graph_based_string(host, values)
        assert len(s) == 3 * 6

    def test_level1_perm_permutes_blocks(self):
        host = Graph.path(2)
        values = {1: self.leaf(1, 2, 1), 2: self.leaf(3, 4, 1)}
        forward = str(graph_based_string(host, values))
        swapped = str(graph_based_string(host, values, level1_perm=[1, 0]))
        assert swapped == forward[3:] + forward[:3]

    def test_depth_guard(self):
        host = Graph.path(2)
        deep = ColoredGraph(Graph.path(2), {1: (1, 2), 2: (3, 4)}, {(1, 2): (1, 1)})
        with pytest.raises(GroupError):
            graph_based_string(host, {1: deep, 2: deep})
