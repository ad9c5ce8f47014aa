"""Every-zero graphic groups and the machinery built on their index law:
the two-index (s, k) family, the graphic-to-matrix-to-string compound
pipeline, group-valued host colorings, incremental network encryption, and
bounded-depth graph-valued strings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graphs import ColoredGraph, Edge, Graph, _norm_edge
from .strings import DigitString
from .topcode import PermIndex, TopcodeMatrix, string_from_topcode, topcode_from_graph


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GraphicGroup:
    """Shift family over a base total coloring: element (s, k) adds s to every
    vertex color mod p_window and k to every edge color mod q_window."""

    base: ColoredGraph
    p_window: int
    q_window: int

    def __post_init__(self) -> None:
        if self.p_window < 1 or self.q_window < 1:
            raise GroupError("window moduli must be positive")
        if not self.base.vcolors or self.base.ecolors is None:
            raise GroupError("graphic group needs a total coloring")
        for v in self.base.graph.vertices:
            if not 0 <= self.base.vcolor(v) < self.p_window:
                raise GroupError(f"base vertex color {self.base.vcolor(v)} outside mod {self.p_window}")
        for u, v in self.base.graph.edges:
            if not 0 <= self.base.ecolor(u, v) < self.q_window:
                raise GroupError(f"base edge color outside mod {self.q_window}")

    def element(self, s: int, k: int) -> ColoredGraph:
        vcolors = {v: (self.base.vcolor(v) + s) % self.p_window for v in self.base.graph.vertices}
        ecolors = {e: (self.base.ecolors[e] + k) % self.q_window for e in self.base.graph.edges}
        return ColoredGraph(self.base.graph, vcolors, ecolors)

    def distinct_elements(self) -> int:
        seen = set()
        for s in range(self.p_window):
            for k in range(self.q_window):
                e = self.element(s, k)
                seen.add(
                    (
                        tuple(sorted(e.vcolors.items())),
                        tuple(sorted(e.ecolors.items())),
                    )
                )
        return len(seen)


def build_graphic_group(
    base: ColoredGraph, window: tuple[int, int] | int | None = None
) -> GraphicGroup:
    """Build the family; a single int m is the one-index convention (s = k),
    None uses the odd-graceful default p = q = 2|E|."""
    if window is None:
        m = 2 * base.graph.q
        return GraphicGroup(base, m, m)
    if isinstance(window, int):
        return GraphicGroup(base, window, window)
    p_w, q_w = window
    return GraphicGroup(base, p_w, q_w)


def graphic_group_op(
    group: GraphicGroup,
    a: tuple[int, int],
    b: tuple[int, int],
    zero: tuple[int, int],
) -> tuple[int, int]:
    """(s,k) (+) (i,j) (-) zero, with indices mod the two windows.

    Also confirms the element-wise color arithmetic lands on the element at
    the returned index."""
    for s, k in (a, b, zero):
        if not (0 <= s < group.p_window and 0 <= k < group.q_window):
            raise GroupError(f"index ({s},{k}) outside the window")
    lam = (a[0] + b[0] - zero[0]) % group.p_window
    mu = (a[1] + b[1] - zero[1]) % group.q_window
    ea, eb, ez = group.element(*a), group.element(*b), group.element(*zero)
    target = group.element(lam, mu)
    for v in group.base.graph.vertices:
        got = (ea.vcolor(v) + eb.vcolor(v) - ez.vcolor(v)) % group.p_window
        if got != target.vcolor(v):
            raise GroupError(f"vertex law fails at {v}")
    for e in group.base.graph.edges:
        got = (ea.ecolors[e] + eb.ecolors[e] - ez.ecolors[e]) % group.q_window
        if got != target.ecolors[e]:
            raise GroupError(f"edge law fails at {e}")
    return lam, mu


# ---------------------------------------------------------------------------
# GROUP-compound: graphic group -> Topcode-matrix group -> string group.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompoundStringGroup:
    """Strings derived from a one-index graphic group under a fixed reading
    permutation; element indices obey the i+j-zero law digit-wise mod the
    group order."""

    strings: tuple[DigitString, ...]
    order: int
    modulus: int

    def op(self, i: int, j: int, zero: int) -> int:
        lam = (i + j - zero) % self.order
        a, b, z = self.strings[i], self.strings[j], self.strings[zero]
        for pos in range(len(a)):
            got = (a.digits[pos] + b.digits[pos] - z.digits[pos]) % self.modulus
            if got != self.strings[lam].digits[pos]:
                raise GroupError(f"digit law fails at position {pos}")
        return lam


def group_compound(
    base: ColoredGraph, m: int, perm: PermIndex | None = None
) -> tuple[GraphicGroup, list[TopcodeMatrix], CompoundStringGroup]:
    """The one-index pipeline: m shifted colorings, their matrices, and the
    derived every-zero string group under the reading permutation."""
    if m < 2:
        raise GroupError("group order must be >= 2")
    if m > 10:
        raise GroupError("digit strings support group orders up to 10")
    colors = list(base.vcolors.values()) + list(base.ecolors.values())
    if any(not isinstance(c, int) for c in colors):
        raise GroupError("compound pipeline needs numeric colorings")
    if max(colors) >= m:
        raise GroupError(f"base colors must stay below the group order {m}")
    group = build_graphic_group(base, m)
    matrices = [
        topcode_from_graph(group.element(t, t)) for t in range(m)
    ]
    strings = tuple(string_from_topcode(t, perm) for t in matrices)
    return group, matrices, CompoundStringGroup(strings, m, m)


# ---------------------------------------------------------------------------
# Group-valued host colorings.
# ---------------------------------------------------------------------------


@dataclass
class GroupColoring:
    """Host graph elements carrying group element indices; every edge holds
    index(uv) = index(u) + index(v) - zero (mod order)."""

    host: Graph
    order: int
    zero: int
    vertex_index: dict[int, int]
    edge_index: dict[Edge, int] = field(default_factory=dict)

    def derive_edges(self) -> None:
        for u, v in self.host.edges:
            self.edge_index[(u, v)] = (
                self.vertex_index[u] + self.vertex_index[v] - self.zero
            ) % self.order

    def law_holds(self) -> bool:
        return all(
            self.edge_index.get((u, v))
            == (self.vertex_index[u] + self.vertex_index[v] - self.zero) % self.order
            for u, v in self.host.edges
        )


def color_host_by_group(
    host: Graph,
    order: int,
    zero: int,
    vertex_assignment: Mapping[int, int] | None = None,
    proper: bool = False,
) -> GroupColoring:
    """Assign group indices to host vertices and derive the edge indices.

    Proper mode needs order >= max degree + 1 and finds, by backtracking, an
    assignment where adjacent vertex indices differ and adjacent edge
    indices differ (the derived-index analogue of proper vertex plus proper
    edge coloring; an incident vertex-edge clause would be unsatisfiable at
    order exactly max degree + 1 on stars)."""
    if not 0 <= zero < order:
        raise GroupError("zero index outside the group")
    if vertex_assignment is not None:
        vi = dict(vertex_assignment)
        missing = set(host.vertices) - set(vi)
        if missing:
            raise GroupError(f"assignment missing vertices {sorted(missing)}")
        gc = GroupColoring(host, order, zero, vi)
        gc.derive_edges()
        return gc
    if proper and order < host.max_degree() + 1:
        raise GroupError(
            f"proper mode needs group order >= {host.max_degree() + 1}, got {order}"
        )

    verts = sorted(host.vertices, key=lambda v: (-host.degree(v), v))
    assignment: dict[int, int] = {}

    def edge_of(u: int, v: int) -> int:
        return (assignment[u] + assignment[v] - zero) % order

    def ok(v: int) -> bool:
        if not proper:
            return True
        for w in host.neighbors(v):
            if w not in assignment:
                continue
            if assignment[w] == assignment[v]:
                return False
            e = edge_of(v, w)
            for x in (v, w):
                for y in host.neighbors(x):
                    if y in assignment and _norm_edge(x, y) != _norm_edge(v, w):
                        if edge_of(x, y) == e:
                            return False
        return True

    def place(i: int) -> bool:
        if i == len(verts):
            return True
        v = verts[i]
        for idx in range(order):
            assignment[v] = idx
            if ok(v) and place(i + 1):
                return True
            del assignment[v]
        return False

    if not place(0):
        raise GroupError("no proper group coloring within the order")
    gc = GroupColoring(host, order, zero, assignment)
    gc.derive_edges()
    return gc


# ---------------------------------------------------------------------------
# MULTIPLE-JOIN: growing a network under an infinite two-index family.
# ---------------------------------------------------------------------------

Pair = tuple[int, int]


@dataclass
class JoinStep:
    vertex: int
    attach: tuple[int, ...]
    zero: Pair
    index: Pair


@dataclass
class MultipleJoinNetwork:
    """A network whose vertices and edges carry two-index group elements.

    Every growth step picks a fresh seeded random index for the new vertex;
    each new edge u-x gets (s_u + s_x - s_zero, k_u + k_x - k_zero) under
    that step's zero.  The transcript replays bit for bit."""

    seed: int
    index_bound: int = 1000
    vertices: dict[int, Pair] = field(default_factory=dict)
    edges: dict[Edge, Pair] = field(default_factory=dict)
    steps: list[JoinStep] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._rng = random.Random(self.seed)

    def start(self, vertex: int, zero: Pair) -> None:
        if self.vertices:
            raise GroupError("network already started")
        idx = self._fresh_index()
        self.vertices[vertex] = idx
        self.steps.append(JoinStep(vertex, (), zero, idx))

    def _fresh_index(self) -> Pair:
        return (self._rng.randrange(self.index_bound), self._rng.randrange(self.index_bound))

    def add_vertex(self, vertex: int, attach: Sequence[int], zero: Pair) -> None:
        if vertex in self.vertices:
            raise GroupError(f"vertex {vertex} already present")
        if not attach:
            raise GroupError("attach set must be nonempty")
        missing = [x for x in attach if x not in self.vertices]
        if missing:
            raise GroupError(f"attach vertices missing: {missing}")
        idx = self._fresh_index()
        self.vertices[vertex] = idx
        for x in attach:
            sx, kx = self.vertices[x]
            self.edges[_norm_edge(vertex, x)] = (idx[0] + sx - zero[0], idx[1] + kx - zero[1])
        self.steps.append(JoinStep(vertex, tuple(attach), zero, idx))

    def edge_law_holds(self) -> bool:
        by_vertex = dict(self.vertices)
        for step in self.steps:
            for x in step.attach:
                e = _norm_edge(step.vertex, x)
                su, ku = by_vertex[step.vertex]
                sx, kx = by_vertex[x]
                expect = (su + sx - step.zero[0], ku + kx - step.zero[1])
                if self.edges[e] != expect:
                    return False
        return True

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "index_bound": self.index_bound,
                "steps": [
                    {
                        "vertex": s.vertex,
                        "attach": list(s.attach),
                        "zero": list(s.zero),
                        "index": list(s.index),
                    }
                    for s in self.steps
                ],
            }
        )


def replay_join_transcript(blob: str) -> MultipleJoinNetwork:
    """Re-run a transcript from its seed; indices must reproduce exactly."""
    data = json.loads(blob)
    net = MultipleJoinNetwork(seed=data["seed"], index_bound=data["index_bound"])
    for i, step in enumerate(data["steps"]):
        zero = tuple(step["zero"])
        if i == 0:
            net.start(step["vertex"], zero)
        else:
            net.add_vertex(step["vertex"], step["attach"], zero)
        if tuple(step["index"]) != net.steps[-1].index:
            raise GroupError(f"replay diverged at step {i}")
    return net


# ---------------------------------------------------------------------------
# Graph-valued strings (two levels).
# ---------------------------------------------------------------------------


def graph_based_string(
    host: Graph,
    graph_values: Mapping[int, ColoredGraph],
    level1_perm: Sequence[int] | None = None,
    leaf_perms: Mapping[int, PermIndex] | None = None,
) -> DigitString:
    """Expand a graph-valued vertex coloring of the host into digits.

    The level-1 order is the sorted host vertices (optionally permuted);
    each vertex's graph expands to its Topcode string under its own
    permutation.  Leaf graphs must carry numeric colorings (depth 2 only).
    """
    missing = set(host.vertices) - set(graph_values)
    if missing:
        raise GroupError(f"graph values missing for vertices {sorted(missing)}")
    order = sorted(graph_values)
    if level1_perm is not None:
        if sorted(level1_perm) != list(range(len(order))):
            raise GroupError("level-1 permutation invalid")
        order = [order[i] for i in level1_perm]
    pieces: list[str] = []
    for v in order:
        leaf = graph_values[v]
        colors = list(leaf.vcolors.values()) + list((leaf.ecolors or {}).values())
        if any(not isinstance(c, int) for c in colors):
            raise GroupError("leaf colorings deeper than numbers: depth > 2 requested")
        perm = leaf_perms.get(v) if leaf_perms else None
        pieces.append(str(string_from_topcode(topcode_from_graph(leaf), perm)))
    return DigitString.parse("".join(pieces))


def multiple_join_step(
    net: MultipleJoinNetwork, vertex: int, attach: Sequence[int], zero: Pair
) -> MultipleJoinNetwork:
    """Functional form of one growth step; mutates and returns the network."""
    net.add_vertex(vertex, attach, zero)
    return net
