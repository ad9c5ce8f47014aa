"""Simple undirected graphs and the structural operations used by the
labeling and key-pair machinery: vertex splitting and coinciding, edge
join and add/subtract, complete-graph spanning-tree splits, spanning-tree
counting, and small-scale colored graph homomorphism checks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int]


class GraphError(ValueError):
    pass


def _norm_edge(u: int, v: int) -> Edge:
    if u == v:
        raise GraphError(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on integer vertex identifiers."""

    vertices: tuple[int, ...]
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise GraphError("duplicate vertex identifiers")
        for u, v in self.edges:
            if u >= v:
                raise GraphError(f"edge {(u, v)} not normalized")
            if u not in vset or v not in vset:
                raise GraphError(f"edge {(u, v)} references a missing vertex")

    @staticmethod
    def build(vertices: Iterable[int], edges: Iterable[Sequence[int]]) -> "Graph":
        norm = frozenset(_norm_edge(u, v) for u, v in edges)
        return Graph(tuple(sorted(vertices)), norm)

    @staticmethod
    def complete(n: int, first: int = 1) -> "Graph":
        verts = range(first, first + n)
        return Graph.build(verts, itertools.combinations(verts, 2))

    @staticmethod
    def complete_bipartite(m: int, n: int) -> "Graph":
        left = range(1, m + 1)
        right = range(m + 1, m + n + 1)
        return Graph.build(
            itertools.chain(left, right), ((u, v) for u in left for v in right)
        )

    @staticmethod
    def path(n: int, first: int = 1) -> "Graph":
        verts = list(range(first, first + n))
        return Graph.build(verts, zip(verts, verts[1:]))

    @staticmethod
    def cycle(n: int, first: int = 1) -> "Graph":
        verts = list(range(first, first + n))
        return Graph.build(verts, zip(verts, verts[1:] + verts[:1]))

    @staticmethod
    def star(leaves: int, center: int = 0) -> "Graph":
        verts = [center] + [center + i + 1 for i in range(leaves)]
        return Graph.build(verts, ((center, v) for v in verts[1:]))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def q(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def neighbors(self, u: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == u:
                out.add(b)
            elif b == u:
                out.add(a)
        return out

    def degree(self, u: int) -> int:
        return len(self.neighbors(u))

    def max_degree(self) -> int:
        return max((self.degree(u) for u in self.vertices), default=0)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        frontier = [self.vertices[0]]
        while frontier:
            nxt = frontier.pop()
            for w in self.neighbors(nxt):
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == self.n

    def is_tree(self) -> bool:
        return self.q == self.n - 1 and self.is_connected()

    def is_acyclic(self) -> bool:
        uf = UnionFind(self.vertices)
        return all(uf.union(u, v) for u, v in self.edges)

    def bipartition(self) -> tuple[set[int], set[int]] | None:
        """The unique 2-coloring classes of a connected bipartite graph."""
        if not self.is_connected():
            return None
        color: dict[int, int] = {self.vertices[0]: 0}
        frontier = [self.vertices[0]]
        while frontier:
            u = frontier.pop()
            for w in self.neighbors(u):
                if w not in color:
                    color[w] = 1 - color[u]
                    frontier.append(w)
                elif color[w] == color[u]:
                    return None
        side0 = {u for u, c in color.items() if c == 0}
        return side0, set(self.vertices) - side0

    def to_json(self) -> dict:
        return {"n": self.n, "vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    def to_dot(self, vcolors: Mapping[int, object] | None = None, ecolors: Mapping[Edge, object] | None = None) -> str:
        lines = ["graph G {"]
        for u in self.vertices:
            label = f' [label="{u}:{vcolors[u]}"]' if vcolors and u in vcolors else ""
            lines.append(f"  {u}{label};")
        for u, v in self.sorted_edges():
            label = f' [label="{ecolors[(u, v)]}"]' if ecolors and (u, v) in ecolors else ""
            lines.append(f"  {u} -- {v}{label};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def graph_from_json(blob: dict | str) -> "Graph":
    data = json.loads(blob) if isinstance(blob, str) else blob
    if "vertices" in data:
        vertices = data["vertices"]
    else:
        vertices = range(data["n"])
    return Graph.build(vertices, data["edges"])


class UnionFind:
    """Disjoint sets over an explicit vertex universe."""

    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


@dataclass
class ColoredGraph:
    """A graph plus vertex colors and optional edge colors.

    Color values may be integers, digit strings, or tuples of integers;
    treat instances as immutable.
    """

    graph: Graph
    vcolors: dict[int, object] = field(default_factory=dict)
    ecolors: dict[Edge, object] | None = None

    def __post_init__(self) -> None:
        missing = set(self.graph.vertices) - set(self.vcolors)
        if self.vcolors and missing:
            raise GraphError(f"vertex colors missing for {sorted(missing)}")
        if self.ecolors is not None:
            missing_e = set(self.graph.edges) - set(self.ecolors)
            if missing_e:
                raise GraphError(f"edge colors missing for {sorted(missing_e)}")

    def vcolor(self, u: int):
        return self.vcolors[u]

    def ecolor(self, u: int, v: int):
        if self.ecolors is None:
            raise GraphError("graph has no edge colors")
        return self.ecolors[_norm_edge(u, v)]

    @property
    def total(self) -> bool:
        return bool(self.vcolors) and self.ecolors is not None

    def to_json(self) -> dict:
        blob = self.graph.to_json()
        blob["vcolors"] = {str(u): _color_json(c) for u, c in sorted(self.vcolors.items())}
        if self.ecolors is not None:
            blob["ecolors"] = {f"{u},{v}": _color_json(c) for (u, v), c in sorted(self.ecolors.items())}
        return blob


def _color_json(c: object):
    if isinstance(c, tuple):
        return list(c)
    if isinstance(c, int):
        return c
    return str(c)


# ---------------------------------------------------------------------------
# Structural operations.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexSplitPlan:
    """Split ``target`` so that each block of neighbors gets its own copy."""

    target: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.blocks) < 2:
            raise GraphError("vertex split needs at least two blocks")
        if any(not b for b in self.blocks):
            raise GraphError("vertex split blocks must be nonempty")
        seen: set[int] = set()
        for b in self.blocks:
            if seen & b:
                raise GraphError("vertex split blocks must be disjoint")
            seen |= b


def vertex_split(g: Graph, plan: VertexSplitPlan) -> Graph:
    """Replace the target by one vertex per block; edge count is preserved."""
    nbrs = g.neighbors(plan.target)
    if len(nbrs) < 2:
        raise GraphError("vertex split target must have degree >= 2")
    covered = set().union(*plan.blocks)
    if covered != nbrs:
        raise GraphError(f"blocks must partition the neighborhood {sorted(nbrs)}")
    fresh = max(g.vertices) + 1
    copies = [plan.target] + [fresh + i for i in range(len(plan.blocks) - 1)]
    vertices = list(g.vertices) + copies[1:]
    edges = [e for e in g.edges if plan.target not in e]
    for copy, block in zip(copies, plan.blocks):
        edges.extend(_norm_edge(copy, w) for w in block)
    return Graph.build(vertices, edges)


class CoincideRule(Enum):
    BY_COLOR = "by-color"
    EXPLICIT = "explicit"


def vertex_coincide(
    parts: Sequence[ColoredGraph],
    rule: CoincideRule = CoincideRule.BY_COLOR,
    pairs: Sequence[tuple[tuple[int, int], tuple[int, int]]] | None = None,
) -> ColoredGraph:
    """Merge vertices across the parts; the edge sets must stay disjoint.

    BY_COLOR merges every set of vertices sharing one color into a single
    vertex carrying that color; an edge appearing in two parts (or a merge
    creating a loop) is an error.  EXPLICIT takes ((part, vertex), (part,
    vertex)) pairs instead.
    """
    if not parts:
        raise GraphError("nothing to coincide")
    if rule is CoincideRule.BY_COLOR:
        ids: dict[object, int] = {}
        for pi, part in enumerate(parts):
            if not part.vcolors:
                raise GraphError(f"part {pi} has no vertex colors")
            for u in part.graph.vertices:
                color = part.vcolor(u)
                key = str(color)
                ids[key] = min(ids.get(key, u), u)
        mapped_vcolors = {}
        edges: set[Edge] = set()
        ecolors: dict[Edge, object] = {}
        any_ecolors = any(p.ecolors is not None for p in parts)
        for pi, part in enumerate(parts):
            vmap = {u: ids[str(part.vcolor(u))] for u in part.graph.vertices}
            for u in part.graph.vertices:
                mapped_vcolors[vmap[u]] = part.vcolor(u)
            for u, v in part.graph.edges:
                mu, mv = vmap[u], vmap[v]
                if mu == mv:
                    raise GraphError(f"coinciding would create a loop at color {part.vcolor(u)}")
                e = _norm_edge(mu, mv)
                if e in edges:
                    raise GraphError(f"coinciding would create a multi-edge at {e}")
                edges.add(e)
                if part.ecolors is not None:
                    ecolors[e] = part.ecolor(u, v)
        graph = Graph.build(mapped_vcolors.keys(), edges)
        return ColoredGraph(graph, mapped_vcolors, ecolors if any_ecolors else None)

    if pairs is None:
        raise GraphError("explicit coinciding needs vertex pairs")
    # Build the disjoint union, then merge the listed pairs.
    offset = 0
    union_edges: list[Edge] = []
    union_vcolors: dict[int, object] = {}
    offsets: list[int] = []
    for part in parts:
        offsets.append(offset)
        shift = offset - min(part.graph.vertices)
        for u in part.graph.vertices:
            union_vcolors[u + shift] = part.vcolors.get(u) if part.vcolors else None
        union_edges.extend((u + shift, v + shift) for u, v in part.graph.edges)
        offset += max(part.graph.vertices) - min(part.graph.vertices) + 1
    uf = UnionFind(union_vcolors.keys())
    for (pa, va), (pb, vb) in pairs:
        a = va + offsets[pa] - min(parts[pa].graph.vertices)
        b = vb + offsets[pb] - min(parts[pb].graph.vertices)
        uf.union(a, b)
    roots: dict[int, int] = {}
    for v in union_vcolors:
        roots.setdefault(uf.find(v), v)
        roots[uf.find(v)] = min(roots[uf.find(v)], v)
    merged_edges: set[Edge] = set()
    for u, v in union_edges:
        mu, mv = roots[uf.find(u)], roots[uf.find(v)]
        if mu == mv:
            raise GraphError("coinciding would create a loop")
        e = _norm_edge(mu, mv)
        if e in merged_edges:
            raise GraphError(f"coinciding would create a multi-edge at {e}")
        merged_edges.add(e)
    vcolors = {roots[uf.find(v)]: c for v, c in union_vcolors.items() if c is not None}
    graph = Graph.build({roots[uf.find(v)] for v in union_vcolors}, merged_edges)
    return ColoredGraph(graph, vcolors, None)


def edge_join(g: Graph, u: int, h: Graph, x: int) -> Graph:
    """Join disjoint graphs by the single new edge u-x."""
    if set(g.vertices) & set(h.vertices):
        raise GraphError("edge-join expects vertex-disjoint graphs")
    if u not in g.vertices or x not in h.vertices:
        raise GraphError("edge-join endpoints missing")
    return Graph.build(g.vertices + h.vertices, list(g.edges) + list(h.edges) + [(u, x)])


def edge_add_sub(g: Graph, add: Sequence[int], remove: Sequence[int]) -> Graph:
    """The +-e operation: add one absent edge and remove one present edge."""
    add_e = _norm_edge(*add)
    rm_e = _norm_edge(*remove)
    if add_e in g.edges:
        raise GraphError(f"edge {add_e} already present")
    if rm_e not in g.edges:
        raise GraphError(f"edge {rm_e} not present")
    return Graph.build(g.vertices, (g.edges - {rm_e}) | {add_e})


# ---------------------------------------------------------------------------
# Complete-graph splits into edge-disjoint spanning trees.
# ---------------------------------------------------------------------------


def split_complete_even(m: int) -> list[Graph]:
    """Split E(K_2m) into m spanning trees of 2m-1 edges each.

    Inductive construction on vertices 1..2m: the K_4 base holds two
    spanning paths; each step adds vertices 2t+1 and 2t+2, grows every
    existing tree through a matched non-edge pair, and repairs a star
    spanning tree from the edges left over.  Choices are resolved by a
    deterministic first-fit backtracking search.
    """
    if m < 2:
        raise GraphError("need m >= 2")
    verts4 = [1, 2, 3, 4]
    trees = [
        Graph.build(verts4, [(1, 2), (2, 3), (3, 4)]),
        Graph.build(verts4, [(2, 4), (1, 4), (1, 3)]),
    ]
    t = 2
    while t < m:
        trees = _grow_even_split(trees, t)
        t += 1
    return trees


def _grow_even_split(trees: list[Graph], t: int) -> list[Graph]:
    """One induction step: from a split of K_2t to a split of K_2t+2."""
    n = 2 * t
    a, b = n + 1, n + 2
    verts = list(range(1, n + 3))

    old = [set(tr.edges) for tr in trees]

    def attempt(order: list[int]) -> list[Graph] | None:
        # Pair the 2t old vertices into one non-adjacent pair per tree, pick
        # for each tree the swap vertex w_i, then check the star repair.
        used: set[int] = set()
        choices: list[tuple[int, int, int]] = []  # (u_i, v_i, w_i) per tree

        def place(i: int) -> bool:
            if i == len(trees):
                return _star_is_tree(choices, n, a, b)
            tree = trees[i]
            free = [v for v in order if v not in used]
            for u, v in itertools.combinations(free, 2):
                if tree.has_edge(u, v):
                    continue
                path = _tree_path(tree, u, v)
                for w in (path[1], path[-2]):
                    # w is the path neighbor of u (or of v: swap roles)
                    uu, vv = (u, v) if w == path[1] else (v, u)
                    if w in {c[2] for c in choices}:
                        continue
                    used.update((u, v))
                    choices.append((uu, vv, w))
                    if place(i + 1):
                        return True
                    choices.pop()
                    used.difference_update((u, v))
            return False

        if not place(0):
            return None
        out: list[Graph] = []
        star_edges = {(min(a, b), max(a, b))}
        taken_from_star = {c[2] for c in choices}
        for x in range(1, n + 1):
            if x not in taken_from_star:
                star_edges.add(_norm_edge(x, b))
        for (u, v, w), edges in zip(choices, old):
            new_edges = (edges - {_norm_edge(w, u)}) | {
                _norm_edge(a, u),
                _norm_edge(a, v),
                _norm_edge(w, b),
            }
            out.append(Graph.build(verts, new_edges))
            star_edges.add(_norm_edge(w, u))
        out.append(Graph.build(verts, star_edges))
        return out

    def _star_is_tree(choices: list[tuple[int, int, int]], n: int, a: int, b: int) -> bool:
        if len(choices) != len(trees):
            return False
        edges = {(min(a, b), max(a, b))}
        taken = {c[2] for c in choices}
        for x in range(1, n + 1):
            if x not in taken:
                edges.add(_norm_edge(x, b))
        for u, v, w in choices:
            edges.add(_norm_edge(w, u))
        g = Graph.build(range(1, n + 3), edges)
        return g.is_tree()

    result = attempt(list(range(1, n + 1)))
    if result is None:
        raise GraphError(f"induction step to K_{n + 2} found no valid repair")
    return result


def _tree_path(tree: Graph, u: int, v: int) -> list[int]:
    """The unique u..v path in a tree."""
    parent = {u: None}
    frontier = [u]
    while frontier:
        x = frontier.pop()
        if x == v:
            break
        for w in tree.neighbors(x):
            if w not in parent:
                parent[w] = x
                frontier.append(w)
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def split_complete_odd(m: int) -> tuple[Graph, list[Graph]]:
    """Split E(K_2m+1) into a star K_1,m plus m spanning trees of 2m edges."""
    if m < 2:
        raise GraphError("need m >= 2")
    trees = split_complete_even(m)
    hub = 2 * m + 1
    verts = list(range(1, 2 * m + 2))
    grown = [
        Graph.build(verts, list(tr.edges) + [(i + 1, hub)])
        for i, tr in enumerate(trees)
    ]
    star = Graph.build(verts, [(m + 1 + j, hub) for j in range(m)])
    return star, grown


def verify_edge_disjoint_spanning(host: Graph, parts: Sequence[Graph]) -> bool:
    """Independent union-find check that the parts partition E(host) and that
    every part with |V(host)|-1 edges is a spanning tree."""
    seen: set[Edge] = set()
    for part in parts:
        if set(part.vertices) - set(host.vertices):
            return False
        if seen & part.edges:
            return False
        seen |= part.edges
        if part.q == host.n - 1:
            uf = UnionFind(host.vertices)
            if not all(uf.union(u, v) for u, v in part.edges):
                return False
            if len({uf.find(v) for v in host.vertices}) != 1:
                return False
    return seen == host.edges


# ---------------------------------------------------------------------------
# Spanning-tree counting.
# ---------------------------------------------------------------------------


def cayley_count(n: int) -> int:
    return n ** (n - 2)


def bipartite_tree_count(m: int, n: int) -> int:
    return m ** (n - 1) * n ** (m - 1)


def enumerate_spanning_trees(g: Graph, limit: int | None = None) -> list[frozenset[Edge]]:
    """All spanning trees by brute force over (n-1)-edge subsets."""
    n = g.n
    out = []
    for subset in itertools.combinations(sorted(g.edges), n - 1):
        uf = UnionFind(g.vertices)
        if all(uf.union(u, v) for u, v in subset):
            out.append(frozenset(subset))
            if limit is not None and len(out) > limit:
                raise GraphError("enumeration exceeded the requested limit")
    return out


def count_spanning_trees(
    kind: str, *sizes: int, enumerate_limit: int | None = 100_000
) -> tuple[int, int | None]:
    """Closed-form count and, at desk scale, the brute-force enumeration count.

    kind is 'complete' (one size, n <= 8 enumerated) or 'bipartite'
    (two sizes, m + n <= 8 enumerated).
    """
    if kind == "complete":
        (n,) = sizes
        closed = cayley_count(n)
        enumerated = None
        if n <= 8:
            enumerated = len(enumerate_spanning_trees(Graph.complete(n), enumerate_limit))
        return closed, enumerated
    if kind == "bipartite":
        m, n = sizes
        closed = bipartite_tree_count(m, n)
        enumerated = None
        if m + n <= 8:
            enumerated = len(enumerate_spanning_trees(Graph.complete_bipartite(m, n), enumerate_limit))
        return closed, enumerated
    raise GraphError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Colored graph homomorphisms and desk-scale isomorphism.
# ---------------------------------------------------------------------------


class HomMode(Enum):
    V = "v"
    E = "e"
    VE = "ve"


def check_colored_homomorphism(
    h: ColoredGraph,
    g: ColoredGraph,
    mapping: Mapping[int, int] | None,
    mode: HomMode = HomMode.V,
) -> bool:
    """Check (or search for, when mapping is None and |V(h)| <= 8) a
    color-compatible homomorphism h -> g.

    Edges must map to edges.  Mode V wants vertex colors preserved and
    adjacent image-colors distinct; mode E the same for edge colors over
    adjacent edges; VE both.
    """
    if mapping is not None:
        missing = set(h.graph.vertices) - set(mapping)
        if missing:
            raise GraphError(f"mapping not total, missing {sorted(missing)}")
        return _hom_ok(h, g, dict(mapping), mode)
    if h.graph.n > 8:
        raise GraphError("homomorphism search limited to 8 vertices")
    for images in itertools.product(g.graph.vertices, repeat=h.graph.n):
        candidate = dict(zip(h.graph.vertices, images))
        if _hom_ok(h, g, candidate, mode):
            return True
    return False


def _hom_ok(h: ColoredGraph, g: ColoredGraph, phi: dict[int, int], mode: HomMode) -> bool:
    for u, v in h.graph.edges:
        if phi[u] == phi[v] or not g.graph.has_edge(phi[u], phi[v]):
            return False
    if mode in (HomMode.V, HomMode.VE):
        for u, v in h.graph.edges:
            if h.vcolor(u) == h.vcolor(v):
                return False
        for u in h.graph.vertices:
            if h.vcolor(u) != g.vcolor(phi[u]):
                return False
    if mode in (HomMode.E, HomMode.VE):
        if h.ecolors is None or g.ecolors is None:
            raise GraphError("edge-colored homomorphism needs edge colors")
        for (u, v), (x, y) in itertools.combinations(h.graph.edges, 2):
            if {u, v} & {x, y} and h.ecolor(u, v) == h.ecolor(x, y):
                return False
        for u, v in h.graph.edges:
            if h.ecolor(u, v) != g.ecolor(phi[u], phi[v]):
                return False
    return True


def are_isomorphic(a: Graph, b: Graph) -> bool:
    """Exhaustive isomorphism test with degree-sequence pruning (<= 10 vertices)."""
    if a.n != b.n or a.q != b.q:
        return False
    if a.n > 10:
        raise GraphError("isomorphism test limited to 10 vertices")
    deg_a = sorted(a.degree(u) for u in a.vertices)
    deg_b = sorted(b.degree(u) for u in b.vertices)
    if deg_a != deg_b:
        return False
    bv = list(b.vertices)
    by_degree: dict[int, list[int]] = {}
    for v in bv:
        by_degree.setdefault(b.degree(v), []).append(v)
    av = sorted(a.vertices, key=a.degree, reverse=True)

    def extend(i: int, phi: dict[int, int], used: set[int]) -> bool:
        if i == len(av):
            return True
        u = av[i]
        for v in by_degree.get(a.degree(u), []):
            if v in used:
                continue
            ok = True
            for w in phi:
                if a.has_edge(u, w) != b.has_edge(v, phi[w]):
                    ok = False
                    break
            if ok:
                phi[u] = v
                used.add(v)
                if extend(i + 1, phi, used):
                    return True
                del phi[u]
                used.remove(v)
        return False

    return extend(0, {}, set())
