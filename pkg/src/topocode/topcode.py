"""Topcode matrices: 3 x q matrices whose columns carry, per edge, the two
endpoint colors and the edge color.  Includes number-based string
derivation under explicit cell permutations, parameterized matrices and
their evaluation, curve-attached string sequences, assignment
substitution, adjacency-family matrices, nested (string-celled) matrices,
and a bounded inverse solver that recovers (graph, coloring, k, d)
candidates from a string.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graphs import ColoredGraph, Graph, _norm_edge
from .strings import MOD10, DigitString

Cell = object  # int | DigitString | tuple[int, ...] | TopcodeMatrix


class TopcodeError(ValueError):
    pass


@dataclass(frozen=True)
class TopcodeMatrix:
    x_row: tuple[Cell, ...]
    e_row: tuple[Cell, ...]
    y_row: tuple[Cell, ...]

    def __post_init__(self) -> None:
        q = len(self.x_row)
        if q < 1 or len(self.e_row) != q or len(self.y_row) != q:
            raise TopcodeError("all three rows must share a positive length")

    @property
    def q(self) -> int:
        return len(self.x_row)

    def rows(self) -> tuple[tuple[Cell, ...], ...]:
        return (self.x_row, self.e_row, self.y_row)

    def column(self, i: int) -> tuple[Cell, Cell, Cell]:
        return (self.x_row[i], self.e_row[i], self.y_row[i])

    def cells_row_major(self) -> list[Cell]:
        return list(self.x_row) + list(self.e_row) + list(self.y_row)

    def cells_column_major(self) -> list[Cell]:
        out: list[Cell] = []
        for i in range(self.q):
            out.extend(self.column(i))
        return out

    def is_numeric(self) -> bool:
        return all(isinstance(c, int) for c in self.cells_row_major())

    def concat(self, other: "TopcodeMatrix") -> "TopcodeMatrix":
        return TopcodeMatrix(
            self.x_row + other.x_row, self.e_row + other.e_row, self.y_row + other.y_row
        )

    def to_json(self) -> dict:
        def cell_json(c: Cell):
            if isinstance(c, TopcodeMatrix):
                return c.to_json()
            if isinstance(c, DigitString):
                return str(c)
            if isinstance(c, tuple):
                return list(c)
            return c

        return {
            "q": self.q,
            "X": [cell_json(c) for c in self.x_row],
            "E": [cell_json(c) for c in self.e_row],
            "Y": [cell_json(c) for c in self.y_row],
        }


@dataclass(frozen=True)
class PermIndex:
    """A permutation of the 3q cell positions, stored with its factorial rank.

    Rank 0 is the identity, i.e. row-major reading order.
    """

    sequence: tuple[int, ...]
    rank: int

    def __post_init__(self) -> None:
        n = len(self.sequence)
        if sorted(self.sequence) != list(range(n)):
            raise TopcodeError("not a permutation")
        if _perm_rank(self.sequence) != self.rank:
            raise TopcodeError("rank does not match sequence")

    @staticmethod
    def identity(n: int) -> "PermIndex":
        return PermIndex(tuple(range(n)), 0)

    @staticmethod
    def from_sequence(seq: Sequence[int]) -> "PermIndex":
        seq = tuple(seq)
        return PermIndex(seq, _perm_rank(seq))

    @staticmethod
    def from_rank(rank: int, n: int) -> "PermIndex":
        if not 0 <= rank < math.factorial(n):
            raise TopcodeError(f"rank {rank} out of range for n={n}")
        return PermIndex(_perm_unrank(rank, n), rank)

    @staticmethod
    def column_major(q: int) -> "PermIndex":
        seq = []
        for i in range(q):
            seq.extend((i, q + i, 2 * q + i))
        return PermIndex.from_sequence(seq)


def _perm_rank(seq: Sequence[int]) -> int:
    n = len(seq)
    rank = 0
    items = list(range(n))
    for i, s in enumerate(seq):
        rank += items.index(s) * math.factorial(n - 1 - i)
        items.remove(s)
    return rank


def _perm_unrank(rank: int, n: int) -> tuple[int, ...]:
    items = list(range(n))
    seq = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        seq.append(items.pop(idx))
    return tuple(seq)


def topcode_from_graph(
    cg: ColoredGraph,
    edge_order: Sequence[tuple[int, int]] | None = None,
    x_side: Iterable[int] | None = None,
) -> TopcodeMatrix:
    """The colored Topcode matrix with one column (f(x), f(xy), f(y)) per edge.

    ``edge_order`` fixes both the column order and, per pair, which endpoint
    lands in the X row.  Without it, edges come sorted; when an ``x_side``
    bipartition class is supplied, that side's endpoint fills the X row.
    """
    if not cg.vcolors or cg.ecolors is None:
        raise TopcodeError("topcode matrix needs a total coloring")
    if cg.graph.q == 0:
        raise TopcodeError("graph has no edges")
    if edge_order is None:
        ordered = [tuple(e) for e in cg.graph.sorted_edges()]
    else:
        ordered = [tuple(e) for e in edge_order]
        if {_norm_edge(*e) for e in ordered} != set(cg.graph.edges) or len(ordered) != cg.graph.q:
            raise TopcodeError("edge order must list every edge exactly once")
    if x_side is not None:
        side = set(x_side)
        ordered = [(u, v) if u in side else (v, u) for u, v in ordered]
    xs, es, ys = [], [], []
    for u, v in ordered:
        xs.append(cg.vcolor(u))
        es.append(cg.ecolor(u, v))
        ys.append(cg.vcolor(v))
    return TopcodeMatrix(tuple(xs), tuple(es), tuple(ys))


def _cell_text(c: Cell) -> str:
    if isinstance(c, TopcodeMatrix):
        raise TopcodeError("nested cells must be flattened before string derivation")
    if isinstance(c, DigitString):
        return str(c)
    if isinstance(c, tuple):
        return "".join(str(v) for v in c)
    if isinstance(c, int):
        if c < 0:
            raise TopcodeError(f"negative cell {c} has no digit form")
        return str(c)
    raise TopcodeError(f"cell {c!r} has no digit form")


def string_from_topcode(t: TopcodeMatrix, perm: PermIndex | None = None) -> DigitString:
    """Concatenate the 3q cells in permutation order (row-major by default)."""
    cells = t.cells_row_major()
    if perm is None:
        perm = PermIndex.identity(len(cells))
    if len(perm.sequence) != len(cells):
        raise TopcodeError(f"permutation over {len(perm.sequence)} cells, expected {len(cells)}")
    text = "".join(_cell_text(cells[i]) for i in perm.sequence)
    return DigitString.parse(text, MOD10)


# ---------------------------------------------------------------------------
# Parameterized matrices.
# ---------------------------------------------------------------------------


def unit_matrix(q: int) -> TopcodeMatrix:
    """X row all zeros, E and Y rows all ones."""
    return TopcodeMatrix((0,) * q, (1,) * q, (1,) * q)


@dataclass(frozen=True)
class ParamTopcode:
    """k * unit + d * base, evaluated cell-wise at integer (k, d)."""

    base: TopcodeMatrix

    def __post_init__(self) -> None:
        if not self.base.is_numeric():
            raise TopcodeError("parameterized matrices need a numeric base")

    @property
    def q(self) -> int:
        return self.base.q

    def evaluate(self, k: int, d: int) -> TopcodeMatrix:
        if d < 0:
            raise TopcodeError("d must be non-negative")
        unit = unit_matrix(self.q)
        rows = []
        for urow, brow in zip(unit.rows(), self.base.rows()):
            rows.append(tuple(k * u + d * b for u, b in zip(urow, brow)))
        return TopcodeMatrix(*rows)

    def render(self) -> list[list[str]]:
        """Symbolic cells like 'k+5d', 'd', 'k'."""
        unit = unit_matrix(self.q)
        out = []
        for urow, brow in zip(unit.rows(), self.base.rows()):
            row = []
            for u, b in zip(urow, brow):
                parts = []
                if u == 1:
                    parts.append("k")
                elif u > 1:
                    parts.append(f"{u}k")
                if b == 1:
                    parts.append("d")
                elif b > 1:
                    parts.append(f"{b}d")
                row.append("+".join(parts) if parts else "0")
            out.append(row)
        return out


def parameterize(t: TopcodeMatrix) -> ParamTopcode:
    return ParamTopcode(t)


def curve_strings(
    p: ParamTopcode,
    points: Sequence[tuple[int, int]],
    perm: PermIndex | None = None,
) -> list[DigitString]:
    """One string per (k, d) plane point, via evaluate then concatenate."""
    out = []
    for k, d in points:
        if k < 0 or d < 0:
            raise TopcodeError(f"plane point ({k}, {d}) must be non-negative")
        out.append(string_from_topcode(p.evaluate(k, d), perm))
    return out


def assignment_substitute(s: DigitString, table: Mapping[int, DigitString | str]) -> DigitString:
    """Replace every digit by its assigned string, concatenated in place."""
    resolved: dict[int, DigitString] = {}
    for digit, repl in table.items():
        resolved[digit] = repl if isinstance(repl, DigitString) else DigitString.parse(repl)
    missing = sorted(set(s.digits) - set(resolved))
    if missing:
        raise TopcodeError(f"assignment table missing digits {missing}")
    text = "".join(resolved[d].to_text() for d in s.digits)
    return DigitString.parse(text, s.ring)


# ---------------------------------------------------------------------------
# Adjacency-family matrices.
# ---------------------------------------------------------------------------


def adjacency_family(
    cg: ColoredGraph,
) -> tuple[list[list[int]], list[list[object]], list[list[object]]]:
    """(A, colored A, bordered A_code) over the sorted vertex order.

    A is the 0/1 adjacency matrix; the colored variant carries f(uv) at
    adjacent cells; A_code borders A with a 0 corner and the vertex colors.
    """
    if not cg.vcolors:
        raise TopcodeError("adjacency family needs vertex colors")
    verts = list(cg.graph.vertices)
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    a = [[0] * n for _ in range(n)]
    colored = [[0] * n for _ in range(n)]
    for u, v in cg.graph.edges:
        i, j = index[u], index[v]
        a[i][j] = a[j][i] = 1
        value = cg.ecolor(u, v) if cg.ecolors is not None else 1
        colored[i][j] = colored[j][i] = value
    border = [cg.vcolor(v) for v in verts]
    a_code: list[list[object]] = [[0] + border]
    for i, v in enumerate(verts):
        a_code.append([border[i]] + a[i])
    return a, colored, a_code


# ---------------------------------------------------------------------------
# Nested matrices for string-colored graphs.
# ---------------------------------------------------------------------------


def _as_positions(c: Cell) -> tuple[int, ...]:
    if isinstance(c, DigitString):
        return c.digits
    if isinstance(c, tuple):
        return c
    raise TopcodeError(f"cell {c!r} is not a string value")


def nested_topcode(
    cg: ColoredGraph, edge_order: Sequence[tuple[int, int]] | None = None
) -> TopcodeMatrix:
    """The string-celled matrix of a homogeneous string-colored graph.

    Each cell is a tuple of digit positions; column i re-reads as the inner
    3 x n matrix of edge i via :func:`inner_matrix`.
    """
    outer = topcode_from_graph(cg, edge_order)
    xs, es, ys = [], [], []
    for i in range(outer.q):
        x, e, y = (_as_positions(c) for c in outer.column(i))
        if not len(x) == len(e) == len(y):
            raise TopcodeError(f"ragged string lengths in column {i}")
        xs.append(x)
        es.append(e)
        ys.append(y)
    return TopcodeMatrix(tuple(xs), tuple(es), tuple(ys))


def inner_matrix(t: TopcodeMatrix, i: int) -> TopcodeMatrix:
    """Column i of a string-celled matrix as its own 3 x n matrix."""
    x, e, y = (_as_positions(c) for c in t.column(i))
    return TopcodeMatrix(tuple(x), tuple(e), tuple(y))


# ---------------------------------------------------------------------------
# PRONBS: invert a string back to (graph, coloring, k, d, segmentation).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PronbsCandidate:
    graph: Graph
    base: TopcodeMatrix
    k: int
    d: int
    segmentation: tuple[str, ...]
    layout: str  # 'row-major' or 'column-major'
    set_ordered: bool

    def regenerate(self) -> DigitString:
        perm = None if self.layout == "row-major" else PermIndex.column_major(self.base.q)
        return string_from_topcode(ParamTopcode(self.base).evaluate(self.k, self.d), perm)


def _segmentations(text: str, pieces: int) -> Iterable[tuple[str, ...]]:
    """All splits into the given number of nonempty segments without leading
    zeros (a lone '0' segment is allowed)."""
    if pieces == 1:
        if text and (len(text) == 1 or text[0] != "0"):
            yield (text,)
        return
    for cut in range(1, len(text) - pieces + 2):
        head = text[:cut]
        if len(head) > 1 and head[0] == "0":
            break
        for rest in _segmentations(text[cut:], pieces - 1):
            yield (head,) + rest


def pronbs_solve(
    s: DigitString,
    max_q: int = 4,
    max_color: int = 6,
    k_range: Sequence[int] = (0, 1, 2, 3),
    d_range: Sequence[int] = (1, 2),
) -> list[PronbsCandidate]:
    """Exhaustively recover parameterized graceful sources of s.

    Every candidate (H, f, k, d) satisfies: the base matrix obeys the
    graceful constraint (edge value = |Y - X| >= 1) on a simple graph whose
    vertices are identified by color, colors stay within max_color, and
    regenerating via k*unit + d*base under a row-major or column-major
    reading reproduces s exactly.  Set-ordered bases are flagged.
    """
    if max_q > 5:
        raise TopcodeError("PRONBS search bounded to q <= 5")
    text = str(s)
    found: dict[tuple, PronbsCandidate] = {}
    for q in range(1, max_q + 1):
        if len(text) < 3 * q:
            continue
        for seg in _segmentations(text, 3 * q):
            values = [int(p) for p in seg]
            for layout in ("row-major", "column-major"):
                if layout == "row-major":
                    xs, es, ys = values[:q], values[q : 2 * q], values[2 * q :]
                else:
                    xs = values[0::3]
                    es = values[1::3]
                    ys = values[2::3]
                for k in k_range:
                    for d in d_range:
                        cand = _try_candidate(xs, es, ys, k, d, max_color, seg, layout)
                        if cand is not None and cand.regenerate() == s:
                            key = (cand.base.rows(), cand.k, cand.d, cand.layout)
                            found.setdefault(key, cand)
    return sorted(
        found.values(), key=lambda c: (c.base.q, c.k, c.d, c.layout, c.base.rows())
    )


def _try_candidate(
    xs: list[int],
    es: list[int],
    ys: list[int],
    k: int,
    d: int,
    max_color: int,
    seg: tuple[str, ...],
    layout: str,
) -> PronbsCandidate | None:
    q = len(xs)
    base_x, base_e, base_y = [], [], []
    for value in xs:
        if value % d:
            return None
        base_x.append(value // d)
    for value in itertools.chain(es, ys):
        if value < k or (value - k) % d:
            return None
    base_e = [(v - k) // d for v in es]
    base_y = [(v - k) // d for v in ys]
    if any(v > max_color for v in itertools.chain(base_x, base_e, base_y)):
        return None
    # graceful constraint: edge = |y - x| and never 0 (0 would be a loop)
    for x, e, y in zip(base_x, base_e, base_y):
        if abs(y - x) != e or e < 1:
            return None
    # Vertices are identified by color; the graph must stay simple.
    edges = set()
    for x, y in zip(base_x, base_y):
        e = (min(x, y), max(x, y))
        if e in edges:
            return None
        edges.add(e)
    graph = Graph.build(set(base_x) | set(base_y), edges)
    base = TopcodeMatrix(tuple(base_x), tuple(base_e), tuple(base_y))
    set_ordered = max(base_x) < min(base_y)
    return PronbsCandidate(graph, base, k, d, seg, layout, set_ordered)


def evaluate_set_cells(t: TopcodeMatrix, k: int, d: int) -> TopcodeMatrix:
    """The set-type scaling rule: every member a of a set cell maps to k + d*a
    (numeric cells scale the same way, X-row cells with a zero unit part)."""
    if d < 0:
        raise TopcodeError("d must be non-negative")
    unit = unit_matrix(t.q)
    rows = []
    for urow, row in zip(unit.rows(), t.rows()):
        out = []
        for u, cell in zip(urow, row):
            if isinstance(cell, frozenset) or isinstance(cell, set):
                out.append(frozenset(k * u + d * a for a in cell))
            elif isinstance(cell, int):
                out.append(k * u + d * cell)
            else:
                raise TopcodeError(f"cell {cell!r} is not a set or number")
        rows.append(tuple(out))
    return TopcodeMatrix(*rows)
