"""Independent brute-force oracles cross-checking the engineered paths."""

import itertools

from topocode.graphs import ColoredGraph, Graph
from topocode.labelings import ConstraintSpec, Family, SearchStatus, search, verify
from topocode.topcode import ParamTopcode, TopcodeMatrix, pronbs_solve, string_from_topcode
from topocode.trees import all_trees


def brute_force_graceful(g, set_ordered=False):
    """Enumerate all injective labelings into [0, q] directly."""
    q = g.q
    verts = list(g.vertices)
    for values in itertools.permutations(range(q + 1), len(verts)):
        f = dict(zip(verts, values))
        edge_vals = sorted(abs(f[u] - f[v]) for u, v in g.edges)
        if edge_vals != list(range(1, q + 1)):
            continue
        if min(values) != 0:
            continue
        if set_ordered:
            sides = g.bipartition()
            a, b = sides
            amax, bmax = max(f[v] for v in a), max(f[v] for v in b)
            amin, bmin = min(f[v] for v in a), min(f[v] for v in b)
            if not (amax < bmin or bmax < amin):
                continue
        return f
    return None


def test_search_agrees_with_brute_force_graceful():
    spec = ConstraintSpec(Family.GRACEFUL, labeling=True)
    for n in range(2, 7):
        for tree in all_trees(n):
            oracle = brute_force_graceful(tree)
            result = search(tree, spec)
            assert (result.status is SearchStatus.FOUND) == (oracle is not None)


def test_search_agrees_with_brute_force_set_ordered():
    spec = ConstraintSpec(Family.GRACEFUL, set_ordered=True, labeling=True)
    for n in range(2, 8):
        for tree in all_trees(n):
            oracle = brute_force_graceful(tree, set_ordered=True)
            result = search(tree, spec, budget=3_000_000)
            assert result.status is not SearchStatus.BUDGET_EXHAUSTED
            assert (result.status is SearchStatus.FOUND) == (oracle is not None), n


def test_c5_odd_graceful_brute_force():
    # independent confirmation that C_5 admits no odd-graceful labeling
    c5 = Graph.cycle(5)
    q = 5
    found = False
    for values in itertools.permutations(range(2 * q), 5):
        f = dict(zip(c5.vertices, values))
        if min(values) != 0:
            continue
        edge_vals = sorted(abs(f[u] - f[v]) for u, v in c5.edges)
        if edge_vals == [1, 3, 5, 7, 9]:
            found = True
            break
    assert not found
    result = search(c5, ConstraintSpec(Family.ODD_GRACEFUL, labeling=True))
    assert result.status is SearchStatus.NONE_EXHAUSTED


def test_pronbs_covers_enumerated_sources():
    # enumerate every graceful-constraint base with q <= 2 and colors <= 3,
    # generate its string, and demand the solver returns it
    sources = []
    for q in (1, 2):
        for xs in itertools.product(range(4), repeat=q):
            for ys in itertools.product(range(4), repeat=q):
                es = tuple(abs(y - x) for x, y in zip(xs, ys))
                if any(e < 1 for e in es):
                    continue
                edges = {tuple(sorted((x, y))) for x, y in zip(xs, ys)}
                if len(edges) != q:
                    continue
                sources.append(TopcodeMatrix(xs, es, ys))
    assert sources
    for base in sources[::7]:  # sample deterministically for speed
        for k, d in ((0, 1), (2, 1), (1, 2)):
            s = string_from_topcode(ParamTopcode(base).evaluate(k, d))
            candidates = pronbs_solve(s, max_q=2, max_color=3, k_range=(0, 1, 2), d_range=(1, 2))
            assert any(
                c.base.rows() == base.rows() and (c.k, c.d) == (k, d) for c in candidates
            ), (base.rows(), k, d)


def test_verify_magic_constant_against_direct_evaluation():
    # the verifier's inferred constant equals a direct per-edge evaluation
    g = Graph.star(4, center=0)
    vcolors = {0: 1, 1: 6, 2: 5, 3: 4, 4: 3}
    ecolors = {(0, i): 10 - 1 - vcolors[i] for i in range(1, 5)}
    cg = ColoredGraph(g, vcolors, ecolors)
    report = verify(cg, ConstraintSpec(Family.EDGE_MAGIC))
    direct = {vcolors[0] + vcolors[i] + ecolors[(0, i)] for i in range(1, 5)}
    assert report.verdict and direct == {report.magic_constant}


def test_search_finds_lifted_magic_instances():
    # strip a lifted coloring and ask search to find any coloring at the
    # same constant; the backtracker must succeed within budget
    from topocode.labelings import lift_from_set_ordered_graceful

    base = ColoredGraph(Graph.path(4), {1: 0, 2: 3, 3: 1, 4: 2}, None)
    for family in (
        Family.EDGE_MAGIC,
        Family.EDGE_DIFFERENCE,
        Family.GRACEFUL_DIFFERENCE,
        Family.FELICITOUS_DIFFERENCE,
    ):
        lifted, constant = lift_from_set_ordered_graceful(base, family, 1, 1)
        spec = ConstraintSpec(family, k=1, d=1, magic_constant=constant)
        result = search(lifted.graph, spec, budget=2_000_000)
        assert result.status is SearchStatus.FOUND, family
        assert verify(result.coloring, spec).verdict


def test_verify_with_declared_bipartition():
    g = Graph.path(4)
    cg = ColoredGraph(g, {1: 0, 2: 3, 3: 1, 4: 2}, None)
    spec = ConstraintSpec(Family.GRACEFUL, set_ordered=True, labeling=True)
    auto = verify(cg, spec)
    declared = verify(cg, spec, x_side={1, 3})
    assert auto.verdict and declared.verdict
    assert declared.bipartition[0] == frozenset({1, 3})


def test_search_timeout_reports_budget():
    import time

    result = search(
        Graph.cycle(6),
        ConstraintSpec(Family.GRACEFUL, labeling=True),
        budget=10**9,
        timeout=0.0,
    )
    assert result.status is SearchStatus.BUDGET_EXHAUSTED
