import itertools

import pytest
from hypothesis import given, settings, strategies as st

from h1wb import checks
from h1wb.errors import GadgetInvalid, LoopPresent, NotCritical, ThreeColorable
from h1wb.graphs import (
    Graph,
    GadgetN,
    MarkedGraph,
    all_graphs,
    build_chain,
    build_gadget_n,
    canonical,
    complete,
    cycle,
    enumerate_seeds,
    glue,
    glue_layout,
    hom_search,
    is_critical,
    is_three_colorable,
    looped_vertex,
    three_coloring,
    trim_to_critical,
    verify_gadget_n,
    wheel,
)

from oracles import brute_colorings, brute_hom_exists


@st.composite
def graphs(draw, max_n=8, loops=False):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u if loops else u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


def test_hom_examples():
    k3 = complete(3)
    assert hom_search(k3, k3) == {0: 0, 1: 1, 2: 2}
    assert hom_search(complete(4), k3) is None
    assert hom_search(cycle(5), k3) is not None


def test_hom_is_lex_least():
    c5 = cycle(5)
    got = hom_search(c5, complete(3))
    maps = [m for m in itertools.product(range(3), repeat=5)
            if all(m[u] != m[v] for u, v in c5.edges)]
    assert tuple(got[v] for v in range(5)) == min(maps)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9))
def test_colorability_matches_brute_force(g):
    col = three_coloring(g)
    assert (col is not None) == bool(brute_colorings(g.n, g.edges))
    if col is not None:
        assert checks.check_coloring(g, col)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6, loops=True), graphs(max_n=5, loops=True))
def test_hom_matches_brute_force(a, b):
    h = hom_search(a, b)
    assert (h is not None) == brute_hom_exists(a.n, a.edges, b.n, b.edges)
    if h is not None:
        assert checks.check_hom(a, b, h)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=7, loops=True), graphs(max_n=6, loops=True), graphs(max_n=6, loops=True))
def test_hom_composition(a, b, c):
    f, g = hom_search(a, b), hom_search(b, c)
    if f is not None and g is not None:
        assert checks.check_hom(a, c, {v: g[f[v]] for v in range(a.n)})


def test_loop_absorbs_everything():
    assert hom_search(complete(5), looped_vertex()) == {v: 0 for v in range(5)}


def test_trim_examples():
    assert trim_to_critical(complete(4)) == (complete(4), (0, 1))
    with pytest.raises(ThreeColorable):
        trim_to_critical(complete(3))
    with pytest.raises(LoopPresent):
        trim_to_critical(looped_vertex())
    h, e = trim_to_critical(wheel(5))
    assert not is_three_colorable(h) and is_three_colorable(h.without(e))
    assert h.edges <= wheel(5).edges


@settings(max_examples=30, deadline=None)
@given(graphs(max_n=7))
def test_trim_property(g):
    if is_three_colorable(g):
        return
    h, e = trim_to_critical(g)
    assert checks.check_critical(h, e)


def test_gadget_shape():
    gd = build_gadget_n()
    assert gd.graph.n == 18
    assert len(gd.graph.edges) == 33
    assert gd.graph.degree(gd.x) == 2
    a, b = gd.d
    assert gd.graph.has_edge(a, b)
    assert not gd.graph.has_loop()


def test_gadget_properties():
    rep = verify_gadget_n(build_gadget_n())
    assert (rep.extendable_n, rep.eqeq_extendable_n_minus_d) == (36, 9)
    assert rep.p1 and rep.p2 and rep.p3


def test_broken_gadget_is_rejected():
    gd = build_gadget_n()
    bad = GadgetN(gd.graph.without(gd.d), gd.boundary, (0, 1))
    with pytest.raises(GadgetInvalid):
        verify_gadget_n(bad)
    assert not verify_gadget_n(bad, strict=False).passed


def test_glue_k4_k4():
    k4 = MarkedGraph(complete(4), (0, 1))
    w = glue(k4, k4)
    assert (w.graph.n, len(w.graph.edges)) == (22, 43)
    assert not w.graph.has_loop()
    assert checks.check_critical(w.graph, w.marked)
    lay = glue_layout(k4, k4)
    x, x_ = lay.g_map[0], lay.g_map[1]
    assert not w.graph.has_edge(x, x_)


def test_glue_orientation_does_not_matter():
    k4 = complete(4)
    for e, f in [((0, 1), (0, 1)), ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 0))]:
        w = glue(MarkedGraph(k4, e), MarkedGraph(k4, f))
        assert is_critical(w.graph, w.marked)


def test_glue_rejects_bad_inputs():
    with pytest.raises(ThreeColorable):
        glue(MarkedGraph(complete(3), (0, 1)), MarkedGraph(complete(4), (0, 1)))
    # K5 minus nothing: no edge of K5 is critical
    with pytest.raises(NotCritical):
        glue(MarkedGraph(complete(5), (0, 1)), MarkedGraph(complete(4), (0, 1)))


def test_seeds():
    seeds = list(itertools.islice(enumerate_seeds(6), 4))
    assert seeds[0] == MarkedGraph(complete(4), (0, 1))
    for s in seeds:
        assert not s.graph.has_loop()
        assert checks.check_critical(s.graph, s.marked)
    assert [s.graph for s in seeds] == [s.graph for s in itertools.islice(enumerate_seeds(6), 4)]
    assert len({canonical(s.graph) for s in seeds}) == len(seeds)


def test_chain_vertex_arithmetic():
    chain = build_chain(3, 8)
    seeds = list(itertools.islice(enumerate_seeds(8), 3))
    assert chain[0] == seeds[0]
    assert chain[1].graph.n == 18 + chain[0].graph.n + seeds[1].graph.n - 4
    for h in chain:
        assert not is_three_colorable(h.graph)


def test_graph_counts_up_to_five():
    # numbers of unlabelled graphs: OEIS A000088
    assert [sum(1 for _ in all_graphs(n)) for n in range(1, 6)] == [1, 2, 4, 11, 34]
