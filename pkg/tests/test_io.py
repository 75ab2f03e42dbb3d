import json

import pytest
from hypothesis import given, settings, strategies as st

from h1wb import io
from h1wb.clones import OperationTable, k3_structure, satisfies, structure, z3_affine
from h1wb.conditions import derive_from_hom, qnu, sigma_of_graph, siggers
from h1wb.errors import InputError
from h1wb.forb import CspInstance
from h1wb.graphs import Graph, MarkedGraph, complete, cycle, hom_search


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u, n)]
    return Graph.from_edges(n, draw(st.lists(st.sampled_from(pairs), unique=True)))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_graph_roundtrip(g):
    assert io.parse_graph(io.graph_to_text(g)) == g
    assert io.parse_graph(io.dumps(io.graph_to_json(g))) == g


def test_marked_graph_roundtrip():
    m = MarkedGraph(complete(4), (0, 1))
    assert io.parse_graph(io.graph_to_text(m)) == m
    assert io.parse_graph(json.dumps(io.graph_to_json(m))) == m
    with pytest.raises(InputError):
        io.as_marked(complete(4))


def test_comments_are_skipped():
    g = io.parse_graph("# a triangle\ng 3\nc edges follow\ne 0 1\ne 1 2\ne 2 0\n")
    assert g == complete(3)


@pytest.mark.parametrize("cond", [siggers(), qnu(4), sigma_of_graph(cycle(5))])
def test_condition_roundtrip(cond):
    assert io.parse_condition(io.condition_to_text(cond)) == cond
    assert io.parse_condition(io.dumps(io.condition_to_json(cond))) == cond


def test_structure_roundtrip():
    for b in (k3_structure(), z3_affine(), structure(2, [("E", 2, []), ("U", 1, [(1,)])])):
        assert io.structure_from_json(json.loads(io.dumps(io.structure_to_json(b)))) == b
    b = io.parse_structure("d 2\nr E 2\nt 0 1\nt 1 0\n")
    assert b == structure(2, [("E", 2, [(0, 1), (1, 0)])])
    assert io.parse_structure(io.graph_to_text(complete(3))) == k3_structure()


def test_table_and_witness_roundtrip():
    t = OperationTable.projection(3, 2, 1)
    assert io.table_from_json(io.table_to_json(t)) == t
    w = satisfies(k3_structure(), sigma_of_graph(complete(3)))
    back = io.witness_from_json(json.loads(io.dumps(io.witness_to_json(w))), w.condition)
    assert back.tables == w.tables


def test_derivation_roundtrip():
    c5 = cycle(5)
    d = derive_from_hom(c5, complete(3), hom_search(c5, complete(3)))
    assert io.derivation_from_json(json.loads(io.dumps(io.derivation_to_json(d)))) == d


def test_instance_roundtrip():
    inst = CspInstance(4, ((0, 1), (2, 2), (3, 1)))
    assert io.parse_instance(io.instance_to_text(inst)) == inst
    assert io.parse_instance(io.dumps(io.instance_to_json(inst))) == inst


@pytest.mark.parametrize("parse,text", [
    (io.parse_graph, "e 0 1\n"),
    (io.parse_graph, "g 2\ne 0 x\n"),
    (io.parse_graph, "g 2\nq 1\n"),
    (io.parse_graph, "{\"edges\": []}"),
    (io.parse_graph, "{not json"),
    (io.parse_condition, "s f\n"),
    (io.parse_condition, "i 2 f 0 1 f 1 0\n"),
    (io.parse_structure, "r E 2\nt 0 1\n"),
    (io.parse_structure, "d 2\nt 0 1\n"),
    (io.parse_instance, "p csp 2 2\na 0 1\n"),
    (io.parse_instance, "a 0 1\n"),
    (io.parse_instance, "p csp 2 1\na 0 5\n"),
])
def test_bad_input(parse, text):
    with pytest.raises(InputError):
        parse(text)
