"""Vertex-set algebra, graph documents and generalized-vertex membership."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ugkit.core import (
    EMPTY,
    ClosureTooLarge,
    GraphError,
    VertexId,
    VertexSet,
    g0_enumerate,
    g0_membership,
    make_graph,
    natural_key,
    validate_ultragraph,
    vs_combine,
)
from ugkit.catalog import tail_edge, worked_example

import oracles

NAMES = ["a", "b", "c"]


@st.composite
def vertex_sets(draw):
    explicit = {VertexId(n) for n in draw(st.sets(st.sampled_from(NAMES)))}
    explicit |= {VertexId(f"w{i}", i) for i in draw(st.sets(st.integers(1, 6)))}
    tail_from = draw(st.one_of(st.none(), st.integers(1, 7)))
    return VertexSet(frozenset(explicit), tail_from)


def members(a: VertexSet, horizon: int = 10) -> frozenset:
    """Membership pattern on a finite window large enough to see every threshold."""
    pool = [VertexId(n) for n in NAMES] + [VertexId(f"w{i}", i) for i in range(1, horizon)]
    return frozenset(v for v in pool if v in a)


@settings(max_examples=200, deadline=None)
@given(vertex_sets(), vertex_sets(), vertex_sets())
def test_vs_combine_lattice_laws(a, b, c):
    for op in ("union", "intersect"):
        assert vs_combine(op, a, b) == vs_combine(op, b, a)
        assert vs_combine(op, a, a) == a
        assert vs_combine(op, vs_combine(op, a, b), c) == vs_combine(op, a, vs_combine(op, b, c))


@settings(max_examples=200, deadline=None)
@given(vertex_sets(), vertex_sets())
def test_vertex_set_ops_match_pointwise(a, b):
    assert members(a | b) == members(a) | members(b)
    assert members(a & b) == members(a) & members(b)
    assert (a <= b) == (members(a) <= members(b) and (a.tail_from is None or b.tail_from is not None))


@settings(max_examples=100, deadline=None)
@given(vertex_sets())
def test_normal_form_is_idempotent(a):
    assert VertexSet(a.explicit, a.tail_from) == a
    if a.tail_from is not None:
        assert all(v.tail_index < a.tail_from - 1 for v in a.explicit if v.is_tail)


def test_normal_form_absorbs_tail_predecessor():
    w = lambda i: VertexId(f"w{i}", i)
    assert VertexSet.of(w(2), w(3), w(5), tail_from=4) == VertexSet.of(w(5), tail_from=2) == VertexSet.of(tail_from=2)


def test_natural_key_orders_numbers():
    assert sorted(["v10", "v2", "v1"], key=natural_key) == ["v1", "v2", "v10"]


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"vertices": ["v", "v"], "edges": []}, "duplicate id"),
        ({"vertices": ["v"], "edges": [{"id": "e", "source": "x", "range": ["v"]}]}, "unknown vertex"),
        ({"vertices": ["v"], "edges": [{"id": "e", "source": "v", "range": []}]}, "empty range"),
        ({"vertices": ["v"], "edges": [{"id": "e", "source": "v", "range": {"tail_from": 2}}]}, "tail"),
        ({"vertices": ["w3"], "edges": [], "tail": {"prefix": "w", "start": 1}}, "duplicate id"),
    ],
)
def test_validate_rejects_bad_documents(doc, message):
    with pytest.raises(GraphError, match=message):
        validate_ultragraph(doc)


def test_document_roundtrip():
    g = tail_edge(3)
    assert validate_ultragraph(g.to_doc()) == g


def test_finite_graph_collapses_to_power_set():
    g = worked_example()
    for names in (["v1"], ["v3", "v9"], [f"v{i}" for i in range(1, 11)]):
        d = g0_membership(g, g.set_of(names))
        assert d.member and d.witness.evaluate(g) == g.set_of(names)


def test_documented_vertex_set_examples():
    g = make_graph(["v2", "v3", "v4", "v5"], [], tail=("w", 1))
    assert vs_combine("union", g.parse_set("v2,v3"), g.parse_set("v3,v4,v5")) == g.parse_set("v2,v3,v4,v5")
    assert vs_combine("intersect", g.parse_set("+tail:3"), g.parse_set("+tail:5")) == g.parse_set("+tail:5")
    assert vs_combine("union", g.parse_set("w2"), g.parse_set("+tail:3")) == g.parse_set("+tail:2")


def test_single_tail_edge_membership():
    g = make_graph(["u"], [("e", "u", "+tail:3")], tail=("w", 1))
    assert not g0_membership(g, g.parse_set("+tail:5")).member
    d = g0_membership(g, g.parse_set("w1+tail:3"))
    assert d.member and d.witness.terms == (("e",),) and d.witness.finite == g.parse_set("w1")


def test_small_closures():
    assert len(g0_enumerate(make_graph(["a", "b"], []))) == 4
    g = make_graph(["u", "v"], [("e", "u", ["v"])])
    assert [str(a) for a in g0_enumerate(g)] == ["{}", "{u}", "{v}", "{u,v}"]


def test_tail_membership_examples():
    g = make_graph(["u"], [("e", "u", "w1+tail:3"), ("f", "u", "+tail:5")], tail=("w", 1))
    assert g0_membership(g, g.parse_set("+tail:5")).member
    assert g0_membership(g, g.parse_set("u,w2+tail:3")).member
    assert not g0_membership(g, g.parse_set("+tail:6")).member
    assert not g0_membership(make_graph(["u"], [("e", "u", ["u"])], tail=("w", 1)), g.parse_set("+tail:1")).member


def test_g0_membership_matches_truncated_closure():
    for g, cut in oracles.tailed_cases():
        assert not oracles.g0_disagreements(g, cut), g.to_doc()


def test_g0_enumerate_finite_is_power_set():
    g = make_graph(["a", "b", "c"], [("e", "a", ["b", "c"])])
    assert len(g0_enumerate(g)) == 8
    assert g0_enumerate(g)[0] == EMPTY


def test_g0_enumerate_cap():
    g = make_graph([f"v{i}" for i in range(1, 8)], [])
    with pytest.raises(ClosureTooLarge):
        g0_enumerate(g, cap=10)


def test_g0_enumerate_rejects_low_cut():
    g = make_graph(["u"], [("e", "u", "w4+tail:6")], tail=("w", 1))
    with pytest.raises(GraphError):
        g0_enumerate(g, cut=3)
