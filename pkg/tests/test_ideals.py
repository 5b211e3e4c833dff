"""Hereditary saturated closure, essentiality and the uniqueness decomposition."""

import itertools
import random

import pytest

from ugkit.catalog import chain, worked_example, loop_with_exit, random_cyclic_graph, random_graph, single_loop, tail_edge, two_cycle
from ugkit.core import VertexSet, make_graph, vertex_names
from ugkit.ideals import (
    NONZERO_OBLIGATION,
    InfiniteDataError,
    hs_closure,
    is_essential,
    is_hereditary_saturated,
    uniqueness_decomposition,
    uniqueness_report,
)
from ugkit.paths_cycles import condition_l

import oracles


def graphs(n=40, seed=11):
    rng = random.Random(seed)
    out = [random_graph(rng) for _ in range(n)] + [random_cyclic_graph(rng) for _ in range(n // 2)]
    return out + [worked_example(), single_loop(), two_cycle(), loop_with_exit()]


def test_hs_closure_matches_brute_force():
    for g in graphs():
        if len(g.vertices) > 6:
            continue
        for k in range(len(g.vertices) + 1):
            for seed in itertools.combinations(g.vertices, k):
                W = hs_closure(g, seed).W
                assert W == oracles.minimal_hs(g, set(seed)), (g.to_doc(), seed)
                chk = is_hereditary_saturated(g, W)
                assert chk.hereditary and chk.saturated


def test_is_essential_matches_path_enumeration():
    for g in graphs():
        for k in range(len(g.vertices) + 1):
            for W in itertools.combinations(g.vertices, k):
                assert is_essential(g, W).essential == oracles.essential(g, set(W)), (g.to_doc(), W)


def test_hs_check_reports_counterexamples():
    g = worked_example()
    chk = is_hereditary_saturated(g, [g.vertex("v1")])
    assert not chk.hereditary and chk.not_hereditary == ("e1",)
    chk = is_hereditary_saturated(g, [g.vertex("v8"), g.vertex("v9")])
    assert chk.hereditary and chk.not_saturated == ("v10",)


def test_documented_examples(ex22):
    v = ex22.vertex
    assert is_hereditary_saturated(ex22, [v("v2"), v("v7")]).saturated
    assert is_hereditary_saturated(ex22, [v("v2")]).not_hereditary == ("e3",)
    assert is_hereditary_saturated(ex22, []).hereditary
    assert hs_closure(ex22, [v("v7")]).W == {v("v2"), v("v7")}
    assert hs_closure(ex22, []).W == frozenset()
    g = chain()
    assert hs_closure(g, [g.vertex("w")]).W == set(g.vertices)
    assert is_essential(g, [g.vertex("w")]).essential
    g = make_graph(["u", "v", "w", "z"], [("e", "u", ["v"]), ("f", "v", ["w"])])
    ess = is_essential(g, [g.vertex("w")])
    assert not ess.essential and ess.orphan.name == "z"
    assert uniqueness_decomposition(make_graph(["a"], [])).X1 == frozenset()


def test_tailed_inputs_rejected():
    g = tail_edge()
    with pytest.raises(InfiniteDataError, match="hs operations require finite data"):
        uniqueness_decomposition(g)
    with pytest.raises(InfiniteDataError):
        hs_closure(g, [g.vertex("u")])
    with pytest.raises(InfiniteDataError):
        hs_closure(g, VertexSet.of(tail_from=1))


def test_essential_with_tail_names_a_tail_orphan():
    g = tail_edge()
    ess = is_essential(g, [g.vertex("u")])
    assert not ess.essential and ess.orphan.name == "w1"


def test_decomposition_examples():
    dec = uniqueness_decomposition(loop_with_exit())
    assert not dec.X1 and dec.disjoint
    g = two_cycle()
    dec = uniqueness_decomposition(g)
    assert dec.X1 == frozenset(g.vertices) and dec.W2.W == frozenset()


def test_decomposition_coherence_and_essentiality():
    for g in graphs():
        dec = uniqueness_decomposition(g)
        assert condition_l(g).holds == (not dec.X1)
        assert dec.disjoint
        for W in (dec.W1.W, dec.W2.W):
            chk = is_hereditary_saturated(g, W)
            assert chk.hereditary and chk.saturated
        rep = uniqueness_report(g)
        assert rep.essential
        assert rep.certificate_obligations[0] == NONZERO_OBLIGATION
        assert len(rep.certificate_obligations) == 1 + len(rep.no_exit_cycles)


def test_decomposition_documented_examples(ex22):
    dec = uniqueness_decomposition(ex22)
    assert not dec.X1 and not dec.W1.W and dec.W2.W == frozenset(ex22.vertices)
    assert list(uniqueness_report(ex22).certificate_obligations) == [NONZERO_OBLIGATION]
    g = make_graph(["v", "a", "b"], [("e", "v", ["v"]), ("f", "a", ["b"])])
    dec = uniqueness_decomposition(g)
    assert vertex_names(dec.W2.W) == ["a", "b"]
    g = single_loop()
    dec = uniqueness_decomposition(g)
    assert dec.X1 == dec.W1.W == {g.vertex("v")} and not dec.W2.W
    assert len(uniqueness_report(g).certificate_obligations) == 2
