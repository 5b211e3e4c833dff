"""Interval and discrete branching systems: construction, validation, the global map."""

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from ugkit.branching import (
    DiscreteBranchingSystem,
    assemble_F,
    bs_from_doc,
    build_discrete_bs_from_peeling,
    build_no_exit_degenerate_bs,
    build_standard_interval_bs,
    cycle_permutation_system,
    validate_bs,
)
from ugkit.catalog import (
    chain,
    worked_example,
    loop_with_exit,
    random_acyclic_graph,
    random_cyclic_graph,
    random_graph,
    random_tailed_graph,
    single_loop,
    tail_edge,
    two_cycle,
    two_loops,
)
from ugkit.core import GraphError
from ugkit.intervals import AffinePiece, Interval, PiecewiseAffineMap, measure, iset_union
from ugkit.paths_cycles import enumerate_simple_cycles, no_exit_cycles
from ugkit.permutative import permutativity_condition
from ugkit.representation import cycle_map

Q = Fraction


def interval_systems(seed=5):
    rng = random.Random(seed)
    gs = [random_graph(rng) for _ in range(25)] + [random_tailed_graph(rng) for _ in range(10)]
    gs += [worked_example(), two_loops(), single_loop(), tail_edge(1), tail_edge(4), chain()]
    return [build_standard_interval_bs(g) for g in gs]


def test_standard_systems_validate():
    for bs in interval_systems():
        rep = validate_bs(bs)
        assert rep.passed, (bs.graph.to_doc(), rep.to_doc())


def test_radon_nikodym_product_is_one():
    for bs in interval_systems():
        for e, fe in bs.f.items():
            pieces = list(fe.pieces) + [p for t in fe.tails for p in t.iter_pieces(6)]
            inverse = {p.dom: p for p in bs.f_inverse[e].pieces}
            inverse.update({p.dom: p for t in bs.f_inverse[e].tails for p in t.iter_pieces(6)})
            for p in pieces:
                assert p.slope * inverse[p.image].slope == 1


def test_measures_of_R_and_D():
    for bs in interval_systems():
        g = bs.graph
        assert measure(iset_union(*bs.R.values())) == len(g.edges)
        for v in g.emitters:
            assert measure(bs.D_vertex(v)) == sum(measure(bs.R[e.id]) for e in g.emitted(v))


def test_global_map_is_nonsingular():
    for bs in interval_systems():
        F = assemble_F(bs)
        assert all(p.slope > 0 for p in F.pieces)
        for t in F.tails:
            assert all(p.slope > 0 for p in t.iter_pieces(8))


def test_worked_example_layout(ex22):
    bs = build_standard_interval_bs(ex22)
    assert bs.R["e3"] == (Interval(Q(2), Q(3)),)
    assert bs.D_vertex(ex22.vertex("v3")) == (Interval(Q(-1), Q(0)),)
    assert bs.D_vertex(ex22.vertex("v6")) == (Interval(Q(1), Q(2)), Interval(Q(3), Q(4)))
    # f_e1 takes D_v3 then D_v2 (sorted) onto the two halves of R_e1
    assert [p.image for p in bs.f["e1"].pieces] == [Interval(Q(0), Q(1, 2)), Interval(Q(1, 2), Q(1))]


def test_worked_example_global_map_piece_count(ex22):
    bs = build_standard_interval_bs(ex22)
    # one inverse piece per unit component of each range
    assert len(assemble_F(bs).pieces) == sum(len(e.range) for e in ex22.edges) == 9
    merged = assemble_F(bs, merge=True)
    assert len(merged.pieces) == 6
    F = assemble_F(bs)
    for k in range(0, 5 * 8):
        x = Q(k, 8)
        assert merged(x) == F(x)


def test_global_map_tail_and_identity():
    bs = build_standard_interval_bs(tail_edge(2))
    F = assemble_F(bs)
    # w1 is a sink on [-1, 0]; w2, w3, ... follow leftwards and feed the halves of [0, 1]
    assert F(Q(-5)) == Q(-5)
    assert F(Q(1, 4)) == Q(-3, 2)
    assert F(Q(5, 8)) == Q(-5, 2)


def test_document_roundtrip():
    for bs in interval_systems()[:10] + [build_discrete_bs_from_peeling(worked_example())]:
        assert bs_from_doc(bs.to_doc()).to_doc() == bs.to_doc()


def test_corruption_is_detected(ex22):
    bs = build_standard_interval_bs(ex22)
    R = dict(bs.R, e2=(Interval(Q(1, 2), Q(2)),))
    rep = validate_bs(replace(bs, R=R))
    assert not rep.check(1).passed and "R_e1" in rep.check(1).witness

    p = bs.f["e3"].pieces[0]
    bent = PiecewiseAffineMap((AffinePiece(p.dom, p.slope * 2, p.offset),))
    rep = validate_bs(replace(bs, f=dict(bs.f, e3=bent)))
    assert rep.check(5).witness.startswith("f_e3: image differs")


def test_degenerate_system_has_identity_cycle_map():
    rng = random.Random(9)
    for _ in range(10):
        g = random_cyclic_graph(rng)
        for c in no_exit_cycles(g):
            bs = build_no_exit_degenerate_bs(g, c)
            assert validate_bs(bs).passed
            composite = bs.f[c.path[-1]]
            for e in reversed(c.path[:-1]):
                composite = bs.f[e].compose(composite)
            assert composite.pieces == (AffinePiece(Interval(Q(0), Q(1)), Q(1), Q(0)),)
    with pytest.raises(GraphError, match="exit"):
        build_no_exit_degenerate_bs(loop_with_exit(), ["e"])
    with pytest.raises(GraphError, match="simple cycle"):
        build_no_exit_degenerate_bs(two_cycle(), ["e"])


# -- discrete systems ------------------------------------------------------


def test_worked_example_discrete_indices(ex22):
    d = build_discrete_bs_from_peeling(ex22)
    assert validate_bs(d).passed
    # sinks one index each, then |R_e| = sum of |D_u| over u in r(e)
    size = {v.name: 1 for v in ex22.explicit_sinks}
    size["v10"] = 2
    size["v2"] = 1
    size["v6"] = 3 + 2
    size["v1"] = 2
    assert {v.name: len(d.D[v]) for v in ex22.vertices} == size
    assert d.max_index() == 16


def test_discrete_synthesis_domain():
    rng = random.Random(13)
    gs = [random_graph(rng) for _ in range(40)] + [random_acyclic_graph(rng) for _ in range(40)]
    built = 0
    for g in gs:
        ok = not enumerate_simple_cycles(g) and permutativity_condition(g).holds
        if ok:
            d = build_discrete_bs_from_peeling(g)
            assert validate_bs(d).passed
            built += 1
        else:
            with pytest.raises(GraphError):
                build_discrete_bs_from_peeling(g)
    assert built >= 10


def test_discrete_synthesis_rejects():
    with pytest.raises(GraphError, match="acyclicity"):
        build_discrete_bs_from_peeling(single_loop())
    with pytest.raises(GraphError, match="finite"):
        build_discrete_bs_from_peeling(tail_edge())


def test_discrete_corruption_is_detected(ex22):
    d = build_discrete_bs_from_peeling(ex22)
    f = dict(d.f, e3={k: v + 1 for k, v in d.f["e3"].items()})
    rep = validate_bs(DiscreteBranchingSystem(d.graph, d.R, d.D, f))
    assert not rep.check(5).passed


@pytest.mark.parametrize("k, perm", [(1, [2, 1, 3]), (2, [3, 1, 2]), (3, [1, 2, 4, 3])])
def test_cycle_permutation_system(k, perm):
    d = cycle_permutation_system(k, perm)
    assert validate_bs(d).passed
    path = [f"a{i}" for i in range(1, k + 1)]
    assert cycle_map(d, path) == {x: perm[x - 1] for x in range(1, len(perm) + 1)}
    with pytest.raises(ValueError):
        cycle_permutation_system(k, [1, 1])


def test_documented_examples(ex22):
    bs = build_standard_interval_bs(single_loop())
    assert bs.f["e"].pieces == (AffinePiece(Interval(Q(0), Q(1)), Q(1), Q(0)),)
    F = assemble_F(bs)
    assert all(F(Q(k, 4)) == Q(k, 4) for k in range(-4, 9))

    F = assemble_F(build_standard_interval_bs(two_loops()), merge=True)
    assert [(p.dom, p.slope, p.offset) for p in F.pieces] == [
        (Interval(Q(0), Q(1)), Q(2), Q(0)),
        (Interval(Q(1), Q(2)), Q(2), Q(-2)),
    ]

    tail = build_standard_interval_bs(tail_edge(1)).f["e"].tails[0]
    assert tail.piece(1) == AffinePiece.between(Interval(Q(-1), Q(0)), Interval(Q(0), Q(1, 2)))
    assert tail.piece(2) == AffinePiece.between(Interval(Q(-2), Q(-1)), Interval(Q(1, 2), Q(3, 4)))

    g = two_cycle()
    bs = build_no_exit_degenerate_bs(g, ["e", "f"])
    assert bs.f["e"].pieces == (AffinePiece(Interval(Q(1), Q(2)), Q(1), Q(-1)),)
    assert bs.f["f"].pieces == (AffinePiece(Interval(Q(0), Q(1)), Q(1), Q(1)),)

    bs = build_standard_interval_bs(ex22)
    rep = validate_bs(replace(bs, R=dict(bs.R, e2=(Interval(Q(0), Q(1)),))))
    assert rep.check(1).witness == "R_e1 ∩ R_e2 ⊇ [0, 1]"


def test_single_edge_discrete():
    from ugkit.catalog import single_edge

    g = single_edge()
    d = build_discrete_bs_from_peeling(g)
    assert d.f["e"] == {1: 2} and d.D[g.vertex("u")] == {2}
