"""Exact interval sets and piecewise affine maps."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ugkit.intervals import (
    AffinePiece,
    Interval,
    PiecewiseAffineMap,
    TailPieces,
    UnboundedSupport,
    as_fraction,
    fraction_str,
    iset_difference,
    iset_intersection,
    iset_union,
    measure,
    normalize,
)

Q = Fraction


@st.composite
def intervals(draw):
    a = draw(st.integers(0, 16))
    b = draw(st.integers(a + 1, 17))
    return Interval(Q(a, 2), Q(b, 2))


ivsets = st.lists(intervals(), max_size=4)


def cells(s) -> set[int]:
    """Half-unit grid cells covered; a pointwise oracle for sets with half-integer ends."""
    return {k for iv in s for k in range(int(iv.lo * 2), int(iv.hi * 2))}


@settings(max_examples=300, deadline=None)
@given(ivsets, ivsets)
def test_set_operations_match_grid_oracle(a, b):
    assert cells(iset_union(a, b)) == cells(a) | cells(b)
    assert cells(iset_intersection(a, b)) == cells(a) & cells(b)
    assert cells(iset_difference(a, b)) == cells(a) - cells(b)
    assert measure(iset_union(a, b)) == Q(len(cells(a) | cells(b)), 2)


@settings(max_examples=100, deadline=None)
@given(ivsets)
def test_normalize_idempotent_and_disjoint(a):
    n = normalize(a)
    assert normalize(n) == n
    assert all(x.hi < y.lo for x, y in zip(n, n[1:]))


def test_parsing_and_printing():
    assert as_fraction("3/4") == Q(3, 4)
    assert as_fraction(2) == Q(2)
    assert fraction_str(Q(-6, 4)) == "-3/2"
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(ValueError):
        Interval(Q(1), Q(1))


@settings(max_examples=100, deadline=None)
@given(intervals(), intervals())
def test_affine_between_and_inverse(dom, img):
    p = AffinePiece.between(dom, img)
    assert p.image == img
    inv = p.inverse()
    assert inv.image == dom
    assert p.slope * inv.slope == 1
    for x in (dom.lo, dom.hi, (dom.lo + dom.hi) / 2):
        assert inv(p(x)) == x


def test_tail_pieces_geometry():
    t = TailPieces(first=3, first_power=2, acc=Q(4), d_top=Q(-1))
    p3, p4 = t.piece(3), t.piece(4)
    assert p3.dom == Interval(Q(-2), Q(-1)) and p3.image == Interval(Q(7, 2), Q(15, 4))
    assert p4.dom == Interval(Q(-3), Q(-2)) and p4.image == Interval(Q(15, 4), Q(31, 8))
    inv = t.inverse()
    assert inv.piece(4) == p4.inverse()
    assert inv.piece_at(Q(3.8)) == p4.inverse()
    assert t.piece_at(Q(-5, 2)) == p4
    assert [j for j, _ in inv.pieces_meeting(Interval(Q(7, 2), Q(31, 8)))] == [3, 4]
    assert inv.pieces_meeting(Interval(Q(5), Q(6))) == []
    with pytest.raises(UnboundedSupport):
        inv.pieces_meeting(Interval(Q(3), Q(4)))


def test_map_merge_and_compose():
    m = PiecewiseAffineMap((
        AffinePiece.between(Interval(Q(0), Q(1)), Interval(Q(0), Q(2))),
        AffinePiece.between(Interval(Q(1), Q(2)), Interval(Q(2), Q(4))),
    ))
    assert len(m.merged().pieces) == 1
    sq = m.compose(PiecewiseAffineMap((AffinePiece.between(Interval(Q(0), Q(1)), Interval(Q(0), Q(1, 2))),)))
    assert sq(Q(1)) == Q(1) and sq.pieces[0].slope == 1
    assert m.inverse()(Q(3)) == Q(3, 2)
    with pytest.raises(ValueError):
        m(Q(5))


def test_map_document_roundtrip():
    t = TailPieces(1, 1, Q(1), Q(0))
    m = PiecewiseAffineMap((AffinePiece.between(Interval(Q(2), Q(3)), Interval(Q(0), Q(1, 2))),), (t,))
    assert PiecewiseAffineMap.from_doc(m.to_doc()) == m
