"""Hereditary and saturated vertex sets, essentiality, and the uniqueness decomposition.

A hereditary saturated family is stored through its vertex union ``W``; the
family itself is ``{A ∈ 𝒢⁰ : A ⊆ W}``.  Everything here needs finite data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import GraphError, Ultragraph, VertexId, VertexSet, sorted_vertices, vertex_names
from .paths_cycles import Cycle, condition_l, cycle_vertices


class InfiniteDataError(GraphError):
    def __init__(self, what: str = ""):
        super().__init__("hs operations require finite data" + (f": {what}" if what else ""))


@dataclass(frozen=True)
class HSSet:
    W: frozenset[VertexId]

    def contains_set(self, a: VertexSet) -> bool:
        """Membership of ``A`` in the family."""
        return a.is_finite and a.explicit <= self.W

    def to_doc(self) -> list[str]:
        return vertex_names(self.W)


def _as_vertex_set(g: Ultragraph, W) -> frozenset[VertexId]:
    if isinstance(W, HSSet):
        W = W.W
    if isinstance(W, VertexSet):
        if not W.is_finite:
            raise InfiniteDataError(str(W))
        W = W.explicit
    out = frozenset(W)
    for v in out:
        if v.is_tail:
            raise InfiniteDataError(f"{v} is a tail vertex")
        if not g.has_vertex(v):
            raise GraphError(f"unknown vertex: {v}")
    return out


def _range_within(rng: VertexSet, W: frozenset[VertexId]) -> bool:
    return rng.is_finite and rng.explicit <= W


@dataclass(frozen=True)
class HSCheck:
    hereditary: bool
    saturated: bool
    not_hereditary: tuple[str, ...] = ()  # edges e with s(e) ∈ W, r(e) ⊄ W
    not_saturated: tuple[str, ...] = ()  # regular vertices outside W with every range inside

    def to_doc(self) -> dict:
        return {
            "hereditary": self.hereditary,
            "saturated": self.saturated,
            "hereditary_counterexamples": list(self.not_hereditary),
            "saturated_counterexamples": list(self.not_saturated),
        }


def is_hereditary_saturated(g: Ultragraph, W) -> HSCheck:
    W = _as_vertex_set(g, W)
    bad_h = tuple(e.id for e in g.edges if e.source in W and not _range_within(e.range, W))
    bad_s = tuple(
        v.name
        for v in g.vertices
        if v not in W and g.is_regular(v) and all(_range_within(e.range, W) for e in g.emitted(v))
    )
    return HSCheck(not bad_h, not bad_s, bad_h, bad_s)


def hs_closure(g: Ultragraph, W0) -> HSSet:
    """Smallest hereditary saturated set containing ``W0``.

    Least fixpoint of two rules: add ``r(e)`` whenever ``s(e)`` is in, add a
    regular vertex once all of its ranges are in.
    """
    W = set(_as_vertex_set(g, W0))
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            if e.source in W and not _range_within(e.range, W):
                if not e.range.is_finite:
                    raise InfiniteDataError(f"range of {e.id} is infinite")
                W |= e.range.explicit
                changed = True
        for v in g.vertices:
            if v not in W and g.is_regular(v) and all(_range_within(e.range, W) for e in g.emitted(v)):
                W.add(v)
                changed = True
    return HSSet(frozenset(W))


def reaches(g: Ultragraph, W: Iterable[VertexId]) -> frozenset[VertexId]:
    """Vertices ``v`` having a path ``α`` (``|α| ≥ 1``) with ``s(α) = v`` and ``r(α) ∩ W ≠ ∅``."""
    W = frozenset(W)
    hit: set[VertexId] = set()
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            if e.source in hit:
                continue
            rng = e.range
            if any(v in W or v in hit for v in rng.explicit) or (rng.tail_from is not None and any(
                v.is_tail and v in rng for v in W
            )):
                hit.add(e.source)
                changed = True
    return frozenset(hit)


@dataclass(frozen=True)
class Essentiality:
    essential: bool
    orphan: VertexId | None = None

    def to_doc(self) -> dict:
        return {"essential": self.essential, "orphan": self.orphan.name if self.orphan else None}


def is_essential(g: Ultragraph, SH) -> Essentiality:
    """Every vertex outside ``W`` must lead into ``W`` along a path of positive length."""
    W = _as_vertex_set(g, SH)
    ok = reaches(g, W)
    for v in sorted_vertices(g.vertices):
        if v not in W and v not in ok:
            return Essentiality(False, v)
    if g.tail is not None:
        # tail vertices are sinks and W is finite
        j = g.tail.start
        while g.tail_vertex(j) in W:
            j += 1
        return Essentiality(False, g.tail_vertex(j))
    return Essentiality(True)


@dataclass(frozen=True)
class Decomposition:
    X1: frozenset[VertexId]
    W1: HSSet
    W2: HSSet
    disjoint: bool

    def to_doc(self) -> dict:
        return {
            "X1": vertex_names(self.X1),
            "W1": self.W1.to_doc(),
            "W2": self.W2.to_doc(),
            "disjoint": self.disjoint,
        }


def _require_finite(g: Ultragraph) -> None:
    if not g.is_finite:
        raise InfiniteDataError("graph has a tail")


def uniqueness_decomposition(g: Ultragraph) -> Decomposition:
    """Split off the no-exit cycles (``W1``) and the part that never reaches them (``W2``)."""
    _require_finite(g)
    cl = condition_l(g)
    X1 = frozenset(v for c in cl.violations for v in cycle_vertices(g, c))
    W1 = hs_closure(g, X1)
    reach_w1 = reaches(g, W1.W)
    W2 = HSSet(frozenset(v for v in g.vertices if v not in reach_w1))
    return Decomposition(X1, W1, W2, not (W1.W & W2.W))


@dataclass(frozen=True)
class UniquenessReport:
    condition_l: bool
    no_exit_cycles: tuple[Cycle, ...]
    X1: frozenset[VertexId]
    W1: HSSet
    W2: HSSet
    disjoint: bool
    essential: bool
    certificate_obligations: tuple[str, ...] = field(default=())

    def to_doc(self) -> dict:
        return {
            "condition_l": self.condition_l,
            "no_exit_cycles": [list(c.path) for c in self.no_exit_cycles],
            "X1": vertex_names(self.X1),
            "W1": self.W1.to_doc(),
            "W2": self.W2.to_doc(),
            "disjoint": self.disjoint,
            "essential": self.essential,
            "certificate_obligations": list(self.certificate_obligations),
        }


NONZERO_OBLIGATION = "phi(p_A) != 0 for every nonempty A in G^0"


def uniqueness_report(g: Ultragraph) -> UniquenessReport:
    """Combinatorial side of the general uniqueness theorem for a concrete graph.

    The obligations are what a homomorphism out of ``C*(G)`` still has to meet
    to be injective: nonzero projections, plus full-circle spectrum for the
    image of ``s_α`` on every simple cycle without exits.
    """
    _require_finite(g)
    cl = condition_l(g)
    dec = uniqueness_decomposition(g)
    joint = hs_closure(g, dec.W1.W | dec.W2.W)
    obligations = [NONZERO_OBLIGATION]
    obligations += [
        f"spectrum of phi(s_{c}) contains the unit circle" for c in cl.violations
    ]
    return UniquenessReport(
        cl.holds,
        cl.violations,
        dec.X1,
        dec.W1,
        dec.W2,
        dec.disjoint,
        is_essential(g, joint).essential,
        tuple(obligations),
    )
