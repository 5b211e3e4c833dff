"""Extreme vertices, the peeling sequence and the permutativity criterion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Edge, GraphError, Ultragraph, VertexId, VertexSet, natural_key, sorted_vertices, vertex_names


@dataclass(frozen=True)
class Extreme:
    vset: VertexSet
    edge: str
    tag: str  # "fin" when vset = r(edge), "ini" when vset = {s(edge)}

    def to_doc(self) -> dict:
        return {"set": self.vset.names(), "edge": self.edge, "tag": self.tag}


def _require_finite(g: Ultragraph) -> None:
    if not g.is_finite:
        raise GraphError("peeling requires a finite graph (no tail)")


def _isolated(vertices: Iterable[VertexId], edges: Iterable[Edge]) -> frozenset[VertexId]:
    edges = list(edges)
    touched = {e.source for e in edges} | {v for e in edges for v in e.range.explicit}
    return frozenset(v for v in vertices if v not in touched)


def isolated_vertices(g: Ultragraph) -> frozenset[VertexId]:
    """Vertices that are neither a source nor in any range."""
    _require_finite(g)
    return _isolated(g.vertices, g.edges)


def _extremes(edges: list[Edge]) -> list[Extreme]:
    """Extreme data of the ultragraph with edge list ``edges``, one per edge, ``fin`` preferred."""
    out = []
    for e in edges:
        others = [f for f in edges if f is not e]
        other_ranges = set().union(*(f.range.explicit for f in others))
        sources = {f.source for f in edges}
        rng = e.range.explicit
        if not (rng & other_ranges) and not (rng & sources):
            out.append(Extreme(e.range, e.id, "fin"))
            continue
        all_ranges = other_ranges | rng
        if e.source not in {f.source for f in others} and e.source not in all_ranges:
            out.append(Extreme(VertexSet.of(e.source), e.id, "ini"))
    return sorted(out, key=lambda x: natural_key(x.edge))


def extreme_vertices(g: Ultragraph, both: bool = False) -> list[Extreme]:
    """Extreme vertices with their extreme edges.

    With ``both`` set, an edge whose range and source are both extreme
    contributes two entries; otherwise the range wins.
    """
    _require_finite(g)
    edges = list(g.edges)
    if not both:
        return _extremes(edges)
    out = []
    for e in edges:
        others = [f for f in edges if f is not e]
        other_ranges = set().union(*(f.range.explicit for f in others))
        sources = {f.source for f in edges}
        if not (e.range.explicit & other_ranges) and not (e.range.explicit & sources):
            out.append(Extreme(e.range, e.id, "fin"))
        if e.source not in {f.source for f in others} and e.source not in other_ranges | e.range.explicit:
            out.append(Extreme(VertexSet.of(e.source), e.id, "ini"))
    return sorted(out, key=lambda x: (natural_key(x.edge), x.tag))


@dataclass(frozen=True)
class PeelLevel:
    X: tuple[Extreme, ...]
    Y: tuple[str, ...]
    I: frozenset[VertexId]
    vertices: frozenset[VertexId]  # vertex set of the peeled graph after this level
    edges: tuple[str, ...]

    @property
    def X_bar(self) -> frozenset[VertexId]:
        return frozenset(v for x in self.X for v in x.vset.explicit)

    def fin(self) -> list[VertexSet]:
        return [x.vset for x in self.X if x.tag == "fin"]

    def ini(self) -> list[VertexSet]:
        return [x.vset for x in self.X if x.tag == "ini"]

    def to_doc(self) -> dict:
        return {
            "X": [x.to_doc() for x in self.X],
            "Y": list(self.Y),
            "I": vertex_names(self.I),
            "remaining_vertices": vertex_names(self.vertices),
            "remaining_edges": list(self.edges),
        }


@dataclass(frozen=True)
class PeelTrace:
    I0: frozenset[VertexId]
    levels: tuple[PeelLevel, ...]

    def to_doc(self) -> dict:
        return {"I0": vertex_names(self.I0), "levels": [lv.to_doc() for lv in self.levels]}


def peel_sequence(g: Ultragraph) -> PeelTrace:
    """Remove extreme data and newly isolated vertices level by level until nothing is extreme."""
    _require_finite(g)
    I0 = isolated_vertices(g)
    vertices = frozenset(g.vertices) - I0
    edges = list(g.edges)
    levels = []
    while True:
        X = _extremes(edges)
        if not X:
            break
        Y = tuple(x.edge for x in X)
        x_bar = frozenset(v for x in X for v in x.vset.explicit)
        rest = [e for e in edges if e.id not in Y]
        left = vertices - x_bar
        I = _isolated(left, rest)
        vertices = left - I
        edges = rest
        levels.append(PeelLevel(tuple(X), Y, I, vertices, tuple(e.id for e in edges)))
    return PeelTrace(I0, tuple(levels))


@dataclass(frozen=True)
class Permutativity:
    holds: bool
    n: int | None
    certificate: str | None = None

    def to_doc(self) -> dict:
        return {"holds": self.holds, "n": self.n, "certificate": self.certificate}


def _touched(g: Ultragraph) -> frozenset[VertexId]:
    return frozenset({e.source for e in g.edges} | {v for e in g.edges for v in e.range.explicit})


def permutativity_condition(g: Ultragraph, trace: PeelTrace | None = None) -> Permutativity:
    """Least ``n`` with ``X_1..X_n`` nonempty and ``∪r ∪ s = ∪_{i≤n} (X̄_i ∪ I_i)``."""
    trace = trace or peel_sequence(g)
    target = _touched(g)
    covered: set[VertexId] = set()
    for n, lv in enumerate(trace.levels, start=1):
        covered |= lv.X_bar | lv.I
        if covered == target:
            cert = (
                f"peeling exhausts the graph after {n} level(s); every representation with "
                "H_r(e) = ⊕_(v∈r(e)) H_v is permutative"
            )
            return Permutativity(True, n, cert)
    return Permutativity(False, None)


@dataclass(frozen=True)
class ItemCheck:
    item: int
    passed: bool
    witness: str | None = None

    def to_doc(self) -> dict:
        return {"item": self.item, "passed": self.passed, "witness": self.witness}


@dataclass(frozen=True)
class L1Report:
    n: int
    items: tuple[ItemCheck, ...]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def to_doc(self) -> dict:
        return {"n": self.n, "passed": self.passed, "items": [i.to_doc() for i in self.items]}


def check_l1_invariants(g: Ultragraph, trace: PeelTrace) -> L1Report:
    """Check the four structural facts that the permutativity construction relies on."""
    if trace != peel_sequence(g):
        raise GraphError("trace does not belong to this graph")
    perm = permutativity_condition(g, trace)
    if not perm.holds:
        raise GraphError("permutativity condition fails for this graph")
    n = perm.n
    levels = trace.levels[:n]
    fin = [lv.fin() for lv in levels]
    ini = [lv.ini() for lv in levels]

    bad1 = []
    for N, lv in enumerate(levels, start=1):
        sets = [x.vset for x in lv.X]
        for i, a in enumerate(sets):
            for b in sets[i + 1 :]:
                if not a.isdisjoint(b):
                    bad1.append(f"level {N}: {a} meets {b}")

    bad2 = []
    for N in range(1, n + 1):
        earlier = [a for lst in fin[: N - 1] for a in lst]
        for a in fin[N - 1]:
            for e in g.edges_from_set(a):
                if e.range not in earlier:
                    bad2.append(f"level {N}: r({e.id}) = {e.range} is not an earlier final vertex")

    bad3 = []
    for N, lv in enumerate(levels, start=1):
        upto = [a for lst in fin[:N] for a in lst]
        for v in sorted_vertices(lv.I):
            for e in g.emitted(v):
                if e.range not in upto:
                    bad3.append(f"level {N}: r({e.id}) = {e.range} from isolated {v}")

    pool = set()
    for N, lv in enumerate(levels, start=1):
        pool |= {v for a in fin[N - 1] for v in a.explicit} | set(lv.I)
    bad4 = []
    for N in range(1, n + 1):
        later = {v for lst in ini[N:] for a in lst for v in a.explicit}
        for a in ini[N - 1]:
            for e in g.edges_from_set(a):
                outside = [v for v in e.range.explicit if v not in pool and v not in later]
                if outside:
                    bad4.append(f"level {N}: r({e.id}) leaves the allowed set at {vertex_names(outside)}")

    items = tuple(
        ItemCheck(k, not bad, bad[0] if bad else None) for k, bad in enumerate((bad1, bad2, bad3, bad4), start=1)
    )
    return L1Report(n, items)
