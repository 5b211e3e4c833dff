"""Ultragraph data model, vertex-set algebra and generalized-vertex membership.

An ultragraph has a finite edge set.  Its vertex universe is a finite list of
named vertices, optionally followed by one countable family of sink vertices
``w_start, w_{start+1}, ...`` (the *tail*).  Every vertex set that can occur
(ranges, generalized vertices) is a finite explicit part plus, optionally,
every tail vertex from some threshold on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_CLOSURE_CAP = 2**20


class GraphError(ValueError):
    """Malformed graph document or illegal reference into a graph."""


class ClosureTooLarge(RuntimeError):
    pass


def natural_key(text: str) -> tuple:
    """Sort key that orders ``v2`` before ``v10``."""
    return tuple((0, int(tok)) if tok.isdigit() else (1, tok) for tok in re.split(r"(\d+)", text) if tok)


@dataclass(frozen=True)
class VertexId:
    """A vertex: explicit (``tail_index is None``) or the tail vertex with that index."""

    name: str
    tail_index: int | None = None

    def __post_init__(self):
        if self.tail_index is not None and self.tail_index < 1:
            raise GraphError(f"tail index must be positive, got {self.tail_index}")

    @property
    def is_tail(self) -> bool:
        return self.tail_index is not None

    def sort_key(self) -> tuple:
        if self.tail_index is None:
            return (0, natural_key(self.name))
        return (1, self.tail_index)

    def __str__(self) -> str:
        return self.name


def sorted_vertices(vs: Iterable[VertexId]) -> list[VertexId]:
    return sorted(vs, key=VertexId.sort_key)


@dataclass(frozen=True)
class VertexSet:
    """``explicit ∪ {w_i : i >= tail_from}``, kept in normal form.

    Normal form: no explicit tail vertex with index ``>= tail_from`` and the
    tail vertex ``tail_from - 1`` is never listed explicitly (it is absorbed by
    lowering the threshold).
    """

    explicit: frozenset[VertexId] = frozenset()
    tail_from: int | None = None

    def __post_init__(self):
        explicit = set(self.explicit)
        t = self.tail_from
        if t is not None:
            if t < 1:
                raise GraphError(f"tail threshold must be positive, got {t}")
            explicit = {v for v in explicit if not (v.is_tail and v.tail_index >= t)}
            by_index = {v.tail_index: v for v in explicit if v.is_tail}
            while t - 1 in by_index:
                explicit.discard(by_index.pop(t - 1))
                t -= 1
        object.__setattr__(self, "explicit", frozenset(explicit))
        object.__setattr__(self, "tail_from", t)

    @classmethod
    def of(cls, *vertices: VertexId, tail_from: int | None = None) -> VertexSet:
        return cls(frozenset(vertices), tail_from)

    def covers_by_tail(self, v: VertexId) -> bool:
        return self.tail_from is not None and v.is_tail and v.tail_index >= self.tail_from

    def __contains__(self, v: VertexId) -> bool:
        return v in self.explicit or self.covers_by_tail(v)

    def __bool__(self) -> bool:
        return bool(self.explicit) or self.tail_from is not None

    @property
    def is_finite(self) -> bool:
        return self.tail_from is None

    def __len__(self) -> int:
        if self.tail_from is not None:
            raise TypeError("infinite vertex set has no length")
        return len(self.explicit)

    def __iter__(self) -> Iterator[VertexId]:
        if self.tail_from is not None:
            raise TypeError("cannot iterate an infinite vertex set")
        return iter(sorted_vertices(self.explicit))

    def union(self, other: VertexSet) -> VertexSet:
        tails = [t for t in (self.tail_from, other.tail_from) if t is not None]
        return VertexSet(self.explicit | other.explicit, min(tails) if tails else None)

    def intersection(self, other: VertexSet) -> VertexSet:
        explicit = (
            (self.explicit & other.explicit)
            | {v for v in self.explicit if other.covers_by_tail(v)}
            | {v for v in other.explicit if self.covers_by_tail(v)}
        )
        if self.tail_from is not None and other.tail_from is not None:
            return VertexSet(explicit, max(self.tail_from, other.tail_from))
        return VertexSet(explicit)

    __or__ = union
    __and__ = intersection

    def issubset(self, other: VertexSet) -> bool:
        if not all(v in other for v in self.explicit):
            return False
        if self.tail_from is None:
            return True
        return other.tail_from is not None and other.tail_from <= self.tail_from

    __le__ = issubset

    def isdisjoint(self, other: VertexSet) -> bool:
        return not self.intersection(other)

    def sort_key(self) -> tuple:
        keys = tuple(v.sort_key() for v in sorted_vertices(self.explicit))
        if self.tail_from is not None:
            keys += ((2, self.tail_from),)
        return keys

    def names(self) -> list[str]:
        return [v.name for v in sorted_vertices(self.explicit)]

    def to_doc(self) -> dict:
        return {"vertices": self.names(), "tail_from": self.tail_from}

    def __str__(self) -> str:
        body = "{" + ",".join(self.names()) + "}"
        return body if self.tail_from is None else f"{body}+tail:{self.tail_from}"


EMPTY = VertexSet()


def vs_combine(op: str, a: VertexSet, b: VertexSet) -> VertexSet:
    """Union or intersection of two normalized vertex sets."""
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersection(b)
    raise ValueError(f"unknown vertex-set operation {op!r}")


@dataclass(frozen=True)
class Tail:
    prefix: str
    start: int = 1

    def name(self, index: int) -> str:
        return f"{self.prefix}{index}"


@dataclass(frozen=True)
class Edge:
    id: str
    source: VertexId
    range: VertexSet


@dataclass(frozen=True, eq=False)
class Ultragraph:
    """A validated ultragraph.  Build with :func:`validate_ultragraph` or :func:`make_graph`."""

    vertices: tuple[VertexId, ...]
    edges: tuple[Edge, ...]
    tail: Tail | None = None

    def __eq__(self, other):
        if not isinstance(other, Ultragraph):
            return NotImplemented
        return (self.vertices, self.edges, self.tail) == (other.vertices, other.edges, other.tail)

    def __hash__(self):
        return hash((self.vertices, self.edges, self.tail))

    @cached_property
    def _vertex_index(self) -> dict[str, VertexId]:
        return {v.name: v for v in self.vertices}

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _emitted(self) -> dict[VertexId, tuple[Edge, ...]]:
        out: dict[VertexId, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e)
        return {v: tuple(es) for v, es in out.items()}

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge: {edge_id}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_index

    def tail_vertex(self, index: int) -> VertexId:
        if self.tail is None or index < self.tail.start:
            raise GraphError(f"no tail vertex with index {index}")
        return VertexId(self.tail.name(index), index)

    def vertex(self, name: str) -> VertexId:
        v = self._vertex_index.get(name)
        if v is not None:
            return v
        if self.tail is not None:
            m = re.fullmatch(re.escape(self.tail.prefix) + r"(\d+)", name)
            if m and int(m.group(1)) >= self.tail.start:
                return VertexId(name, int(m.group(1)))
        raise GraphError(f"unknown vertex: {name}")

    def has_vertex(self, v: VertexId) -> bool:
        if v.is_tail:
            return self.tail is not None and v.tail_index >= self.tail.start and v.name == self.tail.name(v.tail_index)
        return self._vertex_index.get(v.name) == v

    def emitted(self, v: VertexId) -> tuple[Edge, ...]:
        """``s^{-1}(v)`` in declaration order."""
        return self._emitted.get(v, ())

    def is_sink(self, v: VertexId) -> bool:
        return not self.emitted(v)

    def is_regular(self, v: VertexId) -> bool:
        # finite edge sets: every emitter emits finitely many edges
        return bool(self.emitted(v))

    def edges_from_set(self, a: VertexSet) -> tuple[Edge, ...]:
        """``s^{-1}(A)``; tail vertices never emit."""
        return tuple(e for e in self.edges if e.source in a.explicit)

    @property
    def explicit_sinks(self) -> list[VertexId]:
        return [v for v in self.vertices if self.is_sink(v)]

    @property
    def emitters(self) -> list[VertexId]:
        return [v for v in self.vertices if not self.is_sink(v)]

    def all_vertices(self) -> VertexSet:
        return VertexSet(frozenset(self.vertices), self.tail.start if self.tail else None)

    def set_of(self, names: Iterable[str], tail_from: int | None = None) -> VertexSet:
        if tail_from is not None:
            if self.tail is None:
                raise GraphError("graph has no tail")
            tail_from = max(tail_from, self.tail.start)
        return VertexSet(frozenset(self.vertex(n) for n in names), tail_from)

    def parse_set(self, literal: str) -> VertexSet:
        """Parse ``"v2,v3"``, ``"w1+tail:3"`` or ``"+tail:3"``."""
        body, _, tail = literal.strip().partition("+tail:")
        names = [n.strip() for n in body.split(",") if n.strip()]
        return self.set_of(names, int(tail) if tail else None)

    def max_index(self) -> int:
        """Largest tail index mentioned anywhere in the graph (0 without a tail)."""
        if self.tail is None:
            return 0
        idx = [self.tail.start]
        for e in self.edges:
            idx += [v.tail_index for v in e.range.explicit if v.is_tail]
            if e.range.tail_from is not None:
                idx.append(e.range.tail_from)
        return max(idx)

    def finite_difference(self, a: VertexSet, b: VertexSet) -> VertexSet:
        """``a \\ b`` when that difference is finite."""
        explicit = {v for v in a.explicit if v not in b}
        if a.tail_from is not None:
            if b.tail_from is None:
                raise GraphError("difference is infinite")
            for j in range(a.tail_from, b.tail_from):
                v = self.tail_vertex(j)
                if v not in b:
                    explicit.add(v)
        return VertexSet(frozenset(explicit))

    def to_doc(self) -> dict:
        doc: dict = {
            "vertices": [v.name for v in self.vertices],
            "edges": [{"id": e.id, "source": e.source.name, "range": e.range.to_doc()} for e in self.edges],
        }
        if self.tail is not None:
            doc["tail"] = {"prefix": self.tail.prefix, "start": self.tail.start}
        return doc


def validate_ultragraph(doc: Mapping) -> Ultragraph:
    """Build a validated :class:`Ultragraph` from a graph document."""
    if not isinstance(doc, Mapping):
        raise GraphError("graph document must be a JSON object")
    names = doc.get("vertices", [])
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise GraphError("'vertices' must be a list of strings")
    tail = None
    if doc.get("tail") is not None:
        t = doc["tail"]
        try:
            tail = Tail(str(t["prefix"]), int(t.get("start", 1)))
        except (KeyError, TypeError, ValueError):
            raise GraphError("malformed tail declaration") from None
        if tail.start < 1 or not tail.prefix:
            raise GraphError("tail needs a nonempty prefix and a positive start")
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise GraphError(f"duplicate id: {n}")
        seen.add(n)
        if tail is not None:
            m = re.fullmatch(re.escape(tail.prefix) + r"(\d+)", n)
            if m and int(m.group(1)) >= tail.start:
                raise GraphError(f"duplicate id: {n} collides with the tail")
    skeleton = Ultragraph(tuple(VertexId(n) for n in names), (), tail)

    edges = []
    edge_ids: set[str] = set()
    for raw in doc.get("edges", []):
        try:
            eid, src, rng = str(raw["id"]), raw["source"], raw["range"]
        except (KeyError, TypeError):
            raise GraphError(f"malformed edge entry: {raw!r}") from None
        if eid in edge_ids:
            raise GraphError(f"duplicate id: {eid}")
        edge_ids.add(eid)
        source = skeleton.vertex(src)
        if source.is_tail:
            raise GraphError(f"tail vertex used as source: {src} (edge {eid})")
        if isinstance(rng, list):
            rng = {"vertices": rng}
        tail_from = rng.get("tail_from")
        if tail_from is not None and tail is None:
            raise GraphError(f"edge {eid} references a tail but the graph declares none")
        range_set = skeleton.set_of(rng.get("vertices", []), tail_from)
        if not range_set:
            raise GraphError(f"empty range: {eid}")
        edges.append(Edge(eid, source, range_set))
    return Ultragraph(skeleton.vertices, tuple(edges), tail)


def make_graph(
    vertices: Sequence[str],
    edges: Sequence[tuple[str, str, Sequence[str] | str]],
    tail: tuple[str, int] | None = None,
) -> Ultragraph:
    """Convenience builder; a range given as a string uses the ``"a,b+tail:N"`` syntax."""
    doc: dict = {"vertices": list(vertices), "edges": []}
    if tail is not None:
        doc["tail"] = {"prefix": tail[0], "start": tail[1]}
    for eid, src, rng in edges:
        if isinstance(rng, str):
            body, _, t = rng.partition("+tail:")
            rng_doc = {"vertices": [n for n in body.split(",") if n], "tail_from": int(t) if t else None}
        else:
            rng_doc = {"vertices": list(rng), "tail_from": None}
        doc["edges"].append({"id": eid, "source": src, "range": rng_doc})
    return validate_ultragraph(doc)


# ---------------------------------------------------------------------------
# Generalized vertices


@dataclass(frozen=True)
class G0Expression:
    """``(∩_{e∈X_1} r(e)) ∪ ... ∪ (∩_{e∈X_n} r(e)) ∪ F``."""

    terms: tuple[tuple[str, ...], ...]
    finite: VertexSet = field(default_factory=VertexSet)

    def evaluate(self, g: Ultragraph) -> VertexSet:
        out = self.finite
        for term in self.terms:
            part = g.edge(term[0]).range
            for eid in term[1:]:
                part = part & g.edge(eid).range
            out = out | part
        return out

    def to_doc(self) -> dict:
        return {"intersections": [list(t) for t in self.terms], "finite": self.finite.to_doc()}

    def __str__(self) -> str:
        parts = ["∩".join(f"r({e})" for e in t) for t in self.terms]
        if self.finite or not parts:
            parts.append(str(self.finite))
        return " ∪ ".join(parts)


@dataclass(frozen=True)
class G0Decision:
    member: bool
    witness: G0Expression | None = None


def g0_membership(g: Ultragraph, target: VertexSet) -> G0Decision:
    """Decide ``target ∈ 𝒢⁰``.

    Finite targets are always members.  Beyond the cut every range holds all
    or none of the tail, so a closure element containing the tail token must
    contain an intersection of tailed ranges; the smallest such element is the
    intersection of *all* tailed ranges.  The target is a member iff that
    intersection fits inside it, the rest being finite padding.
    """
    if target.tail_from is None:
        return G0Decision(True, G0Expression((), target))
    tailed = [e for e in g.edges if e.range.tail_from is not None]
    if not tailed:
        return G0Decision(False)

    def meet(edges: Sequence[Edge]) -> VertexSet:
        out = edges[0].range
        for e in edges[1:]:
            out = out & e.range
        return out

    if not meet(tailed) <= target:
        return G0Decision(False)
    # shrink to an inclusion-minimal set of edges whose intersection still fits
    chosen = list(tailed)
    for e in tailed:
        trial = [f for f in chosen if f is not e]
        if trial and meet(trial) <= target:
            chosen = trial
    core = meet(chosen)
    padding = g.finite_difference(target, core)
    return G0Decision(True, G0Expression((tuple(e.id for e in chosen),), padding))


def _quotient_universe(g: Ultragraph, cut: int) -> list:
    universe: list = sorted_vertices(g.vertices)
    if g.tail is not None:
        universe += [g.tail_vertex(i) for i in range(g.tail.start, cut)]
        universe.append(None)  # the collapsed tail token
    return universe


def _quotient_mask(a: VertexSet, position: Mapping, cut: int) -> int:
    mask = 0
    for v in a.explicit:
        mask |= 1 << position[v]
    if a.tail_from is not None:
        for v, i in position.items():
            if v is not None and v.is_tail and v.tail_index >= a.tail_from:
                mask |= 1 << i
        mask |= 1 << position[None]
    return mask


def g0_enumerate(g: Ultragraph, cut: int = 1, cap: int = DEFAULT_CLOSURE_CAP) -> list[VertexSet]:
    """All elements of the ∪/∩ closure over the quotient universe.

    The quotient keeps explicit vertices and tail vertices with index below
    ``cut``; the remaining tail collapses to one token.  Every union of
    intersections of generators is produced (the lattice is distributive), so
    the result is the full closure, ∅ included, in canonical order.
    """
    if g.tail is not None:
        floor = g.max_index()
        explicit_tail = [v.tail_index for e in g.edges for v in e.range.explicit if v.is_tail]
        if cut < floor or any(i >= cut for i in explicit_tail):
            raise GraphError(f"cut {cut} is below an index used by the graph")
        cut = max(cut, g.tail.start)
    universe = _quotient_universe(g, cut)
    position = {v: i for i, v in enumerate(universe)}

    singletons = [1 << position[v] for v in universe if v is not None]
    ranges = [_quotient_mask(e.range, position, cut) for e in g.edges]

    meets = set(singletons) | set(ranges)
    frontier = set(ranges)
    while frontier:
        fresh = {a & b for a in frontier for b in ranges} - meets
        meets |= fresh
        frontier = fresh
    meets.discard(0)

    joins = {0}
    for m in sorted(meets):
        joins |= {j | m for j in joins}
        if len(joins) > cap:
            raise ClosureTooLarge(f"closure too large: more than {cap} elements")

    tail_token = position.get(None)
    out = []
    for mask in joins:
        members = [universe[i] for i in range(len(universe)) if mask >> i & 1 and universe[i] is not None]
        tail_from = cut if tail_token is not None and mask >> tail_token & 1 else None
        out.append(VertexSet(frozenset(members), tail_from))
    out.sort(key=lambda s: (len(s.sort_key()), s.sort_key()))
    return out


def vertex_names(vs: Iterable[VertexId]) -> list[str]:
    return [v.name for v in sorted_vertices(vs)]


def iter_pairs(items: Sequence) -> Iterator[tuple]:
    return chain.from_iterable(((a, b) for b in items[i + 1 :]) for i, a in enumerate(items))
