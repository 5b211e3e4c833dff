"""Branching systems on the line (Lebesgue measure) and on the positive integers.

An interval system places every edge on a unit interval ``R_e`` and every
vertex on a finite union ``D_v``; the maps ``f_e : D_{r(e)} -> R_e`` are
increasing and affine on each piece.  Tail sinks are laid out lazily on the
negative axis and the corresponding pieces of ``f_e`` are generated on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import networkx as nx

from .core import GraphError, Ultragraph, VertexId, VertexSet, natural_key, sorted_vertices, validate_ultragraph
from .intervals import (
    AffinePiece,
    Interval,
    PiecewiseAffineMap,
    TailPieces,
    as_fraction,
    fraction_str,
    iset_difference,
    iset_intersection,
    iset_union,
    normalize,
    pairwise_overlaps,
)
from .paths_cycles import Cycle, composability_graph, cycle_exits, is_cycle

DEFAULT_HORIZON = 8


@dataclass(frozen=True)
class LineSet:
    """``finite ∪ (-∞, ray_hi]`` as a subset of the real line."""

    finite: tuple[Interval, ...] = ()
    ray_hi: Fraction | None = None

    @property
    def is_bounded(self) -> bool:
        return self.ray_hi is None

    def __bool__(self) -> bool:
        return bool(self.finite) or self.ray_hi is not None


@dataclass(frozen=True)
class TailLayout:
    """Tail vertex ``w_j`` sits on ``[top - (j - start) - 1, top - (j - start)]``."""

    start: int
    top: Fraction

    def interval(self, j: int) -> Interval:
        k = j - self.start
        return Interval(self.top - k - 1, self.top - k)

    def ray_from(self, j: int) -> Fraction:
        return self.top - (j - self.start)


@dataclass(frozen=True, eq=False)
class IntervalBranchingSystem:
    graph: Ultragraph
    R: Mapping[str, tuple[Interval, ...]]
    D: Mapping[VertexId, tuple[Interval, ...]]
    f: Mapping[str, PiecewiseAffineMap]
    tail_layout: TailLayout | None = None
    kind: str = field(default="interval", init=False)

    def D_vertex(self, v: VertexId) -> tuple[Interval, ...]:
        if v.is_tail:
            if self.tail_layout is None:
                raise GraphError(f"no tail layout for {v}")
            return (self.tail_layout.interval(v.tail_index),)
        try:
            return self.D[v]
        except KeyError:
            raise GraphError(f"unknown vertex: {v}") from None

    def D_set(self, a: VertexSet) -> LineSet:
        parts = [iv for v in a.explicit for iv in self.D_vertex(v)]
        ray = None
        if a.tail_from is not None:
            if self.tail_layout is None:
                raise GraphError("set has a tail but the system has no tail layout")
            ray = self.tail_layout.ray_from(a.tail_from)
        return LineSet(normalize(parts), ray)

    @cached_property
    def f_inverse(self) -> dict[str, PiecewiseAffineMap]:
        return {e: m.inverse() for e, m in self.f.items()}

    def R_all(self) -> tuple[Interval, ...]:
        return iset_union(*self.R.values())

    def to_doc(self) -> dict:
        g = self.graph
        return {
            "kind": self.kind,
            "graph": g.to_doc(),
            "R": {e: [iv.to_doc() for iv in ivs] for e, ivs in self.R.items()},
            "D": {v.name: [iv.to_doc() for iv in ivs] for v, ivs in self.D.items()},
            "D_tail": None
            if self.tail_layout is None
            else {"start": self.tail_layout.start, "top": fraction_str(self.tail_layout.top)},
            "f": {e: [p.to_doc() for p in m.pieces] for e, m in self.f.items()},
            "f_tails": {e: [t.to_doc() for t in m.tails] for e, m in self.f.items() if m.tails},
        }


@dataclass(frozen=True, eq=False)
class DiscreteBranchingSystem:
    graph: Ultragraph
    R: Mapping[str, frozenset[int]]
    D: Mapping[VertexId, frozenset[int]]
    f: Mapping[str, Mapping[int, int]]
    kind: str = field(default="discrete", init=False)

    def D_set(self, a: VertexSet) -> frozenset[int]:
        if not a.is_finite:
            raise GraphError("discrete systems need finite vertex sets")
        out: set[int] = set()
        for v in a.explicit:
            if v not in self.D:
                raise GraphError(f"unknown vertex: {v}")
            out |= self.D[v]
        return frozenset(out)

    def max_index(self) -> int:
        pool = [n for s in self.D.values() for n in s] + [n for s in self.R.values() for n in s]
        return max(pool, default=0)

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "graph": self.graph.to_doc(),
            "R": {e: sorted(s) for e, s in self.R.items()},
            "D": {v.name: sorted(s) for v, s in self.D.items()},
            "f": {e: sorted([n, m] for n, m in fe.items()) for e, fe in self.f.items()},
        }


BranchingSystem = IntervalBranchingSystem | DiscreteBranchingSystem


def bs_from_doc(doc: Mapping) -> BranchingSystem:
    g = validate_ultragraph(doc["graph"])
    kind = doc.get("kind", "interval")
    if kind == "discrete":
        return DiscreteBranchingSystem(
            g,
            {e: frozenset(int(n) for n in s) for e, s in doc["R"].items()},
            {g.vertex(v): frozenset(int(n) for n in s) for v, s in doc["D"].items()},
            {e: {int(n): int(m) for n, m in pairs} for e, pairs in doc["f"].items()},
        )
    if kind != "interval":
        raise GraphError(f"unknown branching-system kind: {kind}")
    tails = doc.get("f_tails") or {}
    dt = doc.get("D_tail")
    return IntervalBranchingSystem(
        g,
        {e: tuple(Interval.from_doc(iv) for iv in ivs) for e, ivs in doc["R"].items()},
        {g.vertex(v): tuple(Interval.from_doc(iv) for iv in ivs) for v, ivs in doc["D"].items()},
        {
            e: PiecewiseAffineMap(
                tuple(AffinePiece.from_doc(p) for p in pieces),
                tuple(TailPieces.from_doc(t) for t in tails.get(e, [])),
            )
            for e, pieces in doc["f"].items()
        },
        None if dt is None else TailLayout(int(dt["start"]), as_fraction(dt["top"])),
    )


# ---------------------------------------------------------------------------
# construction


def _unit_components(bs_D: Mapping[VertexId, tuple[Interval, ...]], layout: TailLayout | None, rng: VertexSet):
    comps = []
    for v in rng.explicit:
        comps += bs_D[v] if not v.is_tail else [layout.interval(v.tail_index)]
    return sorted(comps)


def build_standard_interval_bs(g: Ultragraph, edge_order: Sequence[str] | None = None) -> IntervalBranchingSystem:
    """Edges on ``[i-1, i]``, sinks on ``[-k, 1-k]``, affine pieces in between.

    Ranges with finitely many unit components are split evenly; a range that
    contains the tail uses the geometric split ``[n+1-2^{1-p}, n+1-2^{-p}]``
    with the finite components first and the tail components after them in
    index order.
    """
    order = list(edge_order) if edge_order is not None else [e.id for e in g.edges]
    if sorted(order) != sorted(e.id for e in g.edges):
        raise GraphError("edge order must list every edge exactly once")
    R = {eid: (Interval(i - 1, i),) for i, eid in enumerate(order, start=1)}
    D: dict[VertexId, tuple[Interval, ...]] = {}
    sinks = g.explicit_sinks
    for k, v in enumerate(sinks, start=1):
        D[v] = (Interval(-k, 1 - k),)
    for v in g.emitters:
        D[v] = tuple(sorted(R[e.id][0] for e in g.emitted(v)))
    layout = TailLayout(g.tail.start, Fraction(-len(sinks))) if g.tail is not None else None

    f: dict[str, PiecewiseAffineMap] = {}
    for eid in order:
        e = g.edge(eid)
        (target,) = R[eid]
        n = target.lo
        comps = _unit_components(D, layout, e.range)
        if e.range.tail_from is None:
            m = len(comps)
            pieces = tuple(
                AffinePiece.between(c, Interval(n + Fraction(i - 1, m), n + Fraction(i, m)))
                for i, c in enumerate(comps, start=1)
            )
            f[eid] = PiecewiseAffineMap(pieces)
        else:
            half = Fraction(1, 2)
            pieces = tuple(
                AffinePiece.between(c, Interval(n + 1 - half ** (i - 1), n + 1 - half**i))
                for i, c in enumerate(comps, start=1)
            )
            T = e.range.tail_from
            tail = TailPieces(T, len(comps) + 1, n + 1, layout.ray_from(T))
            f[eid] = PiecewiseAffineMap(pieces, (tail,))
    return IntervalBranchingSystem(g, R, D, f, layout)


def build_no_exit_degenerate_bs(g: Ultragraph, c: Cycle | Sequence[str]) -> IntervalBranchingSystem:
    """Standard system with the cycle's edges enumerated first, so ``f_α`` is the identity on ``[0, 1]``."""
    path = c.path if isinstance(c, Cycle) else tuple(c)
    if not is_cycle(g, path) or len(set(path)) != len(path):
        raise GraphError(f"not a simple cycle: {path}")
    if cycle_exits(g, path):
        raise GraphError(f"cycle {path} has an exit")
    rest = [e.id for e in g.edges if e.id not in path]
    return build_standard_interval_bs(g, list(path) + rest)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ConditionCheck:
    condition: int
    passed: bool
    witness: str | None = None

    def to_doc(self) -> dict:
        return {"condition": self.condition, "passed": self.passed, "witness": self.witness}


@dataclass(frozen=True)
class BSReport:
    checks: tuple[ConditionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, n: int) -> ConditionCheck:
        return self.checks[n - 1]

    def to_doc(self) -> dict:
        return {"passed": self.passed, "conditions": [c.to_doc() for c in self.checks]}


def _first(items) -> str | None:
    return str(items[0]) if items else None


def validate_bs(bs: BranchingSystem, horizon: int = DEFAULT_HORIZON) -> BSReport:
    """Check the five branching-system conditions; tails are checked on their first ``horizon`` members."""
    if isinstance(bs, DiscreteBranchingSystem):
        return _validate_discrete(bs)
    g = bs.graph
    edges = sorted(bs.R, key=natural_key)
    if set(edges) != {e.id for e in g.edges} or set(bs.f) != set(edges):
        raise GraphError("system does not cover exactly the edges of its graph")

    over = pairwise_overlaps([(e, bs.R[e]) for e in edges])
    c1 = ConditionCheck(1, not over, _first([f"R_{a} ∩ R_{b} ⊇ {m}" for a, b, m in over]))

    verts = sorted_vertices(g.vertices)
    if g.tail is not None:
        verts += [g.tail_vertex(j) for j in range(g.tail.start, g.tail.start + horizon)]
    over = pairwise_overlaps([(v.name, bs.D_vertex(v)) for v in verts])
    c2 = ConditionCheck(2, not over, _first([f"D_{a} ∩ D_{b} ⊇ {m}" for a, b, m in over]))

    bad3 = []
    for e in edges:
        left = iset_difference(bs.R[e], bs.D_vertex(g.edge(e).source))
        if left:
            bad3.append(f"R_{e} \\ D_{g.edge(e).source} ⊇ {left[0]}")
    c3 = ConditionCheck(3, not bad3, _first(bad3))

    bad4 = []
    for v in g.emitters:
        rs = iset_union(*(bs.R[e.id] for e in g.emitted(v)))
        dv = normalize(bs.D_vertex(v))
        diff = iset_difference(dv, rs) + iset_difference(rs, dv)
        if diff:
            bad4.append(f"D_{v} ≠ ∪R_e on {diff[0]}")
    c4 = ConditionCheck(4, not bad4, _first(bad4))

    bad5 = []
    for e in edges:
        bad5 += _check_map(bs, g.edge(e), horizon)
    c5 = ConditionCheck(5, not bad5, _first(bad5))
    return BSReport((c1, c2, c3, c4, c5))


def _check_map(bs: IntervalBranchingSystem, e, horizon: int) -> list[str]:
    fe = bs.f[e.id]
    pieces = list(fe.pieces)
    for t in fe.tails:
        pieces += list(t.iter_pieces(horizon))
    out = []
    doms = pairwise_overlaps([(str(i), [p.dom]) for i, p in enumerate(pieces)])
    if doms:
        out.append(f"f_{e.id}: piece domains overlap on {doms[0][2]}")
    imgs = pairwise_overlaps([(str(i), [p.image]) for i, p in enumerate(pieces)])
    if imgs:
        out.append(f"f_{e.id}: piece images overlap on {imgs[0][2]}")

    want_dom = [iv for v in e.range.explicit for iv in bs.D_vertex(v)]
    if e.range.tail_from is not None:
        T = e.range.tail_from
        want_dom += [bs.tail_layout.interval(j) for j in range(T, T + horizon)]
    got_dom = [p.dom for p in pieces]
    diff = iset_difference(want_dom, got_dom) + iset_difference(got_dom, want_dom)
    if diff:
        out.append(f"f_{e.id}: domain differs from D_r({e.id}) on {diff[0]}")

    got_img = [p.image for p in pieces]
    if fe.tails:
        last = max((iv.hi for iv in got_img), default=None)
        acc = max(t.acc for t in fe.tails)
        if last is not None and last < acc:
            got_img.append(Interval(last, acc))
    diff = iset_difference(bs.R[e.id], got_img) + iset_difference(got_img, bs.R[e.id])
    if diff:
        out.append(f"f_{e.id}: image differs from R_{e.id} on {diff[0]}")
    return out


def _validate_discrete(bs: DiscreteBranchingSystem) -> BSReport:
    g = bs.graph
    edges = sorted(bs.R, key=natural_key)
    if set(edges) != {e.id for e in g.edges} or set(bs.f) != set(edges):
        raise GraphError("system does not cover exactly the edges of its graph")

    def overlaps(named):
        out = []
        for i, (a, sa) in enumerate(named):
            for b, sb in named[i + 1 :]:
                if sa & sb:
                    out.append(f"{a} ∩ {b} ∋ {min(sa & sb)}")
        return out

    o1 = overlaps([(f"R_{e}", bs.R[e]) for e in edges])
    o2 = overlaps([(f"D_{v}", bs.D.get(v, frozenset())) for v in sorted_vertices(g.vertices)])
    bad3 = [f"R_{e} ∌ D_{g.edge(e).source}: {min(bs.R[e] - bs.D[g.edge(e).source])}"
            for e in edges if not bs.R[e] <= bs.D.get(g.edge(e).source, frozenset())]
    bad4 = []
    for v in g.emitters:
        rs = frozenset().union(*(bs.R[e.id] for e in g.emitted(v)))
        if bs.D.get(v, frozenset()) != rs:
            bad4.append(f"D_{v} ≠ ∪R_e (symmetric difference {sorted(bs.D.get(v, frozenset()) ^ rs)})")
    bad5 = []
    for e in edges:
        fe = bs.f[e]
        dom = bs.D_set(g.edge(e).range)
        if set(fe) != dom:
            bad5.append(f"f_{e}: domain {sorted(fe)} ≠ D_r({e}) {sorted(dom)}")
        elif len(set(fe.values())) != len(fe):
            bad5.append(f"f_{e}: not injective")
        elif set(fe.values()) != bs.R[e]:
            bad5.append(f"f_{e}: image {sorted(set(fe.values()))} ≠ R_{e} {sorted(bs.R[e])}")
    return BSReport((
        ConditionCheck(1, not o1, _first(o1)),
        ConditionCheck(2, not o2, _first(o2)),
        ConditionCheck(3, not bad3, _first(bad3)),
        ConditionCheck(4, not bad4, _first(bad4)),
        ConditionCheck(5, not bad5, _first(bad5)),
    ))


# ---------------------------------------------------------------------------
# the global map


def assemble_F(bs: IntervalBranchingSystem, merge: bool = False) -> PiecewiseAffineMap:
    """``F = f_e^{-1}`` on each ``R_e`` and the identity elsewhere.

    Where two ``R_e`` overlap the edge with the smallest id wins.
    """
    claimed: tuple[Interval, ...] = ()
    pieces: list[AffinePiece] = []
    tails: list[TailPieces] = []
    for eid in sorted(bs.R, key=natural_key):
        inv = bs.f_inverse[eid]
        for p in inv.pieces:
            for free in iset_difference([p.dom], claimed):
                pieces.append(AffinePiece(free, p.slope, p.offset))
        for t in inv.tails:
            lo, hi = t.domain_hull()
            if iset_intersection([Interval(lo, hi)], claimed):
                raise GraphError(f"tail pieces of f_{eid} overlap an earlier R")
            tails.append(t)
        claimed = iset_union(claimed, bs.R[eid])
    F = PiecewiseAffineMap(tuple(pieces), tuple(tails), identity_elsewhere=True)
    return F.merged() if merge else F


# ---------------------------------------------------------------------------
# discrete systems


def _require_acyclic(g: Ultragraph) -> None:
    arcs = composability_graph(g)
    dg = nx.DiGraph()
    dg.add_nodes_from(arcs)
    dg.add_edges_from((e, f) for e, fs in arcs.items() for f in fs)
    if not nx.is_directed_acyclic_graph(dg):
        raise GraphError("finite discrete synthesis requires acyclicity")


def build_discrete_bs_from_peeling(g: Ultragraph) -> DiscreteBranchingSystem:
    """Index sets for a permutative representation, built bottom-up.

    Sinks and isolated vertices get one index; ``|R_e| = Σ_{u∈r(e)} |D_u|``
    and ``|D_v| = Σ_{e∈s^{-1}(v)} |R_e|``.  Vertices are processed once all of
    their range vertices are done, first-declared first.
    """
    from .permutative import permutativity_condition

    if not g.is_finite:
        raise GraphError("discrete synthesis requires a finite graph")
    _require_acyclic(g)
    perm = permutativity_condition(g)
    if not perm.holds:
        raise GraphError("permutativity condition fails; no discrete system is synthesized")

    deps = {v: {u for e in g.emitted(v) for u in e.range.explicit} for v in g.vertices}
    D: dict[VertexId, frozenset[int]] = {}
    R: dict[str, frozenset[int]] = {}
    f: dict[str, dict[int, int]] = {}
    nxt = 1
    while len(D) < len(g.vertices):
        v = next(v for v in g.vertices if v not in D and deps[v] <= D.keys())
        if g.is_sink(v):
            D[v] = frozenset({nxt})
            nxt += 1
            continue
        for e in g.emitted(v):
            dom = sorted(n for u in e.range.explicit for n in D[u])
            block = list(range(nxt, nxt + len(dom)))
            nxt += len(dom)
            R[e.id] = frozenset(block)
            f[e.id] = dict(zip(dom, block))
        D[v] = frozenset().union(*(R[e.id] for e in g.emitted(v)))
    return DiscreteBranchingSystem(g, R, D, f)


def cycle_permutation_system(k: int, perm: Sequence[int]) -> DiscreteBranchingSystem:
    """A ``k``-edge cycle ``a1 -> a2 -> ... -> ak -> a1`` whose composed map ``f_α`` is ``perm``.

    ``perm`` lists ``f_α(1), ..., f_α(d)`` on ``D_{s(α_1)} = {1..d}``.  Vertex
    ``u_i`` owns the block ``{(i-1)d+1, ..., i d}``; ``f_{α_i}`` for ``i < k``
    shifts block ``i+1`` onto block ``i`` and ``f_{α_k}`` carries the twist.
    """
    d = len(perm)
    if sorted(perm) != list(range(1, d + 1)):
        raise ValueError("perm must be a permutation of 1..d")
    from .core import make_graph

    names = [f"u{i}" for i in range(1, k + 1)]
    edges = [(f"a{i}", names[i - 1], [names[i % k]]) for i in range(1, k + 1)]
    g = make_graph(names, edges)
    block = {i: list(range((i - 1) * d + 1, i * d + 1)) for i in range(1, k + 1)}
    D = {g.vertex(names[i - 1]): frozenset(block[i]) for i in block}
    R = {f"a{i}": frozenset(block[i]) for i in block}
    f: dict[str, dict[int, int]] = {}
    if k == 1:
        f["a1"] = {x: perm[x - 1] for x in block[1]}
    else:
        for i in range(1, k):
            f[f"a{i}"] = {y: y - d for y in block[i + 1]}
        # f_{a_k}: block 1 -> block k so that the full composite is perm
        f[f"a{k}"] = {x: perm[x - 1] + (k - 1) * d for x in block[1]}
    return DiscreteBranchingSystem(g, R, D, f)
