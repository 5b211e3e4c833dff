"""Finite paths, cycles, exits and Condition (L)."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .core import GraphError, Ultragraph, VertexId, natural_key

DEFAULT_PATH_CAP = 200_000

Path = tuple[str, ...]


class PathCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"path enumeration exceeded cap {cap} (at least {count} paths)")
        self.count = count


@dataclass(frozen=True)
class Cycle:
    path: Path
    simple: bool

    def __str__(self) -> str:
        return "(" + ",".join(self.path) + ")"


@dataclass(frozen=True)
class Exit:
    """One exit of a cycle.

    ``condition`` 1/2 means ``s^{-1}(r(α_i)) ≠ {α_{i+1}}`` (index ``i`` is
    1-based, condition 2 being the wrap-around at ``i = n``); ``witness`` is
    the sorted list of edges actually emitted from ``r(α_i)``.  Condition 3
    means a sink ``witness`` sits in ``r(α_i)``.
    """

    condition: int
    index: int
    witness: tuple[str, ...] | str

    def to_doc(self) -> dict:
        w = list(self.witness) if isinstance(self.witness, tuple) else self.witness
        return {"condition": self.condition, "index": self.index, "witness": w}


def edge_order(g: Ultragraph) -> list[str]:
    return sorted((e.id for e in g.edges), key=natural_key)


def composability_graph(g: Ultragraph) -> dict[str, tuple[str, ...]]:
    """Arcs ``e -> f`` whenever ``s(f) ∈ r(e)``, keyed and sorted by edge id."""
    order = edge_order(g)
    return {e: tuple(f for f in order if g.edge(f).source in g.edge(e).range) for e in order}


def is_path(g: Ultragraph, path: Path) -> bool:
    if not path or not all(g.has_edge(e) for e in path):
        return False
    return all(g.edge(b).source in g.edge(a).range for a, b in zip(path, path[1:]))


def enumerate_paths(g: Ultragraph, max_len: int, cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """All composable edge sequences of length ``1..max_len`` in lexicographic order."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    arcs = composability_graph(g)
    out: list[Path] = []

    def extend(path: Path) -> None:
        out.append(path)
        if len(out) > cap:
            raise PathCapExceeded(len(out), cap)
        if len(path) < max_len:
            for nxt in arcs[path[-1]]:
                extend(path + (nxt,))

    for e in arcs:
        extend((e,))
    return out


def _canonical_rotation(path: Path) -> Path:
    keys = [natural_key(e) for e in path]
    i = keys.index(min(keys))
    return path[i:] + path[:i]


def enumerate_simple_cycles(g: Ultragraph) -> list[Cycle]:
    """Every simple cycle once, rotated so that its smallest edge id comes first."""
    arcs = composability_graph(g)
    dg = nx.DiGraph()
    dg.add_nodes_from(arcs)
    dg.add_edges_from((e, f) for e, fs in arcs.items() for f in fs)
    found = {_canonical_rotation(tuple(c)) for c in nx.simple_cycles(dg)}
    return [Cycle(p, True) for p in sorted(found, key=lambda p: [natural_key(e) for e in p])]


def is_cycle(g: Ultragraph, path: Path) -> bool:
    return is_path(g, path) and g.edge(path[0]).source in g.edge(path[-1]).range


def _emitted_from(g: Ultragraph, rng) -> tuple[str, ...]:
    return tuple(sorted((e.id for e in g.edges_from_set(rng)), key=natural_key))


def cycle_exits(g: Ultragraph, c: Cycle | Path) -> list[Exit]:
    """All exits of a cycle, in order of position along the cycle."""
    path = c.path if isinstance(c, Cycle) else tuple(c)
    if not is_cycle(g, path):
        raise GraphError(f"not a cycle: {path}")
    n = len(path)
    exits: list[Exit] = []
    for i, eid in enumerate(path, start=1):
        rng = g.edge(eid).range
        nxt = path[i % n]
        emitted = _emitted_from(g, rng)
        if emitted != (nxt,):
            exits.append(Exit(1 if i < n else 2, i, emitted))
        for v in rng.explicit:
            if g.is_sink(v):
                exits.append(Exit(3, i, v.name))
        if rng.tail_from is not None:
            exits.append(Exit(3, i, g.tail_vertex(rng.tail_from).name))
    exits.sort(key=lambda x: (x.index, x.condition, str(x.witness)))
    return exits


def has_no_exit_shape(g: Ultragraph, path: Path) -> bool:
    """``|r(α_i)| = 1`` and ``s^{-1}(s(α_i)) = {α_i}`` along the whole cycle."""
    for eid in path:
        e = g.edge(eid)
        if not e.range.is_finite or len(e.range) != 1:
            return False
        if [f.id for f in g.emitted(e.source)] != [eid]:
            return False
    return True


@dataclass(frozen=True)
class ConditionL:
    holds: bool
    violations: tuple[Cycle, ...]

    def to_doc(self) -> dict:
        return {"holds": self.holds, "violations": [list(c.path) for c in self.violations]}


def no_exit_cycles(g: Ultragraph) -> list[Cycle]:
    return [c for c in enumerate_simple_cycles(g) if not cycle_exits(g, c)]


def condition_l(g: Ultragraph) -> ConditionL:
    """Condition (L), decided on simple cycles.

    A cycle without exits repeats a single simple cycle (every range is a
    singleton emitting exactly one edge), so simple cycles are enough.
    """
    bad = tuple(no_exit_cycles(g))
    return ConditionL(not bad, bad)


def cycle_vertices(g: Ultragraph, c: Cycle) -> list[VertexId]:
    return [g.edge(e).source for e in c.path]
