"""Named example graphs and seeded random generators used by tests and the CLI docs."""

from __future__ import annotations

import random

from .core import Ultragraph, make_graph


def worked_example() -> Ultragraph:
    """Ten vertices, five edges, no cycles; the standard worked example."""
    return make_graph(
        [f"v{i}" for i in range(1, 11)],
        [
            ("e1", "v1", ["v2", "v3"]),
            ("e2", "v6", ["v3", "v4", "v5"]),
            ("e3", "v2", ["v7"]),
            ("e4", "v6", ["v10"]),
            ("e5", "v10", ["v8", "v9"]),
        ],
    )


def single_loop() -> Ultragraph:
    return make_graph(["v"], [("e", "v", ["v"])])


def two_loops() -> Ultragraph:
    """Two loops ``e, f`` at one vertex (the Cuntz algebra O_2 picture)."""
    return make_graph(["v"], [("e", "v", ["v"]), ("f", "v", ["v"])])


def two_cycle() -> Ultragraph:
    return make_graph(["v", "w"], [("e", "v", ["w"]), ("f", "w", ["v"])])


def single_edge() -> Ultragraph:
    return make_graph(["u", "w"], [("e", "u", ["w"])])


def chain() -> Ultragraph:
    """``u -e-> v -f-> w``."""
    return make_graph(["u", "v", "w"], [("e", "u", ["v"]), ("f", "v", ["w"])])


def loop_with_exit() -> Ultragraph:
    return make_graph(["v", "u"], [("e", "v", ["v"]), ("g", "v", ["u"])])


def edgeless(n: int = 1) -> Ultragraph:
    return make_graph([f"v{i}" for i in range(1, n + 1)], [])


def tail_edge(tail_from: int = 1) -> Ultragraph:
    """One edge from ``u`` onto ``{w_i : i >= tail_from}``."""
    return make_graph(["u"], [("e", "u", f"+tail:{tail_from}")], tail=("w", 1))


CATALOG = {
    "worked_example": worked_example,
    "single_loop": single_loop,
    "two_loops": two_loops,
    "two_cycle": two_cycle,
    "single_edge": single_edge,
    "chain": chain,
    "loop_with_exit": loop_with_exit,
    "edgeless": edgeless,
    "tail_edge": tail_edge,
}


# ---------------------------------------------------------------------------
# random families


def _subset(rng: random.Random, pool: list[str], lo: int = 1, hi: int = 3) -> list[str]:
    return rng.sample(pool, rng.randint(min(lo, len(pool)), min(hi, len(pool))))


def random_graph(rng: random.Random, max_vertices: int = 6, max_edges: int = 6) -> Ultragraph:
    """Any finite ultragraph; cycles allowed."""
    names = [f"v{i}" for i in range(1, rng.randint(1, max_vertices) + 1)]
    edges = [
        (f"e{i}", rng.choice(names), _subset(rng, names))
        for i in range(1, rng.randint(0, max_edges) + 1)
    ]
    return make_graph(names, edges)


def random_acyclic_graph(rng: random.Random, max_vertices: int = 6, max_edges: int = 6) -> Ultragraph:
    """Edges only point to later vertices, so no path ever returns."""
    n = rng.randint(2, max_vertices)
    names = [f"v{i}" for i in range(1, n + 1)]
    edges = []
    for i in range(1, rng.randint(1, max_edges) + 1):
        s = rng.randrange(0, n - 1)
        edges.append((f"e{i}", names[s], _subset(rng, names[s + 1 :])))
    return make_graph(names, edges)


def random_cyclic_graph(rng: random.Random, max_cycle: int = 3, max_extra: int = 3) -> Ultragraph:
    """A simple cycle without exits on ``c1..ck`` plus extra edges that never leave from the cycle."""
    k = rng.randint(1, max_cycle)
    cyc = [f"c{i}" for i in range(1, k + 1)]
    others = [f"v{i}" for i in range(1, rng.randint(1, 3) + 1)]
    edges = [(f"a{i}", cyc[i - 1], [cyc[i % k]]) for i in range(1, k + 1)]
    for i in range(1, rng.randint(0, max_extra) + 1):
        edges.append((f"e{i}", rng.choice(others), _subset(rng, others + cyc)))
    return make_graph(cyc + others, edges)


def random_tailed_graph(rng: random.Random, max_vertices: int = 5, max_edges: int = 4, cut: int = 8) -> Ultragraph:
    """Explicit vertices ``v*``, a sink tail ``w1, w2, ...``; every index used stays below ``cut``."""
    names = [f"v{i}" for i in range(1, rng.randint(1, max_vertices) + 1)]
    edges = []
    for i in range(1, rng.randint(1, max_edges) + 1):
        body = _subset(rng, names, 0, 2) + [f"w{j}" for j in rng.sample(range(1, cut - 1), rng.randint(0, 2))]
        tail = rng.randint(1, cut - 1) if rng.random() < 0.7 or not body else None
        rng_lit = ",".join(body) + (f"+tail:{tail}" if tail is not None else "")
        edges.append((f"e{i}", rng.choice(names), rng_lit))
    return make_graph(names, edges, tail=("w", 1))
