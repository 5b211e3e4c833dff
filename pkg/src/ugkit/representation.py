"""The representation induced by a branching system, and identities it must satisfy.

On an interval system ``π(s_e)`` transports a step function through ``f_e``
and rescales by ``Φ_{f_e^{-1}}^{1/2}``; ``π(p_A)`` multiplies by the indicator
of ``D_A``.  On a discrete system the same operators are 0/1 matrices.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .branching import DEFAULT_HORIZON, DiscreteBranchingSystem, IntervalBranchingSystem
from .core import EMPTY, GraphError, VertexSet, natural_key, sorted_vertices
from .intervals import Interval, PiecewiseAffineMap, iset_difference, iset_intersection
from .paths_cycles import Cycle, cycle_exits, is_cycle
from .stepfunction import ZERO, StepFunction

DEFAULT_SEED = 20240917
DEFAULT_TOL = 1e-10
RANDOM_FAMILY_SIZE = 10


def default_seed() -> int:
    raw = os.environ.get("UGKIT_SEED")
    return int(raw) if raw else DEFAULT_SEED


@dataclass(frozen=True)
class Generator:
    kind: str  # s | s_star | p | s_path | s_path_star
    edge: str | None = None
    vset: VertexSet | None = None
    path: tuple[str, ...] = ()

    @classmethod
    def s(cls, e: str) -> Generator:
        return cls("s", edge=e)

    @classmethod
    def s_star(cls, e: str) -> Generator:
        return cls("s_star", edge=e)

    @classmethod
    def p(cls, a: VertexSet) -> Generator:
        return cls("p", vset=a)

    @classmethod
    def s_path(cls, path: Sequence[str]) -> Generator:
        return cls("s_path", path=tuple(path))

    @classmethod
    def s_path_star(cls, path: Sequence[str]) -> Generator:
        return cls("s_path_star", path=tuple(path))


# ---------------------------------------------------------------------------
# interval systems


def transport(m: PiecewiseAffineMap, phi: StepFunction) -> StepFunction:
    """``Σ_pieces  slope^{-1/2} · (φ|_dom ∘ piece^{-1})``."""
    terms: list = []
    for iv, _ in phi.pieces:
        for pc in m.pieces_meeting(iv):
            terms.append(pc)
    seen = []
    for pc in terms:
        if pc not in seen:
            seen.append(pc)
    out = []
    for pc in seen:
        out += phi.push(pc, 1.0 / math.sqrt(pc.slope)).pieces
    return StepFunction.make(out)


def _edge_map(bs: IntervalBranchingSystem, e: str, inverse: bool) -> PiecewiseAffineMap:
    if e not in bs.f:
        raise GraphError(f"unknown edge: {e}")
    return bs.f_inverse[e] if inverse else bs.f[e]


def project(bs: IntervalBranchingSystem, a: VertexSet, phi: StepFunction) -> StepFunction:
    region = bs.D_set(a)
    return phi.restrict(region.finite, region.ray_hi)


def rep_apply(bs: IntervalBranchingSystem, gen: Generator, phi: StepFunction) -> StepFunction:
    if gen.kind == "s":
        return transport(_edge_map(bs, gen.edge, False), phi)
    if gen.kind == "s_star":
        return transport(_edge_map(bs, gen.edge, True), phi)
    if gen.kind == "p":
        return project(bs, gen.vset, phi)
    if gen.kind == "s_path":
        for e in reversed(gen.path):
            phi = transport(_edge_map(bs, e, False), phi)
        return phi
    if gen.kind == "s_path_star":
        for e in gen.path:
            phi = transport(_edge_map(bs, e, True), phi)
        return phi
    raise ValueError(f"unknown generator kind: {gen.kind}")


def nonzero_witness(bs: IntervalBranchingSystem, a: VertexSet) -> StepFunction | None:
    """An indicator ``φ`` with ``π(p_A)φ ≠ 0``, or ``None`` when ``D_A`` is null."""
    region = bs.D_set(a)
    if region.finite:
        phi = StepFunction.indicator(region.finite[0])
    elif region.ray_hi is not None:
        phi = StepFunction.indicator(Interval(region.ray_hi - 1, region.ray_hi))
    else:
        return None
    return phi if project(bs, a, phi) else None


# ---------------------------------------------------------------------------
# probe functions


def _breakpoints(bs: IntervalBranchingSystem, horizon: int) -> tuple[list[Fraction], set[Fraction]]:
    pts: set[Fraction] = set()
    accs: set[Fraction] = set()
    for ivs in bs.R.values():
        pts |= {x for iv in ivs for x in (iv.lo, iv.hi)}
    for ivs in bs.D.values():
        pts |= {x for iv in ivs for x in (iv.lo, iv.hi)}
    g = bs.graph
    if g.tail is not None and bs.tail_layout is not None:
        for j in range(g.tail.start, g.tail.start + horizon):
            iv = bs.tail_layout.interval(j)
            pts |= {iv.lo, iv.hi}
    for m in bs.f.values():
        for pc in m.pieces:
            pts |= {pc.dom.lo, pc.dom.hi, pc.image.lo, pc.image.hi}
        for t in m.tails:
            accs.add(t.acc)
            for pc in t.iter_pieces(horizon):
                pts |= {pc.dom.lo, pc.dom.hi, pc.image.lo, pc.image.hi}
    return sorted(pts), accs


def probe_family(
    bs: IntervalBranchingSystem, seed: int | None = None, n_random: int = RANDOM_FAMILY_SIZE,
    horizon: int = DEFAULT_HORIZON,
) -> list[tuple[str, StepFunction]]:
    """Indicators of every refinement cell plus ``n_random`` seeded rational step functions.

    Cells ending at an accumulation point of infinitely many pieces are left out.
    """
    pts, accs = _breakpoints(bs, horizon)
    cells = [Interval(a, b) for a, b in zip(pts, pts[1:]) if b not in accs]
    family = [(f"cell{c}", StepFunction.indicator(c)) for c in cells]
    rng = random.Random(default_seed() if seed is None else seed)
    for k in range(n_random if cells else 0):
        parts = []
        for c in rng.sample(cells, min(len(cells), rng.randint(1, 4))):
            den = rng.choice([2, 3, 4, 8])
            i, j = sorted(rng.sample(range(den + 1), 2))
            sub = Interval(c.lo + c.length * Fraction(i, den), c.lo + c.length * Fraction(j, den))
            parts.append((sub, round(rng.uniform(-1, 1), 6) or 0.5))
        family.append((f"random#{k}", StepFunction.make(parts)))
    return family


def sampled_sets(g, horizon: int = 3) -> list[VertexSet]:
    """``∅``, every explicit singleton, a few tail singletons, every range and the whole universe."""
    out = [EMPTY]
    out += [VertexSet.of(v) for v in sorted_vertices(g.vertices)]
    if g.tail is not None:
        out += [VertexSet.of(g.tail_vertex(j)) for j in range(g.tail.start, g.tail.start + horizon)]
    for e in g.edges:
        if e.range not in out:
            out.append(e.range)
    if g.all_vertices() not in out:
        out.append(g.all_vertices())
    return out


# ---------------------------------------------------------------------------
# relation checks


@dataclass(frozen=True)
class RelationResult:
    max_deviation: float
    passed: bool
    witness: str | None = None

    def to_doc(self) -> dict:
        return {"max_deviation": self.max_deviation, "passed": self.passed, "witness": self.witness}


@dataclass(frozen=True)
class CKReport:
    relations: dict
    tol: float
    family_size: int
    exact: bool

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations.values())

    @property
    def max_deviation(self) -> float:
        return max((r.max_deviation for r in self.relations.values()), default=0.0)

    def to_doc(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "exact": self.exact,
            "family_size": self.family_size,
            "relations": {k: v.to_doc() for k, v in self.relations.items()},
        }


class _Tracker:
    def __init__(self):
        self.dev = 0.0
        self.witness: str | None = None

    def see(self, dev: float, witness: str) -> None:
        if dev > self.dev or self.witness is None and dev > 0:
            self.dev, self.witness = dev, witness

    def result(self, tol: float) -> RelationResult:
        ok = self.dev <= tol
        return RelationResult(self.dev, ok, None if ok else self.witness)


def verify_ck_relations(bs, tol: float = DEFAULT_TOL, seed: int | None = None):
    """Check the four Cuntz-Krieger relations (and orthogonality of ranges) on ``bs``."""
    if isinstance(bs, DiscreteBranchingSystem):
        return _verify_discrete(bs, tol)
    g = bs.graph
    family = probe_family(bs, seed)
    sets = sampled_sets(g)
    edges = sorted(bs.f, key=natural_key)
    names = ("relation_1", "relation_2", "relation_3", "relation_4", "orthogonal_ranges")
    track = {k: _Tracker() for k in names}

    for label, phi in family:
        proj = [project(bs, a, phi) for a in sets]
        cache = {a: p for a, p in zip(sets, proj)}

        def pj(a: VertexSet) -> StepFunction:
            if a not in cache:
                cache[a] = project(bs, a, phi)
            return cache[a]

        for i, a in enumerate(sets):
            for b in sets[i:]:
                meet, join = a & b, a | b
                d1 = (project(bs, a, pj(b)) - pj(meet)).l2()
                d2 = (pj(join) - (pj(a) + pj(b) - pj(meet))).l2()
                track["relation_1"].see(max(d1, d2), f"{label}, A={a}, B={b}")

        s_phi = {e: rep_apply(bs, Generator.s(e), phi) for e in edges}
        star_phi = {e: rep_apply(bs, Generator.s_star(e), phi) for e in edges}
        for e in edges:
            edge = g.edge(e)
            back = rep_apply(bs, Generator.s_star(e), s_phi[e])
            track["relation_2"].see((back - pj(edge.range)).l2(), f"{label}, e={e}")
            q = pj(VertexSet.of(edge.source)) - rep_apply(bs, Generator.s(e), star_phi[e])
            track["relation_3"].see(max(0.0, -q.inner(phi)), f"{label}, e={e}")
            for f in edges:
                if f != e:
                    cross = rep_apply(bs, Generator.s_star(f), s_phi[e])
                    track["orthogonal_ranges"].see(cross.l2(), f"{label}, e={e}, f={f}")
        for v in g.emitters:
            total = ZERO
            for edge in g.emitted(v):
                total = total + rep_apply(bs, Generator.s(edge.id), star_phi[edge.id])
            track["relation_4"].see((pj(VertexSet.of(v)) - total).l2(), f"{label}, v={v}")

    return CKReport({k: t.result(tol) for k, t in track.items()}, tol, len(family), exact=False)


def _verify_discrete(bs: DiscreteBranchingSystem, tol: float) -> CKReport:
    g = bs.graph
    N = max(bs.max_index(), 1)
    sets = sampled_sets(g)
    P = {a: discrete_rep_matrix(bs, Generator.p(a), N) for a in sets}

    def pm(a):
        if a not in P:
            P[a] = discrete_rep_matrix(bs, Generator.p(a), N)
        return P[a]

    S = {e.id: discrete_rep_matrix(bs, Generator.s(e.id), N) for e in g.edges}
    track = {k: _Tracker() for k in ("relation_1", "relation_2", "relation_3", "relation_4", "orthogonal_ranges")}

    def gap(m) -> float:
        return float(np.abs(m).max()) if m.size else 0.0

    for i, a in enumerate(sets):
        for b in sets[i:]:
            d = max(gap(pm(a) @ pm(b) - pm(a & b)), gap(pm(a | b) - (pm(a) + pm(b) - pm(a & b))))
            track["relation_1"].see(d, f"A={a}, B={b}")
    for e in g.edges:
        Se = S[e.id]
        track["relation_2"].see(gap(Se.T @ Se - pm(e.range)), f"e={e.id}")
        Q = pm(VertexSet.of(e.source)) - Se @ Se.T
        track["relation_3"].see(max(gap(Q - Q.T), gap(Q @ Q - Q)), f"e={e.id}")
        for f in g.edges:
            if f.id != e.id:
                track["orthogonal_ranges"].see(gap(S[f.id].T @ Se), f"e={e.id}, f={f.id}")
    for v in g.emitters:
        total = sum((S[e.id] @ S[e.id].T for e in g.emitted(v)), np.zeros((N, N), dtype=np.int64))
        track["relation_4"].see(gap(pm(VertexSet.of(v)) - total), f"v={v}")
    # integer arithmetic: any nonzero deviation is a genuine failure
    return CKReport({k: t.result(0.0) for k, t in track.items()}, tol, N, exact=True)


# ---------------------------------------------------------------------------
# Perron-Frobenius operator


class SupportError(ValueError):
    pass


def pf_direct(F: PiecewiseAffineMap, phi: StepFunction) -> StepFunction:
    """Transfer operator of ``F``: ``Σ_{F(x)=y} φ(x) / F'(x)``."""
    terms = []
    for iv, _ in phi.pieces:
        for pc in F.pieces_meeting(iv):
            if pc not in terms:
                terms.append(pc)
    out = []
    for pc in terms:
        out += phi.push(pc, 1.0 / float(pc.slope)).pieces
    if F.identity_elsewhere:
        doms = [pc.dom for pc in F.pieces]
        ray = None
        for t in F.tails:
            lo, hi = t.domain_hull()
            if lo is None:
                ray = hi if ray is None else max(ray, hi)
            else:
                doms.append(Interval(lo, hi))
        out += (phi - phi.restrict(doms, ray)).pieces
    return StepFunction.make(out)


def _require_covered(bs: IntervalBranchingSystem, phi: StepFunction) -> None:
    left = iset_difference(phi.support, bs.R_all())
    if left:
        raise SupportError(f"support is not inside the union of the R_e: uncovered region {left[0]}")


def _edges_meeting(bs: IntervalBranchingSystem, phi: StepFunction) -> list[str]:
    return [e for e in sorted(bs.R, key=natural_key) if iset_intersection(bs.R[e], phi.support)]


def pf_via_rep(bs: IntervalBranchingSystem, phi: StepFunction, mode: str = "squared") -> StepFunction:
    """Transfer operator computed from the representation.

    ``squared`` returns ``Σ_e (π(s_e^*)φ)^2``, which is ``P_F(φ^2)``.
    ``general`` returns ``P_F(φ)`` itself by splitting ``φ`` into positive and
    negative parts and applying the squared form to their square roots.
    """
    _require_covered(bs, phi)
    if mode == "squared":
        out = []
        for e in _edges_meeting(bs, phi):
            out += rep_apply(bs, Generator.s_star(e), phi).square().pieces
        return StepFunction.make(out)
    if mode == "general":
        out = []
        for part, sign in ((phi.positive_part(), 1.0), (phi.negative_part(), -1.0)):
            root = part.sqrt()
            for e in _edges_meeting(bs, root):
                out += rep_apply(bs, Generator.s_star(e), root).square().scale(sign).pieces
        return StepFunction.make(out)
    raise ValueError(f"unknown mode: {mode}")


# ---------------------------------------------------------------------------
# discrete systems


def discrete_rep_matrix(dbs: DiscreteBranchingSystem, gen: Generator, N: int | None = None) -> np.ndarray:
    """0/1 integer matrix of ``π(gen)`` on ``span{δ_1..δ_N}``."""
    need = dbs.max_index()
    N = need if N is None else N
    if N < need:
        raise ValueError(f"truncation N={N} is smaller than the largest index {need}")

    def s_matrix(e: str) -> np.ndarray:
        if e not in dbs.f:
            raise GraphError(f"unknown edge: {e}")
        m = np.zeros((N, N), dtype=np.int64)
        for n, fn in dbs.f[e].items():
            m[fn - 1, n - 1] = 1
        return m

    if gen.kind == "s":
        return s_matrix(gen.edge)
    if gen.kind == "s_star":
        return s_matrix(gen.edge).T.copy()
    if gen.kind == "p":
        m = np.zeros((N, N), dtype=np.int64)
        for n in dbs.D_set(gen.vset):
            m[n - 1, n - 1] = 1
        return m
    if gen.kind in ("s_path", "s_path_star"):
        m = np.eye(N, dtype=np.int64)
        for e in gen.path:
            m = m @ s_matrix(e)
        return m if gen.kind == "s_path" else m.T.copy()
    raise ValueError(f"unknown generator kind: {gen.kind}")


@dataclass(frozen=True)
class FaithfulnessResult:
    witness: frozenset[int] | None
    orbit_bound: int
    permutation: dict

    def to_doc(self) -> dict:
        return {
            "witness": None if self.witness is None else sorted(self.witness),
            "orbit_bound": self.orbit_bound,
            "permutation": sorted([x, y] for x, y in self.permutation.items()),
        }


def cycle_map(dbs: DiscreteBranchingSystem, path: Sequence[str]) -> dict[int, int]:
    """``f_α = f_{α_1} ∘ ... ∘ f_{α_n}`` on ``D_{r(α_n)}``."""
    g = dbs.graph
    dom = sorted(dbs.D_set(g.edge(path[-1]).range))
    out = {}
    for x in dom:
        y = x
        for e in reversed(path):
            if y not in dbs.f[e]:
                raise GraphError(f"f_{e} is undefined at {y}")
            y = dbs.f[e][y]
        out[x] = y
    return out


def orbit_lengths(perm: dict[int, int]) -> dict[int, int]:
    out = {}
    for x in perm:
        y, n = perm[x], 1
        while y != x:
            y, n = perm[y], n + 1
        out[x] = n
    return out


def faithfulness_witness(dbs: DiscreteBranchingSystem, c: Cycle | Sequence[str], fset: Iterable[int]) -> FaithfulnessResult:
    """Look for ``E = {x}`` with ``f_α^n(x) ≠ x`` for every ``n`` in ``fset``.

    A set ``E`` with ``f_α^n(E) ∩ E = ∅`` for all ``n`` works iff each of its
    points does, so singletons suffice; the smallest qualifying point is
    returned.
    """
    g = dbs.graph
    path = c.path if isinstance(c, Cycle) else tuple(c)
    if not is_cycle(g, path):
        raise GraphError(f"not a cycle: {path}")
    if cycle_exits(g, path):
        raise GraphError(f"cycle {path} has an exit")
    fset = sorted(set(fset))
    if not fset or fset[0] < 1:
        raise ValueError("fset must be a nonempty set of positive integers")
    perm = cycle_map(dbs, path)
    if sorted(perm.values()) != sorted(perm):
        raise GraphError("f_α is not a permutation of D_s(α_1)")
    lengths = orbit_lengths(perm)
    witness = next((x for x in sorted(perm) if all(n % lengths[x] for n in fset)), None)
    return FaithfulnessResult(
        None if witness is None else frozenset({witness}), max(lengths.values(), default=0), perm
    )
