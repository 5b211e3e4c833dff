"""Exact rational intervals, interval sets and piecewise-affine maps on the line.

Everything here uses :class:`fractions.Fraction`.  Intervals are closed and
overlaps of zero length are ignored throughout ("almost everywhere" for
Lebesgue measure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Q = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact endpoints; pass a string or Fraction")
    return Fraction(x)


def fraction_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (always with a denominator)."""
    return f"{x.numerator}/{x.denominator}"


class UnboundedSupport(ValueError):
    """A window touches the accumulation point of infinitely many pieces."""


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def meet(self, other: Interval) -> Interval | None:
        """Overlap of positive length, or ``None``."""
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def to_doc(self) -> list[str]:
        return [fraction_str(self.lo), fraction_str(self.hi)]

    @classmethod
    def from_doc(cls, doc: Sequence) -> Interval:
        return cls(as_fraction(doc[0]), as_fraction(doc[1]))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


# ---------------------------------------------------------------------------
# interval sets: sorted tuples of pairwise disjoint, non-touching intervals


def normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for iv in sorted(intervals):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return tuple(out)


def iset_union(*sets: Iterable[Interval]) -> tuple[Interval, ...]:
    return normalize(iv for s in sets for iv in s)


def iset_intersection(a: Iterable[Interval], b: Iterable[Interval]) -> tuple[Interval, ...]:
    b = list(b)
    return normalize(m for x in a for y in b if (m := x.meet(y)) is not None)


def iset_difference(a: Iterable[Interval], b: Iterable[Interval]) -> tuple[Interval, ...]:
    """``a \\ b`` up to endpoints."""
    cut = normalize(b)
    out: list[Interval] = []
    for iv in normalize(a):
        lo = iv.lo
        for c in cut:
            if c.hi <= lo or c.lo >= iv.hi:
                continue
            if c.lo > lo:
                out.append(Interval(lo, c.lo))
            lo = max(lo, c.hi)
            if lo >= iv.hi:
                break
        if lo < iv.hi:
            out.append(Interval(lo, iv.hi))
    return tuple(out)


def measure(a: Iterable[Interval]) -> Fraction:
    return sum((iv.length for iv in normalize(a)), Fraction(0))


def pairwise_overlaps(sets: Sequence[tuple[str, Iterable[Interval]]]) -> list[tuple[str, str, Interval]]:
    """All positive-length overlaps between differently labelled interval sets."""
    labelled = [(name, tuple(s)) for name, s in sets]
    out = []
    for i, (a, sa) in enumerate(labelled):
        for b, sb in labelled[i + 1 :]:
            for m in iset_intersection(sa, sb):
                out.append((a, b, m))
    return out


# ---------------------------------------------------------------------------
# affine pieces


@dataclass(frozen=True)
class AffinePiece:
    """``x ↦ slope·x + offset`` on ``dom``; ``slope`` is also the Radon-Nikodym derivative."""

    dom: Interval
    slope: Fraction
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", as_fraction(self.slope))
        object.__setattr__(self, "offset", as_fraction(self.offset))
        if self.slope <= 0:
            raise ValueError(f"slope must be positive, got {self.slope}")

    @classmethod
    def between(cls, dom: Interval, image: Interval) -> AffinePiece:
        """The increasing affine bijection ``dom -> image``."""
        slope = image.length / dom.length
        return cls(dom, slope, image.lo - slope * dom.lo)

    def __call__(self, x: Fraction) -> Fraction:
        return self.slope * x + self.offset

    @property
    def image(self) -> Interval:
        return Interval(self(self.dom.lo), self(self.dom.hi))

    def inverse(self) -> AffinePiece:
        return AffinePiece(self.image, 1 / self.slope, -self.offset / self.slope)

    def restrict(self, iv: Interval) -> AffinePiece | None:
        m = self.dom.meet(iv)
        return None if m is None else AffinePiece(m, self.slope, self.offset)

    def collinear_with(self, nxt: AffinePiece) -> bool:
        return self.dom.hi == nxt.dom.lo and self.slope == nxt.slope and self.offset == nxt.offset

    def to_doc(self) -> dict:
        return {"dom": self.dom.to_doc(), "slope": fraction_str(self.slope), "offset": fraction_str(self.offset)}

    @classmethod
    def from_doc(cls, doc) -> AffinePiece:
        return cls(Interval.from_doc(doc["dom"]), as_fraction(doc["slope"]), as_fraction(doc["offset"]))


@dataclass(frozen=True)
class TailPieces:
    """Infinitely many unit-domain pieces indexed by ``j = first, first+1, ...``.

    Piece ``j`` sends ``[d_top - k - 1, d_top - k]`` (``k = j - first``) onto
    ``[acc - 2^{1-p}, acc - 2^{-p}]`` with ``p = first_power + k``.  Domains run
    off to ``-∞`` while images accumulate at ``acc`` from below.  With
    ``inverted`` set the roles swap and the object describes the inverse map.
    """

    first: int
    first_power: int
    acc: Fraction
    d_top: Fraction
    inverted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "acc", as_fraction(self.acc))
        object.__setattr__(self, "d_top", as_fraction(self.d_top))
        if self.first_power < 1:
            raise ValueError("first_power must be at least 1")

    def forward(self, j: int) -> AffinePiece:
        if j < self.first:
            raise IndexError(j)
        k = j - self.first
        p = self.first_power + k
        half = Fraction(1, 2)
        dom = Interval(self.d_top - k - 1, self.d_top - k)
        return AffinePiece.between(dom, Interval(self.acc - half ** (p - 1), self.acc - half**p))

    def piece(self, j: int) -> AffinePiece:
        fwd = self.forward(j)
        return fwd.inverse() if self.inverted else fwd

    def inverse(self) -> TailPieces:
        return TailPieces(self.first, self.first_power, self.acc, self.d_top, not self.inverted)

    def domain_hull(self) -> tuple[Fraction | None, Fraction]:
        """``(lo, hi)`` of the union of all domains; ``lo`` is ``None`` for ``-∞``."""
        if self.inverted:
            return self.acc - Fraction(1, 2) ** (self.first_power - 1), self.acc
        return None, self.d_top

    def piece_at(self, x: Fraction) -> AffinePiece | None:
        lo, hi = self.domain_hull()
        if x >= hi or (lo is not None and x < lo):
            return None
        if not self.inverted:
            return self.piece(self.first + int(math.floor(self.d_top - x)))
        j = self.first
        while not self.piece(j).dom.contains(x):
            j += 1
        return self.piece(j)

    def iter_pieces(self, count: int) -> Iterator[AffinePiece]:
        for j in range(self.first, self.first + count):
            yield self.piece(j)

    def pieces_meeting(self, window: Interval) -> list[tuple[int, AffinePiece]]:
        out = []
        lo, hi = self.domain_hull()
        if window.lo >= hi or (lo is not None and window.hi <= lo):
            return out
        if self.inverted:
            if window.hi >= hi:
                raise UnboundedSupport(f"window {window} reaches the accumulation point {hi}")
            j = self.first
            while True:
                pc = self.piece(j)
                if pc.dom.lo >= window.hi:
                    break
                if pc.dom.meet(window):
                    out.append((j, pc))
                j += 1
        else:
            j = self.first
            while True:
                pc = self.piece(j)
                if pc.dom.hi <= window.lo:
                    break
                if pc.dom.meet(window):
                    out.append((j, pc))
                j += 1
        return out

    def to_doc(self) -> dict:
        return {
            "first": self.first,
            "first_power": self.first_power,
            "acc": fraction_str(self.acc),
            "d_top": fraction_str(self.d_top),
            "inverted": self.inverted,
        }

    @classmethod
    def from_doc(cls, doc) -> TailPieces:
        return cls(int(doc["first"]), int(doc["first_power"]), as_fraction(doc["acc"]),
                   as_fraction(doc["d_top"]), bool(doc.get("inverted", False)))


@dataclass(frozen=True)
class PiecewiseAffineMap:
    pieces: tuple[AffinePiece, ...] = ()
    tails: tuple[TailPieces, ...] = ()
    identity_elsewhere: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces, key=lambda p: p.dom)))

    def inverse(self) -> PiecewiseAffineMap:
        if self.identity_elsewhere:
            raise ValueError("maps extended by the identity are not inverted")
        return PiecewiseAffineMap(tuple(p.inverse() for p in self.pieces), tuple(t.inverse() for t in self.tails))

    @property
    def is_finite(self) -> bool:
        return not self.tails

    def pieces_meeting(self, window: Interval) -> list[AffinePiece]:
        found = [p for p in self.pieces if p.dom.meet(window)]
        for t in self.tails:
            found += [p for _, p in t.pieces_meeting(window)]
        return sorted(found, key=lambda p: p.dom)

    def domain(self, horizon: int | None = None) -> tuple[Interval, ...]:
        """Union of piece domains; tails contribute their hull (or ``horizon`` pieces if that is unbounded)."""
        parts = [p.dom for p in self.pieces]
        for t in self.tails:
            lo, hi = t.domain_hull()
            if lo is not None:
                parts.append(Interval(lo, hi))
            else:
                parts += [p.dom for p in t.iter_pieces(horizon or 0)]
        return normalize(parts)

    def image(self, horizon: int = 0) -> tuple[Interval, ...]:
        parts = [p.image for p in self.pieces]
        for t in self.tails:
            parts += [p.image for p in t.iter_pieces(horizon)]
        return normalize(parts)

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        for p in self.pieces:
            if p.dom.contains(x):
                return p(x)
        for t in self.tails:
            p = t.piece_at(x)
            if p is not None:
                return p(x)
        if self.identity_elsewhere:
            return x
        raise ValueError(f"{x} is outside the domain")

    def merged(self) -> PiecewiseAffineMap:
        """Fuse adjacent finite pieces that are restrictions of one affine map."""
        out: list[AffinePiece] = []
        for p in self.pieces:
            if out and out[-1].collinear_with(p):
                out[-1] = AffinePiece(Interval(out[-1].dom.lo, p.dom.hi), p.slope, p.offset)
            else:
                out.append(p)
        return PiecewiseAffineMap(tuple(out), self.tails, self.identity_elsewhere)

    def compose(self, inner: PiecewiseAffineMap) -> PiecewiseAffineMap:
        """``self ∘ inner`` for finite maps, defined where ``inner`` lands in ``self``'s domain."""
        if self.tails or inner.tails:
            raise ValueError("composition is only implemented for finite maps")
        out = []
        for q in inner.pieces:
            for p in self.pieces_meeting(q.image):
                img = p.dom.meet(q.image)
                sub = q.inverse().restrict(img)
                dom = sub.image
                out.append(AffinePiece(dom, p.slope * q.slope, p.slope * q.offset + p.offset))
        return PiecewiseAffineMap(tuple(out))

    def to_doc(self) -> dict:
        return {
            "pieces": [p.to_doc() for p in self.pieces],
            "tails": [t.to_doc() for t in self.tails],
            "identity_elsewhere": self.identity_elsewhere,
        }

    @classmethod
    def from_doc(cls, doc) -> PiecewiseAffineMap:
        if isinstance(doc, list):
            return cls(tuple(AffinePiece.from_doc(p) for p in doc))
        return cls(
            tuple(AffinePiece.from_doc(p) for p in doc.get("pieces", [])),
            tuple(TailPieces.from_doc(t) for t in doc.get("tails", [])),
            bool(doc.get("identity_elsewhere", False)),
        )
