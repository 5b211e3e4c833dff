"""Real step functions with exact rational breakpoints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .intervals import AffinePiece, Interval, as_fraction, fraction_str, normalize


@dataclass(frozen=True)
class StepFunction:
    """Finitely many ``(interval, value)`` pieces, zero elsewhere.

    Always canonical: sorted, non-overlapping, no zero pieces, and no two
    touching pieces with the same value.  Build through :meth:`make`, which
    sums overlapping contributions.
    """

    pieces: tuple[tuple[Interval, float], ...] = ()

    @classmethod
    def make(cls, pieces: Iterable[tuple[Interval, float]]) -> StepFunction:
        items = [(iv, float(v)) for iv, v in pieces if v != 0]
        if not items:
            return ZERO
        cuts = sorted({x for iv, _ in items for x in (iv.lo, iv.hi)})
        items.sort(key=lambda p: p[0].lo)
        out: list[tuple[Interval, float]] = []
        active: list[tuple[Interval, float]] = []
        nxt = 0
        for a, b in zip(cuts, cuts[1:]):
            while nxt < len(items) and items[nxt][0].lo == a:
                active.append(items[nxt])
                nxt += 1
            active = [p for p in active if p[0].hi > a]
            if not active:
                continue
            value = math.fsum(v for _, v in active)
            if value == 0:
                continue
            if out and out[-1][0].hi == a and out[-1][1] == value:
                out[-1] = (Interval(out[-1][0].lo, b), value)
            else:
                out.append((Interval(a, b), value))
        return cls(tuple(out))

    @classmethod
    def indicator(cls, *intervals: Interval, value: float = 1.0) -> StepFunction:
        return cls.make((iv, value) for iv in intervals)

    @classmethod
    def box(cls, lo, hi, value: float = 1.0) -> StepFunction:
        return cls.make([(Interval(as_fraction(lo), as_fraction(hi)), value)])

    # -- basic structure --------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.pieces)

    @property
    def support(self) -> tuple[Interval, ...]:
        return normalize(iv for iv, _ in self.pieces)

    @property
    def hull(self) -> Interval | None:
        if not self.pieces:
            return None
        return Interval(self.pieces[0][0].lo, self.pieces[-1][0].hi)

    def breakpoints(self) -> list[Fraction]:
        return sorted({x for iv, _ in self.pieces for x in (iv.lo, iv.hi)})

    def value_at(self, x) -> float:
        """Value at an interior point (endpoints are measure zero and return the left piece)."""
        x = as_fraction(x)
        for iv, v in self.pieces:
            if iv.lo <= x < iv.hi:
                return v
        return 0.0

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: StepFunction) -> StepFunction:
        return StepFunction.make(self.pieces + other.pieces)

    def __neg__(self) -> StepFunction:
        return StepFunction(tuple((iv, -v) for iv, v in self.pieces))

    def __sub__(self, other: StepFunction) -> StepFunction:
        return self + (-other)

    def scale(self, c: float) -> StepFunction:
        return StepFunction.make((iv, c * v) for iv, v in self.pieces)

    def map_values(self, fn: Callable[[float], float]) -> StepFunction:
        return StepFunction.make((iv, fn(v)) for iv, v in self.pieces)

    def square(self) -> StepFunction:
        return self.map_values(lambda v: v * v)

    def positive_part(self) -> StepFunction:
        return self.map_values(lambda v: max(v, 0.0))

    def negative_part(self) -> StepFunction:
        return self.map_values(lambda v: max(-v, 0.0))

    def sqrt(self) -> StepFunction:
        if any(v < 0 for _, v in self.pieces):
            raise ValueError("square root of a function with negative values")
        return self.map_values(math.sqrt)

    def __mul__(self, other: StepFunction) -> StepFunction:
        out = []
        for a, u in self.pieces:
            for b, v in other.pieces:
                m = a.meet(b)
                if m is not None:
                    out.append((m, u * v))
        return StepFunction.make(out)

    def restrict(self, intervals: Iterable[Interval], ray_hi: Fraction | None = None) -> StepFunction:
        """Multiply by the indicator of ``∪ intervals ∪ (-∞, ray_hi]``."""
        region = list(intervals)
        if ray_hi is not None and self.pieces and self.pieces[0][0].lo < ray_hi:
            region.append(Interval(self.pieces[0][0].lo, ray_hi))
        region = normalize(region)
        out = [(m, v) for iv, v in self.pieces for r in region if (m := iv.meet(r)) is not None]
        return StepFunction.make(out)

    def push(self, piece: AffinePiece, factor: float) -> StepFunction:
        """``factor · (φ|_dom ∘ piece^{-1})``: transport through an increasing affine piece."""
        out = []
        for iv, v in self.pieces:
            m = iv.meet(piece.dom)
            if m is not None:
                out.append((Interval(piece(m.lo), piece(m.hi)), v * factor))
        return StepFunction.make(out)

    # -- integrals --------------------------------------------------------

    def integral(self) -> float:
        return math.fsum(float(iv.length) * v for iv, v in self.pieces)

    def integral_over(self, iv: Interval) -> float:
        return math.fsum(float(m.length) * v for p, v in self.pieces if (m := p.meet(iv)) is not None)

    def l1(self) -> float:
        return math.fsum(float(iv.length) * abs(v) for iv, v in self.pieces)

    def l2(self) -> float:
        return math.sqrt(math.fsum(float(iv.length) * v * v for iv, v in self.pieces))

    def inner(self, other: StepFunction) -> float:
        return (self * other).integral()

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return all(v >= -tol for _, v in self.pieces)

    # -- I/O --------------------------------------------------------------

    def to_doc(self) -> dict:
        return {
            "pieces": [
                {"from": fraction_str(iv.lo), "to": fraction_str(iv.hi), "value": v} for iv, v in self.pieces
            ]
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> StepFunction:
        return cls.make(
            (Interval(as_fraction(p["from"]), as_fraction(p["to"])), float(p["value"])) for p in doc["pieces"]
        )

    def __str__(self) -> str:
        return " + ".join(f"{v:g}·χ{iv}" for iv, v in self.pieces) or "0"


ZERO = StepFunction()
