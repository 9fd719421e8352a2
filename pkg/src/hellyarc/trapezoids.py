"""Trapezoids spanned between two horizontal lines, with exact rational
arithmetic.

A trapezoid is the set of segments whose top endpoint lies in a base
interval on line A and whose bottom endpoint lies in a base interval on
line B; bases may be degenerate, open or closed on each side, or
infinite.  Two trapezoids *nicely intersect* when they admit spanned
segments crossing strictly between the lines with all four endpoints
distinct.  ``pick_segments`` realizes a family of pairwise nicely
intersecting trapezoids by pairwise crossing segments with pairwise
distinct endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

Bound = Optional[Fraction]  # None encodes the infinite end


@dataclass(frozen=True)
class Interval:
    lo: Bound = None
    lo_closed: bool = False
    hi: Bound = None
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is not None and not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None and not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", Fraction(self.hi))

    @property
    def empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    @property
    def degenerate(self) -> bool:
        return (
            self.lo is not None
            and self.lo == self.hi
            and self.lo_closed
            and self.hi_closed
        )

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None:
            if x < self.lo or (x == self.lo and not self.lo_closed):
                return False
        if self.hi is not None:
            if x > self.hi or (x == self.hi and not self.hi_closed):
                return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        lo, lo_c = self.lo, self.lo_closed
        if other.lo is not None and (lo is None or other.lo > lo):
            lo, lo_c = other.lo, other.lo_closed
        elif other.lo is not None and other.lo == lo:
            lo_c = lo_c and other.lo_closed
        hi, hi_c = self.hi, self.hi_closed
        if other.hi is not None and (hi is None or other.hi < hi):
            hi, hi_c = other.hi, other.hi_closed
        elif other.hi is not None and other.hi == hi:
            hi_c = hi_c and other.hi_closed
        return Interval(lo, lo_c, hi, hi_c)

    def pick(
        self,
        above: Bound = None,
        below: Bound = None,
        fallback_step: Fraction = Fraction(1),
    ) -> Fraction:
        """A point of the interval, strictly above/below the given bounds."""
        lo, lo_strict = self.lo, not self.lo_closed
        if above is not None and (lo is None or above >= lo):
            lo, lo_strict = above, True
        hi, hi_strict = self.hi, not self.hi_closed
        if below is not None and (hi is None or below <= hi):
            hi, hi_strict = below, True
        if lo is None and hi is None:
            return Fraction(0)
        if lo is None:
            return hi - fallback_step if hi_strict else hi
        if hi is None:
            return lo + fallback_step if lo_strict else lo
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            raise ValueError("no point in the constrained interval")
        if not lo_strict:
            return lo
        if not hi_strict:
            return hi
        return (lo + hi) / 2


def point(x) -> Interval:
    x = Fraction(x)
    return Interval(x, True, x, True)


def strict_left_of(x) -> Interval:
    return Interval(None, False, Fraction(x), False)


def strict_right_of(x) -> Interval:
    return Interval(Fraction(x), False, None, False)


FULL = Interval()


@dataclass(frozen=True)
class SpannedTrapezoid:
    top: Interval
    bottom: Interval

    @property
    def empty(self) -> bool:
        return self.top.empty or self.bottom.empty


def _exists_lt(i: Interval, j: Interval) -> bool:
    """Are there points a in i, b in j with a < b?  (Nonempty intervals.)"""
    if i.empty or j.empty:
        return False
    if i.lo is None or j.hi is None:
        return True
    return i.lo < j.hi


def nicely_intersect(t1: SpannedTrapezoid, t2: SpannedTrapezoid) -> bool:
    """Crossing spanned segments with four distinct endpoints exist."""
    if t1.empty or t2.empty:
        return False
    return (_exists_lt(t1.top, t2.top) and _exists_lt(t2.bottom, t1.bottom)) or (
        _exists_lt(t2.top, t1.top) and _exists_lt(t1.bottom, t2.bottom)
    )


def regions_disjoint(t1: SpannedTrapezoid, t2: SpannedTrapezoid) -> bool:
    """No chord of t1 shares a point with a chord of t2.

    Chords (p1,q1), (p2,q2) miss each other for all choices exactly when
    one trapezoid lies strictly left of the other on both lines.
    """
    if t1.empty or t2.empty:
        return True

    def strictly_left(i: Interval, j: Interval) -> bool:
        # every point of i < every point of j
        if i.hi is None or j.lo is None:
            return False
        if i.hi < j.lo:
            return True
        return i.hi == j.lo and not (i.hi_closed and j.lo_closed)

    return (
        strictly_left(t1.top, t2.top) and strictly_left(t1.bottom, t2.bottom)
    ) or (strictly_left(t2.top, t1.top) and strictly_left(t2.bottom, t1.bottom))


Segment = Tuple[Fraction, Fraction]  # (top x, bottom x)


def segments_cross(s1: Segment, s2: Segment) -> bool:
    """Strict crossing between the lines, endpoints distinct."""
    return (s1[0] - s2[0]) * (s1[1] - s2[1]) < 0


def verify_segments(traps: Sequence[SpannedTrapezoid], segs: Sequence[Segment]):
    """Containment, pairwise crossing, distinct endpoints; raises on failure."""
    tops = [s[0] for s in segs]
    bots = [s[1] for s in segs]
    if len(set(tops)) != len(tops) or len(set(bots)) != len(bots):
        raise AssertionError("segment endpoints collide")
    for t, s in zip(traps, segs):
        if not (t.top.contains(s[0]) and t.bottom.contains(s[1])):
            raise AssertionError(f"segment {s} escapes its trapezoid {t}")
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if not segments_cross(segs[i], segs[j]):
                raise AssertionError(f"segments {i} and {j} do not cross")


def pick_segments(
    traps: Sequence[SpannedTrapezoid],
) -> Union[List[Segment], Tuple[str, int, int]]:
    """Pairwise crossing segments, one per trapezoid, or a witness pair.

    When all pairs nicely intersect: segments are inserted in a topological
    order of the corner relations <_A and <_B; each insertion compresses
    earlier endpoints towards the new trapezoid's corners, exactly rational.
    Otherwise returns ('witness', i, j) for a non-nicely-intersecting pair.
    """
    t = len(traps)
    for i in range(t):
        for j in range(i + 1, t):
            if not nicely_intersect(traps[i], traps[j]):
                return ("witness", i, j)

    if t == 0:
        return []
    if t == 1:
        tr = traps[0]
        return [(tr.top.pick(), tr.bottom.pick())]

    # <_A: every top point of i <= every top point of j
    # <_B: every bottom point of i >= every bottom point of j
    def ltA(i, j):
        a, b = traps[i].top, traps[j].top
        return a.hi is not None and b.lo is not None and a.hi <= b.lo

    def ltB(i, j):
        a, b = traps[i].bottom, traps[j].bottom
        return a.lo is not None and b.hi is not None and a.lo >= b.hi

    succ = {i: set() for i in range(t)}
    indeg = {i: 0 for i in range(t)}
    for i in range(t):
        for j in range(t):
            if i != j and (ltA(i, j) or ltB(i, j)):
                succ[i].add(j)
    for i in succ:
        for j in succ[i]:
            indeg[j] += 1
    order = []
    avail = sorted(i for i in range(t) if indeg[i] == 0)
    while avail:
        x = avail.pop(0)
        order.append(x)
        for y in sorted(succ[x]):
            indeg[y] -= 1
            if indeg[y] == 0:
                avail.append(y)
        avail.sort()
    if len(order) != t:  # pragma: no cover - excluded by nice intersection
        raise AssertionError("corner relations are cyclic")

    placed: List[Tuple[int, Segment]] = []  # (trap index, segment)

    def squeeze(values, lo, hi):
        """len(values) fresh increasing rationals strictly inside (lo, hi)."""
        k = len(values)
        step = (hi - lo) / (k + 1)
        return [lo + step * (m + 1) for m in range(k)]

    for idx in order:
        tr = traps[idx]
        prior_infs_top = [
            traps[i].top.lo for i, _ in placed if traps[i].top.lo is not None
        ]
        m_top = max(prior_infs_top, default=None)
        prior_sups_bot = [
            traps[i].bottom.hi for i, _ in placed if traps[i].bottom.hi is not None
        ]
        m_bot = min(prior_sups_bot, default=None)
        used_tops = [s[0] for _, s in placed]
        used_bots = [s[1] for _, s in placed]
        high = max(used_tops + [Fraction(0)]) + 1
        low = min(used_bots + [Fraction(0)]) - 1
        P = tr.top.pick(above=m_top, fallback_step=high - (m_top or 0))
        Q = tr.bottom.pick(below=m_bot, fallback_step=(m_bot or 0) - low)

        moved_top = sorted(
            [i for i, (_, s) in enumerate(placed) if s[0] >= P],
            key=lambda i: placed[i][1][0],
        )
        if moved_top:
            floor = [s[0] for _, s in placed if s[0] < P]
            if m_top is not None:
                floor.append(m_top)
            zone_lo = max(floor) if floor else P - 1
            news = squeeze(moved_top, zone_lo, P)
            for i, val in zip(moved_top, news):
                ti, (a, b) = placed[i]
                placed[i] = (ti, (val, b))
        moved_bot = sorted(
            [i for i, (_, s) in enumerate(placed) if s[1] <= Q],
            key=lambda i: placed[i][1][1],
            reverse=True,
        )
        if moved_bot:
            ceil = [s[1] for _, s in placed if s[1] > Q]
            if m_bot is not None:
                ceil.append(m_bot)
            zone_hi = min(ceil) if ceil else Q + 1
            news = squeeze(moved_bot, Q, zone_hi)
            news.reverse()
            for i, val in zip(moved_bot, news):
                ti, (a, b) = placed[i]
                placed[i] = (ti, (a, val))
        placed.append((idx, (P, Q)))

    segs: List[Segment] = [None] * t
    for ti, s in placed:
        segs[ti] = s
    verify_segments(traps, segs)
    return segs
