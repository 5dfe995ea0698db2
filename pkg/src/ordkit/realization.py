"""Dynamical realization on the line with exact dyadic coordinates, and diagnostics."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Hashable, Iterable, Sequence

from .groups import DirectSumZ, Group, ball_enumerate
from .orders import OracleError, SignOracle, dsum_order


@total_ordering
@dataclass(frozen=True)
class Dyadic:
    """numerator / 2**exponent, canonical: numerator odd or exponent 0."""

    numerator: int = 0
    exponent: int = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("negative exponent")
        n, e = self.numerator, self.exponent
        while e > 0 and n % 2 == 0:
            n //= 2
            e -= 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", e)

    @staticmethod
    def from_fraction(q: Fraction | int) -> Dyadic:
        q = Fraction(q)
        e = q.denominator.bit_length() - 1
        if q.denominator != 1 << e:
            raise ValueError(f"{q} is not dyadic")
        return Dyadic(q.numerator, e)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __add__(self, k: int) -> Dyadic:
        return Dyadic(self.numerator + k * (1 << self.exponent), self.exponent)

    def __sub__(self, k: int) -> Dyadic:
        return self + (-k)

    def midpoint(self, other: Dyadic) -> Dyadic:
        e = max(self.exponent, other.exponent)
        n = (self.numerator << (e - self.exponent)) + (other.numerator << (e - other.exponent))
        return Dyadic(n, e + 1)

    def __lt__(self, other: Dyadic) -> bool:
        e = max(self.exponent, other.exponent)
        return (self.numerator << (e - self.exponent)) < (other.numerator << (e - other.exponent))

    def __float__(self) -> float:
        return self.numerator / (1 << self.exponent)

    def __str__(self) -> str:
        return str(self.to_fraction())


@dataclass
class Realization:
    group: Group
    label: str
    x0: Dyadic
    entries: list  # (element, Dyadic) in enumeration order
    value: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value:
            self.value = {g: v for g, v in self.entries}

    def sorted_entries(self) -> list:
        return sorted(self.entries, key=lambda e: e[1])

    def hull(self) -> tuple[Dyadic, Dyadic]:
        vals = [v for _, v in self.entries]
        return min(vals), max(vals)


def build_realization(lam: SignOracle, enumeration: Sequence, x0: Dyadic = Dyadic(0)) -> Realization:
    """Place g_1 = e at x0; a new element beyond the current extremes goes one unit
    further out, otherwise to the midpoint of its placed neighbours."""
    G = lam.group
    enumeration = list(enumeration)
    if not enumeration or not G.is_identity(enumeration[0]):
        raise ValueError("the enumeration must start with the identity")
    placed: list = []  # elements sorted by the order
    vals: list[Dyadic] = []
    entries = []
    keyed = lam.position is not None
    keys: list = []
    for g in enumeration:
        if not placed:
            v = x0
            i = 0
        else:
            if keyed:
                kg = lam.position(g)
                i = bisect.bisect_left(keys, kg)
                if i < len(keys) and keys[i] == kg:
                    raise OracleError(f"two elements share a position: {G.format(g)}")
            else:
                lo, hi = 0, len(placed)
                while lo < hi:
                    mid = (lo + hi) // 2
                    c = lam.compare(placed[mid], g)
                    if c == 0:
                        raise OracleError(f"{G.format(g)} enumerated twice")
                    if c < 0:
                        lo = mid + 1
                    else:
                        hi = mid
                i = lo
            # the neighbours must bracket g, otherwise the oracle is not a total order
            if i > 0 and not (lam.compare(placed[i - 1], g) < 0 < lam.compare(g, placed[i - 1])):
                raise OracleError("inconsistent comparison against the left neighbour")
            if i < len(placed) and not (lam.compare(g, placed[i]) < 0 < lam.compare(placed[i], g)):
                raise OracleError("inconsistent comparison against the right neighbour")
            if i == 0:
                v = vals[0] - 1
            elif i == len(placed):
                v = vals[-1] + 1
            else:
                v = vals[i - 1].midpoint(vals[i])
        placed.insert(i, g)
        vals.insert(i, v)
        if keyed:
            keys.insert(i, lam.position(g))
        entries.append((g, v))
    return Realization(G, lam.label, x0, entries)


def order_embedding_violations(R: Realization, key: Callable[[Hashable], object]) -> int:
    """Exhaustive pair check: count pairs whose realized order disagrees with ``key``."""
    items = [(key(g), v) for g, v in R.entries]
    bad = 0
    for i in range(len(items)):
        ki, vi = items[i]
        for j in range(i + 1, len(items)):
            kj, vj = items[j]
            if (ki < kj) != (vi < vj):
                bad += 1
    return bad


def order_embedding_by_sort(R: Realization, lam: SignOracle) -> bool:
    """Sort the entries with the oracle and check the coordinates increase."""
    ordered = lam.sorted(g for g, _ in R.entries)
    vals = [R.value[g] for g in ordered]
    return all(a < b for a, b in zip(vals, vals[1:]))


def partial_action(R: Realization, s) -> list[tuple[Dyadic, Dyadic]]:
    G = R.group
    pairs = []
    for g, v in R.entries:
        sg = G.mul(s, g)
        w = R.value.get(sg)
        if w is not None:
            pairs.append((v, w))
    pairs.sort()
    return pairs


def is_monotone(pairs: Sequence[tuple]) -> bool:
    return all(b1 < b2 for (_, b1), (_, b2) in zip(pairs, pairs[1:]))


def inversion_count(pairs: Sequence[tuple]) -> int:
    return sum(1 for (_, b1), (_, b2) in zip(pairs, pairs[1:]) if not b1 < b2)


def _window(R: Realization, window: tuple[float, float]) -> tuple[Fraction, Fraction]:
    lo, hi = (v.to_fraction() for v in R.hull())
    w0, w1 = Fraction(window[0]), Fraction(window[1])
    if not 0 <= w0 < w1 <= 1:
        raise ValueError("window must be a sub-interval of [0, 1]")
    width = hi - lo
    return lo + width * w0, lo + width * w1


@dataclass
class GapReport:
    window: tuple
    points: list  # sorted Fractions in the window
    gaps: list  # (left, right, width)
    base_gap: tuple | None  # interval around x0 free of non-member points
    inside: list = field(default_factory=list)  # elements whose points lie in base_gap
    stabilizer_candidates: list = field(default_factory=list)

    @property
    def max_gap(self) -> Fraction:
        return max((w for _, _, w in self.gaps), default=Fraction(0))

    @property
    def min_gap(self) -> Fraction:
        return min((w for _, _, w in self.gaps), default=Fraction(0))


def gap_spectrum(
    R: Realization,
    window: tuple[float, float] = (0.25, 0.75),
    member: Callable | None = None,
    candidates: Iterable = (),
) -> GapReport:
    """Gaps between consecutive orbit points in the window.

    With ``member``, the base gap is the open interval around x0 bounded by the
    nearest orbit points of non-members; ``candidates`` are tested for mapping
    the base gap's enumerated points back into it.
    """
    a, b = _window(R, window)
    pts = sorted(v.to_fraction() for _, v in R.entries)
    inside = [p for p in pts if a <= p <= b]
    if len(inside) < 2:
        raise ValueError("empty window")
    gaps = [(p, q, q - p) for p, q in zip(inside, inside[1:])]
    x0 = R.x0.to_fraction()
    base = None
    members_in = []
    stab = []
    if member is not None:
        left = [v.to_fraction() for g, v in R.entries if not member(g) and v.to_fraction() < x0]
        right = [v.to_fraction() for g, v in R.entries if not member(g) and v.to_fraction() > x0]
        lo = max(left) if left else None
        hi = min(right) if right else None
        base = (lo, hi)

        def within(p):
            return (lo is None or lo < p) and (hi is None or p < hi)

        members_in = [g for g, v in R.entries if within(v.to_fraction())]
        G = R.group
        for s in candidates:
            moved = [R.value.get(G.mul(s, g)) for g in members_in]
            moved = [m for m in moved if m is not None]
            if moved and all(within(m.to_fraction()) for m in moved):
                stab.append(s)
    else:
        i = bisect.bisect_left(inside, x0)
        if 0 < i < len(inside) - 1 and inside[i] == x0:
            base = (inside[i - 1], inside[i + 1])
    return GapReport((a, b), inside, gaps, base, members_in, stab)


def convexity_check(lam: SignOracle, member: Callable, r: int | None = None, elements: Sequence | None = None) -> dict:
    """Outside elements lying strictly between two members, with bracketing witnesses.

    Each offending g is reported once, with the nearest members below and above it.
    """
    G = lam.group
    if elements is None:
        elements = ball_enumerate(G, r)
    ordered = lam.sorted(elements)
    flags = [bool(member(g)) for g in ordered]
    members = [i for i, f in enumerate(flags) if f]
    violations = []
    if members:
        lo, hi = members[0], members[-1]
        last = lo
        for i in range(lo, hi + 1):
            if flags[i]:
                last = i
                continue
            nxt = next(j for j in range(i + 1, hi + 1) if flags[j])
            violations.append(
                {"h1": G.format(ordered[last]), "g": G.format(ordered[i]), "h2": G.format(ordered[nxt])}
            )
    return {"checked": len(ordered), "violations": violations}


def gap_bound_check(R: Realization, generators: Iterable, window: tuple[float, float] = (0.25, 0.75)) -> dict:
    """Largest orbit gap against largest generator displacement on the central window."""
    a, b = _window(R, window)
    pts = sorted(v.to_fraction() for _, v in R.entries)
    inside = [p for p in pts if a <= p <= b]
    max_gap = max((q - p for p, q in zip(inside, inside[1:])), default=Fraction(0))
    disp = Fraction(0)
    for s in generators:
        for x, y in partial_action(R, s):
            xf = x.to_fraction()
            if a <= xf <= b:
                disp = max(disp, abs(y.to_fraction() - xf))
    return {
        "window": (a, b),
        "max_gap": max_gap,
        "max_displacement": disp,
        "holds": max_gap <= disp,
    }


def relative_order_agrees(R1: Realization, R2: Realization) -> bool:
    """Same relative order on the common elements, and both based at e."""
    common = [g for g, _ in R1.entries if g in R2.value]
    o1 = sorted(common, key=lambda g: R1.value[g])
    o2 = sorted(common, key=lambda g: R2.value[g])
    e = R1.group.identity()
    return o1 == o2 and R1.value[e] == R1.x0 and R2.value[e] == R2.x0


def stable_gaps_tight(small: Realization, big: Realization) -> bool:
    """Regression guard on the placement rules: the smaller realization is a prefix
    of the larger, and every gap of the smaller one that receives no new point has
    enumerated orbit points as its endpoints."""
    n = len(small.entries)
    if big.entries[:n] != small.entries:
        return False
    pts_small = sorted(v for _, v in small.entries)
    pts_big = sorted(v for _, v in big.entries)
    endpoints = set(small.value.values())
    for p, q in zip(pts_small, pts_small[1:]):
        i, j = bisect.bisect_right(pts_big, p), bisect.bisect_left(pts_big, q)
        if i == j and not (p in endpoints and q in endpoints):
            return False
    return True


def dsum_demo(K: int, r: int = 2) -> dict:
    """Realize the top-index order of the K-truncated direct sum on ball(r).

    For each m < K the points of G_m stay strictly between the points of
    e_{m+1}^-1 and e_{m+1}; also reports the hull width.
    """
    G = DirectSumZ(K)
    lam = dsum_order(G)
    R = build_realization(lam, ball_enumerate(G, r))
    brackets = {}
    for m in range(0, K):
        s = G.unit(m + 1)
        lo, hi = R.value[G.inv(s)], R.value[s]
        inG = G.in_G(m)
        ok = all(lo < v < hi for g, v in R.entries if inG(g))
        brackets[m] = {"inside": ok, "interval": (str(lo), str(hi))}
    a, b = R.hull()
    return {"K": K, "radius": r, "hull_width": b.to_fraction() - a.to_fraction(), "brackets": brackets}
