"""Circular orders on PSL(2,Z) from exact boundary actions, and their lifts to B3.

Conventions: the boundary Q u {inf} is traversed counterclockwise in the
direction of increasing reals.  The base point is y0 = 0.  A point of the
line covering the circle is a pair (winding, boundary point); it is ordered
by winding first, then by counterclockwise position starting at y0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

from .groups import (
    ALPHA,
    BETA,
    BETA2,
    B3Element,
    PSL2ZElement,
    PSL2ZGroup,
    PSL_ALPHA,
    PSL_BETA,
    ball_enumerate,
    psl_lift,
    q_map,
)
from .orders import OracleError, SignOracle


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Point = "Fraction | _Infinity"


class NoLift(ValueError):
    pass


class LiftError(ValueError):
    pass


class FreenessError(ValueError):
    pass


class DegenerateInterval(ValueError):
    pass


class PingPongFailed(ValueError):
    pass


def as_point(x) -> Fraction | _Infinity:
    if x is INF or x == "inf":
        return INF
    return Fraction(x)


def point_json(p) -> dict:
    if p is INF:
        return {"inf": True}
    return {"num": p.numerator, "den": p.denominator}


def point_from_json(obj: dict):
    return INF if obj.get("inf") else Fraction(obj["num"], obj["den"])


# ---------------------------------------------------------------------------
# Moebius maps


@dataclass(frozen=True)
class Moebius:
    """z -> (a z + b) / (c z + d) with integer entries, det > 0, up to positive scalar."""

    a: int
    b: int
    c: int
    d: int

    @staticmethod
    def of(a, b, c, d) -> Moebius:
        entries = [Fraction(x) for x in (a, b, c, d)]
        den = 1
        for x in entries:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in entries]
        g = 0
        for x in ints:
            g = gcd(g, x)
        ints = [x // g for x in ints]
        if ints[0] * ints[3] - ints[1] * ints[2] <= 0:
            raise ValueError("Moebius map needs positive determinant")
        return Moebius(*ints)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __mul__(self, other: Moebius) -> Moebius:
        return Moebius.of(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> Moebius:
        return Moebius.of(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> Moebius:
        base = self if n >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(n)):
            out = out * base
        return out

    def __call__(self, p):
        if p is INF:
            return INF if self.c == 0 else Fraction(self.a, self.c)
        num = self.a * p + self.b
        den = self.c * p + self.d
        if den == 0:
            return INF
        return Fraction(num) / den

    def is_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def kind(self) -> str:
        if self.is_identity():
            return "identity"
        t2, d4 = self.trace ** 2, 4 * self.det
        if t2 < d4:
            return "elliptic"
        return "parabolic" if t2 == d4 else "hyperbolic"

    def matrix(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


IDENTITY = Moebius(1, 0, 0, 1)


# ---------------------------------------------------------------------------
# Circular positions


def ccw_key(p, base=Fraction(0)) -> tuple:
    """Sort key of p along the circle, counterclockwise starting at base."""
    if base is INF:
        return (0, 0) if p is INF else (1, p)
    if p is INF:
        return (1, 0)
    return (0, p) if p >= base else (2, p)


def cyclic_sign(x, y, z) -> int:
    """Sign of the cyclic order of three comparable keys."""
    if x == y or y == z or x == z:
        return 0
    # an even permutation of the sorted triple is positively oriented
    inversions = (x > y) + (x > z) + (y > z)
    return 1 if inversions % 2 == 0 else -1


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def circular_sign(p, q, r) -> int:
    if p == q or q == r or p == r:
        return 0
    if r is INF:
        return _sgn(q - p)
    if p is INF:
        return _sgn(r - q)
    if q is INF:
        return _sgn(p - r)
    return _sgn((q - p) * (r - q) * (r - p))


# ---------------------------------------------------------------------------
# Representations of PSL(2,Z)

MODULAR_ALPHA = Moebius(0, -1, 1, 0)
MODULAR_BETA = Moebius(1, 1, -1, 0)

DEFAULT_DEFORMATION = (Fraction(5, 4), Fraction(-3, 4))
FALLBACK_DEFORMATIONS = [
    (Fraction(13, 12), Fraction(-5, 12)),
    (Fraction(17, 15), Fraction(-8, 15)),
    (Fraction(25, 24), Fraction(-7, 24)),
    (Fraction(41, 40), Fraction(-9, 40)),
]


@dataclass(frozen=True)
class Rep:
    alpha: Moebius
    beta: Moebius
    kind: str = "modular"
    params: tuple = ()

    def generator(self, syl: int) -> Moebius:
        if syl == ALPHA:
            return self.alpha
        return self.beta if syl == BETA else self.beta * self.beta

    def matrix(self, g: PSL2ZElement) -> Moebius:
        m = IDENTITY
        for syl in g.tail:
            m = m * self.generator(syl)
        return m

    def point(self, g: PSL2ZElement, y0=Fraction(0)):
        p = y0
        for syl in reversed(g.tail):
            p = self.generator(syl)(p)
        return p

    def metadata(self) -> dict:
        out = {"kind": self.kind}
        if self.params:
            out["c"] = str(self.params[0])
            out["d"] = str(self.params[1])
        return out


def build_rep(kind: str = "deformed", c=None, d=None) -> Rep:
    """The modular representation, or beta conjugated by H = [[c, d], [d, c]]."""
    if kind == "modular":
        return Rep(MODULAR_ALPHA, MODULAR_BETA, "modular")
    if kind != "deformed":
        raise ValueError(f"unknown representation kind {kind!r}")
    c, d = (DEFAULT_DEFORMATION if c is None else (Fraction(c), Fraction(d)))
    if c * c - d * d != 1 or d >= 0 or c <= 0:
        raise ValueError(f"invalid deformation parameters c={c}, d={d}")
    H = Moebius.of(c, d, d, c)
    beta = H * MODULAR_BETA * H.inverse()
    rep = Rep(MODULAR_ALPHA, beta, "deformed", (c, d))
    # elliptic of orders 2 and 3
    assert rep.alpha.trace == 0
    assert Fraction(beta.trace ** 2, beta.det) == 1
    return rep


def default_rep() -> Rep:
    """Default deformation, falling back along the parameter list if ping-pong fails."""
    for c, d in [DEFAULT_DEFORMATION] + FALLBACK_DEFORMATIONS:
        rep = build_rep("deformed", c, d)
        if ping_pong_verify(rep, guardian_intervals(rep))["ok"]:
            return rep
    raise PingPongFailed("no listed deformation parameter passes ping-pong")


# ---------------------------------------------------------------------------
# Configurations and circular orders


@dataclass
class CircularConfig:
    """Elements in counterclockwise order from the base point, with their keys."""

    entries: list  # (element, point, key)
    convention: str = "ccw-increasing-reals"

    def __post_init__(self):
        self._index = {g: i for i, (g, _, _) in enumerate(self.entries)}

    def elements(self) -> list:
        return [g for g, _, _ in self.entries]

    def sign(self, g1, g2, g3) -> int:
        i = self._index
        return cyclic_sign(i[g1], i[g2], i[g3])

    def __contains__(self, g) -> bool:
        return g in self._index

    def restrict(self, elements: Iterable) -> CircularConfig:
        keep = set(elements)
        return CircularConfig([e for e in self.entries if e[0] in keep], self.convention)

    def cyclic_elements(self, start) -> list:
        els = self.elements()
        i = els.index(start)
        return els[i:] + els[:i]

    def to_json(self) -> list:
        return [{"word": str(g), "point": point_json(p)} for g, p, _ in self.entries]


def orbit_config(rep: Rep, elements: Iterable[PSL2ZElement], y0=Fraction(0)) -> CircularConfig:
    els = list(dict.fromkeys(elements))
    seen: dict = {}
    for g in els:
        p = rep.point(g, y0)
        if p in seen:
            raise FreenessError(f"{seen[p]} and {g} send y0 to the same point {p}")
        seen[p] = g
    entries = sorted(((g, p, ccw_key(p, y0)) for p, g in seen.items()), key=lambda e: e[2])
    return CircularConfig(entries)


def rep_cocycle(rep: Rep, y0=Fraction(0)) -> Callable:
    """The triple oracle c(g1, g2, g3) of the orbit of y0."""

    points: dict = {}

    def pt(g):
        p = points.get(g)
        if p is None:
            p = points[g] = rep.point(g, y0)
        return p

    def c(g1, g2, g3) -> int:
        return circular_sign(pt(g1), pt(g2), pt(g3))

    return c


def co_sign(c: Callable) -> int:
    """+1 or -1 according as c(e, beta, beta^2) is positive (CO+) or negative (CO-)."""
    return c(PSL2ZElement(()), PSL_BETA, PSL_BETA * PSL_BETA)


def cocycle_check(c: Callable, sample: Sequence, mul: Callable | None = None, invariance: bool = True) -> dict:
    """Check the circular-order axioms on all triples and quadruples of the sample."""
    mul = mul or (lambda g, h: g * h)
    sample = list(dict.fromkeys(sample))
    products = {(g, h): mul(g, h) for g in sample for h in sample}
    viol = []
    for t in itertools.product(sample, repeat=3):
        repeat = len(set(t)) < 3
        v = c(*t)
        if (v == 0) != repeat or v not in (0, 1, -1):
            viol.append(("zero", t))
    for g1, g2, g3, g4 in itertools.product(sample, repeat=4):
        if c(g2, g3, g4) - c(g1, g3, g4) + c(g1, g2, g4) - c(g1, g2, g3) != 0:
            viol.append(("cocycle", (g1, g2, g3, g4)))
        if invariance and c(products[g4, g1], products[g4, g2], products[g4, g3]) != c(g1, g2, g3):
            viol.append(("invariance", (g1, g2, g3, g4)))
    return {"checked": len(sample), "violations": viol}


# ---------------------------------------------------------------------------
# Lifts to the line


@dataclass(frozen=True)
class LineMap:
    """A lift of a Moebius map to the line: the lift sending x0 = (0, 0) to (j, f(0))."""

    f: Moebius
    j: int = 0

    def __call__(self, pos: tuple):
        w, p = pos
        fp = self.f(p)
        return (w + self.j + (ccw_key(fp) < ccw_key(self.f(Fraction(0)))), fp)

    def __mul__(self, other: LineMap) -> LineMap:
        # self after other
        w, _ = self((other.j, other.f(Fraction(0))))
        return LineMap(self.f * other.f, w)

    def inverse(self) -> LineMap:
        finv = self.f.inverse()
        return LineMap(finv, -self.j - (self.f(Fraction(0)) != 0))

    def __pow__(self, n: int) -> LineMap:
        base = self if n >= 0 else self.inverse()
        out = LineMap(IDENTITY, 0)
        for _ in range(abs(n)):
            out = base * out
        return out

    def shifted(self, n: int) -> LineMap:
        return LineMap(self.f, self.j + n)


X0 = (0, Fraction(0))


def position_key(pos: tuple) -> tuple:
    return (pos[0], ccw_key(pos[1]))


def deck_winding(F: LineMap, n: int) -> int:
    """F^n covers the identity; return its translation length."""
    G = F ** n
    if not G.f.is_identity():
        raise LiftError("the power does not cover the identity")
    return G.j


@dataclass(frozen=True)
class BraidLift:
    """Lifts of a PSL(2,Z) action to the line with a^2 = b^3 = t = translation by sign*period.

    ``period`` is the number of base windings per turn of the circle carrying
    the circular order (k for the k-fold lift).
    """

    rep: Rep
    period: int
    sign: int
    a: LineMap
    b: LineMap

    def element_map(self, g: B3Element) -> LineMap:
        F = LineMap(IDENTITY, self.sign * self.period * g.central)
        for syl in g.tail:
            F = F * self._syl(syl)
        return F

    def _syl(self, syl: int) -> LineMap:
        if syl == ALPHA:
            return self.a
        return self.b if syl == BETA else self.b * self.b

    def lift_eval(self, g: B3Element) -> tuple:
        F = self.element_map(g)
        return (F.j, F.f(Fraction(0)))

    def key(self, g: B3Element) -> tuple:
        return position_key(self.lift_eval(g))

    def sign_of(self, g: B3Element) -> int:
        if g.is_identity():
            raise OracleError("pi_star_sign of the identity")
        k = self.key(g)
        x0 = position_key(X0)
        if k == x0:
            raise OracleError(f"{g} fixes x0: the action is not free")
        return 1 if k > x0 else -1

    def oracle(self, group=None) -> SignOracle:
        from .groups import B3Group

        label = "pi-star-c(1)" if self.period == 1 else f"pi-star-c({self.period})"
        return SignOracle(group or B3Group(), self.sign_of, label, position=self.key)


def _root_shift(F0: LineMap, n: int, target: int) -> int | None:
    W = deck_winding(F0, n)
    if (target - W) % n:
        return None
    return (target - W) // n


def braid_lift(rep: Rep, k: int = 1, sign: int | None = None) -> BraidLift:
    """pi-star of the k-fold lift of rep: the lifts with a^2 = b^3 = tau_k^(+-1).

    ``sign`` None selects the unique sign for which both roots exist.
    """
    A0, B0 = LineMap(rep.alpha), LineMap(rep.beta)
    signs = (1, -1) if sign is None else (sign,)
    for s in signs:
        ja, jb = _root_shift(A0, 2, s * k), _root_shift(B0, 3, s * k)
        if ja is not None and jb is not None:
            return BraidLift(rep, k, s, A0.shifted(ja), B0.shifted(jb))
    if sign is None:
        raise NoLift(f"no lift with a^2 = b^3 = tau^(+-1) for k={k}")
    raise LiftError(f"no lift with a^2 = b^3 = tau^{sign} for k={k}")


def pi_star_sign(lift: BraidLift, g: B3Element) -> int:
    return lift.sign_of(g)


def combinatorial_pi_star(c: Callable, sign: int = 1) -> SignOracle:
    """pi-star of an arbitrary circular order c on PSL(2,Z), read off its cocycle.

    Positions on the line are (winding, orbit element); an element's position
    in [x0, x0 + 1) is its counterclockwise rank from e.
    """
    e = PSL2ZElement(())

    def before(x, y) -> bool:
        # x strictly precedes y counterclockwise from e
        if x == y:
            return False
        if x == e:
            return True
        if y == e:
            return False
        return c(e, x, y) == 1

    def step(s: PSL2ZElement, pos: tuple, j: int) -> tuple:
        w, h = pos
        sh = s * h
        return (w + j + before(sh, s), sh)

    def power_winding(s: PSL2ZElement, n: int) -> int:
        pos = (0, e)
        for _ in range(n):
            pos = step(s, pos, 0)
        assert pos[1] == e
        return pos[0]

    ja = (sign - power_winding(PSL_ALPHA, 2))
    jb = (sign - power_winding(PSL_BETA, 3))
    if ja % 2 or jb % 3:
        raise LiftError(f"the circular order admits no lift with t -> tau^{sign}")
    ja //= 2
    jb //= 3

    def evaluate(g: B3Element) -> tuple:
        pos = (0, e)
        for syl in reversed(g.tail):
            if syl == ALPHA:
                pos = step(PSL_ALPHA, pos, ja)
            else:
                for _ in range(1 if syl == BETA else 2):
                    pos = step(PSL_BETA, pos, jb)
        return (pos[0] + sign * g.central, pos[1])

    def sgn(g: B3Element) -> int:
        if g.is_identity():
            raise OracleError("identity")
        w, h = evaluate(g)
        if w != 0:
            return 1 if w > 0 else -1
        return 1 if h != e else _zero_fail(g)

    def _zero_fail(g):
        raise OracleError(f"{g} fixes x0")

    from .groups import B3Group

    return SignOracle(B3Group(), sgn, "pi-star(c)")


def q_star_representative(lam: SignOracle, g: PSL2ZElement) -> B3Element:
    """The lift of g lying in [e, t) (or [e, t^-1) when t is negative)."""
    G = lam.group
    e = G.identity()
    t = B3Element(1, ())
    if lam.sign(t) < 0:
        t = t.inverse()
    h = psl_lift(g)
    for _ in range(10_000):
        if lam.compare(h, e) < 0:
            h = t * h
        elif lam.compare(h, t) >= 0:
            h = t.inverse() * h
        else:
            return h
    raise OracleError("representative search failed: t is not cofinal on the tested set")


def q_star_sign(lam: SignOracle, g1: PSL2ZElement, g2: PSL2ZElement, g3: PSL2ZElement) -> int:
    if g1 == g2 or g2 == g3 or g1 == g3:
        return 0
    r = [q_star_representative(lam, g) for g in (g1, g2, g3)]
    cmp = lam.compare
    # cyclic sign of the linear ranks
    inversions = (cmp(r[0], r[1]) > 0) + (cmp(r[0], r[2]) > 0) + (cmp(r[1], r[2]) > 0)
    return 1 if inversions % 2 == 0 else -1


def q_star(lam: SignOracle) -> Callable:
    cache: dict = {}

    def c(g1, g2, g3) -> int:
        key = (g1, g2, g3)
        if key not in cache:
            cache[key] = q_star_sign(lam, g1, g2, g3)
        return cache[key]

    return c


# ---------------------------------------------------------------------------
# k-fold lifts and rotation numbers


@dataclass(frozen=True)
class KFoldLift:
    """The k-fold lift: cover points are (boundary point, sheet mod k)."""

    rep: Rep
    k: int
    alpha: LineMap
    beta: LineMap

    def element_map(self, g: PSL2ZElement) -> LineMap:
        F = LineMap(IDENTITY, 0)
        for syl in g.tail:
            F = F * (self.alpha if syl == ALPHA else self.beta if syl == BETA else self.beta * self.beta)
        return F

    def point(self, g: PSL2ZElement) -> tuple:
        F = self.element_map(g)
        return (F.f(Fraction(0)), F.j % self.k)

    def key(self, g: PSL2ZElement) -> tuple:
        p, s = self.point(g)
        return (s, ccw_key(p))

    def cocycle(self) -> Callable:
        def c(g1, g2, g3) -> int:
            return cyclic_sign(self.key(g1), self.key(g2), self.key(g3))

        return c

    def config(self, elements: Iterable[PSL2ZElement]) -> CircularConfig:
        els = list(dict.fromkeys(elements))
        entries = sorted(((g, self.point(g), self.key(g)) for g in els), key=lambda e: e[2])
        keys = [e[2] for e in entries]
        if len(set(keys)) != len(keys):
            raise FreenessError("two elements share an orbit point on the cover")
        return CircularConfig(entries)

    def metadata(self) -> dict:
        return {"k": self.k, "sheet_alpha": self.alpha.j, "sheet_beta": self.beta.j}


def _solve_mod(a: int, b: int, k: int) -> list[int]:
    return [s for s in range(k) if (a * s - b) % k == 0]


def k_fold_lift(rep: Rep, k: int) -> KFoldLift:
    """The unique sheet shifts with alpha^2 = beta^3 = id on the k-fold cover."""
    if k < 1:
        raise ValueError("k must be positive")
    A0, B0 = LineMap(rep.alpha), LineMap(rep.beta)
    wa, wb = deck_winding(A0, 2), deck_winding(B0, 3)
    sa, sb = _solve_mod(2, -wa, k), _solve_mod(3, -wb, k)
    if not sa or not sb:
        raise NoLift(f"no {k}-fold lift exists (k must be = +-1 mod 6)")
    if len(sa) > 1 or len(sb) > 1:
        raise NoLift(f"the {k}-fold lift is not unique")
    return KFoldLift(rep, k, A0.shifted(sa[0]), B0.shifted(sb[0]))


def _displacement_power_free(F: LineMap, m: int) -> bool:
    return F.f.__pow__(m).kind() != "elliptic"


def rotation_number(F: LineMap, k: int = 1, max_period: int = 12, iterations: int = 4) -> Fraction:
    """Exact rotation number, in turns of the k-fold circle, of the map F covers.

    Needs some power F^m (m <= max_period) whose base map has a fixed point:
    then F^m has integer translation number T, recovered exactly from the
    winding of F^(m*iterations)(x0), and rot = T / (m k) mod 1.
    """
    if iterations < 4:
        raise ValueError("at least four iterations are needed to round exactly")
    for m in range(1, max_period + 1):
        Fm = F ** m
        if Fm.f.kind() == "elliptic":
            continue
        W = (Fm ** iterations).j
        T = round(Fraction(W, iterations))
        if abs(W - iterations * T) >= 2:
            raise RuntimeError("winding estimate out of bounds")
        return Fraction(T, m * k) % 1
    raise ValueError(f"no power up to {max_period} has a fixed point")


def kfold_rotation(rep: Rep, k: int, g: PSL2ZElement, max_period: int = 12) -> Fraction:
    L = k_fold_lift(rep, k)
    return rotation_number(L.element_map(g), k, max_period)


def expected_rotation(k: int) -> Fraction:
    """-+l/k for k = 6l +- 1, reduced mod 1."""
    if k % 6 == 1:
        return Fraction(-(k - 1) // 6, k) % 1
    if k % 6 == 5:
        return Fraction((k + 1) // 6, k) % 1
    raise NoLift(f"k={k} is not +-1 mod 6")


# ---------------------------------------------------------------------------
# Ping-pong

E = PSL2ZElement(())
AL, BE = PSL_ALPHA, PSL_BETA
BE2 = PSL_BETA * PSL_BETA
GAMMA1 = BE2 * AL * BE * AL
GAMMA2 = AL * BE * AL * BE2

FIRST_GENERATION = [E, AL * BE, AL * BE * AL, AL * BE2, AL * BE2 * AL, AL, BE, BE * AL, BE2, BE2 * AL]

# guardian pairs of K_i^-, K_i^+ as counterclockwise arcs
GUARDIANS = {
    ("1", "-"): (AL * BE2, AL * BE2 * AL),
    ("1", "+"): (BE2, BE2 * AL),
    ("2", "-"): (BE, BE * AL),
    ("2", "+"): (AL * BE, AL * BE * AL),
}

GAMMAS = {"1": GAMMA1, "2": GAMMA2}


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc from ``left`` to ``right``."""

    left: object
    right: object

    def __post_init__(self):
        if self.left == self.right:
            raise DegenerateInterval(f"arc endpoints coincide at {self.left}")

    def contains_open(self, p) -> bool:
        return circular_sign(self.left, p, self.right) == 1

    def contains_closed(self, p) -> bool:
        return p == self.left or p == self.right or self.contains_open(p)

    def contains_arc(self, other: Arc, strict: bool = True) -> bool:
        test = self.contains_open if strict else self.contains_closed
        if not (test(other.left) and test(other.right)):
            return False
        # orientation of the inner arc must agree
        return other.left == self.left or circular_sign(self.left, other.left, other.right) == 1

    def complement(self) -> Arc:
        return Arc(self.right, self.left)

    def image(self, f: Moebius) -> Arc:
        return Arc(f(self.left), f(self.right))


def circular_midpoint(p, q):
    """A rational point strictly inside the counterclockwise arc from p to q."""
    if p is INF:
        return q - 1
    if q is INF:
        return p + 1
    if p < q:
        return (p + q) / 2
    return INF


@dataclass
class Guarded:
    J: Arc
    K: Arc


def guardian_intervals(rep: Rep) -> dict:
    """J_i^+- intervals: guardian arcs K padded toward the neighbouring
    first-generation points."""
    pts = [rep.point(g) for g in FIRST_GENERATION]
    distinct = sorted(set(pts), key=ccw_key)
    out = {}
    for key, (gl, gr) in GUARDIANS.items():
        pl, pr = rep.point(gl), rep.point(gr)
        i, j = distinct.index(pl), distinct.index(pr)
        prev, nxt = distinct[i - 1], distinct[(j + 1) % len(distinct)]
        # a quarter of the way: neighbouring J's must not share the halfway point
        left = circular_midpoint(circular_midpoint(prev, pl), pl)
        right = circular_midpoint(pr, circular_midpoint(pr, nxt))
        out[key] = Guarded(Arc(left, right), Arc(pl, pr))
    return out


def ping_pong_verify(rep: Rep, intervals: dict, depth_points: Iterable[PSL2ZElement] | None = None) -> dict:
    """Check gamma_i(S^1 - J_i^-) in J_i^+ and gamma_i^-1(S^1 - J_i^+) in J_i^-,
    disjointness of the four J's, and that the guardians bracket every tested
    orbit point that lies in a J."""
    for key, gd in intervals.items():
        if not gd.J.contains_arc(gd.K, strict=False):
            raise DegenerateInterval(f"J{key} does not contain its guardians in order")
    keys = list(intervals)
    for k1, k2 in itertools.combinations(keys, 2):
        a, b = intervals[k1].J, intervals[k2].J
        if a.contains_closed(b.left) or a.contains_closed(b.right) or b.contains_closed(a.left):
            return {"ok": False, "witness": {"overlap": [list(k1), list(k2)]}}
    for i, gamma in GAMMAS.items():
        g = rep.matrix(gamma)
        for src, dst, f in (("-", "+", g), ("+", "-", g.inverse())):
            outside = intervals[(i, src)].J.complement()
            target = intervals[(i, dst)].J
            if not target.contains_arc(outside.image(f), strict=True):
                name = f"gamma{i}" + ("" if src == "-" else "^-1")
                return {"ok": False, "witness": {"map": name, "source": f"S1 - J{i}{src}", "target": f"J{i}{dst}"}}
    if depth_points is None:
        depth_points = set(FIRST_GENERATION)
        for gamma in list(GAMMAS.values()):
            for h in (gamma, gamma.inverse()):
                depth_points |= {h * g for g in FIRST_GENERATION}
    for g in depth_points:
        p = rep.point(g)
        for key, gd in intervals.items():
            if gd.J.contains_closed(p) and not gd.K.contains_closed(p):
                return {"ok": False, "witness": {"escapes_guardians": str(g), "interval": list(key)}}
    return {"ok": True, "witness": None}


def gamma_words(max_len: int) -> Iterable[tuple[int, ...]]:
    """Reduced words in gamma1^+-1, gamma2^+-1 encoded as +-1, +-2."""
    letters = (1, -1, 2, -2)
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        yield from nxt
        frontier = nxt


def gamma_freeness(rep: Rep, max_len: int = 8) -> dict:
    g = {1: rep.matrix(GAMMA1), 2: rep.matrix(GAMMA2)}
    g[-1], g[-2] = g[1].inverse(), g[2].inverse()
    # products built incrementally along the word tree
    checked = 0
    frontier = [((), IDENTITY)]
    for _ in range(max_len):
        nxt = []
        for w, m in frontier:
            for x in (1, -1, 2, -2):
                if w and w[-1] == -x:
                    continue
                mm = m * g[x]
                checked += 1
                if mm.is_identity():
                    return {"free": False, "witness": list(w + (x,)), "checked": checked}
                nxt.append((w + (x,), mm))
        frontier = nxt
    return {"free": True, "witness": None, "checked": checked}


def reconstruct_by_generations(first_gen: Sequence[PSL2ZElement], depth: int, rep: Rep | None = None) -> list[PSL2ZElement]:
    """Cyclic order (starting at e) of all points up to generation depth + 1,
    derived only from the first-generation order and the guardian rule.

    If ``rep`` is given its ping-pong certificate is checked first.
    """
    if rep is not None and not ping_pong_verify(rep, guardian_intervals(rep))["ok"]:
        raise PingPongFailed("ping-pong precondition unmet")
    first = list(first_gen)
    if set(first) != set(FIRST_GENERATION) or len(first) != len(FIRST_GENERATION):
        raise ValueError("first generation must consist of the ten coset points")
    maps = []
    for i, gamma in GAMMAS.items():
        maps.append((gamma, GUARDIANS[(i, "-")], GUARDIANS[(i, "+")]))
        maps.append((gamma.inverse(), GUARDIANS[(i, "+")], GUARDIANS[(i, "-")]))
    order = list(first)
    for _ in range(depth):
        inserts: dict = {}
        for gamma, src, dst in maps:
            n = len(order)
            i = order.index(src[1])
            # points strictly outside the source arc, counterclockwise after its right end
            outside = []
            for step in range(1, n):
                x = order[(i + step) % n]
                if x == src[0]:
                    break
                outside.append(x)
            inserts[dst[0]] = [gamma * x for x in outside]
        new = []
        # rebuild: first-generation skeleton, each target arc filled by its images
        for x in first:
            new.append(x)
            if x in inserts:
                new.extend(inserts[x])
        if len(set(new)) != len(new):
            raise RuntimeError("an element was generated twice")
        order = new
    return order
