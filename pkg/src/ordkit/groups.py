"""Exact arithmetic and ball enumeration for the concrete groups used here.

Every group is reached through a :class:`Group` handle exposing ``mul``,
``inv``, an ordered generator alphabet and word parsing.  Elements are
immutable and hashable; their equality is normal-form equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Hashable, Iterable, Sequence

# Syllables of the free product Z/2 * Z/3.
ALPHA, BETA, BETA2 = 0, 1, 2
_SYL_INV = {ALPHA: ALPHA, BETA: BETA2, BETA2: BETA}
_SYL_NAME = {ALPHA: "al", BETA: "be", BETA2: "be2"}


class GroupMismatch(ValueError):
    pass


def _join(central: int, left: Sequence[int], right: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    # Reduce the junction of two alternating syllable words; every cancelled
    # a^2 or b^3 contributes one central t.
    stack = list(left)
    i = 0
    while stack and i < len(right):
        x, y = stack[-1], right[i]
        if x == ALPHA and y == ALPHA:
            stack.pop()
            central += 1
            i += 1
            continue
        if x == ALPHA or y == ALPHA:
            break
        s = x + y
        stack.pop()
        i += 1
        if s == 3:
            central += 1
            continue
        if s > 3:
            central += 1
            s -= 3
        stack.append(s)
        break
    return central, tuple(stack) + tuple(right[i:])


def _inverse_tail(tail: Sequence[int]) -> tuple[int, ...]:
    return tuple(_SYL_INV[s] for s in reversed(tail))


@dataclass(frozen=True, order=True)
class PSL2ZElement:
    """Reduced alternating word in alpha, beta, beta^2 (alpha^2 = beta^3 = e)."""

    tail: tuple[int, ...] = ()

    def __mul__(self, other: PSL2ZElement) -> PSL2ZElement:
        if not isinstance(other, PSL2ZElement):
            raise GroupMismatch(f"cannot multiply PSL2ZElement by {type(other).__name__}")
        return PSL2ZElement(_join(0, self.tail, other.tail)[1])

    def inverse(self) -> PSL2ZElement:
        return PSL2ZElement(_inverse_tail(self.tail))

    def is_identity(self) -> bool:
        return not self.tail

    def __str__(self) -> str:
        return ".".join(_SYL_NAME[s] for s in self.tail) or "e"


@dataclass(frozen=True, order=True)
class B3Element:
    """t^central times a reduced alternating word in a, b, b^2.

    ``t = a^2 = b^3`` is central, so this form is unique.
    """

    central: int = 0
    tail: tuple[int, ...] = ()

    def __mul__(self, other: B3Element) -> B3Element:
        if not isinstance(other, B3Element):
            raise GroupMismatch(f"cannot multiply B3Element by {type(other).__name__}")
        n, tail = _join(self.central + other.central, self.tail, other.tail)
        return B3Element(n, tail)

    def inverse(self) -> B3Element:
        return B3Element(-self.central - len(self.tail), _inverse_tail(self.tail))

    def __pow__(self, k: int) -> B3Element:
        base = self if k >= 0 else self.inverse()
        out = B3Element()
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self.central == 0 and not self.tail

    def __str__(self) -> str:
        parts = []
        if self.central:
            parts.append(f"t^{self.central}")
        parts.extend({ALPHA: "a", BETA: "b", BETA2: "bb"}[s] for s in self.tail)
        return "".join(parts) or "e"


B3_T = B3Element(1, ())
B3_A = B3Element(0, (ALPHA,))
B3_B = B3Element(0, (BETA,))
# a = sigma1 sigma2^2, b = sigma1 sigma2, hence sigma2 = b^-1 a, sigma1 = b a^-1 b.
SIGMA2 = B3_B.inverse() * B3_A
SIGMA1 = B3_B * B3_A.inverse() * B3_B
Y1 = SIGMA1 * SIGMA2
Y2 = SIGMA2.inverse()

PSL_ALPHA = PSL2ZElement((ALPHA,))
PSL_BETA = PSL2ZElement((BETA,))
PSL_BETA2 = PSL2ZElement((BETA2,))

_B3_LETTERS = {
    "a": B3_A, "A": B3_A.inverse(),
    "b": B3_B, "B": B3_B.inverse(),
    "t": B3_T, "T": B3_T.inverse(),
}


def b3_normalize(word: str | Iterable[str]) -> B3Element:
    """Normal form of a word over ``a A b B t T`` (uppercase = inverse)."""
    letters = [c for c in word if not c.isspace() and c != "."]
    out = B3Element()
    for c in letters:
        try:
            out = out * _B3_LETTERS[c]
        except KeyError:
            raise ValueError(f"unknown B3 letter {c!r}") from None
    return out


def sigma_to_b3(word: Iterable[int]) -> B3Element:
    """Evaluate an Artin word given as signed generator indices (1, -2, ...)."""
    gens = {1: SIGMA1, -1: SIGMA1.inverse(), 2: SIGMA2, -2: SIGMA2.inverse()}
    out = B3Element()
    for letter in word:
        out = out * gens[letter]
    return out


def b3_to_sigma(g: B3Element) -> list[int]:
    """An Artin word representing ``g`` (not reduced in any sense)."""
    syl = {ALPHA: [1, 2, 2], BETA: [1, 2], BETA2: [1, 2, 1, 2]}
    delta2 = [1, 2, 1, 1, 2, 1]
    word: list[int] = []
    if g.central >= 0:
        word.extend(delta2 * g.central)
    else:
        word.extend([-x for x in reversed(delta2)] * -g.central)
    for s in g.tail:
        word.extend(syl[s])
    return word


def q_map(g: B3Element) -> PSL2ZElement:
    """The quotient B3 -> PSL(2,Z) by the centre: a -> alpha, b -> beta."""
    return PSL2ZElement(g.tail)


def psl_lift(g: PSL2ZElement, central: int = 0) -> B3Element:
    return B3Element(central, g.tail)


def parse_psl(text: str) -> PSL2ZElement:
    """Parse ``al.be.be2`` style words (any of '.', ',', whitespace separate)."""
    names = {"al": PSL_ALPHA, "be": PSL_BETA, "be2": PSL_BETA2, "e": PSL2ZElement()}
    out = PSL2ZElement()
    for tok in re.split(r"[.,\s]+", text.strip()):
        if not tok:
            continue
        if tok not in names:
            raise ValueError(f"unknown PSL(2,Z) token {tok!r}")
        out = out * names[tok]
    return out


# ---------------------------------------------------------------------------
# Subgroups of Q


def _v2(q: Fraction) -> int:
    n, d = q.numerator, q.denominator
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    while d % 2 == 0:
        d //= 2
        v -= 1
    return v


@dataclass(frozen=True)
class RationalGroup:
    """The subgroup of Q generated by ``generators`` with ``inverted`` primes made invertible.

    ``RationalGroup((1,))`` is Z; ``RationalGroup((1,), (2,))`` is Z[1/2].
    """

    generators: tuple[Fraction, ...] = (Fraction(1),)
    inverted: tuple[int, ...] = ()

    def __post_init__(self):
        gens = tuple(Fraction(g) for g in self.generators if Fraction(g) != 0)
        if not gens:
            raise ValueError("a rational group needs a nonzero generator")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "inverted", tuple(sorted(set(self.inverted))))

    @property
    def base(self) -> Fraction:
        # gcd of the generators: the finitely generated part is base * Z
        num = reduce(_gcd, (g.numerator for g in self.generators))
        den = reduce(_lcm, (g.denominator for g in self.generators))
        return Fraction(num, den)

    def contains(self, q: Fraction) -> bool:
        r = Fraction(q) / self.base
        d = r.denominator
        for p in self.inverted:
            while d % p == 0:
                d //= p
        return d == 1

    def sign_character(self) -> Callable[[Fraction], int] | None:
        """The nontrivial homomorphism to {+1, -1}, or None if 2 is inverted."""
        if 2 in self.inverted:
            return None
        v = _v2(self.base)

        def chi(q: Fraction) -> int:
            if q == 0:
                return 1
            r = Fraction(q) / 2**v
            # r is a 2-adic integer; its parity is numerator parity (odd denominator)
            return -1 if r.numerator % 2 else 1

        return chi

    def alphabet(self, levels: int = 0) -> list[Fraction]:
        """Generators of the truncation used for enumeration: base / p^j for j <= levels."""
        out = [self.base]
        for p in self.inverted:
            for j in range(1, levels + 1):
                out.append(self.base / p**j)
        return out


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _lcm(a: int, b: int) -> int:
    return a * b // _gcd(a, b)


# ---------------------------------------------------------------------------
# Group handles


class Group:
    """Uniform handle: multiplication, inversion, alphabet, parsing."""

    name = "group"
    letters: dict[str, Hashable]

    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def alphabet(self) -> list[tuple[str, Hashable]]:
        """Ordered (name, element) pairs used for ball enumeration."""
        return list(self.letters.items())

    def is_identity(self, g) -> bool:
        return g == self.identity()

    def product(self, elements: Iterable) -> Hashable:
        out = self.identity()
        for g in elements:
            out = self.mul(out, g)
        return out

    def conj(self, g, h):
        return self.mul(self.inv(g), h)

    def parse(self, text: str):
        out = self.identity()
        for c in text:
            if c.isspace() or c in ".,":
                continue
            if c not in self.letters:
                raise ValueError(f"unknown letter {c!r} for group {self.name}")
            out = self.mul(out, self.letters[c])
        return out

    def format(self, g) -> str:
        return str(g)

    def to_json(self, g):
        return {"group": self.name, "normal_form": self.normal_form_json(g)}

    def normal_form_json(self, g):
        return list(g) if isinstance(g, tuple) else str(g)

    def from_json(self, obj):
        if obj.get("group") != self.name:
            raise GroupMismatch(f"expected group {self.name}, got {obj.get('group')}")
        return self.normal_form_from_json(obj["normal_form"])

    def normal_form_from_json(self, nf):
        return tuple(nf)


class B3Group(Group):
    """B3 = <a, b, t | a^2 = b^3 = t> with a chosen generating alphabet."""

    name = "b3"

    def __init__(self, alphabet: str = "aAbB"):
        sigma = {"s": SIGMA1, "S": SIGMA1.inverse(), "r": SIGMA2, "R": SIGMA2.inverse()}
        y = {"y": Y1, "Y": Y1.inverse(), "z": Y2, "Z": Y2.inverse()}
        table = {**_B3_LETTERS, **sigma, **y}
        self.letters = {c: table[c] for c in alphabet}
        self._table = table

    def identity(self):
        return B3Element()

    def mul(self, g, h):
        return g * h

    def inv(self, g):
        return g.inverse()

    def parse(self, text: str):
        out = B3Element()
        for c in text:
            if c.isspace() or c in ".,":
                continue
            if c not in self._table:
                raise ValueError(f"unknown B3 letter {c!r}")
            out = out * self._table[c]
        return out

    def format(self, g) -> str:
        return b3_word(g)

    def normal_form_json(self, g):
        return {"central": g.central, "tail": [_SYL_NAME[s] for s in g.tail]}

    def normal_form_from_json(self, nf):
        inv = {v: k for k, v in _SYL_NAME.items()}
        return B3Element(nf["central"], tuple(inv[s] for s in nf["tail"]))


def b3_word(g: B3Element) -> str:
    """Word over ``a A b B t T`` for ``g``: t-power first, then the tail."""
    t = ("t" if g.central > 0 else "T") * abs(g.central)
    return (t + "".join({ALPHA: "a", BETA: "b", BETA2: "bb"}[s] for s in g.tail)) or "e"


class PSL2ZGroup(Group):
    name = "psl2z"

    def __init__(self):
        self.letters = {"al": PSL_ALPHA, "be": PSL_BETA, "be2": PSL_BETA2}

    def identity(self):
        return PSL2ZElement()

    def mul(self, g, h):
        return g * h

    def inv(self, g):
        return g.inverse()

    def parse(self, text: str):
        return parse_psl(text)

    def normal_form_json(self, g):
        return [_SYL_NAME[s] for s in g.tail]

    def normal_form_from_json(self, nf):
        inv = {v: k for k, v in _SYL_NAME.items()}
        return PSL2ZElement(tuple(inv[s] for s in nf))


class FreeAbelian(Group):
    """Z^n with integer tuples; rank 1 letters are ``g G``, higher rank ``x X y Y z Z ...``."""

    def __init__(self, rank: int = 1):
        self.rank = rank
        self.name = "z" if rank == 1 else f"z{rank}"
        names = ["g"] if rank == 1 else list("xyzuvw"[:rank])
        self.letters = {}
        for i, c in enumerate(names):
            unit = tuple(1 if j == i else 0 for j in range(rank))
            self.letters[c] = unit
            self.letters[c.upper()] = tuple(-x for x in unit)

    def identity(self):
        return (0,) * self.rank

    def mul(self, g, h):
        return tuple(x + y for x, y in zip(g, h))

    def inv(self, g):
        return tuple(-x for x in g)


class RationalHandle(Group):
    """A subgroup of Q as a group; enumeration uses ``levels`` inverted-prime generators."""

    def __init__(self, group: RationalGroup = RationalGroup(), levels: int = 4, name: str = "rational"):
        self.group = group
        self.name = name
        self.letters = {}
        for j, q in enumerate(group.alphabet(levels)):
            self.letters[f"q{j}"] = q
            self.letters[f"Q{j}"] = -q

    def identity(self):
        return Fraction(0)

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def parse(self, text: str):
        out = Fraction(0)
        for tok in re.split(r"[\s,+]+", text.strip()):
            if tok:
                out += Fraction(tok)
        if not self.group.contains(out):
            raise ValueError(f"{out} is not in the group")
        return out

    def format(self, g) -> str:
        return str(g)

    def normal_form_json(self, g):
        return [g.numerator, g.denominator]

    def normal_form_from_json(self, nf):
        return Fraction(nf[0], nf[1])


class DirectSumZ(Group):
    """Finite-support integer sequences (a_1, a_2, ...), truncated to e_1..e_K for enumeration.

    Elements are tuples with trailing zeros stripped; index i of the tuple is a_{i+1}.
    """

    name = "dsum"

    def __init__(self, K: int = 4):
        self.K = K
        self.letters = {}
        for i in range(1, K + 1):
            unit = (0,) * (i - 1) + (1,)
            self.letters[f"e{i}"] = unit
            self.letters[f"E{i}"] = (0,) * (i - 1) + (-1,)

    @staticmethod
    def _strip(v) -> tuple[int, ...]:
        v = list(v)
        while v and v[-1] == 0:
            v.pop()
        return tuple(v)

    def identity(self):
        return ()

    def mul(self, g, h):
        n = max(len(g), len(h))
        return self._strip((g[i] if i < len(g) else 0) + (h[i] if i < len(h) else 0) for i in range(n))

    def inv(self, g):
        return tuple(-x for x in g)

    def unit(self, i: int) -> tuple[int, ...]:
        return (0,) * (i - 1) + (1,)

    def in_G(self, m: int) -> Callable[[tuple], bool]:
        """Membership in G_m = {a_n = 0 for n > m}."""
        return lambda g: len(g) <= m

    def parse(self, text: str):
        out: tuple[int, ...] = ()
        for tok in re.split(r"[\s.,]+", text.strip()):
            if not tok:
                continue
            m = re.fullmatch(r"([eE])(\d+)", tok)
            if not m:
                raise ValueError(f"unknown direct-sum token {tok!r}")
            u = self.unit(int(m.group(2)))
            out = self.mul(out, u if m.group(1) == "e" else self.inv(u))
        return out


# ---------------------------------------------------------------------------
# Tararin groups: split iterated extensions A_0 x| (A_1 x| (... A_n)) with sign actions


@dataclass(frozen=True)
class TararinSpec:
    """Levels A_0..A_n of a rational series and the sign by which level i acts on level i+1.

    ``actions[i] == -1`` means elements of A_i with nontrivial sign character
    conjugate level i+1 to its inverse; deeper levels are fixed.
    """

    levels: tuple[RationalGroup, ...]
    actions: tuple[int, ...]

    def __post_init__(self):
        if len(self.actions) != len(self.levels) - 1:
            raise ValueError("need exactly one action sign between consecutive levels")
        for i, eps in enumerate(self.actions):
            if eps not in (1, -1):
                raise ValueError(f"action signs must be +1 or -1, got {eps}")
            if eps == -1 and self.levels[i].sign_character() is None:
                raise ValueError(f"level {i} admits no sign character (2 is inverted)")

    @property
    def n(self) -> int:
        return len(self.levels) - 1

    def validate_tararin(self) -> None:
        """Each G_i/G_{i+2} must be non-bi-orderable: every adjacent action nontrivial."""
        for i, eps in enumerate(self.actions):
            if eps != -1:
                raise ValueError(f"G_{i}/G_{i+2} is bi-orderable: action of level {i} is trivial")

    @classmethod
    def klein(cls) -> TararinSpec:
        return cls((RationalGroup(), RationalGroup()), (-1,))

    @classmethod
    def chain(cls, n: int) -> TararinSpec:
        """Z |> Z |> ... with n+1 levels and all adjacent actions -1."""
        return cls(tuple(RationalGroup() for _ in range(n + 1)), (-1,) * n)


class TararinGroup(Group):
    """Elements are tuples (q_0, ..., q_n) standing for x_0^{q_0} x_1^{q_1} ... x_n^{q_n}."""

    def __init__(self, spec: TararinSpec, name: str = "tararin"):
        self.spec = spec
        self.name = name
        self._chi = [lvl.sign_character() for lvl in spec.levels]
        n1 = spec.n + 1
        names = "xyz"[:n1] if n1 <= 3 else ("wxyz" if n1 == 4 else None)
        self.letters = {}
        for i, lvl in enumerate(spec.levels):
            c = names[i] if names else f"x{i}"
            unit = tuple(lvl.base if j == i else Fraction(0) for j in range(n1))
            self.letters[c] = unit
            self.letters[c.upper() if names else f"X{i}"] = tuple(-x for x in unit)

    def level_generator(self, i: int):
        return tuple(self.spec.levels[i].base if j == i else Fraction(0) for j in range(self.spec.n + 1))

    def _act(self, i: int, r: Fraction) -> int:
        # sign by which x_i^r conjugates level i+1
        if i >= self.spec.n or self.spec.actions[i] == 1 or r == 0:
            return 1
        return self._chi[i](r)

    def identity(self):
        return (Fraction(0),) * (self.spec.n + 1)

    def mul(self, g, h):
        # (q, k)(q', k') = (q + q', phi_{q'}(k) k'); phi_{q'} flips level i+1 by a sign
        k = list(g)
        out = []
        for i, q in enumerate(h):
            out.append(k[i] + q)
            if self._act(i, q) == -1:
                k[i + 1] = -k[i + 1]
        return tuple(out)

    def inv(self, g):
        # (q, k)^-1 = (-q, phi_q(k)^-1)
        k = list(g)
        out = []
        for i in range(len(k)):
            out.append(-k[i])
            if self._act(i, k[i]) == -1:
                k[i + 1] = -k[i + 1]
        return tuple(out)

    def in_level(self, i: int) -> Callable[[tuple], bool]:
        """Membership in G_i = {q_0 = ... = q_{i-1} = 0}."""
        return lambda g: all(x == 0 for x in g[:i])

    def format(self, g) -> str:
        return "(" + ",".join(str(x) for x in g) + ")"

    def normal_form_json(self, g):
        return [str(x) for x in g]

    def normal_form_from_json(self, nf):
        return tuple(Fraction(x) for x in nf)


# ---------------------------------------------------------------------------
# Enumeration


def ball_enumerate(G: Group, r: int, order: Sequence[str] | None = None, limit: int | None = None) -> list:
    """Elements of word length <= r, breadth first, shortlex over the alphabet order.

    ``order`` permutes the alphabet (letter names); ``limit`` stops after that
    many elements.  The identity is always first and ball(r) is a prefix of
    ball(r + 1).
    """
    letters = G.alphabet()
    if order is not None:
        lookup = dict(letters)
        letters = [(c, lookup[c]) for c in order]
    e = G.identity()
    seen = {e}
    out = [e]
    frontier = [e]
    for _ in range(r):
        nxt = []
        for g in frontier:
            for _, s in letters:
                h = G.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    out.append(h)
                    if limit is not None and len(out) >= limit:
                        return out
        frontier = nxt
        if not frontier:
            break
    return out


def enumerate_until(G: Group, count: int, order: Sequence[str] | None = None, max_radius: int = 64) -> list:
    """The first ``count`` elements of the shortlex breadth-first enumeration."""
    return ball_enumerate(G, max_radius, order=order, limit=count)


def cyclic_member(G: Group, s, bound: Callable[[object], int]) -> Callable[[object], bool]:
    """Membership test for the cyclic subgroup <s>; ``bound(g)`` caps |k| in g = s^k."""
    cache = {G.identity(): 0}
    pos, neg = G.identity(), G.identity()
    si = G.inv(s)
    state = {"k": 0}

    def member(g) -> bool:
        nonlocal pos, neg
        if g in cache:
            return True
        b = bound(g)
        while state["k"] < b:
            state["k"] += 1
            pos = G.mul(pos, s)
            neg = G.mul(neg, si)
            cache[pos] = state["k"]
            cache[neg] = -state["k"]
            if g in cache:
                return True
        return False

    return member


def b3_cyclic_member(s: B3Element) -> Callable[[B3Element], bool]:
    """Membership in <s> for a B3 element whose powers have growing tails (sigma1, sigma2)."""
    return cyclic_member(B3Group(), s, lambda g: len(g.tail) + abs(g.central) + 1)


GROUPS: dict[str, Callable[[], Group]] = {
    "b3": B3Group,
    "psl2z": PSL2ZGroup,
    "z": lambda: FreeAbelian(1),
    "z2": lambda: FreeAbelian(2),
    "klein": lambda: TararinGroup(TararinSpec.klein(), name="klein"),
    "tararin2": lambda: TararinGroup(TararinSpec.chain(2), name="tararin2"),
    "dsum": DirectSumZ,
    "dyadic": lambda: RationalHandle(RationalGroup((Fraction(1),), (2,)), levels=6, name="dyadic"),
}


def get_group(name: str) -> Group:
    try:
        return GROUPS[name]()
    except KeyError:
        raise ValueError(f"unknown group {name!r}; choose from {sorted(GROUPS)}") from None
