"""Left orders as sign oracles, concrete orders, and finite-ball cone search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Hashable, Iterable, Sequence

from .groups import (
    B3Element,
    B3Group,
    DirectSumZ,
    FreeAbelian,
    Group,
    RationalGroup,
    RationalHandle,
    TararinGroup,
    b3_to_sigma,
    ball_enumerate,
)


class OracleError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SignOracle:
    """A map G \\ {e} -> {+1, -1}; f < g iff sign(f^-1 g) = +1.

    ``position`` optionally maps elements into a totally ordered set
    compatibly with the order; it is only used to sort quickly.
    """

    group: Group
    fn: Callable[[Hashable], int]
    label: str
    position: Callable[[Hashable], object] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def sign(self, g) -> int:
        if self.group.is_identity(g):
            raise OracleError(f"{self.label}: sign of the identity is undefined")
        s = self._cache.get(g)
        if s is None:
            s = self.fn(g)
            self._cache[g] = s
        return s

    def __call__(self, g) -> int:
        return self.sign(g)

    def compare(self, f, g) -> int:
        """-1, 0, +1 as f <, =, > g."""
        if f == g:
            return 0
        return -self.sign(self.group.mul(self.group.inv(f), g))

    def less(self, f, g) -> bool:
        return self.compare(f, g) < 0

    def sorted(self, elements: Iterable) -> list:
        elements = list(elements)
        if self.position is not None:
            return sorted(elements, key=self.position)
        return sorted(elements, key=cmp_to_key(self.compare))

    def reciprocal(self) -> SignOracle:
        return SignOracle(self.group, lambda g: -self.sign(g), f"reciprocal({self.label})")


def check_order_axioms(lam: SignOracle, r: int | None = None, elements: Sequence | None = None) -> dict:
    """Check antisymmetry and closure of the positive cone on ball(r).

    Products are evaluated even if they leave the ball: the oracle is total.
    """
    G = lam.group
    if elements is None:
        elements = ball_enumerate(G, r)
    elements = [g for g in elements if not G.is_identity(g)]
    violations = []
    for g in elements:
        if lam.sign(G.inv(g)) != -lam.sign(g):
            violations.append({"kind": "inverse", "g": G.format(g)})
    positive = [g for g in elements if lam.sign(g) == 1]
    for f in positive:
        for g in positive:
            fg = G.mul(f, g)
            if G.is_identity(fg) or lam.sign(fg) != 1:
                violations.append({"kind": "closure", "f": G.format(f), "g": G.format(g)})
    return {"label": lam.label, "checked": len(elements), "violations": violations}


# ---------------------------------------------------------------------------
# Handle reduction in B3 (Artin words as signed indices 1, -1, 2, -2)


def free_reduce(word: Sequence[int]) -> list[int]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def handle_reduce(word: Sequence[int], cap: int = 10**6) -> tuple[list[int], str]:
    """Remove every sigma1-handle; return the reduced word and its type.

    A sigma1-handle is s1^e s2^k s1^-e; it is replaced by s2^-e s1^k s2^e.
    The type is 'positive', 'negative' or 'free' according to the sign of
    the remaining sigma1 letters.
    """
    w = free_reduce(word)
    steps = 0
    while True:
        last = -1
        found = None
        for j, x in enumerate(w):
            if abs(x) != 1:
                continue
            if last >= 0 and w[last] == -x:
                found = (last, j)
                break
            last = j
        if found is None:
            break
        steps += 1
        if steps > cap:
            raise RuntimeError("handle reduction exceeded its iteration cap")
        i, j = found
        e = 1 if w[i] == 1 else -1
        k = sum(1 if x == 2 else -1 for x in w[i + 1:j])
        s1 = [1 if k > 0 else -1] * abs(k)
        middle = [-2 * e] + s1 + [2 * e] if k else []
        # free reduction only needs to look at the seams
        w = free_reduce(w[:i] + middle + w[j + 1:])
    ones = {x for x in w if abs(x) == 1}
    if not ones:
        kind = "free"
    elif ones == {1}:
        kind = "positive"
    else:
        kind = "negative"
    return w, kind


def dd_sign(g: B3Element) -> int:
    """Dubrovina-Dubrovin order on B3: positive cone generated by s1 s2 and s2^-1.

    Positive iff the handle-reduced word is sigma1-positive, or sigma1-free
    with negative sigma2 exponent sum.
    """
    if g.is_identity():
        raise OracleError("dd_sign of the identity")
    w, kind = handle_reduce(b3_to_sigma(g))
    if kind == "positive":
        return 1
    if kind == "negative":
        return -1
    exp = sum(1 if x == 2 else -1 for x in w)
    return 1 if exp < 0 else -1


def dd_order(group: B3Group | None = None) -> SignOracle:
    return SignOracle(group or B3Group(), dd_sign, "DD-lambda3")


# ---------------------------------------------------------------------------
# Lexicographic construction


def coset_order_from(lam: SignOracle, member: Callable) -> Callable:
    """The induced order on G/H for a convex H: gH > H iff g > e and g not in H."""

    def mu(g) -> int:
        if member(g):
            raise OracleError("coset comparator called on an element of H")
        return lam.sign(g)

    return mu


def lex_extend(
    lam0: SignOracle,
    mu: Callable,
    member: Callable,
    group: Group | None = None,
    check_radius: int | None = 2,
    label: str = "lex",
) -> SignOracle:
    """The order with H convex, restricting to ``lam0`` on H and to ``mu`` off H.

    ``mu(g)`` is the sign of gH against H.  Its invariance is spot-checked on
    ball(check_radius): constant on cosets gH, antisymmetric, and closed.
    """
    G = group or lam0.group
    if check_radius is not None:
        ball = ball_enumerate(G, check_radius)
        outside = [g for g in ball if not member(g)]
        inside = [h for h in ball if member(h)]
        for g in outside:
            if mu(G.inv(g)) != -mu(g):
                raise OracleError(f"coset order not antisymmetric at {G.format(g)}")
            for h in inside:
                if mu(G.mul(g, h)) != mu(g):
                    raise OracleError(f"coset order not constant on {G.format(g)}H")
            for g2 in outside:
                gg = G.mul(g, g2)
                if not member(gg) and mu(g) == mu(g2) and mu(gg) != mu(g):
                    raise OracleError("coset order not invariant")

    def sign(g) -> int:
        return lam0.sign(g) if member(g) else mu(g)

    return SignOracle(G, sign, label)


# ---------------------------------------------------------------------------
# Orders on abelian and Tararin groups


def z_natural(reciprocal: bool = False) -> SignOracle:
    s = -1 if reciprocal else 1
    return SignOracle(FreeAbelian(1), lambda g: s * (1 if g[0] > 0 else -1), "natural" if s == 1 else "reciprocal",
                      position=lambda g: s * g[0])


def z2_lex(primary: int = 1) -> SignOracle:
    """Lexicographic order on Z^2 with coordinate ``primary`` dominating."""
    other = 1 - primary

    def sign(g):
        x = g[primary] if g[primary] != 0 else g[other]
        return 1 if x > 0 else -1

    return SignOracle(FreeAbelian(2), sign, f"lex{primary}")


def _sign_a_plus_b_sqrt(a: int, b: int, d: int) -> int:
    # sign of a + b*sqrt(d), d not a square
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1
    if a > 0:
        return 1 if a * a > d * b * b else -1
    return 1 if d * b * b > a * a else -1


def z2_irrational(slope_num: int = 1, slope_den: int = 1, d: int = 2) -> SignOracle:
    """Order of Z^2 from the embedding (x, y) -> x + theta*y, theta = (num/den)*sqrt(d)."""

    def sign(g):
        x, y = g
        return _sign_a_plus_b_sqrt(x * slope_den, y * slope_num, d)

    return SignOracle(FreeAbelian(2), sign, f"slope({slope_num}/{slope_den})sqrt{d}")


def rational_order(A: RationalGroup | RationalHandle, reciprocal: bool = False) -> SignOracle:
    """Natural order of A inside Q, or its reciprocal."""
    handle = A if isinstance(A, RationalHandle) else RationalHandle(A)
    s = -1 if reciprocal else 1

    def sign(q: Fraction) -> int:
        return s if q > 0 else -s

    return SignOracle(handle, sign, "rational" if s == 1 else "rational-reciprocal", position=lambda q: s * q)


def dsum_order(G: DirectSumZ | None = None) -> SignOracle:
    """0 < (a_n) iff a_N > 0 for the largest N with a_N != 0."""

    def sign(g):
        return 1 if g[-1] > 0 else -1

    return SignOracle(G or DirectSumZ(), sign, "dsum-top")


def tararin_orders(G: TararinGroup) -> dict[tuple[int, ...], SignOracle]:
    """All 2^(n+1) orders lambda_eps, keyed by eps; x_i^eps(i) is positive."""
    G.spec.validate_tararin()
    out = {}
    for eps in itertools.product((1, -1), repeat=G.spec.n + 1):
        out[eps] = SignOracle(G, _tararin_sign(eps), "tararin" + "".join("+" if e > 0 else "-" for e in eps))
    return out


def _tararin_sign(eps: tuple[int, ...]) -> Callable:
    def sign(g) -> int:
        for i, q in enumerate(g):
            if q != 0:
                return eps[i] * (1 if q > 0 else -1)
        raise OracleError("identity")

    return sign


# ---------------------------------------------------------------------------
# Partial cones on a ball


@dataclass
class PartialCone:
    radius: int
    assignment: dict  # element -> +1 / -1 on ball \ {e}

    def project(self, elements: Sequence) -> tuple[int, ...]:
        return tuple(self.assignment[g] for g in elements)

    def agrees_with(self, lam: SignOracle) -> bool:
        return all(lam.sign(g) == s for g, s in self.assignment.items())


class _ConeProblem:
    """Sign assignments on ball \\ {e}: antisymmetric and closed under in-ball products."""

    def __init__(self, G: Group, ball: Sequence):
        self.G = G
        self.elements = [g for g in ball if not G.is_identity(g)]
        index = {g: i for i, g in enumerate(self.elements)}
        # one variable per {g, g^-1}; literal of g is (var, polarity)
        self.var_of: dict = {}
        self.reps: list = []
        for g in self.elements:
            if g in self.var_of:
                continue
            gi = G.inv(g)
            v = len(self.reps)
            self.reps.append(g)
            self.var_of[g] = (v, 1)
            if gi in index:
                self.var_of[gi] = (v, -1)
        clauses = set()
        for u in self.elements:
            for w_ in self.elements:
                p = G.mul(u, w_)
                if p not in index:
                    continue
                (a, pa), (b, pb), (c, pc) = self.var_of[u], self.var_of[w_], self.var_of[p]
                for s in (1, -1):
                    # forbid sign(u) = sign(w_) = s, sign(p) = -s
                    clause = frozenset({(a, -s * pa), (b, -s * pb), (c, s * pc)})
                    clauses.add(clause)
        self.clauses = [tuple(c) for c in sorted(clauses, key=sorted)]
        self.watch: list[list[int]] = [[] for _ in self.reps]
        for ci, cl in enumerate(self.clauses):
            for v in {lit[0] for lit in cl}:
                self.watch[v].append(ci)

    def solve(self, fixed: dict, limit: int | None, node_budget: int):
        n = len(self.reps)
        val = [0] * n
        trail: list[int] = []
        solutions = []
        nodes = 0

        def assign(v, x) -> bool:
            queue = [(v, x)]
            while queue:
                v, x = queue.pop()
                if val[v]:
                    if val[v] != x:
                        return False
                    continue
                val[v] = x
                trail.append(v)
                for ci in self.watch[v]:
                    unassigned = None
                    sat = False
                    count_free = 0
                    for (u, want) in self.clauses[ci]:
                        cur = val[u]
                        if cur == want:
                            sat = True
                            break
                        if cur == 0:
                            count_free += 1
                            unassigned = (u, want)
                    if sat:
                        continue
                    if count_free == 0:
                        return False
                    if count_free == 1:
                        queue.append(unassigned)
            return True

        def undo(mark):
            while len(trail) > mark:
                val[trail.pop()] = 0

        for g, s in fixed.items():
            v, p = self.var_of[g]
            if not assign(v, s * p):
                return []

        def rec(start):
            nonlocal nodes
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded(f"cone search exceeded {node_budget} nodes")
            v = start
            while v < n and val[v]:
                v += 1
            if v == n:
                solutions.append(list(val))
                return limit is not None and len(solutions) >= limit
            for x in (1, -1):
                mark = len(trail)
                if assign(v, x) and rec(v + 1):
                    return True
                undo(mark)
            return False

        rec(0)
        return solutions


def enumerate_partial_cones(
    G: Group,
    r: int,
    required_positive: Iterable = (),
    limit: int | None = None,
    max_ball: int = 2000,
    node_budget: int = 5_000_000,
    order: Sequence[str] | None = None,
) -> list[PartialCone]:
    """Every antisymmetric, in-ball-closed sign assignment on ball(r) \\ {e}
    with ``required_positive`` positive, in deterministic order."""
    ball = ball_enumerate(G, r, order=order)
    if len(ball) > max_ball:
        raise BudgetExceeded(f"ball of radius {r} has {len(ball)} elements (> {max_ball})")
    problem = _ConeProblem(G, ball)
    fixed = {}
    for g in required_positive:
        if g not in problem.var_of:
            raise ValueError(f"required element {G.format(g)} is not in ball({r})")
        fixed[g] = 1
    sols = problem.solve(fixed, limit, node_budget)
    cones = []
    for val in sols:
        assignment = {}
        for g in problem.elements:
            v, p = problem.var_of[g]
            assignment[g] = val[v] * p
        cones.append(PartialCone(r, assignment))
    return cones


def isolation_evidence(lam: SignOracle, S: Iterable, r: int, **kw) -> dict:
    """Survivors of the cone search with S forced positive, compared with lam."""
    S = list(S)
    for s in S:
        if lam.sign(s) != 1:
            raise OracleError(f"{lam.group.format(s)} is not positive for {lam.label}")
    cones = enumerate_partial_cones(lam.group, r, S, **kw)
    agree = [c.agrees_with(lam) for c in cones]
    return {
        "radius": r,
        "survivor_count": len(cones),
        "all_agree_with_lambda": all(agree),
        "lambda_among_survivors": any(agree),
    }
