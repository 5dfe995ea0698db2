from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordkit.groups import (
    B3_A,
    B3_B,
    B3_T,
    B3Group,
    FreeAbelian,
    RationalGroup,
    RationalHandle,
    SIGMA1,
    SIGMA2,
    TararinGroup,
    TararinSpec,
    Y1,
    Y2,
    b3_cyclic_member,
    b3_normalize,
    ball_enumerate,
    sigma_to_b3,
)
from ordkit.orders import (
    BudgetExceeded,
    OracleError,
    SignOracle,
    check_order_axioms,
    coset_order_from,
    dd_order,
    dd_sign,
    enumerate_partial_cones,
    handle_reduce,
    isolation_evidence,
    lex_extend,
    rational_order,
    tararin_orders,
    z2_irrational,
    z2_lex,
    z_natural,
)
from ordkit.realization import convexity_check


def test_axioms_natural_z():
    assert check_order_axioms(z_natural(), 5)["violations"] == []


def test_axioms_detect_constant_assignment():
    bad = SignOracle(FreeAbelian(1), lambda g: 1, "const")
    kinds = {v["kind"] for v in check_order_axioms(bad, 3)["violations"]}
    assert "inverse" in kinds


def test_axioms_dd_radius_6():
    assert check_order_axioms(dd_order(), 6)["violations"] == []


def test_handle_reduce_examples():
    assert handle_reduce([1, -1]) == ([], "free")
    assert handle_reduce([-2, 1, 2]) == ([-2, 1, 2], "positive")
    w, kind = handle_reduce([1, 2, -1])
    assert w == [-2, 1, 2] and kind == "positive"
    assert sigma_to_b3(w) == sigma_to_b3([1, 2, -1])


sigma_words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=14)


def _has_handle(w):
    last = None
    for x in w:
        if abs(x) == 1:
            if last is not None and last == -x:
                return True
            last = x
    return False


@given(sigma_words)
def test_handle_reduction_preserves_element_and_removes_handles(w):
    out, kind = handle_reduce(w)
    assert sigma_to_b3(out) == sigma_to_b3(w)
    assert not _has_handle(out)
    ones = {x for x in out if abs(x) == 1}
    assert kind == {frozenset(): "free", frozenset({1}): "positive", frozenset({-1}): "negative"}[frozenset(ones)]


def test_handle_reduction_cap():
    with pytest.raises(RuntimeError):
        handle_reduce([1, 2, -1] * 3, cap=0)


def test_dd_examples():
    assert dd_sign(Y1) == 1
    assert dd_sign(Y2) == 1
    assert dd_sign(B3_A) == 1
    lam = dd_order()
    assert lam.less(B3_A, B3_B)
    assert dd_sign(SIGMA2) == -1
    with pytest.raises(OracleError):
        dd_sign(b3_normalize(""))


positive_words = st.lists(st.sampled_from([Y1, Y2]), min_size=1, max_size=12)


@given(positive_words)
def test_dd_positive_on_the_generated_semigroup(ws):
    g = B3Group().product(ws)
    assert dd_sign(g) == 1
    assert dd_sign(g.inverse()) == -1


b3_words = st.text(alphabet="aAbB", min_size=1, max_size=8)


@settings(max_examples=60)
@given(b3_words, b3_words, b3_words)
def test_dd_left_invariance(u, v, w):
    lam = dd_order()
    f, g, h = (b3_normalize(x) for x in (u, v, w))
    if f == g:
        return
    assert lam.compare(f, g) == lam.compare(h * f, h * g)


def test_lex_extend_z2():
    G = FreeAbelian(2)
    H = lambda g: g[1] == 0  # noqa: E731
    lam0 = SignOracle(G, lambda g: 1 if g[0] > 0 else -1, "H-natural")
    mu = lambda g: 1 if g[1] > 0 else -1  # noqa: E731
    lam = lex_extend(lam0, mu, H, check_radius=3)
    assert lam.sign((0, 1)) == 1
    assert lam.sign((-5, 1)) == 1
    assert lam.sign((3, 0)) == 1
    assert check_order_axioms(lam, 4)["violations"] == []


def test_lex_extend_detects_non_invariant_comparator():
    G = FreeAbelian(2)
    H = lambda g: g[1] == 0  # noqa: E731
    lam0 = SignOracle(G, lambda g: 1 if g[0] > 0 else -1, "H-natural")
    bad = lambda g: 1 if g[0] + g[1] > 0 or (g[0] + g[1] == 0 and g[1] > 0) else -1  # noqa: E731
    with pytest.raises(OracleError):
        lex_extend(lam0, bad, H, check_radius=2)


def test_lex_round_trip_on_dd():
    G = B3Group()
    dd = dd_order(G)
    member = b3_cyclic_member(SIGMA2)
    mu = coset_order_from(dd, member)
    lam = lex_extend(dd, mu, member, check_radius=2)
    for g in ball_enumerate(G, 6)[1:]:
        assert lam.sign(g) == dd.sign(g)


def test_tararin_counts_and_distinctness():
    Z0 = TararinGroup(TararinSpec((RationalGroup(),), ()))
    assert len(tararin_orders(Z0)) == 2
    for spec, n in ((TararinSpec.klein(), 4), (TararinSpec.chain(2), 8)):
        G = TararinGroup(spec)
        orders = tararin_orders(G)
        assert len(orders) == n
        gens = [G.level_generator(i) for i in range(spec.n + 1)]
        patterns = {tuple(lam.sign(s) for s in gens) for lam in orders.values()}
        assert len(patterns) == n
        for eps, lam in orders.items():
            assert tuple(lam.sign(s) for s in gens) == eps


def test_tararin_orders_pass_axioms_and_chain_is_convex():
    for spec in (TararinSpec.klein(), TararinSpec.chain(2)):
        G = TararinGroup(spec)
        r = 5 if spec.n == 1 else 4
        for lam in tararin_orders(G).values():
            assert check_order_axioms(lam, r)["violations"] == []
            for i in range(1, spec.n + 1):
                assert convexity_check(lam, G.in_level(i), r)["violations"] == []


def test_tararin_rejects_bi_orderable_spec():
    spec = TararinSpec((RationalGroup(), RationalGroup()), (1,))
    with pytest.raises(ValueError):
        tararin_orders(TararinGroup(spec))


def test_rational_order_examples():
    A = RationalHandle(RationalGroup((Fraction(1),), (2,)))
    lam = rational_order(A)
    assert lam.sign(Fraction(3, 4)) == 1
    assert rational_order(A, reciprocal=True).sign(Fraction(3, 4)) == -1
    assert lam.sign(Fraction(1, 2) + Fraction(1, 4)) == 1


def test_z2_irrational_order_is_exact():
    lam = z2_irrational()
    # 1.41421356... sits strictly between 1.414 and 1.415
    assert lam.sign((-1414, 1000)) == 1
    assert lam.sign((-1415, 1000)) == -1
    assert check_order_axioms(lam, 4)["violations"] == []


# --- brute-force oracle for partial cones on tiny balls


def brute_force_cones(G, r, required=()):
    ball = [g for g in ball_enumerate(G, r) if not G.is_identity(g)]
    reps = []
    for g in ball:
        if G.inv(g) not in reps:
            reps.append(g)
    index = set(ball)
    out = set()
    for signs in itertools.product((1, -1), repeat=len(reps)):
        a = {}
        for g, s in zip(reps, signs):
            a[g] = s
            a[G.inv(g)] = -s
        if any(a[g] != 1 for g in required):
            continue
        ok = all(
            not (a[u] == a[v] and G.mul(u, v) in index and not G.is_identity(G.mul(u, v)) and a[G.mul(u, v)] != a[u])
            for u in ball for v in ball
        )
        if ok:
            out.add(tuple(sorted((repr(g), s) for g, s in a.items())))
    return out


@pytest.mark.parametrize("G,r", [(FreeAbelian(1), 3), (FreeAbelian(2), 2), (TararinGroup(TararinSpec.klein()), 2), (B3Group(), 2)])
def test_cone_search_matches_brute_force(G, r):
    cones = enumerate_partial_cones(G, r)
    got = {tuple(sorted((repr(g), s) for g, s in c.assignment.items())) for c in cones}
    assert got == brute_force_cones(G, r)


def test_cone_examples():
    assert len(enumerate_partial_cones(FreeAbelian(1), 3)) == 2
    K = TararinGroup(TararinSpec.klein())
    x, y = K.level_generator(0), K.level_generator(1)
    patterns = {c.project([x, y]) for c in enumerate_partial_cones(K, 2)}
    assert patterns == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    lam = dd_order()
    assert any(c.agrees_with(lam) for c in enumerate_partial_cones(B3Group(), 4, [Y1, Y2]))


def test_cones_contain_genuine_orders():
    K = TararinGroup(TararinSpec.klein())
    cones = enumerate_partial_cones(K, 3)
    for lam in tararin_orders(K).values():
        assert any(c.agrees_with(lam) for c in cones)
    cones = enumerate_partial_cones(FreeAbelian(2), 3)
    for lam in (z2_lex(0), z2_lex(1), z2_irrational()):
        assert any(c.agrees_with(lam) for c in cones)


def test_cone_search_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_partial_cones(B3Group(), 4, max_ball=10)
    with pytest.raises(ValueError):
        enumerate_partial_cones(B3Group(), 1, [Y2])


def test_isolation_examples():
    Z = FreeAbelian(1)
    for r in (1, 3, 6):
        assert isolation_evidence(z_natural(), [(1,)], r)["survivor_count"] == 1
    ev = isolation_evidence(z2_lex(0), [(1, 0)], 5)
    assert ev["survivor_count"] >= 2 and ev["lambda_among_survivors"]
    assert not ev["all_agree_with_lambda"]
    G = B3Group("yYzZ")
    lam = dd_order(G)
    for r in range(1, 5):
        assert isolation_evidence(lam, [Y1, Y2], r)["lambda_among_survivors"]
    with pytest.raises(OracleError):
        isolation_evidence(lam, [SIGMA2], 2)


def test_survivor_counts_non_increasing_in_radius():
    K = TararinGroup(TararinSpec.klein())
    lam = tararin_orders(K)[(1, 1)]
    x, y = K.level_generator(0), K.level_generator(1)
    counts = [isolation_evidence(lam, [x, y], r)["survivor_count"] for r in (1, 2, 3, 4)]
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == 1


def test_t_is_positive_and_cofinal_for_dd():
    lam = dd_order()
    assert lam.sign(B3_T) == 1
    for g in ball_enumerate(B3Group(), 4):
        assert lam.less(g, B3_T ** 3)
