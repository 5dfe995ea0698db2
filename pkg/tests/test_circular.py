from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordkit import circular as circ
from ordkit.circular import (
    AL,
    BE,
    BE2,
    E,
    FIRST_GENERATION,
    INF,
    Arc,
    LineMap,
    Moebius,
    build_rep,
    circular_sign,
    cocycle_check,
    co_sign,
    orbit_config,
    rep_cocycle,
)
from ordkit.groups import B3_A, B3_B, B3_T, B3Group, PSL2ZGroup, ball_enumerate, b3_normalize
from ordkit.orders import dd_order

points = st.one_of(st.just(INF), st.fractions(min_value=-50, max_value=50, max_denominator=20))


def _angle(p) -> float:
    # counterclockwise angle from 0, in [0, 2pi)
    return math.pi if p is INF else (2 * math.atan(float(p))) % (2 * math.pi)


def test_circular_sign_examples():
    assert circular_sign(Fraction(0), Fraction(1), INF) == 1
    assert circular_sign(Fraction(0), Fraction(0), Fraction(1)) == 0
    assert circular_sign(Fraction(1), Fraction(0), INF) == -1


@given(points, points, points)
def test_circular_sign_against_angles(p, q, r):
    s = circular_sign(p, q, r)
    if len({p, q, r}) < 3:
        assert s == 0
        return
    a, b, c = (_angle(x) for x in (p, q, r))
    # counterclockwise from a: b comes before c
    expected = 1 if (b - a) % (2 * math.pi) < (c - a) % (2 * math.pi) else -1
    assert s == expected
    assert circular_sign(q, r, p) == s
    assert circular_sign(q, p, r) == -s


@given(points, points, points, points)
def test_cocycle_identity_on_points(p1, p2, p3, p4):
    c = circular_sign
    assert c(p2, p3, p4) - c(p1, p3, p4) + c(p1, p2, p4) - c(p1, p2, p3) == 0


def test_modular_generators():
    rep = build_rep("modular")
    assert rep.alpha(Fraction(0)) is INF
    assert rep.beta(INF) == -1


def _frac_matrix_product(*ms):
    out = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    for m in ms:
        out = [[sum(out[i][k] * m[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return out


def test_deformed_beta_matrix():
    rep = build_rep("deformed", Fraction(5, 4), Fraction(-3, 4))
    H = [[Fraction(5, 4), Fraction(-3, 4)], [Fraction(-3, 4), Fraction(5, 4)]]
    Hinv = [[Fraction(5, 4), Fraction(3, 4)], [Fraction(3, 4), Fraction(5, 4)]]
    m = _frac_matrix_product(H, [[1, 1], [-1, 0]], Hinv)
    scale = Fraction(55) / m[0][0]
    assert [[x * scale for x in row] for row in m] == [[55, 49], [-49, -39]]
    assert rep.beta.matrix() == [[55, 49], [-49, -39]]
    assert rep.beta.det == 256 and rep.beta.trace ** 2 == rep.beta.det
    assert (rep.beta ** 3).is_identity() and (rep.alpha ** 2).is_identity()


def test_invalid_deformation():
    with pytest.raises(ValueError):
        build_rep("deformed", Fraction(5, 4), Fraction(3, 4))
    with pytest.raises(ValueError):
        build_rep("deformed", Fraction(2), Fraction(-1))


def test_modular_orbit_is_not_free():
    with pytest.raises(circ.FreenessError):
        orbit_config(build_rep("modular"), ball_enumerate(PSL2ZGroup(), 2))


def test_deformed_orbit_consecutive_points():
    cfg = orbit_config(build_rep(), ball_enumerate(PSL2ZGroup(), 2))
    order = cfg.cyclic_elements(BE2 * AL)
    assert order[:3] == [BE2 * AL, E, AL * BE]


def test_first_generation_cyclic_order():
    cfg = orbit_config(build_rep(), FIRST_GENERATION)
    assert cfg.cyclic_elements(E) == [E, AL * BE, AL * BE * AL, AL * BE2, AL * BE2 * AL, AL, BE, BE * AL, BE2, BE2 * AL]


def test_cocycle_check_valid_and_falsifiable():
    ball = ball_enumerate(PSL2ZGroup(), 2)
    cfg = orbit_config(build_rep(), ball)
    assert cocycle_check(cfg.sign, ball, invariance=False)["violations"] == []
    target = (ball[1], ball[2], ball[3])

    def flipped(*t):
        return -cfg.sign(*t) if t == target else cfg.sign(*t)

    assert cocycle_check(flipped, ball, invariance=False)["violations"]


def test_cocycle_left_invariance_radius_3():
    ball = ball_enumerate(PSL2ZGroup(), 3)
    assert cocycle_check(rep_cocycle(build_rep()), ball)["violations"] == []


def test_c1_orientation_class_pinned():
    # computed, then pinned: c(e, beta, beta^2) for the deformed orbit
    assert co_sign(rep_cocycle(build_rep())) == 1
    assert co_sign(circ.k_fold_lift(build_rep(), 5).cocycle()) == -1
    assert co_sign(circ.k_fold_lift(build_rep(), 7).cocycle()) == 1


def test_lift_eval_examples():
    L = circ.braid_lift(build_rep(), 1)
    assert L.sign == 1
    assert L.lift_eval(B3_T) == (1, Fraction(0))
    w, p = L.lift_eval(B3_A)
    assert w == 0 and p != 0
    g = b3_normalize("abBAbab")
    assert L.lift_eval(g * g.inverse()) == (0, Fraction(0))


def test_lift_respects_composition():
    L = circ.braid_lift(build_rep(), 1)
    ball = ball_enumerate(B3Group(), 3)
    for g in ball:
        Fg = L.element_map(g)
        for h in ball:
            assert Fg(L.lift_eval(h)) == L.lift_eval(g * h)


def test_lift_with_wrong_convention_fails():
    with pytest.raises(circ.LiftError):
        circ.braid_lift(build_rep(), 1, sign=-1)


def test_pi_star_examples():
    L = circ.braid_lift(build_rep(), 1)
    assert circ.pi_star_sign(L, B3_T) == 1
    assert circ.pi_star_sign(L, B3_B.inverse()) == -1
    with pytest.raises(Exception):
        circ.pi_star_sign(L, b3_normalize(""))


def test_lambda5_chain_holds_for_the_reciprocal():
    # computed: pi-star of c(5) has t negative, and every link of the chain is reversed
    lam = circ.braid_lift(build_rep(), 5).oracle()
    x = (B3_A * B3_B) ** 5 * B3_T ** -4
    assert lam.sign(B3_T) == -1
    assert lam.sign(x) == 1
    assert lam.sign(B3_A) == -1
    assert lam.compare(B3_A, x * B3_A) == 1


def test_q_star_examples():
    lam = dd_order()
    assert circ.q_star_sign(lam, E, AL, BE) == 1
    assert circ.q_star_sign(lam, AL, AL, BE) == 0
    assert circ.q_star_representative(lam, AL) == B3_A


def test_q_star_of_dd_is_a_circular_order():
    c = circ.q_star(dd_order())
    ball = ball_enumerate(PSL2ZGroup(), 2)
    assert cocycle_check(c, ball)["violations"] == []


def test_combinatorial_pi_star_matches_geometric():
    lam = circ.combinatorial_pi_star(rep_cocycle(build_rep()))
    geo = circ.braid_lift(build_rep(), 1).oracle()
    for g in ball_enumerate(B3Group(), 5)[1:]:
        assert lam.sign(g) == geo.sign(g)


def test_k_fold_lift_examples():
    rep = build_rep()
    with pytest.raises(circ.NoLift):
        circ.k_fold_lift(rep, 6)
    L1 = circ.k_fold_lift(rep, 1)
    assert L1.alpha.f == rep.alpha and L1.beta.f == rep.beta
    L5 = circ.k_fold_lift(rep, 5)
    # alpha^2 and beta^3 are the identity on the 5-fold cover
    assert (L5.alpha ** 2).j % 5 == 0 and (L5.beta ** 3).j % 5 == 0


@pytest.mark.parametrize("k", range(1, 26))
def test_lift_exists_iff_k_is_pm1_mod_6(k):
    exists = k % 6 in (1, 5)
    try:
        circ.k_fold_lift(build_rep(), k)
        assert exists
    except circ.NoLift:
        assert not exists


def test_rotation_number_examples():
    rep = build_rep()
    assert circ.rotation_number(LineMap(circ.IDENTITY, 0)) == 0
    assert circ.kfold_rotation(rep, 5, AL * BE) == Fraction(1, 5)
    assert circ.kfold_rotation(rep, 7, AL * BE) == Fraction(6, 7)
    # the modular alpha beta is parabolic fixing 0: its canonical lift fixes x0
    assert circ.rotation_number(LineMap(build_rep("modular").matrix(AL * BE))) == 0


@pytest.mark.parametrize("k", [1, 5, 7, 11])
def test_rotation_number_shift_properties(k):
    L = circ.k_fold_lift(build_rep(), k)
    F = L.element_map(AL * BE)
    r = circ.rotation_number(F, k)
    assert circ.rotation_number(F.shifted(k), k) == r
    assert circ.rotation_number(F.shifted(1), k) == (r + Fraction(1, k)) % 1
    # elliptic generators: beta has rotation 1/3 or 2/3 on every cover
    assert circ.rotation_number(L.beta, k) in (Fraction(1, 3), Fraction(2, 3))


def test_rotation_number_needs_a_periodic_point():
    irrational_elliptic = Moebius(3, -4, 4, 3)
    with pytest.raises(ValueError):
        circ.rotation_number(LineMap(irrational_elliptic), 1, max_period=6)


def test_ping_pong():
    rep = build_rep()
    assert circ.ping_pong_verify(rep, circ.guardian_intervals(rep))["ok"]
    modular = build_rep("modular")
    res = circ.ping_pong_verify(modular, circ.guardian_intervals(modular))
    assert not res["ok"] and res["witness"]
    J = circ.guardian_intervals(rep)
    key = ("1", "+")
    J[key] = circ.Guarded(J[key].J.complement(), J[key].K)
    with pytest.raises(circ.DegenerateInterval):
        circ.ping_pong_verify(rep, J)
    with pytest.raises(circ.DegenerateInterval):
        Arc(Fraction(1), Fraction(1))


def test_gamma_words_free_to_length_8():
    res = circ.gamma_freeness(build_rep(), 8)
    assert res["free"]
    assert res["checked"] == sum(4 * 3 ** (n - 1) for n in range(1, 9))


def test_gamma_relation_in_modular_is_not_hidden():
    # the freeness check is falsifiable: alpha^2 = 1 is caught as a 'word'
    m = build_rep().alpha
    assert (m * m).is_identity()


def test_reconstruction_by_generations():
    rep = build_rep()
    first = orbit_config(rep, FIRST_GENERATION).elements()
    d0 = circ.reconstruct_by_generations(first, 0, rep)
    assert d0 == FIRST_GENERATION
    d1 = circ.reconstruct_by_generations(first, 1, rep)
    d2 = circ.reconstruct_by_generations(first, 2, rep)
    assert [g for g in d2 if g in set(d1)] == d1
    d3 = circ.reconstruct_by_generations(first, 3, rep)
    assert d3 == orbit_config(rep, d3).cyclic_elements(E)


def test_reconstruction_requires_ping_pong():
    with pytest.raises(circ.PingPongFailed):
        circ.reconstruct_by_generations(FIRST_GENERATION, 1, build_rep("modular"))


def test_parameter_choices_give_the_same_order():
    ball = ball_enumerate(PSL2ZGroup(), 4)
    a = orbit_config(build_rep(), ball).cyclic_elements(E)
    for c, d in circ.FALLBACK_DEFORMATIONS[:2]:
        assert orbit_config(build_rep("deformed", c, d), ball).cyclic_elements(E) == a


def test_k_fold_circular_order_is_valid():
    c5 = circ.k_fold_lift(build_rep(), 5).cocycle()
    assert cocycle_check(c5, ball_enumerate(PSL2ZGroup(), 2))["violations"] == []
    lam5 = circ.combinatorial_pi_star(c5, sign=-1)
    geo5 = circ.braid_lift(build_rep(), 5).oracle()
    for g in ball_enumerate(B3Group(), 4)[1:]:
        assert lam5.sign(g) == geo5.sign(g)
