import random
from fractions import Fraction

import pytest

from effspace.instances import BOT, TOP, delta_U, make_reals, make_sierpinski
from effspace.kernel import Enumerator, pair, run, unpair
from effspace.quasimetric import (RegularityWitness, ball_grid, base_to_c, bi_limit_pass_c,
                                  c_to_wc, conjugate, limit_pass_wc, margin_bound, refine_toward,
                                  regularity_t, strong_incl, sym_lt)

FUEL = 10**4


@pytest.fixture(scope="module")
def R():
    return make_reals()


@pytest.fixture(scope="module")
def S():
    return make_sierpinski()


def holds(proc, fuel=FUEL):
    return run(proc, fuel).confirmed


def test_conjugate_is_involution(R):
    qq = conjugate(conjugate(R.q))
    rng = random.Random(3)
    for _ in range(200):
        a, b, c, e = (rng.randrange(40) for _ in range(4))
        assert holds(qq.lt(a, b, c, e), 50) == holds(R.q.lt(a, b, c, e), 50)
    assert qq.conj == R.q.conj


def test_conjugate_of_lower_is_upper(R):
    up = conjugate(R.qL)
    assert up.delta(Fraction(3), Fraction(5)) == delta_U(3, 5) == 0
    assert up.delta(Fraction(5), Fraction(3)) == 2


def test_sierpinski_conjugate(S):
    assert conjugate(S.q).delta(BOT, TOP) == 1
    assert S.q.delta(BOT, TOP) == 0


def test_symmetrised_distance(R, S):
    zero, one = R.code(0), R.code(1)
    assert sym_lt(R.q, zero, one, 2, 0, FUEL).confirmed
    assert not sym_lt(R.q, zero, one, 1, 0, FUEL).confirmed
    assert not sym_lt(S.q, 0, 1, 1, 0, FUEL).confirmed
    assert sym_lt(R.q, one, one, 1, 30, FUEL).confirmed


def test_strong_inclusion_examples(R):
    incl = strong_incl(R.q)
    a = R.code(Fraction(5, 8))
    assert holds(incl(pair(a, 4), pair(a, 3)))
    assert not holds(incl(pair(a, 3), pair(a, 3)))
    # 0 + 1/4 < 1
    assert holds(incl(R.ball(0, 2), R.ball(-1, 0)))


def test_strong_inclusion_sound(R):
    incl = strong_incl(R.q)
    rng = random.Random(11)
    seen = 0
    for _ in range(400):
        m = R.ball(Fraction(rng.randint(-16, 16), 8), rng.randint(0, 4))
        n = R.ball(Fraction(rng.randint(-16, 16), 8), rng.randint(0, 4))
        if holds(incl(m, n), 64):
            seen += 1
            assert R.oracle.subset(R.interval(m), R.interval(n))
    assert seen > 20


def test_ball_membership(R, S):
    zero = R.point(0)
    assert R.tau.member(zero, R.ball(-1, 0), FUEL).confirmed
    assert not R.tau.member(zero, R.ball(1, 1), FUEL).confirmed
    for e in (0, 3, 9):
        assert R.tau.member(zero, R.ball(0, e), FUEL).confirmed
    assert R.tau.member(zero, R.ball(0, 5), FUEL).confirmed
    assert not R.tau.member(R.point(1), R.ball(2, 1), FUEL).confirmed
    # delta(bot, top) = 0
    assert S.tau.member(S.top, pair(0, 1), FUEL).confirmed


def test_c_to_wc_keeps_left_memberships(R):
    i = R.point(Fraction(3, 4))
    j = c_to_wc(R.registry, i)
    assert R.registry[j].right is None
    for code in R.registry[j].left.values(60):
        assert R.tau.member(i, code, FUEL).confirmed
    for code in (R.ball(1, 1), R.ball(0, 0)):
        assert R.tau.member(j, code, FUEL).confirmed


def test_grid_starts_coarse(R):
    first = ball_grid(R.q).values(20)
    assert all(unpair(c)[1] <= 4 for c in first)
    assert len(set(first)) == len(first)


def _sequence(R, centre, side):
    # normed enumeration of balls around 1 from the given side
    return R.registry.register(lambda k: R.ball(centre(k), k), key=("seq", side))


def test_limit_pass_upper(R):
    f = _sequence(R, lambda k: 1 - Fraction(1, 2**k), "U")
    lim = limit_pass_wc(R.q, R.registry, f)
    assert R.tau.member(lim, R.ball(1, 1), FUEL).confirmed
    assert R.tau.member(lim, R.ball(Fraction(1), 6), FUEL).confirmed
    # deep terms of f carry huge exact codes, so the negative check stays short
    assert not R.tau.member(lim, R.ball(2, 1), 500).confirmed


def test_bi_limit_pass(R):
    f1 = _sequence(R, lambda k: 1 - Fraction(1, 2**k), "U")
    f2 = _sequence(R, lambda k: 1 + Fraction(1, 2**k), "L")
    lim = bi_limit_pass_c(R.q, R.registry, f1, f2)
    assert R.registry[lim].computable
    assert R.tau.member(lim, R.ball(1, 3), FUEL).confirmed
    assert R.sigma.member(lim, R.ball(1, 3), FUEL).confirmed
    assert not R.sigma.member(lim, R.ball(0, 1), 500).confirmed


def test_margin_bound_value():
    for n_s in range(6):
        for c in range(6):
            C, E = margin_bound(n_s, c)
            assert Fraction(C, 2**E) == Fraction(2, 2**c) + Fraction(1, 2**n_s)


def test_regularity_lower_reals(R):
    zero = R.point(0)
    m = R.ball(Fraction(1, 2), 0)  # (-inf, 3/2) in the lower topology
    assert holds(strong_incl(R.qL)(R.ball(0, 2), m))  # (-inf, 1/4)
    W = RegularityWitness(R.qL, R.sigma)
    s = run(W.s(zero, m), FUEL).witness
    ball = R.interval(s, conj=True)
    assert 0 in ball and R.oracle.subset(ball, R.interval(m, conj=True))
    # delta_L(0, 3/2) = 3/2 > 1 + 1/4, so <3/2, 1> = (1, inf) is in the cover
    T = regularity_t(R.qL, R.ball(0, 2))
    assert T.index_set.contains(R.ball(Fraction(3, 2), 1), 50).confirmed
    assert R.interval(R.ball(Fraction(3, 2), 1)).lo == 1
    for c in T.codes(200):
        assert R.oracle.disjoint(R.interval(c), R.interval(R.ball(0, 2), conj=True))


def test_regularity_sierpinski_top(S):
    W = RegularityWitness(S.q, S.tau)
    m = pair(1, 0)  # {top}
    s = run(W.s(S.top, m), FUEL).witness
    assert unpair(s)[0] != 0
    for c in W.t(S.top, m).codes(50):
        assert S.sigma.basis(c) == frozenset({BOT})


def test_refine_toward(R):
    one = R.point(1)
    m = R.ball(0, 0)  # (-1, inf)
    out = refine_toward(R.q, R.tau, one, m, FUEL)
    assert out.confirmed
    u, e = unpair(out.witness)
    assert abs(R.q.base(u) - 1) <= Fraction(1, 2**e)
    assert holds(strong_incl(R.q)(out.witness, m))
    assert not refine_toward(R.q, R.tau, one, m, 0).confirmed
