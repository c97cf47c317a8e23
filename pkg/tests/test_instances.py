from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from effspace.instances import (BOT, TOP, HaltWatch, Interval, IntervalOracle, delta_L, delta_U,
                                dyadic_levels, make_creal, make_reals, make_sierpinski,
                                sierpinski_delta)
from effspace.kernel import Registry, diverge, dyadic_decode, dyadic_encode, pair, run, unpair

FUEL = 10**4
dyad = st.builds(lambda m, e: Fraction(m, 2**e), st.integers(-64, 64), st.integers(0, 6))


@pytest.fixture(scope="module")
def R():
    return make_reals()


@pytest.fixture
def S():
    return make_sierpinski()


def test_reals_distances():
    assert delta_L(3, 5) == 2 and delta_L(5, 3) == 0
    assert delta_U(3, 5) == 0 and delta_U(5, 3) == 2


@given(dyad, dyad, dyad)
def test_triangle_inequality(x, y, z):
    for d in (delta_L, delta_U, lambda a, b: max(delta_L(a, b), delta_U(a, b))):
        assert d(x, x) == 0
        assert d(x, z) <= d(x, y) + d(y, z)


def test_balls_as_intervals(R):
    u, m = Fraction(3, 8), 2
    assert R.interval(R.ball(u, m)) == Interval(u - Fraction(1, 4), None)
    assert R.interval(R.ball(u, m), conj=True) == Interval(None, u + Fraction(1, 4))


@given(dyad, dyad, st.integers(0, 5))
def test_ball_interval_agrees_with_lt(y, u, e):
    R = make_reals()
    iv = R.interval(R.ball(u, e))
    assert (y in iv) == (delta_U(u, y) < Fraction(1, 2**e))


def test_levels_nested_and_exhaustive():
    for k in range(5):
        assert set(dyadic_levels(k)) <= set(dyadic_levels(k + 1))
    values = {dyadic_decode(c).to_fraction() for c in dyadic_levels(3)}
    assert Fraction(-3) in values and Fraction(5, 8) in values and Fraction(1, 16) not in values


def test_interval_oracle():
    o = IntervalOracle()
    a, b = Interval(Fraction(0), None), Interval(None, Fraction(1))
    assert o.contains(a, Fraction(1, 2)) and not o.contains(a, Fraction(0))
    assert not o.disjoint(a, b)
    assert o.disjoint(a, Interval(None, Fraction(0)))
    assert o.subset(Interval(Fraction(1), None), a)
    assert not o.subset(b, a)


def _register_seq(R, f, key):
    return R.registry.register(lambda k: dyadic_encode(f(k)), key=key)


def test_creal_constant_matches_base_point(R):
    lo = _register_seq(R, lambda k: Fraction(1, 2), "half-lo")
    hi = _register_seq(R, lambda k: Fraction(1, 2), "half-hi")
    c = make_creal(R, lo, hi, handle=Fraction(1, 2))
    b = R.point(Fraction(1, 2))
    for code in (R.ball(1, 1), R.ball(Fraction(1, 2), 3), R.ball(0, 1)):
        assert R.tau.member(c, code, FUEL).confirmed == R.tau.member(b, code, FUEL).confirmed


@pytest.mark.parametrize("lower, upper, value", [
    (lambda k: 1 - Fraction(1, 2**k), lambda k: 1 + Fraction(1, 2**k), Fraction(1)),
    (lambda k: Fraction(0), lambda k: Fraction(1, 2**k), Fraction(0)),
])
def test_creal_brackets(R, lower, upper, value):
    c = make_creal(R, _register_seq(R, lower, ("lo", value)), _register_seq(R, upper, ("hi", value)),
                   handle=value)
    assert R.tau.member(c, R.ball(value, 3), FUEL).confirmed
    assert R.sigma.member(c, R.ball(value, 3), FUEL).confirmed
    assert not R.tau.member(c, R.ball(value + 1, 1), FUEL).confirmed


def test_sierpinski_delta_table():
    assert sierpinski_delta(BOT, TOP) == 0
    assert sierpinski_delta(TOP, BOT) == 1
    assert sierpinski_delta(BOT, BOT) == sierpinski_delta(TOP, TOP) == 0


def test_sierpinski_basis(S):
    assert S.tau.basis(pair(0, 5)) == frozenset({BOT, TOP})
    assert S.tau.basis(pair(3, 5)) == frozenset({TOP})
    assert S.basis_table(5) == {0: frozenset({BOT, TOP}), 1: frozenset({TOP})}


def test_sierpinski_strong_inclusion(S):
    incl = lambda m, n: run(S.tau.strong_incl(m, n), 4).confirmed
    assert incl(pair(3, 1), pair(0, 7))
    assert not incl(pair(0, 1), pair(2, 1))
    assert S.incl_table() == {(0, 0): False, (0, 1): False, (1, 0): True, (1, 1): False}
    # shrinking radius on the same set is still strong inclusion
    assert incl(pair(1, 3), pair(1, 2))


def test_sierpinski_sections(S):
    # bot lies only in S-balls, top eventually in {top}-balls
    bot_codes = S.tau.section(S.bot).values(60)
    assert bot_codes and all(S.q.canon(unpair(c)[0]) == 0 for c in bot_codes)
    top_codes = S.tau.section(S.top).values(60)
    assert any(S.q.canon(unpair(c)[0]) != 0 for c in top_codes)


def _halts_after(n):
    def prog(_):
        for _ in range(n):
            yield
        return 0
    return prog


def test_halting_points(S):
    reg = S.registry
    quick = S.halting_point(reg.register(_halts_after(0)))
    never = S.halting_point(reg.register(lambda _: diverge()))
    slow = S.halting_point(reg.register(_halts_after(100)))
    top = pair(1, 0)
    assert S.tau.member(quick, top, 50).confirmed
    assert not S.tau.member(never, top, FUEL).confirmed
    assert all(unpair(c)[0] == 0 for c in S.tau.section(never).values(200))
    assert not S.tau.member(slow, top, 50).confirmed
    assert S.tau.member(slow, top, 500).confirmed


def test_halt_watch_definite_no():
    reg = Registry()

    def no(_):
        yield
        return None
    w = HaltWatch(reg, reg.register(no))
    assert w.advance(10) is None and w.ticks == float("inf")
