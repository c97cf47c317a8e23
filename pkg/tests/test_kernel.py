from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from effspace.kernel import (Confirmed, Dyadic, Enumerator, Exhausted, Registry, UnknownCodeError,
                             decode_tuple, diverge, dovetail, dyadic_decode, dyadic_encode,
                             encode_tuple, fuel_ladder, harvest, interleave, pair, proc_all,
                             ready, run, schedule, search, search_value, unpair)

nats = st.integers(min_value=0, max_value=10**12)
dyadics = st.builds(Dyadic, st.integers(-10**6, 10**6), st.integers(-40, 40))


@given(nats, nats)
def test_pair_roundtrip(a, b):
    assert unpair(pair(a, b)) == (a, b)


@given(nats)
def test_unpair_roundtrip(n):
    assert pair(*unpair(n)) == n


def test_pair_is_cantor():
    assert [unpair(n) for n in range(6)] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@given(st.lists(nats, min_size=2, max_size=5))
def test_tuple_roundtrip(xs):
    assert decode_tuple(encode_tuple(xs), len(xs)) == xs


@given(dyadics, dyadics)
def test_dyadic_matches_fractions(x, y):
    fx, fy = x.to_fraction(), y.to_fraction()
    assert (x + y).to_fraction() == fx + fy
    assert (x - y).to_fraction() == fx - fy
    assert (x * y).to_fraction() == fx * fy
    assert (x < y) == (fx < fy)
    assert (x == y) == (fx == fy)


@given(dyadics)
def test_dyadic_code_roundtrip(x):
    assert dyadic_decode(dyadic_encode(x)) == x


def test_dyadic_normal_form():
    assert Dyadic(12, -3) == Dyadic(3, -1)
    assert Dyadic(12, -3).mantissa == 3
    assert Dyadic(0, 7).exponent == 0
    assert hash(Dyadic(4)) == hash(Dyadic(1, 2))


def test_dyadic_rejects_thirds():
    with pytest.raises(ValueError):
        Dyadic.coerce(Fraction(1, 3))


def test_run_outcomes():
    # the answer itself costs a tick
    assert run(ready(5), 10) == Confirmed(5, 2)
    assert run(diverge(), 10) == Exhausted(10)
    assert not run(ready(5), 0).confirmed


def test_definite_no_stops_early():
    def no():
        yield
        return None
    out = run(no(), 100)
    assert not out.confirmed and out.steps == 2


def test_confirmed_is_stable():
    def slow():
        for _ in range(40):
            yield
        return 7
    first = run(slow(), 41)
    assert first == run(slow(), 10**4)


def test_proc_all():
    assert run(proc_all(ready(1), ready(2)), 5).witness == 2
    assert not run(proc_all(ready(1), diverge()), 50).confirmed


def test_enumerator_memoised():
    calls = []

    def gen():
        for k in range(5):
            calls.append(k)
            yield k * k
    e = Enumerator(gen)
    assert e.step(3) == 9
    assert e.step(1) == 1
    assert calls == [0, 1, 2, 3]
    assert e.step(10) is None
    assert e.known() == 5


def test_of_is_decidable():
    e = Enumerator.of([2, 4])
    assert e.contains(4, 5).confirmed
    out = e.contains(3, 5)
    assert not out.confirmed and out.steps < 5


def test_compact_skips_gaps():
    e = Enumerator.from_function(lambda k: k if k % 3 == 0 else None)
    e.values(30)
    assert Enumerator.compact(e).values(4) == [0, 3, 6, 9]


def test_interleave():
    u = interleave(Enumerator.of([1, 3]), Enumerator.of([2]))
    assert sorted(u.values(6)) == [1, 2, 3]


def test_dovetail_finds_pair():
    fam = lambda t: Enumerator.from_function(lambda k: t * 100 + k)
    out = dovetail(fam, lambda t, v: t == 2 and v == 203, 10**4)
    assert out.confirmed and unpair(out.witness) == (2, 203)
    assert schedule([1, 2, 3], 7) == (1, 2)


def _halts_at(n):
    for _ in range(n):
        yield
    return n


def test_search_fair_against_divergence():
    # candidate 0 diverges, candidate 3 answers after a while
    test = lambda c: diverge() if c == 0 else (_halts_at(50) if c == 3 else diverge())
    out = run(search(Enumerator.naturals(), test), 10**4)
    assert out.confirmed and out.witness == 3
    out = run(search_value(Enumerator.naturals(), test), 10**4)
    assert out.witness == 50


def test_search_deterministic_steps():
    test = lambda c: _halts_at(100 - c) if c < 100 else diverge()
    a = run(search(Enumerator.naturals(), test), 10**5)
    b = run(search(Enumerator.naturals(), test), 10**5)
    assert a == b


def test_harvest_lists_all_answers():
    h = harvest(Enumerator.naturals(), lambda c: _halts_at(c) if c % 2 else diverge())
    assert set(h.values(2000)) >= {1, 3, 5, 7}


def test_fuel_ladder():
    assert fuel_ladder(64, 1000) == [64, 128, 256, 512, 1000]


def test_registry_specialize_compose():
    reg = Registry()
    add = reg.register(lambda c: sum(unpair(c)))
    inc = reg.specialize(add, 1)
    assert reg.apply(inc, 41, 10).witness == 42
    twice = reg.compose(inc, inc)
    assert reg.apply(twice, 0, 10).witness == 2
    assert reg.specialize(add, 1) == inc


def test_registry_memo_keys_and_unknown():
    reg = Registry()
    assert reg.add("x", key="k") == reg.add("y", key="k")
    with pytest.raises(UnknownCodeError):
        reg.apply(99, 0, 10)
    with pytest.raises(UnknownCodeError):
        reg[5]
