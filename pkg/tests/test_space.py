import random
from fractions import Fraction

import pytest

from effspace.instances import BOT, make_reals, make_sierpinski
from effspace.kernel import Enumerator, pair, run, unpair
from effspace.numbering import LacombeSet
from effspace.quasimetric import RegularityWitness
from effspace.space import (NotComputable, check_effective_regularity, converge, join_space,
                            limit_pass, merge_L, sample_triples, sb_search,
                            specialization_refute, split_L, star_bicomputable)

FUEL = 10**5


@pytest.fixture(scope="module")
def R():
    return make_reals()


@pytest.fixture(scope="module")
def S():
    return make_sierpinski()


def test_sb_equal_codes(R):
    zero, m = R.point(0), R.ball(-1, 0)
    out = sb_search(R.tau, zero, m, m, FUEL)
    assert out.confirmed
    B = R.tau.basis(out.witness)
    assert 0 in B and R.oracle.subset(B, R.interval(m))
    # the documented qualifying answer
    assert run(R.tau.strong_incl(R.ball(0, 2), m), 10).confirmed


def test_sb_two_codes(R):
    zero = R.point(0)
    m, n = R.ball(-1, 0), R.ball(0, 0)  # (-2, inf) and (-1, inf)
    out = sb_search(R.tau, zero, m, n, FUEL)
    B = R.tau.basis(out.witness)
    assert 0 in B and R.oracle.subset(B, R.interval(n))
    assert not sb_search(R.tau, zero, m, n, 0).confirmed


def test_sb_sampled_sierpinski(S):
    for i, m, n in sample_triples(S.tau, [S.bot, S.top], 20, seed=5):
        out = sb_search(S.tau, i, m, n, FUEL)
        assert out.confirmed
        B = S.tau.basis(out.witness)
        assert S.oracle.subset(B, S.tau.basis(m)) and S.oracle.subset(B, S.tau.basis(n))


def test_sample_triples_seeded(R):
    pts = [R.point(Fraction(k, 2)) for k in range(-2, 3)]
    assert sample_triples(R.tau, pts, 10, seed=1) == sample_triples(R.tau, pts, 10, seed=1)


def test_specialization(S, R):
    assert specialization_refute(S.tau, S.top, S.bot, FUEL).confirmed
    assert not specialization_refute(S.tau, S.bot, S.top, 2000).confirmed
    out = specialization_refute(R.tau, R.point(1), R.point(0), FUEL)
    assert out.confirmed and 0 not in R.tau.basis(out.witness)


def test_converge_round_trip(R):
    i = R.point(Fraction(1, 2))
    ne = converge(R.tau, i)
    seq = ne.prefix(6)
    for a, b in zip(seq[1:], seq):
        assert run(R.tau.strong_incl(a, b), 100).confirmed
    j = limit_pass(R.tau, ne, FUEL).witness
    for code in (R.ball(1, 0), R.ball(Fraction(1, 2), 4)):
        assert R.tau.member(j, code, FUEL).confirmed
    assert not limit_pass(R.tau, ne, 0).confirmed


def test_converge_sierpinski_bot_stays_coarse(S):
    ne = converge(S.tau, S.bot)
    assert all(unpair(c)[0] == 0 for c in ne.prefix(5))


def test_join_basis_and_membership(R):
    J = join_space(R.bi)
    code = pair(R.ball(0, 0), R.ball(0, 0))  # (-1, inf) & (-inf, 1)
    box = J.basis(code)
    assert box.lo == -1 and box.hi == 1
    assert J.member(R.point(0), code, FUEL).confirmed
    inner = pair(R.ball(0, 2), R.ball(0, 2))
    assert run(J.strong_incl(inner, code), 100).confirmed
    assert not run(J.strong_incl(pair(R.ball(0, 2), R.ball(3, 0)), code), 100).confirmed


def test_merge_split(R):
    lt = Enumerator.of([pair(1, 10), pair(2, 20)])
    ls = Enumerator.of([pair(1, 11)])
    joined = merge_L(lt, ls)
    assert joined.values(20) == [pair(1, pair(10, 11))]
    a, b = split_L(joined)
    assert a.values(20) == [pair(1, 10)] and b.values(20) == [pair(1, 11)]
    e1, e2 = split_L(Enumerator.of([]))
    assert e1.values(10) == [] and e2.values(10) == []


def test_star_numbering(R):
    star = star_bicomputable(R.tau, R.sigma)
    zero = R.point(0)
    assert star.numbering.deref(pair(zero, zero)) == 0
    assert star.numbering.deref(pair(zero, R.point(1))) is None
    code = R.ball(1, 0)
    lifted = star.section_tau(pair(zero, zero))
    assert lifted.contains(code, FUEL).confirmed == R.tau.member(zero, code, FUEL).confirmed


def _complement(space, pts):
    def f(m):
        B = space.basis(m)
        return [p for p in pts if not space.oracle.contains(B, space.point_handle(p))][:20]
    return f


def test_regularity_lower_example(R):
    pts = [R.point(Fraction(k, 4)) for k in range(-8, 9)]
    bi = R.bi.dual
    W = RegularityWitness(R.qL, R.sigma)
    m = R.ball(Fraction(1, 2), 0)  # (-inf, 3/2)
    recs = check_effective_regularity(bi, W.s, W.t, [(R.point(0), m)],
                                      _complement(bi.tau, pts), FUEL, pool=pts)
    assert [r.status for r in recs] == ["pass"] * 4


def test_regularity_sierpinski_example(S):
    W = RegularityWitness(S.q, S.tau)
    recs = check_effective_regularity(S.bi, W.s, W.t, [(S.top, pair(1, 0))],
                                      _complement(S.tau, [S.bot, S.top]), FUEL,
                                      pool=[S.bot, S.top])
    assert all(r.status == "pass" for r in recs)


def test_regularity_catches_missing_cover(R):
    pts = [R.point(Fraction(k, 4)) for k in range(-8, 9)]
    W = RegularityWitness(R.q, R.tau)
    empty = lambda i, m: LacombeSet(Enumerator.empty())
    recs = check_effective_regularity(R.bi, W.s, empty, [(R.point(0), R.ball(0, 0))],
                                      _complement(R.tau, pts), 2000, pool=pts)
    c = next(r for r in recs if r.name.startswith("c"))
    assert c.status == "fail" and c.witness["missing_point"] in pts


def test_section_of_non_point(R):
    R.registry.add("not a point", key="junk")
    with pytest.raises(NotComputable):
        R.tau.section(R.registry.add("not a point", key="junk"))
