"""Model spaces with exact oracles: computable reals and Sierpinski space."""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from .kernel import (Dyadic, Enumerator, Proc, Registry, dyadic_decode, dyadic_encode, pair,
                     ready, run, unpair)
from .quasimetric import (QPoint, QuasiMetricDescriptor, base_to_c, conjugate,
                          ball_grid, decidable_relation, induced_bispace)
from .space import BiSpaceDescriptor

Number = Union[int, Fraction, Dyadic]


def _frac(x: Number) -> Fraction:
    return x.to_fraction() if isinstance(x, Dyadic) else Fraction(x)


# -- intervals ------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Interval of the reals; ``None`` endpoints are infinite."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    @property
    def empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"


def _lower(a: Interval, b: Interval) -> tuple:
    """The larger of two lower ends (the intersection's)."""
    if a.lo is None:
        return b.lo, b.lo_closed
    if b.lo is None or a.lo > b.lo:
        return a.lo, a.lo_closed
    if b.lo > a.lo:
        return b.lo, b.lo_closed
    return a.lo, a.lo_closed and b.lo_closed


def _upper(a: Interval, b: Interval) -> tuple:
    if a.hi is None:
        return b.hi, b.hi_closed
    if b.hi is None or a.hi < b.hi:
        return a.hi, a.hi_closed
    if b.hi < a.hi:
        return b.hi, b.hi_closed
    return a.hi, a.hi_closed and b.hi_closed


class IntervalOracle:
    """Exact interval membership, inclusion, disjointness and intersection."""

    def contains(self, basic: Interval, point: Any) -> bool:
        if point is None:
            raise ValueError("point has no exact value")
        return Fraction(point) in basic

    def intersect(self, a: Interval, b: Interval) -> Interval:
        lo, lc = _lower(a, b)
        hi, hc = _upper(a, b)
        return Interval(lo, hi, lc, hc)

    def disjoint(self, a: Interval, b: Interval) -> bool:
        return self.intersect(a, b).empty

    def subset(self, a: Interval, b: Interval) -> bool:
        if a.empty:
            return True
        if b.lo is not None:
            if a.lo is None or a.lo < b.lo or (a.lo == b.lo and a.lo_closed and not b.lo_closed):
                return False
        if b.hi is not None:
            if a.hi is None or a.hi > b.hi or (a.hi == b.hi and a.hi_closed and not b.hi_closed):
                return False
        return True


# -- reals ----------------------------------------------------------------------

def delta_U(x: Number, y: Number) -> Fraction:
    return max(_frac(x) - _frac(y), Fraction(0))


def delta_L(x: Number, y: Number) -> Fraction:
    return max(_frac(y) - _frac(x), Fraction(0))


def _real_ball(center: Fraction, e: int, conj: bool) -> Interval:
    # ball_U(u, r) = (u - r, inf); its conjugate ball_L(u, r) = (-inf, u + r)
    r = Fraction(1, 2 ** e) if e >= 0 else Fraction(2 ** -e)
    return Interval(None, center + r) if conj else Interval(center - r, None)


_LEVELS: list[list[int]] = []


def dyadic_levels(k: int) -> list[int]:
    """Canonical codes of the multiples of ``2**-k`` in ``[-k, k]``, nested in ``k``."""
    while len(_LEVELS) <= k:
        j = len(_LEVELS)
        prev = _LEVELS[-1] if _LEVELS else []
        old = set(prev)
        new = []
        for num in range(0, j * 2 ** j + 1):
            for sign in (1, -1) if num else (1,):
                code = dyadic_encode(Fraction(sign * num, 2 ** j))
                if code not in old:
                    new.append(code)
                    old.add(code)
        _LEVELS.append(prev + new)
    return _LEVELS[k]


@lru_cache(maxsize=None)
def _dyadic_parts(code: int) -> tuple[int, int]:
    d = dyadic_decode(code)
    return d.mantissa, d.exponent


@lru_cache(maxsize=None)
def _dyadic_value(code: int) -> Fraction:
    return dyadic_decode(code).to_fraction()


def _scaled_gap(a: int, b: int, c: int, e: int) -> tuple[int, int]:
    """``beta_a - beta_b`` and ``c * 2**-e`` over a common power of two."""
    (ma, xa), (mb, xb) = _dyadic_parts(a), _dyadic_parts(b)
    low = min(xa, xb, -e)
    return (ma << (xa - low)) - (mb << (xb - low)), c << (-e - low)


def _u_lt(a, b, c, e):
    # max(d, 0) < C holds iff C > 0 and d < C
    d, bound = _scaled_gap(a, b, c, e)
    return bound > 0 and d < bound


def _u_gt(a, b, c, e):
    d, bound = _scaled_gap(a, b, c, e)
    return d > bound


def reals_U() -> QuasiMetricDescriptor:
    """``delta_U`` over the dyadic base; its conjugate is ``delta_L``."""
    return QuasiMetricDescriptor(
        name="U", conj_name="L", base=_dyadic_value, canon=_canon_dyadic, levels=dyadic_levels,
        lt=decidable_relation(_u_lt), gt=decidable_relation(_u_gt), exact_delta=delta_U,
        ball_of=_real_ball)


@lru_cache(maxsize=None)
def _canon_dyadic(code: int) -> int:
    return dyadic_encode(dyadic_decode(code))


Bracket = Callable[[int], tuple[Fraction, Fraction]]


def _decide_left(a: Fraction, e: int, lo: Fraction, hi: Fraction) -> Optional[bool]:
    # <a,e> in the upper-side set iff a - 2**-e < y
    bound = a - Fraction(1, 2 ** e)
    if bound < lo:
        return True
    if bound >= hi:
        return False
    return None


def _decide_right(b: Fraction, e: int, lo: Fraction, hi: Fraction) -> Optional[bool]:
    # <b,e> in the lower-side set iff y < b + 2**-e
    bound = b + Fraction(1, 2 ** e)
    if hi < bound:
        return True
    if lo >= bound:
        return False
    return None


def _precision(k: int) -> int:
    return k.bit_length() + 4


def bracket_set(q: QuasiMetricDescriptor, bracket: Bracket, decide, name: str) -> Enumerator:
    """Ball codes certified by a shrinking bracket ``lo_k <= y <= hi_k``.

    Grid codes are taken in order; undecided codes wait until the bracket
    precision grows.
    """
    grid = ball_grid(q)

    def gen():
        pending: list[int] = []
        level = -1
        for k in itertools.count():
            code = grid.step(k)
            j = _precision(k)
            lo, hi = bracket(j)
            out = []
            if j != level:
                level, keep = j, []
                for c in pending:
                    a, e = unpair(c)
                    d = decide(q.base(a), e, lo, hi)
                    if d is None:
                        keep.append(c)
                    elif d:
                        out.append(c)
                pending = keep
            a, e = unpair(code)
            d = decide(q.base(a), e, lo, hi)
            if d is None:
                pending.append(code)
            elif d:
                out.append(code)
            if not out:
                yield None
            for c in out:
                yield c

    def member(code):
        a, e = unpair(code)
        a = q.canon(a)
        for j in itertools.count():
            lo, hi = bracket(j)
            d = decide(q.base(a), e, lo, hi)
            if d is not None:
                yield
                return pair(a, e) if d else None
            yield
    return Enumerator(gen, member=member, name=name)


def _memo_bracket(bracket: Bracket) -> Bracket:
    cache: dict[int, tuple[Fraction, Fraction]] = {}

    def f(k):
        if k not in cache:
            lo, hi = bracket(k)
            lo, hi = Fraction(lo), Fraction(hi)
            if lo > hi:
                raise ValueError(f"bracket inverted at {k}: {lo} > {hi}")
            cache[k] = (lo, hi)
        return cache[k]
    return f


def registry_bracket(registry: Registry, lower: int, upper: int, fuel: int = 10**6) -> Bracket:
    """Bracket from registered sequences of dyadic codes."""
    def f(k):
        ends = []
        for code in (lower, upper):
            out = registry.apply(code, k, fuel)
            if not out.confirmed:
                raise RuntimeError(f"sequence {code} stalled at {k}")
            ends.append(dyadic_decode(out.witness).to_fraction())
        return tuple(ends)
    return f


@dataclass(eq=False)
class RealInstance:
    """``(R_c, U, L)`` over the dyadic base, all points on one registry."""

    registry: Registry
    q: QuasiMetricDescriptor
    oracle: IntervalOracle
    bi: BiSpaceDescriptor

    @property
    def qL(self) -> QuasiMetricDescriptor:
        return conjugate(self.q)

    @property
    def tau(self):
        return self.bi.tau

    @property
    def sigma(self):
        return self.bi.sigma

    def delta(self, x: Number, y: Number) -> Fraction:
        return delta_U(x, y)

    def code(self, value: Number) -> int:
        return dyadic_encode(value)

    def ball(self, center: Number, e: int) -> int:
        """Ball code ``<center, e>``; the same code names a U-ball and an L-ball."""
        return pair(dyadic_encode(center), e)

    def interval(self, code: int, conj: bool = False) -> Interval:
        a, e = unpair(code)
        return _real_ball(self.q.base(a), e, conj)

    def point(self, value: Number) -> int:
        """Computable point for a dyadic value."""
        return base_to_c(self.q, self.registry, dyadic_encode(value))

    def creal(self, bracket: Bracket, handle: Optional[Fraction] = None, label: str = "",
              key: Any = None) -> int:
        bracket = _memo_bracket(bracket)
        left = bracket_set(self.q, bracket, _decide_left, f"left[{label}]")
        right = bracket_set(self.q, bracket, _decide_right, f"right[{label}]")
        p = QPoint(left, right, handle=handle, label=label or "creal", bracket=bracket)
        return self.registry.add(p, key=key)

    def value(self, i: int) -> Optional[Fraction]:
        return self.registry[i].handle


def make_reals(registry: Optional[Registry] = None) -> RealInstance:
    registry = registry or Registry()
    q = reals_U()
    oracle = IntervalOracle()
    bi = induced_bispace(q, registry, oracle)
    return RealInstance(registry, q, oracle, bi)


def make_creal(inst: RealInstance, lower: int, upper: int, handle: Optional[Fraction] = None,
               fuel: int = 10**6) -> int:
    """Computable real from registered monotone lower and antitone upper sequences."""
    return inst.creal(registry_bracket(inst.registry, lower, upper, fuel), handle,
                      label=f"creal({lower},{upper})", key=("creal", lower, upper))


def point_bracket(inst: RealInstance, i: int) -> Bracket:
    """Bracket of any stored real point, read from its sides when no fast path exists."""
    p = inst.registry[i]
    if p.bracket is not None:
        return p.bracket
    h = p.handle
    if h is None:
        raise ValueError(f"point {i} has neither bracket nor value")
    return lambda k: (Fraction(h), Fraction(h))


# -- Sierpinski -----------------------------------------------------------------

BOT, TOP = "bot", "top"
CARRIER = (BOT, TOP)


def sierpinski_delta(y: str, z: str) -> Fraction:
    return Fraction(0) if y == z or (y == BOT and z == TOP) else Fraction(1)


def _sier_ball(center: str, e: int, conj: bool) -> frozenset:
    d = (lambda y: sierpinski_delta(y, center)) if conj else (lambda y: sierpinski_delta(center, y))
    # delta is 0 or 1, and 1 < 2**-e only for negative e
    return frozenset(y for y in CARRIER if d(y) == 0 or e < 0)


class SetOracle:
    """Exact oracle for finite carriers with basic sets as frozensets."""

    def contains(self, basic: frozenset, point: Any) -> bool:
        if point is None:
            raise ValueError("point has no known value")
        return point in basic

    def subset(self, a, b):
        return a <= b

    def disjoint(self, a, b):
        return not (a & b)

    def intersect(self, a, b):
        return a & b


def _vs_pow2(c: int, e: int) -> int:
    """Sign of ``c - 2**e`` without building the power."""
    n = c.bit_length()
    if n != e + 1:
        return 1 if n > e + 1 else -1
    return 0 if c == 1 << e else 1


def sierpinski_q() -> QuasiMetricDescriptor:
    base = lambda a: BOT if a == 0 else TOP

    def d(a, b):
        a, b = min(a, 1), min(b, 1)
        return 0 if a == b or a == 0 else 1

    # delta is 0 or 1, so comparing with c * 2**-e only needs the sign of c - 2**e
    def lt(a, b, c, e):
        return c > 0 if d(a, b) == 0 else _vs_pow2(c, e) > 0

    def gt(a, b, c, e):
        return False if d(a, b) == 0 else _vs_pow2(c, e) < 0
    return QuasiMetricDescriptor(
        name="S", conj_name="S^c", base=base, canon=lambda a: min(a, 1),
        levels=lambda k: [0, 1], lt=decidable_relation(lt), gt=decidable_relation(gt),
        exact_delta=sierpinski_delta, ball_of=_sier_ball,
        # {top}-balls sit inside S-balls whatever the radii
        extra_incl=lambda a, b: a != 0 and b == 0)


class HaltWatch:
    """Incremental run of ``apply(p, 0)`` recording the halting tick."""

    def __init__(self, registry: Registry, p: int):
        self._proc = registry.proc(p, 0)
        self.ticks = 0
        self.halted_at: Optional[int] = None

    def advance(self, upto: int) -> Optional[int]:
        while self.halted_at is None and self.ticks < upto:
            self.ticks += 1
            try:
                next(self._proc)
            except StopIteration as stop:
                if stop.value is not None:
                    self.halted_at = self.ticks
                else:
                    # a definite "no": never halts
                    self._proc = iter(())
                    self.ticks = float("inf")
        return self.halted_at


@dataclass(eq=False)
class SierpinskiInstance:
    registry: Registry
    q: QuasiMetricDescriptor
    oracle: SetOracle
    bi: BiSpaceDescriptor
    bot: int = -1
    top: int = -1
    _watches: dict = field(default_factory=dict)
    # probe outcomes are deterministic in (program, fuel), so diagnostics share them
    _probes: dict = field(default_factory=dict)

    @property
    def tau(self):
        return self.bi.tau

    @property
    def sigma(self):
        return self.bi.sigma

    def basis_table(self, e: int = 0) -> dict:
        return {a: self.q.ball_handle(pair(a, e)) for a in (0, 1)}

    def incl_table(self, e: int = 1) -> dict:
        """``<a,e> < <a',e>`` for the four base combinations; equal radii."""
        return {(a, b): run(self.tau.strong_incl(pair(a, e), pair(b, e)), 4).confirmed
                for a in (0, 1) for b in (0, 1)}

    def halting_point(self, p: int) -> int:
        """Point equal to top iff ``apply(p, 0)`` halts; only its tau side is known."""
        return self.registry.add(QPoint(halting_enumerator(self.registry, p, self._watch(p)),
                                        None, label=f"halt({p})"), key=("halt", p))

    def _watch(self, p: int) -> HaltWatch:
        if p not in self._watches:
            self._watches[p] = HaltWatch(self.registry, p)
        return self._watches[p]


def halting_enumerator(registry: Registry, p: int, watch: HaltWatch) -> Enumerator:
    """Step ``<e,j>`` emits ``<0,e>`` for ``j = 0`` and ``<1,e>`` when ``p`` halts at tick ``j``."""
    def gen():
        for k in itertools.count():
            e, j = unpair(k)
            if j == 0:
                yield pair(0, e)
            else:
                yield pair(1, e) if watch.advance(j) == j else None

    def member(code):
        a, e = unpair(code)
        if a == 0:
            return ready(code)
        return _await_halt(watch, pair(1, e))
    return Enumerator(gen, member=member, name=f"halt[{p}]")


def _await_halt(watch: HaltWatch, code: int) -> Proc:
    j = 0
    while True:
        j += 1
        if watch.advance(j) is not None:
            return code
        yield


def make_sierpinski(registry: Optional[Registry] = None) -> SierpinskiInstance:
    registry = registry or Registry()
    q = sierpinski_q()
    bi = induced_bispace(q, registry, SetOracle())
    inst = SierpinskiInstance(registry, q, SetOracle(), bi)
    inst.bot = base_to_c(q, registry, 0)
    inst.top = base_to_c(q, registry, 1)
    return inst


__all__ = ["BOT", "TOP", "HaltWatch", "Interval", "IntervalOracle", "RealInstance",
           "SetOracle", "SierpinskiInstance", "delta_L", "delta_U", "dyadic_levels",
           "make_creal", "make_reals", "make_sierpinski", "point_bracket",
           "reals_U", "registry_bracket", "sierpinski_delta", "sierpinski_q"]
