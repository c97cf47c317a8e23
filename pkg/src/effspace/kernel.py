"""Computability substrate.

Cantor pairing, exact dyadic numbers, step-indexed enumerators, fuel-bounded
semi-decision procedures and a session-local registry of partial functions.

A *semi-decision procedure* is a generator that yields ``None`` once per
scheduler tick and finally returns its answer.  Returning ``None`` means a
definite "no" and is only done by procedures for decidable questions; every
other return value is a positive answer.  A procedure that never returns
models divergence.
"""

from __future__ import annotations

import itertools
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Generator, Iterable, Iterator, Optional, Sequence, Union

Proc = Generator[None, None, Any]


# -- pairing -----------------------------------------------------------------

def pair(a: int, b: int) -> int:
    """Cantor pairing ``(a+b)(a+b+1)/2 + b``."""
    if a < 0 or b < 0:
        raise ValueError("pair() takes naturals")
    s = a + b
    return s * (s + 1) // 2 + b


@functools.lru_cache(maxsize=1 << 18)
def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("unpair() takes a natural")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def encode_tuple(xs: Sequence[int]) -> int:
    """Left-nested tupling: ``<a1,...,an> = <<a1,...,a(n-1)>, an>``."""
    if len(xs) < 2:
        raise ValueError("tuples have length >= 2")
    code = pair(xs[0], xs[1])
    for x in xs[2:]:
        code = pair(code, x)
    return code


def decode_tuple(n: int, length: int) -> list[int]:
    if length < 2:
        raise ValueError("tuples have length >= 2")
    out = []
    for _ in range(length - 1):
        n, last = unpair(n)
        out.append(last)
    out.append(n)
    return out[::-1]


# -- dyadic numbers ----------------------------------------------------------

@dataclass(frozen=True, order=False)
class Dyadic:
    """Exact number ``mantissa * 2**exponent`` kept in normal form.

    The mantissa is odd or zero, and zero carries exponent 0, so structural
    equality is numeric equality.
    """

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        m, e = self.mantissa, self.exponent
        if m == 0:
            e = 0
        else:
            tz = (m & -m).bit_length() - 1
            m >>= tz
            e += tz
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def coerce(cls, value: "DyadicLike") -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value)
        frac = Fraction(value)
        den = frac.denominator
        if den & (den - 1):
            raise ValueError(f"{value!r} is not dyadic")
        return cls(frac.numerator, -(den.bit_length() - 1))

    @classmethod
    def pow2(cls, e: int) -> "Dyadic":
        return cls(1, e)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def _aligned(self, other: "Dyadic") -> tuple[int, int, int]:
        e = min(self.exponent, other.exponent)
        return self.mantissa << (self.exponent - e), other.mantissa << (other.exponent - e), e

    def __add__(self, other):
        other = Dyadic.coerce(other)
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __sub__(self, other):
        return self + (-Dyadic.coerce(other))

    def __rsub__(self, other):
        return Dyadic.coerce(other) - self

    def __mul__(self, other):
        other = Dyadic.coerce(other)
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def _cmp(self, other) -> int:
        other = Dyadic.coerce(other)
        a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (Dyadic, int)):
            return self._cmp(other) == 0
        if isinstance(other, Fraction):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    def __repr__(self):
        return f"Dyadic({self.to_fraction()})"

    def __str__(self):
        return str(self.to_fraction())


DyadicLike = Union[Dyadic, int, Fraction]


def dmax(a: Dyadic, b: Dyadic) -> Dyadic:
    return a if a >= b else b


def dmin(a: Dyadic, b: Dyadic) -> Dyadic:
    return a if a <= b else b


def dyadic_decode(code: int) -> Dyadic:
    """Value ``(a - b) * 2**(c - e)`` of the code ``<a,b,c,e>``."""
    a, b, c, e = decode_tuple(code, 4)
    return Dyadic(a - b, c - e)


def dyadic_encode(value: DyadicLike) -> int:
    """Canonical code of a dyadic; ``dyadic_decode(dyadic_encode(d)) == d``."""
    d = Dyadic.coerce(value)
    a, b = (d.mantissa, 0) if d.mantissa >= 0 else (0, -d.mantissa)
    c, e = (d.exponent, 0) if d.exponent >= 0 else (0, -d.exponent)
    return encode_tuple([a, b, c, e])


# -- outcomes ----------------------------------------------------------------

@dataclass(frozen=True)
class Confirmed:
    witness: Any
    steps: int

    confirmed = True


@dataclass(frozen=True)
class Exhausted:
    steps: int

    confirmed = False


Outcome = Union[Confirmed, Exhausted]


def run(proc: Proc, fuel: int) -> Outcome:
    """Drive a semi-decision procedure for at most ``fuel`` ticks."""
    ticks = 0
    while ticks < fuel:
        ticks += 1
        try:
            next(proc)
        except StopIteration as stop:
            if stop.value is None:
                return Exhausted(ticks)
            return Confirmed(stop.value, ticks)
    proc.close()
    return Exhausted(ticks)


def diverge() -> Proc:
    while True:
        yield


def ready(value: Any) -> Proc:
    """A procedure answering after exactly one tick."""
    yield
    return value


def proc_all(*procs: Proc) -> Proc:
    """Conjunction, run in lockstep; answers with the last result."""
    if len(procs) == 2:
        return _all2(*procs)
    return _all(procs)


def _all2(p: Proc, q: Proc) -> Proc:
    # the common binary case of _all without the bookkeeping
    p_done = q_done = False
    while True:
        if not p_done:
            try:
                next(p)
            except StopIteration as stop:
                if stop.value is None:
                    return None
                p_done = True
        if not q_done:
            try:
                next(q)
            except StopIteration as stop:
                if stop.value is None:
                    return None
                q_done, result = True, stop.value
        yield
        if p_done and q_done:
            return result


def _all(procs) -> Proc:
    active = list(enumerate(procs))
    results: dict[int, Any] = {}
    while active:
        still = []
        for idx, p in active:
            try:
                next(p)
            except StopIteration as stop:
                if stop.value is None:
                    return None
                results[idx] = stop.value
                continue
            still.append((idx, p))
        active = still
        yield
    return results[len(procs) - 1]


# -- enumerators -------------------------------------------------------------

class Enumerator:
    """Deterministic step-indexed producer of naturals.

    ``step(k)`` is the value produced at step ``k`` or ``None``.  The
    underlying iterator is consumed lazily and memoised, so repeated calls
    agree.  ``member`` optionally supplies a faster semi-decision procedure
    for the same set; it must agree with scanning.
    """

    def __init__(self, factory: Callable[[], Iterable[Optional[int]]],
                 member: Optional[Callable[[int], Proc]] = None,
                 decidable: bool = False, name: str = ""):
        self._factory = factory
        self._iter: Optional[Iterator[Optional[int]]] = None
        self._cache: list[Optional[int]] = []
        self._done = False
        self._member = member
        self.decidable = decidable and member is not None
        self.name = name

    def __repr__(self):
        return f"Enumerator({self.name or '?'})"

    def step(self, k: int) -> Optional[int]:
        cache = self._cache
        if k < len(cache):
            return cache[k]
        while len(self._cache) <= k and not self._done:
            if self._iter is None:
                self._iter = iter(self._factory())
            try:
                self._cache.append(next(self._iter))
            except StopIteration:
                self._done = True
        return self._cache[k] if k < len(self._cache) else None

    def known(self) -> int:
        """Number of steps computed so far."""
        return len(self._cache)

    def values(self, upto: int) -> list[int]:
        return [v for v in (self.step(k) for k in range(upto)) if v is not None]

    def scan(self, x: int) -> Proc:
        """Semi-decide ``x`` by plain enumeration."""
        k = 0
        while True:
            if self.step(k) == x:
                return x
            if self._done and k >= len(self._cache):
                # finite enumeration: stays silent forever
                yield from diverge()
            k += 1
            yield

    def member(self, x: int) -> Proc:
        if self._member is not None:
            return self._member(x)
        return self.scan(x)

    def contains(self, x: int, fuel: int) -> Outcome:
        return run(self.member(x), fuel)

    # combinators

    @classmethod
    def empty(cls) -> "Enumerator":
        return cls(lambda: itertools.repeat(None), member=lambda x: diverge(), name="empty")

    @classmethod
    def naturals(cls) -> "Enumerator":
        return cls(lambda: itertools.count(), member=lambda x: ready(x), decidable=True,
                   name="naturals")

    @classmethod
    def of(cls, values: Iterable[int]) -> "Enumerator":
        vals = list(values)
        return cls(lambda: iter(vals), member=lambda x: ready(x) if x in vals else _no(),
                   decidable=True, name=f"of{vals[:4]}")

    @classmethod
    def from_function(cls, f: Callable[[int], Optional[int]], **kw) -> "Enumerator":
        return cls(lambda: (f(k) for k in itertools.count()), **kw)

    def filter(self, pred: Callable[[int], bool]) -> "Enumerator":
        src = self

        def gen():
            for k in itertools.count():
                v = src.step(k)
                yield v if v is not None and pred(v) else None
        return Enumerator(gen, name=f"filter({self.name})")

    def compact(self) -> "Enumerator":
        """View of the same set that skips already computed empty steps.

        Fresh steps still cost a tick each, so fuel accounting stays honest.
        """
        src = self

        def gen():
            k = 0
            while True:
                fresh = k >= len(src._cache)
                v = src.step(k)
                k += 1
                if v is not None:
                    yield v
                elif fresh:
                    if src._done:
                        yield from itertools.repeat(None)
                    yield None
        return Enumerator(gen, member=self._member, decidable=self.decidable,
                          name=f"compact({self.name})")

    def map(self, f: Callable[[int], int]) -> "Enumerator":
        src = self

        def gen():
            for k in itertools.count():
                v = src.step(k)
                yield None if v is None else f(v)
        return Enumerator(gen, name=f"map({self.name})")


def _no() -> Proc:
    yield
    return None


def interleave(*sources: Enumerator) -> Enumerator:
    """Union of finitely many enumerators, round robin."""
    def gen():
        for k in itertools.count():
            yield sources[k % len(sources)].step(k // len(sources))
    return Enumerator(gen, name="union")


# -- dovetailing -------------------------------------------------------------

Family = Union[Sequence[Enumerator], Callable[[int], Enumerator]]


def schedule(family: Family, tick: int) -> tuple[int, int]:
    """The fixed fair schedule: tick -> (task, step).

    Finite families are visited round robin; infinite families (given as a
    function of the task id) along Cantor diagonals.
    """
    if callable(family):
        return unpair(tick)
    n = len(family)
    return tick % n, tick // n


def dovetail(family: Family, accept: Callable[[int, int], bool], fuel: int) -> Outcome:
    """First ``(task, value)`` accepted under the fixed schedule.

    The witness is ``pair(task, value)``.
    """
    if not callable(family) and len(family) == 0:
        return Exhausted(0)
    get = family if callable(family) else family.__getitem__
    for tick in range(fuel):
        task, k = schedule(family, tick)
        v = get(task).step(k)
        if v is not None and accept(task, v):
            return Confirmed(pair(task, v), tick + 1)
    return Exhausted(fuel)


def _admit(live: int, rnd: int) -> bool:
    # a new candidate per round while few tests are pending; once many are
    # pending, hold their number near 2*sqrt(rounds) so that slow tests
    # do not pay for every later admission
    return live < 8 or live * live <= 4 * rnd


def race(candidates: Enumerator, test: Callable[[int], Proc]) -> Iterator[Optional[tuple[int, Any]]]:
    """Fair interleaving of one test procedure per enumerated candidate.

    Each round advances every live procedure one tick and, unless many
    procedures are pending, the candidate enumerator one step.  Yields ``None`` per tick and ``(candidate, answer)``
    whenever a procedure answers positively.
    """
    live: list[tuple[int, Proc]] = []
    k = 0
    for rnd in itertools.count():
        if _admit(len(live), rnd):
            v = candidates.step(k)
            k += 1
            if v is not None:
                live.append((v, test(v)))
        yield None
        still = []
        for cand, proc in live:
            try:
                next(proc)
            except StopIteration as stop:
                if stop.value is not None:
                    yield (cand, stop.value)
                else:
                    yield None
                continue
            still.append((cand, proc))
            yield None
        live = still


def _first(candidates: Enumerator, test: Callable[[int], Proc], want_answer: bool) -> Proc:
    # the loop of race(), inlined: search sits on every hot path
    live: list[tuple[int, Proc]] = []
    k = 0
    for rnd in itertools.count():
        if _admit(len(live), rnd):
            v = candidates.step(k)
            k += 1
            if v is not None:
                live.append((v, test(v)))
        yield
        j = 0
        while j < len(live):
            cand, proc = live[j]
            try:
                next(proc)
            except StopIteration as stop:
                if stop.value is not None:
                    return stop.value if want_answer else cand
                del live[j]
                yield
                continue
            j += 1
            yield


def search(candidates: Enumerator, test: Callable[[int], Proc]) -> Proc:
    """Procedure returning the first candidate whose test answers."""
    return _first(candidates, test, False)


def search_value(candidates: Enumerator, test: Callable[[int], Proc]) -> Proc:
    """Like :func:`search` but returns the test's answer."""
    return _first(candidates, test, True)


def harvest(candidates: Enumerator, test: Callable[[int], Proc]) -> Enumerator:
    """Enumerator of every positive answer produced by :func:`race`."""
    def gen():
        for hit in race(candidates, test):
            yield None if hit is None else hit[1]
    return Enumerator(gen, name="harvest")


def fuel_ladder(start: int, cap: int) -> list[int]:
    rungs = []
    f = max(1, start)
    while f < cap:
        rungs.append(f)
        f *= 2
    rungs.append(cap)
    return rungs


# -- registry ----------------------------------------------------------------

class UnknownCodeError(KeyError):
    pass


Partial = Callable[[int], Any]


class Registry:
    """Append-only session table of partial functions and c.e. programs.

    ``functions`` hold partial index transformers: a callable returning an
    int (one tick) or a generator yielding once per tick and returning the
    value.  ``programs`` hold enumerated objects (points, sets) indexed like
    the domains ``W_i``.  Both tables support memoisation keys so that the
    same construction always receives the same code.
    """

    def __init__(self):
        self.functions: list[Partial] = []
        self.programs: list[Any] = []
        self._fkeys: dict[Any, int] = {}
        self._pkeys: dict[Any, int] = {}

    # functions

    def register(self, f: Partial, key: Any = None) -> int:
        if key is not None and key in self._fkeys:
            return self._fkeys[key]
        self.functions.append(f)
        code = len(self.functions) - 1
        if key is not None:
            self._fkeys[key] = code
        return code

    def proc(self, code: int, arg: int) -> Proc:
        if not 0 <= code < len(self.functions):
            raise UnknownCodeError(code)
        out = self.functions[code](arg)
        if isinstance(out, Generator):
            return (yield from _count_tick(out))
        yield
        return out

    def apply(self, code: int, arg: int, fuel: int) -> Outcome:
        if not 0 <= code < len(self.functions):
            raise UnknownCodeError(code)
        return run(self.proc(code, arg), fuel)

    def specialize(self, code: int, fixed: int) -> int:
        if not 0 <= code < len(self.functions):
            raise UnknownCodeError(code)
        return self.register(lambda a: self.proc(code, pair(fixed, a)), key=("smn", code, fixed))

    def compose(self, outer: int, inner: int) -> int:
        def composed(a):
            mid = yield from self.proc(inner, a)
            return (yield from self.proc(outer, mid))
        return self.register(composed, key=("compose", outer, inner))

    # programs

    def add(self, obj: Any, key: Any = None) -> int:
        if key is not None and key in self._pkeys:
            return self._pkeys[key]
        self.programs.append(obj)
        idx = len(self.programs) - 1
        if key is not None:
            self._pkeys[key] = idx
        return idx

    def __getitem__(self, idx: int) -> Any:
        if not 0 <= idx < len(self.programs):
            raise UnknownCodeError(idx)
        return self.programs[idx]

    def __len__(self):
        return len(self.programs)


def _count_tick(gen: Generator) -> Proc:
    """Re-yield a user generator; its return costs one more tick."""
    result = yield from gen
    yield
    return result
