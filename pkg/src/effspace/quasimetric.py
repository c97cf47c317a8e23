"""Computable quasi-metric spaces.

Ball codes are ``<a, e>`` for ``ball(beta_a, 2**-e)``.  Points are stored in
the registry as :class:`QPoint` objects carrying the two membership
enumerators of the computable-point numbering: the *left* set
``{<a,e> : delta(beta_a, y) < 2**-e}`` and the *right* set
``{<b,e> : delta(y, beta_b) < 2**-e}``.  Together they present the triple set
``{<a,b,e>}``; a point with only a left set is weakly computable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from .kernel import (Enumerator, Outcome, Proc, Registry, encode_tuple, harvest, pair,
                     proc_all, ready, run, search, unpair)
from .numbering import LacombeSet, Numbering
from .space import BiSpaceDescriptor, NotComputable, SpaceDescriptor


@dataclass(frozen=True)
class Relation:
    """A c.e. relation on naturals given by a semi-decision procedure."""

    proc: Callable[..., Proc]
    decidable: bool = False

    def __call__(self, *args: int) -> Proc:
        return self.proc(*args)

    def holds(self, *args: int, fuel: int) -> Outcome:
        return run(self.proc(*args), fuel)


def decidable_relation(pred: Callable[..., bool]) -> Relation:
    def proc(*args):
        yield
        return True if pred(*args) else None
    return Relation(proc, decidable=True)


@dataclass(eq=False)
class QuasiMetricDescriptor:
    """Dense base, its numbering and the c.e. distance comparisons.

    ``lt(a, b, c, e)`` semi-decides ``delta(beta_a, beta_b) < c * 2**-e``,
    ``gt`` the strict reverse comparison.  ``levels(k)`` lists canonical base
    codes of complexity at most ``k``; the lists are nested and exhaust the
    base, which fixes the enumeration order of every search below.
    ``conj`` tells which side of stored points this descriptor reads.
    """

    name: str
    base: Callable[[int], Any]
    canon: Callable[[int], int]
    levels: Callable[[int], Sequence[int]]
    lt: Relation
    gt: Optional[Relation] = None
    exact_delta: Optional[Callable[[Any, Any], Fraction]] = None
    ball_of: Optional[Callable[[Any, int, bool], Any]] = None  # (centre, radius exponent, conj)
    conj: bool = False
    conj_name: str = ""
    # extra decidable strong inclusions <a,e> < <a',e'> given on base codes (a, a');
    # they must imply ball inclusion and keep the relation transitive.  Only the
    # unconjugated side reads them.
    extra_incl: Optional[Callable[[int, int], bool]] = None

    def __post_init__(self):
        self.conj_name = self.conj_name or self.name + "^c"

    @property
    def family(self) -> str:
        """Name shared by a descriptor and its conjugate."""
        return self.conj_name if self.conj else self.name

    def ball_handle(self, code: int) -> Any:
        a, e = unpair(code)
        return self.ball_of(self.base(a), e, self.conj)

    def delta(self, x: Any, y: Any) -> Fraction:
        return self.exact_delta(y, x) if self.conj else self.exact_delta(x, y)


def conjugate(q: QuasiMetricDescriptor) -> QuasiMetricDescriptor:
    """``delta^c(x, y) = delta(y, x)``; an involution."""
    swap = lambda r: None if r is None else Relation(lambda a, b, c, e: r(b, a, c, e), r.decidable)
    return replace(q, name=q.conj_name, conj_name=q.name, lt=swap(q.lt), gt=swap(q.gt),
                   conj=not q.conj)


def sym_lt(q: QuasiMetricDescriptor, a: int, b: int, c: int, e: int, fuel: int) -> Outcome:
    """``max(delta, delta^c)(beta_a, beta_b) < c * 2**-e``."""
    return run(proc_all(q.lt(a, b, c, e), q.lt(b, a, c, e)), fuel)


# -- ball grid ------------------------------------------------------------------

_GRIDS: dict = {}


def ball_grid(q: QuasiMetricDescriptor) -> Enumerator:
    """Every canonical ball code once, by complexity: a centre first listed
    at base level ``j`` with radius ``2**-e`` comes at stage ``j + e``.

    The enumerator is shared by all descriptors with the same base levels.
    """
    key = (q.family, q.levels)
    if key not in _GRIDS:
        _GRIDS[key] = _make_grid(q)
    return _GRIDS[key]


def _make_grid(q: QuasiMetricDescriptor) -> Enumerator:
    def gen():
        fresh: list[tuple[int, list[int]]] = []  # nonempty levels only
        seen: set[int] = set()
        for k in itertools.count():
            new = [a for a in q.levels(k) if a not in seen]
            seen.update(new)
            if new:
                fresh.append((k, new))
            # complexity k: centre level j plus radius exponent k - j
            for j, level in fresh:
                for a in level:
                    yield pair(a, k - j)
    return Enumerator(gen, name=f"grid[{q.name}]")


def grid_filter(q: QuasiMetricDescriptor, test: Callable[[int, int], Proc], name: str,
                decidable: bool) -> Enumerator:
    """Ball codes ``<a,e>`` of the grid whose test answers, in grid order."""
    grid = ball_grid(q)

    def gen():
        for k in itertools.count():
            code = grid.step(k)
            a, e = unpair(code)
            ans = yield from test(a, e)
            if ans is not None:
                yield code

    def member(code):
        a, e = unpair(code)
        code = pair(q.canon(a), e)
        ans = yield from test(*unpair(code))
        return None if ans is None else code
    return Enumerator(gen, member=member, decidable=decidable, name=name)


# -- points ---------------------------------------------------------------------

@dataclass(eq=False)
class QPoint:
    left: Optional[Enumerator]
    right: Optional[Enumerator] = None
    handle: Any = None
    label: str = ""
    bracket: Optional[Callable[[int], tuple]] = field(default=None, repr=False)

    def side(self, conj: bool) -> Enumerator:
        enum = self.right if conj else self.left
        if enum is None:
            raise NotComputable(f"{self.label or 'point'} has no {'right' if conj else 'left'} set")
        return enum

    @property
    def computable(self) -> bool:
        return self.left is not None and self.right is not None

    def triples(self) -> Enumerator:
        """``<a,b,e>`` for left ``<a,e>`` and right ``<b,e>`` with the same radius."""
        if not self.computable:
            raise NotComputable(self.label)
        left, right = self.left, self.right

        def gen():
            ls, rs, queue = {}, {}, []
            for k in itertools.count():
                x, y = left.step(k), right.step(k)
                if x is not None:
                    a, e = unpair(x)
                    ls.setdefault(e, []).append(a)
                    queue.extend(encode_tuple([a, b, e]) for b in rs.get(e, ()))
                if y is not None:
                    b, e = unpair(y)
                    rs.setdefault(e, []).append(b)
                    queue.extend(encode_tuple([a, b, e]) for a in ls.get(e, ()))
                yield queue.pop(0) if queue else None
        return Enumerator(gen, name=f"triples[{self.label}]")


def oriented(q: QuasiMetricDescriptor, left: Enumerator, right: Optional[Enumerator],
             **kw) -> QPoint:
    """Store a point built relative to ``q`` in the primary orientation."""
    if q.conj:
        left, right = right, left
    return QPoint(left, right, **kw)


def point_numbering(registry: Registry, q: QuasiMetricDescriptor, computable: bool) -> Numbering:
    def lookup(i):
        if not 0 <= i < len(registry):
            return None
        p = registry[i]
        if not isinstance(p, QPoint):
            return None
        if computable and not p.computable:
            return None
        if (p.right if q.conj else p.left) is None:
            return None
        return p.handle
    return Numbering(f"x^{'c' if computable else 'wc'}[{q.name}]", lookup)


def ball_member(q: QuasiMetricDescriptor, p: QPoint, code: int, fuel: int) -> Outcome:
    """``y in ball(beta_a, 2**-e)`` iff ``<a,e>`` is in the point's set."""
    a, e = unpair(code)
    return p.side(q.conj).contains(pair(q.canon(a), e), fuel)


def base_point(q: QuasiMetricDescriptor, b: int) -> QPoint:
    """The computable point ``beta_b`` enumerated from ``lt``."""
    b = q.canon(b)
    left = grid_filter(q, lambda a, e: q.lt(a, b, 1, e), f"left[{b}]", q.lt.decidable)
    right = grid_filter(q, lambda a, e: q.lt(b, a, 1, e), f"right[{b}]", q.lt.decidable)
    return oriented(q, left, right, handle=q.base(b), label=f"beta_{b}")


def base_to_c(q: QuasiMetricDescriptor, registry: Registry, b: int) -> int:
    """Index of ``beta_b`` in the computable-point numbering."""
    b = q.canon(b)
    key = ("base", q.family, b)
    if key in registry._pkeys:
        return registry._pkeys[key]
    return registry.add(base_point(q, b), key=key)


def c_to_wc(registry: Registry, i: int) -> int:
    """``{<a,e> : exists b <a,b,e> in W_i}`` as a new weakly computable point."""
    p = registry[i]
    if p.left is None:
        raise NotComputable(p.label)
    triples = p.triples()

    def proj(v):
        rest, e = unpair(v)
        a, _ = unpair(rest)
        return pair(a, e)

    def gen():
        seen = set()
        for k in itertools.count():
            v = triples.step(k)
            if v is None:
                yield None
                continue
            w = proj(v)
            if w in seen:
                yield None
            else:
                seen.add(w)
                yield w
    left = Enumerator(gen, name=f"wc[{p.label}]")
    return registry.add(QPoint(left, None, handle=p.handle, label=f"wc({p.label})"), key=("wc", i))


# -- induced spaces ---------------------------------------------------------------

def strong_incl(q: QuasiMetricDescriptor) -> Callable[[int, int], Proc]:
    """``<i,m> < <j,n>`` iff ``delta(beta_j, beta_i) + 2**-m < 2**-n``.

    Certified by one exact ``lt`` query with bound ``(2**(m-n) - 1) * 2**-m``.
    """
    extra = q.extra_incl if not q.conj else None

    def proc(c1, c2):
        i, m = unpair(c1)
        j, n = unpair(c2)
        if extra is not None and extra(i, j):
            return ready(True)
        if m <= n:
            return _no()
        return q.lt(j, i, 2 ** (m - n) - 1, m)
    return proc


def _no():
    yield
    return None


def induced_space(q: QuasiMetricDescriptor, registry: Registry, oracle=None) -> SpaceDescriptor:
    """Space of ``tau_delta`` with basis ``B_<a,e> = ball(beta_a, 2**-e)``."""
    def section(i):
        p = registry[i]
        if not isinstance(p, QPoint):
            raise NotComputable(f"index {i} is not a point")
        return p.side(q.conj)

    def canon(code):
        a, e = unpair(code)
        return pair(q.canon(a), e)

    space = SpaceDescriptor(
        name=q.name, registry=registry, basis=q.ball_handle, strong_incl=strong_incl(q),
        section=section, candidates=lambda: ball_grid(q),
        points=point_numbering(registry, q, computable=False), canon=canon,
        incl_decidable=q.lt.decidable, oracle=oracle, rank=lambda code: unpair(code)[1])
    space.pt = registry.register(lambda a: limit_pass_wc(q, registry, a), key=("pt", q.name))
    space.quasi = q
    return space


def induced_bispace(q: QuasiMetricDescriptor, registry: Registry, oracle=None) -> BiSpaceDescriptor:
    tau = induced_space(q, registry, oracle)
    sigma = induced_space(conjugate(q), registry, oracle)
    tau.points = point_numbering(registry, q, computable=True)
    sigma.points = point_numbering(registry, conjugate(q), computable=True)
    bi_pt = registry.register(
        lambda c: bi_limit_pass_c(q, registry, *unpair(c)), key=("bi_pt_c", q.family, q.conj))
    return BiSpaceDescriptor(tau, sigma, bi_pt)


# -- limit passing ----------------------------------------------------------------

def _refined_by(q: QuasiMetricDescriptor, registry: Registry, f: int, name: str) -> Enumerator:
    """``{<b,e> : exists n  f(n) < <b,e>}`` over the ball grid.

    Every grid code gets its own procedure walking ``f`` and the procedures
    are raced fairly.
    """
    incl = strong_incl(q)

    def test(code):
        for n in itertools.count():
            cur = yield from registry.proc(f, n)
            ans = yield from incl(cur, code)
            if ans is not None:
                return code

    def member(code):
        a, e = unpair(code)
        return test(pair(q.canon(a), e))

    found = harvest(ball_grid(q), test)
    return Enumerator(lambda: (found.step(k) for k in itertools.count()), member=member,
                      name=name)


def limit_pass_wc(q: QuasiMetricDescriptor, registry: Registry, f: int) -> int:
    """Weakly computable limit of the normed enumeration with code ``f``."""
    side = _refined_by(q, registry, f, f"lim[{f}]")
    p = QPoint(None, side, label=f"lim^c({f})") if q.conj else QPoint(side, None, label=f"lim({f})")
    return registry.add(p, key=("lim", q.name, f))


def bi_limit_pass_c(q: QuasiMetricDescriptor, registry: Registry, f1: int, f2: int) -> int:
    """Computable limit of normed enumerations in ``tau_delta`` and ``tau_delta^c``."""
    left = _refined_by(q, registry, f1, f"lim[{f1}]")
    right = _refined_by(conjugate(q), registry, f2, f"lim^c[{f2}]")
    return registry.add(oriented(q, left, right, label=f"lim({f1},{f2})"),
                        key=("bilim", q.name, f1, f2))


# -- effective regularity -----------------------------------------------------------

def regularity_s(space: SpaceDescriptor, i: int, m: int) -> Proc:
    """First ``<b,n>`` in ``x_i``'s neighbourhoods with ``<b,n> < m``."""
    return search(space.section(i), lambda b: space.strong_incl(b, m))


def margin_bound(n_s: int, c: int) -> tuple[int, int]:
    """``2**-(c-1) + 2**-n_s`` as ``(C, E)`` with value ``C * 2**-E``."""
    E = max(n_s, c - 1, 0)
    return 2 ** (E + 1 - c) + 2 ** (E - n_s), E


def regularity_t(q: QuasiMetricDescriptor, s_result: int) -> LacombeSet:
    """Cover of the complement by conjugate balls ``<v,c>``.

    Emits ``<v,c>`` when ``gt`` certifies
    ``delta(beta_u, beta_v) > 2**-(c-1) + 2**-n`` for the refined ball
    ``<u,n> = s_result``; every such ball misses ``ball(beta_u, 2**-n)``.
    """
    if q.gt is None:
        raise ValueError(f"{q.name} is only lower computable")
    u, n_s = unpair(s_result)

    def test(v, c):
        C, E = margin_bound(n_s, c)
        return q.gt(u, v, C, E)
    return LacombeSet(grid_filter(q, test, f"t[{s_result}]", q.gt.decidable))


@dataclass(eq=False)
class RegularityWitness:
    """The pair ``(s, t)`` for ``tau_delta`` relative to ``tau_delta^c``."""

    q: QuasiMetricDescriptor
    space: SpaceDescriptor
    s_fuel: int = 10**6
    _s_cache: dict = field(default_factory=dict)

    def s(self, i: int, m: int) -> Proc:
        if (i, m) in self._s_cache:
            return ready(self._s_cache[(i, m)])
        return self._s_run(i, m)

    def _s_run(self, i, m):
        ans = yield from regularity_s(self.space, i, m)
        self._s_cache[(i, m)] = ans
        return ans

    def t(self, i: int, m: int) -> LacombeSet:
        if (i, m) not in self._s_cache:
            out = run(self._s_run(i, m), self.s_fuel)
            if not out.confirmed:
                raise RuntimeError(f"s({i},{m}) not found within {self.s_fuel}")
        return regularity_t(self.q, self._s_cache[(i, m)])


def refine_toward(q: QuasiMetricDescriptor, space: SpaceDescriptor, i: int, m: int,
                  fuel: int) -> Outcome:
    """Ball ``<u,e>`` around ``x_i`` with ``beta_u`` close from both sides and ``<u,e> < m``."""
    p = space.registry[i]
    left, right = p.side(q.conj), p.side(not q.conj)
    incl = strong_incl(q)

    def test(code):
        u, e = unpair(code)
        return proc_all(right.member(pair(u, e)), incl(code, m))
    return run(search(left, test), fuel)
