"""Effective operators and effective continuity.

Operators act on point indices through a registered index transformer.
Continuity witnesses are registered codes as well: ``h(<i,n>)`` is a basic
neighbourhood of ``x_i`` mapped into ``B'_n``, ``g(n)`` names a Lacombe set
for ``F^-1[B'_n]``, and ``(s, r)`` is a witness for non-inclusion.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from .instances import BOT, Interval, RealInstance, SierpinskiInstance, point_bracket
from .kernel import (Enumerator, Outcome, Proc, Registry, decode_tuple,
                     diverge, encode_tuple, fuel_ladder, harvest, pair, proc_all, run, search,
                     search_value, unpair)
from .numbering import CEnumerableSet, LacombeSet, lacombe_proc
from .quasimetric import QPoint, RegularityWitness, base_to_c
from .space import (BiSpaceDescriptor, CheckRecord, NotComputable, SpaceDescriptor,
                    normed_from_section, show_open, specialization_refute)

log = logging.getLogger(__name__)


@dataclass(eq=False)
class EffectiveOperator:
    """``F(x_i) = x'_{f(i)}`` with ``f`` a registered code."""

    name: str
    f: int
    domain: BiSpaceDescriptor
    codomain: BiSpaceDescriptor
    point_map: Optional[Callable[[Any], Any]] = None
    interval_ext: Optional[Callable[[Any], Any]] = None
    accepts: Callable[[int], bool] = field(default=lambda j: True, repr=False)

    @property
    def registry(self) -> Registry:
        return self.domain.tau.registry

    def spaces(self, side: str = "tau") -> tuple[SpaceDescriptor, SpaceDescriptor]:
        if side == "tau":
            return self.domain.tau, self.codomain.tau
        return self.domain.sigma, self.codomain.sigma

    def image_proc(self, i: int) -> Proc:
        return self.registry.proc(self.f, i)


def apply_operator(F: EffectiveOperator, i: int, fuel: int) -> Outcome:
    return F.registry.apply(F.f, i, fuel)


# -- demo operators on the reals -----------------------------------------------------

def _image_increasing(fn: Callable[[Fraction], Fraction]) -> Callable[[Interval], Interval]:
    def image(I: Interval) -> Interval:
        return Interval(None if I.lo is None else fn(I.lo), None if I.hi is None else fn(I.hi),
                        I.lo_closed, I.hi_closed)
    return image


def _image_max0(I: Interval) -> Interval:
    if I.empty:
        return I
    zero = Fraction(0)
    has_nonpos = I.lo is None or I.lo < 0 or (I.lo == 0 and I.lo_closed)
    has_pos = I.hi is None or I.hi > 0
    if not has_pos:
        return Interval(zero, zero, True, True)
    if not has_nonpos:
        return I
    return Interval(zero, I.hi, True, I.hi_closed)


_DEMOS: dict[str, tuple[Callable, Callable]] = {
    "identity": (lambda c: (lambda x: x), lambda c: _image_increasing(lambda x: x)),
    "add_const": (lambda c: (lambda x: x + c), lambda c: _image_increasing(lambda x: x + c)),
    "scale2": (lambda c: (lambda x: 2 * x), lambda c: _image_increasing(lambda x: 2 * x)),
    "max0": (lambda c: (lambda x: max(x, Fraction(0))), lambda c: _image_max0),
}

DEMO_OPERATORS = tuple(_DEMOS)


def real_operator(inst: RealInstance, name: str, c: Fraction = Fraction(1)) -> EffectiveOperator:
    """One of the monotone demo operators acting on brackets."""
    if name not in _DEMOS:
        raise ValueError(f"unknown operator {name!r}; expected one of {DEMO_OPERATORS}")
    fn = _DEMOS[name][0](Fraction(c))
    image = _DEMOS[name][1](Fraction(c))
    reg = inst.registry
    tag = name if name != "add_const" else f"add_const({c})"

    if name == "identity":
        f = reg.register(lambda i: i, key=("op", "identity"))
    else:
        def f_impl(i):
            br = point_bracket(inst, i)
            h = reg[i].handle
            return inst.creal(lambda k: tuple(map(fn, br(k))),
                              handle=None if h is None else fn(Fraction(h)),
                              label=f"{tag}({reg[i].label})", key=("op", tag, i))
        f = reg.register(f_impl, key=("op", tag))

    def accepts(j):
        if not 0 <= j < len(reg):
            return False
        p = reg[j]
        return isinstance(p, QPoint) and p.computable and (p.bracket is not None or
                                                           p.handle is not None)
    return EffectiveOperator(tag, f, inst.bi, inst.bi, fn, image, accepts)


def dense_selector(inst: RealInstance | SierpinskiInstance) -> int:
    """Registered ``k`` with ``{x_k(a)}`` the dense base, in level order."""
    q, reg = inst.q, inst.registry

    def nth(a):
        lev = 0
        while len(q.levels(lev)) <= a:
            lev += 1
        return q.levels(lev)[a]
    return reg.register(lambda a: base_to_c(q, reg, nth(a)), key=("k", q.family))


# -- witness for non-inclusion -------------------------------------------------------

@dataclass(eq=False)
class NonInclusionWitness:
    F: EffectiveOperator
    s: int
    r: int
    regularity: RegularityWitness
    ladder: tuple[int, int] = (64, 10**6)

    def run_r(self, i: int, n: int, m: int, cap: Optional[int] = None) -> tuple[Outcome, Optional[int]]:
        """Run ``r(i, n, m)`` up to the ladder cap; report the first rung that suffices."""
        start, top = self.ladder
        top = cap if cap is not None else top
        out = self.F.registry.apply(self.r, encode_tuple([i, n, m]), top)
        if not out.confirmed:
            return out, None
        rung = next(f for f in fuel_ladder(start, top) if f >= out.steps)
        return out, rung

    def M(self, i: int, m: int, fuel: int) -> Outcome:
        """Index of the completely enumerable set ``M_{s(i,m)}``."""
        return self.F.registry.apply(self.s, pair(i, m), fuel)


def _wait_point(F: EffectiveOperator, j: int) -> Proc:
    while not F.accepts(j):
        if j < len(F.registry):
            yield from diverge()
        yield
    return j


def build_noninclusion_witness(F: EffectiveOperator, regularity: RegularityWitness, k: int,
                               ladder: tuple[int, int] = (64, 10**6)) -> NonInclusionWitness:
    """Register ``s`` and ``r`` for ``F`` from the codomain's regularity witness.

    ``s(i,m)`` indexes ``{j : F(x_j) in B'_{s'(f(i),m)}}``; ``r(i,n,m)`` is the
    first dense point of ``B_n`` whose image lies in the cover ``t'(f(i),m)``.
    """
    reg = F.registry
    dom, cod = F.domain.tau, F.codomain
    reg_s = regularity

    def preimage_set(sp):
        def test(j):
            yield from _wait_point(F, j)
            fj = yield from reg.proc(F.f, j)
            ans = yield from cod.tau.member_proc(fj, sp)
            return None if ans is None else j
        return _with_member(harvest(Enumerator.naturals(), test), test, f"M[{sp}]")

    def s(code):
        i, m = unpair(code)
        fi = yield from reg.proc(F.f, i)
        sp = yield from reg_s.s(fi, m)
        return reg.add(CEnumerableSet(preimage_set(sp)), key=("M", F.f, sp))

    def r(code):
        i, n, m = decode_tuple(code, 3)
        fi = yield from reg.proc(F.f, i)
        yield from reg_s.s(fi, m)
        T = reg_s.t(fi, m)

        def cover(pa):
            fpa = yield from reg.proc(F.f, pa)
            return (yield from lacombe_proc(cod.sigma, T, fpa))

        def test(a):
            pa = yield from reg.proc(k, a)
            ans = yield from proc_all(dom.member_proc(pa, n), cover(pa))
            return None if ans is None else pa
        return (yield from search_value(Enumerator.naturals(), test))

    s_code = reg.register(s, key=("wit_s", F.f, id(regularity)))
    r_code = reg.register(r, key=("wit_r", F.f, id(regularity), k))
    return NonInclusionWitness(F, s_code, r_code, regularity, ladder)


def _distinct(enum: Enumerator) -> Enumerator:
    def gen():
        seen = set()
        for k in itertools.count():
            v = enum.step(k)
            if v is None or v in seen:
                yield None
            else:
                seen.add(v)
                yield v
    return Enumerator(gen, name=enum.name)


def _with_member(enum: Enumerator, member: Callable[[int], Proc], name: str) -> Enumerator:
    return Enumerator(lambda: (enum.step(k) for k in itertools.count()), member=member, name=name)


# -- conversions --------------------------------------------------------------------

def pointwise_from_continuous(F: EffectiveOperator, g: int, side: str = "tau") -> int:
    """``h(<i,n>)``: a neighbourhood code of ``x_i`` listed in ``W_{g(n)}``."""
    reg = F.registry
    dom, _ = F.spaces(side)

    def h(code):
        i, n = unpair(code)
        idx = yield from reg.proc(g, n)
        return (yield from lacombe_proc(dom, reg[idx], i))
    return reg.register(h, key=("h_from_g", g, side))


def continuous_from_pointwise(F: EffectiveOperator, h: int, k: int, side: str = "tau") -> int:
    """``W_{g(n)} = {h(k(a), n) : F(x_k(a)) in B'_n}`` as a registered ``g``."""
    reg = F.registry
    _, cod = F.spaces(side)

    def lacombe(n):
        def test(a):
            pa = yield from reg.proc(k, a)
            fa = yield from reg.proc(F.f, pa)
            ans = yield from cod.member_proc(fa, n)
            if ans is None:
                return None
            return (yield from reg.proc(h, pair(pa, n)))
        return LacombeSet(_distinct(harvest(Enumerator.naturals(), test)))

    return reg.register(lambda n: reg.add(lacombe(n), key=("g", h, k, side, n)),
                        key=("g_from_h", h, k, side))


def virtual_section(F: EffectiveOperator, g: int, i: int, side: str = "tau") -> Enumerator:
    """Codomain codes ``n`` with ``x_i`` in the Lacombe preimage ``L_{g(n)}``."""
    reg = F.registry
    dom, cod = F.spaces(side)

    def test(n):
        idx = yield from reg.proc(g, n)
        ans = yield from lacombe_proc(dom, reg[idx], i)
        return None if ans is None else n
    return harvest(cod.candidates(), test)


def operator_from_continuous(F: EffectiveOperator, g: int, g_sigma: Optional[int] = None,
                             step_fuel: int = 4096) -> EffectiveOperator:
    """Effective operator rebuilt from continuity witnesses by limit passing.

    With ``g_sigma`` the limit is taken in both topologies and the images
    are computable points.
    """
    reg = F.registry
    cod = F.codomain

    def f(i):
        ne = normed_from_section(cod.tau, virtual_section(F, g, i, "tau"), ("op", g, i),
                                 step_fuel)
        if g_sigma is None:
            return (yield from reg.proc(cod.tau.pt, ne.code))
        ne2 = normed_from_section(cod.sigma, virtual_section(F, g_sigma, i, "sigma"),
                                  ("op", g_sigma, i), step_fuel)
        return (yield from reg.proc(cod.bi_pt, pair(ne.code, ne2.code)))

    code = reg.register(f, key=("op_from_g", g, g_sigma))
    return EffectiveOperator(f"rebuilt({F.name})", code, F.domain, cod, F.point_map,
                             F.interval_ext, F.accepts)


# -- modulus ----------------------------------------------------------------------

def modulus_proc(F: EffectiveOperator, i: int, n: int, side: str = "tau",
                 witness: Optional[NonInclusionWitness] = None, probe_fuel: int = 2000,
                 rejected: Optional[list] = None) -> Proc:
    """Search ``x_i``'s neighbourhoods for ``a`` with certified ``F[B_a]`` inside ``B'_n``."""
    if F.interval_ext is None:
        raise ValueError(f"{F.name} has no exact image map")
    dom, cod = F.spaces(side)
    oracle = cod.oracle
    target = cod.basis(n)

    def test(a):
        yield
        if oracle.subset(F.interval_ext(dom.basis(a)), target):
            return a
        if rejected is not None:
            entry = {"a": a}
            if witness is not None and side == "tau":
                out, _ = witness.run_r(i, a, n, cap=probe_fuel)
                entry["r"] = out.witness if out.confirmed else None
                if out.confirmed:
                    log.debug("non-inclusion witness for %s on %d: x_%d", F.name, a, out.witness)
            rejected.append(entry)
        return None
    return search(dom.section(i), test)


def modulus(F: EffectiveOperator, i: int, n: int, fuel: int, side: str = "tau",
            witness: Optional[NonInclusionWitness] = None,
            rejected: Optional[list] = None) -> Outcome:
    return run(modulus_proc(F, i, n, side, witness, rejected=rejected), fuel)


def modulus_code(F: EffectiveOperator, side: str = "tau") -> int:
    """The modulus search as a registered ``h``."""
    return F.registry.register(lambda c: modulus_proc(F, *unpair(c), side),
                               key=("modulus", F.f, side))


# -- checks -------------------------------------------------------------------------

def check_pointwise(F: EffectiveOperator, h: int, samples: Sequence[tuple[int, int]],
                    fuel: int, side: str = "tau") -> list[CheckRecord]:
    """Validate ``h`` on sampled ``(i, n)`` with ``F(x_i)`` in ``B'_n``."""
    reg = F.registry
    dom, cod = F.spaces(side)
    records = []
    for i, n in samples:
        name = f"{side}:h(i={i},n={n})"
        fi = apply_operator(F, i, fuel)
        if not fi.confirmed:
            records.append(CheckRecord(name, "inconclusive", {"stage": "f"}, fi.steps))
            continue
        try:
            pre = cod.member(fi.witness, n, fuel)
        except NotComputable as exc:
            records.append(CheckRecord(name, "fail", {"point": i, "image": fi.witness,
                                                      "reason": str(exc)}, fi.steps))
            continue
        if not pre.confirmed:
            records.append(CheckRecord(name, "inconclusive", {"stage": "precondition"},
                                       fi.steps + pre.steps))
            continue
        out = reg.apply(h, pair(i, n), fuel)
        used = fi.steps + pre.steps + out.steps
        if not out.confirmed:
            records.append(CheckRecord(name, "inconclusive", {"stage": "h"}, used))
            continue
        a = out.witness
        mem = dom.member(i, a, fuel)
        ok = mem.confirmed
        if F.interval_ext is not None and cod.oracle is not None:
            ok = ok and cod.oracle.subset(F.interval_ext(dom.basis(a)), cod.basis(n))
        records.append(CheckRecord(name, "pass" if ok else "fail",
                                   {"a": a, "basis": show_open(dom.basis(a))}, used + mem.steps))
    return records


def check_bicontinuity(F: EffectiveOperator, witnesses: dict[str, int],
                       samples: dict[str, Sequence[tuple[int, int]]], fuel: int) -> dict:
    """Pointwise checks in both topology pairs; one aggregate per pair."""
    report = {}
    for side in ("tau", "sigma"):
        recs = check_pointwise(F, witnesses[side], samples.get(side, ()), fuel, side)
        status = "fail" if any(r.status == "fail" for r in recs) else \
            "inconclusive" if any(r.status == "inconclusive" for r in recs) else "pass"
        report[side] = {"status": status, "records": [r.as_dict() for r in recs],
                        "counterexamples": [r.witness for r in recs if r.status == "fail"]}
    return report


# -- Friedberg's example -------------------------------------------------------------

def classify_probe(S: SierpinskiInstance, p: int, fuel: int) -> tuple[int, Outcome]:
    """``halting_point(p)`` and the outcome of its top-membership search."""
    hp = S.halting_point(p)
    if (p, fuel) not in S._probes:
        S._probes[(p, fuel)] = S.tau.member(hp, pair(1, 0), fuel)
    return hp, S._probes[(p, fuel)]


def diagonal_point(S: SierpinskiInstance, candidate: Enumerator) -> int:
    """Point whose program halts exactly when ``candidate`` lists the point itself."""
    reg = S.registry
    cell: list[int] = []

    def prog(_):
        return (yield from candidate.member(cell[0]))
    p = reg.register(prog)
    cell.append(S.halting_point(p))
    return cell[0]


def friedberg_diagnostic(S: SierpinskiInstance, candidate: Optional[Enumerator],
                         probes: Sequence[int], fuel: int) -> list[CheckRecord]:
    """Test a claimed enumeration of the indices of bottom.

    Without a candidate only the specialization facts are reported.
    """
    records = [
        CheckRecord("specialization(bot<=top)", *_spec(S, S.bot, S.top, fuel, refuted=False)),
        CheckRecord("specialization(top<=bot)", *_spec(S, S.top, S.bot, fuel, refuted=True)),
    ]
    if candidate is None:
        return records
    for p in probes:
        hp, top = classify_probe(S, p, fuel)
        claim = candidate.contains(hp, fuel)
        if top.confirmed and claim.confirmed:
            records.append(CheckRecord(f"unsound(p={p})", "fail",
                                       {"point": hp, "halt_step": S._watch(p).halted_at,
                                        "claimed_at": claim.steps}, top.steps + claim.steps))
        elif not top.confirmed and not claim.confirmed:
            records.append(CheckRecord(f"incomplete(p={p})", "inconclusive",
                                       {"point": hp}, top.steps + claim.steps))
        else:
            records.append(CheckRecord(f"probe(p={p})", "pass",
                                       {"point": hp, "top": top.confirmed}, top.steps + claim.steps))
    # the computable bottom must be listed
    bot_claim = run(candidate.member(S.bot), fuel)
    if not bot_claim.confirmed:
        definite = bot_claim.steps < fuel
        records.append(CheckRecord("incomplete(bot)", "fail" if definite else "inconclusive",
                                   {"point": S.bot, "definite_no": definite}, bot_claim.steps))
    # upward closure via the diagonal point
    d = diagonal_point(S, candidate)
    listed = candidate.contains(d, fuel)
    # d is top exactly when listed, so its top side is only worth running then
    dtop = S.tau.member(d, pair(1, 0), fuel) if listed.confirmed else listed
    if listed.confirmed and dtop.confirmed:
        records.append(CheckRecord("upward_closure", "fail",
                                   {"point": d, "claimed_at": listed.steps,
                                    "top_at": dtop.steps}, listed.steps + dtop.steps))
    elif not listed.confirmed and listed.steps < fuel:
        # the candidate said a definite no, so the diagonal program never halts
        records.append(CheckRecord("upward_closure", "fail",
                                   {"point": d, "value": BOT, "definite_no": True},
                                   listed.steps))
    else:
        records.append(CheckRecord("upward_closure", "inconclusive", {"point": d},
                                   listed.steps + (dtop.steps if listed.confirmed else 0)))
    return records


def _spec(S: SierpinskiInstance, i: int, j: int, fuel: int, refuted: bool) -> tuple:
    key = ("spec", i, j, fuel)
    if key not in S._probes:
        S._probes[key] = specialization_refute(S.tau, i, j, fuel)
    out = S._probes[key]
    ok = out.confirmed == refuted
    return ("pass" if ok else "fail", {"refuted": out.confirmed,
                                       "open": out.witness if out.confirmed else None}, out.steps)


@dataclass
class ContinuityWitnesses:
    h: Optional[int] = None
    g: Optional[int] = None
    s: Optional[int] = None
    r: Optional[int] = None
