"""Effective topological and bi-topological spaces.

A space is described by its basis numbering, a semi-decidable strong
inclusion on basis codes, the point numbering, and for every point index the
enumerator of basis codes containing that point (a section of ``L``).
Positive facts are always semi-decided; negative facts come only from an
instance oracle attached to the descriptor.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Any, Callable, Optional, Protocol, Sequence

from .kernel import (Enumerator, Outcome, Proc, Registry, harvest, pair, proc_all, run, search,
                     unpair)
from .numbering import LacombeSet, Numbering, ProductNumbering, lacombe_proc, product_numbering

log = logging.getLogger(__name__)


class NotComputable(LookupError):
    """The point's numbering gives no membership enumerator for this topology."""


class Oracle(Protocol):
    def contains(self, basic: Any, point: Any) -> bool: ...
    def subset(self, a: Any, b: Any) -> bool: ...
    def disjoint(self, a: Any, b: Any) -> bool: ...
    def intersect(self, a: Any, b: Any) -> Any: ...


@dataclass(eq=False)
class SpaceDescriptor:
    name: str
    registry: Registry
    basis: Callable[[int], Any]
    strong_incl: Callable[[int, int], Proc]
    section: Callable[[int], Enumerator]
    candidates: Callable[[], Enumerator]
    points: Numbering
    canon: Callable[[int], int] = lambda n: n
    incl_decidable: bool = False
    oracle: Optional[Oracle] = None
    pt: Optional[int] = None
    sb: Optional[int] = None
    # coarseness of a basic set, smaller is coarser; used to order refinements
    rank: Callable[[int], int] = lambda n: 0

    def member_proc(self, i: int, n: int) -> Proc:
        return self.section(i).member(self.canon(n))

    def member(self, i: int, n: int, fuel: int) -> Outcome:
        return run(self.member_proc(i, n), fuel)

    def incl(self, m: int, n: int, fuel: int) -> Outcome:
        return run(self.strong_incl(m, n), fuel)

    def valid_code(self, n: int) -> bool:
        return n >= 0

    def point_handle(self, i: int) -> Any:
        return self.points.lookup(i)

    @property
    def L(self) -> Enumerator:
        """Enumerator of ``<i,n>`` with ``x_i`` in ``B_n`` over all registered points."""
        reg = self.registry

        def gen():
            for tick in itertools.count():
                i, k = unpair(tick)
                if i >= len(reg):
                    yield None
                    continue
                try:
                    n = self.section(i).step(k)
                except NotComputable:
                    n = None
                yield None if n is None else pair(i, n)
        return Enumerator(gen, name=f"L[{self.name}]")

    def strong_incl_pairs(self) -> Enumerator:
        """Enumerator view of the strong inclusion relation."""
        cands = self.candidates()

        def pairs():
            for tick in itertools.count():
                a, b = unpair(tick)
                m, n = cands.step(a), cands.step(b)
                yield None if m is None or n is None else pair(m, n)
        return harvest(Enumerator(pairs), lambda c: _tagged(self.strong_incl(*unpair(c)), c))


def show_open(B: Any) -> str:
    """Stable text for a basic open set; finite sets are listed sorted."""
    if isinstance(B, (set, frozenset)):
        return "{" + ", ".join(sorted(map(str, B))) + "}"
    return str(B)


def _tagged(proc: Proc, value: int) -> Proc:
    ans = yield from proc
    return None if ans is None else value


# -- strong basis, normed enumerations, limit passing -------------------------

def sb_proc(space: SpaceDescriptor, i: int, m: int, n: int) -> Proc:
    """Procedure realising ``sb(i, m, n)`` by dovetailing ``L`` and strong inclusion."""
    return search(space.section(i),
                  lambda a: proc_all(space.strong_incl(a, m), space.strong_incl(a, n)))


def sb_search(space: SpaceDescriptor, i: int, m: int, n: int, fuel: int) -> Outcome:
    return run(sb_proc(space, i, m, n), fuel)


@dataclass(eq=False)
class NormedEnumeration:
    """A registered sequence of basis codes, decreasing under strong inclusion."""

    code: int
    owner: SpaceDescriptor

    def at(self, k: int, fuel: int = 10**7) -> int:
        out = self.owner.registry.apply(self.code, k, fuel)
        if not out.confirmed:
            raise RuntimeError(f"normed enumeration stalled at {k}")
        return out.witness

    def prefix(self, n: int) -> list[int]:
        return [self.at(k) for k in range(n)]


def normed_from_section(space: SpaceDescriptor, section: Enumerator, key: Any,
                        step_fuel: int = 4096, patience: int = 2048) -> NormedEnumeration:
    """Norm an enumeration of neighbourhood codes of one point.

    Element ``k+1`` refines element ``k`` and one pending neighbourhood.
    Refinements shrink the chain and the section tends to list the codes
    that pin the point down late, so the chain waits for them: refinements
    of ``space.rank`` ``r`` are allowed once ``patience * 4**(r-1)`` section
    steps have been taken (``r >= 1``).  The coarsest allowed refinement is used, and
    among equally coarse ones the one implying most pending neighbourhoods.

    With decidable strong inclusion each neighbourhood tests every listed
    code once (failures persist as the chain shrinks, by transitivity).
    Otherwise refinements are raced with a budget that doubles on every
    miss.  Every neighbourhood is refined eventually.
    """
    reg = space.registry
    rank = space.rank
    seq: list[int] = []
    listed: list[int] = []
    todo: list[dict] = []
    state = {"pos": 0}
    scan = space.incl_decidable

    def pull():
        # list codes computed so far plus one fresh step
        k = state["pos"]
        while True:
            fresh = k >= section.known()
            v = section.step(k)
            k += 1
            state["pos"] = k
            if v is not None:
                listed.append(v)
                todo.append({"ready": k, "code": v, "seen": 0, "ok": [], "budget": step_fuel})
            if fresh:
                return

    def incl(a, b):
        return (yield from _bounded(space.strong_incl(a, b), step_fuel))

    def scan_for(entry):
        target, last = entry["code"], seq[-1]
        for a in listed[entry["seen"]:]:
            if (yield from incl(a, target)) is not None:
                entry["ok"].append(a)
        entry["seen"] = len(listed)
        live = []
        for a in entry["ok"]:
            if (yield from incl(a, last)) is not None:
                live.append(a)
        entry["ok"] = live
        allowed = 0
        while patience * 4 ** allowed <= state["pos"]:
            allowed += 1
        fits = [a for a in live if rank(a) <= allowed]
        if not fits:
            return None
        coarse = min(rank(a) for a in fits)
        best, score = None, -1
        for a in [a for a in fits if rank(a) == coarse][:8]:
            n = 0
            for other in todo:
                if (yield from _bounded(space.strong_incl(a, other["code"]), 4)) is not None:
                    n += 1
            if n > score:
                best, score = a, n
        return best

    def start():
        # the first element anchors the chain: wait, then take the coarsest
        # listed code implying most others
        while not listed or (scan and state["pos"] < patience):
            pull()
            yield
        if not scan:
            return listed[0]
        coarse = min(rank(a) for a in listed)
        best, score = None, -1
        for a in [a for a in listed if rank(a) == coarse][:8]:
            n = 0
            for b in listed:
                if (yield from _bounded(space.strong_incl(a, b), 4)) is not None:
                    n += 1
            if n > score:
                best, score = a, n
        return best

    def f(k):
        while len(seq) <= k:
            if not seq:
                seq.append((yield from start()))
                continue
            pull()
            yield
            ready = [t for t in range(len(todo)) if todo[t]["ready"] <= state["pos"]]
            if not ready:
                continue
            entry = todo.pop(min(ready, key=lambda t: todo[t]["ready"]))
            implied = yield from _bounded(space.strong_incl(seq[-1], entry["code"]), 4)
            if implied is not None:
                continue
            if scan:
                found = yield from scan_for(entry)
                if found is None:
                    entry["ready"] = state["pos"] + 1
                    todo.append(entry)
                    continue
            else:
                found = yield from _bounded(_refine(space, section, seq[-1], entry["code"]),
                                            entry["budget"])
                if found is None:
                    entry["budget"] *= 2
                    entry["ready"] = state["pos"] + entry["budget"]
                    todo.append(entry)
                    seq.append(seq[-1])
                    continue
            seq.append(found)
        return seq[k]

    return NormedEnumeration(reg.register(f, key=("normed", space.name, key)), space)


def _bounded(proc: Proc, budget: int) -> Proc:
    """Run ``proc`` for at most ``budget`` ticks of the caller; ``None`` on timeout."""
    for _ in range(budget):
        try:
            next(proc)
        except StopIteration as stop:
            return stop.value
        yield
    proc.close()
    return None


def _refine(space: SpaceDescriptor, section: Enumerator, m: int, n: int) -> Proc:
    return search(section.compact(), lambda a: proc_all(space.strong_incl(a, m), space.strong_incl(a, n)))


def converge(space: SpaceDescriptor, i: int) -> NormedEnumeration:
    """Normed enumeration of a strong neighbourhood basis of ``x_i``.

    ``f(0)`` is the first listed neighbourhood and ``f(k+1) = sb(i, f(k), n_(k+1))``
    for the ``k+1``-th listed one, so the chain refines every neighbourhood.
    """
    return sb_chain(space, space.section(i), ("converge", space.name, i))


def sb_chain(space: SpaceDescriptor, section: Enumerator, key: Any) -> NormedEnumeration:
    """Chain ``f(k+1) = sb(f(k), n_(k+1))`` over the listed neighbourhoods ``n_k``."""
    section = section.compact()
    seq: list[int] = []

    def nth(j):
        k, seen = 0, -1
        while True:
            v = section.step(k)
            k += 1
            if v is not None:
                seen += 1
                if seen == j:
                    return v
            yield

    def f(k):
        while len(seq) <= k:
            n = yield from nth(len(seq))
            if not seq:
                seq.append(n)
            else:
                seq.append((yield from _refine(space, section, seq[-1], n)))
        return seq[k]
    return NormedEnumeration(space.registry.register(f, key=key), space)


def limit_pass(space: SpaceDescriptor, ne: NormedEnumeration | int, fuel: int) -> Outcome:
    """Apply the space's ``pt`` to a normed enumeration code."""
    if space.pt is None:
        raise ValueError(f"{space.name} has no limit passing")
    code = ne.code if isinstance(ne, NormedEnumeration) else ne
    return space.registry.apply(space.pt, code, fuel)


# -- bi-topological spaces ----------------------------------------------------

@dataclass(eq=False)
class BiSpaceDescriptor:
    tau: SpaceDescriptor
    sigma: SpaceDescriptor
    bi_pt: Optional[int] = None

    @property
    def dual(self) -> "BiSpaceDescriptor":
        return BiSpaceDescriptor(self.sigma, self.tau, self.bi_pt)


def product_enumerator(left: Enumerator, right: Enumerator) -> Enumerator:
    """All ``<m,n>`` with ``m`` from ``left`` and ``n`` from ``right``."""
    def gen():
        ms, ns, queue = [], [], deque()
        for k in itertools.count():
            m, n = left.step(k), right.step(k)
            if m is not None:
                queue.extend(pair(m, x) for x in ns)
                ms.append(m)
            if n is not None:
                queue.extend(pair(x, n) for x in ms)
                ns.append(n)
            yield queue.popleft() if queue else None
            while len(queue) > 2 * (k + 1):
                # drain backlog one element per step
                yield queue.popleft()
    return Enumerator(gen, name="product")


def merge_L(Ltau: Enumerator, Lsigma: Enumerator) -> Enumerator:
    """``<i,<m,n>>`` whenever ``<i,m>`` in ``Ltau`` and ``<i,n>`` in ``Lsigma``."""
    def gen():
        taus, sigmas = defaultdict(list), defaultdict(list)
        queue = deque()
        for k in itertools.count():
            a, b = Ltau.step(k), Lsigma.step(k)
            if a is not None:
                i, m = unpair(a)
                if m not in taus[i]:
                    taus[i].append(m)
                    queue.extend(pair(i, pair(m, n)) for n in sigmas[i])
            if b is not None:
                i, n = unpair(b)
                if n not in sigmas[i]:
                    sigmas[i].append(n)
                    queue.extend(pair(i, pair(m, n)) for m in taus[i])
            yield queue.popleft() if queue else None
    return Enumerator(gen, name="merge_L")


def split_L(joinL: Enumerator) -> tuple[Enumerator, Enumerator]:
    """Existential projections of a join membership enumerator."""
    def proj(which):
        def f(v):
            i, mn = unpair(v)
            return pair(i, unpair(mn)[which])
        return joinL.map(f)
    return proj(0), proj(1)


def join_space(bi: BiSpaceDescriptor) -> SpaceDescriptor:
    """Space of the join topology with basis ``B_m & B_n`` on pair codes."""
    t, s = bi.tau, bi.sigma

    def basis(code):
        m, n = unpair(code)
        if t.oracle is None:
            return (t.basis(m), s.basis(n))
        return t.oracle.intersect(t.basis(m), s.basis(n))

    def strong_incl(a, b):
        (m, n), (m2, n2) = unpair(a), unpair(b)
        return proc_all(t.strong_incl(m, m2), s.strong_incl(n, n2))

    def section(i):
        sec = product_enumerator(t.section(i), s.section(i))
        sec._member = lambda code: proc_all(t.member_proc(i, unpair(code)[0]),
                                            s.member_proc(i, unpair(code)[1]))
        return sec

    def candidates():
        return product_enumerator(t.candidates(), s.candidates())

    def canon(code):
        m, n = unpair(code)
        return pair(t.canon(m), s.canon(n))

    def lookup(i):
        a = t.points.lookup(i)
        return a if a is not None and s.points.lookup(i) == a else None

    return SpaceDescriptor(f"{t.name}v{s.name}", t.registry, basis, strong_incl, section,
                           candidates, Numbering(f"x[{t.name}v{s.name}]", lookup), canon,
                           incl_decidable=t.incl_decidable and s.incl_decidable,
                           oracle=t.oracle,
                           rank=lambda c: max(t.rank(unpair(c)[0]), s.rank(unpair(c)[1])))


@dataclass(eq=False)
class StarNumbering:
    """``x_tau * x_sigma`` with the lifted membership sections."""

    numbering: ProductNumbering
    tau: SpaceDescriptor
    sigma: SpaceDescriptor

    def section_tau(self, code: int) -> Enumerator:
        return self.tau.section(unpair(code)[0])

    def section_sigma(self, code: int) -> Enumerator:
        return self.sigma.section(unpair(code)[1])

    def lifted_L(self, which: str = "tau") -> Enumerator:
        """``<<i,j>,n>`` with ``<i,n>`` in the factor's ``L`` (every ``j``)."""
        base = (self.tau if which == "tau" else self.sigma).L

        def gen():
            for tick in itertools.count():
                k, j = unpair(tick)
                v = base.step(k)
                if v is None:
                    yield None
                    continue
                i, n = unpair(v)
                yield pair(pair(i, j) if which == "tau" else pair(j, i), n)
        return Enumerator(gen, name=f"Lhat[{which}]")


def star_bicomputable(tau: SpaceDescriptor, sigma: SpaceDescriptor,
                      fuel: int = 64) -> StarNumbering:
    prod = product_numbering(tau.points, sigma.points, tau.registry, fuel)
    return StarNumbering(prod, tau, sigma)


def bi_limit_pass(registry: Registry, pt_tau: int, pt_sigma: int) -> int:
    """``pt(<m1,m2>) = <pt_tau(m1), pt_sigma(m2)>`` as a registered code."""
    def pt(code):
        m1, m2 = unpair(code)
        a = yield from registry.proc(pt_tau, m1)
        b = yield from registry.proc(pt_sigma, m2)
        return pair(a, b)
    return registry.register(pt, key=("bi_pt", pt_tau, pt_sigma))


# -- checks -------------------------------------------------------------------

@dataclass
class CheckRecord:
    name: str
    status: str
    witness: Any = None
    fuel_used: int = 0

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness,
                "fuel_used": self.fuel_used}


def check_effective_regularity(bi: BiSpaceDescriptor,
                               s: Callable[[int, int], Proc],
                               t: Callable[[int, int], LacombeSet],
                               samples: Sequence[tuple[int, int]],
                               complement: Callable[[int], Sequence[int]],
                               fuel: int,
                               pool: Sequence[int] = (),
                               emitted: int = 64,
                               tag: str = "") -> list[CheckRecord]:
    """Check the four effective-regularity conditions on sampled ``(i, m)``.

    ``complement(m)`` supplies point indices the oracle places outside
    ``B_m``; ``pool`` supplies extra points for the cross-dovetail of the
    disjointness condition.
    """
    tau, sigma = bi.tau, bi.sigma
    oracle = tau.oracle
    records = []
    for i, m in samples:
        label = f"{tag}(i={i},m={m})"
        # (a)
        out = run(s(i, m), fuel)
        if not out.confirmed:
            records.append(CheckRecord(f"a{label}", "inconclusive", None, out.steps))
            continue
        sc = out.witness
        T = t(i, m)
        codes = T.codes(emitted)
        bad = [c for c in codes if not sigma.valid_code(c)]
        records.append(CheckRecord(f"a{label}", "fail" if bad else "pass",
                                   {"s": sc, "bad_t_codes": bad}, out.steps))
        # (b)
        mem = tau.member(i, sc, fuel)
        inc = tau.incl(sc, m, fuel)
        ok_b = mem.confirmed and (inc.confirmed or (oracle and oracle.subset(tau.basis(sc), tau.basis(m))))
        if oracle is not None:
            ok_oracle = oracle.contains(tau.basis(sc), tau.point_handle(i)) and \
                oracle.subset(tau.basis(sc), tau.basis(m))
            ok_b = ok_b and ok_oracle
        records.append(CheckRecord(f"b{label}", "pass" if ok_b else
                                   ("fail" if oracle is not None else "inconclusive"),
                                   {"member": mem.confirmed, "strong_incl": inc.confirmed},
                                   mem.steps + inc.steps))
        # (c)
        missing, used = None, 0
        for z in complement(m):
            if oracle is not None and oracle.contains(tau.basis(m), tau.point_handle(z)):
                raise ValueError(f"complement sample {z} lies inside B_{m}")
            o = run(lacombe_proc(sigma, T, z), fuel)
            used += o.steps
            if not o.confirmed:
                missing = z
                break
        if missing is None:
            records.append(CheckRecord(f"c{label}", "pass", None, used))
        else:
            covered = oracle is not None and any(
                oracle.contains(sigma.basis(c), sigma.point_handle(missing)) for c in codes)
            records.append(CheckRecord(f"c{label}", "inconclusive" if covered else "fail",
                                       {"missing_point": missing,
                                        "handle": _show(sigma.point_handle(missing))}, used))
        # (d)
        overlap = None
        if oracle is not None:
            for c in codes:
                if not oracle.disjoint(tau.basis(sc), sigma.basis(c)):
                    overlap = {"t_code": c}
                    break
        pts = [i, *pool, *complement(m)]
        cross = run(search(Enumerator.of(pts),
                           lambda p: proc_all(tau.member_proc(p, sc), lacombe_proc(sigma, T, p))),
                    fuel)
        if cross.confirmed:
            overlap = {"common_point": cross.witness}
        records.append(CheckRecord(f"d{label}", "fail" if overlap else "pass", overlap,
                                   cross.steps))
    return records


def _show(h):
    return None if h is None else str(h)


def specialization_refute(space: SpaceDescriptor, i: int, j: int, fuel: int) -> Outcome:
    """Find a basic open containing ``x_i`` but (by the oracle) not ``x_j``."""
    if space.oracle is None:
        raise ValueError("specialization_refute needs an instance oracle")
    hj = space.point_handle(j)

    def outside(a):
        yield
        return True if not space.oracle.contains(space.basis(a), hj) else None
    return run(search(space.section(i), outside), fuel)


def sample_triples(space: SpaceDescriptor, points: Sequence[int], count: int, seed: int,
                   codes_per_point: int = 40) -> list[tuple[int, int, int]]:
    """Seeded ``(i, m, n)`` with both memberships taken from the point's section."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        i = rng.choice(list(points))
        codes = space.section(i).values(codes_per_point * 4)[:codes_per_point]
        out.append((i, rng.choice(codes), rng.choice(codes)))
    return out
