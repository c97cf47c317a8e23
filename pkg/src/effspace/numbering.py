"""Numberings, reductions, product numberings and enumerable subsets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .kernel import (Enumerator, Exhausted, Outcome, Proc, Registry, diverge, ready, run,
                     search, unpair)


@dataclass(eq=False)
class Numbering:
    """Partial numbering of a carrier.

    ``lookup(i)`` returns an opaque handle for the point named by ``i`` or
    ``None`` when ``i`` is outside the domain or the handle is unknown.
    Handles double as carrier-equality evidence: two indices denote the same
    point when their handles are known and equal.
    """

    name: str
    lookup: Callable[[int], Any]

    def deref(self, i: int) -> Any:
        return self.lookup(i)


def same_point(nu: Numbering, i: int, kappa: Numbering, j: int) -> Proc:
    """Semi-test for ``nu_i == kappa_j``; never answers "no"."""
    a, b = nu.lookup(i), kappa.lookup(j)
    if a is not None and b is not None and a == b:
        return ready(True)
    return diverge()


@dataclass(eq=False)
class Reduction:
    """A reduction ``source <= target`` witnessed by the registered ``g``."""

    source: Numbering
    target: Numbering
    g: int
    registry: Registry

    def image(self, i: int, fuel: int) -> Outcome:
        return self.registry.apply(self.g, i, fuel)

    def spot_check(self, i: int, fuel: int) -> Outcome:
        def proc():
            j = yield from self.registry.proc(self.g, i)
            yield from same_point(self.source, i, self.target, j)
            return j
        return run(proc(), fuel)


def reduction(source: Numbering, target: Numbering, g: int, registry: Registry) -> Reduction:
    return Reduction(source, target, g, registry)


@dataclass(eq=False)
class ProductNumbering(Numbering):
    left: Optional[Reduction] = None
    right: Optional[Reduction] = None


def product_numbering(nu: Numbering, kappa: Numbering, registry: Registry,
                      fuel: int = 64) -> ProductNumbering:
    """``(nu * kappa)_<i,j> = nu_i`` once ``nu_i == kappa_j`` is confirmed.

    Unconfirmed pairs are treated as outside the domain for this query only;
    the product never claims that a pair is undefined.
    """
    def lookup(code):
        i, j = unpair(code)
        if run(same_point(nu, i, kappa, j), fuel).confirmed:
            return nu.lookup(i)
        return None

    prod = ProductNumbering(f"{nu.name}*{kappa.name}", lookup)
    prod.left = Reduction(prod, nu, registry.register(lambda c: unpair(c)[0], key="proj1"), registry)
    prod.right = Reduction(prod, kappa, registry.register(lambda c: unpair(c)[1], key="proj2"),
                           registry)
    return prod


@dataclass(eq=False)
class CEnumerableSet:
    """A completely enumerable set presented by its index enumerator ``W_n``."""

    witness: Enumerator
    numbering: Optional[Numbering] = None


def ce_member(X: CEnumerableSet, i: int, fuel: int) -> Outcome:
    """Confirmed when ``i`` is enumerated into the witness within ``fuel``.

    Exhausted means unknown, never "no".
    """
    out = X.witness.contains(i, fuel)
    return out if out.confirmed else Exhausted(out.steps)


@dataclass(eq=False)
class LacombeSet:
    """Open set ``union of B_a for a in index_set``."""

    index_set: Enumerator
    invalid: Optional[int] = field(default=None)

    def codes(self, upto: int) -> list[int]:
        return self.index_set.values(upto)


def lacombe_proc(space, L: LacombeSet, i: int) -> Proc:
    """Semi-decide ``x_i`` in ``L`` by dovetailing ``L``'s codes against membership.

    When the index set is decidable the point's own neighbourhood codes are
    scanned and tested against it; otherwise the index set is scanned and
    each code tested for membership of ``x_i``.
    """
    if L.index_set.decidable:
        return search(space.section(i), L.index_set.member)
    return search(L.index_set, lambda a: space.member_proc(i, a))


def lacombe_member(space, L: LacombeSet, i: int, fuel: int) -> Outcome:
    out = run(lacombe_proc(space, L, i), fuel)
    if out.confirmed and not space.valid_code(out.witness):
        L.invalid = out.witness
        raise ValueError(f"Lacombe index emitted code {out.witness} outside dom(B)")
    return out
