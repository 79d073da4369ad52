"""Marked morphism classes and geometric setups with a pullback oracle.

A geometric setup is a finite category with a class E of morphisms that
contains the isomorphisms, is closed under composition, and whose members
base-change along arbitrary morphisms.  Pullbacks are found by exhaustive
universal-property search; in a carrier that is missing some fiber products
the oracle is partial, and `check_geometric_setup` reports coverage rather
than inventing objects (pass `require_total=True` to make gaps a failure).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .fincat import (
    FinCategory,
    canonical_pullback,
    finset_size,
    fn_values,
    verify_pullback_square,
)
from .report import MalformedInputError, VerificationReport


@dataclass
class EdgeClass:
    """A subset of morphism ids.  All closure flags are recomputed from the
    tables; nothing is trusted from input."""

    carrier: FinCategory
    members: frozenset[str]

    def __post_init__(self):
        unknown = self.members - set(self.carrier.morphism_ids)
        if unknown:
            raise MalformedInputError(f"unknown morphisms in class: {sorted(unknown)[:5]}")
        self.members = frozenset(self.members)

    def __contains__(self, m: str) -> bool:
        return m in self.members

    @cached_property
    def closed_under_iso(self) -> bool:
        return self.iso_closure_witness() is None

    def iso_closure_witness(self) -> dict | None:
        missing = sorted(self.carrier.iso_ids - self.members)
        return {"missing-iso": missing[0]} if missing else None

    @cached_property
    def closed_under_composition(self) -> bool:
        return self.composition_witness() is None

    def composition_witness(self) -> dict | None:
        c = self.carrier
        for g, f in c.composable_pairs:
            if g in self.members and f in self.members and c.comp(g, f) not in self.members:
                return {"pair": [g, f], "composite": c.comp(g, f)}
        return None

    @cached_property
    def right_cancellative(self) -> bool:
        return self.right_cancellation_witness() is None

    def right_cancellation_witness(self) -> dict | None:
        # admissibility: p.q in class and p in class force q in class
        c = self.carrier
        for p, q in c.composable_pairs:
            if p in self.members and c.comp(p, q) in self.members and q not in self.members:
                return {"outer": c.comp(p, q), "left": p, "right": q}
        return None

    @cached_property
    def pullback_stable(self) -> bool:
        return self.stability_witness() is None

    def stability_witness(self) -> dict | None:
        c = self.carrier
        for f in sorted(self.members):
            for g in c.morphism_ids:
                if c.dst(g) != c.dst(f):
                    continue
                pb = canonical_pullback(c, f, g)
                if pb is None:
                    continue
                _, _, q = pb
                if q not in self.members:
                    return {"member": f, "along": g, "base-change": q}
        return None


def all_class(c: FinCategory) -> EdgeClass:
    return EdgeClass(c, frozenset(c.morphism_ids))


def iso_class(c: FinCategory) -> EdgeClass:
    return EdgeClass(c, c.iso_ids)


@dataclass
class GeometricSetup:
    """A category with a marked class and a memoized canonical pullback oracle."""

    category: FinCategory
    e: EdgeClass
    _oracle: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.e.carrier is not self.category and self.e.carrier != self.category:
            raise MalformedInputError("edge class lives over a different category")

    def pullback_opt(self, f: str, g: str) -> tuple[str, str, str] | None:
        """Canonical pullback of the cospan (f, g) if the carrier has one.

        Returns (apex, p, q) with p over f's source and q over g's source.
        """
        key = (f, g)
        if key not in self._oracle:
            self._oracle[key] = canonical_pullback(self.category, f, g)
        return self._oracle[key]

    def pullback(self, f: str, g: str) -> tuple[str, str, str]:
        pb = self.pullback_opt(f, g)
        if pb is None:
            raise MalformedInputError(f"no pullback exists for cospan ({f!r}, {g!r})")
        return pb

    def certified_pullback(self, f: str, g: str) -> tuple[str, str, str]:
        """Pullback with the universal property re-verified (hard error on
        oracle corruption, distinct from axiom failure)."""
        apex, p, q = self.pullback(f, g)
        if not verify_pullback_square(self.category, f, g, apex, p, q):
            raise RuntimeError(f"oracle returned a non-pullback for ({f!r}, {g!r})")
        return apex, p, q


def check_geometric_setup(s: GeometricSetup, require_total: bool = False) -> VerificationReport:
    """Iso-closure, composition-closure, and pullback existence/stability.

    Cospans (f in E, g arbitrary) whose fiber product has no representative
    in the carrier are counted as coverage gaps; they only fail the report
    when `require_total` is set.
    """
    rep = VerificationReport("check-geometric-setup")
    c = s.category

    w = s.e.iso_closure_witness()
    rep.add("contains-isomorphisms", w is None, w or {}, anchor="setup-iso-closure")
    w = s.e.composition_witness()
    rep.add("closed-under-composition", w is None, w or {}, anchor="setup-composition-closure")

    covered = 0
    gaps: list[list[str]] = []
    stability_witness = None
    for f in sorted(s.e.members):
        for g in c.morphism_ids:
            if c.dst(g) != c.dst(f):
                continue
            pb = s.pullback_opt(f, g)
            if pb is None:
                gaps.append([f, g])
                continue
            covered += 1
            apex, p, q = pb
            if q not in s.e.members and stability_witness is None:
                stability_witness = {"member": f, "along": g, "base-change": q}
    rep.add(
        "pullback-existence",
        not (require_total and gaps),
        {"covered": covered, "gaps": len(gaps), "first-gap": gaps[0] if gaps else None},
        anchor="setup-pullbacks-exist",
    )
    rep.add(
        "pullback-stability",
        stability_witness is None,
        stability_witness or {"checked": covered},
        anchor="setup-pullbacks-stay",
    )
    return rep


# -- finite-set helper classes -------------------------------------------


def injection_class(c: FinCategory) -> EdgeClass:
    from .fincat import injections

    return EdgeClass(c, injections(c))


def surjection_class(c: FinCategory) -> EdgeClass:
    from .fincat import surjections

    return EdgeClass(c, surjections(c))
