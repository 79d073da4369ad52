"""Factorization setups and the exceptional pushforward.

A setup carries two extra marked classes: open-like maps I whose pullback
functors have left adjoints, and proper-like maps P with right adjoints.
Every marked map factors through both, and the exceptional map is the
composite of the proper pushforward after the open extension.  All theorem
content (hypotheses, independence of factorization, base change, assembly
into a functor on the homotopy span category) is verified elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import enumerate_grid_simplices
from .lattices import (
    CoefficientSystem,
    LatticeMap,
    SquareData,
    check_adjointable,
    compose_maps,
    identity_map,
    left_adjoint,
    right_adjoint,
)
from .report import MalformedInputError, ResourceLimitError, VerificationReport
from .setups import EdgeClass, GeometricSetup, check_geometric_setup
from .spans import HCorr, Span, compose_spans


@dataclass
class NagataSetup:
    """Marked classes I and P on top of a geometric setup."""

    setup: GeometricSetup
    i_class: EdgeClass
    p_class: EdgeClass

    def __post_init__(self):
        c = self.setup.category
        if self.i_class.carrier is not c or self.p_class.carrier is not c:
            raise MalformedInputError("classes must live on the setup's category")


@dataclass
class Compactification:
    """A factorization f = p . j with j open-like and p proper-like."""

    ns: NagataSetup
    f: str
    obj: str
    j: str
    p: str

    def __post_init__(self):
        c = self.ns.setup.category
        if self.j not in self.ns.i_class.members:
            raise MalformedInputError(f"{self.j!r} is not open-like")
        if self.p not in self.ns.p_class.members:
            raise MalformedInputError(f"{self.p!r} is not proper-like")
        if c.morphisms[self.j] != (c.src(self.f), self.obj):
            raise MalformedInputError("open leg mistyped")
        if c.morphisms[self.p] != (self.obj, c.dst(self.f)):
            raise MalformedInputError("proper leg mistyped")
        if c.comp(self.p, self.j) != self.f:
            raise MalformedInputError("legs do not compose to the map")


def check_nagata(ns: NagataSetup) -> VerificationReport:
    """The four axioms, each exhaustive with a witness on failure."""
    rep = VerificationReport("nagata-setup")
    c = ns.setup.category
    for label, cls in (("i", ns.i_class), ("p", ns.p_class)):
        sub = check_geometric_setup(GeometricSetup(c, cls))
        bad = sub.first_failure()
        rep.add(
            f"{label}-class-geometric-setup",
            sub.passed,
            {} if sub.passed else {"check": bad.name, "witness": bad.witness},
            anchor="nagata-axiom-1",
        )
    missing = [f for f in sorted(ns.setup.e.members) if not factorizations(ns, f)]
    rep.add(
        "factorization-exists",
        not missing,
        {"morphism": missing[0]} if missing else {},
        anchor="nagata-axiom-2",
    )
    for label, cls in (("i", ns.i_class), ("p", ns.p_class)):
        witness = None
        for g, f in c.composable_pairs:
            if g in cls.members and (f in cls.members) != (c.comp(g, f) in cls.members):
                witness = {"pair": [g, f], "composite": c.comp(g, f)}
                break
        rep.add(f"cancellation-{label}", witness is None, witness or {}, anchor="nagata-axiom-3")
    overlap = ns.i_class.members & ns.p_class.members
    bad = sorted(overlap - set(c.mono_ids))
    rep.add(
        "overlap-is-truncated",
        not bad,
        {"morphism": bad[0]} if bad else {},
        anchor="nagata-axiom-4",
    )
    return rep


def factorizations(ns: NagataSetup, f: str) -> list[Compactification]:
    """All factorizations through carrier objects, canonical (least) first."""
    c = ns.setup.category
    x, y = c.morphisms[f]
    out = []
    for k in c.objects:
        for j in c.hom(x, k):
            if j not in ns.i_class.members:
                continue
            for p in c.hom(k, y):
                if p in ns.p_class.members and c.comp(p, j) == f:
                    out.append((k, j, p))
    return [Compactification(ns, f, k, j, p) for k, j, p in sorted(out)]


@dataclass
class ShriekAssignment:
    """One exceptional map per marked morphism, with the factorization used."""

    ns: NagataSetup
    sys: CoefficientSystem
    shriek: dict
    chosen: dict

    def __post_init__(self):
        c = self.ns.setup.category
        for f in self.ns.setup.e.members:
            m = self.shriek.get(f)
            x, y = c.morphisms[f]
            if m is None or m.src != self.sys.lattice(x) or m.dst != self.sys.lattice(y):
                raise MalformedInputError(f"exceptional map for {f!r} missing or mistyped")


def _sharp(sys: CoefficientSystem, f: str) -> LatticeMap:
    adj = left_adjoint(sys.pull(f))
    if adj is None:
        raise MalformedInputError(f"pullback along {f!r} has no left adjoint")
    return adj


def _star(sys: CoefficientSystem, f: str) -> LatticeMap:
    adj = right_adjoint(sys.pull(f))
    if adj is None:
        raise MalformedInputError(f"pullback along {f!r} has no right adjoint")
    return adj


def build_shriek(ns: NagataSetup, sys: CoefficientSystem, verify: bool = True) -> ShriekAssignment:
    """The exceptional map along the canonical factorization.

    With verify on, the axioms and the hypothesis suite gate construction;
    class consistency of the result is always enforced.
    """
    if verify:
        for gate in (check_nagata(ns), verify_hypotheses(ns, sys)):
            if not gate.passed:
                bad = gate.first_failure()
                raise MalformedInputError(
                    f"cannot build: {bad.name} fails with witness {bad.witness}"
                )
    shriek, chosen = {}, {}
    for f in sorted(ns.setup.e.members):
        facts = factorizations(ns, f)
        if not facts:
            raise MalformedInputError(f"no factorization for {f!r}")
        cf = facts[0]
        shriek[f] = compose_maps(_star(sys, cf.p), _sharp(sys, cf.j))
        chosen[f] = cf
    sa = ShriekAssignment(ns, sys, shriek, chosen)
    gate = check_class_consistency(sa)
    if not gate.passed:
        bad = gate.first_failure()
        raise MalformedInputError(f"class consistency broken: {bad.witness}")
    return sa


def check_class_consistency(sa: ShriekAssignment) -> VerificationReport:
    """Open-like maps get the left adjoint, proper-like maps the right one."""
    rep = VerificationReport("shriek-class-consistency")
    witness = None
    for f in sorted(sa.ns.setup.e.members):
        if f in sa.ns.i_class.members and not sa.shriek[f].same_table(_sharp(sa.sys, f)):
            witness = {"morphism": f, "class": "open-like"}
            break
        if f in sa.ns.p_class.members and not sa.shriek[f].same_table(_star(sa.sys, f)):
            witness = {"morphism": f, "class": "proper-like"}
            break
    rep.add("class-consistency", witness is None, witness or {}, anchor="shriek-on-marked-classes")
    return rep


# -- hypothesis suite -----------------------------------------------------


def _projection_comparison(sys: CoefficientSystem, f: str, push: LatticeMap, flavor: str):
    """The projection comparison as a directed inequality.

    The hypothesis layer asks for a natural map, and between posets a
    natural map exists exactly when the inequality holds elementwise:
    push(E tensor pull B) below push(E) tensor B for the left adjoint,
    push(E) tensor B below push(E tensor pull B) for the right one.  The
    model layer's strict-equality checker is separate."""
    c = sys.setup.category
    x, y = c.morphisms[f]
    DX, DY = sys.lattice(x), sys.lattice(y)
    pull = sys.pull(f)
    for E in DX.elements:
        for B in DY.elements:
            pushed = push(DX.tensor(E, pull(B)))
            tensored = DY.tensor(push(E), B)
            ok = DY.le(pushed, tensored) if flavor == "sharp" else DY.le(tensored, pushed)
            if not ok:
                return {"E": E, "B": B, "pushed-tensor": pushed, "tensor-pushed": tensored}
    return None


def _grid_square(g):
    """Corner data of a k=2, n=1 grid: cospan legs and their base changes."""
    right = g.edges[((0, 1), 0)]
    top = g.edges[((1, 0), 1)]
    bottom = g.edges[((0, 0), 0)]
    left = g.edges[((0, 0), 1)]
    return right, top, bottom, left


def _square_id(g) -> dict:
    right, top, bottom, left = _grid_square(g)
    return {"cospan": [right, top], "base-changes": [bottom, left]}


def verify_hypotheses(ns: NagataSetup, sys: CoefficientSystem) -> VerificationReport:
    """Projection formulas per class, base change per class, and the
    support property, the last three quantified over every cartesian
    square the grid enumerator produces with the relevant edge classes."""
    rep = VerificationReport("shriek-hypotheses")
    s = ns.setup
    for label, cls, flavor in (("sharp", ns.i_class, "sharp"), ("star", ns.p_class, "star")):
        witness, count = None, 0
        for f in sorted(cls.members):
            count += 1
            push = _sharp(sys, f) if flavor == "sharp" else _star(sys, f)
            found = _projection_comparison(sys, f, push, flavor)
            if found:
                witness = {"morphism": f, "witness": found}
                break
        rep.add(
            f"projection-formula-{label}",
            witness is None,
            witness or {"morphisms": count},
            anchor=f"projection-formula-{flavor}",
        )

    def base_change(cls: EdgeClass, side: str, name: str):
        witness, count = None, 0
        for g in enumerate_grid_simplices(s, [cls, s.e], 2, 1):
            right, top, bottom, left = _grid_square(g)
            count += 1
            sq = SquareData(p=sys.pull(right), u=sys.pull(top), v=sys.pull(left), q=sys.pull(bottom))
            sub = check_adjointable(sq, side)
            if not sub.passed:
                witness = {"square": _square_id(g), "witness": sub.first_failure().witness}
                break
        rep.add(name, witness is None, witness or {"squares": count}, anchor=f"{name}-adjointable")

    base_change(ns.i_class, "left", "i-base-change")
    base_change(ns.p_class, "right", "p-base-change")

    witness, count = None, 0
    for g in enumerate_grid_simplices(s, [ns.i_class, ns.p_class], 2, 1):
        j, p, j2, p2 = _grid_square(g)
        count += 1
        try:
            # commuting here is exactly left base change for this square
            sq = SquareData(p=sys.pull(p2), u=_sharp(sys, j), v=_sharp(sys, j2), q=sys.pull(p))
        except MalformedInputError as e:
            witness = {"square": _square_id(g), "witness": str(e)}
            break
        sub = check_adjointable(sq, "right")
        if not sub.passed:
            witness = {"square": _square_id(g), "witness": sub.first_failure().witness}
            break
    rep.add("support-property", witness is None, witness or {"squares": count}, anchor="support-property-square")
    return rep


def check_independence(ns: NagataSetup, sys: CoefficientSystem, f: str) -> VerificationReport:
    """Every factorization must induce the same exceptional map as the
    canonical one; the witness names the disagreeing factorization."""
    rep = VerificationReport("shriek-independence")
    facts = factorizations(ns, f)
    if not facts:
        raise MalformedInputError(f"no factorization for {f!r}")
    canonical = compose_maps(_star(sys, facts[0].p), _sharp(sys, facts[0].j))
    witness = None
    for cf in facts[1:]:
        candidate = compose_maps(_star(sys, cf.p), _sharp(sys, cf.j))
        for e in canonical.src.elements:
            if candidate(e) != canonical(e):
                witness = {
                    "factorization": [cf.obj, cf.j, cf.p],
                    "element": e,
                    "canonical": canonical(e),
                    "candidate": candidate(e),
                }
                break
        if witness:
            break
    rep.add(
        "factorization-independence",
        witness is None,
        witness or {"factorizations": len(facts)},
        anchor="exceptional-map-well-defined",
    )
    return rep


def check_base_change_shriek(ns: NagataSetup, sa: ShriekAssignment) -> VerificationReport:
    """Pull after push equals push after pull across every cartesian square
    whose legs are marked."""
    rep = VerificationReport("shriek-base-change")
    s = ns.setup
    sys = sa.sys
    witness, count = None, 0
    for g in enumerate_grid_simplices(s, [s.e, s.e], 2, 1):
        p, q, p2, q2 = _grid_square(g)
        count += 1
        lhs = compose_maps(sys.pull(q), sa.shriek[p])
        rhs = compose_maps(sa.shriek[p2], sys.pull(q2))
        for e in lhs.src.elements:
            if lhs(e) != rhs(e):
                witness = {
                    "square": _square_id(g),
                    "element": e,
                    "pull-then-push": rhs(e),
                    "push-then-pull": lhs(e),
                }
                break
        if witness:
            break
    rep.add("base-change", witness is None, witness or {"squares": count}, anchor="base-change-exceptional")
    return rep


def check_shriek_projection(ns: NagataSetup, sa: ShriekAssignment) -> VerificationReport:
    """The projection comparison for the assembled exceptional maps, in the
    same directed rendering as the hypothesis layer (tensor after pushing
    below push of the tensored argument)."""
    rep = VerificationReport("shriek-projection")
    witness, count = None, 0
    for f in sorted(ns.setup.e.members):
        count += 1
        found = _projection_comparison(sa.sys, f, sa.shriek[f], "star")
        if found:
            witness = {"morphism": f, "witness": found}
            break
    rep.add("projection-formula", witness is None, witness or {"morphisms": count}, anchor="projection-formula-exceptional")
    return rep


# -- assembly on the homotopy span category -------------------------------


def span_value(sa: ShriekAssignment, sp: Span) -> LatticeMap:
    """Pull along the left leg, then push exceptionally along the right."""
    if sp.right not in sa.ns.setup.e.members:
        raise MalformedInputError(f"right leg {sp.right!r} is not marked")
    return compose_maps(sa.shriek[sp.right], sa.sys.pull(sp.left))


@dataclass
class Formalism:
    hcorr: HCorr
    sa: ShriekAssignment
    obj_map: dict
    mor_map: dict


def assemble_formalism(ns: NagataSetup, sa: ShriekAssignment, max_apex: int = 4) -> Formalism:
    """One lattice map per enumerated span class, valued on representatives."""
    hc = HCorr(ns.setup, max_apex)
    c = ns.setup.category
    mor_map = {}
    for x in c.objects:
        for y in c.objects:
            for rep_span, _ in hc.classes(x, y).values():
                mor_map[hc.class_id(rep_span)] = span_value(sa, rep_span)
    return Formalism(hc, sa, {x: sa.sys.lattice(x) for x in c.objects}, mor_map)


def check_formalism(fm: Formalism) -> VerificationReport:
    """Functoriality of the class-indexed assignment.

    Composable pairs whose composite escapes the carrier are counted as
    coverage, mirroring the span-law checker."""
    rep = VerificationReport("formalism")
    hc, sa = fm.hcorr, fm.sa
    c = hc.setup.category
    witness = None
    for x in c.objects:
        for y in c.objects:
            for cid, (rep_span, members) in (
                (hc.class_id(r), (r, ms)) for r, ms in hc.classes(x, y).values()
            ):
                for member in members:
                    if not span_value(sa, member).same_table(fm.mor_map[cid]):
                        witness = {"class": cid, "member": [member.left, member.right]}
                        break
                if witness:
                    break
    rep.add("representative-independence", witness is None, witness or {}, anchor="descends-to-classes")

    witness = None
    for x in c.objects:
        if not fm.mor_map[hc.identity_id(x)].same_table(identity_map(sa.sys.lattice(x))):
            witness = {"object": x}
            break
    rep.add("identity-spans", witness is None, witness or {}, anchor="unit-of-formalism")

    witness, pairs, covered = None, 0, 0
    for x in c.objects:
        for y in c.objects:
            for a, _ in hc.classes(x, y).values():
                for z in c.objects:
                    for b, _ in hc.classes(y, z).values():
                        pairs += 1
                        try:
                            composite = compose_spans(hc.setup, a, b)
                        except (MalformedInputError, ResourceLimitError):
                            continue
                        covered += 1
                        direct = span_value(sa, composite)
                        chained = compose_maps(fm.mor_map[hc.class_id(b)], fm.mor_map[hc.class_id(a)])
                        if not direct.same_table(chained):
                            witness = {
                                "pair": [[a.left, a.right], [b.left, b.right]],
                                "composite": [composite.left, composite.right],
                            }
                            break
                    if witness:
                        break
                if witness:
                    break
    rep.add(
        "composition",
        witness is None,
        witness or {"pairs": pairs, "covered": covered},
        anchor="functor-on-span-classes",
    )

    witness = None
    for m in c.morphism_ids:
        cid = hc.class_id(Span(m, c.identity[c.src(m)]))
        if not fm.mor_map[cid].same_table(sa.sys.pull(m)):
            witness = {"morphism": m, "route": "pullback-embedding"}
            break
    rep.add("pullback-restriction", witness is None, witness or {}, anchor="recovers-pullbacks")

    witness = None
    for m in sorted(hc.setup.e.members):
        cid = hc.class_id(Span(c.identity[c.src(m)], m))
        if not fm.mor_map[cid].same_table(sa.shriek[m]):
            witness = {"morphism": m, "route": "exceptional-embedding"}
            break
    rep.add("exceptional-restriction", witness is None, witness or {}, anchor="recovers-exceptional-maps")
    return rep


def search_nagata(setup: GeometricSetup, sys: CoefficientSystem, classes: dict) -> list[dict]:
    """Brute-force sweep over named class pairs: which (I, P) choices give a
    valid setup with all hypotheses, and which of those are mixed (I not
    everything, P not just isomorphisms, overlap beyond isomorphisms)."""
    c = setup.category
    isos = frozenset(c.iso_ids)
    everything = frozenset(c.morphism_ids)
    out = []
    for i_name in sorted(classes):
        for p_name in sorted(classes):
            ns = NagataSetup(setup, classes[i_name], classes[p_name])
            axioms = check_nagata(ns)
            hyps = verify_hypotheses(ns, sys) if axioms.passed else None
            overlap = classes[i_name].members & classes[p_name].members
            out.append(
                {
                    "i": i_name,
                    "p": p_name,
                    "axioms": axioms.passed,
                    "hypotheses": None if hyps is None else hyps.passed,
                    "mixed": (
                        classes[i_name].members != everything
                        and classes[p_name].members != isos
                        and overlap != isos
                    ),
                }
            )
    return out
