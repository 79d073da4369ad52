"""Čech nerves, geometric pair declarations, descent-based extension of
coefficient systems, and the localization premise checker.

An atlas presents an object by a cover whose base changes against the
declared sub-setup land in a chosen cover class.  Its Čech nerve (truncated
at level two) is built from the pullback oracle, with every structure map
found by mediator search and every simplicial identity recomputed.  On top
of that sit the two extension routes: limits of coefficient lattices over
nerves (descent) and colimits of exceptional pushforwards (codescent,
rendered as an order-congruence quotient), plus the premise checker for
localization problems.  The localized category itself is never built.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .fincat import (
    FinCategory,
    FunctorData,
    full_subcategory,
    verify_product,
)
from .lattices import CoefficientSystem, FiniteLattice, LatticeMap
from .report import MalformedInputError, ResourceLimitError, VerificationReport
from .setups import EdgeClass, GeometricSetup, check_geometric_setup


# -- atlases ---------------------------------------------------------------


@dataclass
class Atlas:
    """A cover x: X -> X' whose base changes against the declared objects
    are required to land in the cover class `s`.

    The invariant is oracle-checked by `check_atlas`, not trusted."""

    setup: GeometricSetup
    x: str
    s: EdgeClass
    small_objects: tuple[str, ...]

    def __post_init__(self):
        c = self.setup.category
        if self.x not in c.morphisms:
            raise MalformedInputError(f"unknown atlas morphism {self.x!r}")
        self.small_objects = tuple(self.small_objects)
        unknown = [y for y in self.small_objects if y not in c.objects]
        if unknown:
            raise MalformedInputError(f"unknown objects {unknown[:3]}")

    @property
    def source(self) -> str:
        return self.setup.category.src(self.x)

    @property
    def target(self) -> str:
        return self.setup.category.dst(self.x)


def check_atlas(a: Atlas) -> VerificationReport:
    """Every map Y -> target from a declared object base-changes the cover
    to a map in the cover class.  Missing fiber products count as coverage
    gaps, mirroring the partial pullback oracle."""
    rep = VerificationReport("atlas")
    c = a.setup.category
    covered, gaps = 0, 0
    witness = None
    for y in a.small_objects:
        for g in c.hom(y, a.target):
            pb = a.setup.pullback_opt(a.x, g)
            if pb is None:
                gaps += 1
                continue
            covered += 1
            _, _, q = pb
            if q not in a.s and witness is None:
                witness = {"object": y, "along": g, "base-change": q}
    rep.add(
        "base-changes-in-cover-class",
        witness is None,
        witness or {"covered": covered, "gaps": gaps},
        anchor="atlas-base-change",
    )
    return rep


def identity_atlas(setup: GeometricSetup, s: EdgeClass, small_objects, obj: str) -> Atlas:
    return Atlas(setup, setup.category.identity[obj], s, tuple(small_objects))


def has_section(c: FinCategory, x: str) -> bool:
    return any(c.comp(x, s) == c.identity[c.dst(x)] for s in c.hom(c.dst(x), c.src(x)))


# -- Čech nerves -----------------------------------------------------------


def _mediator(c: FinCategory, src_obj: str, dst_obj: str, conditions) -> str:
    """The unique w: src -> dst with proj . w = want for every condition."""
    cands = [
        w
        for w in c.hom(src_obj, dst_obj)
        if all(c.comp(proj, w) == want for proj, want in conditions)
    ]
    if len(cands) != 1:
        raise MalformedInputError(
            f"structure map {src_obj!r} -> {dst_obj!r} not unique ({len(cands)} candidates)"
        )
    return cands[0]


@dataclass
class CechDiagram:
    """Iterated self-fiber-products of an atlas, truncated at level m <= 2.

    faces[(n, i)] is the map X_n -> X_{n-1} dropping coordinate i;
    degeneracies[(n, i)] repeats coordinate i; aug[n] is the augmentation
    X_n -> X'.  All simplicial and augmentation identities are recomputed
    on construction."""

    setup: GeometricSetup
    atlas: Atlas
    m: int
    objects: tuple[str, ...]
    faces: dict
    degeneracies: dict
    aug: tuple[str, ...]

    def __post_init__(self):
        c = self.setup.category
        if len(self.objects) != self.m + 1 or len(self.aug) != self.m + 1:
            raise MalformedInputError("diagram levels do not match the truncation")
        for n in range(self.m + 1):
            if c.morphisms[self.aug[n]] != (self.objects[n], c.dst(self.atlas.x)):
                raise MalformedInputError(f"augmentation at level {n} mistyped")
        for (n, i), d in self.faces.items():
            if c.morphisms[d] != (self.objects[n], self.objects[n - 1]):
                raise MalformedInputError(f"face ({n}, {i}) mistyped")
        for (n, i), s in self.degeneracies.items():
            if c.morphisms[s] != (self.objects[n], self.objects[n + 1]):
                raise MalformedInputError(f"degeneracy ({n}, {i}) mistyped")
        self._check_identities()

    def _check_identities(self):
        c = self.setup.category
        d, s, a = self.faces, self.degeneracies, self.aug
        def eq(lhs, rhs, what):
            if lhs != rhs:
                raise MalformedInputError(f"simplicial identity fails: {what}")
        if self.m >= 1:
            for i in (0, 1):
                eq(c.comp(d[(1, i)], s[(0, 0)]), c.identity[self.objects[0]], f"d{i}s0")
                eq(c.comp(a[0], d[(1, i)]), a[1], f"aug d{i}")
            eq(c.comp(a[1], s[(0, 0)]), a[0], "aug s0")
        if self.m == 2:
            for i in (0, 1):
                for j in range(i + 1, 3):
                    eq(
                        c.comp(d[(1, i)], d[(2, j)]),
                        c.comp(d[(1, j - 1)], d[(2, i)]),
                        f"d{i}d{j}",
                    )
            eq(c.comp(d[(2, 0)], s[(1, 0)]), c.identity[self.objects[1]], "d0s0")
            eq(c.comp(d[(2, 1)], s[(1, 0)]), c.identity[self.objects[1]], "d1s0")
            eq(c.comp(d[(2, 2)], s[(1, 0)]), c.comp(s[(0, 0)], d[(1, 1)]), "d2s0")
            eq(c.comp(d[(2, 0)], s[(1, 1)]), c.comp(s[(0, 0)], d[(1, 0)]), "d0s1")
            eq(c.comp(d[(2, 1)], s[(1, 1)]), c.identity[self.objects[1]], "d1s1")
            eq(c.comp(d[(2, 2)], s[(1, 1)]), c.identity[self.objects[1]], "d2s1")
            eq(c.comp(s[(1, 0)], s[(0, 0)]), c.comp(s[(1, 1)], s[(0, 0)]), "s0s0")
            for i in (0, 1, 2):
                eq(c.comp(a[1], d[(2, i)]), a[2], f"aug d{i} level 2")


def cech_nerve(setup: GeometricSetup, atlas: Atlas, m: int) -> CechDiagram:
    """The nerve of an atlas, built from the canonical pullback oracle.

    A missing fiber product in the carrier raises; callers that can fall
    back to a lower truncation do so explicitly."""
    if not 0 <= m <= 2:
        raise MalformedInputError("truncation level must be 0, 1, or 2")
    c = setup.category
    x = atlas.x
    x0 = c.src(x)
    objects = [x0]
    faces: dict = {}
    degs: dict = {}
    aug = [x]
    if m >= 1:
        apex, p, q = setup.pullback(x, x)
        objects.append(apex)
        # coordinate convention: p remembers the first factor, q the second
        faces[(1, 0)] = q
        faces[(1, 1)] = p
        degs[(0, 0)] = _mediator(
            c, x0, apex, [(p, c.identity[x0]), (q, c.identity[x0])]
        )
        aug.append(c.comp(x, p))
    if m == 2:
        d0, d1 = faces[(1, 0)], faces[(1, 1)]
        x1 = objects[1]
        apex2, u, v = setup.pullback(d0, d1)
        objects.append(apex2)
        faces[(2, 0)] = v
        faces[(2, 2)] = u
        faces[(2, 1)] = _mediator(
            c, apex2, x1, [(d1, c.comp(d1, u)), (d0, c.comp(d0, v))]
        )
        degs[(1, 0)] = _mediator(
            c, x1, apex2, [(u, c.comp(degs[(0, 0)], d1)), (v, c.identity[x1])]
        )
        degs[(1, 1)] = _mediator(
            c, x1, apex2, [(u, c.identity[x1]), (v, c.comp(degs[(0, 0)], d0))]
        )
        aug.append(c.comp(aug[1], u))
    return CechDiagram(setup, atlas, m, tuple(objects), faces, degs, tuple(aug))


def best_nerve(setup: GeometricSetup, atlas: Atlas, m_max: int = 2) -> CechDiagram:
    """The deepest nerve the carrier supports, down to level one."""
    last = None
    for m in range(min(m_max, 2), 0, -1):
        try:
            return cech_nerve(setup, atlas, m)
        except MalformedInputError as exc:
            last = exc
    raise MalformedInputError(f"no overlap object in the carrier: {last}")


# -- pair declarations -----------------------------------------------------


@dataclass
class PairDeclaration:
    """A sub-setup inside an ambient setup with cover classes on both
    levels and candidate atlases per ambient object.

    The ambient exceptional class is `big.e`; the sub-level classes are
    given as morphism-id sets and induced on the full subcategory."""

    kind: str
    big: GeometricSetup
    small_objects: tuple[str, ...]
    s_small: frozenset
    s_big: frozenset
    e_small: frozenset
    atlases: dict

    def __post_init__(self):
        if self.kind not in ("nice", "exceptional"):
            raise MalformedInputError(f"unknown pair kind {self.kind!r}")
        self.small_objects = tuple(self.small_objects)
        c = self.big.category
        unknown = [y for y in self.small_objects if y not in c.objects]
        if unknown:
            raise MalformedInputError(f"unknown objects {unknown[:3]}")
        for name, members in (("s_small", self.s_small), ("s_big", self.s_big), ("e_small", self.e_small)):
            bad = sorted(set(members) - set(c.morphism_ids))
            if bad:
                raise MalformedInputError(f"{name} mentions unknown morphisms {bad[:3]}")
        self.atlases = {k: tuple(v) for k, v in self.atlases.items()}

    @cached_property
    def small(self) -> FinCategory:
        sub = full_subcategory(self.big.category, self.small_objects)
        sizes = getattr(self.big.category, "object_size", None)
        if sizes is not None:
            sub.object_size = {x: sizes[x] for x in sub.objects}  # type: ignore[attr-defined]
        return sub

    def small_setup(self, members) -> GeometricSetup:
        return GeometricSetup(self.small, EdgeClass(self.small, frozenset(members)))


def check_nice_pair(pd: PairDeclaration) -> VerificationReport:
    """The four setup axioms, cover-class restriction, atlas existence, and
    base change of exceptional maps along atlases."""
    rep = VerificationReport("nice-pair")
    c = pd.big.category

    setups = (
        ("small-exceptional", pd.small_setup(pd.e_small)),
        ("small-cover", pd.small_setup(pd.s_small)),
        ("big-exceptional", pd.big),
        ("big-cover", GeometricSetup(c, EdgeClass(c, frozenset(pd.s_big)))),
    )
    for name, s in setups:
        sub = check_geometric_setup(s)
        bad = sub.first_failure()
        rep.add(
            f"setup-{name}",
            sub.passed,
            {"check": bad.name, "witness": bad.witness} if bad else {},
            anchor="pair-condition-a",
        )

    small_ids = set(pd.small.morphism_ids)
    mismatch = sorted((set(pd.s_big) & small_ids) ^ set(pd.s_small))
    rep.add(
        "cover-class-restricts",
        not mismatch,
        {"morphism": mismatch[0]} if mismatch else {},
        anchor="pair-condition-b",
    )

    witness = None
    for obj in c.objects:
        lst = pd.atlases.get(obj, ())
        if not lst:
            witness = {"object": obj, "reason": "no atlas declared"}
            break
        for a in lst:
            if a.target != obj or a.source not in pd.small_objects:
                witness = {"object": obj, "atlas": a.x, "reason": "mistyped atlas"}
                break
            sub = check_atlas(a)
            if not sub.passed:
                witness = {"object": obj, "atlas": a.x, "witness": sub.first_failure().witness}
                break
        if witness:
            break
    rep.add("atlases-exist", witness is None, witness or {}, anchor="pair-condition-c")

    covered, gaps = 0, 0
    witness = None
    for f in sorted(pd.big.e.members):
        for a in pd.atlases.get(c.dst(f), ()):
            pb = pd.big.pullback_opt(f, a.x)
            if pb is None:
                gaps += 1
                continue
            covered += 1
            _, _, q = pb
            if q not in pd.e_small and witness is None:
                witness = {"morphism": f, "atlas": a.x, "base-change": q}
    rep.add(
        "exceptional-base-change",
        witness is None,
        witness or {"covered": covered, "gaps": gaps},
        anchor="pair-condition-d",
    )
    return rep


# -- hypercovers and exceptional pairs -------------------------------------


@dataclass
class Hypercover:
    """A levelwise morphism of truncated nerves over a fixed morphism."""

    f: str
    src_nerve: CechDiagram
    dst_nerve: CechDiagram
    levels: tuple[str, ...]


def _level_maps(pd: PairDeclaration, nx: CechDiagram, ny: CechDiagram, n: int, below: str):
    """Candidates for level n of a nerve morphism, given level n-1."""
    c = pd.big.category
    for cand in c.hom(nx.objects[n], ny.objects[n]):
        if cand not in pd.e_small:
            continue
        if any(
            c.comp(ny.faces[(n, i)], cand) != c.comp(below, nx.faces[(n, i)])
            for i in range(n + 1)
        ):
            continue
        yield cand


def find_hypercovers(pd: PairDeclaration, f: str, m: int = 1):
    """All hypercovers of f over declared atlas pairs, plus a flag telling
    whether some atlas pair could not be evaluated (missing nerve level)."""
    c = pd.big.category
    out = []
    limited = False
    for xa in pd.atlases.get(c.src(f), ()):
        for ya in pd.atlases.get(c.dst(f), ()):
            try:
                nx = cech_nerve(pd.big, xa, m)
                ny = cech_nerve(pd.big, ya, m)
            except MalformedInputError:
                limited = True
                continue
            for f0 in c.hom(nx.objects[0], ny.objects[0]):
                if f0 not in pd.e_small:
                    continue
                if c.comp(ya.x, f0) != c.comp(f, xa.x):
                    continue
                if m == 0:
                    out.append(Hypercover(f, nx, ny, (f0,)))
                    continue
                for f1 in _level_maps(pd, nx, ny, 1, f0):
                    if c.comp(ny.degeneracies[(0, 0)], f0) != c.comp(
                        f1, nx.degeneracies[(0, 0)]
                    ):
                        continue
                    if m == 1:
                        out.append(Hypercover(f, nx, ny, (f0, f1)))
                        continue
                    for f2 in _level_maps(pd, nx, ny, 2, f1):
                        if any(
                            c.comp(ny.degeneracies[(1, i)], f1)
                            != c.comp(f2, nx.degeneracies[(1, i)])
                            for i in (0, 1)
                        ):
                            continue
                        out.append(Hypercover(f, nx, ny, (f0, f1, f2)))
    return out, limited


def find_hypercover(pd: PairDeclaration, f: str, m: int = 1) -> Hypercover | None:
    found, limited = find_hypercovers(pd, f, m)
    if found:
        return found[0]
    if limited:
        raise ResourceLimitError(f"hypercover search for {f!r} exhausted the carrier")
    return None


def check_exceptional_pair(pd: PairDeclaration, m: int = 1) -> VerificationReport:
    """Cover class inside the exceptional class, and a bounded hypercover
    search per ambient exceptional morphism.  Search-bound exhaustion is
    reported as a resource limit, distinct from proven absence."""
    rep = VerificationReport("exceptional-pair")
    stray = sorted(set(pd.s_small) - set(pd.e_small)) + sorted(
        set(pd.s_big) - pd.big.e.members
    )
    rep.add(
        "cover-inside-exceptional",
        not stray,
        {"morphism": stray[0]} if stray else {},
        anchor="pair-cover-containment",
    )
    for f in sorted(pd.big.e.members):
        found, limited = find_hypercovers(pd, f, m)
        name = f"hypercover:{f}"
        if found:
            hc = found[0]
            rep.add(
                name,
                True,
                {"levels": list(hc.levels), "src-atlas": hc.src_nerve.atlas.x, "dst-atlas": hc.dst_nerve.atlas.x},
                anchor="pair-hypercover-matching",
            )
        elif limited:
            rep.add_limit(
                name,
                {"morphism": f, "reason": "nerve level outside the carrier"},
                anchor="pair-hypercover-matching",
            )
        else:
            rep.add(
                name,
                False,
                {"morphism": f, "reason": "no levelwise exceptional matching"},
                anchor="pair-hypercover-matching",
            )
    return rep


# -- descent of coefficient systems ----------------------------------------


def descent_elements(sys: CoefficientSystem, nerve: CechDiagram) -> list[str]:
    """Elements of D(X0) equalized by the two restrictions to the overlap."""
    if nerve.m < 1:
        raise MalformedInputError("descent needs at least the overlap level")
    p0 = sys.pull(nerve.faces[(1, 0)])
    p1 = sys.pull(nerve.faces[(1, 1)])
    return [l for l in sys.lattice(nerve.objects[0]).elements if p0(l) == p1(l)]


def descent_lattice(sys: CoefficientSystem, nerve: CechDiagram) -> FiniteLattice:
    """The equalizer sub-lattice, with the tensor restricted when present."""
    base = sys.lattice(nerve.objects[0])
    els = descent_elements(sys, nerve)
    keep = set(els)
    leq = frozenset(p for p in base.leq if p[0] in keep and p[1] in keep)
    tensor = None
    if base.tensor_table is not None:
        tensor = {}
        for a in els:
            for b in els:
                t = base.tensor_table[(a, b)]
                if t not in keep:
                    raise MalformedInputError(
                        f"tensor does not restrict to descent data at ({a!r}, {b!r})"
                    )
                tensor[(a, b)] = t
    return FiniteLattice(tuple(els), leq, tensor)


def check_descent(
    setup: GeometricSetup, sys: CoefficientSystem, atlas: Atlas, m_max: int = 2
) -> VerificationReport:
    """Restriction along the atlas is an order-isomorphism onto descent
    data; the overlap-cocycle condition is asserted when the carrier has a
    level-two object (with thin coefficients it is implied by the equalizer
    equation, so a shallower nerve records the level and nothing else)."""
    rep = VerificationReport("descent")
    try:
        nerve = best_nerve(setup, atlas, m_max)
    except MalformedInputError:
        rep.add_limit(
            "descent-comparison",
            {"atlas": atlas.x, "reason": "overlap object outside the carrier"},
            anchor="cech-descent",
        )
        return rep
    dd = descent_elements(sys, nerve)

    witness = None
    if nerve.m >= 2:
        c = setup.category
        vertex = (
            c.comp(nerve.faces[(1, 1)], nerve.faces[(2, 2)]),
            c.comp(nerve.faces[(1, 0)], nerve.faces[(2, 2)]),
            c.comp(nerve.faces[(1, 0)], nerve.faces[(2, 0)]),
        )
        pulls = [sys.pull(v) for v in vertex]
        for l in dd:
            vals = {p(l) for p in pulls}
            if len(vals) != 1:
                witness = {"element": l, "values": sorted(vals)}
                break
    rep.add(
        "cocycle-condition",
        witness is None,
        witness or {"level": nerve.m, "vacuous": nerve.m < 2},
        anchor="cech-cocycle",
    )

    x = atlas.x
    base = sys.lattice(atlas.target)
    px = sys.pull(x)
    image = {px(l) for l in base.elements}
    witness = None
    if len(image) != len(base.elements):
        witness = {"reason": "restriction not injective"}
    elif image != set(dd):
        diff = sorted(image ^ set(dd))
        witness = {"reason": "image differs from descent data", "element": diff[0]}
    else:
        for a in base.elements:
            for b in base.elements:
                if base.le(a, b) != sys.lattice(nerve.objects[0]).le(px(a), px(b)):
                    witness = {"reason": "order not reflected", "pair": [a, b]}
                    break
            if witness:
                break
    rep.add(
        "descent-comparison",
        witness is None,
        witness or {"atlas": x, "matched": len(dd), "level": nerve.m},
        anchor="cech-descent",
    )
    return rep


def compare_atlases(
    pd: PairDeclaration, sys: CoefficientSystem, a1: Atlas, a2: Atlas, m_max: int = 2
) -> VerificationReport:
    """Canonical comparison of descent data over two atlases of the same
    object, through the product atlas rather than any localization."""
    c = pd.big.category
    if c.dst(a1.x) != c.dst(a2.x):
        raise MalformedInputError("atlases cover different objects")
    rep = VerificationReport("atlas-independence")
    try:
        n1 = best_nerve(pd.big, a1, m_max)
        n2 = best_nerve(pd.big, a2, m_max)
        apex, r1, r2 = pd.big.pullback(a1.x, a2.x)
    except MalformedInputError:
        rep.add_limit(
            "comparison-unique",
            {"atlases": [a1.x, a2.x], "reason": "product atlas outside the carrier"},
            anchor="atlas-independence-zigzag",
        )
        return rep
    dd1 = descent_elements(sys, n1)
    dd2 = descent_elements(sys, n2)
    p1 = sys.pull(r1)
    p2 = sys.pull(r2)

    table = {}
    witness = None
    for l1 in dd1:
        cands = [l2 for l2 in dd2 if p1(l1) == p2(l2)]
        if len(cands) != 1:
            witness = {"element": l1, "candidates": len(cands)}
            break
        table[l1] = cands[0]
    rep.add(
        "comparison-unique",
        witness is None,
        witness or {"size": len(dd1)},
        anchor="atlas-independence-zigzag",
    )
    if witness is not None:
        return rep

    L1 = descent_lattice(sys, n1)
    L2 = descent_lattice(sys, n2)
    witness = None
    if len(set(table.values())) != len(dd2):
        witness = {"reason": "comparison not bijective"}
    else:
        for a in dd1:
            for b in dd1:
                if L1.le(a, b) != L2.le(table[a], table[b]):
                    witness = {"reason": "order not preserved", "pair": [a, b]}
                    break
            if witness:
                break
    rep.add(
        "comparison-order-iso",
        witness is None,
        witness or {"size": len(dd1)},
        anchor="atlas-independence-zigzag",
    )
    return rep


def _transport_atlas(pd: PairDeclaration, chosen: dict, obj: str) -> str:
    """The atlas morphism used to present an object's coefficient lattice:
    the identity for sub-setup objects, the first declared atlas otherwise."""
    if obj in chosen:
        return chosen[obj].x
    return pd.big.category.identity[obj]


def _transport_pull(
    pd: PairDeclaration, sys: CoefficientSystem, lattices: dict, chosen: dict, f: str
) -> LatticeMap:
    """Restriction between presented lattices via the shared refinement
    X_A x_{B'} X_B; the value is the unique descent element matching on it."""
    c = pd.big.category
    src_o, dst_o = c.morphisms[f]
    xa = _transport_atlas(pd, chosen, src_o)
    xb = _transport_atlas(pd, chosen, dst_o)
    apex, a_leg, b_leg = pd.big.pullback(c.comp(f, xa), xb)
    if a_leg not in sys.restriction or b_leg not in sys.restriction:
        raise MalformedInputError(
            f"transport overlap for {f!r} lies outside the declared sub-setup"
        )
    pa = sys.pull(a_leg)
    pb = sys.pull(b_leg)
    table = {}
    for l in lattices[dst_o].elements:
        want = pb(l)
        cands = [mm for mm in lattices[src_o].elements if pa(mm) == want]
        if len(cands) != 1:
            raise MalformedInputError(
                f"restriction along {f!r} not determined by descent at {l!r}"
            )
        table[l] = cands[0]
    return LatticeMap(lattices[dst_o], lattices[src_o], table)


def extend_system_C(
    pd: PairDeclaration, sys: CoefficientSystem, m_max: int = 2, verify: bool = True
) -> CoefficientSystem:
    """Extend a coefficient system from the sub-setup to the ambient one by
    taking descent data over the chosen atlas of each new object.

    Gated by the pair axioms (skippable on carriers where the exhaustive
    setup scan is out of reach) and, always, by the descent precondition
    for every declared atlas whose covered object already carries a
    lattice."""
    if pd.kind != "nice":
        raise MalformedInputError("extension of restrictions needs a nice pair")
    if verify:
        gate = check_nice_pair(pd)
        if not gate.passed:
            bad = gate.first_failure()
            raise MalformedInputError(f"pair axioms fail: {bad.name} with {bad.witness}")
    c = pd.big.category
    small = set(pd.small.objects)
    for obj in sorted(pd.atlases):
        if obj not in small:
            continue
        for a in pd.atlases[obj]:
            sub = check_descent(pd.big, sys, a, m_max)
            bad = sub.first_failure()
            if bad is not None:
                raise MalformedInputError(
                    f"descent precondition fails for atlas {a.x!r}: {bad.witness}"
                )

    lattices = {}
    chosen = {}
    for obj in c.objects:
        if obj in small:
            lattices[obj] = sys.lattice(obj)
        else:
            a = pd.atlases[obj][0]
            chosen[obj] = a
            lattices[obj] = descent_lattice(sys, best_nerve(pd.big, a, m_max))
    restriction = {}
    for f in c.morphism_ids:
        src_o, dst_o = c.morphisms[f]
        if src_o in small and dst_o in small:
            restriction[f] = sys.pull(f)
        else:
            restriction[f] = _transport_pull(pd, sys, lattices, chosen, f)
    return CoefficientSystem(GeometricSetup(c, pd.big.e), lattices, restriction)


# -- codescent of exceptional maps -----------------------------------------


def _push(sa, f: str) -> LatticeMap:
    m = sa.shriek.get(f)
    if m is None:
        raise MalformedInputError(f"no exceptional map for {f!r}")
    return m


def codescent_classes(sa, nerve: CechDiagram):
    """The order-congruence quotient of D(X0) identifying the two
    pushforwards from the overlap: reachability closure of the lattice
    order together with both directions of the identification, then
    strongly-connected classes.  Returns (elements, reach, class_of)."""
    if nerve.m < 1:
        raise MalformedInputError("codescent needs at least the overlap level")
    sys = sa.sys
    L0 = sys.lattice(nerve.objects[0])
    L1 = sys.lattice(nerve.objects[1])
    e0 = _push(sa, nerve.faces[(1, 0)])
    e1 = _push(sa, nerve.faces[(1, 1)])
    els = list(L0.elements)
    idx = {a: i for i, a in enumerate(els)}
    n = len(els)
    reach = [[False] * n for _ in range(n)]
    for a, b in L0.leq:
        reach[idx[a]][idx[b]] = True
    for m in L1.elements:
        i, j = idx[e0(m)], idx[e1(m)]
        reach[i][j] = True
        reach[j][i] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    class_of = {}
    for i, a in enumerate(els):
        rep = next(b for j, b in enumerate(els) if reach[i][j] and reach[j][i])
        class_of[a] = rep
    return els, reach, class_of


def check_codescent(sa, nerve: CechDiagram) -> VerificationReport:
    """The quotient maps order-isomorphically onto the covered object's
    lattice through the pushforward along the atlas."""
    rep = VerificationReport("codescent")
    els, reach, class_of = codescent_classes(sa, nerve)
    push_x = _push(sa, nerve.aug[0])
    target = sa.sys.lattice(sa.sys.setup.category.dst(nerve.aug[0]))
    idx = {a: i for i, a in enumerate(els)}
    witness = None
    for a in els:
        for b in els:
            if reach[idx[a]][idx[b]] != target.le(push_x(a), push_x(b)):
                witness = {"pair": [a, b], "reason": "order mismatch"}
                break
        if witness:
            break
    if witness is None:
        hit = {push_x(a) for a in els}
        if hit != set(target.elements):
            witness = {"reason": "not surjective", "element": sorted(set(target.elements) - hit)[0]}
    rep.add(
        "colimit-comparison",
        witness is None,
        witness or {"classes": len(set(class_of.values())), "atlas": nerve.atlas.x},
        anchor="cech-codescent",
    )
    return rep


def extended_shriek_map(pd: PairDeclaration, sa, hc: Hypercover) -> LatticeMap:
    """The map induced on codescent quotients by a hypercover's level maps."""
    c = pd.big.category
    sys = sa.sys
    src_o, dst_o = c.morphisms[hc.f]
    for nerve in (hc.src_nerve, hc.dst_nerve):
        gate = check_codescent(sa, nerve)
        if not gate.passed:
            raise MalformedInputError(
                f"codescent precondition fails for atlas {nerve.atlas.x!r}: "
                f"{gate.first_failure().witness}"
            )
    push_x = _push(sa, hc.src_nerve.aug[0])
    push_y = _push(sa, hc.dst_nerve.aug[0])
    level0 = _push(sa, hc.levels[0])
    LA = sys.lattice(src_o)
    LB = sys.lattice(dst_o)
    LX = sys.lattice(hc.src_nerve.objects[0])
    table = {}
    for l in LA.elements:
        vals = {push_y(level0(a)) for a in LX.elements if push_x(a) == l}
        if len(vals) != 1:
            raise MalformedInputError(
                f"extension along {hc.f!r} not well defined at {l!r}"
            )
        table[l] = vals.pop()
    return LatticeMap(LA, LB, table)


def extend_system_E(pd: PairDeclaration, sa, m: int = 1) -> dict:
    """Exceptional maps for every ambient exceptional morphism, each induced
    on colimits from the first hypercover the bounded search finds."""
    if pd.kind != "exceptional":
        raise MalformedInputError("extension of exceptional maps needs an exceptional pair")
    out = {}
    for f in sorted(pd.big.e.members):
        hc = find_hypercover(pd, f, m)
        if hc is None:
            raise MalformedInputError(f"no hypercover matches {f!r}")
        out[f] = extended_shriek_map(pd, sa, hc)
    return out


# -- localization premises -------------------------------------------------


@dataclass
class LocalizationProblem:
    """A functor together with the class it is meant to invert.

    The precondition that the class lands in isomorphisms is recomputed."""

    p: FunctorData
    r: frozenset

    def __post_init__(self):
        src = self.p.source
        self.r = frozenset(self.r)
        unknown = sorted(self.r - set(src.morphism_ids))
        if unknown:
            raise MalformedInputError(f"unknown morphisms in class: {unknown[:3]}")
        for m in sorted(self.r):
            if self.p.on_mor(m) not in self.p.target.iso_ids:
                raise MalformedInputError(f"{m!r} is not sent to an isomorphism")


def fiber_category(lp: LocalizationProblem, d: str) -> FinCategory:
    """Objects over d and morphisms over its identity."""
    src, dst = lp.p.source, lp.p.target
    objs = tuple(x for x in src.objects if lp.p.on_obj(x) == d)
    keep = {
        m
        for m in src.morphism_ids
        if src.src(m) in objs and src.dst(m) in objs and lp.p.on_mor(m) == dst.identity[d]
    }
    compose = {(g, f): h for (g, f), h in src.compose.items() if g in keep and f in keep}
    return FinCategory(
        objs,
        {m: src.morphisms[m] for m in sorted(keep)},
        {x: src.identity[x] for x in objs},
        compose,
    )


def check_localization_premises(lp: LocalizationProblem) -> VerificationReport:
    """Surjectivity of the functor on nerve cells up to dimension two, and
    binary products in every fiber with projections in the inverted class
    (identities allowed)."""
    rep = VerificationReport("localization-premises")
    src, dst = lp.p.source, lp.p.target

    witness = None
    hit_objs = {lp.p.on_obj(x) for x in src.objects}
    missing = sorted(set(dst.objects) - hit_objs)
    if missing:
        witness = {"dimension": 0, "simplex": missing[0]}
    if witness is None:
        hit_mors = {lp.p.on_mor(m) for m in src.morphism_ids}
        missing = sorted(set(dst.morphism_ids) - hit_mors)
        if missing:
            witness = {"dimension": 1, "simplex": missing[0]}
    if witness is None:
        hit_pairs = {
            (lp.p.on_mor(g), lp.p.on_mor(f)) for g, f in src.composable_pairs
        }
        for pair in dst.composable_pairs:
            if pair not in hit_pairs:
                witness = {"dimension": 2, "simplex": list(pair)}
                break
    rep.add(
        "nerve-surjectivity",
        witness is None,
        witness or {"objects": len(dst.objects), "morphisms": len(dst.morphism_ids)},
        anchor="localization-premise-nerve",
    )

    witness = None
    checked = 0
    for d in dst.objects:
        fib = fiber_category(lp, d)
        for c1 in fib.objects:
            for c2 in fib.objects:
                checked += 1
                if not _fiber_product_exists(lp, fib, c1, c2):
                    witness = {"object": d, "pair": [c1, c2]}
                    break
            if witness:
                break
        if witness:
            break
    rep.add(
        "fiber-products",
        witness is None,
        witness or {"pairs": checked},
        anchor="localization-premise-products",
    )
    return rep


def _fiber_product_exists(lp: LocalizationProblem, fib: FinCategory, c1: str, c2: str) -> bool:
    for apex in fib.objects:
        for l1 in fib.hom(apex, c1):
            if l1 not in lp.r and not fib.is_identity(l1):
                continue
            for l2 in fib.hom(apex, c2):
                if l2 not in lp.r and not fib.is_identity(l2):
                    continue
                if verify_product(fib, apex, (l1, l2), (c1, c2)):
                    return True
    return False
