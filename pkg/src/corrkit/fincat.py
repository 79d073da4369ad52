"""Explicit finite categories, functors, and limit search by universal property.

A category is a set of opaque string ids plus total tables; every structural
law is decidable by exhaustive enumeration.  Object and morphism ids carry a
declared total order (tuple sort) so all derived enumerations are
deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .report import MalformedInputError, VerificationReport


@dataclass(eq=True)
class FinCategory:
    objects: tuple[str, ...]
    morphisms: dict[str, tuple[str, str]]  # id -> (source, target)
    identity: dict[str, str]  # object -> identity morphism id
    compose: dict[tuple[str, str], str]  # (g, f) -> g.f when dst(f) == src(g)

    # -- basic accessors -------------------------------------------------

    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def dst(self, m: str) -> str:
        return self.morphisms[m][1]

    def hom(self, x: str, y: str) -> list[str]:
        return [m for m in self.morphism_ids if self.morphisms[m] == (x, y)]

    def comp(self, g: str, f: str) -> str:
        """g after f."""
        if self.dst(f) != self.src(g):
            raise MalformedInputError(f"cannot compose {g!r} after {f!r}")
        return self.compose[(g, f)]

    def comp_chain(self, *ms: str) -> str:
        """Composite of a chain listed source-to-target: comp_chain(f, g) = g.f."""
        out = ms[0]
        for m in ms[1:]:
            out = self.comp(m, out)
        return out

    def is_identity(self, m: str) -> bool:
        return self.identity.get(self.src(m)) == m and self.src(m) == self.dst(m)

    @cached_property
    def morphism_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.morphisms))

    @cached_property
    def composable_pairs(self) -> tuple[tuple[str, str], ...]:
        out = []
        for g in self.morphism_ids:
            for f in self.morphism_ids:
                if self.dst(f) == self.src(g):
                    out.append((g, f))
        return tuple(out)

    @cached_property
    def iso_ids(self) -> frozenset[str]:
        isos = set()
        inverse = {}
        for m in self.morphism_ids:
            x, y = self.morphisms[m]
            for n in self.hom(y, x):
                if self.comp(n, m) == self.identity[x] and self.comp(m, n) == self.identity[y]:
                    isos.add(m)
                    inverse[m] = n
                    break
        self._inverse = inverse
        return frozenset(isos)

    def inverse(self, m: str) -> str:
        if m not in self.iso_ids:
            raise MalformedInputError(f"{m!r} is not an isomorphism")
        return self._inverse[m]

    @cached_property
    def mono_ids(self) -> frozenset[str]:
        monos = set()
        for f in self.morphism_ids:
            x = self.src(f)
            cancellable = True
            for t in self.objects:
                seen: dict[str, str] = {}
                for g in self.hom(t, x):
                    fg = self.comp(f, g)
                    if fg in seen and seen[fg] != g:
                        cancellable = False
                        break
                    seen[fg] = g
                if not cancellable:
                    break
            if cancellable:
                monos.add(f)
        return frozenset(monos)

    def validate(self) -> None:
        rep = check_category(self)
        bad = rep.first_failure()
        if bad is not None:
            raise MalformedInputError(f"invalid category: {bad.name} {bad.witness}")


@dataclass(eq=True)
class FunctorData:
    source: FinCategory
    target: FinCategory
    obj_map: dict[str, str]
    mor_map: dict[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_mor(self, m: str) -> str:
        return self.mor_map[m]


def check_category(c: FinCategory) -> VerificationReport:
    """Exhaustive associativity / unit / closure audit with localized witnesses."""
    rep = VerificationReport("check-category")

    dangling = []
    for m, (x, y) in c.morphisms.items():
        if x not in c.objects or y not in c.objects:
            dangling.append(m)
    for x in c.objects:
        i = c.identity.get(x)
        if i is None or i not in c.morphisms or c.morphisms[i] != (x, x):
            dangling.append(f"identity:{x}")
    rep.add("well-formed-ids", not dangling, {"dangling": sorted(dangling)})
    if dangling:
        return rep

    bad_entry = None
    table_pairs = set(c.compose)
    for g, f in c.composable_pairs:
        h = c.compose.get((g, f))
        if h is None:
            bad_entry = {"pair": [g, f], "problem": "missing entry"}
            break
        if h not in c.morphisms:
            bad_entry = {"pair": [g, f], "problem": "unlisted result", "result": h}
            break
        if c.morphisms[h] != (c.src(f), c.dst(g)):
            bad_entry = {"pair": [g, f], "problem": "wrong typing", "result": h}
            break
    if bad_entry is None:
        extra = table_pairs - set(c.composable_pairs)
        if extra:
            g, f = sorted(extra)[0]
            bad_entry = {"pair": [g, f], "problem": "non-composable entry"}
    rep.add("composition-table-closed", bad_entry is None, bad_entry or {})
    if bad_entry is not None:
        return rep

    unit_witness = None
    for m in c.morphism_ids:
        x, y = c.morphisms[m]
        if c.comp(m, c.identity[x]) != m or c.comp(c.identity[y], m) != m:
            unit_witness = {"morphism": m}
            break
    rep.add("identity-units", unit_witness is None, unit_witness or {})

    assoc_witness = None
    for g, f in c.composable_pairs:
        for h in c.morphism_ids:
            if c.dst(g) != c.src(h):
                continue
            if c.comp(h, c.comp(g, f)) != c.comp(c.comp(h, g), f):
                assoc_witness = {"triple": [h, g, f]}
                break
        if assoc_witness:
            break
    rep.add("associativity", assoc_witness is None, assoc_witness or {})
    return rep


def check_functor(F: FunctorData) -> VerificationReport:
    rep = VerificationReport("check-functor")
    s, t = F.source, F.target

    missing = [x for x in s.objects if x not in F.obj_map]
    missing += [m for m in s.morphism_ids if m not in F.mor_map]
    if missing:
        raise MalformedInputError(f"functor maps not total: {sorted(missing)[:5]}")

    typing_witness = None
    for m in s.morphism_ids:
        fm = F.mor_map[m]
        if fm not in t.morphisms:
            typing_witness = {"morphism": m, "problem": "image unlisted"}
            break
        if t.morphisms[fm] != (F.obj_map[s.src(m)], F.obj_map[s.dst(m)]):
            typing_witness = {"morphism": m, "problem": "source/target not preserved"}
            break
    rep.add("typing", typing_witness is None, typing_witness or {})
    if typing_witness:
        return rep

    id_witness = None
    for x in s.objects:
        if F.mor_map[s.identity[x]] != t.identity[F.obj_map[x]]:
            id_witness = {"object": x}
            break
    rep.add("identities", id_witness is None, id_witness or {})

    comp_witness = None
    for g, f in s.composable_pairs:
        if F.mor_map[s.comp(g, f)] != t.comp(F.mor_map[g], F.mor_map[f]):
            comp_witness = {"pair": [g, f]}
            break
    rep.add("composites", comp_witness is None, comp_witness or {})
    return rep


def identity_functor(c: FinCategory) -> FunctorData:
    return FunctorData(c, c, {x: x for x in c.objects}, {m: m for m in c.morphism_ids})


def compose_functors(G: FunctorData, F: FunctorData) -> FunctorData:
    if F.target is not G.source and F.target != G.source:
        raise MalformedInputError("functors not composable")
    return FunctorData(
        F.source,
        G.target,
        {x: G.obj_map[F.obj_map[x]] for x in F.obj_map},
        {m: G.mor_map[F.mor_map[m]] for m in F.mor_map},
    )


def core_groupoid(c: FinCategory) -> FinCategory:
    """Same objects, only the isomorphisms: the 1-categorical core."""
    keep = c.iso_ids
    morphisms = {m: c.morphisms[m] for m in c.morphism_ids if m in keep}
    compose = {
        (g, f): h for (g, f), h in c.compose.items() if g in keep and f in keep
    }
    return FinCategory(c.objects, morphisms, dict(c.identity), compose)


def opposite(c: FinCategory) -> FinCategory:
    morphisms = {m: (y, x) for m, (x, y) in c.morphisms.items()}
    compose = {(f, g): h for (g, f), h in c.compose.items()}
    return FinCategory(c.objects, morphisms, dict(c.identity), compose)


def wide_subcategory(c: FinCategory, members: frozenset[str] | set[str]) -> FinCategory:
    """All objects, morphisms restricted to `members` plus identities.

    Raises if the selection is not closed under composition.
    """
    keep = set(members) | set(c.identity.values())
    compose = {}
    for g, f in c.composable_pairs:
        if g in keep and f in keep:
            h = c.comp(g, f)
            if h not in keep:
                raise MalformedInputError(f"selection not closed: {g!r}.{f!r} = {h!r}")
            compose[(g, f)] = h
    return FinCategory(c.objects, {m: c.morphisms[m] for m in sorted(keep)}, dict(c.identity), compose)


def full_subcategory(c: FinCategory, objects) -> FinCategory:
    objs = tuple(x for x in c.objects if x in set(objects))
    keep = {m for m in c.morphism_ids if c.src(m) in objs and c.dst(m) in objs}
    compose = {(g, f): h for (g, f), h in c.compose.items() if g in keep and f in keep}
    return FinCategory(
        objs,
        {m: c.morphisms[m] for m in sorted(keep)},
        {x: c.identity[x] for x in objs},
        compose,
    )


# -- builders ------------------------------------------------------------


def discrete_category(objects) -> FinCategory:
    objects = tuple(objects)
    morphisms = {f"id_{x}": (x, x) for x in objects}
    identity = {x: f"id_{x}" for x in objects}
    compose = {(i, i): i for i in morphisms}
    return FinCategory(objects, morphisms, identity, compose)


def terminal_category() -> FinCategory:
    return discrete_category(("*",))


def poset_category(elements, leq) -> FinCategory:
    """Thin category on `elements`; `leq(a, b)` decides the order."""
    elements = tuple(elements)
    morphisms = {}
    for a in elements:
        for b in elements:
            if leq(a, b):
                morphisms[f"{a}<={b}"] = (a, b)
    identity = {a: f"{a}<={a}" for a in elements}
    compose = {}
    for g, (b1, c) in morphisms.items():
        for f, (a, b2) in morphisms.items():
            if b2 == b1:
                compose[(g, f)] = f"{a}<={c}"
    return FinCategory(elements, morphisms, identity, compose)


def chain_category(n: int) -> FinCategory:
    return poset_category([str(i) for i in range(n + 1)], lambda a, b: int(a) <= int(b))


# -- finite-set categories ----------------------------------------------


def _fn_id(src: str, dst: str, values: tuple[int, ...]) -> str:
    return f"{src}>{dst}:" + ".".join(str(v) for v in values)


def fn_values(m: str) -> tuple[int, ...]:
    tail = m.split(":", 1)[1]
    return tuple(int(v) for v in tail.split(".")) if tail else ()


def finset_category(sizes: dict[str, int]) -> FinCategory:
    """Skeletal category of finite sets: objects are named carriers with a
    declared cardinality, morphisms are all functions between them.

    Several objects may share a cardinality (used for transport tests).
    """
    objects = tuple(sorted(sizes))
    morphisms: dict[str, tuple[str, str]] = {}
    for a in objects:
        for b in objects:
            for values in itertools.product(range(sizes[b]), repeat=sizes[a]):
                morphisms[_fn_id(a, b, values)] = (a, b)
            if sizes[a] == 0:
                morphisms[_fn_id(a, b, ())] = (a, b)
    identity = {a: _fn_id(a, a, tuple(range(sizes[a]))) for a in objects}
    compose = {}
    for g, (b1, c) in morphisms.items():
        gv = fn_values(g)
        for f, (a, b2) in morphisms.items():
            if b2 != b1:
                continue
            fv = fn_values(f)
            compose[(g, f)] = _fn_id(a, c, tuple(gv[v] for v in fv))
    cat = FinCategory(objects, morphisms, identity, compose)
    cat.object_size = dict(sizes)  # type: ignore[attr-defined]
    return cat


def finset_skeleton(max_size: int) -> FinCategory:
    return finset_category({str(k): k for k in range(max_size + 1)})


def finset_size(c: FinCategory, obj: str) -> int:
    sizes = getattr(c, "object_size", None)
    if sizes is None:
        raise MalformedInputError("category carries no cardinality data")
    return sizes[obj]


def injections(c: FinCategory) -> frozenset[str]:
    return frozenset(m for m in c.morphism_ids if len(set(fn_values(m))) == len(fn_values(m)))


def surjections(c: FinCategory) -> frozenset[str]:
    out = set()
    for m in c.morphism_ids:
        target_size = finset_size(c, c.dst(m))
        if len(set(fn_values(m))) == target_size:
            out.add(m)
    return frozenset(out)


# -- limit search by universal property ----------------------------------


def terminal_objects(c: FinCategory) -> list[str]:
    return [t for t in c.objects if all(len(c.hom(x, t)) == 1 for x in c.objects)]


def _is_pullback(c: FinCategory, f: str, g: str, apex: str, p: str, q: str) -> bool:
    """Does (apex, p: apex->src f, q: apex->src g) satisfy the universal
    property of the cospan (f: X->Z, g: Y->Z)?  Checked against every object."""
    if c.comp(f, p) != c.comp(g, q):
        return False
    for t in c.objects:
        for u in c.hom(t, c.src(f)):
            fu = c.comp(f, u)
            for v in c.hom(t, c.src(g)):
                if fu != c.comp(g, v):
                    continue
                mediators = [
                    w
                    for w in c.hom(t, apex)
                    if c.comp(p, w) == u and c.comp(q, w) == v
                ]
                if len(mediators) != 1:
                    return False
    return True


def pullback_candidates(c: FinCategory, f: str, g: str) -> list[tuple[str, str, str]]:
    """All (apex, p, q) satisfying the pullback universal property of the
    cospan (f: X->Z, g: Y->Z), in deterministic order."""
    if c.dst(f) != c.dst(g):
        raise MalformedInputError("not a cospan")
    out = []
    for apex in c.objects:
        for p in c.hom(apex, c.src(f)):
            for q in c.hom(apex, c.src(g)):
                if _is_pullback(c, f, g, apex, p, q):
                    out.append((apex, p, q))
    return out


def _finset_canonical_pullback(c: FinCategory, f: str, g: str) -> tuple[str, str, str] | None:
    """Fast path over all-function carriers: a span is a pullback of (f, g)
    exactly when it commutes, is jointly injective, and its apex has the
    fiber-product cardinality.  Enumeration order matches the generic
    lexicographic minimum."""
    sizes = c.object_size  # type: ignore[attr-defined]
    fx, gy = fn_values(f), fn_values(g)
    size = sum(1 for x in fx for y in gy if x == y)
    for apex in c.objects:
        if sizes[apex] != size:
            continue
        for p in c.hom(apex, c.src(f)):
            pv = fn_values(p)
            for q in c.hom(apex, c.src(g)):
                qv = fn_values(q)
                if (
                    all(fx[pv[i]] == gy[qv[i]] for i in range(size))
                    and len({(pv[i], qv[i]) for i in range(size)}) == size
                ):
                    return (apex, p, q)
    return None


def canonical_pullback(c: FinCategory, f: str, g: str) -> tuple[str, str, str] | None:
    """Lexicographically minimal pullback representative, or None."""
    if c.dst(f) != c.dst(g):
        raise MalformedInputError("not a cospan")
    if hasattr(c, "object_size"):
        return _finset_canonical_pullback(c, f, g)
    cands = pullback_candidates(c, f, g)
    return min(cands) if cands else None


def verify_pullback_square(c: FinCategory, f: str, g: str, apex: str, p: str, q: str) -> bool:
    return _is_pullback(c, f, g, apex, p, q)


def _is_product(c: FinCategory, apex: str, legs: tuple[str, ...], factors: tuple[str, ...]) -> bool:
    for leg, x in zip(legs, factors):
        if c.morphisms[leg] != (apex, x):
            return False
    for t in c.objects:
        for us in itertools.product(*[c.hom(t, x) for x in factors]):
            mediators = [
                w
                for w in c.hom(t, apex)
                if all(c.comp(leg, w) == u for leg, u in zip(legs, us))
            ]
            if len(mediators) != 1:
                return False
    return True


def product_candidates(c: FinCategory, factors) -> list[tuple[str, tuple[str, ...]]]:
    """All n-ary products of `factors` with their projection tuples."""
    factors = tuple(factors)
    out = []
    for apex in c.objects:
        for legs in itertools.product(*[c.hom(apex, x) for x in factors]):
            if _is_product(c, apex, legs, factors):
                out.append((apex, legs))
    return out


def canonical_product(c: FinCategory, factors) -> tuple[str, tuple[str, ...]] | None:
    cands = product_candidates(c, factors)
    return min(cands) if cands else None


def verify_product(c: FinCategory, apex: str, legs, factors) -> bool:
    return _is_product(c, apex, tuple(legs), tuple(factors))


def _is_coproduct(c: FinCategory, apex: str, legs: tuple[str, ...], factors: tuple[str, ...]) -> bool:
    for leg, x in zip(legs, factors):
        if c.morphisms[leg] != (x, apex):
            return False
    for t in c.objects:
        for us in itertools.product(*[c.hom(x, t) for x in factors]):
            mediators = [
                w
                for w in c.hom(apex, t)
                if all(c.comp(w, leg) == u for leg, u in zip(legs, us))
            ]
            if len(mediators) != 1:
                return False
    return True


def verify_coproduct(c: FinCategory, apex: str, legs, factors) -> bool:
    return _is_coproduct(c, apex, tuple(legs), tuple(factors))


def _finset_canonical_coproduct(c: FinCategory, factors) -> tuple[str, tuple[str, ...]] | None:
    """Disjoint union in an all-function carrier: legs are jointly bijective
    with disjoint images; the first such tuple in id order is the generic
    lexicographic minimum."""
    sizes = c.object_size  # type: ignore[attr-defined]
    total = sum(sizes[x] for x in factors)
    for apex in c.objects:
        if sizes[apex] != total:
            continue
        for legs in itertools.product(*[c.hom(x, apex) for x in factors]):
            seen: set[int] = set()
            for leg in legs:
                seen.update(fn_values(leg))
            injective = all(len(set(fn_values(leg))) == len(fn_values(leg)) for leg in legs)
            if injective and len(seen) == total:
                if _is_coproduct(c, apex, legs, tuple(factors)):
                    return (apex, legs)
    return None


def canonical_coproduct(c: FinCategory, factors) -> tuple[str, tuple[str, ...]] | None:
    """Lexicographically minimal coproduct cocone, or None."""
    factors = tuple(factors)
    if hasattr(c, "object_size"):
        return _finset_canonical_coproduct(c, factors)
    cands = []
    for apex in c.objects:
        for legs in itertools.product(*[c.hom(x, apex) for x in factors]):
            if _is_coproduct(c, apex, legs, factors):
                cands.append((apex, legs))
    return min(cands) if cands else None


# -- functor enumeration from thin sources --------------------------------


def _covering_relations(c: FinCategory) -> list[tuple[str, str]]:
    strict = {
        (x, y)
        for m in c.morphism_ids
        for x, y in [c.morphisms[m]]
        if x != y
    }
    covers = []
    for x, y in strict:
        if not any((x, z) in strict and (z, y) in strict for z in c.objects):
            covers.append((x, y))
    return sorted(covers)


def is_thin(c: FinCategory) -> bool:
    return all(len(c.hom(x, y)) <= 1 for x in c.objects for y in c.objects)


def enumerate_functors(src: FinCategory, dst: FinCategory, edge_filter=None):
    """All functors src -> dst, for thin (poset) sources.

    `edge_filter(x, y, m)` may veto candidate images of the covering edge
    x -> y early; full functoriality is verified before a candidate is
    yielded, so the filter is purely a pruning device.
    """
    if not is_thin(src):
        raise MalformedInputError("functor enumeration requires a thin source")
    covers = _covering_relations(src)
    objs = list(src.objects)

    def rel_morphism(x: str, y: str) -> str:
        (m,) = src.hom(x, y)
        return m

    for obj_images in itertools.product(dst.objects, repeat=len(objs)):
        omap = dict(zip(objs, obj_images))
        # candidate images per covering edge
        options = []
        feasible = True
        for x, y in covers:
            homset = dst.hom(omap[x], omap[y])
            if edge_filter is not None:
                homset = [m for m in homset if edge_filter(x, y, m)]
            if not homset:
                feasible = False
                break
            options.append(homset)
        if not feasible:
            continue
        for choice in itertools.product(*options):
            cover_map = dict(zip(covers, choice))
            F = _complete_thin_functor(src, dst, omap, cover_map, covers, rel_morphism)
            if F is not None:
                yield F


def _complete_thin_functor(src, dst, omap, cover_map, covers, rel_morphism):
    """Extend a covering-edge assignment to all relations; None if incoherent."""
    mor_map: dict[str, str] = {}
    for x in src.objects:
        mor_map[src.identity[x]] = dst.identity[omap[x]]
    # composite along a canonical chain of covering edges, breadth-first
    succ: dict[str, list[tuple[str, str]]] = {}
    for (x, y), m in cover_map.items():
        succ.setdefault(x, []).append((y, m))
    for start in src.objects:
        reached = {start: dst.identity[omap[start]]}
        frontier = [start]
        while frontier:
            here = frontier.pop()
            for nxt, m in sorted(succ.get(here, [])):
                comp = dst.comp(m, reached[here])
                if nxt in reached:
                    if reached[nxt] != comp:
                        return None  # two paths disagree
                    continue
                reached[nxt] = comp
                frontier.append(nxt)
        for end, image in reached.items():
            if end != start and src.hom(start, end):
                mor_map[rel_morphism(start, end)] = image
    if len(mor_map) != len(src.morphism_ids):
        return None
    F = FunctorData(src, dst, omap, mor_map)
    return F if check_functor(F).passed else None
