"""Finite lattices as coefficient values and Galois connections as adjoints.

All natural-transformation language collapses to elementwise equality of
monotone map tables, so adjointability, projection formulas, and the
external-product identity are decided by finite sweeps with witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .fincat import FinCategory, canonical_product, fn_values
from .report import MalformedInputError, VerificationReport
from .setups import GeometricSetup


@dataclass
class FiniteLattice:
    """Elements with a partial order closed into meet/join tables.

    `tensor` defaults to meet; a non-meet table (still monotone in each
    slot) is allowed and exists to exercise failure paths downstream.
    """

    elements: tuple[str, ...]
    leq: frozenset
    tensor_table: dict | None = None

    def __post_init__(self):
        self.elements = tuple(self.elements)
        self.leq = frozenset(self.leq)
        els = set(self.elements)
        for a, b in self.leq:
            if a not in els or b not in els:
                raise MalformedInputError(f"order mentions unknown element ({a!r}, {b!r})")
        for a in self.elements:
            if (a, a) not in self.leq:
                raise MalformedInputError(f"order not reflexive at {a!r}")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                raise MalformedInputError(f"order not antisymmetric on ({a!r}, {b!r})")
            for b2, c in self.leq:
                if b2 == b and (a, c) not in self.leq:
                    raise MalformedInputError(f"order not transitive via {b!r}")
        self._meet = {}
        self._join = {}
        for a in self.elements:
            for b in self.elements:
                lower = [x for x in self.elements if self.le(x, a) and self.le(x, b)]
                best = [x for x in lower if all(self.le(y, x) for y in lower)]
                if len(best) != 1:
                    raise MalformedInputError(f"no meet for ({a!r}, {b!r})")
                self._meet[(a, b)] = best[0]
                upper = [x for x in self.elements if self.le(a, x) and self.le(b, x)]
                best = [x for x in upper if all(self.le(x, y) for y in upper)]
                if len(best) != 1:
                    raise MalformedInputError(f"no join for ({a!r}, {b!r})")
                self._join[(a, b)] = best[0]
        bots = [x for x in self.elements if all(self.le(x, y) for y in self.elements)]
        tops = [x for x in self.elements if all(self.le(y, x) for y in self.elements)]
        if len(bots) != 1 or len(tops) != 1:
            raise MalformedInputError("lattice must be bounded")
        self.bot, self.top = bots[0], tops[0]
        if self.tensor_table is not None:
            for a in self.elements:
                for b in self.elements:
                    if (a, b) not in self.tensor_table:
                        raise MalformedInputError(f"tensor table missing ({a!r}, {b!r})")
            for a in self.elements:
                for b in self.elements:
                    for b2 in self.elements:
                        if self.le(b, b2) and not self.le(
                            self.tensor_table[(a, b)], self.tensor_table[(a, b2)]
                        ):
                            raise MalformedInputError("tensor not monotone in second slot")
                        if self.le(b, b2) and not self.le(
                            self.tensor_table[(b, a)], self.tensor_table[(b2, a)]
                        ):
                            raise MalformedInputError("tensor not monotone in first slot")

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.leq

    def meet(self, a: str, b: str) -> str:
        return self._meet[(a, b)]

    def join(self, a: str, b: str) -> str:
        return self._join[(a, b)]

    def tensor(self, a: str, b: str) -> str:
        if self.tensor_table is None:
            return self.meet(a, b)
        return self.tensor_table[(a, b)]

    def join_all(self, xs) -> str:
        out = self.bot
        for x in xs:
            out = self.join(out, x)
        return out

    def meet_all(self, xs) -> str:
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    @cached_property
    def is_frame(self) -> bool:
        # finite frames are exactly the distributive bounded lattices
        return all(
            self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
            for a in self.elements
            for b in self.elements
            for c in self.elements
        )

    def imp(self, a: str, b: str) -> str:
        """Heyting implication: the largest c with a meet c <= b."""
        if not self.is_frame:
            raise MalformedInputError("implication needs a frame")
        cands = [c for c in self.elements if self.le(self.meet(a, c), b)]
        return self.join_all(cands)


@dataclass
class LatticeMap:
    src: FiniteLattice
    dst: FiniteLattice
    table: dict

    def __post_init__(self):
        missing = [x for x in self.src.elements if x not in self.table]
        if missing:
            raise MalformedInputError(f"map not total: {missing[:3]}")
        for x in self.src.elements:
            if self.table[x] not in self.dst.elements:
                raise MalformedInputError(f"value {self.table[x]!r} outside codomain")
        for a in self.src.elements:
            for b in self.src.elements:
                if self.src.le(a, b) and not self.dst.le(self.table[a], self.table[b]):
                    raise MalformedInputError(f"not monotone on ({a!r}, {b!r})")

    def __call__(self, x: str) -> str:
        return self.table[x]

    def same_table(self, other: "LatticeMap") -> bool:
        return self.table == other.table


def identity_map(L: FiniteLattice) -> LatticeMap:
    return LatticeMap(L, L, {x: x for x in L.elements})


def compose_maps(g: LatticeMap, f: LatticeMap) -> LatticeMap:
    if g.src is not f.dst and g.src != f.dst:
        raise MalformedInputError("maps not composable")
    return LatticeMap(f.src, g.dst, {x: g(f(x)) for x in f.src.elements})


def _adjunction_holds_left(cand: LatticeMap, m: LatticeMap) -> bool:
    # cand: M -> L is left adjoint to m: L -> M iff cand(x) <= y <=> x <= m(y)
    L, M = m.src, m.dst
    return all(
        L.le(cand(x), y) == M.le(x, m(y)) for x in M.elements for y in L.elements
    )


def _adjunction_holds_right(cand: LatticeMap, m: LatticeMap) -> bool:
    # cand: M -> L is right adjoint to m: L -> M iff m(y) <= x <=> y <= cand(x)
    L, M = m.src, m.dst
    return all(
        M.le(m(y), x) == L.le(y, cand(x)) for x in M.elements for y in L.elements
    )


def left_adjoint(m: LatticeMap) -> LatticeMap | None:
    """Candidate by the meet formula, then the adjunction law on all pairs."""
    L, M = m.src, m.dst
    table = {x: L.meet_all(y for y in L.elements if M.le(x, m(y))) for x in M.elements}
    cand = LatticeMap(M, L, table)
    return cand if _adjunction_holds_left(cand, m) else None


def right_adjoint(m: LatticeMap) -> LatticeMap | None:
    L, M = m.src, m.dst
    table = {x: L.join_all(y for y in L.elements if M.le(m(y), x)) for x in M.elements}
    cand = LatticeMap(M, L, table)
    return cand if _adjunction_holds_right(cand, m) else None


def monotone_maps_between(L: FiniteLattice, M: FiniteLattice):
    """All monotone maps L -> M; exhaustive, for small lattices only."""
    for values in itertools.product(M.elements, repeat=len(L.elements)):
        table = dict(zip(L.elements, values))
        if all(
            M.le(table[a], table[b])
            for a in L.elements
            for b in L.elements
            if L.le(a, b)
        ):
            yield LatticeMap(L, M, table)


class GaloisMap:
    """A pullback map with its adjoints, each verified at construction."""

    def __init__(self, pullback: LatticeMap):
        self.pullback = pullback

    @cached_property
    def sharp(self) -> LatticeMap | None:
        return left_adjoint(self.pullback)

    @cached_property
    def star(self) -> LatticeMap | None:
        return right_adjoint(self.pullback)

    @cached_property
    def upper(self) -> LatticeMap | None:
        """Right adjoint of the star map when both exist."""
        star = self.star
        return None if star is None else right_adjoint(star)


def check_triangles(g: GaloisMap) -> VerificationReport:
    rep = VerificationReport("galois-triangles")
    pull = g.pullback
    for name, adj in (("sharp", g.sharp), ("star", g.star)):
        if adj is None:
            continue
        one = compose_maps(adj, compose_maps(pull, adj)).same_table(adj)
        two = compose_maps(pull, compose_maps(adj, pull)).same_table(pull)
        rep.add(f"triangle-{name}-outer", one, {} if one else {"side": name}, anchor="galois-triangle")
        rep.add(f"triangle-{name}-inner", two, {} if two else {"side": name}, anchor="galois-triangle")
    return rep


# -- adjointable squares and mates ----------------------------------------


@dataclass
class SquareData:
    """Commuting square of monotone maps:

        A --p--> B
        |        |
        u        v
        |        |
        C --q--> D

    with v(p(a)) == q(u(a)) for every a."""

    p: LatticeMap
    u: LatticeMap
    v: LatticeMap
    q: LatticeMap

    def __post_init__(self):
        if self.p.src != self.u.src or self.p.dst != self.v.src:
            raise MalformedInputError("square corners mistyped")
        if self.u.dst != self.q.src or self.v.dst != self.q.dst:
            raise MalformedInputError("square corners mistyped")
        for a in self.p.src.elements:
            if self.v(self.p(a)) != self.q(self.u(a)):
                raise MalformedInputError(f"square does not commute at {a!r}")


def check_adjointable(sq: SquareData, side: str) -> VerificationReport:
    """Mate equality.  Right case: u . radj(p) versus radj(q) . v, as maps
    B -> C; left case: u . ladj(p) versus ladj(q) . v.  Posets make the
    mate an equivalence exactly when the two tables agree."""
    rep = VerificationReport(f"adjointable-{side}")
    if side == "right":
        ap, aq = right_adjoint(sq.p), right_adjoint(sq.q)
    elif side == "left":
        ap, aq = left_adjoint(sq.p), left_adjoint(sq.q)
    else:
        raise MalformedInputError(f"side must be left or right, got {side!r}")
    if ap is None or aq is None:
        raise MalformedInputError(f"missing {side} adjoint on a horizontal map")
    lhs = compose_maps(sq.u, ap)
    rhs = compose_maps(aq, sq.v)
    witness = None
    for b in sq.p.dst.elements:
        if lhs(b) != rhs(b):
            witness = {"element": b, "via-adjoint-then-down": lhs(b), "via-down-then-adjoint": rhs(b)}
            break
    rep.add("mate-is-identity", witness is None, witness or {}, anchor=f"{side}-adjointable-square")
    return rep


def paste_squares(left_sq: SquareData, right_sq: SquareData) -> SquareData:
    """Horizontal pasting: the right square's vertical left edge must be the
    left square's right edge."""
    if not left_sq.v.same_table(right_sq.u) or left_sq.v.src != right_sq.u.src:
        raise MalformedInputError("squares do not share the middle edge")
    return SquareData(
        p=compose_maps(right_sq.p, left_sq.p),
        u=left_sq.u,
        v=right_sq.v,
        q=compose_maps(right_sq.q, left_sq.q),
    )


# -- lattice grids and partial adjoints -----------------------------------


def _bump(v: tuple[int, ...], d: int) -> tuple[int, ...]:
    return v[:d] + (v[d] + 1,) + v[d + 1 :]


@dataclass
class LatticeGrid:
    """Lattices on the (n+1)^k grid with a monotone map per unit edge;
    every unit square commutes elementwise."""

    k: int
    n: int
    lattices: dict
    maps: dict

    def __post_init__(self):
        for v, L in self.lattices.items():
            for d in range(self.k):
                if v[d] < self.n:
                    m = self.maps.get((v, d))
                    if m is None or m.src != L or m.dst != self.lattices[_bump(v, d)]:
                        raise MalformedInputError(f"edge ({v}, {d}) missing or mistyped")
        for v in self.lattices:
            for a in range(self.k):
                for b in range(a + 1, self.k):
                    if v[a] < self.n and v[b] < self.n:
                        one = compose_maps(self.maps[(_bump(v, a), b)], self.maps[(v, a)])
                        two = compose_maps(self.maps[(_bump(v, b), a)], self.maps[(v, b)])
                        if not one.same_table(two):
                            raise MalformedInputError(f"square at {v} ({a},{b}) does not commute")

    def flip(self, v: tuple[int, ...], J) -> tuple[int, ...]:
        return tuple(self.n - x if d in J else x for d, x in enumerate(v))


def partial_adjoint_grid(F: LatticeGrid, J) -> LatticeGrid:
    """Reverse the J directions through right adjoints.

    Preconditions, checked first with named offenders: every J-edge has a
    right adjoint; every mixed square (one J direction, one not) is right
    adjointable.  The output grid is indexed with the J coordinates flipped
    so that it is again a genuine commuting grid; non-J maps are untouched.
    """
    J = frozenset(J)
    if not J <= set(range(F.k)):
        raise MalformedInputError("J must name grid directions")
    adjoints = {}
    for (v, d), m in F.maps.items():
        if d in J:
            adj = right_adjoint(m)
            if adj is None:
                raise MalformedInputError(f"edge ({v}, {d}) has no right adjoint")
            adjoints[(v, d)] = adj
    for v in F.lattices:
        for a in range(F.k):
            for b in range(F.k):
                if a == b or v[a] >= F.n or v[b] >= F.n:
                    continue
                if a not in J and b in J:
                    sq = SquareData(
                        p=F.maps[(v, b)],
                        u=F.maps[(v, a)],
                        v=F.maps[(_bump(v, b), a)],
                        q=F.maps[(_bump(v, a), b)],
                    )
                    if not check_adjointable(sq, "right").passed:
                        raise MalformedInputError(
                            f"mixed square at {v} ({a},{b}) is not right adjointable"
                        )
    lattices = {F.flip(v, J): L for v, L in F.lattices.items()}
    maps = {}
    for (v, d), m in F.maps.items():
        if d in J:
            # the reversed edge starts at the flipped image of v + e_d
            maps[(F.flip(_bump(v, d), J), d)] = adjoints[(v, d)]
        else:
            maps[(F.flip(v, J), d)] = m
    return LatticeGrid(F.k, F.n, lattices, maps)


# -- coefficient systems --------------------------------------------------


@dataclass
class CoefficientSystem:
    """A lattice per object and a pullback map per morphism, strictly
    functorial on the nose and top-preserving."""

    setup: GeometricSetup
    lattices: dict
    restriction: dict

    def __post_init__(self):
        c = self.setup.category
        for x in c.objects:
            if x not in self.lattices:
                raise MalformedInputError(f"no lattice for object {x!r}")
        for m in c.morphism_ids:
            r = self.restriction.get(m)
            if r is None:
                raise MalformedInputError(f"no restriction map for {m!r}")
            if r.src != self.lattices[c.dst(m)] or r.dst != self.lattices[c.src(m)]:
                raise MalformedInputError(f"restriction for {m!r} mistyped")
            if r(r.src.top) != r.dst.top:
                raise MalformedInputError(f"restriction for {m!r} drops the unit")
        for x in c.objects:
            if not self.restriction[c.identity[x]].same_table(identity_map(self.lattices[x])):
                raise MalformedInputError(f"identity restriction at {x!r} is not the identity")
        for g, f in c.composable_pairs:
            expected = compose_maps(self.restriction[f], self.restriction[g])
            if not self.restriction[c.comp(g, f)].same_table(expected):
                raise MalformedInputError(f"restriction not functorial on ({g!r}, {f!r})")

    def lattice(self, x: str) -> FiniteLattice:
        return self.lattices[x]

    def pull(self, f: str) -> LatticeMap:
        return self.restriction[f]

    def galois(self, f: str) -> GaloisMap:
        return GaloisMap(self.restriction[f])


# -- builders -------------------------------------------------------------


def chain_lattice(n: int) -> FiniteLattice:
    els = [str(i) for i in range(n + 1)]
    leq = {(a, b) for a in els for b in els if int(a) <= int(b)}
    return FiniteLattice(tuple(els), frozenset(leq))


def n5_lattice(tensor: str = "meet") -> FiniteLattice:
    """The pentagon: bot < a < c < top, bot < b < top, b incomparable to
    both a and c.  Not distributive.  tensor='join' installs the join as
    the tensor product."""
    els = ("0", "a", "b", "c", "1")
    pairs = {(x, x) for x in els}
    pairs |= {("0", x) for x in els}
    pairs |= {(x, "1") for x in els}
    pairs |= {("a", "c")}
    L = FiniteLattice(els, frozenset(pairs))
    if tensor == "join":
        table = {(x, y): L.join(x, y) for x in els for y in els}
        return FiniteLattice(els, frozenset(pairs), table)
    if tensor != "meet":
        raise MalformedInputError("tensor must be meet or join")
    return L


def tuple_name(values) -> str:
    return "(" + ",".join(values) + ")"


def power_lattice(L: FiniteLattice, size: int) -> FiniteLattice:
    """L^size with the pointwise order; elements are value tuples by name."""
    tuples = list(itertools.product(L.elements, repeat=size))
    els = tuple(tuple_name(t) for t in tuples)
    leq = set()
    for s in tuples:
        for t in tuples:
            if all(L.le(a, b) for a, b in zip(s, t)):
                leq.add((tuple_name(s), tuple_name(t)))
    tensor = None
    if L.tensor_table is not None:
        tensor = {
            (tuple_name(s), tuple_name(t)): tuple_name(tuple(L.tensor(a, b) for a, b in zip(s, t)))
            for s in tuples
            for t in tuples
        }
    return FiniteLattice(els, frozenset(leq), tensor)


def tuple_values(name: str) -> tuple[str, ...]:
    inner = name[1:-1]
    return tuple(inner.split(",")) if inner else ()


def precompose_map(f_values: tuple[int, ...], big_src: FiniteLattice, big_dst: FiniteLattice) -> LatticeMap:
    """The pullback map L^dst -> L^src along a function given by values."""
    table = {}
    for name in big_src.elements:
        vals = tuple_values(name)
        table[name] = tuple_name(tuple(vals[v] for v in f_values))
    return LatticeMap(big_src, big_dst, table)


def frame_system(setup: GeometricSetup, L: FiniteLattice) -> CoefficientSystem:
    """D(X) = L^|X| over an all-function carrier, f^* by precomposition."""
    c = setup.category
    sizes = getattr(c, "object_size", None)
    if sizes is None:
        raise MalformedInputError("frame systems need a carrier with cardinalities")
    lattices = {x: power_lattice(L, sizes[x]) for x in c.objects}
    restriction = {}
    for m in c.morphism_ids:
        x, y = c.morphisms[m]
        restriction[m] = precompose_map(fn_values(m), lattices[y], lattices[x])
    return CoefficientSystem(setup, lattices, restriction)


def fiberwise_join_map(f: str, big_src: FiniteLattice, big_dst: FiniteLattice, L: FiniteLattice) -> LatticeMap:
    """Independent oracle for the left adjoint of precomposition."""
    vals = fn_values(f)
    target_size = len(tuple_values(big_dst.elements[0]))
    table = {}
    for name in big_src.elements:
        s = tuple_values(name)
        out = []
        for ypt in range(target_size):
            out.append(L.join_all(s[i] for i in range(len(vals)) if vals[i] == ypt))
        table[name] = tuple_name(tuple(out))
    return LatticeMap(big_src, big_dst, table)


def fiberwise_meet_map(f: str, big_src: FiniteLattice, big_dst: FiniteLattice, L: FiniteLattice) -> LatticeMap:
    vals = fn_values(f)
    target_size = len(tuple_values(big_dst.elements[0]))
    table = {}
    for name in big_src.elements:
        s = tuple_values(name)
        out = []
        for ypt in range(target_size):
            out.append(L.meet_all(s[i] for i in range(len(vals)) if vals[i] == ypt))
        table[name] = tuple_name(tuple(out))
    return LatticeMap(big_src, big_dst, table)


# -- projection formulas and the external product -------------------------


def check_projection_formula(sys: CoefficientSystem, f: str, flavor: str) -> VerificationReport:
    """sharp: push(E tensor pull(B)) == push(E) tensor B with push the left
    adjoint; star: push(E) tensor B == push(E tensor pull(B)) with the right
    adjoint.  Exhaustive over all pairs."""
    rep = VerificationReport(f"projection-formula-{flavor}")
    c = sys.setup.category
    x, y = c.morphisms[f]
    DX, DY = sys.lattice(x), sys.lattice(y)
    pull = sys.pull(f)
    g = sys.galois(f)
    push = g.sharp if flavor == "sharp" else g.star if flavor == "star" else None
    if flavor not in ("sharp", "star"):
        raise MalformedInputError(f"flavor must be sharp or star, got {flavor!r}")
    if push is None:
        raise MalformedInputError(f"{flavor} adjoint missing for {f!r}")
    witness = None
    for E in DX.elements:
        for B in DY.elements:
            lhs = push(DX.tensor(E, pull(B)))
            rhs = DY.tensor(push(E), B)
            if lhs != rhs:
                witness = {"E": E, "B": B, "pushed-tensor": lhs, "tensor-pushed": rhs}
                break
        if witness:
            break
    rep.add(
        "projection-formula",
        witness is None,
        witness or {"pairs": len(DX.elements) * len(DY.elements)},
        anchor=f"projection-formula-{flavor}",
    )
    return rep


def _unique_cross_map(c: FinCategory, f1: str, f2: str):
    """The product map f1 x f2 between canonical products, with projections."""
    x1, y1 = c.morphisms[f1]
    x2, y2 = c.morphisms[f2]
    px = canonical_product(c, [x1, x2])
    py = canonical_product(c, [y1, y2])
    if px is None or py is None:
        return None
    (p_obj, (p1, p2)) = px
    (q_obj, (q1, q2)) = py
    cands = [
        m
        for m in c.hom(p_obj, q_obj)
        if c.comp(q1, m) == c.comp(f1, p1) and c.comp(q2, m) == c.comp(f2, p2)
    ]
    if len(cands) != 1:
        return None
    return p_obj, (p1, p2), q_obj, (q1, q2), cands[0]


def check_kunneth(sys: CoefficientSystem, f1: str, f2: str) -> VerificationReport:
    """(f1 x f2)_* of an external product equals the external product of the
    starred factors, elementwise over all argument pairs.  The external
    product M box N is pull(p1)(M) tensor pull(p2)(N)."""
    rep = VerificationReport("kunneth")
    c = sys.setup.category
    cross = _unique_cross_map(c, f1, f2)
    rep.add("products-available", cross is not None, {} if cross else {"pair": [f1, f2]}, anchor="kunneth-products")
    if cross is None:
        return rep
    p_obj, (p1, p2), q_obj, (q1, q2), f12 = cross
    x1, y1 = c.morphisms[f1]
    x2, y2 = c.morphisms[f2]
    DP, DQ = sys.lattice(p_obj), sys.lattice(q_obj)
    star1 = sys.galois(f1).star
    star2 = sys.galois(f2).star
    star12 = sys.galois(f12).star
    if star1 is None or star2 is None or star12 is None:
        raise MalformedInputError("a star adjoint is missing")
    witness = None
    for M in sys.lattice(x1).elements:
        for N in sys.lattice(x2).elements:
            box = DP.tensor(sys.pull(p1)(M), sys.pull(p2)(N))
            lhs = star12(box)
            rhs = DQ.tensor(sys.pull(q1)(star1(M)), sys.pull(q2)(star2(N)))
            if lhs != rhs:
                witness = {"M": M, "N": N, "starred-box": lhs, "box-of-starred": rhs}
                break
        if witness:
            break
    rep.add("kunneth-identity", witness is None, witness or {}, anchor="kunneth-external-product")
    return rep
