"""Truncated simplicial sets with explicit face/degeneracy tables.

A `TruncatedSimplicialSet` stores every simplex up to a dimension bound d,
degenerate ones included, and its face and degeneracy maps as total tables.
All simplicial identities are verified at construction time.  Monotone maps
[n] -> [m] act through the usual factorization into faces and degeneracies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .fincat import FinCategory, FunctorData, check_functor
from .report import MalformedInputError, VerificationReport


# -- monotone map combinatorics ------------------------------------------


@lru_cache(maxsize=None)
def monotone_maps(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All monotone maps [n] -> [m] as value tuples of length n+1."""
    return tuple(itertools.combinations_with_replacement(range(m + 1), n + 1))


def compose_monotone(q: tuple[int, ...], p: tuple[int, ...]) -> tuple[int, ...]:
    """q after p, so the result sends i to q[p[i]]."""
    return tuple(q[v] for v in p)


def is_injective(p: tuple[int, ...]) -> bool:
    return len(set(p)) == len(p)


def is_surjective(p: tuple[int, ...], m: int) -> bool:
    return set(p) == set(range(m + 1))


def encode_monotone(p: tuple[int, ...]) -> str:
    return ".".join(str(v) for v in p)


@dataclass
class TruncatedSimplicialSet:
    """Simplices per dimension with total face/degeneracy tables.

    face[(n, i)] maps X_n -> X_{n-1} for 1 <= n <= d, 0 <= i <= n.
    degeneracy[(n, j)] maps X_n -> X_{n+1} for 0 <= n < d, 0 <= j <= n.
    """

    d: int
    simplices: dict[int, tuple[str, ...]]
    face: dict[tuple[int, int], dict[str, str]]
    degeneracy: dict[tuple[int, int], dict[str, str]]

    def __post_init__(self):
        rep = check_simplicial_set(self)
        bad = rep.first_failure()
        if bad is not None:
            raise MalformedInputError(f"simplicial identities fail: {bad.name} {bad.witness}")

    def d_i(self, n: int, i: int, x: str) -> str:
        return self.face[(n, i)][x]

    def s_j(self, n: int, j: int, x: str) -> str:
        return self.degeneracy[(n, j)][x]

    def is_degenerate(self, n: int, x: str) -> bool:
        if n == 0:
            return False
        return any(x in self.degeneracy[(n - 1, j)].values() for j in range(n))

    def nondegenerate(self, n: int) -> tuple[str, ...]:
        return tuple(x for x in self.simplices[n] if not self.is_degenerate(n, x))

    def nondegenerate_counts(self) -> tuple[int, ...]:
        return tuple(len(self.nondegenerate(n)) for n in range(self.d + 1))

    def act(self, p: tuple[int, ...], m: int, sigma: str) -> str:
        """Value of the contravariant action K(p) on sigma, for monotone
        p: [n] -> [m] with sigma an m-simplex; the result is an n-simplex.

        Factorization: peel the largest value missing from the image (a face),
        else the smallest repeated position (a degeneracy).
        """
        n = len(p) - 1
        if sigma not in self.simplices.get(m, ()):
            raise MalformedInputError(f"{sigma!r} is not an {m}-simplex")
        if any(p[i] > p[i + 1] for i in range(n)) or (p and (p[0] < 0 or p[-1] > m)):
            raise MalformedInputError(f"{p} is not monotone into [{m}]")
        image = set(p)
        missing = [j for j in range(m + 1) if j not in image]
        if missing:
            j = max(missing)
            reduced = tuple(v - 1 if v > j else v for v in p)
            return self.act(reduced, m - 1, self.d_i(m, j, sigma))
        for j in range(n):
            if p[j] == p[j + 1]:
                collapsed = p[:j] + p[j + 1 :]
                tau = self.act(collapsed, m, sigma)
                return self.s_j(n - 1, j, tau)
        return sigma


def check_simplicial_set(X) -> VerificationReport:
    """Exhaustive audit of the face/degeneracy tables and all identities."""
    rep = VerificationReport("check-simplicial-set")

    missing = []
    for n in range(X.d + 1):
        if n not in X.simplices:
            missing.append(f"level {n}")
    for n in range(1, X.d + 1):
        for i in range(n + 1):
            table = X.face.get((n, i))
            if table is None or set(table) != set(X.simplices[n]):
                missing.append(f"face d_{i} at level {n}")
            elif any(v not in X.simplices[n - 1] for v in table.values()):
                missing.append(f"face d_{i} at level {n} lands outside")
    for n in range(X.d):
        for j in range(n + 1):
            table = X.degeneracy.get((n, j))
            if table is None or set(table) != set(X.simplices[n]):
                missing.append(f"degeneracy s_{j} at level {n}")
            elif any(v not in X.simplices[n + 1] for v in table.values()):
                missing.append(f"degeneracy s_{j} at level {n} lands outside")
    rep.add("tables-total", not missing, {"missing": missing})
    if missing:
        return rep

    witness = None
    for n in range(2, X.d + 1):
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                for x in X.simplices[n]:
                    if X.d_i(n - 1, i, X.d_i(n, j, x)) != X.d_i(n - 1, j - 1, X.d_i(n, i, x)):
                        witness = {"relation": f"d_{i} d_{j}", "level": n, "simplex": x}
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    rep.add("face-face", witness is None, witness or {})

    witness = None
    for n in range(X.d - 1):
        for j in range(n + 1):
            for i in range(j, n + 1):
                for x in X.simplices[n]:
                    lhs = X.s_j(n + 1, i + 1, X.s_j(n, j, x))
                    rhs = X.s_j(n + 1, j, X.s_j(n, i, x))
                    if lhs != rhs:
                        witness = {"relation": f"s_{i+1} s_{j}", "level": n, "simplex": x}
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    rep.add("degeneracy-degeneracy", witness is None, witness or {})

    witness = None
    for n in range(X.d):
        for j in range(n + 1):
            for i in range(n + 2):
                for x in X.simplices[n]:
                    got = X.d_i(n + 1, i, X.s_j(n, j, x))
                    if i == j or i == j + 1:
                        want = x
                    elif i < j:
                        want = X.s_j(n - 1, j - 1, X.d_i(n, i, x))
                    else:
                        want = X.s_j(n - 1, j, X.d_i(n, i - 1, x))
                    if got != want:
                        witness = {"relation": f"d_{i} s_{j}", "level": n, "simplex": x}
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    rep.add("face-degeneracy", witness is None, witness or {})
    return rep


# -- standard cells -------------------------------------------------------


def _cell_member(kind: str, n: int, k: int | None, p: tuple[int, ...]) -> bool:
    if kind == "simplex":
        return True
    image = set(p)
    if kind == "boundary":
        return image != set(range(n + 1))
    if kind == "inner_horn":
        return image | {k} != set(range(n + 1))
    raise MalformedInputError(f"unknown cell kind {kind!r}")


def standard_cell(kind: str, n: int, k: int | None = None, d: int | None = None) -> TruncatedSimplicialSet:
    """The cells on [n]: full simplex, its boundary, or an inner horn.

    Simplices in dimension m are the monotone maps [m] -> [n] surviving the
    membership test of the chosen kind.
    """
    if d is None:
        d = n
    # d below n is allowed: it truncates the cell under its top dimension
    if not (0 <= n <= 4 and 0 <= d <= 4):
        raise MalformedInputError(f"need n, d in 0..4, got n={n}, d={d}")
    if kind == "inner_horn":
        if k is None or not 0 < k < n:
            raise MalformedInputError(f"inner horn needs 0 < k < n, got k={k}, n={n}")
    elif k is not None:
        raise MalformedInputError("k only applies to horns")

    simplices = {}
    for m in range(d + 1):
        simplices[m] = tuple(
            encode_monotone(p)
            for p in monotone_maps(m, n)
            if _cell_member(kind, n, k, p)
        )
    face = {}
    for m in range(1, d + 1):
        for i in range(m + 1):
            face[(m, i)] = {
                encode_monotone(p): encode_monotone(p[:i] + p[i + 1 :])
                for p in (tuple(int(v) for v in x.split(".")) for x in simplices[m])
            }
    degeneracy = {}
    for m in range(d):
        for j in range(m + 1):
            degeneracy[(m, j)] = {
                encode_monotone(p): encode_monotone(p[: j + 1] + p[j:])
                for p in (tuple(int(v) for v in x.split(".")) for x in simplices[m])
            }
    return TruncatedSimplicialSet(d, simplices, face, degeneracy)


# -- nerves ---------------------------------------------------------------


def _chain_id(objects: tuple[str, ...], morphisms: tuple[str, ...]) -> str:
    if not morphisms:
        return objects[0]
    return "|".join(morphisms)


def nerve(c: FinCategory, d: int) -> TruncatedSimplicialSet:
    """The nerve of c truncated at dimension d: n-simplices are composable
    n-chains of morphisms, faces compose or drop ends, degeneracies insert
    identities.  The result carries `nerve_of` (the category) and `chain_of`
    (simplex id -> (object tuple, morphism tuple)) for decoding.
    """
    chains: dict[int, list[tuple[tuple[str, ...], tuple[str, ...]]]] = {
        0: [((x,), ()) for x in c.objects]
    }
    for n in range(1, d + 1):
        level = []
        for objs, ms in chains[n - 1]:
            tail = objs[-1]
            for m in c.morphism_ids:
                if c.src(m) == tail:
                    level.append((objs + (c.dst(m),), ms + (m,)))
        chains[n] = level

    simplices = {n: tuple(sorted(_chain_id(o, m) for o, m in chains[n])) for n in chains}
    decode = {}
    for n, level in chains.items():
        for objs, ms in level:
            decode[_chain_id(objs, ms)] = (objs, ms)

    def face_chain(objs, ms, i):
        n = len(ms)
        if i == 0:
            return objs[1:], ms[1:]
        if i == n:
            return objs[:-1], ms[:-1]
        merged = c.comp(ms[i], ms[i - 1])
        return objs[:i] + objs[i + 1 :], ms[: i - 1] + (merged,) + ms[i + 1 :]

    face = {}
    for n in range(1, d + 1):
        for i in range(n + 1):
            face[(n, i)] = {
                _chain_id(o, m): _chain_id(*face_chain(o, m, i)) for o, m in chains[n]
            }
    degeneracy = {}
    for n in range(d):
        for j in range(n + 1):
            table = {}
            for objs, ms in chains[n]:
                new_objs = objs[: j + 1] + objs[j:]
                new_ms = ms[:j] + (c.identity[objs[j]],) + ms[j:]
                table[_chain_id(objs, ms)] = _chain_id(new_objs, new_ms)
            degeneracy[(n, j)] = table
    X = TruncatedSimplicialSet(d, simplices, face, degeneracy)
    X.nerve_of = c  # type: ignore[attr-defined]
    X.chain_of = decode  # type: ignore[attr-defined]
    return X


def product(X: TruncatedSimplicialSet, Y: TruncatedSimplicialSet) -> TruncatedSimplicialSet:
    """Levelwise product, truncated at the smaller bound."""
    d = min(X.d, Y.d)

    def pid(x, y):
        return f"({x},{y})"

    simplices = {
        n: tuple(pid(x, y) for x in X.simplices[n] for y in Y.simplices[n])
        for n in range(d + 1)
    }
    face = {}
    for n in range(1, d + 1):
        for i in range(n + 1):
            face[(n, i)] = {
                pid(x, y): pid(X.d_i(n, i, x), Y.d_i(n, i, y))
                for x in X.simplices[n]
                for y in Y.simplices[n]
            }
    degeneracy = {}
    for n in range(d):
        for j in range(n + 1):
            degeneracy[(n, j)] = {
                pid(x, y): pid(X.s_j(n, j, x), Y.s_j(n, j, y))
                for x in X.simplices[n]
                for y in Y.simplices[n]
            }
    return TruncatedSimplicialSet(d, simplices, face, degeneracy)


# -- horn filling ---------------------------------------------------------


@dataclass
class HornProblem:
    """An inner horn in `ambient`: faces 0..n except k, to be filled."""

    ambient: TruncatedSimplicialSet
    n: int
    k: int
    faces: dict[int, str]

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise MalformedInputError(f"inner horn needs 0 < k < n, got k={self.k}, n={self.n}")
        if self.ambient.d < self.n:
            raise MalformedInputError("ambient truncated below the horn dimension")
        expected = set(range(self.n + 1)) - {self.k}
        if set(self.faces) != expected:
            raise MalformedInputError(f"faces must cover indices {sorted(expected)}")
        X = self.ambient
        for i, x in self.faces.items():
            if x not in X.simplices[self.n - 1]:
                raise MalformedInputError(f"face {i} is not an ({self.n - 1})-simplex")
        # gluing: shared faces of the declared faces must agree
        for i in sorted(self.faces):
            for j in sorted(self.faces):
                if i < j:
                    if X.d_i(self.n - 1, j - 1, self.faces[i]) != X.d_i(self.n - 1, i, self.faces[j]):
                        raise MalformedInputError(
                            f"horn gluing fails between faces {i} and {j}"
                        )


def horn_fillers(p: HornProblem) -> list[str]:
    """All simplices whose faces match the horn, in id order."""
    X = p.ambient
    out = []
    for x in X.simplices[p.n]:
        if all(X.d_i(p.n, i, x) == p.faces[i] for i in p.faces):
            out.append(x)
    return sorted(out)


def fill_inner_horn(p: HornProblem) -> str | None:
    """Exhaustive search for a filler; the lexicographically least match."""
    fillers = horn_fillers(p)
    return fillers[0] if fillers else None


def inner_horns_of(X: TruncatedSimplicialSet, n: int) -> list[HornProblem]:
    """Every consistent inner horn assembled from (n-1)-simplices of X."""
    out = []
    for k in range(1, n):
        for combo in itertools.product(X.simplices[n - 1], repeat=n):
            faces = dict(zip((i for i in range(n + 1) if i != k), combo))
            try:
                out.append(HornProblem(X, n, k, faces))
            except MalformedInputError:
                continue
    return out


# -- the category of simplices and mapping data ---------------------------


def _simp_obj(n: int, sigma: str) -> str:
    return f"{n}:{sigma}"


def category_of_simplices(K: TruncatedSimplicialSet) -> FinCategory:
    """Objects (n, sigma) for n <= d; a morphism (n, sigma) -> (m, tau) is a
    monotone p: [n] -> [m] with K(p)(tau) = sigma.  Degenerate simplices are
    included.
    """
    objects = []
    for n in range(K.d + 1):
        for sigma in sorted(K.simplices[n]):
            objects.append(_simp_obj(n, sigma))
    morphisms: dict[str, tuple[str, str]] = {}
    data: dict[str, tuple[int, int, tuple[int, ...]]] = {}
    for n in range(K.d + 1):
        for m in range(K.d + 1):
            for p in monotone_maps(n, m):
                for tau in K.simplices[m]:
                    sigma = K.act(p, m, tau)
                    mid = f"{n}:{sigma}>{m}:{tau}:{encode_monotone(p)}"
                    morphisms[mid] = (_simp_obj(n, sigma), _simp_obj(m, tau))
                    data[mid] = (n, m, p)
    identity = {}
    for n in range(K.d + 1):
        for sigma in K.simplices[n]:
            idp = tuple(range(n + 1))
            identity[_simp_obj(n, sigma)] = f"{n}:{sigma}>{n}:{sigma}:{encode_monotone(idp)}"
    compose = {}
    by_target: dict[str, list[str]] = {}
    for mid, (s, t) in morphisms.items():
        by_target.setdefault(s, []).append(mid)
    for f, (fs, ft) in morphisms.items():
        n, m, p = data[f]
        for g in by_target.get(ft, []):
            m2, l, q = data[g]
            qp = compose_monotone(q, p)
            gt = morphisms[g][1]
            tau = gt.split(":", 1)[1]
            compose[(g, f)] = f"{n}:{fs.split(':', 1)[1]}>{l}:{tau}:{encode_monotone(qp)}"
    return FinCategory(tuple(objects), morphisms, identity, compose)


def simplicial_maps(K: TruncatedSimplicialSet, L: TruncatedSimplicialSet) -> list[dict[str, str]]:
    """All maps K -> L of truncated simplicial sets, as simplex-id tables.

    Backtracking level by level; the tables commute with all faces and
    degeneracies up to the common truncation.
    """
    d = min(K.d, L.d)
    levels = [sorted(K.simplices[n]) for n in range(d + 1)]

    results: list[dict[str, str]] = []

    def extend(n: int, table: dict[str, str]):
        if n > d:
            results.append(dict(table))
            return
        def assign(idx: int):
            if idx == len(levels[n]):
                extend(n + 1, table)
                return
            x = levels[n][idx]
            for y in L.simplices[n]:
                if n > 0 and any(
                    table[K.d_i(n, i, x)] != L.d_i(n, i, y) for i in range(n + 1)
                ):
                    continue
                ok = True
                if n > 0:
                    for j in range(n):
                        for w, wx in [(w, K.s_j(n - 1, j, w)) for w in K.simplices[n - 1]]:
                            if wx == x and L.s_j(n - 1, j, table[w]) != y:
                                ok = False
                                break
                        if not ok:
                            break
                if not ok:
                    continue
                table[x] = y
                assign(idx + 1)
                del table[x]
        assign(0)

    extend(0, {})
    return results


@dataclass
class MappingSpaceData:
    """Per simplex (n, sigma) of K, the functors [n] -> C, realized as the
    n-chains of the nerve; restriction along the simplex category acts by
    the nerve's own simplicial action.
    """

    K: TruncatedSimplicialSet
    C: FinCategory
    nerve_c: TruncatedSimplicialSet

    def chains_at(self, n: int) -> tuple[str, ...]:
        return self.nerve_c.simplices[n]

    def global_sections(self) -> list[dict[str, str]]:
        """Matching families over the category of simplices: exactly the
        simplicial maps K -> nerve(C)."""
        return simplicial_maps(self.K, self.nerve_c)


def mapping_space_data(K: TruncatedSimplicialSet, C: FinCategory) -> MappingSpaceData:
    return MappingSpaceData(K, C, nerve(C, K.d))
