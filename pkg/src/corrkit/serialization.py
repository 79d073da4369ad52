"""JSON envelopes for categories, lattices, and declarations.

Every envelope carries its schema tag in-band and is rejected on unknown
fields, so a file cannot silently smuggle unchecked data.  All dumps are
deterministic (sorted keys) so reports built on them are byte-stable.
"""

from __future__ import annotations

import json

from .descent import Atlas, LocalizationProblem, PairDeclaration, identity_atlas
from .fincat import FinCategory, FunctorData
from .lattices import FiniteLattice
from .report import MalformedInputError
from .setups import EdgeClass, GeometricSetup
from .shriek import NagataSetup

CATEGORY_SCHEMA = "corrkit-category/1"
LATTICE_SCHEMA = "corrkit-lattice/1"
NAGATA_SCHEMA = "corrkit-nagata/1"
PAIR_SCHEMA = "corrkit-pair/1"
LOCALIZATION_SCHEMA = "corrkit-localization/1"

COMPOSE_SEP = "∘"  # the composition ring, not expected inside ids


def _check_fields(d: dict, schema: str, required, optional=()):
    if not isinstance(d, dict):
        raise MalformedInputError("envelope must be a JSON object")
    if d.get("schema") != schema:
        raise MalformedInputError(f"expected schema {schema!r}, got {d.get('schema')!r}")
    allowed = set(required) | set(optional) | {"schema"}
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise MalformedInputError(f"unknown field {unknown[0]!r} in {schema}")
    missing = sorted(set(required) - set(d))
    if missing:
        raise MalformedInputError(f"missing field {missing[0]!r} in {schema}")


# -- categories ------------------------------------------------------------


def category_to_dict(c: FinCategory) -> dict:
    for m in c.morphism_ids:
        if COMPOSE_SEP in m:
            raise MalformedInputError(f"morphism id {m!r} contains the composition separator")
    out = {
        "schema": CATEGORY_SCHEMA,
        "objects": list(c.objects),
        "morphisms": [
            {"id": m, "src": c.src(m), "dst": c.dst(m)} for m in c.morphism_ids
        ],
        "identities": dict(c.identity),
        "compose": {f"{g}{COMPOSE_SEP}{f}": h for (g, f), h in sorted(c.compose.items())},
    }
    sizes = getattr(c, "object_size", None)
    if sizes is not None:
        out["sizes"] = dict(sizes)
    return out


def category_from_dict(d: dict) -> FinCategory:
    _check_fields(d, CATEGORY_SCHEMA, ("objects", "morphisms", "identities", "compose"), ("sizes",))
    morphisms = {}
    for entry in d["morphisms"]:
        extra = sorted(set(entry) - {"id", "src", "dst"})
        if extra:
            raise MalformedInputError(f"unknown field {extra[0]!r} in morphism entry")
        morphisms[entry["id"]] = (entry["src"], entry["dst"])
    compose = {}
    for key, h in d["compose"].items():
        g, sep, f = key.partition(COMPOSE_SEP)
        if not sep:
            raise MalformedInputError(f"malformed compose key {key!r}")
        compose[(g, f)] = h
    c = FinCategory(tuple(d["objects"]), morphisms, dict(d["identities"]), compose)
    sizes = d.get("sizes")
    if sizes is not None:
        bad = sorted(set(sizes) ^ set(c.objects))
        if bad:
            raise MalformedInputError(f"sizes do not match objects at {bad[0]!r}")
        c.object_size = {k: int(v) for k, v in sizes.items()}  # type: ignore[attr-defined]
    return c


# -- lattices --------------------------------------------------------------


def lattice_to_dict(L: FiniteLattice) -> dict:
    out = {
        "schema": LATTICE_SCHEMA,
        "elements": list(L.elements),
        "leq": sorted([a, b] for a, b in L.leq),
        "frame": L.is_frame,
    }
    if L.tensor_table is not None:
        out["tensor"] = sorted([a, b, t] for (a, b), t in L.tensor_table.items())
    return out


def lattice_from_dict(d: dict) -> FiniteLattice:
    _check_fields(d, LATTICE_SCHEMA, ("elements", "leq", "frame"), ("tensor",))
    tensor = None
    if "tensor" in d:
        tensor = {(a, b): t for a, b, t in d["tensor"]}
    L = FiniteLattice(tuple(d["elements"]), frozenset((a, b) for a, b in d["leq"]), tensor)
    if bool(d["frame"]) != L.is_frame:
        raise MalformedInputError("frame flag disagrees with the order tables")
    return L


# -- marked classes and declarations ---------------------------------------


def _class_members(c: FinCategory, ids) -> frozenset:
    return EdgeClass(c, frozenset(ids)).members


def nagata_to_dict(ns: NagataSetup) -> dict:
    return {
        "schema": NAGATA_SCHEMA,
        "category": category_to_dict(ns.setup.category),
        "e": sorted(ns.setup.e.members),
        "i": sorted(ns.i_class.members),
        "p": sorted(ns.p_class.members),
    }


def nagata_from_dict(d: dict) -> NagataSetup:
    _check_fields(d, NAGATA_SCHEMA, ("category", "e", "i", "p"))
    c = category_from_dict(d["category"])
    setup = GeometricSetup(c, EdgeClass(c, _class_members(c, d["e"])))
    return NagataSetup(setup, EdgeClass(c, _class_members(c, d["i"])), EdgeClass(c, _class_members(c, d["p"])))


def pair_to_dict(pd: PairDeclaration) -> dict:
    cover_ids = None
    atlases = {}
    for obj, lst in sorted(pd.atlases.items()):
        atlases[obj] = [a.x for a in lst]
        for a in lst:
            members = sorted(a.s.members)
            if cover_ids is None:
                cover_ids = members
            elif cover_ids != members:
                raise MalformedInputError("atlases disagree on the cover class")
    return {
        "schema": PAIR_SCHEMA,
        "kind": pd.kind,
        "category": category_to_dict(pd.big.category),
        "e_big": sorted(pd.big.e.members),
        "small_objects": list(pd.small_objects),
        "s_small": sorted(pd.s_small),
        "s_big": sorted(pd.s_big),
        "e_small": sorted(pd.e_small),
        "cover": cover_ids or [],
        "atlases": atlases,
    }


def pair_from_dict(d: dict) -> PairDeclaration:
    _check_fields(
        d,
        PAIR_SCHEMA,
        ("kind", "category", "e_big", "small_objects", "s_small", "s_big", "e_small", "cover", "atlases"),
    )
    c = category_from_dict(d["category"])
    big = GeometricSetup(c, EdgeClass(c, _class_members(c, d["e_big"])))
    cover = EdgeClass(c, _class_members(c, d["cover"]))
    small_objects = tuple(d["small_objects"])
    atlases = {
        obj: tuple(Atlas(big, x, cover, small_objects) for x in lst)
        for obj, lst in d["atlases"].items()
    }
    return PairDeclaration(
        d["kind"],
        big,
        small_objects,
        frozenset(d["s_small"]),
        frozenset(d["s_big"]),
        frozenset(d["e_small"]),
        atlases,
    )


def localization_to_dict(lp: LocalizationProblem) -> dict:
    return {
        "schema": LOCALIZATION_SCHEMA,
        "source": category_to_dict(lp.p.source),
        "target": category_to_dict(lp.p.target),
        "obj_map": dict(lp.p.obj_map),
        "mor_map": dict(lp.p.mor_map),
        "inverted": sorted(lp.r),
    }


def localization_from_dict(d: dict) -> LocalizationProblem:
    _check_fields(d, LOCALIZATION_SCHEMA, ("source", "target", "obj_map", "mor_map", "inverted"))
    src = category_from_dict(d["source"])
    dst = category_from_dict(d["target"])
    p = FunctorData(src, dst, dict(d["obj_map"]), dict(d["mor_map"]))
    return LocalizationProblem(p, frozenset(d["inverted"]))


# -- generic entry points --------------------------------------------------

_LOADERS = {
    CATEGORY_SCHEMA: category_from_dict,
    LATTICE_SCHEMA: lattice_from_dict,
    NAGATA_SCHEMA: nagata_from_dict,
    PAIR_SCHEMA: pair_from_dict,
    LOCALIZATION_SCHEMA: localization_from_dict,
}


def from_dict(d: dict):
    if not isinstance(d, dict) or "schema" not in d:
        raise MalformedInputError("envelope lacks a schema tag")
    loader = _LOADERS.get(d["schema"])
    if loader is None:
        raise MalformedInputError(f"unknown schema {d['schema']!r}")
    return loader(d)


def dumps(d: dict) -> str:
    return json.dumps(d, sort_keys=True, indent=2)


def loads(text: str):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"not valid JSON: line {exc.lineno}, column {exc.colno}")
    return from_dict(payload)
