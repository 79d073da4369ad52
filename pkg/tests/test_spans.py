"""Span composition, the homotopy category, coproducts, tensor edges, grids."""

import pytest

from corrkit.fincat import (
    check_category,
    check_functor,
    finset_category,
    finset_size,
    finset_skeleton,
    opposite,
)
from corrkit.grid import GridSimplex, enumerate_grid_simplices
from corrkit.report import MalformedInputError, ResourceLimitError
from corrkit.setups import GeometricSetup, all_class, iso_class
from corrkit.spans import (
    HCorr,
    Span,
    TensorEdge,
    check_coproduct,
    check_grid_staircase_surjectivity,
    check_span_laws,
    classify_cocartesian,
    compose_spans,
    corr_simplices,
    find_span_iso,
    grid_to_staircase,
    homotopy_category,
    identity_span,
    is_cocartesian,
    outer_edge_is_composite,
    pi_all,
    pi_e,
    simplex_edge,
    span_class_key,
    spans_between,
    spans_isomorphic,
)


def setup_all(max_size=2):
    c = finset_skeleton(max_size)
    return GeometricSetup(c, all_class(c))


def setup_isos(max_size=2):
    c = finset_skeleton(max_size)
    return GeometricSetup(c, iso_class(c))


# -- composition ----------------------------------------------------------


def test_compose_fiber_product_example():
    # {a,b} <- {w} -> {y} then {y} <- {v1,v2} -> {z}: apex has 2 elements
    s = setup_all()
    c = s.category
    a = Span("1>2:0", "1>1:0")
    b = Span("2>1:0.0", "2>1:0.0")
    ab = compose_spans(s, a, b)
    assert finset_size(c, c.src(ab.left)) == 2


def test_compose_with_identity_span_is_unit():
    s = setup_all()
    c = s.category
    sp = Span("2>1:0.0", "2>2:1.0")
    lhs = compose_spans(s, identity_span(c, "1"), sp)
    rhs = compose_spans(s, sp, identity_span(c, "2"))
    assert spans_isomorphic(c, lhs, sp)
    assert spans_isomorphic(c, rhs, sp)


def test_compose_left_iso_is_postcomposition():
    s = setup_all()
    c = s.category
    a = Span("2>1:0.0", "2>2:0.1")
    swap = Span("2>2:1.0", "2>2:0.1")  # left leg iso
    ab = compose_spans(s, a, swap)
    assert spans_isomorphic(c, ab, Span(a.left, c.comp("2>2:0.1", c.comp(c.inverse("2>2:1.0"), a.right))))


def test_class_key_agrees_with_iso_search():
    s = setup_all()
    c = s.category
    spans = spans_between(s, "2", "2", max_apex=2)
    for a in spans:
        for b in spans:
            assert (span_class_key(c, a) == span_class_key(c, b)) == spans_isomorphic(c, a, b)


def test_class_key_generic_carrier():
    from corrkit.fincat import chain_category

    c = chain_category(2)
    s = GeometricSetup(c, all_class(c))
    a = Span("0<=1", "0<=2")
    b = Span("0<=1", "0<=2")
    assert span_class_key(c, a) == span_class_key(c, b)
    assert find_span_iso(c, a, b) == "0<=0"


# -- homotopy category ----------------------------------------------------


def test_hcorr_classes_over_tiny_carrier():
    s = setup_all(1)
    hc = HCorr(s)
    assert len(hc.classes("1", "1")) == 2  # empty apex and singleton apex


def test_homotopy_category_is_a_category():
    s = setup_all(1)
    hc = homotopy_category(s)
    assert check_category(hc).passed


def test_homotopy_category_isos_matches_opposite():
    s = setup_isos(2)
    hc = homotopy_category(s)
    assert check_category(hc).passed
    c = s.category
    cop = opposite(c)
    for x in c.objects:
        for y in c.objects:
            assert len(hc.hom(x, y)) == len(cop.hom(x, y))


def test_identity_class_is_unit():
    s = setup_all(1)
    hc = homotopy_category(s)
    for m in hc.morphism_ids:
        x, y = hc.morphisms[m]
        assert hc.comp(m, hc.identity[x]) == m
        assert hc.comp(hc.identity[y], m) == m


def test_class_bound_raises_resource_error():
    s = setup_all(2)
    hc = HCorr(s, max_apex=1)
    with pytest.raises(ResourceLimitError):
        hc.class_id(Span("2>1:0.0", "2>1:0.0"))


def test_pi_functors():
    for s in (setup_all(1), setup_isos(2)):
        hc = HCorr(s)
        assert check_functor(pi_all(hc)).passed
        assert check_functor(pi_e(hc)).passed


def test_span_laws_small():
    s = setup_all(2)
    rep = check_span_laws(s, ["0", "1", "2"], apex_bound=1)
    assert rep.passed
    cov = next(ch for ch in rep.checks if ch.name == "associativity-up-to-iso")
    assert cov.witness["covered"] > 0


# -- correspondence simplices ---------------------------------------------


def test_corr_simplices_dim0():
    s = setup_all(1)
    cells = corr_simplices(s, 0)
    assert len(cells) == len(s.category.objects)


def test_corr_simplices_dim1_are_spans():
    s = setup_all(1)
    cells = corr_simplices(s, 1)
    total_spans = sum(
        len(spans_between(s, x, y)) for x in s.category.objects for y in s.category.objects
    )
    assert len(cells) == total_spans


def test_corr_simplices_dim1_isos_marking():
    s = setup_isos(2)
    for cs in corr_simplices(s, 1):
        sp = simplex_edge(cs, (0, 0), (1, 1))
        assert sp.right in s.category.iso_ids


def test_corr_2_cells_outer_edge_composite():
    s = setup_all(1)
    cells = corr_simplices(s, 2)
    assert cells
    for cs in cells:
        assert outer_edge_is_composite(s, cs)


def test_corr_2_cells_cover_composable_pairs():
    s = setup_all(1)
    c = s.category
    cells = corr_simplices(s, 2)
    found = {
        (span_class_key(c, simplex_edge(cs, (0, 0), (1, 1))), span_class_key(c, simplex_edge(cs, (1, 1), (2, 2))))
        for cs in cells
    }
    for x in c.objects:
        for y in c.objects:
            for z in c.objects:
                for a in spans_between(s, x, y):
                    for b in spans_between(s, y, z):
                        assert (span_class_key(c, a), span_class_key(c, b)) in found


# -- coproducts -----------------------------------------------------------


def carrier_with_sums():
    return finset_category({str(k): k for k in range(5)})


def test_coproduct_singletons():
    c = carrier_with_sums()
    s = GeometricSetup(c, all_class(c))
    rep = check_coproduct(s, "1", "1", targets=["0", "1", "2"])
    assert rep.passed


def test_coproduct_with_empty_factor():
    c = carrier_with_sums()
    s = GeometricSetup(c, all_class(c))
    rep = check_coproduct(s, "0", "2", targets=["1", "2"])
    assert rep.passed


def test_coproduct_fails_with_iso_class():
    c = finset_skeleton(2)
    s = GeometricSetup(c, iso_class(c))
    rep = check_coproduct(s, "1", "1")
    assert not rep.passed
    failed = rep.first_failure()
    assert failed.name == "inclusion-spans-marked"
    assert failed.witness["legs"]


def test_coproduct_missing_carrier_object():
    c = finset_skeleton(2)
    s = GeometricSetup(c, all_class(c))
    rep = check_coproduct(s, "1", "2")  # 1 + 2 = 3 is outside the carrier
    assert not rep.passed
    assert rep.first_failure().name == "carrier-coproduct-exists"


# -- tensor edges ---------------------------------------------------------


def _product_edge(c, iso="2>2:0.1"):
    # alpha: <2> -> <1> active; apex 2 = 1 x 2 with genuine projections
    return TensorEdge(
        category=c,
        alpha=(1, 1),
        sources=("1", "2"),
        targets=("2",),
        apexes=("2",),
        to_sources={(1, 1): "2>1:0.0", (1, 2): "2>2:0.1"},
        to_targets=(iso,),
    )


def test_cocartesian_identity_edge():
    s = setup_all(2)
    c = s.category
    e = TensorEdge(c, (1,), ("2",), ("2",), ("2",), {(1, 1): c.identity["2"]}, (c.identity["2"],))
    assert is_cocartesian(s, e)


def test_cocartesian_product_edge():
    s = setup_all(2)
    assert is_cocartesian(s, _product_edge(s.category))


def test_not_cocartesian_non_iso_target():
    s = setup_all(2)
    e = TensorEdge(
        s.category,
        (1, 1),
        ("1", "2"),
        ("1",),
        ("2",),
        {(1, 1): "2>1:0.0", (1, 2): "2>2:0.1"},
        ("2>1:0.0",),
    )
    rep = classify_cocartesian(s, e)
    assert not rep.passed
    assert rep.first_failure().name == "target-maps-iso"


def test_not_cocartesian_wrong_apex():
    s = setup_all(2)
    # apex 1 cannot be the product 1 x 2
    e = TensorEdge(
        s.category,
        (1, 1),
        ("1", "2"),
        ("1",),
        ("1",),
        {(1, 1): "1>1:0", (1, 2): "1>2:0"},
        ("1>1:0",),
    )
    rep = classify_cocartesian(s, e)
    assert not rep.passed
    assert rep.first_failure().name == "apex-is-fiber-product"


def test_tensor_edge_validation():
    s = setup_all(2)
    with pytest.raises(MalformedInputError):
        TensorEdge(s.category, (2,), ("1",), ("1",), ("1",), {(1, 1): "1>1:0"}, ("1>1:0",))


def test_cocartesian_invariant_under_iso_replacement():
    s = setup_all(2)
    c = s.category
    base = _product_edge(c)
    # replace the apex data along the swap automorphism of the apex
    swapped = TensorEdge(
        c,
        (1, 1),
        ("1", "2"),
        ("2",),
        ("2",),
        {(1, 1): c.comp("2>1:0.0", "2>2:1.0"), (1, 2): c.comp("2>2:0.1", "2>2:1.0")},
        (c.comp("2>2:0.1", "2>2:1.0"),),
    )
    assert is_cocartesian(s, base) == is_cocartesian(s, swapped)


# -- grid to staircase ----------------------------------------------------


def test_grid_restriction_n1_upper_right_span():
    s = setup_all(1)
    grids = enumerate_grid_simplices(s, [all_class(s.category)] * 2, 2, 1)
    assert grids
    for g in grids:
        cs = grid_to_staircase(s, g)
        sp = simplex_edge(cs, (0, 0), (1, 1))
        assert sp.right == g.edges[((0, 0), 0)]
        assert sp.left == g.edges[((0, 0), 1)]


def test_identity_grid_gives_degenerate_cell():
    s = setup_all(1)
    c = s.category
    i = c.identity["1"]
    objs = {(a, b): "1" for a in range(3) for b in range(3)}
    edges = {((a, b), d): i for a in range(3) for b in range(3) for d in (0, 1) if (a, b)[d] < 2}
    g = GridSimplex(2, 2, c, objs, edges)
    cs = grid_to_staircase(s, g)
    assert set(cs.functor.obj_map.values()) == {"1"}
    assert set(cs.functor.mor_map.values()) == {i}


def test_grid_staircase_surjectivity_isos():
    s = setup_isos(2)
    for n in (1, 2):
        assert check_grid_staircase_surjectivity(s, n).passed


def test_grid_staircase_surjectivity_fails_for_all_class():
    # a span that is not jointly injective is never a fiber product, so the
    # corresponding cell cannot be a grid restriction
    s = setup_all(1)
    rep = check_grid_staircase_surjectivity(s, 1)
    assert not rep.passed
