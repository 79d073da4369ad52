"""Staircase poset, exact squares, B-truncation, and grid enumeration."""

import itertools

import pytest

from corrkit.fincat import (
    chain_category,
    check_functor,
    compose_functors,
    finset_skeleton,
    fn_values,
    injections,
    terminal_category,
    verify_pullback_square,
)
from corrkit.grid import (
    ExactSquare,
    b_truncation,
    boundary_inclusions,
    c_of_monotone,
    c_of_simplex,
    check_grid_simplex,
    classify_edge,
    cposet_elements,
    enumerate_grid_simplices,
    exact_squares,
    exact_squares_bruteforce,
)
from corrkit.report import MalformedInputError
from corrkit.setups import (
    EdgeClass,
    GeometricSetup,
    all_class,
    check_geometric_setup,
    injection_class,
    iso_class,
    surjection_class,
)
from corrkit.simplicial import monotone_maps, nerve


# -- geometric setups -----------------------------------------------------


def test_setup_all_morphisms_passes():
    c = finset_skeleton(3)
    s = GeometricSetup(c, all_class(c))
    rep = check_geometric_setup(s)
    assert rep.passed


def test_setup_injections_passes():
    c = finset_skeleton(3)
    s = GeometricSetup(c, injection_class(c))
    assert check_geometric_setup(s).passed


def test_setup_two_point_image_class_fails_composition():
    # morphisms whose image has exactly two elements: composing two of them
    # can collapse the image, leaving the class
    c = finset_skeleton(3)
    members = frozenset(m for m in c.morphism_ids if len(set(fn_values(m))) == 2)
    s = GeometricSetup(c, EdgeClass(c, members))
    rep = check_geometric_setup(s)
    failed = {f.name for f in rep.failures}
    assert "closed-under-composition" in failed
    w = next(f for f in rep.failures if f.name == "closed-under-composition").witness
    g, f = w["pair"]
    assert c.comp(g, f) == w["composite"] and w["composite"] not in members


def test_setup_partial_oracle_semantics():
    # FinSet truncated at 2 lacks 2 x_1 2; gaps are coverage notes by
    # default and failures only under require_total
    c = finset_skeleton(2)
    s = GeometricSetup(c, all_class(c))
    rep = check_geometric_setup(s)
    assert rep.passed
    note = next(ch for ch in rep.checks if ch.name == "pullback-existence")
    assert note.witness["gaps"] > 0
    assert not check_geometric_setup(s, require_total=True).passed


def test_setup_unstable_class_detected():
    c = finset_skeleton(2)
    members = c.iso_ids | {"1>2:0"}
    s = GeometricSetup(c, EdgeClass(c, members))
    rep = check_geometric_setup(s)
    failed = {f.name for f in rep.failures}
    # base change of 1 -> 2 along the other point is 0 -> 1, not in class
    assert "pullback-stability" in failed


def test_edge_class_flags():
    c = finset_skeleton(2)
    assert iso_class(c).closed_under_iso
    assert all_class(c).closed_under_composition
    assert injection_class(c).pullback_stable
    assert surjection_class(c).closed_under_composition
    # injections are right cancellative: if p.q injective then q injective
    assert injection_class(c).right_cancellative


def test_certified_pullback_detects_corruption():
    c = finset_skeleton(2)
    s = GeometricSetup(c, all_class(c))
    f, g = "1>2:0", "1>2:1"
    s.pullback(f, g)
    s._oracle[(f, g)] = ("1", "1>1:0", "1>1:0")
    with pytest.raises(RuntimeError):
        s.certified_pullback(f, g)


def test_pullback_error_names_cospan():
    c = finset_skeleton(2)
    s = GeometricSetup(c, all_class(c))
    with pytest.raises(MalformedInputError) as e:
        s.pullback("2>1:0.0", "2>1:0.0")
    assert "2>1:0.0" in str(e.value)


# -- staircase poset ------------------------------------------------------


def test_cposet_counts():
    for n in range(5):
        assert len(cposet_elements(n)) == (n + 1) * (n + 2) // 2
        assert len(c_of_simplex(n).objects) == (n + 1) * (n + 2) // 2


def test_c_of_simplex_is_valid_poset():
    from corrkit.fincat import check_category, is_thin

    for n in range(4):
        c = c_of_simplex(n)
        assert check_category(c).passed and is_thin(c)


def test_classify_edges_of_1_simplex():
    assert classify_edge(1, ((0, 1), (1, 1))) == "vertical"
    assert classify_edge(1, ((0, 1), (0, 0))) == "horizontal"
    assert classify_edge(2, ((0, 2), (1, 1))) == "mixed"
    assert classify_edge(1, ((0, 0), (0, 0))) == "mixed"
    with pytest.raises(MalformedInputError):
        classify_edge(1, ((0, 0), (1, 1)))


def test_exact_squares_small():
    assert exact_squares(0) == []
    assert exact_squares(1) == []
    sq = exact_squares(2)
    assert sq == [ExactSquare(0, 1, 1, 2)]
    assert sq[0].corners() == ((0, 2), (1, 2), (0, 1), (1, 1))


def test_exact_squares_match_bruteforce():
    for n in range(5):
        assert exact_squares(n) == exact_squares_bruteforce(n)


def test_exact_square_count_n3():
    # oracle: choose i < i' <= j' < j in [0..3]: C(4,2) pairs with the
    # inner constraint; recount directly
    count = sum(
        1
        for i in range(4)
        for i2 in range(i + 1, 4)
        for j2 in range(i2, 4)
        for j in range(j2 + 1, 4)
    )
    assert len(exact_squares(3)) == count == 5


# -- B truncation ---------------------------------------------------------


def test_b_truncation_terminal():
    K = nerve(terminal_category(), 3)
    for n in range(4):
        assert len(b_truncation(K, n)) == 1


def test_b_truncation_interval():
    K = nerve(chain_category(1), 2)
    # monotone maps from the wedge poset (0,1) <= (0,0), (1,1) to the 2-chain
    assert len(b_truncation(K, 1)) == 5
    assert len(b_truncation(K, 0)) == len(K.simplices[0])


def test_b_truncation_rejects_raw_simplicial_set():
    from corrkit.simplicial import standard_cell

    with pytest.raises(MalformedInputError):
        b_truncation(standard_cell("simplex", 1), 1)


def test_b_functoriality():
    c = chain_category(1)
    K = nerve(c, 2)
    cells = {n: b_truncation(K, n) for n in range(3)}
    for n in range(3):
        for m in range(3):
            for p in monotone_maps(m, n):
                induced = c_of_monotone(p, m, n)
                assert check_functor(induced).passed
                for F in cells[n]:
                    restricted = compose_functors(F, induced)
                    assert check_functor(restricted).passed
                    assert any(
                        G.obj_map == restricted.obj_map and G.mor_map == restricted.mor_map
                        for G in cells[m]
                    )


def test_boundary_inclusions():
    for n in (1, 2):
        gamma, gamma_prime = boundary_inclusions(n)
        assert check_functor(gamma).passed
        assert check_functor(gamma_prime).passed
    gamma, gamma_prime = boundary_inclusions(2)
    assert set(gamma.obj_map.values()) == {"(0,0)", "(0,1)", "(0,2)"}
    assert set(gamma_prime.obj_map.values()) == {"(0,2)", "(1,2)", "(2,2)"}
    # gamma hits only horizontal edges, gamma' only vertical ones
    from corrkit.grid import cp_parse

    for m, image in gamma.mor_map.items():
        a, b = gamma.target.morphisms[image]
        if a != b:
            assert classify_edge(2, (cp_parse(a), cp_parse(b))) == "horizontal"
    for m, image in gamma_prime.mor_map.items():
        a, b = gamma_prime.target.morphisms[image]
        if a != b:
            assert classify_edge(2, (cp_parse(a), cp_parse(b))) == "vertical"


# -- grid simplices -------------------------------------------------------


def _setup2():
    c = finset_skeleton(2)
    return GeometricSetup(c, all_class(c))


def test_grid_k1_is_plain_edges():
    s = _setup2()
    grids = enumerate_grid_simplices(s, [all_class(s.category)], 1, 1)
    assert len(grids) == len(s.category.morphism_ids)
    for g in grids:
        assert check_grid_simplex(g, [all_class(s.category)]) == []


def test_grid_k2_inj_all_matches_bruteforce():
    s = _setup2()
    c = s.category
    inj = injections(c)
    grids = enumerate_grid_simplices(s, [EdgeClass(c, inj), all_class(c)], 2, 1)
    count = 0
    for f in c.morphism_ids:  # direction 0 (in inj) out of the corner
        if f not in inj:
            continue
        for g in c.morphism_ids:  # direction 1 out of the corner
            if c.src(g) != c.src(f):
                continue
            for top in c.morphism_ids:  # direction 1 edge after f
                if top not in () and c.src(top) != c.dst(f):
                    continue
                for right in c.morphism_ids:  # direction 0 edge after g
                    if c.src(right) != c.dst(g) or right not in inj:
                        continue
                    if c.dst(right) != c.dst(top):
                        continue
                    if c.comp(top, f) != c.comp(right, g):
                        continue
                    if verify_pullback_square(c, top, right, c.src(f), f, g):
                        count += 1
    assert len(grids) == count > 0


def test_grid_k2_iso_iso():
    s = _setup2()
    c = s.category
    grids = enumerate_grid_simplices(s, [iso_class(c), iso_class(c)], 2, 1)
    # iso legs force the square: one grid per pair of composable isos out of
    # each corner object
    expected = sum(
        1
        for f in c.iso_ids
        for g in c.iso_ids
        if c.src(f) == c.src(g)
        for top in c.iso_ids
        if c.src(top) == c.dst(f)
        for right in c.iso_ids
        if c.src(right) == c.dst(g) and c.comp(top, f) == c.comp(right, g)
    )
    assert len(grids) == expected > 0


def test_grid_k3_cube_over_point_category():
    c = finset_skeleton(1)
    s = GeometricSetup(c, all_class(c))
    grids = enumerate_grid_simplices(s, [all_class(c)] * 3, 3, 1)
    assert grids
    for g in grids:
        assert check_grid_simplex(g, [all_class(c)] * 3) == []


def test_grid_bounds_rejected():
    s = _setup2()
    with pytest.raises(MalformedInputError):
        enumerate_grid_simplices(s, [all_class(s.category)], 4, 1)
    with pytest.raises(MalformedInputError):
        enumerate_grid_simplices(s, [all_class(s.category)], 1, 3)
