import pytest
from hypothesis import given
from hypothesis import strategies as st

from shadowcalc.errors import CompositionMismatch, InvalidMorphism
from shadowcalc.graph_core import (Cell, Color, ColoredGraph, GraphMap, MorphismClass, circle_graph, classify_map,
                                   collapse, compose_maps, darkening_map, factorize, identity_map, is_collapsing,
                                   is_covering, is_darkening, path_graph, validate_graph, validate_map)


def darken_then_collapse():
    """○100 e1 w101 e2 ●102 onto ○100 e1 ●101."""
    src = path_graph(["white", "white", "black"])
    tgt = ColoredGraph.build({100: "white", 101: "black"}, {1: (100, 101)})
    return GraphMap(src, tgt, {100: 100, 101: 101, 102: 101}, {1: Cell.edge(1), 2: Cell.vertex(101)})


def test_path_graph_layout():
    g = path_graph(["white", "white", "black", "white"])
    assert g.edges == {1: (100, 101), 2: (101, 102), 3: (102, 103)}
    assert g.internal_whites == (101,)
    assert g.external_whites == (100, 103)
    assert g.blacks == (102,)


def test_circle_graph_has_no_external_whites():
    g = circle_graph(["black", "white", "white"])
    assert g.external_whites == ()
    assert g.internal_whites == (101, 102)
    assert validate_graph(g).valid


def test_validate_graph_lists_every_issue():
    g = ColoredGraph.build({1: "white", 2: "white", 3: "black", 4: "white", 5: "black"},
                           {10: (1, 1), 11: (2, 3), 12: (2, 3), 13: (2, 5), 14: (3, 9)})
    report = validate_graph(g)
    assert not report.valid
    assert set(report.codes()) == {"WhiteLoop", "WhiteDegreeExceeded", "IsolatedVertex", "DanglingEdge"}
    ids = {i.code: i.ids for i in report.issues}
    assert ids["IsolatedVertex"] == (4,)
    assert ids["DanglingEdge"] == (14, 9)


def test_black_loops_are_allowed():
    g = ColoredGraph.build({1: "black"}, {1: (1, 1)})
    assert validate_graph(g).valid


def test_validate_map_color_conditions():
    src = path_graph(["white", "black", "white"])
    tgt = path_graph(["white", "white", "white"])
    m = GraphMap(src, tgt, {100: 100, 101: 101, 102: 102}, {1: Cell.edge(1), 2: Cell.edge(2)})
    report = validate_map(m)
    assert report.codes() == ["ColorViolation"]
    assert report.issues[0].ids == (101, 101)


def test_validate_map_endpoint_mismatch():
    g = path_graph(["white", "black", "white"])
    m = GraphMap(g, g, {100: 100, 101: 101, 102: 102}, {1: Cell.edge(2), 2: Cell.edge(1)})
    assert set(validate_map(m).codes()) == {"EndpointMismatch"}


def test_identity_classifies_as_collapsing():
    g = path_graph(["white", "white", "black", "white"])
    assert validate_map(identity_map(g)).valid
    assert classify_map(identity_map(g)) == MorphismClass.COLLAPSING


def test_darkening_map_is_darkening():
    g = path_graph(["white", "white", "white"])
    assert classify_map(darkening_map(g, [101])) == MorphismClass.DARKENING
    assert darkening_map(g, [101]).target.vertices[101] == Color.BLACK


def test_collapse_names_classes_by_least_id():
    g = path_graph(["white", "black", "black", "white"])
    c = collapse(g, [2])
    assert c.vmap == {100: 100, 101: 101, 102: 101, 103: 103}
    assert c.emap[2] == Cell.vertex(101)
    assert c.target.edges == {1: (100, 101), 3: (101, 103)}
    assert classify_map(c) == MorphismClass.COLLAPSING


def test_factorize_recomposes():
    m = darken_then_collapse()
    d, c, v = factorize(m)
    assert d.target.vertices[101] == Color.BLACK
    assert c.emap[2] == Cell.vertex(101)
    assert compose_maps(compose_maps(d, c), v) == m


def test_factorize_rejects_invalid_maps():
    src = path_graph(["white", "black", "white"])
    tgt = path_graph(["white", "white", "white"])
    m = GraphMap(src, tgt, {100: 100, 101: 101, 102: 102}, {1: Cell.edge(1), 2: Cell.edge(2)})
    with pytest.raises(InvalidMorphism):
        factorize(m)


def test_compose_checks_middle_graph():
    g = path_graph(["white", "black", "white"])
    h = path_graph(["white", "white", "white"])
    with pytest.raises(CompositionMismatch):
        compose_maps(identity_map(g), identity_map(h))


@given(st.lists(st.sampled_from(["white", "black"]), min_size=1, max_size=6), st.data())
def test_factorize_darkenings_and_collapses(colors, data):
    g = path_graph(["white"] + colors + ["white"])
    chosen = data.draw(st.lists(st.sampled_from(g.internal_whites), unique=True) if g.internal_whites
                       else st.just([]))
    d = darkening_map(g, chosen)
    blacks = d.target
    bb = [e for e, (a, b) in blacks.edges.items() if blacks.is_black(a) and blacks.is_black(b)]
    m = compose_maps(d, collapse(blacks, bb))
    assert validate_map(m).valid
    d2, c2, v2 = factorize(m)
    assert compose_maps(compose_maps(d2, c2), v2) == m
    assert set(d2.target.blacks) == set(d.target.blacks)


@st.composite
def covered_circles(draw):
    """A 2-fold circle cover followed by a random darkening and a collapse of black edges."""
    colors = draw(st.lists(st.sampled_from(["white", "black"]), min_size=2, max_size=5))
    n = len(colors)
    base = circle_graph(colors, first_edge=11, first_vertex=200)
    cover = GraphMap(circle_graph(colors * 2), base, {100 + i: 200 + i % n for i in range(2 * n)},
                     {1 + i: Cell.edge(11 + i % n) for i in range(2 * n)})
    whites = list(base.internal_whites)
    chosen = draw(st.lists(st.sampled_from(whites), unique=True) if whites else st.just([]))
    d = darkening_map(base, chosen)
    dark = d.target
    bb = [e for e, (a, b) in dark.edges.items() if dark.is_black(a) and dark.is_black(b)]
    dropped = draw(st.lists(st.sampled_from(bb), unique=True) if bb else st.just([]))
    return compose_maps(compose_maps(cover, d), collapse(dark, dropped)), chosen


def test_two_fold_cover_is_covering():
    base = circle_graph(["black", "white"], first_edge=11, first_vertex=200)
    cover = GraphMap(circle_graph(["black", "white", "black", "white"]), base,
                     {100: 200, 101: 201, 102: 200, 103: 201},
                     {1: Cell.edge(11), 2: Cell.edge(12), 3: Cell.edge(11), 4: Cell.edge(12)})
    assert classify_map(cover) == MorphismClass.COVERING
    d, c, v = factorize(cover)
    assert d.source == d.target and c.source == c.target
    assert v == cover


@given(covered_circles())
def test_factorize_covers_darkenings_and_collapses(drawn):
    m, chosen = drawn
    assert validate_map(m).valid
    d, c, v = factorize(m)
    assert compose_maps(compose_maps(d, c), v) == m
    assert is_darkening(d) and is_collapsing(c) and is_covering(v)
    assert classify_map(c) == MorphismClass.COLLAPSING
    n = len(m.source.vertices) // 2
    lifted = {u for u in m.source.vertices if 200 + (u - 100) % n in chosen}
    assert set(d.target.blacks) == set(m.source.blacks) | lifted
    if chosen:
        assert classify_map(d) == MorphismClass.DARKENING
    if v.target.edges:
        assert classify_map(v) == MorphismClass.COVERING
        assert all(len(pre) == 2 for pre in v.edge_preimages.values())
