import pytest
from hypothesis import given

from shadowcalc import generators as gen
from shadowcalc.colorings import (Color3, Coloring, check_pushout, common_graying, compose_gigantic, darker_leq,
                                  embed, gray_edges, gray_edges_map, grayer_leq, identity_gigantic,
                                  validate_coloring, validate_gigantic)
from shadowcalc.d_diagram import check_rotation_bc, colorings_of, d_arrow, d_object
from shadowcalc.errors import NotAFlipSquare, NotSingleFlip, OrderViolation
from shadowcalc.labeled_graphs import compose_labeled

from conftest import seeds


def test_all_white_keeps_only_mixed_edges(black_path):
    gset = gray_edges(Coloring.all_white(black_path))
    assert gset.reps == (2, 3)
    assert all(len(s.edges) == 1 for s in gset.edges)


def test_gray_string_runs_along_orientation(black_path):
    gset = gray_edges(Coloring.of(black_path, {101: "gray"}))
    assert gset.reps == (1, 3)
    s = gset.by_rep[1]
    assert s.edges == (1, 2)
    assert s.interior == (101,)
    assert s.ends == (100, 102)
    assert gset.containing(2) == 1


def test_validate_coloring_fixes_blacks_and_external_whites(black_path):
    c = Coloring.of(black_path, {102: "gray", 100: "black"})
    assert set(validate_coloring(c).codes()) == {"BlackNotFixed", "ExternalNotWhite"}
    assert validate_coloring(Coloring.of(black_path, {101: "gray", 103: "black"})).valid


def test_orders(black_path):
    white = Coloring.all_white(black_path)
    gray = white.with_color(101, Color3.GRAY)
    black = white.with_color(101, Color3.BLACK)
    assert grayer_leq(white, gray) and grayer_leq(black, gray)
    assert not grayer_leq(white, black)
    assert darker_leq(white, gray) and darker_leq(gray, black)
    assert common_graying(white, black) == gray


def test_gray_edges_map_needs_grayer_target(black_path):
    white = Coloring.all_white(black_path)
    gray = white.with_color(101, Color3.GRAY)
    assert gray_edges_map(white, gray) == {2: 1, 3: 3}
    with pytest.raises(OrderViolation):
        gray_edges_map(gray, white)


def test_flip_squares_are_pushouts(black_path):
    c = Coloring.all_white(black_path).with_color(103, Color3.BLACK)
    c1, c2 = c.with_color(101, Color3.GRAY), c.with_color(103, Color3.GRAY)
    assert check_pushout(c, c1, c2, common_graying(c1, c2))
    with pytest.raises(NotAFlipSquare):
        check_pushout(c, c1, c1, c1)


def test_d_object_is_indexed_by_representatives(black_path):
    c = Coloring.of(black_path, {101: "gray"})
    D = d_object(black_path, c)
    assert D.index == (1, 3)


def test_d_arrow_needs_a_single_flip(black_path):
    white = Coloring.all_white(black_path)
    both = Coloring.of(black_path, {101: "gray", 103: "gray"})
    with pytest.raises(NotSingleFlip):
        d_arrow(black_path, both, white)
    f = d_arrow(black_path, both, both.with_color(101, Color3.WHITE))
    assert f.target.index == (2, 3)


def test_colorings_of_counts(black_path):
    assert len(colorings_of(black_path)) == 9


def test_identity_labels_satisfy_rotation_check(black_path):
    assert check_rotation_bc(black_path).valid


@given(seeds)
def test_embedding_is_functorial(seed):
    rng = gen.make_rng(seed)
    G = gen.random_labeled_path(rng, 3, force_black=True)
    P1, P2 = gen.random_darkening_chain(rng, G, 2)
    m = embed(compose_labeled(P1, P2))
    assert validate_gigantic(m).valid
    assert m.set_map == compose_gigantic(embed(P1), embed(P2)).set_map
    assert compose_gigantic(identity_gigantic(m.source), m).set_map == m.set_map
