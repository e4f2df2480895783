import pytest
from hypothesis import given

from shadowcalc import generators as gen
from shadowcalc.base_finset import (STAR, BaseMap, BaseObject, LabeledProduct, LabeledProductMap, Square,
                                    compose_lp, is_beck_chevalley, product, product_square_is_pullback,
                                    projection)
from shadowcalc.errors import BaseMismatch, NotCommuting, ShapeMismatch

from conftest import base_maps, seeds


def collapse_square():
    """A -> pt on both legs: commutes but is not a pullback when |A| > 1."""
    A = BaseObject((0, 1), name="A")
    pt = BaseObject((0,), name="pt")
    LA, LP = LabeledProduct.of({0: A}), LabeledProduct.of({0: pt})
    f = LabeledProductMap.build(LA, LP, {0: 0}, {0: BaseMap(A, pt, (0, 0))})
    one = LabeledProductMap.identity(LP)
    return Square(top=f, left=f, right=one, bottom=one)


def test_duplicate_elements_rejected():
    with pytest.raises(ShapeMismatch):
        BaseObject((1, 1))


def test_base_map_values_must_land_in_target():
    with pytest.raises(ShapeMismatch):
        BaseMap(BaseObject((0,)), BaseObject((1,)), (0,))


def test_composition_is_diagrammatic():
    A, B, C = BaseObject((0, 1)), BaseObject(("a", "b")), BaseObject((True,))
    f = BaseMap(A, B, ("b", "a"))
    g = BaseMap(B, C, (True, True))
    assert f.then(g).table == (True, True)
    with pytest.raises(BaseMismatch):
        g.then(f)


def test_empty_product_is_star():
    assert product() == STAR
    assert len(product(BaseObject((0, 1)), BaseObject((0, 1, 2)))) == 6


def test_labeled_product_sorts_index():
    lp = LabeledProduct.of({3: BaseObject((0,)), 1: BaseObject((0, 1))})
    assert lp.index == (1, 3)
    assert lp.elements == ((0, 0), (1, 0))
    assert (0, 0) in lp and (2, 0) not in lp


def test_projection_drops_factors():
    lp = LabeledProduct.of({0: BaseObject((0, 1)), 1: BaseObject(("x",))})
    pr = projection(lp, [1])
    assert pr((1, "x")) == ("x",)


@given(base_maps())
def test_identity_is_neutral(f):
    assert BaseMap.identity(f.source).then(f) == f
    assert f.then(BaseMap.identity(f.target)) == f


@given(seeds)
def test_lp_composition_is_associative(seed):
    rng = gen.make_rng(seed)
    f, g, h = gen.lp_chain(rng, 3)
    assert compose_lp(compose_lp(f, g), h) == compose_lp(f, compose_lp(g, h))


@given(seeds)
def test_product_squares_are_beck_chevalley(seed):
    sq = gen.product_square(gen.make_rng(seed))
    assert sq.commutes()
    assert is_beck_chevalley(sq)
    assert product_square_is_pullback(sq)


def test_collapse_square_is_not_beck_chevalley():
    assert not is_beck_chevalley(collapse_square())


def test_non_commuting_square_raises():
    A = BaseObject((0, 1), name="A")
    LA = LabeledProduct.of({0: A})
    swap = LabeledProductMap.build(LA, LA, {0: 0}, {0: BaseMap(A, A, (1, 0))})
    one = LabeledProductMap.identity(LA)
    with pytest.raises(NotCommuting):
        is_beck_chevalley(Square(top=swap, left=one, right=one, bottom=one))
