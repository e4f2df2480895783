import numpy as np
import pytest
from hypothesis import given

from shadowcalc import cardinality as card
from shadowcalc import families as fam
from shadowcalc import generators as gen
from shadowcalc import matrices as mat
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct, LabeledProductMap
from shadowcalc.errors import BaseMismatch, ShapeMismatch
from shadowcalc.plans import get_backend

from conftest import seeds


def collapse_map():
    A = BaseObject((0, 1), name="A")
    pt = BaseObject((0,), name="pt")
    LA, LP = LabeledProduct.of({0: A}), LabeledProduct.of({0: pt})
    return LA, LP, LabeledProductMap.build(LA, LP, {0: 0}, {0: BaseMap(A, pt, (0, 0))})


def test_pullback_copies_fibers():
    LA, LP, f = collapse_map()
    Y = fam.Family.from_counts(LP, {(0,): 3})
    assert fam.pullback(f, Y).cardinalities() == {(0,): 3, (1,): 3}


def test_pushforward_sums_fibers():
    LA, LP, f = collapse_map()
    X = fam.Family.from_counts(LA, {(0,): 1, (1,): 2})
    assert fam.pushforward(f, X).cardinalities() == {(0,): 3}
    with pytest.raises(BaseMismatch):
        fam.pushforward(f, fam.Family.from_counts(LP, {(0,): 1}))


def test_family_map_must_stay_in_fiber():
    LA, _, _ = collapse_map()
    X = fam.Family.from_counts(LA, {(0,): 1, (1,): 1})
    with pytest.raises(ShapeMismatch):
        fam.FamilyMap(X, X, {0: 1, 1: 0})


def test_unit_is_one_point():
    assert len(fam.unit()) == 1
    assert mat.m_unit().total_rank() == 1


def test_tensor_multiplies_counts(square_base):
    X = fam.Family.from_counts(LabeledProduct.of({0: square_base.factor(0)}), {(0,): 2, (1,): 1})
    Y = fam.Family.from_counts(LabeledProduct.of({1: square_base.factor(1)}), {(1,): 4})
    T = fam.tensor_many([X, Y])
    assert T.base == square_base
    assert fam.count_array(T).tolist() == [[0, 8], [0, 4]]


def test_matrix_pushforward_ranks():
    LA, LP, f = collapse_map()
    X = mat.MatrixObject.from_ranks(LA, {(0,): 1, (1,): 2})
    assert mat.m_pushforward(f, X).ranks() == {(0,): 3}
    assert mat.m_pullback(f, mat.m_pushforward(f, X)).total_rank() == 6


def test_matrix_trace_and_composition():
    LA, _, _ = collapse_map()
    X = mat.MatrixObject.from_ranks(LA, {(0,): 2, (1,): 1})
    phi = mat.m_from_blocks(X, X, {(0,): [[1, 2], [3, 4]], (1,): [[5]]})
    assert phi.trace() == 10
    assert mat.m_identity(X).then(phi) == phi
    assert phi.then(phi).block((0,)).tolist() == [[7, 10], [15, 22]]


def test_h_matches_counts(square_base):
    X = fam.Family.from_counts(square_base, {(0, 0): 2, (1, 0): 1})
    assert card.h_summary(X)["ranks"] == fam.count_array(X).tolist()
    assert card.h_obj(X).total_rank() == len(X)


def test_backends_by_name():
    assert get_backend("family").name == "family"
    assert get_backend("matrix").name == "matrix"
    with pytest.raises(ShapeMismatch):
        get_backend("sets")


@given(seeds)
def test_beck_chevalley_iso_on_product_squares(seed):
    rng = gen.make_rng(seed)
    sq = gen.product_square(rng)
    X = gen.family(rng, sq.left.target)
    iso = fam.bc_iso(sq, X)
    assert iso.is_bijective
    H = mat.m_bc_iso(sq, card.h_obj(X))
    assert H.is_permutation()


@given(seeds)
def test_unit_then_counit_pushes_back(seed):
    rng = gen.make_rng(seed)
    f = gen.lp_chain(rng, 1)[0]
    X = gen.family(rng, f.source)
    eta = fam.unit_map(f, X)
    assert len(eta.target) >= len(X)
    pushed = fam.pushforward(f, X)
    assert len(fam.counit_map(f, pushed).target) == len(pushed)


@given(seeds)
def test_h_of_pull_is_a_relabeling(seed):
    rng = gen.make_rng(seed)
    f = gen.lp_chain(rng, 1)[0]
    Y = gen.family(rng, f.target)
    assert card.h_pull(f, Y).is_permutation()
    assert np.array_equal(card.h_obj(fam.pullback(f, Y)).rank_array(),
                          mat.m_pullback(f, card.h_obj(Y)).rank_array())
