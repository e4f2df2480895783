import pytest
from hypothesis import given

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct
from shadowcalc.colorings import embed_obj
from shadowcalc.errors import BaseMismatch, ShapeMismatch
from shadowcalc.families import Family
from shadowcalc.matrices import MatrixObject
from shadowcalc.named_ops import (figure_unit, op_base_change_l, op_base_change_r, op_boxtimes, op_I, op_odot,
                                  op_pull, op_push, op_shadow, op_unit, run_figure)
from shadowcalc.plans import evaluate, get_backend, plan_from

from conftest import seeds

BACKENDS = ["family", "matrix"]
B = BaseObject((0, 1), name="B")
A = BaseObject((0, 1), name="A")
PT = BaseObject((0,), name="pt")


def fiber(backend_name, base, counts):
    if backend_name == "family":
        return Family.from_counts(base, counts)
    return MatrixObject.from_ranks(base, counts)


def counts(backend_name, X):
    s = get_backend(backend_name).summary(X)
    return s["cardinalities"] if backend_name == "family" else s["ranks"]


def test_unit_plan_is_pull_then_push():
    kinds = [s["kind"] for s in plan_from(figure_unit(B).map).describe()]
    assert kinds == ["tensor", "pull", "push", "graph"]


@pytest.mark.parametrize("backend_name", BACKENDS)
def test_unit_is_the_diagonal(backend_name):
    assert counts(backend_name, op_unit(B, get_backend(backend_name))) == [[1, 0], [0, 1]]


@pytest.mark.parametrize("backend_name", BACKENDS)
def test_shadow_sums_the_diagonal(backend_name):
    b = get_backend(backend_name)
    M = fiber(backend_name, LabeledProduct.of({0: B, 1: B}), {(0, 0): 2, (0, 1): 1, (1, 1): 3})
    assert b.summary(op_shadow(M, b))["total"] == 5


@pytest.mark.parametrize("backend_name", BACKENDS)
def test_base_change_objects(backend_name):
    b = get_backend(backend_name)
    f = BaseMap(A, PT, (0, 0))
    assert counts(backend_name, op_base_change_l(f, b)) == [[1], [1]]
    assert counts(backend_name, op_base_change_r(f, b)) == [[1, 1]]


@pytest.mark.parametrize("backend_name", BACKENDS)
def test_pull_and_push(backend_name):
    b = get_backend(backend_name)
    f = BaseMap(A, PT, (0, 0))
    X = fiber(backend_name, LabeledProduct.of({0: PT}), {(0,): 3})
    Y = fiber(backend_name, LabeledProduct.of({0: A}), {(0,): 1, (1,): 2})
    assert counts(backend_name, op_pull(f, X, b)) == [3, 3]
    assert counts(backend_name, op_push(f, Y, b)) == [3]
    with pytest.raises(BaseMismatch):
        op_pull(f, Y, b)


@pytest.mark.parametrize("backend_name", BACKENDS)
def test_monoidal_unit_and_products(backend_name):
    b = get_backend(backend_name)
    assert b.summary(op_I(b))["total"] == 1
    BB = LabeledProduct.of({0: B, 1: B})
    M = fiber(backend_name, BB, {(0, 0): 2, (1, 1): 1})
    N = fiber(backend_name, BB, {(0, 1): 2, (1, 0): 1})
    assert b.summary(op_boxtimes(M, N, b))["total"] == 9
    assert counts(backend_name, op_odot(op_unit(B, b), M, b)) == counts(backend_name, M)
    assert counts(backend_name, op_odot(M, N, b)) == [[0, 4], [1, 0]]


def test_odot_needs_matching_middle():
    M = Family.from_counts(LabeledProduct.of({0: B, 1: A}), {})
    N = Family.from_counts(LabeledProduct.of({0: PT, 1: B}), {})
    with pytest.raises(BaseMismatch):
        op_odot(M, N)


def test_figure_arity_is_checked():
    with pytest.raises(ShapeMismatch):
        run_figure(figure_unit(B), [Family.from_counts(LabeledProduct.of({0: B}), {})])


@given(seeds)
def test_stage_order_does_not_change_the_value(seed):
    rng = gen.make_rng(seed)
    G = gen.random_labeled_path(rng, 4, force_black=True)
    P = gen.random_darkening_chain(rng, G, 1, share=0.6)[0]
    a = gen.random_assignment(rng, embed_obj(G))
    b = get_backend("family")
    up = evaluate(plan_from(P, "ascending"), a, b)
    down = evaluate(plan_from(P, "descending"), a, b)
    assert {u: b.summary(X) for u, X in up.values.items()} == {u: b.summary(X) for u, X in down.values.items()}
