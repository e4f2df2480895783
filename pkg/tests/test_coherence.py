import dataclasses

import numpy as np
import pytest

from shadowcalc import families as fam
from shadowcalc import generators as gen
from shadowcalc.atomic import (ATOMIC_COHERENCES, LEMMAS, counit_pull_prism, counit_push_prism, run_atomic, run_h,
                               unit_pull_prism, unit_push_prism)
from shadowcalc.base_finset import BaseMap, BaseObject
from shadowcalc.bicategory import SUITES, run_suite, shadow_coherence_suite
from shadowcalc.cardinality import H_COHERENCES
from shadowcalc.errors import ShapeMismatch
from shadowcalc.plans import FAMILY_BACKEND
from shadowcalc.relations import CoherenceReport
from shadowcalc.rotation import negative_test_rotation
from shadowcalc.traces import (cyclic_kron_trace, fuller_square, fuller_vs_multitrace, fuller_vs_multitrace_bases,
                               index_sum_trace, point_phis)

SMALL = 5


@pytest.mark.parametrize("backend_name", ["family", "matrix"])
@pytest.mark.parametrize("name", sorted({**ATOMIC_COHERENCES, **LEMMAS}))
def test_atomic_coherences_commute(name, backend_name):
    report = run_atomic(name, seed=11, instances=SMALL, backend_name=backend_name)
    assert report.name == f"atomic {name}"
    assert len(report.verdicts) == SMALL
    assert report.passed, report.verdicts


@pytest.mark.parametrize("name", sorted(H_COHERENCES))
def test_cardinality_map_coherences(name):
    report = run_h(name, seed=3, instances=SMALL)
    assert report.passed, report.verdicts


def doubled_square():
    sq = gen.product_square(gen.make_rng(0))
    return sq, lambda base: fam.Family.from_counts(base, {a: 2 for a in base.elements})


@pytest.mark.parametrize("prism, corner", [
    (unit_push_prism, "top.source"),
    (unit_pull_prism, "left.target"),
    (counit_push_prism, "left.target"),
    (counit_pull_prism, "right.target"),
])
def test_prisms_over_a_square_commute(prism, corner):
    sq, doubled = doubled_square()
    side, end = corner.split(".")
    lhs, rhs = prism(sq, doubled(getattr(getattr(sq, side), end)), FAMILY_BACKEND)
    assert FAMILY_BACKEND.witness(lhs, rhs) is None
    assert lhs.source == rhs.source and lhs.target == rhs.target


def test_prisms_are_the_four_square_coherences():
    assert {ATOMIC_COHERENCES[n].__name__ for n in ("u!", "u*", "c!", "c*")} == {
        "unit_push", "unit_pull", "counit_push", "counit_pull"}
    assert {"triangle!", "triangle*", "unit-composite", "counit-composite"} <= set(LEMMAS)


def test_unit_push_prism_sees_a_twisted_beck_chevalley_map():
    sq, doubled = doubled_square()
    X = doubled(sq.top.source)
    lhs, _ = unit_push_prism(sq, X, FAMILY_BACKEND)
    anchor = X.elements[0][1]
    x1, x2 = [k for k, a in X.elements if a == anchor][:2]
    y1, y2 = lhs(x1), lhs(x2)
    assert y1 != y2
    T = lhs.target
    swap = fam.Bijection(T, T, {**{k: k for k in T.keys()}, y1: y2, y2: y1})
    twisted = dataclasses.replace(FAMILY_BACKEND, bc_map=lambda s, Z: fam.bc_map(s, Z).then(swap))
    bad_lhs, bad_rhs = unit_push_prism(sq, X, twisted)
    assert twisted.witness(bad_lhs, bad_rhs) is not None


def test_unknown_atomic_name():
    with pytest.raises(ShapeMismatch):
        run_atomic("*?*")


@pytest.mark.parametrize("name", sorted(SUITES))
def test_figure_suites(name):
    report = run_suite(name, seed=5, instances=2)
    assert report.passed, report.verdicts
    assert {v["instance"] for v in report.verdicts} == {5, 6}


def test_figure_suite_on_matrices():
    assert run_suite("associativity", seed=1, instances=2, backend_name="matrix").passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_shadow_rings(n):
    report = shadow_coherence_suite(n, seed=2, instances=2)
    assert report.name == f"shadow-random-{n}"
    assert report.passed, report.verdicts


def test_trace_of_a_scalar():
    F = np.array([[7]], dtype=object)
    lhs, rhs = fuller_square(point_phis([F]))
    assert int(lhs[0, 0]) == int(rhs[0, 0]) == 7


def test_trace_of_a_swap_squared():
    F = np.array([[0, 1], [1, 0]], dtype=object)
    lhs, rhs = fuller_square(point_phis([F, F]))
    assert int(lhs[0, 0]) == int(rhs[0, 0]) == 2
    assert index_sum_trace([F, F]) == 2
    assert cyclic_kron_trace([F, F]) == 2


def test_index_sum_matches_matrix_trace():
    rng = np.random.default_rng(0)
    Fs = [rng.integers(-3, 4, (3, 3)).astype(object) for _ in range(3)]
    assert index_sum_trace(Fs) == int(np.trace(Fs[0].dot(Fs[1]).dot(Fs[2])))


def test_fuller_against_multitrace():
    assert fuller_vs_multitrace(seed=0, instances=10).passed
    assert fuller_vs_multitrace_bases(seed=0, instances=3, max_cells=2).passed


def test_rotation_is_not_coherent():
    report = negative_test_rotation(seed=0)
    assert report.expected == "unequal"
    assert report.verdicts[0]["witness"] is not None
    assert report.verdict == "unequal-as-expected"


def test_rotation_controls_are_coherent():
    B = BaseObject((0, 1), name="B")
    identity = negative_test_rotation(seed=0, f=BaseMap.identity(B), expected="equal")
    point = negative_test_rotation(seed=0, base=(0,), expected="equal")
    assert identity.passed and point.passed


def test_report_verdicts():
    report = CoherenceReport("demo")
    assert not report.passed
    report.record(1, True)
    assert report.verdict == "equal"
    report.record(2, False, {"x": 1})
    assert report.verdict == "unequal"
    assert list(report.to_frame().columns) == ["suite", "figure", "instance", "equal", "error"]
    assert report.to_dict()["passed"] is False
