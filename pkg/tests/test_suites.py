import pytest

import SUITE_analysis
from pages.suite_pages import calculus_properties, gigantic_laws, gray_edge_pushouts, rotation_negative
from shadowcalc.config import Settings
from shadowcalc.errors import ShapeMismatch


def test_every_page_loads_and_names_its_suites():
    index = SUITE_analysis.suite_index()
    pages = {f["file"] for f in SUITE_analysis.features}
    assert set(index.values()) == pages
    for page in pages:
        module = SUITE_analysis.load_feature(page)
        assert module.SUITE_NAMES
        assert callable(module.run_analysis)


def test_resolve_all_and_page():
    assert set(SUITE_analysis.resolve("all")) == {f["file"] for f in SUITE_analysis.features}
    assert SUITE_analysis.resolve("gigantic_laws") == {"gigantic_laws": None}


def test_resolve_exact_and_prefix():
    assert SUITE_analysis.resolve("d-table") == {"calculus_properties": ["d-table"]}
    rings = SUITE_analysis.resolve("shadow-random")
    assert list(rings) == ["bicategory_coherences"]
    assert sorted(rings["bicategory_coherences"]) == [f"shadow-random-{n}" for n in (1, 2, 3, 4)]


def test_resolve_unknown():
    with pytest.raises(ShapeMismatch):
        SUITE_analysis.resolve("no-such-suite")


def test_load_missing_page():
    with pytest.raises(ShapeMismatch):
        SUITE_analysis.load_feature("no_such_page")


def test_d_table_and_named_figures():
    assert calculus_properties.d_table().passed
    for backend in ("family", "matrix"):
        report = calculus_properties.named_figures(backend)
        assert report.passed, report.to_dict()


def test_calculus_properties_small_run():
    reports = calculus_properties.run_analysis(seed=3, instances=3)
    assert [r.name for r in reports] == calculus_properties.SUITE_NAMES
    assert all(r.passed for r in reports)


def test_gray_edge_pushouts_exhaustive():
    (report,) = gray_edge_pushouts.run_analysis()
    assert report.verdicts
    assert report.passed
    assert gray_edge_pushouts.run_analysis(only=["d-table"]) == []


def test_gigantic_laws_small_run():
    reports = gigantic_laws.run_analysis(seed=1, instances=10)
    assert [r.name for r in reports] == gigantic_laws.SUITE_NAMES
    assert all(r.passed for r in reports)


def test_rotation_page_verdicts():
    reports = {r.name: r for r in rotation_negative.run_analysis(seed=0, instances=2)}
    assert reports["rotation-negative"].verdict == "unequal-as-expected"
    assert reports["rotation-control-identity"].passed
    assert reports["rotation-control-point"].passed


def test_run_suites_by_prefix():
    reports = SUITE_analysis.run_suites("shadow-random", Settings(instances=2))
    assert len(reports) == 4
    assert all(r.passed for r in reports)


@pytest.mark.slow
def test_run_all_in_parallel():
    reports = SUITE_analysis.run_suites("all", Settings(instances=2, jobs=2))
    assert all(r.passed for r in reports), [r.name for r in reports if not r.passed]
