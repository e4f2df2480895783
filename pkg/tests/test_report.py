from shadowcalc.errors import ShapeMismatch
from shadowcalc.relations import CoherenceReport
from shadowcalc.report import SUMMARY_COLUMNS, failures, summary_frame, verdict_frame, write_pdf


def make_reports():
    good = CoherenceReport("unit-left", "unit triangle")
    good.record(0, True)
    good.record(1, True)
    bad = CoherenceReport("pentagon", "pentagon")
    bad.record(0, True)
    bad.record(1, False, {"input": 1})
    bad.record_error(2, ShapeMismatch("fibers disagree"))
    neg = CoherenceReport("rotation-negative", "rotation", expected="unequal")
    neg.record(0, False, {"entry": [0, 1]})
    return [good, bad, neg]


def test_summary_frame():
    frame = summary_frame(make_reports())
    assert list(frame.columns) == SUMMARY_COLUMNS
    assert list(frame["verdict"]) == ["equal", "unequal", "unequal-as-expected"]
    assert list(frame["passed"]) == [True, False, True]
    assert list(frame["errors"]) == [0, 1, 0]


def test_verdict_frame_stacks_instances():
    assert len(verdict_frame(make_reports())) == 6
    assert verdict_frame([]).empty


def test_failures_keeps_mismatches_and_errors():
    good, bad, neg = make_reports()
    assert failures(good).empty
    assert list(failures(bad)["instance"]) == [1, 2]
    assert failures(neg).empty


def test_write_pdf(tmp_path):
    path = write_pdf(make_reports(), tmp_path / "out" / "report.pdf", {"seed": 0, "backend": "family"})
    assert path.exists()
    assert path.read_bytes().startswith(b"%PDF")
