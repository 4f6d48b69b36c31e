import json

import numpy as np
import pytest

from hessplit.verify import SUITES, SuiteReport, reports_json, run_suite, sorted_spectrum
from hessplit.walkoracle import enumerated_class_matrices, enumerated_class_sums


def test_report_margins():
    rep = SuiteReport("x")
    assert not rep.passed
    rep.record(-1.0)
    rep.record(-0.5)
    assert rep.passed and rep.worst_margin == -0.5
    rep.record(np.nan, "bad")
    assert not rep.passed and rep.failures == 1 and rep.worst_margin == np.inf
    assert rep.details == ["bad: margin inf"]


def test_report_dict_empty():
    d = SuiteReport("x").to_dict()
    assert d["worst_margin"] is None and d["passed"] is False


def test_sorted_spectrum_orders_pairs():
    P = np.array([[0.0, -1.0], [1.0, 0.0]])
    ev = sorted_spectrum(P)
    assert ev[0].imag < 0 < ev[1].imag


@pytest.mark.parametrize("suite", SUITES)
def test_each_suite_small(suite):
    (rep,) = run_suite(suite, seed=3, trials=4)
    assert rep.passed, rep.details
    assert rep.instances >= 4 and rep.seconds >= 0


def test_all_and_json():
    reports = run_suite("all", seed=2, trials=2)
    assert [r.suite for r in reports] == list(SUITES)
    body = json.loads(reports_json(reports))
    assert body["passed"] is True and len(body["suites"]) == len(SUITES)


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nope")


def test_class_sums_match_single_k():
    T = np.array([[0.1, 0.2, 0.0], [0.2, 0.1, 0.1], [0.1, 0.1, 0.2]])
    sums = enumerated_class_sums(T, [2, 3], 8)
    for k in (2, 3):
        ags, gs = enumerated_class_matrices(T, k, 8)
        np.testing.assert_array_equal(sums[k][0], ags)
        np.testing.assert_array_equal(sums[k][1], gs)
