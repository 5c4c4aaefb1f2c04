import pytest

from gaplab.verify import SUITES, PropertyResult, format_results, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes_under_another_seed(suite):
    results = run_suite(suite, seed=11)
    assert results and all(r.suite == suite for r in results)
    failed = [f"{r.name}: {r.passed}/{r.total} {r.note}" for r in results if not r.ok]
    assert not failed, failed


def test_suite_is_deterministic():
    a = [(r.name, r.passed, r.total, r.note) for r in run_suite("grassmann", seed=4)]
    b = [(r.name, r.passed, r.total, r.note) for r in run_suite("grassmann", seed=4)]
    assert a == b


def test_result_formatting():
    res = [PropertyResult("grassmann", "x", 3, 3), PropertyResult("graphop", "y", 1, 2, "note")]
    text = format_results(res)
    assert "PASS grassmann/x: 3/3" in text
    assert "FAIL graphop/y: 1/2  (note)" in text
    assert text.splitlines()[-1] == "1/2 properties passed"
    assert not PropertyResult("s", "empty", 0, 0).ok
