import pytest

from artifact.selftest import CHECKS, CheckResult, run_selftest


@pytest.mark.parametrize("check", CHECKS, ids=lambda c: c.__name__)
def test_check_passes(check):
    res = check()
    assert res.passed, f"{res.name}: {res.value} > {res.tolerance}"


def test_run_selftest_covers_all_checks():
    results = run_selftest()
    assert len(results) == len(CHECKS)
    assert len({r.name for r in results}) == len(results)


def test_check_result_threshold():
    assert CheckResult("x", 1e-9, 0.0, 1e-8).passed
    assert not CheckResult("x", 1e-7, 0.0, 1e-8).passed
