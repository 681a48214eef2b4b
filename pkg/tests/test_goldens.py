from __future__ import annotations

from chronicpred.goldens import CASES, check_case, format_result, perturbed, run_goldens, summary


def test_all_gating_cases_pass():
    results = run_goldens()
    passed, total = summary(results)
    assert total >= 10 and passed == total
    for r in results:
        if r.case.gating:
            assert r.status == "PASS", format_result(r)
        else:
            assert r.status == "INFO"


def test_perturbed_case_fails():
    results = run_goldens(perturbed())
    assert results[0].status == "FAIL"
    assert "DIFF" in format_result(results[0])
    passed, total = summary(results)
    assert passed == total - 1


def test_expected_values_are_within_tolerance():
    for case in CASES:
        r = check_case(case)
        if case.gating:
            for metric, want in case.expected.items():
                assert abs(getattr(r.computed, metric) - want) <= case.tolerance + 1e-12
