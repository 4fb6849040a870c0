import pytest

from wmzi.propcheck import (
    BornScenario,
    born_relative_error,
    born_scaling_table,
    check_slicing,
    results_frame,
    run_checks,
    slicing_errors,
)


def test_default_scenario_is_weak():
    scenario = BornScenario()
    assert scenario.kick.area == pytest.approx(0.05)


def test_born_matches_oracle():
    assert born_relative_error(BornScenario()) <= 1e-2


def test_born_error_shrinks_quadratically():
    table = born_scaling_table(BornScenario())
    errors = table["relative_error"].tolist()

    assert table["area"].tolist() == pytest.approx([0.05, 0.025, 0.0125, 0.00625])
    assert errors == sorted(errors, reverse=True)
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.25)


def test_slicing_errors_stay_at_rounding():
    errors = slicing_errors()
    assert list(errors) == [2, 4, 8, 16, 32]
    assert max(errors.values()) <= 1e-10
    assert check_slicing().passed


def test_all_checks_pass():
    results = run_checks()

    assert [r.name for r in results] == [
        "semigroup",
        "born-vs-oracle",
        "born-scaling",
        "born-linearity",
        "slicing-convergence",
        "oracle-unitarity",
    ]
    assert all(r.passed for r in results), [(r.name, r.value) for r in results if not r.passed]


def test_tight_tolerance_fails():
    results = {r.name: r for r in run_checks(born_tol=1e-6)}

    assert results["born-vs-oracle"].status == "FAIL"
    assert results["semigroup"].status == "PASS"


def test_results_frame():
    frame = results_frame(run_checks(steps=200))
    assert list(frame.columns) == ["check", "status", "value", "tolerance", "detail"]
    assert len(frame) == 6
