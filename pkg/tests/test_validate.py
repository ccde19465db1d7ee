from __future__ import annotations

import datetime as dt
import json

import pandas as pd
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from flowgen.config import NOISE_KEYS, SensitivityParams
from flowgen.export import DAILY, WEEKLY
from flowgen.generate import generate
from flowgen.validate import FAIL, PASS, SKIP, DatasetError, Thresholds, load_dataset, validate_dataset

import helpers

# bound, smoothness and consistency checks; distributional checks (variance,
# sleep centering, correlations) may legitimately fail for extreme parameters
CONTRACT = {
    "daily_ranges",
    "weekly_ranges",
    "weight_smoothness",
    "row_counts",
    "weekly_recompute",
    "weight_conservation",
    "daily_all_join",
}


def statuses(report):
    return {c.name: c.status for c in report.checks}


def detail(report, name):
    return next(c.detail for c in report.checks if c.name == name)


@pytest.fixture
def copy(small_dir, tmp_path):
    return helpers.copy_dataset(small_dir, tmp_path / "ds")


def test_fresh_output_passes(small_dir):
    report = validate_dataset(small_dir)
    assert report.passed, report.summary()
    assert report.fingerprint[DAILY.name] == 40 * 182


def test_report_document(small_dir, tmp_path):
    report = validate_dataset(small_dir)
    report.write(tmp_path / "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["overall_pass"] is True
    assert {c["name"] for c in doc["checks"]} >= CONTRACT
    assert all(set(c) == {"name", "status", "observed", "threshold", "detail"} for c in doc["checks"])


def test_out_of_range_cell_names_row(copy):
    helpers.out_of_range_cell(copy, row=100)
    report = validate_dataset(copy)
    assert statuses(report)["daily_ranges"] == FAIL
    assert f"{DAILY.name}:102" in detail(report, "daily_ranges")


def test_constant_column_fails_variance(copy):
    helpers.constant_column(copy, "focus")
    report = validate_dataset(copy)
    assert statuses(report)["nonzero_variance"] == FAIL
    assert "focus" in detail(report, "nonzero_variance")


def test_shuffled_stress_fails_directional(copy):
    helpers.shuffle_stress(copy)
    s = statuses(validate_dataset(copy))
    assert s["corr_work_hours_stress"] == s["corr_stress_sleep_hours"] == s["corr_stress_mood"] == FAIL


def test_white_noise_weight_fails_smoothness(copy):
    helpers.white_noise_weight(copy)
    s = statuses(validate_dataset(copy))
    assert s["weight_smoothness"] == FAIL
    assert s["weight_conservation"] == FAIL


def test_perturbed_weekly_names_user_and_week(copy):
    user, week = helpers.perturb_weekly(copy, row=3)
    report = validate_dataset(copy)
    assert statuses(report)["weekly_recompute"] == FAIL
    assert f"user_id={user} week_index={week}" in detail(report, "weekly_recompute")


def test_deleted_daily_all_row_fails_reconciliation(copy):
    helpers.delete_daily_all_row(copy)
    report = validate_dataset(copy)
    assert statuses(report)["daily_all_join"] == FAIL
    assert "row count" in detail(report, "daily_all_join")


def test_edited_daily_all_cell_fails_join(copy):
    path = copy / "daily_all.csv"
    lines = path.read_text().splitlines(keepends=True)
    lines[5] = lines[5].replace(",true,", ",false,", 1) if ",true," in lines[5] else lines[5].replace(",false,", ",true,", 1)
    helpers.replace_text(path, "".join(lines))
    report = validate_dataset(copy)
    assert statuses(report)["daily_all_join"] == FAIL
    assert "daily_all.csv:6" in detail(report, "daily_all_join")


def test_missing_daily_all_is_skipped(copy):
    (copy / "daily_all.csv").unlink()
    report = validate_dataset(copy)
    assert statuses(report)["daily_all_join"] == SKIP
    assert report.passed


def test_empty_interventions_skip(copy, small_dir):
    before = statuses(validate_dataset(small_dir))
    helpers.empty_interventions(copy)
    after = statuses(validate_dataset(copy))
    assert after["vacation_stress_lower"] == after["vacation_attenuation"] == SKIP
    for name in ("user_heterogeneity", "daily_ranges", "corr_stress_mood", "weight_smoothness", "stress_lag1_autocorrelation"):
        assert after[name] == before[name]
    # job_satisfaction depends on intervention days, so the recomputation notices
    assert after["weekly_recompute"] == FAIL


def test_identical_users_fail_heterogeneity(copy):
    frame = pd.read_csv(copy / DAILY.name, dtype=str, keep_default_na=False)
    first = frame.loc[frame["user_id"] == "1", "stress_level"].to_list()
    frame["stress_level"] = first * (len(frame) // len(first))
    helpers.write_frame(frame, copy / DAILY.name)
    assert statuses(validate_dataset(copy))["user_heterogeneity"] == FAIL


def test_single_user_is_evaluable(tmp_path, small_config):
    generate(small_config.replace(population_size=1), tmp_path)
    report = validate_dataset(tmp_path)
    s = statuses(report)
    assert s["user_heterogeneity"] == SKIP
    assert s["stress_lag1_autocorrelation"] in (PASS, FAIL)
    assert s["volatility_tiers"] in (PASS, FAIL)
    autocorr = next(c.observed for c in report.checks if c.name == "stress_lag1_autocorrelation")
    assert autocorr == autocorr  # not NaN


def test_missing_file_is_named(copy):
    (copy / WEEKLY.name).unlink()
    with pytest.raises(DatasetError, match=WEEKLY.name):
        load_dataset(copy)


def test_unparseable_cell_reports_line(copy):
    path = copy / DAILY.name
    lines = path.read_text().splitlines(keepends=True)
    fields = lines[7].split(",")
    fields[7] = "abc"
    lines[7] = ",".join(fields)
    helpers.replace_text(path, "".join(lines))
    with pytest.raises(DatasetError, match=rf"{DAILY.name}:8: column stress_level"):
        load_dataset(copy)


def test_bad_header_rejected(copy):
    path = copy / WEEKLY.name
    text = path.read_text()
    helpers.replace_text(path, text.replace("avg_stress", "mean_stress", 1))
    with pytest.raises(DatasetError, match=f"{WEEKLY.name}:1"):
        load_dataset(copy)


def test_thresholds_are_configurable(small_dir):
    strict = Thresholds(min_corr_exercise_mood=0.99)
    s = statuses(validate_dataset(small_dir, strict))
    assert s["corr_exercise_mood"] == FAIL
    assert Thresholds().min_corr_workload_stress == 0.15


sens = st.builds(
    SensitivityParams,
    stress_persistence=st.floats(0.0, 0.99),
    workload_to_stress=st.floats(0.0, 10.0),
    stress_to_sleep=st.floats(0.0, 5.0),
    stress_to_mood=st.floats(0.0, 5.0),
    sleep_to_mood=st.floats(0.0, 5.0),
    stress_overeat_gain=st.floats(0.0, 5.0),
    season_amplitude=st.floats(0.0, 10.0),
    noise_scales=st.one_of(
        st.just({k: 0.0 for k in NOISE_KEYS}),
        st.fixed_dictionaries({k: st.floats(0.0, 200.0) for k in NOISE_KEYS}),
    ),
)


@settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(params=sens, seed=st.integers(0, 2**64 - 1))
def test_generator_validator_contract(tmp_path_factory, small_config, params, seed):
    cfg = small_config.replace(
        seed=seed, population_size=6, end_date=dt.date(2024, 3, 31), sensitivities=params
    )
    out = tmp_path_factory.mktemp("contract")
    generate(cfg, out)
    s = statuses(validate_dataset(out))
    failing = {name for name in CONTRACT if s[name] == FAIL}
    assert not failing
