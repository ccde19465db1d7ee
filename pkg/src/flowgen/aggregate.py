"""Weekly summaries and the indicators derived from them.

Averages are taken over the values exactly as they appear in the daily table:
every 2-decimal column is summed as whole hundredths (weight as whole grams)
and divided once, so recomputing a summary from daily_logs.csv gives the
identical float and therefore the identical written text.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .calendar import n_weeks, week_start
from .dynamics import SLEEP_TARGET, DailyFrame, DailyRecord

LOW_DIET_THRESHOLD = 4.0


class AggregationError(ValueError):
    pass


@dataclass(frozen=True)
class WeeklySummary:
    user_id: int
    week_index: int
    week_start_date: dt.date
    days_covered: int
    avg_stress: float
    avg_sleep_hours: float
    sleep_debt_hours: float
    job_satisfaction: float
    anxiety_score: float
    depression_score: float
    avg_weight_kg: float
    low_diet_days: int


def job_satisfaction(avg_stress, avg_work_hours, intervention_active_days):
    return np.clip(
        9.0
        - 0.5 * avg_stress
        - 0.15 * np.maximum(0.0, avg_work_hours - 8.0)
        + 0.3 * (np.asarray(intervention_active_days) > 0),
        0.0,
        10.0,
    )


def anxiety_score(avg_stress, sleep_debt):
    """0-21 scale."""
    return np.clip(1.8 * avg_stress + 0.3 * sleep_debt, 0.0, 21.0)


def depression_score(avg_mood, avg_energy):
    """0-27 scale."""
    return np.clip(2.2 * (10.0 - avg_mood) * 0.9 + 0.5 * (10.0 - avg_energy), 0.0, 27.0)


def scaled(x, digits: int = 2) -> np.ndarray:
    """Values already rounded to ``digits`` decimals as exact integers."""
    return np.rint(np.asarray(x, dtype=float) * 10**digits).astype(np.int64)


def _block_sum(values: np.ndarray, weeks: int) -> np.ndarray:
    n, T = values.shape
    padded = np.zeros((n, weeks * 7), dtype=values.dtype)
    padded[:, :T] = values
    return padded.reshape(n, weeks, 7).sum(axis=2)


def weekly_columns(columns: dict[str, np.ndarray], active_days: np.ndarray) -> dict[str, np.ndarray]:
    """Weekly statistics from (n_users, n_days) daily columns.

    ``active_days`` is a boolean (n_users, n_days) mask of days with any
    intervention active. Returns (n_users, n_weeks) arrays.
    """
    n, T = columns["stress_level"].shape
    weeks = n_weeks(T)
    days = np.minimum(7, T - 7 * np.arange(weeks))
    days2d = np.broadcast_to(days, (n, weeks))

    def mean(name, digits=2):
        return _block_sum(scaled(columns[name], digits), weeks) / (days2d * 10**digits)

    sleep = scaled(columns["sleep_hours"])
    target = int(round(SLEEP_TARGET * 100))
    debt = _block_sum(np.maximum(0, target - sleep), weeks) / 100
    low_diet = _block_sum((scaled(columns["diet_quality"]) < int(LOW_DIET_THRESHOLD * 100)).astype(np.int64), weeks)
    active = _block_sum(active_days.astype(np.int64), weeks)

    avg_stress = mean("stress_level")
    return {
        "days_covered": days2d.copy(),
        "avg_stress": avg_stress,
        "avg_sleep_hours": mean("sleep_hours"),
        "sleep_debt_hours": debt,
        "job_satisfaction": job_satisfaction(avg_stress, mean("work_hours"), active),
        "anxiety_score": anxiety_score(avg_stress, debt),
        "depression_score": depression_score(mean("mood"), mean("energy")),
        "avg_weight_kg": mean("weight_kg", 3),
        "low_diet_days": low_diet,
    }


@dataclass
class WeeklyFrame:
    user_ids: np.ndarray
    start_date: dt.date
    columns: dict[str, np.ndarray]

    @property
    def n_weeks(self) -> int:
        return self.columns["avg_stress"].shape[1]

    def summaries(self) -> list[WeeklySummary]:
        cols = {k: v.tolist() for k, v in self.columns.items()}
        out = []
        for i, uid in enumerate(self.user_ids.tolist()):
            for w in range(self.n_weeks):
                out.append(
                    WeeklySummary(
                        user_id=uid,
                        week_index=w,
                        week_start_date=week_start(self.start_date, w),
                        **{k: cols[k][i][w] for k in cols},
                    )
                )
        return out


def summarize_frame(frame: DailyFrame, active_days: np.ndarray) -> WeeklyFrame:
    return WeeklyFrame(frame.user_ids, frame.start_date, weekly_columns(frame.columns, active_days))


def summarize_week(
    records: Sequence[DailyRecord],
    start_date: dt.date,
    intervention_active_days: int = 0,
) -> WeeklySummary:
    """Summarize one user's records from a single 7-day block.

    ``start_date`` anchors the week blocks; ``intervention_active_days`` is the
    number of days in the block covered by any intervention.
    """
    if not records:
        raise AggregationError("cannot summarize an empty week")
    uid = records[0].user_id
    if any(r.user_id != uid for r in records):
        raise AggregationError("records from more than one user")
    offsets = [(r.date - start_date).days for r in records]
    week = offsets[0] // 7
    if any(o // 7 != week or o < 0 for o in offsets):
        raise AggregationError("records span more than one week block")
    if offsets != sorted(set(offsets)):
        raise AggregationError("records must be chronological with no repeated dates")

    names = ("stress_level", "sleep_hours", "work_hours", "mood", "energy", "weight_kg", "diet_quality")
    cols = {k: np.array([[getattr(r, k) for r in records]], dtype=float) for k in names}
    active = np.zeros((1, len(records)), dtype=bool)
    active[0, : min(intervention_active_days, len(records))] = True
    stats = {k: v[0, 0].item() for k, v in weekly_columns(cols, active).items()}
    return WeeklySummary(
        user_id=uid,
        week_index=week,
        week_start_date=week_start(start_date, week),
        **stats,
    )
