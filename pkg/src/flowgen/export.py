"""CSV schemas and writers for the five release tables.

Files are UTF-8 without BOM, LF line endings, a header row, no quoting.
Reals are written fixed-point at a per-column precision, booleans as
``true``/``false`` and dates as ISO-8601. The same column formatter backs the
object-level writers (``write_users`` etc.) and the chunked pipeline, so
both produce identical bytes.
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import INTERVENTION_TYPES
from .dynamics import PRESSURE_STATES, DailyRecord
from .population import UserProfile

INT, STR, DATE, BOOL = "int", "str", "date", "bool"
F1, F2, F3 = ".1f", ".2f", ".3f"


class ExportError(ValueError):
    pass


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[tuple[str, str], ...]

    @property
    def names(self) -> list[str]:
        return [c for c, _ in self.columns]

    def header(self) -> str:
        return ",".join(self.names)

    def kind(self, column: str) -> str:
        return dict(self.columns)[column]


USERS = TableSchema(
    "users.csv",
    (
        ("user_id", INT),
        ("age", INT),
        ("sex", STR),
        ("height_cm", F1),
        ("profession", STR),
        ("work_mode", STR),
        ("chronotype", STR),
        ("baseline_bmi", F2),
        ("baseline_weight_kg", F3),
        ("activity_tendency", F3),
        ("diet_tendency", F3),
        ("caffeine_tendency", F3),
        ("base_stress", F2),
        ("base_sleep_hours", F2),
    ),
)

DAILY = TableSchema(
    "daily_logs.csv",
    (
        ("user_id", INT),
        ("date", DATE),
        ("is_workday", BOOL),
        ("work_hours", F2),
        ("meetings_count", INT),
        ("emails_received", INT),
        ("pressure_state", STR),
        ("stress_level", F2),
        ("sleep_hours", F2),
        ("sleep_quality", F2),
        ("mood", F2),
        ("energy", F2),
        ("focus", F2),
        ("exercise_minutes", INT),
        ("outdoor_minutes", INT),
        ("caffeine_mg", INT),
        ("diet_quality", F2),
        ("screen_time_hours", F2),
        ("calories_intake", F2),
        ("calories_expended", F2),
        ("weight_kg", F3),
    ),
)

WEEKLY = TableSchema(
    "weekly_summaries.csv",
    (
        ("user_id", INT),
        ("week_index", INT),
        ("week_start_date", DATE),
        ("days_covered", INT),
        ("avg_stress", F2),
        ("avg_sleep_hours", F2),
        ("sleep_debt_hours", F2),
        ("job_satisfaction", F2),
        ("anxiety_score", F2),
        ("depression_score", F2),
        ("avg_weight_kg", F3),
        ("low_diet_days", INT),
    ),
)

INTERVENTIONS = TableSchema(
    "interventions.csv",
    (
        ("intervention_id", INT),
        ("user_id", INT),
        ("type", STR),
        ("start_date", DATE),
        ("end_date", DATE),
        ("intensity", F3),
    ),
)

FLAG_COLUMNS = tuple(f"{k}_active" for k in INTERVENTION_TYPES)


def _week_column_name(name: str) -> str:
    return name if name.startswith("week_") else f"week_{name}"


DAILY_ALL = TableSchema(
    "daily_all.csv",
    USERS.columns
    + DAILY.columns[1:]
    + tuple((_week_column_name(c), k) for c, k in WEEKLY.columns[1:])
    + tuple((f, BOOL) for f in FLAG_COLUMNS),
)

SCHEMAS = {s.name: s for s in (USERS, DAILY, WEEKLY, INTERVENTIONS, DAILY_ALL)}
TABLE_FILES = tuple(SCHEMAS)


def format_column(values, kind: str) -> list[str]:
    """Format a flat sequence of values for one column."""
    if isinstance(values, np.ndarray):
        values = values.ravel().tolist()
    if kind == INT:
        return [str(int(v)) for v in values]
    if kind == STR:
        return [str(v) for v in values]
    if kind == BOOL:
        return ["true" if v else "false" for v in values]
    if kind == DATE:
        return [v.isoformat() for v in values]
    spec = "{:" + kind + "}"
    # adding 0.0 turns -0.0 into 0.0
    return [spec.format(v + 0.0) for v in values]


def format_rows(columns: Sequence[list[str]]) -> list[str]:
    return [",".join(row) for row in zip(*columns)]


def _write_lines(path: Path, header: str, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# row formatting from in-memory objects
# ---------------------------------------------------------------------------


def users_lines(profiles: Sequence[UserProfile]) -> list[str]:
    cols = [format_column([getattr(p, name) for p in profiles], kind) for name, kind in USERS.columns]
    return format_rows(cols)


def daily_rest_lines(columns: dict[str, list], dates: list[dt.date]) -> list[str]:
    """Daily rows without the leading user_id (shared by daily_logs and daily_all)."""
    cols = [format_column(dates, DATE)]
    for name, kind in DAILY.columns[2:]:
        values = columns[name]
        if name == "pressure_state":
            values = [PRESSURE_STATES[v] if isinstance(v, (int, np.integer)) else v for v in values]
        cols.append(format_column(values, kind))
    return format_rows(cols)


def weekly_rest_lines(columns: dict[str, list], week_index: list[int], week_start: list[dt.date]) -> list[str]:
    cols = [format_column(week_index, INT), format_column(week_start, DATE)]
    for name, kind in WEEKLY.columns[3:]:
        cols.append(format_column(columns[name], kind))
    return format_rows(cols)


def intervention_lines(events) -> list[str]:
    return [
        ",".join(
            (
                str(e.intervention_id),
                str(e.user_id),
                e.type,
                e.start_date.isoformat(),
                e.end_date.isoformat(),
                f"{e.intensity + 0.0:.3f}",
            )
        )
        for e in events
    ]


def flag_text(active: Sequence[bool]) -> str:
    return ",".join("true" if a else "false" for a in active)


def check_daily_order(records: Sequence[DailyRecord]) -> None:
    """Raise unless records are strictly increasing in (user_id, date)."""
    prev = None
    for r in records:
        key = (r.user_id, r.date)
        if prev is not None and key <= prev:
            if key == prev:
                raise ExportError(f"duplicate daily record for user_id={r.user_id} date={r.date.isoformat()}")
            raise ExportError(f"daily records out of order at user_id={r.user_id} date={r.date.isoformat()}")
        prev = key


def write_users(profiles: Sequence[UserProfile], path: str | os.PathLike) -> None:
    if not profiles:
        raise ExportError("no profiles to write")
    ids = [p.user_id for p in profiles]
    if ids != sorted(set(ids)):
        raise ExportError("profiles must be sorted by unique user_id")
    _write_lines(Path(path), USERS.header(), users_lines(profiles))


def _record_columns(records: Sequence[DailyRecord]) -> dict[str, list]:
    return {name: [getattr(r, name) for r in records] for name, _ in DAILY.columns}


def write_daily_logs(records: Sequence[DailyRecord], path: str | os.PathLike) -> None:
    check_daily_order(records)
    cols = _record_columns(records)
    rest = daily_rest_lines(cols, cols["date"])
    _write_lines(Path(path), DAILY.header(), (f"{u},{r}" for u, r in zip(cols["user_id"], rest)))


def _summary_rest(summaries) -> list[str]:
    cols = {name: [getattr(s, name) for s in summaries] for name, _ in WEEKLY.columns}
    return weekly_rest_lines(cols, cols["week_index"], cols["week_start_date"])


def write_weekly(summaries, path: str | os.PathLike) -> None:
    rest = _summary_rest(summaries)
    _write_lines(Path(path), WEEKLY.header(), (f"{s.user_id},{r}" for s, r in zip(summaries, rest)))


def write_interventions(events, path: str | os.PathLike) -> None:
    _write_lines(Path(path), INTERVENTIONS.header(), intervention_lines(events))


def write_daily_all(profiles, records, summaries, events, path: str | os.PathLike) -> None:
    """Join users, daily records, the day's weekly summary and intervention flags."""
    check_daily_order(records)
    user_line = dict(zip((p.user_id for p in profiles), users_lines(profiles)))
    week_line = {(s.user_id, s.week_index): r for s, r in zip(summaries, _summary_rest(summaries))}
    by_user: dict[int, list] = {}
    for e in events:
        by_user.setdefault(e.user_id, []).append(e)
    start = min((s.week_start_date for s in summaries), default=None)
    cols = _record_columns(records)
    rest = daily_rest_lines(cols, cols["date"])

    def lines():
        for r, daily in zip(records, rest):
            if r.user_id not in user_line:
                raise ExportError(f"user_id={r.user_id} missing from profiles")
            week = (r.date - start).days // 7 if start is not None else -1
            weekly = week_line.get((r.user_id, week))
            if weekly is None:
                raise ExportError(f"missing weekly summary for user_id={r.user_id} week_index={week}")
            flags = [any(e.type == k and e.covers(r.date) for e in by_user.get(r.user_id, ())) for k in INTERVENTION_TYPES]
            yield f"{user_line[r.user_id]},{daily},{weekly},{flag_text(flags)}"

    _write_lines(Path(path), DAILY_ALL.header(), lines())
