"""Sanity checks for a dataset directory in the five-table CSV format.

The validator only reads the CSV contract (see ``export``), so it can assess
data produced by other tools. It recomputes weekly summaries, the weight
trajectory and the denormalized join from the source tables instead of
trusting them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from itertools import zip_longest
from pathlib import Path
from typing import Iterator

import numpy as np
import pandas as pd

from .aggregate import anxiety_score, depression_score, job_satisfaction
from .config import INTERVENTION_TYPES
from .export import DAILY, DAILY_ALL, INTERVENTIONS, USERS, WEEKLY, TableSchema, format_column

PASS, FAIL, SKIP = "pass", "fail", "skip"
REPORT_NAME = "validation_report.json"

DAILY_BOUNDS = {
    "work_hours": (0.0, 16.0),
    "meetings_count": (0, None),
    "emails_received": (0, None),
    "stress_level": (0.0, 10.0),
    "sleep_hours": (3.0, 12.0),
    "sleep_quality": (0.0, 10.0),
    "mood": (0.0, 10.0),
    "energy": (0.0, 10.0),
    "focus": (0.0, 10.0),
    "exercise_minutes": (0, None),
    "outdoor_minutes": (0, None),
    "caffeine_mg": (0, 800),
    "diet_quality": (0.0, 10.0),
    "screen_time_hours": (0.0, 16.0),
    "calories_intake": (0.0, None),
    "calories_expended": (0.0, None),
    "weight_kg": (0.0, None),
}
# bounds that must hold strictly (value > lo)
STRICT_LOWER = {"calories_intake", "calories_expended", "weight_kg"}
WEEKLY_BOUNDS = {
    "days_covered": (1, 7),
    "sleep_debt_hours": (0.0, None),
    "job_satisfaction": (0.0, 10.0),
    "anxiety_score": (0.0, 21.0),
    "depression_score": (0.0, 27.0),
    "low_diet_days": (0, 7),
}
PRESSURE_VALUES = ("normal", "elevated", "critical")


class DatasetError(Exception):
    """A table is missing or cannot be parsed against its schema."""


@dataclass(frozen=True)
class Thresholds:
    min_corr_workload_stress: float = 0.15
    max_corr_stress_sleep: float = -0.15
    max_corr_stress_mood: float = -0.15
    min_corr_exercise_mood: float = 0.05
    sleep_mean_range: tuple[float, float] = (6.7, 7.3)
    max_daily_weight_change: float = 0.3
    min_median_stress_autocorr: float = 0.3
    min_user_stress_sd: float = 0.5
    min_vacation_above_mean: float = 0.10
    weight_tolerance: float = 1e-6


@dataclass
class CheckResult:
    name: str
    status: str
    observed: object = None
    threshold: object = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)
    fingerprint: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "overall_pass": self.passed,
            "fingerprint": self.fingerprint,
            "checks": [asdict(c) for c in self.checks],
        }

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.as_dict(), indent=2, default=_jsonable) + "\n", encoding="utf-8")

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            obs = "" if c.observed is None else f" observed={_short(c.observed)}"
            thr = "" if c.threshold is None else f" threshold={_short(c.threshold)}"
            det = f" ({c.detail})" if c.detail else ""
            lines.append(f"[{c.status.upper():4}] {c.name}{obs}{thr}{det}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return str(x)


def _short(x) -> str:
    if isinstance(x, float):
        return f"{x:.4g}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_short(v) for v in x) + "]"
    return str(x)


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

_NUMERIC = {"int": "int64", ".1f": "float64", ".2f": "float64", ".3f": "float64"}


def _find_bad_line(path: Path, schema: TableSchema) -> str:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(schema.columns):
                return f"{path.name}:{lineno}: expected {len(schema.columns)} fields, got {len(row)}"
            for value, (name, kind) in zip(row, schema.columns):
                try:
                    if kind == "int":
                        int(value)
                    elif kind in _NUMERIC:
                        float(value)
                    elif kind == "bool" and value not in ("true", "false"):
                        raise ValueError
                    elif kind == "date":
                        pd.Timestamp.fromisoformat(value)
                except ValueError:
                    return f"{path.name}:{lineno}: column {name}: cannot parse {value!r} as {kind}"
    return f"{path.name}: unparseable"


def read_table(path: Path, schema: TableSchema, as_text: bool = False) -> pd.DataFrame:
    if not path.exists():
        raise DatasetError(f"missing table file: {path.name}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
    if header != schema.header():
        raise DatasetError(f"{path.name}:1: header does not match the {schema.name} schema")
    if as_text:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    dtypes = {name: _NUMERIC.get(kind, str) for name, kind in schema.columns}
    try:
        df = pd.read_csv(path, dtype=dtypes, keep_default_na=False, na_values=[])
    except (ValueError, pd.errors.ParserError):
        raise DatasetError(_find_bad_line(path, schema)) from None
    for name, kind in schema.columns:
        if kind == "bool":
            bad = ~df[name].isin(["true", "false"])
            if bad.any():
                raise DatasetError(_find_bad_line(path, schema))
            df[name] = df[name] == "true"
        elif kind == "date":
            try:
                df[name] = pd.to_datetime(df[name], format="%Y-%m-%d")
            except ValueError:
                raise DatasetError(_find_bad_line(path, schema)) from None
    return df


@dataclass
class Dataset:
    root: Path
    users: pd.DataFrame
    daily: pd.DataFrame
    weekly_text: pd.DataFrame
    interventions: pd.DataFrame
    has_daily_all: bool
    # per-daily-row boolean masks, one per intervention type
    active: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def any_active(self) -> np.ndarray:
        return np.logical_or.reduce([self.active[k] for k in INTERVENTION_TYPES])

    @property
    def start(self) -> pd.Timestamp:
        return self.daily["date"].min()

    def day_offset(self) -> np.ndarray:
        return ((self.daily["date"] - self.start).dt.days).to_numpy()

    def user_slices(self) -> dict[int, slice]:
        ids = self.daily["user_id"].to_numpy()
        starts = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
        ends = np.r_[starts[1:], len(ids)]
        return {int(ids[s]): slice(int(s), int(e)) for s, e in zip(starts, ends)}


def load_dataset(root) -> Dataset:
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"not a directory: {root}")
    users = read_table(root / USERS.name, USERS)
    daily = read_table(root / DAILY.name, DAILY)
    weekly_text = read_table(root / WEEKLY.name, WEEKLY, as_text=True)
    interventions = read_table(root / INTERVENTIONS.name, INTERVENTIONS)
    ds = Dataset(root, users, daily, weekly_text, interventions, (root / DAILY_ALL.name).exists())
    if len(daily) == 0:
        raise DatasetError(f"{DAILY.name}: no data rows")
    keys = daily[["user_id", "date"]]
    if not (keys.sort_values(["user_id", "date"]).index == keys.index).all():
        raise DatasetError(f"{DAILY.name}: rows must be sorted by (user_id, date)")
    ds.active = _activity_masks(ds)
    return ds


def _activity_masks(ds: Dataset) -> dict[str, np.ndarray]:
    n = len(ds.daily)
    masks = {k: np.zeros(n, dtype=bool) for k in INTERVENTION_TYPES}
    slices = ds.user_slices()
    dates = ds.daily["date"].to_numpy()
    for e in ds.interventions.itertuples(index=False):
        sl = slices.get(int(e.user_id))
        if sl is None or e.type not in masks:
            continue
        d = dates[sl]
        lo = sl.start + np.searchsorted(d, np.datetime64(e.start_date), side="left")
        hi = sl.start + np.searchsorted(d, np.datetime64(e.end_date), side="right")
        masks[e.type][lo:hi] = True
    return masks


# ---------------------------------------------------------------------------
# statistics helpers
# ---------------------------------------------------------------------------


def _corr(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.std() == 0 or b.std() == 0:
        return float("nan")
    return float(np.corrcoef(a, b)[0, 1])


def _grouped_corr(groups: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pearson correlation of (a, b) within each integer group."""
    size = int(groups.max()) + 1
    n = np.bincount(groups, minlength=size).astype(float)
    sa = np.bincount(groups, a, size)
    sb = np.bincount(groups, b, size)
    ma, mb = sa / np.maximum(n, 1), sb / np.maximum(n, 1)
    caa = np.bincount(groups, a * a, size) - n * ma * ma
    cbb = np.bincount(groups, b * b, size) - n * mb * mb
    cab = np.bincount(groups, a * b, size) - n * ma * mb
    with np.errstate(invalid="ignore", divide="ignore"):
        r = cab / np.sqrt(caa * cbb)
    r[(n < 3) | (caa <= 1e-12) | (cbb <= 1e-12)] = np.nan
    return r


def _user_codes(ds: Dataset) -> np.ndarray:
    return pd.factorize(ds.daily["user_id"])[0]


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_ranges(ds: Dataset, thresholds: Thresholds = Thresholds()) -> list[CheckResult]:
    """Value bounds, finiteness, nonzero variance and the sleep mean."""
    results = []
    problems = []
    for name, (lo, hi) in DAILY_BOUNDS.items():
        col = ds.daily[name].to_numpy(dtype=float)
        bad = ~np.isfinite(col)
        if lo is not None:
            bad |= (col <= lo) if name in STRICT_LOWER else (col < lo)
        if hi is not None:
            bad |= col > hi
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            problems.append(
                f"{name}={col[i]} out of range at {DAILY.name}:{i + 2} "
                f"(user_id={ds.daily['user_id'].iat[i]}, date={ds.daily['date'].iat[i].date()})"
            )
    bad_pressure = ~ds.daily["pressure_state"].isin(PRESSURE_VALUES)
    if bad_pressure.any():
        i = int(np.flatnonzero(bad_pressure.to_numpy())[0])
        problems.append(f"pressure_state={ds.daily['pressure_state'].iat[i]!r} at {DAILY.name}:{i + 2}")
    results.append(
        CheckResult(
            "daily_ranges",
            FAIL if problems else PASS,
            len(problems),
            "0 violating columns",
            "; ".join(problems[:5]),
        )
    )

    weekly_problems = []
    for name, (lo, hi) in WEEKLY_BOUNDS.items():
        col = pd.to_numeric(ds.weekly_text[name], errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(col) | (col < lo)
        if hi is not None:
            bad |= col > hi
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            weekly_problems.append(f"{name}={ds.weekly_text[name].iat[i]} at {WEEKLY.name}:{i + 2}")
    if len(ds.weekly_text):
        over = pd.to_numeric(ds.weekly_text["low_diet_days"]) > pd.to_numeric(ds.weekly_text["days_covered"])
        if over.any():
            weekly_problems.append(f"low_diet_days exceeds days_covered at {WEEKLY.name}:{int(np.flatnonzero(over)[0]) + 2}")
    results.append(
        CheckResult("weekly_ranges", FAIL if weekly_problems else PASS, len(weekly_problems), "0", "; ".join(weekly_problems[:5]))
    )

    flat = [name for name in DAILY_BOUNDS if not ds.daily[name].to_numpy(dtype=float).std() > 0]
    results.append(
        CheckResult(
            "nonzero_variance",
            FAIL if flat else PASS,
            flat or None,
            "sd > 0 for every daily variable",
            f"degenerate: {', '.join(flat)}" if flat else "",
        )
    )

    mean_sleep = float(ds.daily["sleep_hours"].mean())
    lo, hi = thresholds.sleep_mean_range
    results.append(
        CheckResult("sleep_mean", PASS if lo <= mean_sleep <= hi else FAIL, mean_sleep, [lo, hi])
    )
    return results


def check_directional(ds: Dataset, thresholds: Thresholds = Thresholds()) -> list[CheckResult]:
    d = ds.daily
    specs = [
        ("corr_work_hours_stress", "work_hours", "stress_level", ">", thresholds.min_corr_workload_stress),
        ("corr_stress_sleep_hours", "stress_level", "sleep_hours", "<", thresholds.max_corr_stress_sleep),
        ("corr_stress_mood", "stress_level", "mood", "<", thresholds.max_corr_stress_mood),
        ("corr_exercise_mood", "exercise_minutes", "mood", ">", thresholds.min_corr_exercise_mood),
    ]
    out = []
    for name, a, b, op, limit in specs:
        r = _corr(d[a], d[b])
        ok = (r > limit) if op == ">" else (r < limit)
        out.append(CheckResult(name, PASS if ok else FAIL, r, f"{op} {limit}", "" if ok else "direction not observed"))
    return out


def _weekly_means(ds: Dataset, column: str) -> tuple[np.ndarray, np.ndarray]:
    """Per (user, week-block) means in user/week order plus the user code of each."""
    codes = _user_codes(ds)
    week = ds.day_offset() // 7
    frame = pd.DataFrame({"u": codes, "w": week, "x": ds.daily[column].to_numpy(dtype=float)})
    g = frame.groupby(["u", "w"], sort=True)["x"].mean()
    return g.to_numpy(), g.index.get_level_values(0).to_numpy()


def _mean_abs_step(values: np.ndarray, owner: np.ndarray) -> float:
    same = owner[1:] == owner[:-1]
    if not same.any():
        return float("nan")
    return float(np.abs(np.diff(values))[same].mean())


def check_temporal(ds: Dataset, thresholds: Thresholds = Thresholds()) -> list[CheckResult]:
    d = ds.daily
    codes = _user_codes(ds)
    same = codes[1:] == codes[:-1]
    out = []

    w = d["weight_kg"].to_numpy(dtype=float)
    steps = np.abs(np.diff(w))[same]
    worst = float(steps.max()) if steps.size else 0.0
    # values are parsed from 3-decimal text; allow for binary rounding only
    ok = worst <= thresholds.max_daily_weight_change + 1e-9
    detail = ""
    if not ok:
        i = int(np.flatnonzero(same & (np.abs(np.diff(w)) > thresholds.max_daily_weight_change + 1e-9))[0]) + 1
        detail = f"jump at {DAILY.name}:{i + 2} (user_id={d['user_id'].iat[i]})"
    out.append(CheckResult("weight_smoothness", PASS if ok else FAIL, worst, f"<= {thresholds.max_daily_weight_change}", detail))

    s = d["stress_level"].to_numpy(dtype=float)
    r = _grouped_corr(codes[1:][same], s[:-1][same], s[1:][same]) if same.any() else np.array([np.nan])
    med = float(np.nanmedian(r)) if np.isfinite(r).any() else float("nan")
    out.append(
        CheckResult(
            "stress_lag1_autocorrelation",
            PASS if med > thresholds.min_median_stress_autocorr else FAIL,
            med,
            f"> {thresholds.min_median_stress_autocorr}",
            "median over users",
        )
    )

    q_means, owner = _weekly_means(ds, "sleep_quality")
    s_means, _ = _weekly_means(ds, "stress_level")
    dq, dstress = _mean_abs_step(q_means, owner), _mean_abs_step(s_means, owner)
    if math.isnan(dq) or math.isnan(dstress):
        out.append(CheckResult("volatility_tiers", SKIP, None, None, "fewer than two weeks per user"))
    else:
        out.append(
            CheckResult(
                "volatility_tiers",
                PASS if dq < dstress else FAIL,
                [dq, dstress],
                "weekly mean |d sleep_quality| < weekly mean |d stress|",
            )
        )
    return out


def check_heterogeneity_and_interventions(ds: Dataset, thresholds: Thresholds = Thresholds()) -> list[CheckResult]:
    d = ds.daily
    out = []
    stress = d["stress_level"].to_numpy(dtype=float)
    codes = _user_codes(ds)
    n_users = int(codes.max()) + 1
    user_mean = np.bincount(codes, stress) / np.bincount(codes)
    if n_users < 2:
        out.append(CheckResult("user_heterogeneity", SKIP, None, None, "needs at least two users"))
    else:
        sd = float(user_mean.std())
        out.append(
            CheckResult("user_heterogeneity", PASS if sd > thresholds.min_user_stress_sd else FAIL, sd, f"> {thresholds.min_user_stress_sd}")
        )

    vacation = ds.active["vacation"]
    plain_workday = d["is_workday"].to_numpy() & ~ds.any_active
    if not vacation.any() or not plain_workday.any():
        reason = "no vacation days" if not vacation.any() else "no intervention-free workdays"
        out.append(CheckResult("vacation_stress_lower", SKIP, None, None, reason))
        out.append(CheckResult("vacation_attenuation", SKIP, None, None, reason))
        return out
    vac_mean = float(stress[vacation].mean())
    work_mean = float(stress[plain_workday].mean())
    out.append(
        CheckResult(
            "vacation_stress_lower",
            PASS if vac_mean < work_mean else FAIL,
            [vac_mean, work_mean],
            "vacation mean < intervention-free workday mean",
        )
    )
    above = float((stress[vacation] > user_mean[codes][vacation]).mean())
    out.append(
        CheckResult(
            "vacation_attenuation",
            PASS if above >= thresholds.min_vacation_above_mean else FAIL,
            above,
            f">= {thresholds.min_vacation_above_mean}",
            "share of vacation days above the user's own mean stress",
        )
    )
    return out


def recompute_weekly(ds: Dataset) -> pd.DataFrame:
    """Weekly summaries rebuilt from daily_logs, formatted as they would be written."""
    d = ds.daily

    def hundredths(name, digits=2):
        return np.rint(d[name].to_numpy(dtype=float) * 10**digits).astype(np.int64)

    sleep = hundredths("sleep_hours")
    frame = pd.DataFrame(
        {
            "user_id": d["user_id"].to_numpy(),
            "week_index": ds.day_offset() // 7,
            "stress": hundredths("stress_level"),
            "sleep": sleep,
            "debt": np.maximum(0, 800 - sleep),
            "hours": hundredths("work_hours"),
            "mood": hundredths("mood"),
            "energy": hundredths("energy"),
            "weight": hundredths("weight_kg", 3),
            "low_diet": (hundredths("diet_quality") < 400).astype(np.int64),
            "active": ds.any_active.astype(np.int64),
            "n": np.ones(len(d), dtype=np.int64),
        }
    )
    g = frame.groupby(["user_id", "week_index"], sort=True).sum().reset_index()
    n = g["n"].to_numpy()
    avg = {k: g[k].to_numpy() / (n * 100) for k in ("stress", "sleep", "hours", "mood", "energy")}
    debt = g["debt"].to_numpy() / 100
    start = ds.start
    out = {
        "user_id": g["user_id"].to_numpy(),
        "week_index": g["week_index"].to_numpy(),
        "week_start_date": [(start + pd.Timedelta(days=7 * int(w))).date() for w in g["week_index"]],
        "days_covered": n,
        "avg_stress": avg["stress"],
        "avg_sleep_hours": avg["sleep"],
        "sleep_debt_hours": debt,
        "job_satisfaction": job_satisfaction(avg["stress"], avg["hours"], g["active"].to_numpy()),
        "anxiety_score": anxiety_score(avg["stress"], debt),
        "depression_score": depression_score(avg["mood"], avg["energy"]),
        "avg_weight_kg": g["weight"].to_numpy() / (n * 1000),
        "low_diet_days": g["low_diet"].to_numpy(),
    }
    return pd.DataFrame({name: format_column(out[name], kind) for name, kind in WEEKLY.columns})


def _iter_lines(path: Path) -> Iterator[str]:
    with open(path, encoding="utf-8", newline="") as fh:
        next(fh, None)
        for line in fh:
            yield line.rstrip("\n")


def check_consistency(ds: Dataset, thresholds: Thresholds = Thresholds()) -> list[CheckResult]:
    out = []
    d = ds.daily

    # referential integrity and the users x days grid
    known = set(ds.users["user_id"].tolist())
    problems = []
    if len(known) != len(ds.users):
        problems.append("duplicate user_id in users.csv")
    for name, frame in ((DAILY.name, d), (WEEKLY.name, ds.weekly_text), (INTERVENTIONS.name, ds.interventions)):
        ids = set(pd.to_numeric(frame["user_id"]).tolist())
        missing = ids - known
        if missing:
            problems.append(f"{name} references unknown user_id {min(missing)}")
    if d.duplicated(["user_id", "date"]).any():
        i = int(np.flatnonzero(d.duplicated(["user_id", "date"]).to_numpy())[0])
        problems.append(f"duplicate (user_id, date) at {DAILY.name}:{i + 2}")
    n_days = int((d["date"].max() - d["date"].min()).days) + 1
    per_user = d.groupby("user_id").size()
    if len(per_user) != len(known) or (per_user != n_days).any():
        problems.append(f"expected {len(known)} users x {n_days} days = {len(known) * n_days} rows, found {len(d)}")
    out.append(CheckResult("row_counts", FAIL if problems else PASS, len(d), len(known) * n_days, "; ".join(problems)))

    # weekly summaries recomputed from daily values
    expected = recompute_weekly(ds)
    written = ds.weekly_text.reset_index(drop=True)
    if len(expected) != len(written):
        out.append(CheckResult("weekly_recompute", FAIL, len(written), len(expected), "weekly row count differs from daily week blocks"))
    else:
        diff = expected.ne(written)
        if diff.to_numpy().any():
            row, colpos = np.argwhere(diff.to_numpy())[0]
            col = expected.columns[colpos]
            out.append(
                CheckResult(
                    "weekly_recompute",
                    FAIL,
                    int(diff.to_numpy().any(axis=1).sum()),
                    0,
                    f"user_id={written['user_id'].iat[row]} week_index={written['week_index'].iat[row]}: "
                    f"{col} written {written[col].iat[row]} but daily data gives {expected[col].iat[row]}",
                )
            )
        else:
            out.append(CheckResult("weekly_recompute", PASS, 0, 0, f"{len(written)} rows reproduced exactly"))

    # weight trajectory from the energy columns
    codes = _user_codes(ds)
    delta = np.clip(
        (d["calories_intake"].to_numpy(dtype=float) - d["calories_expended"].to_numpy(dtype=float)) / 7700.0,
        -0.3,
        0.3,
    )
    total = np.bincount(codes, delta)
    last = np.r_[np.flatnonzero(codes[1:] != codes[:-1]), len(codes) - 1]
    user_ids = d["user_id"].to_numpy()[last]
    baseline = ds.users.set_index("user_id")["baseline_weight_kg"].reindex(user_ids).to_numpy(dtype=float)
    final = d["weight_kg"].to_numpy(dtype=float)[last]
    err = np.abs(final - baseline - total)
    worst = float(np.nanmax(err)) if err.size else 0.0
    ok = bool(np.all(np.isfinite(err))) and worst <= thresholds.weight_tolerance
    detail = "" if ok else f"user_id={user_ids[int(np.nanargmax(err))]}"
    out.append(CheckResult("weight_conservation", PASS if ok else FAIL, worst, f"<= {thresholds.weight_tolerance}", detail))

    out.append(check_daily_all(ds))
    return out


def check_daily_all(ds: Dataset) -> CheckResult:
    """daily_all.csv must equal the join of its source tables, line for line."""
    path = ds.root / DAILY_ALL.name
    if not ds.has_daily_all:
        return CheckResult("daily_all_join", SKIP, None, None, "daily_all.csv not present")
    with open(path, encoding="utf-8") as fh:
        if fh.readline().rstrip("\n") != DAILY_ALL.header():
            return CheckResult("daily_all_join", FAIL, None, None, f"{DAILY_ALL.name}:1: header mismatch")

    users = {line.split(",", 1)[0]: line for line in _iter_lines(ds.root / USERS.name)}
    weekly = {}
    for line in _iter_lines(ds.root / WEEKLY.name):
        uid, week, rest = line.split(",", 2)
        weekly[(uid, week)] = f"{week},{rest}"
    offsets = ds.day_offset()
    flags = np.stack([ds.active[k] for k in INTERVENTION_TYPES], axis=1)
    flag_text = [",".join("true" if f else "false" for f in row) for row in flags.tolist()]

    n_all = 0
    first_bad = None
    pairs = zip_longest(_iter_lines(ds.root / DAILY.name), _iter_lines(path))
    for i, (source, joined) in enumerate(pairs):
        if joined is not None:
            n_all += 1
        if first_bad is not None or source is None or joined is None:
            continue
        uid, rest = source.split(",", 1)
        expected = f"{users.get(uid, '?')},{rest},{weekly.get((uid, str(offsets[i] // 7)), '?')},{flag_text[i]}"
        if joined != expected:
            first_bad = i
    if n_all != len(ds.daily):
        return CheckResult(
            "daily_all_join", FAIL, n_all, len(ds.daily), f"row count {n_all} differs from daily_logs ({len(ds.daily)})"
        )
    if first_bad is not None:
        return CheckResult(
            "daily_all_join", FAIL, None, None, f"{DAILY_ALL.name}:{first_bad + 2} differs from the join of its sources"
        )
    return CheckResult("daily_all_join", PASS, n_all, len(ds.daily), "every row equals the join of its sources")


def validate_dataset(root, thresholds: Thresholds = Thresholds()) -> ValidationReport:
    """Run every check group on the dataset directory ``root``."""
    ds = load_dataset(root)
    report = ValidationReport(
        fingerprint={
            USERS.name: len(ds.users),
            DAILY.name: len(ds.daily),
            WEEKLY.name: len(ds.weekly_text),
            INTERVENTIONS.name: len(ds.interventions),
        }
    )
    if ds.has_daily_all:
        with open(ds.root / DAILY_ALL.name, encoding="utf-8") as fh:
            report.fingerprint[DAILY_ALL.name] = sum(1 for _ in fh) - 1
    for check in (
        check_ranges,
        check_directional,
        check_temporal,
        check_heterogeneity_and_interventions,
        check_consistency,
    ):
        report.checks.extend(check(ds, thresholds))
    return report
