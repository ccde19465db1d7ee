"""End-to-end generation: users are simulated in chunks, written in id order.

Chunks may run in worker processes. Each chunk is a pure function of
(config, user ids), and results are written strictly in chunk order, so the
output bytes do not depend on the worker count or the chunk size.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .aggregate import summarize_frame
from .calendar import n_weeks, week_start
from .config import INTERVENTION_TYPES, GeneratorConfig, config_digest, serialize, validate_config
from .dynamics import PRESSURE_STATES, simulate_cohort
from .export import (
    DAILY,
    DAILY_ALL,
    INTERVENTIONS,
    USERS,
    WEEKLY,
    format_column,
    format_rows,
    intervention_lines,
    users_lines,
    weekly_rest_lines,
)
from .interventions import InterventionEvent, assign_ids, exposure_grid, schedule_interventions
from .population import Cohort, sample_population

CHUNK_USERS = 250
MANIFEST = "manifest.json"


@dataclass
class ChunkResult:
    users: str
    daily: str
    weekly: str
    daily_all: str
    events: list[InterventionEvent]
    n_users: int
    n_daily: int
    n_weekly: int


def _join(lines: list[str]) -> str:
    return "".join(line + "\n" for line in lines)


def _flag_strings() -> list[str]:
    out = []
    for code in range(1 << len(INTERVENTION_TYPES)):
        out.append(",".join("true" if code >> j & 1 else "false" for j in range(len(INTERVENTION_TYPES))))
    return out


_FLAGS = _flag_strings()


def run_chunk(config: GeneratorConfig, user_ids: list[int]) -> ChunkResult:
    """Simulate, aggregate and format one block of users."""
    profiles = sample_population(config, user_ids)
    events = [schedule_interventions(p, config) for p in profiles]
    frame = simulate_cohort(Cohort(profiles), events, config)
    grid = exposure_grid(events, config.start_date, frame.n_days)
    weekly = summarize_frame(frame, grid.any_active)

    n, T = frame.n_users, frame.n_days
    W = weekly.n_weeks
    dates = [config.start_date + dt.timedelta(days=t) for t in range(T)]
    uid_text = [str(u) for u in user_ids]

    cols = [format_column(dates * n, "date")]
    for name, kind in DAILY.columns[2:]:
        values = frame.columns[name]
        if name == "pressure_state":
            values = np.asarray(PRESSURE_STATES, dtype=object)[values]
        cols.append(format_column(values, kind))
    daily_rest = format_rows(cols)
    daily_lines = [f"{uid_text[i // T]},{r}" for i, r in enumerate(daily_rest)]

    weekly_rest = weekly_rest_lines(
        {k: v.ravel().tolist() for k, v in weekly.columns.items()},
        list(range(W)) * n,
        [week_start(config.start_date, w) for w in range(W)] * n,
    )
    weekly_lines = [f"{uid_text[i // W]},{r}" for i, r in enumerate(weekly_rest)]

    user_text = users_lines(profiles)
    daily_all = ""
    if config.emit_denormalized:
        code = np.zeros((n, T), dtype=np.int64)
        for j, kind in enumerate(INTERVENTION_TYPES):
            code |= grid.active[kind].astype(np.int64) << j
        flags = [_FLAGS[c] for c in code.ravel().tolist()]
        week_of_day = [t // 7 for t in range(T)]
        lines = []
        for i in range(n):
            u = user_text[i]
            wk = weekly_rest[i * W : (i + 1) * W]
            base = i * T
            for t in range(T):
                lines.append(f"{u},{daily_rest[base + t]},{wk[week_of_day[t]]},{flags[base + t]}")
        daily_all = _join(lines)

    return ChunkResult(
        users=_join(user_text),
        daily=_join(daily_lines),
        weekly=_join(weekly_lines),
        daily_all=daily_all,
        events=[e for evs in events for e in evs],
        n_users=n,
        n_daily=n * T,
        n_weekly=n * W,
    )


@dataclass
class GenerationSummary:
    out_dir: Path
    row_counts: dict[str, int] = field(default_factory=dict)
    wall_time_s: float = 0.0

    def as_dict(self) -> dict:
        return {
            "out_dir": str(self.out_dir),
            "row_counts": self.row_counts,
            "wall_time_s": round(self.wall_time_s, 3),
        }


def _chunks(n_users: int, size: int) -> list[list[int]]:
    ids = list(range(1, n_users + 1))
    return [ids[i : i + size] for i in range(0, n_users, size)]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def generate(
    config: GeneratorConfig,
    out_dir: str | os.PathLike,
    threads: int = 1,
    chunk_users: int = CHUNK_USERS,
    progress: Callable[[str], None] | None = None,
) -> GenerationSummary:
    """Write all tables and manifest.json for ``config`` into ``out_dir``."""
    problems = validate_config(config)
    if problems:
        raise ValueError("invalid configuration: " + "; ".join(problems))
    if threads < 1:
        raise ValueError("threads must be >= 1")
    t0 = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    say = progress or (lambda msg: None)

    names = [USERS.name, DAILY.name, WEEKLY.name, INTERVENTIONS.name]
    if config.emit_denormalized:
        names.append(DAILY_ALL.name)
    else:
        # a stale daily_all.csv would not match this run's tables
        (out / DAILY_ALL.name).unlink(missing_ok=True)
    schemas = {s.name: s for s in (USERS, DAILY, WEEKLY, INTERVENTIONS, DAILY_ALL)}
    handles = {name: open(out / name, "w", encoding="utf-8", newline="\n") for name in names}
    counts = {name: 0 for name in names}
    next_id = 1
    chunks = _chunks(config.population_size, chunk_users)

    def consume(result: ChunkResult) -> None:
        nonlocal next_id
        handles[USERS.name].write(result.users)
        handles[DAILY.name].write(result.daily)
        handles[WEEKLY.name].write(result.weekly)
        if config.emit_denormalized:
            handles[DAILY_ALL.name].write(result.daily_all)
            counts[DAILY_ALL.name] += result.n_daily
        events = assign_ids(result.events, next_id)
        next_id += len(events)
        handles[INTERVENTIONS.name].write(_join(intervention_lines(events)))
        counts[USERS.name] += result.n_users
        counts[DAILY.name] += result.n_daily
        counts[WEEKLY.name] += result.n_weekly
        counts[INTERVENTIONS.name] += len(events)

    try:
        for name, fh in handles.items():
            fh.write(schemas[name].header() + "\n")
        if threads == 1:
            for i, ids in enumerate(chunks):
                consume(run_chunk(config, ids))
                say(f"chunk {i + 1}/{len(chunks)} done ({counts[USERS.name]} users)")
        else:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                pending: deque = deque()
                todo = iter(enumerate(chunks))
                for _ in range(2 * threads):
                    item = next(todo, None)
                    if item is None:
                        break
                    pending.append((item[0], pool.submit(run_chunk, config, item[1])))
                while pending:
                    i, fut = pending.popleft()
                    consume(fut.result())
                    say(f"chunk {i + 1}/{len(chunks)} done ({counts[USERS.name]} users)")
                    item = next(todo, None)
                    if item is not None:
                        pending.append((item[0], pool.submit(run_chunk, config, item[1])))
    finally:
        for fh in handles.values():
            fh.close()

    manifest = {
        "tool": "flowgen",
        "version": __version__,
        "seed": config.seed,
        "config_digest": config_digest(config),
        "config": serialize(config),
        "n_days": config.n_days,
        "n_weeks": n_weeks(config.n_days),
        "row_counts": counts,
        "sha256": {name: _sha256(out / name) for name in names},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return GenerationSummary(out, counts, time.perf_counter() - t0)


