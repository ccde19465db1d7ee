"""Date arithmetic for the simulation: workdays, seasonality, cycles, weeks.

Weeks are 7-day blocks counted from the simulation start date, not ISO weeks;
the last block may be partial.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from . import randomness as rnd
from .randomness import STATIC_DAY, Channel

CYCLE_DAYS = 28
SEASON_PEAK_DAY = 15
YEAR_DAYS = 365.25


@dataclass(frozen=True)
class SimDate:
    date: dt.date
    day_index: int

    @property
    def day_of_week(self) -> int:
        """0 = Monday ... 6 = Sunday."""
        return self.date.weekday()

    @property
    def day_of_year(self) -> int:
        return self.date.timetuple().tm_yday

    @property
    def is_weekend(self) -> bool:
        return self.day_of_week >= 5


def date_range(start: dt.date, end: dt.date) -> list[SimDate]:
    return [SimDate(start + dt.timedelta(days=i), i) for i in range((end - start).days + 1)]


def sim_date(start: dt.date, day: dt.date) -> SimDate:
    return SimDate(day, (day - start).days)


def is_workday(d: SimDate, profile, channel: Channel | None = None):
    """Mon-Fri for everyone; rotating-shift staff also work some weekend days.

    ``profile`` may be a single UserProfile or a Cohort; ``channel`` must be a
    ``weekend_shift`` channel for rotating-shift profiles on weekends.
    """
    if not d.is_weekend:
        return np.ones(np.shape(profile.rotating_shift), dtype=bool) if np.ndim(profile.rotating_shift) else True
    rotating = np.asarray(profile.rotating_shift, dtype=bool)
    if not np.any(rotating):
        return np.zeros(rotating.shape, dtype=bool) if rotating.ndim else False
    if channel is None:
        raise ValueError("rotating-shift weekend days need a random channel")
    works = rnd.bernoulli(channel, 0, profile.weekend_work_probability)
    out = rotating & works
    return out if out.ndim else bool(out)


def season_factor(d: SimDate | int) -> float:
    """+1 at day-of-year 15 (mid-winter peak), about -1 in mid-July."""
    doy = d.day_of_year if isinstance(d, SimDate) else d
    return math.cos(2.0 * math.pi * (doy - SEASON_PEAK_DAY) / YEAR_DAYS)


def cycle_phase(seed: int, user_id: int) -> float:
    """Per-user offset in [0, 28) for the workload cycle."""
    return float(rnd.uniform(Channel(seed, user_id, STATIC_DAY, "profile.cycle_phase"), 0)) * CYCLE_DAYS


def cycle_value(day_index, phase):
    return np.sin(2.0 * np.pi * (day_index + phase) / CYCLE_DAYS)


def workload_cycle_factor(d: SimDate | int, user_id: int, seed: int) -> float:
    """28-day sinusoidal workload cycle with a per-user phase, amplitude 1."""
    day_index = d.day_index if isinstance(d, SimDate) else d
    return float(cycle_value(day_index, cycle_phase(seed, user_id)))


def week_index(d: SimDate | int) -> int:
    day_index = d.day_index if isinstance(d, SimDate) else d
    return day_index // 7


def n_weeks(n_days: int) -> int:
    return -(-n_days // 7)


def week_start(start: dt.date, week: int) -> dt.date:
    return start + dt.timedelta(days=7 * week)
