"""The daily simulation loop.

Each day runs a fixed sequence of updates:

    pressure regime -> work variables -> stress -> lifestyle -> sleep
    -> sleep quality -> mood/energy/focus -> energy balance -> weight

Lifestyle is generated before sleep because the night's sleep uses the same
day's caffeine intake. Every draw is keyed by (seed, user, day, tag), so the
call order has no effect on the values drawn.

The update functions are written with numpy and broadcast, so ``profile`` can
be either one UserProfile (scalar state) or a Cohort (one array entry per
user). The vectorized path is what the generator runs.

Energy is tracked on a grid that makes weight bookkeeping exact at the
written precision: expenditure is rounded to 0.01 kcal and the daily surplus
is a whole multiple of 7.7 kcal, i.e. a whole number of grams at 7700 kcal/kg.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import randomness as rnd
from .calendar import SimDate, cycle_value, date_range, is_workday, season_factor
from .interventions import (
    InterventionEvent,
    Modifiers,
    exposure_grid,
    modifiers_for_day,
    no_modifiers,
)
from .randomness import Channel

if TYPE_CHECKING:
    from .config import GeneratorConfig, SensitivityParams
    from .population import Cohort, UserProfile

PRESSURE_STATES = ("normal", "elevated", "critical")
NORMAL, ELEVATED, CRITICAL = 0, 1, 2
TRANSITIONS = np.array(
    [
        [0.92, 0.08, 0.00],
        [0.25, 0.65, 0.10],
        [0.00, 0.40, 0.60],
    ]
)
_CUMULATIVE = np.cumsum(TRANSITIONS, axis=1)
PRESSURE_BUMP = np.array([0.0, 0.10, 0.25])
CRITICAL_STRESS_BONUS = 0.8
CYCLE_STRESS_WEIGHT = 0.3
RELIEF_PER_INTENSITY = 1.5
RELIEF_TYPES = ("vacation", "sick_leave", "lifestyle_program")
KCAL_PER_KG = 7700.0
KCAL_PER_GRAM = KCAL_PER_KG / 1000.0
MAX_DAILY_WEIGHT_CHANGE = 0.3
SLEEP_TARGET = 8.0


@dataclass(frozen=True)
class DayKey:
    """Identifies one (seed, user(s), day); hands out channels by tag."""

    seed: int
    user_id: object
    day_index: int

    def channel(self, tag: str) -> Channel:
        return Channel(self.seed, self.user_id, self.day_index, tag)


@dataclass(frozen=True)
class DailyState:
    stress: object
    sleep_quality: object
    weight_kg: object
    pressure_state: object  # index into PRESSURE_STATES
    prev_sleep_hours: object


@dataclass(frozen=True)
class DailyRecord:
    """One user-day; in the vectorized path each field holds one array per day."""

    user_id: object
    date: dt.date
    is_workday: object
    work_hours: object
    meetings_count: object
    emails_received: object
    pressure_state: object
    stress_level: object
    sleep_hours: object
    sleep_quality: object
    mood: object
    energy: object
    focus: object
    exercise_minutes: object
    outdoor_minutes: object
    caffeine_mg: object
    diet_quality: object
    screen_time_hours: object
    calories_intake: object
    calories_expended: object
    weight_kg: object


RECORD_FIELDS = tuple(f.name for f in fields(DailyRecord))


def _q(x, digits: int = 2):
    # + 0.0 turns -0.0 into 0.0 so it never prints as "-0.00"
    return np.round(x, digits) + 0.0


def _pos(x):
    return np.maximum(0.0, x)


def start_weight(baseline_kg):
    """Baseline weight rounded to whole grams exactly as users.csv prints it."""
    flat = [float(f"{w:.3f}") for w in np.atleast_1d(baseline_kg).tolist()]
    return np.asarray(flat).reshape(np.shape(baseline_kg))


def initial_state(profile) -> DailyState:
    weight = start_weight(profile.baseline_weight_kg)
    return DailyState(
        stress=np.asarray(profile.base_stress, dtype=float),
        sleep_quality=np.clip(10.0 - np.abs(np.asarray(profile.base_sleep_hours) - SLEEP_TARGET), 0.0, 10.0),
        weight_kg=weight + 0.0,
        pressure_state=np.zeros(np.shape(profile.base_stress), dtype=np.int64),
        prev_sleep_hours=np.asarray(profile.base_sleep_hours, dtype=float),
    )


def update_pressure(pressure, channel: Channel):
    """One step of the normal/elevated/critical Markov chain."""
    u = rnd.uniform(channel, 0)
    cum = _CUMULATIVE[np.asarray(pressure)]
    nxt = np.sum(np.asarray(u)[..., None] >= cum, axis=-1)
    return np.minimum(nxt, CRITICAL)


def stationary_distribution() -> np.ndarray:
    """Long-run occupancy of the pressure chain (left eigenvector for eigenvalue 1)."""
    vals, vecs = np.linalg.eig(TRANSITIONS.T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
    return v / v.sum()


def gen_work_vars(profile, workday, cycle, pressure, mods: Modifiers, params: "SensitivityParams", key: DayKey):
    """Work hours, meeting count and email count; all zero on non-workdays."""
    base = profile.base_work_hours
    noise = rnd.normal(key.channel("work_hours_noise"), 0, 0.0, params.noise("work_hours"))
    hours = np.clip(base * (1.0 + 0.1 * cycle + PRESSURE_BUMP[pressure]) + noise, 0.0, 16.0)
    hours = hours * (1.0 - 0.25 * mods.workload_cap.applied())
    hours = np.where(workday, hours, 0.0)
    load = hours / base
    meetings = np.where(workday, rnd.poisson(key.channel("meetings"), 0, profile.meeting_rate * load), 0)
    emails = np.where(workday, rnd.poisson(key.channel("emails"), 0, profile.email_rate * load), 0)
    return hours, meetings, emails


def workload_index(work_hours, meetings, emails, profile):
    """Deviation of the day's work from the profession's baseline (0 = typical day)."""
    return (
        (work_hours - profile.base_work_hours) / 2.0
        + (meetings - profile.meeting_rate) / 4.0
        + (emails - profile.email_rate) / 30.0
    )


def update_stress(stress, profile, load, season, cycle, pressure, mods: Modifiers, params: "SensitivityParams", key: DayKey):
    rho = params.stress_persistence
    relief = RELIEF_PER_INTENSITY * sum(mods.of(k).applied() for k in RELIEF_TYPES)
    drift = (
        rho * stress
        + (1.0 - rho) * profile.base_stress
        + params.workload_to_stress * np.maximum(load, params.workload_floor)
        + params.season_amplitude * season
        + CYCLE_STRESS_WEIGHT * cycle
        + CRITICAL_STRESS_BONUS * (np.asarray(pressure) == CRITICAL)
        - relief
    )
    noise = rnd.normal(key.channel("stress_noise"), 0, 0.0, params.noise("stress"))
    return np.clip(drift + noise, 0.0, 10.0)


def gen_sleep(stress, caffeine_mg, workday, profile, params: "SensitivityParams", key: DayKey):
    """Hours slept the night attributed to this day."""
    hours = (
        profile.base_sleep_hours
        + profile.chrono_shift
        - params.stress_to_sleep * _pos(stress - 5.0)
        - 0.0015 * caffeine_mg
        + 0.5 * np.logical_not(workday)
    )
    noise = rnd.normal(key.channel("sleep_noise"), 0, 0.0, params.noise("sleep_hours"))
    return np.clip(hours + noise, 3.0, 12.0)


def update_sleep_quality(quality, sleep_hours, stress):
    target = 10.0 - np.abs(sleep_hours - SLEEP_TARGET) - 0.4 * _pos(stress - 5.0)
    return np.clip(0.9 * quality + 0.1 * target, 0.0, 10.0)


def gen_lifestyle(profile, workday, season, stress, pressure, work_hours, mods: Modifiers, params: "SensitivityParams", key: DayKey):
    """Exercise, outdoor time, caffeine, diet quality and screen time."""
    critical = np.asarray(pressure) == CRITICAL
    off = np.logical_not(workday)
    boost = mods.lifestyle_program.applied()
    excess = _pos(stress - 5.0)

    def noise(tag, name):
        return rnd.normal(key.channel(tag), 0, 0.0, params.noise(name))

    exercise = np.clip(
        60.0 * profile.activity_tendency * (1.0 - 0.5 * critical) + 15.0 * off + 20.0 * boost
        + noise("exercise_noise", "exercise"),
        0.0,
        240.0,
    )
    exercise = np.where(mods.sick_leave.active, np.minimum(exercise, 15.0), exercise)
    outdoor = np.clip(30.0 + 40.0 * off - 20.0 * season + noise("outdoor_noise", "outdoor"), 0.0, 480.0)
    caffeine = np.clip(
        150.0 + 250.0 * profile.caffeine_tendency + 20.0 * excess + noise("caffeine_noise", "caffeine"), 0.0, 800.0
    )
    diet = np.clip(
        4.0 + 4.0 * profile.diet_tendency - 0.3 * excess - 0.8 * critical + 0.5 * boost
        + noise("diet_noise", "diet_quality"),
        0.0,
        10.0,
    )
    screen = np.clip(3.0 + 0.3 * work_hours + noise("screen_noise", "screen_time"), 0.0, 16.0)
    as_int = lambda x: np.rint(x).astype(np.int64)  # noqa: E731
    return as_int(exercise), as_int(outdoor), as_int(caffeine), diet, screen


def gen_mood_energy_focus(sleep_hours, sleep_quality, stress, exercise, diet_quality, params: "SensitivityParams", key: DayKey, sick=False):
    def noise(tag, name):
        return rnd.normal(key.channel(tag), 0, 0.0, params.noise(name))

    mood = (
        5.0
        + params.sleep_to_mood * (sleep_hours - 7.0)
        - params.stress_to_mood * (stress - 5.0)
        + 0.01 * exercise
        + 0.1 * (diet_quality - 5.0)
    )
    energy = (
        5.0
        + 0.5 * (sleep_hours - 7.0)
        + 0.2 * (sleep_quality - 5.0)
        - 0.25 * (stress - 5.0)
        + 0.008 * exercise
        - 1.0 * np.asarray(sick, dtype=float)
    )
    focus = 5.0 + 0.3 * (sleep_hours - 7.0) - 0.35 * (stress - 5.0) + 0.15 * (sleep_quality - 5.0)
    return (
        np.clip(mood + noise("mood_noise", "mood"), 0.0, 10.0),
        np.clip(energy + noise("energy_noise", "energy"), 0.0, 10.0),
        np.clip(focus + noise("focus_noise", "focus"), 0.0, 10.0),
    )


def bmr(profile, weight_kg):
    """Mifflin-St Jeor basal metabolic rate in kcal/day."""
    return 10.0 * weight_kg + 6.25 * profile.height_cm - 5.0 * profile.age + np.where(profile.is_male, 5.0, -161.0)


def energy_balance(profile, weight_kg, stress, exercise, workday, diet_quality, params: "SensitivityParams", key: DayKey):
    """(intake, expended) in kcal for the day.

    Expenditure is BMR x 1.2 plus exercise and commuting; intake scales it
    up under stress above 6 and down with better diet. The surplus is snapped
    to whole grams of body weight (multiples of 7.7 kcal).
    """
    commute = np.where(workday, 80.0 * profile.onsite + 40.0 * profile.hybrid, 0.0)
    expended = _q(bmr(profile, weight_kg) * 1.2 + 6.0 * exercise + commute)
    factor = 1.0 + params.stress_overeat_gain * _pos(stress - 6.0) - 0.01 * (diet_quality - 5.0)
    intake = expended * factor + rnd.normal(key.channel("intake_noise"), 0, 0.0, params.noise("intake"))
    intake = np.maximum(intake, 0.5 * expended)
    grams = np.rint((intake - expended) / KCAL_PER_GRAM)
    return _q(expended + KCAL_PER_GRAM * grams), expended


def update_weight(weight_kg, intake, expended):
    delta = np.clip((intake - expended) / KCAL_PER_KG, -MAX_DAILY_WEIGHT_CHANGE, MAX_DAILY_WEIGHT_CHANGE)
    return weight_kg + delta


def step_day(state: DailyState, profile, d: SimDate, mods: Modifiers, config: "GeneratorConfig"):
    """Advance one day. Returns the new state and the day's (rounded) record."""
    params = config.sensitivities
    key = DayKey(config.seed, profile.user_id, d.day_index)

    pressure = update_pressure(state.pressure_state, key.channel("pressure"))
    workday = np.logical_and(is_workday(d, profile, key.channel("weekend_shift")), np.logical_not(mods.absent))
    season = season_factor(d)
    cycle = cycle_value(d.day_index, profile.cycle_phase)

    hours, meetings, emails = gen_work_vars(profile, workday, cycle, pressure, mods, params, key)
    load = workload_index(hours, meetings, emails, profile)
    stress = update_stress(state.stress, profile, load, season, cycle, pressure, mods, params, key)
    exercise, outdoor, caffeine, diet, screen = gen_lifestyle(
        profile, workday, season, stress, pressure, hours, mods, params, key
    )
    sleep = gen_sleep(stress, caffeine, workday, profile, params, key)
    quality = update_sleep_quality(state.sleep_quality, sleep, stress)
    mood, energy, focus = gen_mood_energy_focus(
        sleep, quality, stress, exercise, diet, params, key, sick=mods.sick_leave.active
    )
    intake, expended = energy_balance(profile, state.weight_kg, stress, exercise, workday, diet, params, key)
    # snap to whole grams; the surplus already is a whole number of grams
    weight = np.round(update_weight(state.weight_kg, intake, expended), 3) + 0.0

    new_state = DailyState(stress, quality, weight, pressure, sleep)
    scalar = np.ndim(profile.user_id) == 0
    record = DailyRecord(
        user_id=profile.user_id,
        date=d.date,
        is_workday=bool(workday) if scalar else workday,
        work_hours=_q(hours),
        meetings_count=meetings,
        emails_received=emails,
        pressure_state=PRESSURE_STATES[int(pressure)] if scalar else pressure,
        stress_level=_q(stress),
        sleep_hours=_q(sleep),
        sleep_quality=_q(quality),
        mood=_q(mood),
        energy=_q(energy),
        focus=_q(focus),
        exercise_minutes=exercise,
        outdoor_minutes=outdoor,
        caffeine_mg=caffeine,
        diet_quality=_q(diet),
        screen_time_hours=_q(screen),
        calories_intake=intake,
        calories_expended=expended,
        weight_kg=weight,
    )
    if scalar:
        record = DailyRecord(**{k: _scalar(v) for k, v in record.__dict__.items()})
    return new_state, record


def _scalar(v):
    if isinstance(v, np.ndarray) or isinstance(v, np.generic):
        return v.item()
    return v


@dataclass
class DailyFrame:
    """Simulated days for a block of users: each column is (n_users, n_days)."""

    user_ids: np.ndarray
    start_date: dt.date
    columns: dict[str, np.ndarray]

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_days(self) -> int:
        return self.columns["stress_level"].shape[1]


_FRAME_COLUMNS = RECORD_FIELDS[2:]


def simulate_cohort(
    cohort: "Cohort",
    events_by_user: Sequence[Sequence[InterventionEvent]],
    config: "GeneratorConfig",
) -> DailyFrame:
    """Run the daily loop for every user in ``cohort`` over the config's range."""
    days = date_range(config.start_date, config.end_date)
    n, T = len(cohort), len(days)
    grid = exposure_grid(events_by_user, config.start_date, T)
    out: dict[str, np.ndarray] = {}
    state = initial_state(cohort)
    for d in days:
        active, intensity = grid.day(d.day_index)
        mods = modifiers_for_day(active, intensity, cohort.user_id, d.day_index, config.seed, config.intervention_params)
        state, rec = step_day(state, cohort, d, mods, config)
        for name in _FRAME_COLUMNS:
            col = out.get(name)
            value = getattr(rec, name)
            if col is None:
                col = out[name] = np.empty((n, T), dtype=np.asarray(value).dtype)
            col[:, d.day_index] = value
    return DailyFrame(np.asarray(cohort.user_id), config.start_date, out)


def frame_records(frame: DailyFrame) -> list[DailyRecord]:
    """Expand a frame into per-user-day records, ordered by (user_id, date)."""
    records = []
    cols = {k: v.tolist() for k, v in frame.columns.items()}
    for i, uid in enumerate(frame.user_ids.tolist()):
        for t in range(frame.n_days):
            values = {k: cols[k][i][t] for k in _FRAME_COLUMNS}
            values["pressure_state"] = PRESSURE_STATES[values["pressure_state"]]
            records.append(DailyRecord(user_id=uid, date=frame.start_date + dt.timedelta(days=t), **values))
    return records


def simulate_user(
    profile: "UserProfile",
    interventions: Sequence[InterventionEvent],
    config: "GeneratorConfig",
) -> list[DailyRecord]:
    """All daily records for one user, in date order."""
    from .population import Cohort

    if any(e.user_id != profile.user_id for e in interventions):
        raise ValueError("interventions must belong to the simulated user")
    return frame_records(simulate_cohort(Cohort([profile]), [list(interventions)], config))


__all__ = [
    "DailyFrame",
    "DailyRecord",
    "DailyState",
    "DayKey",
    "PRESSURE_STATES",
    "TRANSITIONS",
    "bmr",
    "energy_balance",
    "gen_lifestyle",
    "gen_mood_energy_focus",
    "gen_sleep",
    "gen_work_vars",
    "initial_state",
    "no_modifiers",
    "simulate_cohort",
    "simulate_user",
    "step_day",
    "update_pressure",
    "update_sleep_quality",
    "update_stress",
    "update_weight",
    "workload_index",
]
