"""Intervention scheduling and the daily modifiers they feed into the dynamics.

An intervention is a dated window. Absence (vacation, sick leave) is certain
for every covered day; the wellbeing effect of each type only applies on days
where its own Bernoulli draw fires.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import randomness as rnd
from .config import INTERVENTION_TYPES, InterventionParams
from .randomness import STATIC_DAY, Channel

if TYPE_CHECKING:
    from .config import GeneratorConfig
    from .population import UserProfile

MAX_ATTEMPTS = 10
# proposals per event are keyed j*MAX_ATTEMPTS + attempt
ABSENCE_TYPES = ("vacation", "sick_leave")


@dataclass(frozen=True)
class InterventionEvent:
    user_id: int
    type: str
    start_date: dt.date
    end_date: dt.date
    intensity: float
    intervention_id: int = 0

    def covers(self, day: dt.date) -> bool:
        return self.start_date <= day <= self.end_date


def _type_rank(kind: str) -> int:
    return INTERVENTION_TYPES.index(kind)


def schedule_interventions(profile: "UserProfile", config: "GeneratorConfig") -> list[InterventionEvent]:
    """Draw this user's intervention windows, sorted by (start_date, type).

    Per type the event count is Poisson(annual_rate * years). Proposals that
    overlap an accepted event of the same type are redrawn, up to 10 times,
    and then dropped. Windows running past the end date are truncated.
    Returned events carry intervention_id 0; ids are assigned at export.
    """
    seed, uid = config.seed, profile.user_id
    n_days = config.n_days
    years = n_days / 365.25
    events: list[InterventionEvent] = []
    for kind in INTERVENTION_TYPES:
        params = config.intervention_params.of(kind)
        if params.annual_rate <= 0:
            continue

        def ch(what, kind=kind):
            return Channel(seed, uid, STATIC_DAY, f"schedule.{kind}.{what}")

        count = int(rnd.poisson(ch("count"), 0, params.annual_rate * years))
        taken: list[tuple[int, int]] = []
        lo_d, hi_d = params.duration_range
        lo_i, hi_i = params.intensity_range
        for j in range(count):
            for attempt in range(MAX_ATTEMPTS):
                k = j * MAX_ATTEMPTS + attempt
                start = int(rnd.integers(ch("start"), k, 0, n_days - 1))
                length = int(rnd.integers(ch("duration"), k, lo_d, hi_d))
                end = min(start + length - 1, n_days - 1)
                if all(end < s or start > e for s, e in taken):
                    break
            else:
                continue
            taken.append((start, end))
            intensity = lo_i + (hi_i - lo_i) * float(rnd.uniform(ch("intensity"), j))
            events.append(
                InterventionEvent(
                    user_id=uid,
                    type=kind,
                    start_date=config.start_date + dt.timedelta(days=start),
                    end_date=config.start_date + dt.timedelta(days=end),
                    intensity=round(intensity, 3),
                )
            )
    events.sort(key=lambda e: (e.start_date, _type_rank(e.type)))
    return events


def assign_ids(events: Iterable[InterventionEvent], first_id: int = 1) -> list[InterventionEvent]:
    """Number events densely in (user_id, start_date, type) order."""
    ordered = sorted(events, key=lambda e: (e.user_id, e.start_date, _type_rank(e.type)))
    return [
        InterventionEvent(e.user_id, e.type, e.start_date, e.end_date, e.intensity, first_id + i)
        for i, e in enumerate(ordered)
    ]


@dataclass(frozen=True)
class Modifier:
    """State of one intervention type on one day (scalars or per-user arrays)."""

    active: object
    intensity: object
    fires: object

    def applied(self):
        """Intensity where the effect fires, else 0."""
        return np.where(self.fires, self.intensity, 0.0)


@dataclass(frozen=True)
class Modifiers:
    vacation: Modifier
    sick_leave: Modifier
    workload_cap: Modifier
    lifestyle_program: Modifier

    def of(self, kind: str) -> Modifier:
        return getattr(self, kind)

    @property
    def absent(self):
        return np.logical_or(self.vacation.active, self.sick_leave.active)

    @property
    def any_active(self):
        return np.logical_or.reduce([self.of(k).active for k in INTERVENTION_TYPES])

    def active_types(self) -> dict[str, Modifier]:
        """Types active on this day (scalar modifiers only)."""
        return {k: self.of(k) for k in INTERVENTION_TYPES if bool(self.of(k).active)}


def no_modifiers(n: int | None = None) -> Modifiers:
    if n is None:
        off = Modifier(False, 0.0, False)
    else:
        off = Modifier(np.zeros(n, bool), np.zeros(n), np.zeros(n, bool))
    return Modifiers(off, off, off, off)


def modifiers_for_day(
    active: dict[str, np.ndarray],
    intensity: dict[str, np.ndarray],
    user_ids,
    day_index: int,
    seed: int,
    params: InterventionParams,
) -> Modifiers:
    """Attach keyed Bernoulli firing draws to the exposure state of one day."""
    mods = {}
    for kind in INTERVENTION_TYPES:
        act = active[kind]
        if np.any(act):
            p = params.of(kind).effect_probability
            fires = act & rnd.bernoulli(Channel(seed, user_ids, day_index, f"fire.{kind}"), 0, p)
        else:
            fires = np.zeros(np.shape(act), dtype=bool) if np.ndim(act) else False
        mods[kind] = Modifier(act, intensity[kind], fires)
    return Modifiers(**mods)


def active_modifiers(
    events: Sequence[InterventionEvent],
    day: dt.date,
    seed: int,
    config: "GeneratorConfig",
) -> dict[str, Modifier]:
    """Modifiers for the types active on ``day`` for one user's events.

    Returns a mapping type -> Modifier(active, intensity, fires) holding only
    the types whose window covers ``day``.
    """
    if not events:
        return {}
    uid = events[0].user_id
    if any(e.user_id != uid for e in events):
        raise ValueError("events must belong to a single user")
    active = {k: False for k in INTERVENTION_TYPES}
    intensity = {k: 0.0 for k in INTERVENTION_TYPES}
    for e in events:
        if e.covers(day):
            active[e.type] = True
            intensity[e.type] = e.intensity
    day_index = (day - config.start_date).days
    mods = modifiers_for_day(active, intensity, uid, day_index, seed, config.intervention_params)
    return {k: Modifier(True, m.intensity, bool(m.fires)) for k, m in mods.active_types().items()}


@dataclass
class ExposureGrid:
    """Per-type (n_users, n_days) activity and intensity arrays."""

    active: dict[str, np.ndarray] = field(default_factory=dict)
    intensity: dict[str, np.ndarray] = field(default_factory=dict)

    def day(self, t: int) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
        return (
            {k: v[:, t] for k, v in self.active.items()},
            {k: v[:, t] for k, v in self.intensity.items()},
        )

    @property
    def any_active(self) -> np.ndarray:
        return np.logical_or.reduce(list(self.active.values()))


def exposure_grid(
    events_by_user: Sequence[Sequence[InterventionEvent]],
    start: dt.date,
    n_days: int,
) -> ExposureGrid:
    n = len(events_by_user)
    grid = ExposureGrid(
        active={k: np.zeros((n, n_days), dtype=bool) for k in INTERVENTION_TYPES},
        intensity={k: np.zeros((n, n_days)) for k in INTERVENTION_TYPES},
    )
    for row, events in enumerate(events_by_user):
        for e in events:
            a = (e.start_date - start).days
            b = (e.end_date - start).days + 1
            grid.active[e.type][row, a:b] = True
            grid.intensity[e.type][row, a:b] = e.intensity
    return grid
