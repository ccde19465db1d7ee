"""Static user profiles and the built-in profession table."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import randomness as rnd
from .calendar import cycle_phase
from .randomness import STATIC_DAY, Channel

if TYPE_CHECKING:
    from .config import GeneratorConfig

SEXES = ("female", "male")
WORK_MODES = ("remote", "onsite", "hybrid")
CHRONOTYPES = ("early", "intermediate", "late")
CHRONOTYPE_WEIGHTS = (0.25, 0.5, 0.25)
CHRONO_SHIFT = {"early": 0.2, "intermediate": 0.0, "late": -0.3}


@dataclass(frozen=True)
class ProfessionSpec:
    name: str
    base_work_hours: float
    meeting_rate: float
    email_rate: float
    schedule_pattern: str = "standard_weekday"
    weekend_work_probability: float = 0.0


PROFESSIONS: tuple[ProfessionSpec, ...] = (
    ProfessionSpec("manager", 8.5, 4.0, 60.0),
    ProfessionSpec("engineer", 8.0, 2.0, 30.0),
    ProfessionSpec("nurse", 9.0, 1.0, 10.0, "rotating_shift", 0.4),
    ProfessionSpec("teacher", 7.5, 1.5, 20.0),
    ProfessionSpec("analyst", 8.0, 3.0, 40.0),
)
_BY_NAME = {p.name: p for p in PROFESSIONS}


def profession_table() -> list[ProfessionSpec]:
    return list(PROFESSIONS)


def profession(name: str) -> ProfessionSpec:
    return _BY_NAME[name]


@dataclass(frozen=True)
class UserProfile:
    user_id: int
    age: int
    sex: str
    height_cm: float
    profession: str
    work_mode: str
    chronotype: str
    baseline_bmi: float
    baseline_weight_kg: float
    activity_tendency: float
    diet_tendency: float
    caffeine_tendency: float
    base_stress: float
    base_sleep_hours: float
    cycle_phase: float

    # attributes the dynamics read; Cohort exposes the same names as arrays
    @property
    def profession_spec(self) -> ProfessionSpec:
        return _BY_NAME[self.profession]

    @property
    def base_work_hours(self) -> float:
        return self.profession_spec.base_work_hours

    @property
    def meeting_rate(self) -> float:
        return self.profession_spec.meeting_rate

    @property
    def email_rate(self) -> float:
        return self.profession_spec.email_rate

    @property
    def weekend_work_probability(self) -> float:
        return self.profession_spec.weekend_work_probability

    @property
    def rotating_shift(self) -> bool:
        return self.profession_spec.schedule_pattern == "rotating_shift"

    @property
    def is_male(self) -> bool:
        return self.sex == "male"

    @property
    def chrono_shift(self) -> float:
        return CHRONO_SHIFT[self.chronotype]

    @property
    def onsite(self) -> bool:
        return self.work_mode == "onsite"

    @property
    def hybrid(self) -> bool:
        return self.work_mode == "hybrid"


_DERIVED = (
    "base_work_hours",
    "meeting_rate",
    "email_rate",
    "weekend_work_probability",
    "rotating_shift",
    "is_male",
    "chrono_shift",
    "onsite",
    "hybrid",
)


class Cohort:
    """Column view of several profiles so the daily loop can run vectorized.

    Every UserProfile field and derived property is available as a numpy
    array of the same name, in the order the profiles were given.
    """

    def __init__(self, profiles: Sequence[UserProfile]):
        if not profiles:
            raise ValueError("a cohort needs at least one profile")
        self.profiles = list(profiles)
        for name in [f.name for f in fields(UserProfile)] + list(_DERIVED):
            setattr(self, name, np.array([getattr(p, name) for p in self.profiles]))

    def __len__(self) -> int:
        return len(self.profiles)


def _clamped_normal(seed, user_id, tag, mean, sd, lo, hi) -> float:
    return float(np.clip(rnd.normal(Channel(seed, user_id, STATIC_DAY, tag), 0, mean, sd), lo, hi))


def sample_profile(seed: int, user_id: int, config: "GeneratorConfig") -> UserProfile:
    """Draw one user's static attributes; depends only on (seed, user_id, mixes)."""
    if user_id < 1:
        raise ValueError("user ids start at 1")

    def ch(tag):
        return Channel(seed, user_id, STATIC_DAY, "profile." + tag)

    sex = SEXES[int(rnd.categorical(ch("sex"), 0, (1.0, 1.0)))]
    age = int(rnd.integers(ch("age"), 0, 22, 65))
    mean_h, sd_h = (178.0, 7.0) if sex == "male" else (165.0, 6.0)
    height = round(_clamped_normal(seed, user_id, "profile.height", mean_h, sd_h, 145.0, 205.0), 1)
    bmi = round(_clamped_normal(seed, user_id, "profile.bmi", 25.0, 3.5, 17.0, 40.0), 2)

    names = [p.name for p in PROFESSIONS]
    weights = [config.profession_mix.get(n, 0.0) for n in names]
    prof = names[int(rnd.categorical(ch("profession"), 0, weights))]
    mode_weights = [config.work_mode_mix.get(m, 0.0) for m in WORK_MODES]
    mode = WORK_MODES[int(rnd.categorical(ch("work_mode"), 0, mode_weights))]
    chrono = CHRONOTYPES[int(rnd.categorical(ch("chronotype"), 0, CHRONOTYPE_WEIGHTS))]

    def tendency(tag):
        return round(_clamped_normal(seed, user_id, "profile." + tag, 0.5, 0.18, 0.0, 1.0), 3)

    return UserProfile(
        user_id=user_id,
        age=age,
        sex=sex,
        height_cm=height,
        profession=prof,
        work_mode=mode,
        chronotype=chrono,
        baseline_bmi=bmi,
        baseline_weight_kg=bmi * (height / 100.0) ** 2,
        activity_tendency=tendency("activity"),
        diet_tendency=tendency("diet"),
        caffeine_tendency=tendency("caffeine"),
        base_stress=round(_clamped_normal(seed, user_id, "profile.base_stress", 5.0, 1.2, 0.0, 10.0), 2),
        base_sleep_hours=round(_clamped_normal(seed, user_id, "profile.base_sleep", 7.4, 0.4, 5.5, 9.5), 2),
        cycle_phase=cycle_phase(seed, user_id),
    )


def sample_population(config: "GeneratorConfig", user_ids: Sequence[int] | None = None) -> list[UserProfile]:
    """Profiles for users 1..population_size (or the given subset of ids)."""
    if user_ids is None:
        user_ids = range(1, config.population_size + 1)
    return [sample_profile(config.seed, uid, config) for uid in user_ids]
