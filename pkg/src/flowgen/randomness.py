"""Counter-based random draws keyed by (seed, user, day, channel tag, k).

Every draw is a pure function of its key: the key is folded through the
splitmix64 finalizer and the top 53 bits become a uniform in [0, 1). There is
no generator state, so the values a user receives do not depend on how many
other users exist, how the date range is extended, or how work is split
across processes.

All functions broadcast: ``user_id``, ``day_index`` and ``k`` may be numpy
arrays. Scalar inputs give numpy scalars back.

Normals use Box-Muller on the uniform pair (2k, 2k+1), cosine branch only.
Poisson counts use sequential inverse-CDF search on a single uniform.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

# Every channel tag used anywhere in the generator. Channel() rejects others,
# which keeps two call sites from silently sharing a stream.
TAGS = frozenset(
    {
        # static profile draws (day_index = -1)
        "profile.sex",
        "profile.age",
        "profile.height",
        "profile.bmi",
        "profile.profession",
        "profile.work_mode",
        "profile.chronotype",
        "profile.activity",
        "profile.diet",
        "profile.caffeine",
        "profile.base_stress",
        "profile.base_sleep",
        "profile.cycle_phase",
        # intervention scheduling (day_index = -1)
        "schedule.vacation.count",
        "schedule.vacation.start",
        "schedule.vacation.duration",
        "schedule.vacation.intensity",
        "schedule.sick_leave.count",
        "schedule.sick_leave.start",
        "schedule.sick_leave.duration",
        "schedule.sick_leave.intensity",
        "schedule.workload_cap.count",
        "schedule.workload_cap.start",
        "schedule.workload_cap.duration",
        "schedule.workload_cap.intensity",
        "schedule.lifestyle_program.count",
        "schedule.lifestyle_program.start",
        "schedule.lifestyle_program.duration",
        "schedule.lifestyle_program.intensity",
        # per-day draws
        "fire.vacation",
        "fire.sick_leave",
        "fire.workload_cap",
        "fire.lifestyle_program",
        "weekend_shift",
        "pressure",
        "work_hours_noise",
        "meetings",
        "emails",
        "stress_noise",
        "sleep_noise",
        "exercise_noise",
        "outdoor_noise",
        "caffeine_noise",
        "diet_noise",
        "screen_noise",
        "mood_noise",
        "energy_noise",
        "focus_noise",
        "intake_noise",
    }
)

STATIC_DAY = -1

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_UNIT = 2.0**-53
_TWO_PI = 2.0 * np.pi


@lru_cache(maxsize=None)
def tag_hash(tag: str) -> np.uint64:
    """Stable 64-bit hash of a channel tag (blake2b, first 8 bytes)."""
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return np.uint64(int.from_bytes(digest, "little"))


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _u64(x):
    # negative day indices wrap modulo 2**64, which is what we want
    return np.asarray(x, dtype=np.int64).astype(np.uint64) if np.ndim(x) or int(x) < 0 else np.uint64(x)


@dataclass(frozen=True)
class Channel:
    """Key of one random stream. ``user_id`` and ``day_index`` may be arrays."""

    seed: int
    user_id: object
    day_index: object
    tag: str

    def __post_init__(self):
        if self.tag not in TAGS:
            raise KeyError(f"unregistered random channel tag {self.tag!r}")

    def key(self):
        with np.errstate(over="ignore"):
            h = _mix(np.uint64(self.seed) + _GAMMA)
            h = _mix(h ^ tag_hash(self.tag))
            h = _mix(h ^ (_u64(self.user_id) + _GAMMA))
            return _mix(h ^ (_u64(self.day_index) + _GAMMA))


def _bits(channel: Channel, k):
    with np.errstate(over="ignore"):
        return _mix(channel.key() + (_u64(k) + np.uint64(1)) * _GAMMA)


def uniform(channel: Channel, k=0):
    """Uniform draw in [0, 1); pure function of (channel, k)."""
    return (_bits(channel, k) >> _S11).astype(np.float64) * _UNIT


def normal(channel: Channel, k=0, mean=0.0, sd=1.0):
    """Normal draw with the given mean and sd; ``sd == 0`` returns ``mean``."""
    sd = np.asarray(sd, dtype=np.float64)
    if np.any(sd < 0):
        raise ValueError("sd must be nonnegative")
    k = np.asarray(k, dtype=np.int64)
    u1 = uniform(channel, 2 * k)
    u2 = uniform(channel, 2 * k + 1)
    z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(_TWO_PI * u2)
    return np.where(sd == 0, mean, mean + sd * z)


def bernoulli(channel: Channel, k=0, p=0.5):
    """True with probability ``p``."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    return uniform(channel, k) < p


def categorical(channel: Channel, k=0, weights: Sequence[float] = (1.0,)):
    """Index ``i`` with probability ``weights[i] / sum(weights)``."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be a nonempty list of finite nonnegative numbers")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    edges = np.cumsum(w) / total
    idx = np.searchsorted(edges, uniform(channel, k), side="right")
    # guard against the last edge rounding below 1.0
    last = int(np.flatnonzero(w > 0)[-1])
    return np.minimum(idx, last)


def integers(channel: Channel, k, low, high):
    """Uniform integer in the inclusive range [low, high]."""
    low = np.asarray(low, dtype=np.int64)
    span = np.asarray(high, dtype=np.int64) - low + 1
    if np.any(span < 1):
        raise ValueError("empty integer range")
    return low + np.floor(uniform(channel, k) * span).astype(np.int64)


def poisson(channel: Channel, k=0, lam=1.0):
    """Poisson count by inverse-CDF search; ``lam`` must be < 700."""
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(lam < 0) or np.any(lam >= 700):
        raise ValueError("lam must lie in [0, 700)")
    u = uniform(channel, k)
    lam, u = np.broadcast_arrays(lam, u)
    p = np.exp(-lam)
    cdf = p.copy()
    count = np.zeros(lam.shape, dtype=np.int64)
    n = 0
    active = u >= cdf
    while np.any(active):
        n += 1
        p = p * lam / n
        cdf = cdf + p
        count += active
        active = active & (u >= cdf)
        if n > 2000:  # floating-point tail: cdf can stall just below u
            break
    return count if count.ndim else count[()]
