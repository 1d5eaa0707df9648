"""
Adaptive Load Balancing - Environment
Hourly load profiles, daily capacity schedules and the job-size distribution.
Week schedules are generated from a per-week random stream, so any week can be
materialized on demand and always comes out the same for a given seed.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from adaptive_lb.errors import ContractViolation
from adaptive_lb.models import DAY, HOUR, HOURS_PER_WEEK, WEEK, WEEKDAYS, LoadLevel

logger = structlog.get_logger(__name__)

# Weekly hour composition shared by the pattern and random profiles
WEEK_COMPOSITION: Dict[LoadLevel, int] = {LoadLevel.LO: 118, LoadLevel.HI: 40, LoadLevel.PEAK: 10}
BUSY_HOURS = range(8, 18)  # the 10-hour L_hi block on weekdays
PEAK_HOURS_PER_DAY = 2
ROTATION_BASE: Tuple[float, ...] = (40.0, 20.0, 20.0, 10.0, 10.0)


class LoadKind(enum.Enum):
    FIXED = "fixed"
    PATTERN = "pattern"
    RANDOM = "random"


class CapacityKind(enum.Enum):
    FIXED = "fixed"
    ROTATING = "rotating"


@dataclass(frozen=True)
class LoadLevels:
    """Per-tick submission probabilities of the three load regimes"""
    lo: float = 0.001
    hi: float = 0.003
    peak: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi < self.peak <= 1.0:
            raise ContractViolation(
                f"load levels must satisfy 0 <= lo < hi < peak <= 1, got ({self.lo}, {self.hi}, {self.peak})"
            )

    def probability(self, level: LoadLevel) -> float:
        return {LoadLevel.LO: self.lo, LoadLevel.HI: self.hi, LoadLevel.PEAK: self.peak}[level]


@dataclass(frozen=True)
class LoadProfile:
    kind: LoadKind = LoadKind.FIXED
    levels: LoadLevels = field(default_factory=LoadLevels)
    fixed_level: LoadLevel = LoadLevel.HI


@dataclass(frozen=True)
class CapacitySchedule:
    kind: CapacityKind = CapacityKind.FIXED
    values: Tuple[float, ...] = ROTATION_BASE

    def __post_init__(self):
        if any(value < 0 for value in self.values):
            raise ContractViolation(f"capacities must be non-negative, got {list(self.values)}")
        if self.kind is CapacityKind.ROTATING and len(self.values) != len(ROTATION_BASE):
            raise ContractViolation(
                f"rotating capacities need exactly {len(ROTATION_BASE)} resources, got {len(self.values)}"
            )


@dataclass(frozen=True)
class JobSizeDistribution:
    """Uniform over the integers in [low, high]; sizes are returned as floats"""
    low: int = 50
    high: int = 150

    def __post_init__(self):
        if not 0 < self.low <= self.high:
            raise ContractViolation(f"job sizes need 0 < low <= high, got [{self.low}, {self.high}]")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.integers(self.low, self.high + 1))


# ---------------------------------------------------------------------------
# Week generators
# ---------------------------------------------------------------------------

def gen_pattern_week(rng: np.random.Generator) -> List[LoadLevel]:
    """Weekdays: L_hi during the busy block with two random L_peak hours; L_lo otherwise"""
    week = [LoadLevel.LO] * HOURS_PER_WEEK
    busy = np.array(BUSY_HOURS)
    for day in range(WEEKDAYS):
        for hour in BUSY_HOURS:
            week[day * 24 + hour] = LoadLevel.HI
        for hour in rng.choice(busy, size=PEAK_HOURS_PER_DAY, replace=False):
            week[day * 24 + int(hour)] = LoadLevel.PEAK
    return week


def gen_random_week(rng: np.random.Generator) -> List[LoadLevel]:
    """Uniform random arrangement of the weekly composition over the 168 hours"""
    labels = [level for level, hours in WEEK_COMPOSITION.items() for _ in range(hours)]
    order = rng.permutation(len(labels))
    return [labels[i] for i in order]


@lru_cache(maxsize=None)
def _reduced_latin_squares(order: int) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """All Latin squares of the given order whose first row and column are 0..order-1"""
    squares = []
    first_row = tuple(range(order))

    def extend(rows: List[Tuple[int, ...]]):
        if len(rows) == order:
            squares.append(tuple(rows))
            return
        leading = len(rows)
        for rest in itertools.permutations([s for s in range(order) if s != leading]):
            row = (leading,) + rest
            if all(row[c] != prev[c] for prev in rows for c in range(order)):
                extend(rows + [row])

    extend([first_row])
    return tuple(squares)


def uniform_latin_square(order: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random Latin square.

    Each Latin square is reached by exactly one (reduced square, column
    permutation, permutation of rows 1..order-1) triple.
    """
    reduced = _reduced_latin_squares(order)
    square = np.array(reduced[rng.integers(len(reduced))])
    square = square[:, rng.permutation(order)]
    row_order = np.concatenate(([0], 1 + rng.permutation(order - 1)))
    return square[row_order]


def gen_capacity_rotation(rng: np.random.Generator, base: Sequence[float] = ROTATION_BASE) -> np.ndarray:
    """5-day x M capacity matrix: every day is a permutation of base and every
    resource sees the whole base multiset over the five days"""
    if len(base) != WEEKDAYS:
        raise ContractViolation(f"capacity rotation needs {WEEKDAYS} resources, got {len(base)}")
    symbols = uniform_latin_square(WEEKDAYS, rng)
    return np.asarray(base, dtype=np.float64)[symbols]


# ---------------------------------------------------------------------------
# Materialized weeks and point lookups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaterializedWeek:
    week_index: int
    load_labels: Tuple[LoadLevel, ...]  # 168 hourly labels
    capacities: np.ndarray  # 7 days x M


def load_at(profile: LoadProfile, week: Optional[MaterializedWeek], tick: int) -> float:
    if profile.kind is LoadKind.FIXED:
        return profile.levels.probability(profile.fixed_level)
    if week is None or week.week_index != tick // WEEK:
        raise ContractViolation(f"load profile not materialized for tick {tick}")
    return profile.levels.probability(week.load_labels[(tick % WEEK) // HOUR])


def capacity_at(schedule: CapacitySchedule, week: Optional[MaterializedWeek], resource_id: int, tick: int) -> float:
    if schedule.kind is CapacityKind.FIXED:
        return schedule.values[resource_id]
    if week is None or week.week_index != tick // WEEK:
        raise ContractViolation(f"capacity schedule not materialized for tick {tick}")
    return float(week.capacities[(tick % WEEK) // DAY, resource_id])


class Environment:
    """Load profile and capacity schedule for one run, materialized week by week"""

    def __init__(self, profile: LoadProfile, schedule: CapacitySchedule, seed_seq: np.random.SeedSequence):
        self.profile = profile
        self.schedule = schedule
        self._seed_seq = seed_seq
        self._week: Optional[MaterializedWeek] = None

    @property
    def resources(self) -> int:
        return len(self.schedule.values)

    def week_rng(self, week_index: int) -> np.random.Generator:
        child = np.random.SeedSequence(
            entropy=self._seed_seq.entropy,
            spawn_key=tuple(self._seed_seq.spawn_key) + (week_index,),
        )
        return np.random.default_rng(child)

    def materialize(self, week_index: int) -> MaterializedWeek:
        rng = self.week_rng(week_index)

        if self.profile.kind is LoadKind.PATTERN:
            labels = gen_pattern_week(rng)
        elif self.profile.kind is LoadKind.RANDOM:
            labels = gen_random_week(rng)
        else:
            labels = [self.profile.fixed_level] * HOURS_PER_WEEK

        base = np.asarray(self.schedule.values, dtype=np.float64)
        capacities = np.tile(base, (7, 1))
        if self.schedule.kind is CapacityKind.ROTATING:
            capacities[:WEEKDAYS] = gen_capacity_rotation(rng, self.schedule.values)

        logger.debug("📅 Week materialized", week=week_index)
        return MaterializedWeek(week_index=week_index, load_labels=tuple(labels), capacities=capacities)

    def week_for(self, tick: int) -> MaterializedWeek:
        week_index = tick // WEEK
        if self._week is None or self._week.week_index != week_index:
            self._week = self.materialize(week_index)
        return self._week

    def load_at(self, tick: int) -> float:
        return load_at(self.profile, self.week_for(tick), tick)

    def capacity_at(self, resource_id: int, tick: int) -> float:
        return capacity_at(self.schedule, self.week_for(tick), resource_id, tick)

    def capacities_at(self, tick: int) -> List[float]:
        week = self.week_for(tick)
        return [capacity_at(self.schedule, week, r, tick) for r in range(self.resources)]
