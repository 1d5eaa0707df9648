"""
Adaptive Load Balancing - Metrics Service
Time-per-token statistics per population group and for the whole population
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import structlog

from adaptive_lb.models import Job

logger = structlog.get_logger(__name__)

GLOBAL_GROUP = "__global__"
SCALE = 1000.0  # reported figures are time per 1000 tokens


def time_per_token(job: Job) -> float:
    """T = (t_stop - t_start) / S"""
    return job.duration / job.size


@dataclass(frozen=True)
class GroupReport:
    group: str
    rule: str
    jobs_completed: int
    mean_tpt_x1000: Optional[float]
    std_tpt_x1000: Optional[float]
    agent_mean_tpt_x1000: Optional[float] = None
    agent_std_tpt_x1000: Optional[float] = None

    @property
    def empty(self) -> bool:
        return self.jobs_completed == 0


@dataclass(frozen=True)
class RunReport:
    scenario: str
    seed: int
    ticks: int
    groups: tuple[GroupReport, ...]
    overall: GroupReport

    @property
    def empty(self) -> bool:
        return self.overall.empty

    def rows(self) -> List[GroupReport]:
        return [*self.groups, self.overall]


@dataclass
class _RunningStats:
    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.total_sq += value * value

    def merge(self, other: "_RunningStats") -> "_RunningStats":
        return _RunningStats(self.count + other.count, self.total + other.total, self.total_sq + other.total_sq)

    @property
    def mean(self) -> Optional[float]:
        return self.total / self.count if self.count else None

    @property
    def std(self) -> Optional[float]:
        if not self.count:
            return None
        mean = self.total / self.count
        return math.sqrt(max(self.total_sq / self.count - mean * mean, 0.0))


def _scaled(value: Optional[float]) -> Optional[float]:
    return None if value is None else value * SCALE


@dataclass
class MetricsAccumulator:
    """Streaming time-per-token statistics; only jobs finishing after the warmup are kept"""
    group_labels: Sequence[str]
    group_rules: Sequence[str]
    agent_groups: Sequence[int]
    warmup_cutoff: int = 0
    _groups: List[_RunningStats] = field(init=False)
    _agent_count: np.ndarray = field(init=False)
    _agent_total: np.ndarray = field(init=False)

    def __post_init__(self):
        self._groups = [_RunningStats() for _ in self.group_labels]
        self._agent_count = np.zeros(len(self.agent_groups), dtype=np.int64)
        self._agent_total = np.zeros(len(self.agent_groups), dtype=np.float64)

    def record(self, job: Job) -> bool:
        if job.t_stop is None or job.t_stop <= self.warmup_cutoff:
            return False
        value = time_per_token(job)
        self._groups[self.agent_groups[job.agent_id]].add(value)
        self._agent_count[job.agent_id] += 1
        self._agent_total[job.agent_id] += value
        return True

    @property
    def count(self) -> int:
        return sum(stats.count for stats in self._groups)

    def _agent_means(self, members: np.ndarray) -> tuple[Optional[float], Optional[float]]:
        counts = self._agent_count[members]
        observed = counts > 0
        if not observed.any():
            return None, None
        means = self._agent_total[members][observed] / counts[observed]
        return float(means.mean()), float(means.std())

    def _row(self, label: str, rule: str, stats: _RunningStats, members: np.ndarray) -> GroupReport:
        agent_mean, agent_std = self._agent_means(members)
        return GroupReport(
            group=label,
            rule=rule,
            jobs_completed=stats.count,
            mean_tpt_x1000=_scaled(stats.mean),
            std_tpt_x1000=_scaled(stats.std),
            agent_mean_tpt_x1000=_scaled(agent_mean),
            agent_std_tpt_x1000=_scaled(agent_std),
        )

    def report(self, scenario: str, seed: int, ticks: int) -> RunReport:
        agent_groups = np.asarray(self.agent_groups)
        rows = tuple(
            self._row(label, rule, stats, np.flatnonzero(agent_groups == group_id))
            for group_id, (label, rule, stats) in enumerate(zip(self.group_labels, self.group_rules, self._groups))
        )

        combined = _RunningStats()
        for stats in self._groups:
            combined = combined.merge(stats)
        distinct_rules = sorted(set(self.group_rules))
        overall_rule = distinct_rules[0] if len(distinct_rules) == 1 else "mixed"
        overall = self._row(GLOBAL_GROUP, overall_rule, combined, np.arange(len(agent_groups)))

        if overall.empty:
            logger.warning("📭 No jobs recorded after warmup", scenario=scenario, seed=seed)
        return RunReport(scenario=scenario, seed=seed, ticks=ticks, groups=rows, overall=overall)


def report(acc: MetricsAccumulator, scenario: str = "", seed: int = 0, ticks: int = 0) -> RunReport:
    return acc.report(scenario, seed, ticks)
