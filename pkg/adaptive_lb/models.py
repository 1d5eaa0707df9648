"""
Adaptive Load Balancing - Simulation State Models
Jobs, agents, resources and the time units of the tick clock
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional

import numpy as np

if TYPE_CHECKING:
    from adaptive_lb.metrics_service import MetricsAccumulator
    from adaptive_lb.rules import EfficiencyEstimator

# 1 tick = 1 second
HOUR = 3600
DAY = 24 * HOUR
WEEK = 7 * DAY
HOURS_PER_WEEK = 168
WEEKDAYS = 5

# completion threshold on remaining tokens, relative to job size
COMPLETION_TOLERANCE = 1e-9


class AgentStatus(enum.Enum):
    IDLE = "idle"
    ENGAGED = "engaged"


class LoadLevel(enum.Enum):
    LO = "lo"
    HI = "hi"
    PEAK = "peak"


@dataclass(slots=True)
class Job:
    """One submitted unit of work"""
    job_id: int
    agent_id: int
    resource_id: int
    size: float
    remaining: float
    t_start: int
    t_stop: Optional[int] = None
    received: float = 0.0  # tokens delivered so far, excess included

    @property
    def completed(self) -> bool:
        return self.t_stop is not None

    @property
    def satisfied(self) -> bool:
        """All size tokens delivered"""
        return self.remaining <= COMPLETION_TOLERANCE * self.size

    @property
    def duration(self) -> int:
        if self.t_stop is None:
            raise ValueError(f"Job {self.job_id} has not completed")
        return self.t_stop - self.t_start

    def feedback(self) -> "Feedback":
        if self.t_stop is None:
            raise ValueError(f"Job {self.job_id} has not completed")
        return Feedback(self.resource_id, self.t_start, self.t_stop, self.size)


@dataclass(frozen=True, slots=True)
class Feedback:
    """What an agent learns when its job completes: (r, t_start, t_stop, S)"""
    resource_id: int
    t_start: int
    t_stop: int
    size: float


@dataclass(slots=True)
class ResourceState:
    resource_id: int
    capacity: float
    active_jobs: List[Job] = field(default_factory=list)
    served_last_tick: float = 0.0

    @property
    def load(self) -> int:
        return len(self.active_jobs)


@dataclass(slots=True)
class AgentState:
    agent_id: int
    estimator: "EfficiencyEstimator"
    group_id: int
    neighborhood_id: int
    status: AgentStatus = AgentStatus.IDLE
    current_job: Optional[Job] = None

    @property
    def idle(self) -> bool:
        return self.status is AgentStatus.IDLE

    def engage(self, job: Job) -> None:
        if self.current_job is not None:
            raise ValueError(f"Agent {self.agent_id} already has job {self.current_job.job_id} outstanding")
        self.current_job = job
        self.status = AgentStatus.ENGAGED

    def release(self) -> None:
        self.current_job = None
        self.status = AgentStatus.IDLE


@dataclass
class SimulationState:
    tick: int
    agents: List[AgentState]
    resources: List[ResourceState]
    rng: np.random.Generator  # rule decisions
    metrics: "MetricsAccumulator"
    next_job_id: int = 0
