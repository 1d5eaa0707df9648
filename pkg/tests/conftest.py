"""Shared fixtures: short scenarios and hand-built simulation state"""

from typing import Callable

import numpy as np
import pytest

from adaptive_lb.logging_config import configure_logging
from adaptive_lb.models import Job, ResourceState
from adaptive_lb.scenario import ScenarioConfig, build_config


@pytest.fixture(autouse=True)
def _quiet_logging():
    # rebinds stderr for every test; CliRunner swaps the stream under us
    configure_logging("WARNING")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def make_config() -> Callable[..., ScenarioConfig]:
    """Scenario factory defaulting to a run of about two simulated hours"""

    def _make(**overrides) -> ScenarioConfig:
        data = {"name": "test", "warmup_weeks": 0, "measure_weeks": 0.0012, **overrides}
        return build_config(data)

    return _make


@pytest.fixture
def make_job() -> Callable[..., Job]:
    counter = iter(range(1_000_000))

    def _make(agent_id: int = 0, resource_id: int = 0, size: float = 100.0, t_start: int = 0, **extra) -> Job:
        return Job(
            job_id=next(counter),
            agent_id=agent_id,
            resource_id=resource_id,
            size=size,
            remaining=size,
            t_start=t_start,
            **extra,
        )

    return _make


@pytest.fixture
def make_resources(make_job) -> Callable[..., list]:
    """Resources with the given numbers of active jobs"""

    def _make(counts, capacity: float = 10.0):
        return [
            ResourceState(r, capacity, active_jobs=[make_job(resource_id=r) for _ in range(count)])
            for r, count in enumerate(counts)
        ]

    return _make
