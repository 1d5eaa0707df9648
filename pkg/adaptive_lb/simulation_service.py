"""
Adaptive Load Balancing - Simulation Service
Tick loop and job lifecycle: submission, equal token sharing, completion and
feedback to the selection rules
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional

import numpy as np
import structlog

from adaptive_lb.config import settings
from adaptive_lb.environment import Environment
from adaptive_lb.metrics_service import MetricsAccumulator, RunReport
from adaptive_lb.models import HOUR, AgentState, Job, ResourceState, SimulationState
from adaptive_lb.scenario import ScenarioConfig
from adaptive_lb.society import Society, select_for_agent

logger = structlog.get_logger(__name__)


class SimulationService:
    """One seeded run of a scenario.

    Randomness comes from four streams spawned from the seed: environment
    schedules, submission draws, job sizes and rule decisions. Each tick runs
    capacity/load refresh, submissions, service, completions, in that order.
    """

    def __init__(self, config: ScenarioConfig, seed: Optional[int] = None, record_trace: bool = False):
        self.config = config
        self.seed = config.seed if seed is None else seed

        env_seq, submit_seq, size_seq, rule_seq = np.random.SeedSequence(self.seed).spawn(4)
        self.environment = Environment(config.load.profile(), config.capacity.schedule(), env_seq)
        self.job_sizes = config.job_size.distribution()
        self._submit_rng = np.random.default_rng(submit_seq)
        self._size_rng = np.random.default_rng(size_seq)

        rules = [group.selection_rule for group in config.groups]
        labels = [config.group_label(i) for i in range(len(config.groups))]
        self.society = Society.build(
            group_sizes=[group.size for group in config.groups],
            rules=rules,
            labels=labels,
            neighborhood_specs=[n.spec() for n in config.neighborhoods] or None,
            resources=config.resources,
            default_history_weight=settings.DEFAULT_HISTORY_WEIGHT,
        )

        metrics = MetricsAccumulator(
            group_labels=labels,
            group_rules=[rule.spec() for rule in rules],
            agent_groups=[agent.group_id for agent in self.society.agents],
            warmup_cutoff=config.warmup_ticks,
        )
        self.state = SimulationState(
            tick=0,
            agents=self.society.agents,
            resources=[ResourceState(r, capacity) for r, capacity in enumerate(config.capacity.values)],
            rng=np.random.default_rng(rule_seq),
            metrics=metrics,
        )

        self.trace: Optional[List[Job]] = [] if record_trace else None
        self.min_share_observed = math.inf
        self.submission_probability = 0.0
        self._block_start: Optional[int] = None
        self._candidates: Dict[int, List[int]] = {}
        self._starved: set[int] = set()

    # ------------------------------------------------------------------
    # Tick phases
    # ------------------------------------------------------------------

    def _refresh(self, tick: int) -> None:
        """Read capacities and load for the hour and draw the hour's submission uniforms"""
        for resource, capacity in zip(self.state.resources, self.environment.capacities_at(tick)):
            resource.capacity = capacity
        self.submission_probability = self.environment.load_at(tick)

        # One uniform per agent per tick; only idle agents consult theirs
        uniforms = self._submit_rng.random((HOUR, len(self.state.agents)))
        rows, cols = np.nonzero(uniforms < self.submission_probability)
        self._candidates = {}
        for row, col in zip(rows.tolist(), cols.tolist()):
            self._candidates.setdefault(row, []).append(col)
        self._block_start = tick - tick % HOUR

    def _submit(self, agent: AgentState, tick: int) -> None:
        state = self.state
        size = self.job_sizes.sample(self._size_rng)
        resource_id = select_for_agent(agent, self.society, state.resources, state.rng)
        job = Job(
            job_id=state.next_job_id,
            agent_id=agent.agent_id,
            resource_id=resource_id,
            size=size,
            remaining=size,
            t_start=tick,
        )
        state.next_job_id += 1
        agent.engage(job)
        state.resources[resource_id].active_jobs.append(job)

    def _serve(self) -> List[Job]:
        finished: List[Job] = []
        for resource in self.state.resources:
            jobs = resource.active_jobs
            if not jobs:
                resource.served_last_tick = 0.0
                continue
            if resource.capacity <= 0:
                if resource.resource_id not in self._starved:
                    self._starved.add(resource.resource_id)
                    logger.warning(
                        "⚠️ Resource has active jobs but no capacity",
                        resource=resource.resource_id,
                        tick=self.state.tick,
                    )
                resource.served_last_tick = 0.0
                continue

            share = resource.capacity / len(jobs)
            self.min_share_observed = min(self.min_share_observed, share)
            for job in jobs:
                job.remaining -= share
                job.received += share
            resource.served_last_tick = share * len(jobs)

            if any(job.satisfied for job in jobs):
                finished.extend(job for job in jobs if job.satisfied)
                resource.active_jobs = [job for job in jobs if not job.satisfied]
        return finished

    def _complete(self, job: Job, tick: int) -> None:
        agent = self.state.agents[job.agent_id]
        job.t_stop = tick + 1
        agent.release()
        self.society.deliver_feedback(agent, job)
        self.state.metrics.record(job)
        if self.trace is not None:
            self.trace.append(job)

    def tick(self) -> SimulationState:
        state = self.state
        t = state.tick

        if self._block_start is None or t % HOUR == 0:
            self._refresh(t)

        for agent_id in self._candidates.get(t - self._block_start, ()):
            agent = state.agents[agent_id]
            if agent.idle:
                self._submit(agent, t)

        finished = self._serve()
        if finished:
            finished.sort(key=lambda job: job.agent_id)
            for job in finished:
                self._complete(job, t)

        state.tick = t + 1
        return state

    # ------------------------------------------------------------------
    # Whole runs
    # ------------------------------------------------------------------

    def run_until(self, tick: int) -> SimulationState:
        while self.state.tick < tick:
            self.tick()
        return self.state

    def run(self) -> RunReport:
        config = self.config
        total = config.total_ticks
        logger.info(
            "🚦 Simulation started",
            scenario=config.name,
            seed=self.seed,
            ticks=total,
            groups=len(config.groups),
        )
        self.run_until(total)
        report = self.state.metrics.report(config.name, self.seed, total)
        logger.info(
            "🏁 Simulation finished",
            scenario=config.name,
            seed=self.seed,
            jobs=report.overall.jobs_completed,
            mean_tpt_x1000=report.overall.mean_tpt_x1000,
        )
        return report


def run(config: ScenarioConfig, seed: Optional[int] = None) -> RunReport:
    return SimulationService(config, seed=seed).run()
