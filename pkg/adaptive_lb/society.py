"""
Adaptive Load Balancing - Society
Rule-sharing population groups and (non-)communicating neighborhoods.
Agents of a communicating neighborhood choose resources from the average of
their members' estimators but each one learns only from its own jobs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import structlog

from adaptive_lb.errors import ContractViolation
from adaptive_lb.models import AgentState, Job, ResourceState
from adaptive_lb.rules import EfficiencyEstimator, SelectionRule, update_estimator

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class NeighborhoodSpec:
    size: int
    count: int = 1
    communicating: bool = False


@dataclass(frozen=True)
class PopulationGroup:
    group_id: int
    size: int
    rule: SelectionRule
    label: str
    first_agent: int

    @property
    def members(self) -> range:
        return range(self.first_agent, self.first_agent + self.size)


@dataclass(frozen=True)
class Neighborhood:
    neighborhood_id: int
    members: tuple[int, ...]
    communicating: bool
    group_id: int

    @property
    def kind(self) -> str:
        return "CN" if self.communicating else "NCN"


def layout_neighborhoods(group_sizes: Sequence[int], specs: Sequence[NeighborhoodSpec]) -> List[Neighborhood]:
    """Cut the agent index range into contiguous neighborhoods, in the order given.

    Every neighborhood must fall inside a single group so its members share a rule.
    """
    boundaries = np.cumsum(group_sizes)
    agents = int(boundaries[-1]) if len(boundaries) else 0
    total = sum(spec.size * spec.count for spec in specs)
    if total != agents:
        raise ContractViolation(f"neighborhoods cover {total} agents, expected {agents}")

    neighborhoods: List[Neighborhood] = []
    start = 0
    for spec in specs:
        for _ in range(spec.count):
            stop = start + spec.size
            group_id = int(np.searchsorted(boundaries, start, side="right"))
            if stop > boundaries[group_id]:
                raise ContractViolation(
                    f"neighborhood of agents {start}..{stop - 1} spans more than one group"
                )
            neighborhoods.append(
                Neighborhood(len(neighborhoods), tuple(range(start, stop)), spec.communicating, group_id)
            )
            start = stop
    return neighborhoods


def neighborhood_estimator(members: Sequence[EfficiencyEstimator]) -> EfficiencyEstimator:
    """Transient shared view: ee averaged over the members that tried each
    resource, jd summed. Nothing is stored and members are left untouched."""
    if not members:
        raise ContractViolation("a neighborhood needs at least one member")
    ee = np.stack([member.ee for member in members])
    jd = np.stack([member.jd for member in members])
    tried = jd > 0
    counts = tried.sum(axis=0)
    sums = (ee * tried).sum(axis=0)
    averaged = np.divide(sums, counts, out=np.ones(ee.shape[1]), where=counts > 0)
    return EfficiencyEstimator(ee=averaged, jd=jd.sum(axis=0))


class Society:
    """Agents, their groups and neighborhoods; fixed for the whole run"""

    def __init__(
        self,
        groups: Sequence[PopulationGroup],
        neighborhoods: Sequence[Neighborhood],
        resources: int,
        default_history_weight: float,
    ):
        self.groups = list(groups)
        self.neighborhoods = list(neighborhoods)
        self.resources = resources
        self.default_history_weight = default_history_weight

        self.agents: List[AgentState] = []
        for neighborhood in self.neighborhoods:
            for agent_id in neighborhood.members:
                self.agents.append(
                    AgentState(
                        agent_id=agent_id,
                        estimator=EfficiencyEstimator.fresh(resources),
                        group_id=neighborhood.group_id,
                        neighborhood_id=neighborhood.neighborhood_id,
                    )
                )
        self.agents.sort(key=lambda agent: agent.agent_id)

        logger.debug(
            "👥 Society initialized",
            agents=len(self.agents),
            groups=len(self.groups),
            communicating=sum(n.communicating for n in self.neighborhoods),
        )

    @classmethod
    def build(
        cls,
        group_sizes: Sequence[int],
        rules: Sequence[SelectionRule],
        labels: Sequence[str],
        neighborhood_specs: Optional[Sequence[NeighborhoodSpec]],
        resources: int,
        default_history_weight: float,
    ) -> "Society":
        groups = []
        first = 0
        for group_id, (size, rule, label) in enumerate(zip(group_sizes, rules, labels)):
            groups.append(PopulationGroup(group_id, size, rule, label, first))
            first += size
        # Without explicit neighborhoods every group is one non-communicating neighborhood
        specs = neighborhood_specs or [NeighborhoodSpec(size=size) for size in group_sizes]
        return cls(groups, layout_neighborhoods(group_sizes, specs), resources, default_history_weight)

    def rule_for(self, agent: AgentState) -> SelectionRule:
        return self.groups[agent.group_id].rule

    def estimator_for(self, agent: AgentState) -> EfficiencyEstimator:
        neighborhood = self.neighborhoods[agent.neighborhood_id]
        if not neighborhood.communicating:
            return agent.estimator
        return neighborhood_estimator([self.agents[member].estimator for member in neighborhood.members])

    def deliver_feedback(self, agent: AgentState, job: Job) -> None:
        """Only the owner's estimator learns from a completed job"""
        rule = self.rule_for(agent)
        w = rule.history_weight
        update_estimator(agent.estimator, job.feedback(), self.default_history_weight if w is None else w)


def select_for_agent(
    agent: AgentState,
    society: Society,
    resources: Sequence[ResourceState],
    rng: np.random.Generator,
) -> int:
    rule = society.rule_for(agent)
    estimator = society.estimator_for(agent) if rule.uses_estimator else agent.estimator
    return rule.select(estimator, resources, rng)
