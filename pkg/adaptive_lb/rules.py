"""
Adaptive Load Balancing - Resource Selection Rules
The Omega family (history weight w, bias exponent n), the best-choice rule,
static configuration vectors and the load-querying benchmark
"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar, List, Optional, Sequence

import numpy as np

from adaptive_lb.errors import ContractViolation
from adaptive_lb.models import Feedback

if TYPE_CHECKING:
    from adaptive_lb.models import ResourceState


@dataclass
class EfficiencyEstimator:
    """Per-agent learning state: estimated time-per-token (ee) and completed-job counts (jd)"""
    ee: np.ndarray
    jd: np.ndarray

    @classmethod
    def fresh(cls, resources: int) -> "EfficiencyEstimator":
        # ee of an untried resource is never read; 1.0 keeps every entry positive
        return cls(ee=np.ones(resources, dtype=np.float64), jd=np.zeros(resources, dtype=np.int64))

    @property
    def size(self) -> int:
        return len(self.ee)

    @property
    def tried(self) -> np.ndarray:
        return self.jd > 0

    def untried_value(self) -> float:
        """E[ee]: mean estimate over tried resources"""
        return float(self.ee[self.tried].mean())


def update_estimator(est: EfficiencyEstimator, feedback: Feedback, w: float) -> EfficiencyEstimator:
    """Fold one completed job into the estimator.

    jd(R) is incremented first, so the first feedback on R has W = 1 and
    overwrites whatever ee(R) held before.
    """
    if feedback.size <= 0:
        raise ContractViolation(f"job size must be positive, got {feedback.size}")
    duration = feedback.t_stop - feedback.t_start
    if duration <= 0:
        raise ContractViolation(f"job duration must be positive, got {duration}")

    r = feedback.resource_id
    T = duration / feedback.size
    est.jd[r] += 1
    W = w + (1.0 - w) / est.jd[r]
    est.ee[r] = W * T + (1.0 - W) * est.ee[r]
    return est


def omega_weights(est: EfficiencyEstimator, n: float) -> np.ndarray:
    """Selection distribution pd over resources, proportional to ee^-n.

    Untried resources are valued at E[ee]. Computed in log space so large n
    neither overflows nor underflows.
    """
    tried = est.tried
    if not tried.any():
        raise ContractViolation("omega_weights needs at least one tried resource")
    tried_ee = est.ee[tried]
    if (tried_ee <= 0).any():
        raise ContractViolation(f"efficiency estimates must be positive, got {est.ee.tolist()}")

    log_ee = np.full(est.size, math.log(tried_ee.mean()))
    log_ee[tried] = np.log(tried_ee)
    logits = -n * log_ee
    logits -= logits.max()
    weights = np.exp(logits)
    return weights / weights.sum()


def _sample(pd: np.ndarray, rng: np.random.Generator) -> int:
    index = int(np.searchsorted(np.cumsum(pd), rng.random(), side="right"))
    return min(index, len(pd) - 1)


def _pick_uniform(candidates: np.ndarray, rng: np.random.Generator) -> int:
    if len(candidates) == 1:
        return int(candidates[0])
    return int(candidates[rng.integers(len(candidates))])


def omega_select(est: EfficiencyEstimator, n: float, rng: np.random.Generator) -> int:
    if not est.tried.any():
        return int(rng.integers(est.size))
    return _sample(omega_weights(est, n), rng)


def bcsr_select(est: EfficiencyEstimator, rng: np.random.Generator) -> int:
    tried = est.tried
    if not tried.any():
        return int(rng.integers(est.size))
    values = np.where(tried, est.ee, est.untried_value())
    return _pick_uniform(np.flatnonzero(values == values.min()), rng)


def load_query_select(resources: Sequence["ResourceState"], rng: np.random.Generator) -> int:
    loads = np.fromiter((resource.load for resource in resources), dtype=np.int64, count=len(resources))
    return _pick_uniform(np.flatnonzero(loads == loads.min()), rng)


def static_assignment(configuration: Sequence[int], agents: int) -> List[int]:
    """Expand a configuration vector into a per-agent resource list, in agent-index order"""
    if any(count < 0 for count in configuration):
        raise ContractViolation(f"configuration entries must be non-negative, got {list(configuration)}")
    if sum(configuration) != agents:
        raise ContractViolation(
            f"configuration {list(configuration)} assigns {sum(configuration)} agents, expected {agents}"
        )
    assignment: List[int] = []
    for resource_id, count in enumerate(configuration):
        assignment.extend([resource_id] * count)
    return assignment


# ---------------------------------------------------------------------------
# Rule variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaParams:
    w: float
    n: float

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ContractViolation(f"w must lie in [0, 1], got {self.w}")
        if not self.n > 0:
            raise ContractViolation(f"n must be positive, got {self.n}")


class SelectionRule(ABC):
    """How an agent picks a resource for each new job"""

    kind: ClassVar[str]
    uses_estimator: ClassVar[bool] = False

    @property
    def history_weight(self) -> Optional[float]:
        """w used when folding feedback into the estimator; None means the settings default"""
        return None

    @abstractmethod
    def select(
        self,
        estimator: EfficiencyEstimator,
        resources: Sequence["ResourceState"],
        rng: np.random.Generator,
    ) -> int:
        ...

    @abstractmethod
    def spec(self) -> str:
        """Canonical text form, parseable by parse_rule"""

    def validate(self, resources: int) -> None:
        pass

    def __str__(self) -> str:
        return self.spec()


def _fmt(value: float) -> str:
    return f"{value:g}"


@dataclass(frozen=True)
class OmegaRule(SelectionRule):
    params: OmegaParams

    kind: ClassVar[str] = "omega"
    uses_estimator: ClassVar[bool] = True

    @property
    def history_weight(self) -> Optional[float]:
        return self.params.w

    def select(self, estimator, resources, rng) -> int:
        return omega_select(estimator, self.params.n, rng)

    def spec(self) -> str:
        return f"omega(w={_fmt(self.params.w)}, n={_fmt(self.params.n)})"


@dataclass(frozen=True)
class BestChoiceRule(SelectionRule):
    w: float = 0.3

    kind: ClassVar[str] = "bcsr"
    uses_estimator: ClassVar[bool] = True

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ContractViolation(f"w must lie in [0, 1], got {self.w}")

    @property
    def history_weight(self) -> Optional[float]:
        return self.w

    def select(self, estimator, resources, rng) -> int:
        return bcsr_select(estimator, rng)

    def spec(self) -> str:
        return "bcsr" if self.w == 0.3 else f"bcsr(w={_fmt(self.w)})"


@dataclass(frozen=True)
class StaticRule(SelectionRule):
    resource_id: int

    kind: ClassVar[str] = "static"

    def validate(self, resources: int) -> None:
        if not 0 <= self.resource_id < resources:
            raise ContractViolation(f"static resource {self.resource_id} out of range [0, {resources})")

    def select(self, estimator, resources, rng) -> int:
        return self.resource_id

    def spec(self) -> str:
        return f"static({self.resource_id})"


@dataclass(frozen=True)
class LoadQueryingRule(SelectionRule):
    kind: ClassVar[str] = "load_querying"

    def select(self, estimator, resources, rng) -> int:
        return load_query_select(resources, rng)

    def spec(self) -> str:
        return "load_querying"


_RULE_RE = re.compile(r"^\s*(?P<kind>[a-z_-]+)\s*(?:\((?P<args>[^)]*)\))?\s*$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _parse_args(text: str) -> tuple[list[float], dict[str, float]]:
    positional: list[float] = []
    named: dict[str, float] = {}
    for part in filter(None, (chunk.strip() for chunk in text.split(","))):
        key, sep, value = part.partition("=")
        raw = value.strip() if sep else key.strip()
        if not _NUMBER_RE.match(raw):
            raise ContractViolation(f"expected a number, got '{raw}'")
        if sep:
            named[key.strip()] = float(raw)
        else:
            positional.append(float(raw))
    return positional, named


def parse_rule(text: str) -> SelectionRule:
    """Parse `omega(w=0.3, n=4)`, `bcsr`, `bcsr(w=0.1)`, `static(0)` or `load_querying`"""
    match = _RULE_RE.match(text)
    if not match:
        raise ContractViolation(f"cannot parse selection rule '{text}'")
    kind = match.group("kind")
    positional, named = _parse_args(match.group("args") or "")

    if kind == "omega":
        if positional:
            if len(positional) != 2 or named:
                raise ContractViolation(f"omega takes (w, n), got '{text}'")
            w, n = positional
        else:
            unknown = set(named) - {"w", "n"}
            if unknown or not {"w", "n"} <= set(named):
                raise ContractViolation(f"omega needs exactly w and n, got '{text}'")
            w, n = named["w"], named["n"]
        return OmegaRule(OmegaParams(w=w, n=n))

    if kind == "bcsr":
        unknown = set(named) - {"w"}
        if unknown or len(positional) > 1:
            raise ContractViolation(f"bcsr takes an optional w, got '{text}'")
        w = positional[0] if positional else named.get("w", 0.3)
        return BestChoiceRule(w=w)

    if kind == "static":
        if len(positional) != 1 or named or not positional[0].is_integer():
            raise ContractViolation(f"static takes one resource index, got '{text}'")
        return StaticRule(int(positional[0]))

    if kind in ("load_querying", "load-querying"):
        if positional or named:
            raise ContractViolation(f"load_querying takes no arguments, got '{text}'")
        return LoadQueryingRule()

    raise ContractViolation(f"unknown selection rule '{kind}'")
