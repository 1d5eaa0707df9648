"""
Adaptive Load Balancing - Scenario Configuration
Validated description of one simulation run, loaded from TOML or JSON
"""

from __future__ import annotations

import itertools
import json
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from adaptive_lb.environment import (
    CapacityKind,
    CapacitySchedule,
    JobSizeDistribution,
    LoadKind,
    LoadLevels,
    LoadProfile,
)
from adaptive_lb.errors import ConfigValidationError, ContractViolation
from adaptive_lb.models import WEEK, LoadLevel
from adaptive_lb.rules import OmegaParams, OmegaRule, SelectionRule, parse_rule, static_assignment
from adaptive_lb.society import NeighborhoodSpec, layout_neighborhoods

logger = structlog.get_logger(__name__)

DEFAULT_RULE = "omega(w=0.3, n=4)"


class LoadConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["fixed", "pattern", "random"] = "fixed"
    fixed_level: Literal["lo", "hi", "peak"] = "hi"
    levels: List[float] = Field(default_factory=lambda: [0.001, 0.003, 0.01])

    @field_validator("levels")
    @classmethod
    def _check_levels(cls, levels: List[float]) -> List[float]:
        if len(levels) != 3:
            raise ValueError(f"expected three probabilities (lo, hi, peak), got {len(levels)}")
        LoadLevels(*levels)
        return levels

    def profile(self) -> LoadProfile:
        return LoadProfile(
            kind=LoadKind(self.kind),
            levels=LoadLevels(*self.levels),
            fixed_level=LoadLevel(self.fixed_level),
        )


class CapacityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["fixed", "rotating"] = "fixed"
    values: List[float] = Field(default_factory=lambda: [40.0, 20.0, 20.0, 10.0, 10.0])

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("at least one capacity is required")
        if any(value < 0 for value in values):
            raise ValueError(f"capacities must be non-negative, got {values}")
        if not any(value > 0 for value in values):
            raise ValueError("at least one capacity must be positive")
        return values

    def schedule(self) -> CapacitySchedule:
        return CapacitySchedule(kind=CapacityKind(self.kind), values=tuple(self.values))


class JobSizeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    low: int = Field(default=50, gt=0)
    high: int = Field(default=150, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "JobSizeConfig":
        if self.low > self.high:
            raise ValueError(f"low ({self.low}) must not exceed high ({self.high})")
        return self

    def distribution(self) -> JobSizeDistribution:
        return JobSizeDistribution(self.low, self.high)


class GroupConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    size: int = Field(gt=0)
    rule: str = DEFAULT_RULE
    label: Optional[str] = None

    @field_validator("rule")
    @classmethod
    def _canonical_rule(cls, rule: str) -> str:
        return parse_rule(rule).spec()

    @property
    def selection_rule(self) -> SelectionRule:
        return parse_rule(self.rule)


class NeighborhoodConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    size: int = Field(gt=0)
    count: int = Field(default=1, gt=0)
    communicating: bool = False

    def spec(self) -> NeighborhoodSpec:
        return NeighborhoodSpec(size=self.size, count=self.count, communicating=self.communicating)


class ScenarioConfig(BaseModel):
    """One simulation run: population, environment, seed and duration"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "scenario"
    agents: int = Field(default=100, gt=0)
    resources: int = Field(default=5, gt=0)
    capacity: CapacityConfig = Field(default_factory=CapacityConfig)
    load: LoadConfig = Field(default_factory=LoadConfig)
    job_size: JobSizeConfig = Field(default_factory=JobSizeConfig)
    groups: List[GroupConfig] = Field(default_factory=list)
    neighborhoods: List[NeighborhoodConfig] = Field(default_factory=list)
    seed: int = Field(default=0, ge=0)
    warmup_weeks: float = Field(default=1.0, ge=0)
    measure_weeks: float = Field(default=4.0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _default_population(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("groups"):
            data = {**data, "groups": [{"size": data.get("agents", 100), "rule": DEFAULT_RULE}]}
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioConfig":
        if len(self.capacity.values) != self.resources:
            raise ConfigValidationError(
                "capacity.values", f"expected {self.resources} capacities, got {len(self.capacity.values)}"
            )
        if self.capacity.kind == "rotating" and self.resources != 5:
            raise ConfigValidationError("capacity.kind", f"rotating capacities need 5 resources, got {self.resources}")
        zero = [r for r, value in enumerate(self.capacity.values) if value == 0]
        if zero:
            logger.warning("⚠️ Resources with zero capacity will never finish a job", resources=zero)

        total = sum(group.size for group in self.groups)
        if total != self.agents:
            raise ConfigValidationError("groups", f"group sizes sum to {total}, expected {self.agents}")
        for index, group in enumerate(self.groups):
            try:
                group.selection_rule.validate(self.resources)
            except ContractViolation as e:
                raise ConfigValidationError(f"groups.{index}.rule", str(e)) from e

        if self.neighborhoods:
            try:
                layout_neighborhoods([g.size for g in self.groups], [n.spec() for n in self.neighborhoods])
            except ContractViolation as e:
                raise ConfigValidationError("neighborhoods", str(e)) from e
        return self

    @property
    def warmup_ticks(self) -> int:
        return round(self.warmup_weeks * WEEK)

    @property
    def total_ticks(self) -> int:
        return self.warmup_ticks + round(self.measure_weeks * WEEK)

    def group_label(self, index: int) -> str:
        return self.groups[index].label or f"g{index}"

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return self.model_copy(update={"seed": seed})


# ---------------------------------------------------------------------------
# Building blocks used by presets and sweeps
# ---------------------------------------------------------------------------

def static_groups(configuration: Sequence[int]) -> List[GroupConfig]:
    """One static group per non-empty entry of a configuration vector"""
    assignment = static_assignment(configuration, sum(configuration))
    return [
        GroupConfig(size=len(list(members)), rule=f"static({resource_id})", label=f"res{resource_id}")
        for resource_id, members in itertools.groupby(assignment)
    ]


_GROUP_AXIS_RE = re.compile(r"^g(?P<index>\d+)\.(?P<param>[wn])$")


def apply_axis(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    """Set w or n on every Omega group (`w`, `n`) or on group i only (`g<i>.w`, `g<i>.n`)"""
    match = _GROUP_AXIS_RE.match(axis)
    if match:
        targets = {int(match.group("index"))}
        param = match.group("param")
        if max(targets) >= len(config.groups):
            raise ConfigValidationError("axis", f"axis {axis} names a group the scenario does not have")
    elif axis in ("w", "n"):
        targets = set(range(len(config.groups)))
        param = axis
    else:
        raise ConfigValidationError("axis", f"unknown sweep axis '{axis}' (use w, n, g<i>.w or g<i>.n)")

    groups = []
    touched = False
    for index, group in enumerate(config.groups):
        rule = group.selection_rule
        if index in targets and isinstance(rule, OmegaRule):
            params = {"w": rule.params.w, "n": rule.params.n, param: value}
            try:
                rule = OmegaRule(OmegaParams(**params))
            except ContractViolation as e:
                raise ConfigValidationError("axis", f"{axis}={value}: {e}") from e
            group = group.model_copy(update={"rule": rule.spec()})
            touched = True
        groups.append(group)
    if not touched:
        raise ConfigValidationError("axis", f"axis {axis} matches no omega group")
    return config.model_copy(update={"groups": groups})


def _format_errors(error: ValidationError) -> ConfigValidationError:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "config"
    return ConfigValidationError(field, first["msg"])


def build_config(data: Dict[str, Any]) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise _format_errors(e) from e


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a TOML (default) or JSON scenario file; an empty file yields the default setting"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigValidationError("file", f"cannot read {path}: {e}") from e

    try:
        if not text.strip():
            data: Dict[str, Any] = {}
        elif path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigValidationError("file", f"cannot parse {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigValidationError("file", f"{path} must contain a table of keys")
    data.setdefault("name", path.stem)
    config = build_config(data)
    logger.info("📄 Scenario loaded", path=str(path), scenario=config.name)
    return config
