"""
Adaptive Load Balancing - Sweep Service
Runs (cell, seed) combinations concurrently and assembles a deterministic CSV table
"""

from __future__ import annotations

import asyncio
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd
import structlog

from adaptive_lb.config import settings
from adaptive_lb.errors import ConfigValidationError, SweepCellError
from adaptive_lb.logging_config import configure_logging
from adaptive_lb.metrics_service import RunReport
from adaptive_lb.scenario import ScenarioConfig, apply_axis
from adaptive_lb.simulation_service import SimulationService

logger = structlog.get_logger(__name__)

DETAIL_COLUMNS = [
    "scenario",
    "seed",
    "group",
    "rule",
    "jobs_completed",
    "mean_tpt_x1000",
    "std_tpt_x1000",
    "agent_mean_tpt_x1000",
    "agent_std_tpt_x1000",
]
SUMMARY_SEED = "mean"
STAT_COLUMNS = DETAIL_COLUMNS[5:]


@dataclass(frozen=True)
class SweepCell:
    cell_id: str
    config: ScenarioConfig


@dataclass(frozen=True)
class SweepSpec:
    """Named list of scenario cells, each run once per seed"""
    name: str
    cells: tuple[SweepCell, ...]
    seeds: tuple[int, ...] = field(default=(0,))

    def __post_init__(self):
        if not self.cells:
            raise ConfigValidationError("cells", "a sweep needs at least one cell")
        if not self.seeds:
            raise ConfigValidationError("seeds", "a sweep needs at least one seed")
        ids = [cell.cell_id for cell in self.cells]
        if len(set(ids)) != len(ids):
            raise ConfigValidationError("cells", f"duplicate cell identifiers in {ids}")

    @classmethod
    def single(cls, config: ScenarioConfig, seeds: Sequence[int]) -> "SweepSpec":
        return cls(name=config.name, cells=(SweepCell("", config),), seeds=tuple(seeds))

    @classmethod
    def from_axes(
        cls,
        base: ScenarioConfig,
        axes: Dict[str, Sequence[float]],
        seeds: Sequence[int],
        name: Optional[str] = None,
        extra_cells: Iterable[SweepCell] = (),
    ) -> "SweepSpec":
        return cls(
            name=name or base.name,
            cells=tuple(axis_cells(base, axes)) + tuple(extra_cells),
            seeds=tuple(seeds),
        )

    def with_seeds(self, seeds: Sequence[int]) -> "SweepSpec":
        return SweepSpec(name=self.name, cells=self.cells, seeds=tuple(seeds))

    def scenario_name(self, cell: SweepCell) -> str:
        return f"{self.name}[{cell.cell_id}]" if cell.cell_id else self.name

    @property
    def runs(self) -> int:
        return len(self.cells) * len(self.seeds)


def _fmt_value(value: float) -> str:
    return f"{value:g}"


def axis_cells(base: ScenarioConfig, axes: Dict[str, Sequence[float]], prefix: str = "") -> List[SweepCell]:
    """Cross product of the axes, first axis varying slowest"""
    names = list(axes)
    cells = []
    for values in itertools.product(*(axes[axis] for axis in names)):
        config = base
        for axis, value in zip(names, values):
            config = apply_axis(config, axis, value)
        label = ",".join(f"{axis}={_fmt_value(value)}" for axis, value in zip(names, values))
        cells.append(SweepCell(",".join(filter(None, [prefix, label])), config))
    return cells


def _run_cell(config: ScenarioConfig, seed: int) -> RunReport:
    return SimulationService(config, seed=seed).run()


def _worker_init(level: str, json: bool) -> None:
    configure_logging(level, json)


def _report_rows(report: RunReport) -> List[dict]:
    return [
        {
            "scenario": report.scenario,
            "seed": report.seed,
            "group": row.group,
            "rule": row.rule,
            "jobs_completed": row.jobs_completed,
            "mean_tpt_x1000": row.mean_tpt_x1000,
            "std_tpt_x1000": row.std_tpt_x1000,
            "agent_mean_tpt_x1000": row.agent_mean_tpt_x1000,
            "agent_std_tpt_x1000": row.agent_std_tpt_x1000,
        }
        for row in report.rows()
    ]


def results_table(spec: SweepSpec, reports: Sequence[RunReport]) -> pd.DataFrame:
    """Detail rows for every run in (cell, seed) order, then one seed-averaged row per
    (scenario, group) when the sweep has more than one seed"""
    detail = pd.DataFrame(
        [row for report in reports for row in _report_rows(report)],
        columns=DETAIL_COLUMNS,
    ).astype({column: "float64" for column in STAT_COLUMNS})
    if len(spec.seeds) < 2:
        return detail

    summary = (
        detail.groupby(["scenario", "group", "rule"], sort=False)
        .agg({"jobs_completed": "mean", **{column: "mean" for column in STAT_COLUMNS}})
        .reset_index()
    )
    summary["jobs_completed"] = summary["jobs_completed"].round().astype("int64")
    summary["seed"] = SUMMARY_SEED
    return pd.concat([detail, summary[DETAIL_COLUMNS]], ignore_index=True)


def to_csv(table: pd.DataFrame) -> str:
    return table.to_csv(index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")


class SweepService:
    """Executes sweeps, in worker processes when more than one worker is allowed"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.workers
        logger.info("🧪 Sweep Service initialized", workers=self.workers)

    def _prepare(self, spec: SweepSpec) -> List[tuple[SweepCell, ScenarioConfig, int]]:
        return [
            (cell, cell.config.model_copy(update={"name": spec.scenario_name(cell)}), seed)
            for cell in spec.cells
            for seed in spec.seeds
        ]

    async def run_sweep(self, spec: SweepSpec) -> pd.DataFrame:
        plan = self._prepare(spec)
        logger.info("🧪 Sweep started", sweep=spec.name, cells=len(spec.cells), seeds=len(spec.seeds), runs=len(plan))

        if self.workers <= 1 or len(plan) == 1:
            reports = []
            for cell, config, seed in plan:
                try:
                    reports.append(_run_cell(config, seed))
                except Exception as e:
                    raise SweepCellError(spec.scenario_name(cell), seed, e) from e
        else:
            reports = await self._run_parallel(spec, plan)

        table = results_table(spec, reports)
        logger.info("✅ Sweep finished", sweep=spec.name, rows=len(table))
        return table

    async def _run_parallel(self, spec: SweepSpec, plan) -> List[RunReport]:
        loop = asyncio.get_running_loop()
        pool = ProcessPoolExecutor(
            max_workers=min(self.workers, len(plan)),
            initializer=_worker_init,
            initargs=(settings.LOG_LEVEL, settings.LOG_JSON),
        )

        async def guarded(cell: SweepCell, config: ScenarioConfig, seed: int) -> RunReport:
            try:
                return await loop.run_in_executor(pool, _run_cell, config, seed)
            except Exception as e:
                raise SweepCellError(spec.scenario_name(cell), seed, e) from e

        try:
            # results come back in submission order
            return list(await asyncio.gather(*(guarded(*entry) for entry in plan)))
        except SweepCellError:
            pool.shutdown(wait=False, cancel_futures=True)
            raise
        finally:
            pool.shutdown(wait=True)

    async def run_single(self, config: ScenarioConfig, seed: Optional[int] = None) -> pd.DataFrame:
        seed = config.seed if seed is None else seed
        return await self.run_sweep(SweepSpec.single(config, [seed]))


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> str:
    """Synchronous convenience wrapper returning CSV text"""
    return to_csv(asyncio.run(SweepService(workers).run_sweep(spec)))
