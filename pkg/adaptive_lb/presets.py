"""
Adaptive Load Balancing - Preset Catalog
Ready-made sweeps for the reference experiments: static baselines, homogeneous
adaptive grids, heterogeneous populations and communicating neighborhoods
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence

import structlog

from adaptive_lb.config import settings
from adaptive_lb.errors import UnknownPresetError
from adaptive_lb.scenario import GroupConfig, NeighborhoodConfig, ScenarioConfig, static_groups
from adaptive_lb.sweep_service import SweepCell, SweepSpec, axis_cells

logger = structlog.get_logger(__name__)

W_GRID = (0.1, 0.3, 0.5)
N_GRID = tuple(range(2, 11))
RANDOM_LOAD = {"kind": "random"}
PATTERN_LOAD = {"kind": "pattern"}


def _scenario(name: str, **overrides) -> ScenarioConfig:
    return ScenarioConfig.model_validate({"name": name, **overrides})


def _static_cell(configuration: Sequence[int], **overrides) -> SweepCell:
    label = "-".join(str(count) for count in configuration)
    groups = [group.model_dump() for group in static_groups(configuration)]
    return SweepCell(f"static={label}", _scenario("static", groups=groups, **overrides))


def _load_querying_cell(**overrides) -> SweepCell:
    return SweepCell("load_querying", _scenario("load_querying", groups=[{"size": 100, "rule": "load_querying"}], **overrides))


def _omega_grid(name: str, references: List[SweepCell], **overrides) -> SweepSpec:
    base = _scenario(name, **overrides)
    return SweepSpec(name=name, cells=tuple(axis_cells(base, {"w": W_GRID, "n": N_GRID})) + tuple(references))


def fig1_static() -> SweepSpec:
    best = {"lo": (100, 0, 0, 0, 0), "hi": (66, 16, 16, 1, 1), "peak": (40, 20, 20, 10, 10)}
    cells = []
    for level, configuration in best.items():
        cell = _static_cell(configuration, load={"kind": "fixed", "fixed_level": level})
        cells.append(SweepCell(f"load={level},{cell.cell_id}", cell.config))
    return SweepSpec(name="fig1-static", cells=tuple(cells))


def fig2_fixed_load() -> SweepSpec:
    load = {"kind": "fixed", "fixed_level": "hi"}
    return _omega_grid("fig2-fixed-load", [_static_cell((66, 16, 16, 1, 1), load=load)], load=load)


def _weekly_load_grid(name: str, load: dict) -> SweepSpec:
    return _omega_grid(
        name,
        [_static_cell((52, 22, 22, 2, 2), load=load), _load_querying_cell(load=load)],
        load=load,
    )


def fig3_random_load() -> SweepSpec:
    return _weekly_load_grid("fig3-random-load", RANDOM_LOAD)


def fig3_pattern_load() -> SweepSpec:
    return _weekly_load_grid("fig3-pattern-load", PATTERN_LOAD)


def fig4_rotating_capacity() -> SweepSpec:
    environment = {"load": RANDOM_LOAD, "capacity": {"kind": "rotating"}}
    return _omega_grid(
        "fig4-rotating-capacity",
        [_static_cell((20, 20, 20, 20, 20), **environment), _load_querying_cell(**environment)],
        **environment,
    )


def _two_populations(name: str, sizes: tuple[int, int], axis: str, values: Sequence[float]) -> SweepSpec:
    base = _scenario(
        name,
        load=RANDOM_LOAD,
        groups=[
            {"size": sizes[0], "rule": "omega(w=0.3, n=4)"},
            {"size": sizes[1], "rule": "omega(w=0.3, n=4)"},
        ],
    )
    return SweepSpec(name=name, cells=tuple(axis_cells(base, {axis: values})))


def fig5_hetero_50_50() -> SweepSpec:
    return _two_populations("fig5-hetero-50-50", (50, 50), "g1.n", N_GRID)


def fig6_hetero_90_10() -> SweepSpec:
    return _two_populations("fig6-hetero-90-10", (90, 10), "g1.n", N_GRID)


def fig7_hetero_w() -> SweepSpec:
    return _two_populations("fig7-hetero-w", (50, 50), "g1.w", (0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9))


def fig8_minority_rules() -> SweepSpec:
    minorities = {
        "omega-0.3-20": "omega(w=0.3, n=20)",
        "omega-0.1-4": "omega(w=0.1, n=4)",
        "load_querying": "load_querying",
        "static-0": "static(0)",
    }
    cells = [
        SweepCell(
            f"minority={label}",
            _scenario(
                "fig8-minority-rules",
                load=RANDOM_LOAD,
                groups=[
                    {"size": 90, "rule": "omega(w=0.3, n=4)", "label": "majority"},
                    {"size": 10, "rule": rule, "label": "minority"},
                ],
            ),
        )
        for label, rule in minorities.items()
    ]
    return SweepSpec(name="fig8-minority-rules", cells=tuple(cells))


def fig9_cn_sizes() -> SweepSpec:
    cells: List[SweepCell] = []
    for size in (2, 4, 5, 10, 20):
        base = _scenario(
            "fig9-cn-sizes",
            load=RANDOM_LOAD,
            groups=[{"size": 100, "rule": "omega(w=0.3, n=4)"}],
            neighborhoods=[{"size": size, "count": 100 // size, "communicating": True}],
        )
        cells.extend(axis_cells(base, {"n": N_GRID}, prefix=f"cn={size}"))
    baseline = _scenario("fig9-cn-sizes", load=RANDOM_LOAD)
    cells.extend(axis_cells(baseline, {"n": N_GRID}, prefix="ncn"))
    return SweepSpec(name="fig9-cn-sizes", cells=tuple(cells))


def fig10_cn_vs_ncn() -> SweepSpec:
    cells = []
    for ncn_n in (4, 10):
        for count in (1, 2, 5, 10):
            config = _scenario(
                "fig10-cn-vs-ncn",
                load=RANDOM_LOAD,
                groups=[
                    GroupConfig(size=80, rule=f"omega(w=0.3, n={ncn_n})", label="ncn").model_dump(),
                    GroupConfig(size=20, rule="omega(w=0.3, n=4)", label="cn").model_dump(),
                ],
                neighborhoods=[
                    NeighborhoodConfig(size=80).model_dump(),
                    NeighborhoodConfig(size=20 // count, count=count, communicating=True).model_dump(),
                ],
            )
            cells.append(SweepCell(f"ncn_n={ncn_n},cns={count}", config))
    return SweepSpec(name="fig10-cn-vs-ncn", cells=tuple(cells))


PRESETS: Dict[str, Callable[[], SweepSpec]] = {
    "fig1-static": fig1_static,
    "fig2-fixed-load": fig2_fixed_load,
    "fig3-random-load": fig3_random_load,
    "fig3-pattern-load": fig3_pattern_load,
    "fig4-rotating-capacity": fig4_rotating_capacity,
    "fig5-hetero-50-50": fig5_hetero_50_50,
    "fig6-hetero-90-10": fig6_hetero_90_10,
    "fig7-hetero-w": fig7_hetero_w,
    "fig8-minority-rules": fig8_minority_rules,
    "fig9-cn-sizes": fig9_cn_sizes,
    "fig10-cn-vs-ncn": fig10_cn_vs_ncn,
}

DESCRIPTIONS: Dict[str, str] = {
    "fig1-static": "best static configurations under fixed lo/hi/peak load",
    "fig2-fixed-load": "omega grid w x n under fixed hi load",
    "fig3-random-load": "omega grid under the random weekly load, static and load-querying references",
    "fig3-pattern-load": "the same grid under the weekday pattern load",
    "fig4-rotating-capacity": "omega grid with rotating capacities and random load",
    "fig5-hetero-50-50": "two groups of 50, second group's n swept",
    "fig6-hetero-90-10": "groups of 90 and 10, minority n swept",
    "fig7-hetero-w": "two groups of 50, second group's w swept",
    "fig8-minority-rules": "90 omega(0.3,4) agents against four minority rules",
    "fig9-cn-sizes": "all-communicating populations by neighborhood size",
    "fig10-cn-vs-ncn": "an 80-agent NCN beside 20 agents in CNs",
}


def preset_names() -> List[str]:
    return list(PRESETS)


def preset(name: str, seeds: Optional[int] = None) -> SweepSpec:
    """Build the named sweep with `seeds` consecutive seeds starting at BASE_SEED"""
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name, PRESETS) from None
    count = settings.DEFAULT_SEEDS if seeds is None else seeds
    spec = builder().with_seeds(range(settings.BASE_SEED, settings.BASE_SEED + count))
    logger.debug("📚 Preset built", preset=name, cells=len(spec.cells), seeds=count)
    return spec
