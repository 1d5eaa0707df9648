import pytest

from adaptive_lb.config import settings
from adaptive_lb.errors import UnknownPresetError
from adaptive_lb.presets import DESCRIPTIONS, PRESETS, preset, preset_names


def cell(spec, cell_id):
    return next(c for c in spec.cells if c.cell_id == cell_id)


def test_catalog_has_one_preset_per_experiment():
    assert len(preset_names()) == 11
    assert set(DESCRIPTIONS) == set(PRESETS)


@pytest.mark.parametrize("name", list(PRESETS))
def test_every_preset_builds(name):
    spec = preset(name, seeds=2)
    assert spec.name == name
    assert spec.seeds == (settings.BASE_SEED, settings.BASE_SEED + 1)
    for c in spec.cells:
        assert sum(g.size for g in c.config.groups) == c.config.agents == 100


def test_default_seed_count():
    assert len(preset("fig1-static").seeds) == settings.DEFAULT_SEEDS


def test_unknown_preset_lists_catalog():
    with pytest.raises(UnknownPresetError) as excinfo:
        preset("fig11")
    assert "fig8-minority-rules" in str(excinfo.value)
    assert excinfo.value.catalog == sorted(PRESETS)


def test_static_baselines():
    spec = preset("fig1-static", seeds=1)
    assert [c.cell_id for c in spec.cells] == [
        "load=lo,static=100-0-0-0-0",
        "load=hi,static=66-16-16-1-1",
        "load=peak,static=40-20-20-10-10",
    ]
    peak = spec.cells[2].config
    assert peak.load.kind == "fixed" and peak.load.fixed_level == "peak"
    assert [(g.size, g.rule) for g in peak.groups] == [
        (40, "static(0)"), (20, "static(1)"), (20, "static(2)"), (10, "static(3)"), (10, "static(4)"),
    ]


def test_homogeneous_grids_carry_references():
    fixed = preset("fig2-fixed-load", seeds=1)
    assert len(fixed.cells) == 3 * 9 + 1
    assert cell(fixed, "w=0.5,n=10").config.groups[0].rule == "omega(w=0.5, n=10)"
    assert cell(fixed, "w=0.5,n=10").config.load.fixed_level == "hi"

    random_load = preset("fig3-random-load", seeds=1)
    assert len(random_load.cells) == 3 * 9 + 2
    assert cell(random_load, "load_querying").config.load.kind == "random"
    assert [g.size for g in cell(random_load, "static=52-22-22-2-2").config.groups] == [52, 22, 22, 2, 2]

    pattern = preset("fig3-pattern-load", seeds=1)
    assert [c.cell_id for c in pattern.cells] == [c.cell_id for c in random_load.cells]
    assert all(c.config.load.kind == "pattern" for c in pattern.cells)

    rotating = preset("fig4-rotating-capacity", seeds=1)
    assert all(c.config.capacity.kind == "rotating" for c in rotating.cells)
    assert cell(rotating, "static=20-20-20-20-20").config.load.kind == "random"


def test_heterogeneous_sweeps_vary_the_second_group():
    half = preset("fig5-hetero-50-50", seeds=1)
    assert [c.cell_id for c in half.cells] == [f"g1.n={n}" for n in range(2, 11)]
    groups = cell(half, "g1.n=7").config.groups
    assert [(g.size, g.rule) for g in groups] == [(50, "omega(w=0.3, n=4)"), (50, "omega(w=0.3, n=7)")]

    minority = preset("fig6-hetero-90-10", seeds=1)
    assert [g.size for g in minority.cells[0].config.groups] == [90, 10]

    weights = preset("fig7-hetero-w", seeds=1)
    assert cell(weights, "g1.w=0.01").config.groups[1].rule == "omega(w=0.01, n=4)"
    assert len(weights.cells) == 8


def test_minority_rules():
    spec = preset("fig8-minority-rules", seeds=1)
    first = spec.cells[0].config
    assert [(g.size, g.rule, g.label) for g in first.groups] == [
        (90, "omega(w=0.3, n=4)", "majority"),
        (10, "omega(w=0.3, n=20)", "minority"),
    ]
    assert [c.config.groups[1].rule for c in spec.cells] == [
        "omega(w=0.3, n=20)", "omega(w=0.1, n=4)", "load_querying", "static(0)",
    ]
    assert first.load.kind == "random"


def test_communicating_sizes():
    spec = preset("fig9-cn-sizes", seeds=1)
    assert len(spec.cells) == 6 * 9
    cn20 = cell(spec, "cn=20,n=3").config
    assert [(n.size, n.count, n.communicating) for n in cn20.neighborhoods] == [(20, 5, True)]
    assert cn20.groups[0].rule == "omega(w=0.3, n=3)"
    assert cell(spec, "ncn,n=3").config.neighborhoods == []


def test_cn_against_ncn_rows():
    spec = preset("fig10-cn-vs-ncn", seeds=1)
    assert len(spec.cells) == 8
    fifth = spec.cells[4]
    assert fifth.cell_id == "ncn_n=10,cns=1"
    config = fifth.config
    assert [(g.size, g.rule) for g in config.groups] == [(80, "omega(w=0.3, n=10)"), (20, "omega(w=0.3, n=4)")]
    assert [(n.size, n.count, n.communicating) for n in config.neighborhoods] == [(80, 1, False), (20, 1, True)]
    assert [(n.size, n.count) for n in spec.cells[3].config.neighborhoods] == [(80, 1), (2, 10)]
