from collections import Counter

import numpy as np
import pytest

from adaptive_lb.environment import (
    BUSY_HOURS,
    ROTATION_BASE,
    CapacityKind,
    CapacitySchedule,
    Environment,
    JobSizeDistribution,
    LoadKind,
    LoadLevels,
    LoadProfile,
    _reduced_latin_squares,
    gen_capacity_rotation,
    gen_pattern_week,
    gen_random_week,
    uniform_latin_square,
)
from adaptive_lb.errors import ContractViolation
from adaptive_lb.models import DAY, HOUR, WEEK, LoadLevel


def environment(load: LoadKind = LoadKind.FIXED, capacity: CapacityKind = CapacityKind.FIXED, seed: int = 3):
    return Environment(
        LoadProfile(kind=load),
        CapacitySchedule(kind=capacity),
        np.random.SeedSequence(seed),
    )


def test_fixed_load_is_constant():
    env = environment()
    assert env.load_at(0) == 0.003
    assert env.load_at(3 * WEEK + 17 * HOUR + 5) == 0.003


def test_pattern_week_composition():
    week = gen_pattern_week(np.random.default_rng(1))
    assert len(week) == 168
    assert Counter(week) == {LoadLevel.LO: 118, LoadLevel.HI: 40, LoadLevel.PEAK: 10}

    for hour, level in enumerate(week):
        day, hour_of_day = divmod(hour, 24)
        busy = day < 5 and hour_of_day in BUSY_HOURS
        if not busy:
            assert level is LoadLevel.LO
        else:
            assert level in (LoadLevel.HI, LoadLevel.PEAK)
    for day in range(5):
        assert week[day * 24: (day + 1) * 24].count(LoadLevel.PEAK) == 2


def test_pattern_weekend_is_low():
    env = environment(load=LoadKind.PATTERN)
    assert env.load_at(5 * DAY + 3 * HOUR) == 0.001
    assert env.load_at(WEEK + 6 * DAY + 12 * HOUR) == 0.001


def test_random_week_composition():
    week = gen_random_week(np.random.default_rng(5))
    assert len(week) == 168
    assert Counter(week) == {LoadLevel.LO: 118, LoadLevel.HI: 40, LoadLevel.PEAK: 10}


def test_random_week_peak_positions_are_uniform():
    rng = np.random.default_rng(2024)
    weeks = 10_000
    counts = np.zeros(168)
    for _ in range(weeks):
        week = gen_random_week(rng)
        counts[[hour for hour, level in enumerate(week) if level is LoadLevel.PEAK]] += 1

    expected = weeks * 10 / 168
    chi_square = float(((counts - expected) ** 2 / expected).sum())
    # 167 degrees of freedom; the 0.999 quantile is about 227
    assert chi_square < 240


@pytest.mark.parametrize("generator", [gen_pattern_week, gen_random_week])
def test_week_generation_is_deterministic(generator):
    assert generator(np.random.default_rng(9)) == generator(np.random.default_rng(9))


def test_reduced_latin_square_counts():
    assert len(_reduced_latin_squares(4)) == 4
    assert len(_reduced_latin_squares(5)) == 56


def test_uniform_latin_square_is_latin(rng):
    for _ in range(50):
        square = uniform_latin_square(5, rng)
        for line in (*square, *square.T):
            assert sorted(line.tolist()) == [0, 1, 2, 3, 4]


def test_capacity_rotation_permutes_base(rng):
    matrix = gen_capacity_rotation(rng)
    assert matrix.shape == (5, 5)
    for line in (*matrix, *matrix.T):
        assert sorted(line.tolist()) == sorted(ROTATION_BASE)
    np.testing.assert_allclose(matrix.sum(axis=1), 100.0)


def test_capacity_rotation_is_deterministic():
    np.testing.assert_array_equal(
        gen_capacity_rotation(np.random.default_rng(4)),
        gen_capacity_rotation(np.random.default_rng(4)),
    )


def test_capacity_rotation_needs_five_resources(rng):
    with pytest.raises(ContractViolation):
        gen_capacity_rotation(rng, base=(40.0, 30.0, 30.0))
    with pytest.raises(ContractViolation):
        CapacitySchedule(kind=CapacityKind.ROTATING, values=(50.0, 50.0))


def test_fixed_capacity_lookup():
    env = environment()
    assert env.capacity_at(0, 0) == 40
    assert env.capacities_at(2 * WEEK + 5) == list(ROTATION_BASE)


def test_rotating_capacity_is_constant_within_a_day():
    env = environment(capacity=CapacityKind.ROTATING)
    for day in range(7):
        morning = env.capacities_at(day * DAY)
        evening = env.capacities_at(day * DAY + DAY - 1)
        assert morning == evening
        assert sum(morning) == pytest.approx(100.0)
    assert env.capacities_at(5 * DAY) == list(ROTATION_BASE)


def test_weeks_rematerialize_identically():
    env = environment(load=LoadKind.RANDOM, capacity=CapacityKind.ROTATING)
    first = env.materialize(2)
    env.week_for(0)
    again = env.materialize(2)
    assert first.load_labels == again.load_labels
    np.testing.assert_array_equal(first.capacities, again.capacities)
    assert env.materialize(3).load_labels != first.load_labels


def test_environment_streams_depend_on_seed():
    a = environment(load=LoadKind.RANDOM, seed=1).materialize(0)
    b = environment(load=LoadKind.RANDOM, seed=2).materialize(0)
    assert a.load_labels != b.load_labels


@pytest.mark.parametrize("levels", [(0.003, 0.001, 0.01), (0.001, 0.003, 1.5), (-0.1, 0.003, 0.01)])
def test_load_levels_must_be_ordered_probabilities(levels):
    with pytest.raises(ContractViolation):
        LoadLevels(*levels)


def test_job_sizes_are_integers_in_range(rng):
    sizes = [JobSizeDistribution().sample(rng) for _ in range(5000)]
    assert min(sizes) >= 50 and max(sizes) <= 150
    assert all(size.is_integer() for size in sizes)
    assert min(sizes) == 50 and max(sizes) == 150
