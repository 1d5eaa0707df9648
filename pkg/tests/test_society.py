import numpy as np
import pytest

from adaptive_lb.errors import ContractViolation
from adaptive_lb.rules import EfficiencyEstimator, omega_weights, parse_rule
from adaptive_lb.society import NeighborhoodSpec, Society, layout_neighborhoods, neighborhood_estimator, select_for_agent


def estimator(ee, jd) -> EfficiencyEstimator:
    return EfficiencyEstimator(ee=np.array(ee, dtype=float), jd=np.array(jd, dtype=np.int64))


def society(group_sizes=(100,), rules=("omega(w=0.3, n=4)",), specs=None, resources=2) -> Society:
    return Society.build(
        group_sizes=list(group_sizes),
        rules=[parse_rule(rule) for rule in rules],
        labels=[f"g{i}" for i in range(len(group_sizes))],
        neighborhood_specs=specs,
        resources=resources,
        default_history_weight=0.3,
    )


def test_singleton_view_equals_member():
    member = estimator([0.4, 0.2, 1.0], [2, 1, 0])
    view = neighborhood_estimator([member])
    np.testing.assert_array_equal(view.ee, member.ee)
    np.testing.assert_array_equal(view.jd, member.jd)


def test_view_averages_only_members_that_tried():
    view = neighborhood_estimator([estimator([0.1, 0.5], [1, 0]), estimator([0.3, 0.7], [2, 3])])
    np.testing.assert_allclose(view.ee, [0.2, 0.7])
    assert view.jd.tolist() == [3, 3]


def test_view_leaves_members_untouched():
    members = [estimator([0.1, 0.9], [1, 1]), estimator([0.9, 0.1], [1, 1])]
    neighborhood_estimator(members)
    assert members[0].ee.tolist() == [0.1, 0.9]


def test_majority_view_steers_the_whole_neighborhood():
    members = [estimator([0.1, 0.9], [1, 1]) for _ in range(9)] + [estimator([0.9, 0.1], [1, 1])]
    view = neighborhood_estimator(members)
    np.testing.assert_allclose(view.ee, [0.18, 0.82])
    assert omega_weights(view, n=4)[0] > 0.99


def test_empty_view_is_rejected():
    with pytest.raises(ContractViolation):
        neighborhood_estimator([])


def test_default_layout_is_one_ncn_per_group():
    neighborhoods = layout_neighborhoods([90, 10], [NeighborhoodSpec(90), NeighborhoodSpec(10)])
    assert [n.kind for n in neighborhoods] == ["NCN", "NCN"]

    built = society(group_sizes=(90, 10), rules=("omega(w=0.3, n=4)", "load_querying"))
    assert [(n.group_id, len(n.members)) for n in built.neighborhoods] == [(0, 90), (1, 10)]
    assert built.rule_for(built.agents[95]).spec() == "load_querying"


def test_layout_cuts_contiguous_blocks():
    neighborhoods = layout_neighborhoods([80, 20], [NeighborhoodSpec(80), NeighborhoodSpec(5, count=4, communicating=True)])
    assert len(neighborhoods) == 5
    assert neighborhoods[2].members == tuple(range(85, 90))
    assert all(n.group_id == 1 and n.kind == "CN" for n in neighborhoods[1:])


def test_layout_rejects_neighborhood_spanning_groups():
    with pytest.raises(ContractViolation, match="spans"):
        layout_neighborhoods([50, 50], [NeighborhoodSpec(40), NeighborhoodSpec(20), NeighborhoodSpec(40)])


def test_layout_must_cover_every_agent():
    with pytest.raises(ContractViolation, match="cover"):
        layout_neighborhoods([100], [NeighborhoodSpec(10, count=9)])


def test_feedback_updates_only_the_owner(make_job):
    built = society(specs=[NeighborhoodSpec(10, count=10, communicating=True)])
    agent = built.agents[3]
    job = make_job(agent_id=3, resource_id=1, size=100, t_start=0)
    job.t_stop = 4
    built.deliver_feedback(agent, job)

    assert agent.estimator.jd.tolist() == [0, 1]
    assert agent.estimator.ee[1] == pytest.approx(0.04)
    for other in built.agents:
        if other is not agent:
            assert other.estimator.jd.sum() == 0


def test_cn_member_selects_from_shared_view(rng):
    built = society(specs=[NeighborhoodSpec(10, count=10, communicating=True)])
    for member in built.agents[:10]:
        member.estimator.ee[:] = [0.1, 0.9]
        member.estimator.jd[:] = [1, 1]
    built.agents[0].estimator.ee[:] = [0.9, 0.1]

    picks = [select_for_agent(built.agents[0], built, [], rng) for _ in range(500)]
    assert np.mean(picks) < 0.05


def test_ncn_member_selects_from_own_estimator(rng):
    built = society()
    for member in built.agents[:10]:
        member.estimator.ee[:] = [0.1, 0.9]
        member.estimator.jd[:] = [1, 1]
    built.agents[0].estimator.ee[:] = [0.9, 0.1]

    picks = [select_for_agent(built.agents[0], built, [], rng) for _ in range(500)]
    assert np.mean(picks) > 0.95


def test_static_rule_ignores_neighborhood(rng):
    built = society(rules=("static(1)",), specs=[NeighborhoodSpec(50, count=2, communicating=True)])
    assert {select_for_agent(agent, built, [], rng) for agent in built.agents} == {1}
