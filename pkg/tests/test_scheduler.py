import pytest

from tetroncodes.scheduler import (
    STRATEGIES,
    Schedule,
    conflict_graph,
    latency_lower_bound,
    load_schedule,
    save_schedule,
    schedule,
    schedule_from_dict,
    schedule_to_dict,
    usage_table,
    verify_schedule,
)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_every_strategy_is_valid(steane, strategy):
    sched = schedule(steane, strategy)
    ok, why = verify_schedule(steane, sched)
    assert ok, why
    assert sched.latency >= latency_lower_bound(steane)


def test_phased_latencies(steane, color5, surface5):
    assert schedule(steane).latency == 13
    assert schedule(color5).latency <= 13
    assert schedule(surface5).latency <= 8
    assert schedule(steane, "sequential").latency == 13
    assert schedule(steane, "free").latency <= schedule(steane).latency


def test_phases_do_not_mix(steane):
    sched = schedule(steane)
    for rnd, ph in zip(sched.rounds, sched.phases):
        kinds = {steane.generators[i].kind for i in rnd}
        sets = {steane.generators[i].set_index > 0 for i in rnd}
        assert len(sets) == 1
        if ph.startswith("set0-"):
            assert kinds == {ph[-1]}


def test_violations_are_named(steane):
    sched = schedule(steane)
    merged = Schedule((sched.rounds[0] + sched.rounds[-1],) + sched.rounds[1:-1], sched.phases[:-1])
    ok, why = verify_schedule(steane, merged)
    assert not ok and "share tetron" in why
    missing = Schedule(sched.rounds[:-1], sched.phases[:-1])
    ok, why = verify_schedule(steane, missing)
    assert not ok and "never measured" in why
    dup = Schedule(sched.rounds + sched.rounds[:1], sched.phases + sched.phases[:1])
    assert not verify_schedule(steane, dup)[0]


def test_conflict_graph(steane):
    g = conflict_graph(steane)
    assert g.number_of_nodes() == 13
    for a, b in g.edges:
        assert steane.generators[a].tetrons & steane.generators[b].tetrons
    assert conflict_graph(steane, lambda i: i < 3).number_of_nodes() == 3


def test_round_trip_and_table(tmp_path, steane):
    sched = schedule(steane)
    assert schedule_from_dict(steane, schedule_to_dict(steane, sched)) == sched
    path = tmp_path / "s.json"
    save_schedule(steane, sched, path)
    assert load_schedule(steane, path) == sched
    table = usage_table(steane, sched).splitlines()
    assert len(table) == sched.latency + 1


def test_unknown_strategy(steane):
    with pytest.raises(ValueError):
        schedule(steane, "random")
