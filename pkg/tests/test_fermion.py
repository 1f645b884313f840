import json

import pytest

from tetroncodes.codes import build_bosonic
from tetroncodes.factory import PickSearchFailed, build_fermion_code, search_pick
from tetroncodes.fermion import (
    EnumerationBudgetExceeded,
    b_to_f,
    bosonic_fermionic_alias,
    code_from_dict,
    code_to_dict,
    default_pick,
    load_code,
    min_logical_weight,
    save_code,
    verify_code,
)
from tetroncodes.majorana import MajoranaOp, commutes, tetron_op
from tetroncodes.scheduler import schedule


def test_steane_parameters(steane):
    assert steane.param_string() == "⟦14,1,6_f⟧"
    assert len(steane.generators) == 13
    assert len(steane.set0_indices()) == 6
    assert len(steane.seti_indices()) == 7
    assert steane.validate() == []


def test_set_i_pairs_with_set0(steane):
    s0 = {g.base_index: g for g in steane.generators if g.set_index == 0}
    for g in steane.generators:
        if g.set_index:
            assert g.op * s0[g.base_index].op == tetron_op(g.set_index, steane.layout)
            switched = [t for t in g.terms if t.rep == "R'"]
            assert [t.qubit for t in switched] == [g.set_index]


def test_single_mzm_errors_are_detected(steane, surface5):
    for code in (steane, surface5):
        assert all(col != 0 for col in code.mzm_syndrome_columns())


def test_tetrons_in_stabilizer_group(steane):
    for q in range(1, 8):
        assert steane.in_stabilizer_group(tetron_op(q, steane.layout))
    assert not steane.in_stabilizer_group(steane.layout.gamma(1, "a") * steane.layout.gamma(2, "a"))


def test_logicals_commute_and_pair(steane):
    ops = {lg.name: lg.op for lg in steane.logicals}
    for lg in steane.logicals:
        assert all(commutes(lg.op, g.op) for g in steane.generators)
        assert not steane.in_stabilizer_group(lg.op)
    assert not commutes(ops["X"], ops["Z"])


def test_min_logical_weight_steane(steane):
    assert min_logical_weight(steane, 4) is None
    assert min_logical_weight(steane, 6) == 6


def test_enumeration_budget(color5):
    with pytest.raises(EnumerationBudgetExceeded):
        min_logical_weight(color5, 10, budget=1000)


def test_fermionic_alias(steane):
    lay = steane.layout
    rows = steane.set0_indices()
    for q in range(1, 8):
        for loc in "abc":
            single = lay.gamma(q, loc)
            alias = bosonic_fermionic_alias(lay, q, loc)
            assert alias.weight == 2
            assert (steane.syndrome(single, rows) == steane.syndrome(alias, rows)).all()
        assert not steane.syndrome(lay.gamma(q, "d"), rows).any()
    with pytest.raises(ValueError):
        bosonic_fermionic_alias(lay, 1, "x")


def test_pick_validation():
    base = build_bosonic("color", 3)
    pick = default_pick(base)
    bad = dict(pick)
    bad[1] = next(i for i in range(len(base.generators)) if 1 not in base.support(i))
    with pytest.raises(ValueError):
        b_to_f(base, bad)
    del bad[1]
    with pytest.raises(ValueError):
        b_to_f(base, bad)
    with pytest.raises(ValueError):
        build_fermion_code("color", 3, pick="best")


def test_any_valid_pick_gives_the_same_parameters():
    base = build_bosonic("color", 3)
    for q_pick in range(len(base.generators)):
        pick = default_pick(base)
        if 1 in base.support(q_pick):
            pick[1] = q_pick
            code = b_to_f(base, pick)
            assert code.params == (14, 1, 6)
            assert code.validate() == []


def test_pick_search_meets_round_target():
    base = build_bosonic("color", 5)
    pick = search_pick(base, 7)
    assert pick is not None
    code = b_to_f(base, pick)
    assert schedule(code).phase_latency("sets-1..n") <= 7
    # one round cannot host every tetron's Set-i generator
    assert search_pick(base, 1) is None


def test_pick_failure_raised(monkeypatch):
    import tetroncodes.factory as factory

    monkeypatch.setattr(factory, "SET_I_TARGET", {"color": 1})
    monkeypatch.setattr(factory, "search_pick", lambda *a, **k: None)
    with pytest.raises(PickSearchFailed):
        factory.build_fermion_code("color", 5)


def test_round_trip(tmp_path, color5):
    path = tmp_path / "c5.json"
    save_code(color5, path)
    back = load_code(path)
    assert back == color5
    assert code_to_dict(back) == code_to_dict(color5)
    assert verify_code(back).lines() == verify_code(color5).lines()


def test_inconsistent_file_rejected(steane):
    doc = code_to_dict(steane)
    doc["generators"][0]["pauli_terms"][0][2] = "R'"
    with pytest.raises(ValueError):
        code_from_dict(doc)
    lax = code_from_dict(doc, strict=False)
    rep = verify_code(lax)
    assert not rep.passed
    # R -> R' multiplies by a tetron operator: still commuting, but the rank drops
    assert not rep.checks["rank"]


def test_verify_report(steane):
    rep = verify_code(steane, 6)
    assert rep.passed and rep.distance == 6
    rep0 = verify_code(steane, 0)
    assert rep0.passed and rep0.distance is None
    assert "distance unchecked" in rep0.distance_note
    over = verify_code(steane, 6, budget=10)
    assert over.passed and "unchecked" in over.distance_note


def test_verify_catches_wrong_distance(steane):
    doc = json.loads(json.dumps(code_to_dict(steane)))
    doc["d_f"] = 8
    rep = verify_code(code_from_dict(doc), 6)
    assert not rep.passed


def test_identity_helpers():
    assert MajoranaOp.identity(4).is_identity()
