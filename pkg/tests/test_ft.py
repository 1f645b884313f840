import numpy as np
import pytest

from tetroncodes.decoder import DecoderConfig
from tetroncodes.ft import (
    FtProblem,
    FtSequence,
    Measurement,
    SequenceError,
    default_sequence,
    inject_single_faults,
    load_sequence,
    run_ft,
    save_sequence,
    sequence_from_dict,
    sequence_to_dict,
    truncated_sequence,
    unencoded_reference,
)
from tetroncodes.majorana import MajoranaOp, PauliTerm
from tetroncodes.noise import NoiseModel, physical_error_rate
from tetroncodes.scheduler import schedule


def test_default_sequence_shape(steane):
    seq = default_sequence(steane)
    assert seq.n_steps == 3 * schedule(steane).latency
    assert seq.round_length == 13
    assert seq.problems(steane) == []
    assert seq.rank() == 13
    assert len(seq.instances()) == 39


def test_sequence_round_trip(tmp_path, steane):
    seq = default_sequence(steane, repeats=2)
    assert sequence_from_dict(steane, sequence_to_dict(seq)) == seq
    path = tmp_path / "seq.json"
    save_sequence(seq, path)
    back = load_sequence(steane, path)
    assert back == seq and back.digest() == seq.digest()


def test_sequence_file_by_labels(steane):
    labels = steane.labels
    doc = {"steps": [[labels[0]], [labels[1]]], "repeat": 2, "round_length": 2}
    seq = sequence_from_dict(steane, doc)
    assert seq.n_steps == 4 and seq.round_length == 2
    with pytest.raises(SequenceError):
        sequence_from_dict(steane, {"steps": [["nope"]]})


def _m(code, label, terms):
    from tetroncodes.majorana import pauli_string_to_majorana

    return Measurement(label, terms, pauli_string_to_majorana(terms, code.layout))


def test_problems_detected(steane):
    lay = steane.layout
    g0 = steane.generators[0]
    odd = Measurement("odd", (), MajoranaOp(1, lay.n_maj))
    assert any("odd weight" in p for p in FtSequence(((odd,),), 1).problems(steane))
    heavy = Measurement("heavy", (), MajoranaOp(0b0111 | 1 << 4, lay.n_maj))
    assert any("more than 2" in p for p in FtSequence(((heavy,),), 1).problems(steane))
    rogue = _m(steane, "rogue", (PauliTerm(1, "X"), PauliTerm(2, "X")))
    assert any("not a stabilizer" in p for p in FtSequence(((rogue,),), 1).problems(steane))
    twice = Measurement(g0.label, g0.terms, g0.op)
    assert any("share tetron" in p for p in FtSequence(((twice, twice),), 1).problems(steane))
    with pytest.raises(SequenceError):
        FtSequence((), 0)


def test_rank_deficient_sequence_rejected(steane):
    seq = truncated_sequence(steane)
    assert seq.rank() < 13
    with pytest.raises(SequenceError):
        run_ft(steane, seq, 1, [(0.01, 1.0)], 100, 0)


def test_zero_noise_no_failures(steane):
    pts = run_ft(steane, default_sequence(steane), 1, [(0.0, 1.0)], 2000, 0)
    assert pts[0].failures == 0


def test_detectors(steane):
    seq = default_sequence(steane, repeats=2)
    prob = FtProblem(steane, seq, 0.01, 1.0, 0.01, DecoderConfig())
    n_inst = len(prob.inst_step)
    outs = np.zeros((1, n_inst), dtype=np.uint8)
    outs[0, 0] = 1  # first outcome flipped
    det = prob.detectors(outs)
    # fires at that instance and at the next measurement of the same operator
    assert list(np.flatnonzero(det[0])) == [0, 13]
    full = prob.detectors(outs, np.zeros((1, 13), dtype=np.uint8))
    assert full.shape == (1, n_inst + 13)
    assert prob.n_rows == n_inst + 13


def test_graph_columns_reproduce_simulated_detectors(steane):
    """Every data and flip column of the decoding graph equals the detector
    pattern the simulator produces for that fault."""
    seq = default_sequence(steane, repeats=2)
    prob = FtProblem(steane, seq, 0.01, 1.0, 0.01, DecoderConfig())
    S, n_inst = seq.n_steps, len(prob.inst_step)
    g = prob.graph
    for c, lab in enumerate(g.column_labels):
        slot = np.zeros((1, S, steane.n_maj), dtype=np.uint8)
        flips = np.zeros((1, n_inst), dtype=np.uint8)
        if lab[0] == "data":
            slot[0, lab[3]] = g.column_bits[c]
        else:
            flips[0, lab[1]] = 1
        final = np.bitwise_xor.reduce(slot, axis=1)
        perfect = ((final.astype(np.int64) @ prob.op_bits.T.astype(np.int64)) % 2).astype(np.uint8)
        det = prob.detectors(prob.outcomes(slot, flips), perfect)
        assert np.array_equal(det[0], g.H[:, c]), lab


def test_default_sequence_tolerates_single_faults(steane):
    rep = inject_single_faults(steane, default_sequence(steane))
    assert rep.passed
    assert rep.n_faults == 39 * 7 * 7 + 39
    assert rep.summary().startswith("PASS: 0 logical failures over all")


def test_truncated_sequence_fails_with_named_fault(steane):
    rep = inject_single_faults(steane, truncated_sequence(steane))
    assert not rep.passed
    assert rep.summary().startswith("FAIL")
    assert rep.failing[0].describe() in rep.summary()


def test_cleanup_mode_runs(steane):
    pts = run_ft(steane, default_sequence(steane), 1, [(0.01, 1.0)], 2000, 3, final_round="cleanup")
    assert 0 <= pts[0].failures < 2000
    with pytest.raises(ValueError):
        FtProblem(steane, default_sequence(steane), 0.01, 1.0, 0.01, DecoderConfig(), "never")


def test_ft_determinism(steane):
    seq = default_sequence(steane)
    a = run_ft(steane, seq, 1, [(0.02, 1.0)], 5000, 8, workers=1)
    b = run_ft(steane, seq, 1, [(0.02, 1.0)], 5000, 8, workers=2)
    assert a == b


def test_unencoded_reference():
    assert unencoded_reference(0.1, 1.0) == physical_error_rate(NoiseModel(0.1, 1.0))
