import json
import subprocess
import sys

import pytest

from tetroncodes.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_IO, EXIT_OK, SEED_ENV, artifact_version, main
from tetroncodes.fermion import load_code


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


@pytest.mark.parametrize("family,d,line", [("color", 3, "⟦14,1,6_f⟧"), ("surface", 5, "⟦50,1,10_f⟧"),
                                            ("color", 7, "⟦74,1,14_f⟧")])
def test_code_build(capsys, tmp_path, family, d, line):
    path = tmp_path / "code.json"
    rc, out, _ = run(capsys, "code", "build", "--family", family, "--d", str(d), "--out", str(path))
    assert rc == EXIT_OK
    assert out.strip() == line
    assert load_code(path).param_string() == line


def test_code_verify(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "code", "build", "--out", str(path))
    rc, out, _ = run(capsys, "code", "verify", str(path), "--w-max", "6")
    assert rc == EXIT_OK and "distance=6" in out and out.strip().endswith("PASS")
    rc, out, _ = run(capsys, "code", "verify", str(path))
    assert rc == EXIT_OK and "distance unchecked" in out
    # re-verifying gives the identical report
    assert run(capsys, "code", "verify", str(path))[1] == out


def test_code_verify_failures(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "code", "build", "--out", str(path))
    doc = json.loads(path.read_text())
    doc["generators"][0]["pauli_terms"][0][2] = "R'"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    rc, out, _ = run(capsys, "code", "verify", str(bad))
    assert rc == EXIT_FAIL and "FAIL" in out
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(capsys, "code", "verify", str(junk))[0] == EXIT_IO
    assert run(capsys, "code", "verify", str(tmp_path / "missing.json"))[0] == EXIT_IO


def test_config_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["code", "build", "--family", "toric"])
    assert exc.value.code == EXIT_CONFIG
    rc, _, err = run(capsys, "sim", "capacity", "--trials", "0")
    assert rc == EXIT_CONFIG and "trials" in err


def test_schedule(capsys, tmp_path):
    out_path = tmp_path / "s.json"
    rc, out, _ = run(capsys, "schedule", "--family", "color", "--d", "5", "--out", str(out_path))
    assert rc == EXIT_OK
    assert out.splitlines()[0] == "latency 13"
    assert len(out.splitlines()) == 1 + 1 + 13
    doc = json.loads(out_path.read_text())
    assert doc["latency"] == 13 and len(doc["rounds"]) == 13


def test_schedule_from_code_file(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "code", "build", "--family", "surface", "--d", "5", "--out", str(path))
    rc, out, _ = run(capsys, "schedule", "--code", str(path), "--quiet")
    assert rc == EXIT_OK and out.strip() == "latency 8"


def _csv(capsys, *extra):
    rc, out, _ = run(capsys, "sim", "capacity", "--trials", "6000", "--p", "2e-2:1e-1:3",
                     "--eta", "0.1,10", "--seed", "42", *extra)
    assert rc == EXIT_OK
    return out


def test_sim_capacity_csv(capsys, tmp_path):
    out = _csv(capsys)
    lines = out.splitlines()
    assert lines[0].startswith("# artifact-version: ")
    cfg = json.loads(lines[1].split(": ", 1)[1])
    assert cfg["seed"] == 42 and cfg["trials"] == 6000 and cfg["command"] == "sim capacity"
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0].split(",")[:3] == ["family", "n_tetrons", "eta"]
    assert len(body) == 1 + 6
    assert _csv(capsys, "--workers", "2") == out
    jpath = tmp_path / "r.json"
    _csv(capsys, "--json", str(jpath))
    doc = json.loads(jpath.read_text())
    assert len(doc["points"]) == 6
    assert doc["metadata"]["schedule-latency"] == 13
    assert doc["metadata"]["run_config"]["decoder"]["osd_order"] > 0


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "42")
    from_env = _run_env(capsys)
    assert from_env == _csv(capsys)
    monkeypatch.setenv(SEED_ENV, "forty-two")
    rc, _, err = run(capsys, "sim", "capacity", "--trials", "10")
    assert rc == EXIT_CONFIG and SEED_ENV in err


def _run_env(capsys):
    rc, out, _ = run(capsys, "sim", "capacity", "--trials", "6000", "--p", "2e-2:1e-1:3", "--eta", "0.1,10")
    assert rc == EXIT_OK
    return out


def test_sim_ft_and_sequence_hash(capsys):
    rc, out, _ = run(capsys, "sim", "ft", "--trials", "2000", "--p", "0.01,0.03", "--seed", "1")
    assert rc == EXIT_OK
    assert any(ln.startswith("# sequence-hash: ") for ln in out.splitlines())
    rc, _, err = run(capsys, "sim", "ft", "--trials", "100", "--p", "0.01", "--sequence", "truncated")
    assert rc == EXIT_CONFIG and "rank" in err


def test_inject(capsys, tmp_path):
    rc, out, _ = run(capsys, "inject", "--sequence", "default")
    assert rc == EXIT_OK
    assert "PASS: 0 logical failures over all" in out
    rc, out, _ = run(capsys, "inject", "--sequence", "truncated", "--list-failures")
    assert rc == EXIT_FAIL and "FAIL" in out
    assert run(capsys, "inject", "--sequence", str(tmp_path / "none.json"))[0] == EXIT_IO


def test_inject_sequence_file(capsys, tmp_path, steane):
    from tetroncodes.ft import default_sequence, save_sequence

    path = tmp_path / "seq.json"
    save_sequence(default_sequence(steane), path)
    rc, out, _ = run(capsys, "inject", "--sequence", str(path))
    assert rc == EXIT_OK and "PASS" in out


def test_help_lists_commands():
    proc = subprocess.run([sys.executable, "-m", "tetroncodes", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("code", "schedule", "sim", "inject"):
        assert cmd in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "tetroncodes", "sim", "capacity", "--help"],
                          capture_output=True, text=True)
    for flag in ("--workers", "--seed", "--osd-order", "--bp-iters", "--p", "--eta", SEED_ENV):
        assert flag in proc.stdout


def test_version_string():
    v = artifact_version()
    assert v.split("+")[0] and v.split("+")[1].startswith("g")
