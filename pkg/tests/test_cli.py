"""CLI tests: subcommands, exit codes, JSON schema, determinism."""

import json

from slopelab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_slopes_command(capsys):
    code, out, _ = run(capsys, "slopes", "-e", "El(1,u^-3,rank=1)")
    assert code == 0
    assert "slopes: 3:1" in out
    assert "irregularity: 3" in out


def test_slopes_json(capsys):
    code, out, _ = run(capsys, "slopes", "-e", "El(2,u^-3,rank=1)", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "1"
    assert data["slopes"] == [["3/2", 2]]
    assert data["irregularity"] == "3"
    assert data["regular"] is False


def test_nearby_command(capsys):
    code, out, _ = run(capsys, "nearby", "-e", "El(1,u^-3,rank=1)", "-p", "2")
    assert code == 0
    assert "3/2" in out


def test_nearby_cert_json(capsys):
    code, out, _ = run(capsys, "nearby", "-e", "El(1,u^-2,rank=1)", "-p", "1",
                       "--cert", "--ram-bound", "4", "--ord-bound", "6", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["nearby_slopes"] == ["2"]
    (member,) = data["certificate"]["members"]
    assert member["psi_dim"] > 0
    absent = {rec["slope"] for rec in data["certificate"]["nonmembers"]}
    assert "2" not in absent and "1" in absent and "0" in absent


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "slopes", "-e", "El(0,u^-1,rank=1)")
    assert code == 1
    assert "ramification" in err


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "nearby", "-e", "Reg(rank=1)", "-p", "0")
    assert code == 1
    assert "usage" in err


def test_bound_command(tmp_path, capsys):
    model = tmp_path / "m.model"
    model.write_text(json.dumps({
        "dim": 2,
        "factors": [{"pole": [2, 3], "twist": ["0", "0"], "rank": 1}]}))
    code, out, _ = run(capsys, "bound", "-m", str(model), "-f", "x1*x2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["bound"] == "5"
    assert data["threshold"] == "3"
    assert data["criterion_applicable"] is True
    assert all(c["within_threshold"] for c in data["curve_checks"])


def test_bound_bad_monomial(tmp_path, capsys):
    model = tmp_path / "m.model"
    model.write_text(json.dumps({"dim": 2, "factors": [{"pole": [1, 0]}]}))
    code, _, err = run(capsys, "bound", "-m", str(model), "-f", "y1")
    assert code == 1
    assert "monomial" in err


def test_blowup_command(tmp_path, capsys):
    script = tmp_path / "s.blowup"
    script.write_text(json.dumps({
        "dim": 2, "mode": "toric", "Z": {"a": [1, 1]}, "S": {"r": ["2", "3"]},
        "steps": [{"center": ["D1", "D2"]}]}))
    code, out, _ = run(capsys, "blowup", "-s", str(script), "--verify", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    e1 = next(c for c in data["components"] if c["id"] == "E1")
    assert e1["vZ"] == 2 and e1["vS"] == "5" and e1["margin"] == "5"
    assert data["per_step"] == [{"step": 1, "ok": True}]


def test_blowup_script_error_names_step(tmp_path, capsys):
    script = tmp_path / "bad.blowup"
    script.write_text(json.dumps({
        "dim": 2, "mode": "toric", "Z": {"a": [1, 0]}, "S": {"r": ["1", "0"]},
        "steps": [{"center": ["D2", "D2"]}]}))
    code, _, err = run(capsys, "blowup", "-s", str(script))
    assert code == 1
    assert "step 1" in err


def test_selftest_small(capsys):
    code, out, _ = run(capsys, "selftest", "--cases", "4", "--seed", "3")
    assert code == 0
    assert "all suites passed" in out


def test_selftest_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("SLOPELAB_SEED", "99")
    code, out, _ = run(capsys, "selftest", "--cases", "3")
    assert code == 0
    assert "seed 99" in out


def test_selftest_json_deterministic(capsys):
    code1, out1, _ = run(capsys, "selftest", "--cases", "5", "--seed", "11",
                         "--json")
    code2, out2, _ = run(capsys, "selftest", "--cases", "5", "--seed", "11",
                         "--json")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical under a fixed seed
    data = json.loads(out1)
    assert data["ok"] is True and len(data["suites"]) == 12


def test_json_outputs_never_contain_floats(tmp_path, capsys):
    _, out, _ = run(capsys, "slopes", "-e", "El(2,u^-3,rank=1)", "--json")

    def no_floats(value):
        if isinstance(value, float):
            return False
        if isinstance(value, dict):
            return all(no_floats(v) for v in value.values())
        if isinstance(value, list):
            return all(no_floats(v) for v in value)
        return True

    assert no_floats(json.loads(out))
