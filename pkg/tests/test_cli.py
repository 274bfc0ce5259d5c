from __future__ import annotations

import json

import pytest

from syzygy import cli


def run(capsys, *argv: str) -> tuple[int, str]:
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_betti_text_table_o2(capsys):
    code, out = run(capsys, "betti", "--variety", "P:2", "--bundle", "2")
    assert code == 0
    assert "certified=yes" in out
    lines = [l.split() for l in out.splitlines()[2:]]
    assert lines[0] == ["0", "1", "0", "0", "0", "0", "0"]
    assert lines[1] == ["1", "0", "6", "8", "3", "0", "0"]


def test_betti_renders_zeros_not_blanks(capsys):
    code, out = run(capsys, "betti", "--variety", "P:1", "--bundle", "2")
    assert code == 0
    body = out.splitlines()[1:]
    assert all("?" not in line for line in body)


def test_betti_json_round_trip(capsys):
    code, out = run(capsys, "betti", "--variety", "F:0", "--bundle", "1,2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["variety"] == "F:0" and doc["bundle"] == "1,2"
    assert doc["rows"]["1"]["1"] == 6 and doc["rows"]["1"]["2"] == 8
    table = cli.table_from_json(out)
    assert cli.table_to_json(table) == out.strip()


def test_betti_csv_format(capsys):
    code, out = run(capsys, "betti", "--variety", "P:1", "--bundle", "3", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "i,j,beta"
    assert "1,1,3" in lines and "2,1,2" in lines


def test_single_prime_exits_two(capsys):
    code, out = run(capsys, "betti", "--variety", "P:2", "--bundle", "2", "--prime", "32003")
    assert code == 2
    assert "certified=no" in out


def test_parse_error_exits_one(capsys):
    code = cli.main(["betti", "--variety", "X:2", "--bundle", "2"])
    assert code == 1
    code = cli.main(["betti", "--variety", "P:2", "--bundle", "0"])
    assert code == 1


def test_profile_output(capsys):
    code, out = run(capsys, "profile", "--variety", "P:2", "--bundle", "3")
    assert code == 0
    assert "p_max=6 q_max=2 tug=4 delta=0 j_max=2" in out
    assert "tugs" in out


def test_profile_degenerate_p1(capsys):
    code, out = run(capsys, "profile", "--variety", "P:1", "--bundle", "2")
    assert code == 0
    assert "q_max=0" in out
    assert "M_1 fails" in out


def test_verify_command(capsys):
    code, out = run(capsys, "verify", "--variety", "P:2", "--bundle", "3")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_predict_examples(capsys):
    code, out = run(capsys, "predict", "cm", "--n", "2", "--q", "3", "--regk", "3", "--rho", "0")
    assert code == 0 and "ell >= 4" in out

    code, out = run(
        capsys, "predict", "ruled", "--n", "2", "--g", "0", "--mu-minus", "0",
        "--a", "4", "--b", "4", "--q", "3",
    )
    assert code == 0 and "satisfied" in out

    code, out = run(capsys, "predict", "enriques", "--q", "4", "--b2", "6")
    assert code == 0 and "ell >= 3" in out


def test_predict_missing_params_exit_one(capsys):
    with pytest.raises(SystemExit):
        cli.main(["predict", "cm", "--n", "2"])


def test_predict_gonality_convention_note(capsys):
    code, out = run(capsys, "predict", "gonality", "--variety", "F:0", "--bundle", "5,2")
    assert code == 0
    assert "gon_max: 2" in out  # min(a, b)
    assert "convention" in out


def test_sweep_f0(capsys):
    code, out = run(
        capsys, "sweep", "--variety", "F:0", "--a", "2", "--b", "2..3", "--jobs", "1"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "a,b,r,p_max,q_max,delta,delta_predicted,match"
    assert lines[1] == "2,2,8,5,2,0,0,yes"
    assert lines[2] == "2,3,11,7,2,1,1,yes"


def test_sweep_p2(capsys):
    code, out = run(capsys, "sweep", "--variety", "P:2", "--d", "2..3", "--jobs", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "2,,5,3,1,0,0,yes"
    assert lines[2] == "3,,9,6,2,0,0,yes"


def test_sweep_empty_range(capsys):
    code, out = run(capsys, "sweep", "--variety", "F:0", "--a", "", "--b", "2..3")
    assert code == 0
    assert out.strip() == "a,b,r,p_max,q_max,delta,delta_predicted,match"


def test_cache_cold_warm_identical(tmp_path, capsys):
    args = ["betti", "--variety", "F:0", "--bundle", "2,2", "--cache-dir", str(tmp_path)]
    code1 = cli.main(args)
    cold = capsys.readouterr().out
    assert (tmp_path / "ranks.csv").exists()
    code2 = cli.main(args)
    warm = capsys.readouterr().out
    assert (code1, cold) == (code2, warm)


def test_cache_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SYZYGY_CACHE_DIR", str(tmp_path))
    cli.main(["betti", "--variety", "P:1", "--bundle", "3"])
    capsys.readouterr()
    assert (tmp_path / "ranks.csv").exists()


def test_no_cache_flag(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SYZYGY_CACHE_DIR", str(tmp_path))
    cli.main(["betti", "--variety", "P:1", "--bundle", "3", "--no-cache"])
    capsys.readouterr()
    assert not (tmp_path / "ranks.csv").exists()


def test_size_cap_renders_holes_and_exits_two(capsys):
    code, out = run(
        capsys, "betti", "--variety", "P:2", "--bundle", "3", "--size-cap", "3000"
    )
    assert code == 2
    assert "?" in out and "certified=no" in out


def test_size_cap_profile_errors(capsys):
    code = cli.main(
        ["profile", "--variety", "P:2", "--bundle", "3", "--size-cap", "3000"]
    )
    assert code == 1


def test_size_cap_sweep_marks_hole_rows(capsys):
    code, out = run(
        capsys, "sweep", "--variety", "P:2", "--d", "3..3", "--size-cap", "3000"
    )
    assert code == 2
    assert "3,,?,?,?,?,?,hole" in out


def test_cache_records_format(tmp_path, capsys):
    cli.main(["betti", "--variety", "P:1", "--bundle", "2", "--cache-dir", str(tmp_path)])
    capsys.readouterr()
    lines = (tmp_path / "ranks.csv").read_text().strip().splitlines()
    assert lines
    for line in lines:
        parts = line.split(";")
        assert len(parts) == 8
        assert parts[0] == "P:1" and parts[1] == "2"
        assert parts[7] == "0.1.0"
    keys = {tuple(l.split(";")[:5]) for l in lines}
    assert len(keys) == len(lines)
