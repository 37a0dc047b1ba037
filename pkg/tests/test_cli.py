import json

import pytest

from nofkit.cli import main
from nofkit.harness import CSV_HEADER


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_simulate_json_report(tmp_path):
    code, rep = run_json(
        ["simulate", "--protocol", "gip", "--n", "4", "--k", "4",
         "--trials", "20", "--seed", "7"], tmp_path)
    assert code == 0
    assert rep["schema"] == 1
    assert rep["config"]["protocol"] == "gip"
    assert rep["runs"] == 20
    assert rep["worst_cost_bits"] <= rep["cost_ceiling_bits"]


def test_simulate_csv_row(tmp_path, capsys):
    code = main(["simulate", "--protocol", "mod3", "--n", "3", "--k", "4",
                 "--trials", "10", "--seed", "1", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    cells = lines[1].split(",")
    assert cells[0] == "3" and cells[1] == "4" and cells[8] == "1"


def test_simulate_source_flags_are_exclusive(tmp_path):
    x = tmp_path / "x.txt"
    x.write_text("1 2\n11\n")
    with pytest.raises(SystemExit):
        main(["simulate", "--protocol", "gip", "--n", "1", "--k", "2",
              "--matrix", str(x), "--exhaustive", "--trials", "4"])


def test_simulate_infeasible_exits_nonzero(capsys):
    code = main(["simulate", "--protocol", "gip", "--n", "8", "--k", "2",
                 "--trials", "4"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_sweep_csv_and_json(tmp_path, capsys):
    code = main(["sweep", "--protocol", "gip", "--n-list", "4,8",
                 "--k-list", "3,4", "--trials", "4", "--seed", "2"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5
    code, payload = run_json(
        ["sweep", "--protocol", "gip", "--n-list", "4", "--k-list", "3",
         "--trials", "4", "--format", "json"], tmp_path)
    assert code == 0
    assert payload["schema"] == 1
    assert payload["rows"][0]["n"] == "4" and payload["rows"][0]["k"] == "3"


def test_disc_exact_gip(tmp_path):
    code, payload = run_json(
        ["disc", "--fn", "gip", "--n", "2", "--k", "2", "--mode", "exact"],
        tmp_path)
    assert code == 0
    assert payload["mode"] == "exact"
    assert payload["value"] == pytest.approx(5 / 16)
    names = {row["name"]: row["status"] for row in payload["bound_checks"]}
    assert names["gip-uniform"] == "OK"
    assert "VIOLATION" not in names.values()


def test_disc_bns_matches_closed_form(tmp_path):
    code, payload = run_json(
        ["disc", "--fn", "mod3char", "--n", "1", "--k", "1", "--mode", "bns"],
        tmp_path)
    assert code == 0
    # rhs (1 - 3/2^(k+1))^n = 1/4, reported as the 2^k-th root
    assert payload["value"] == pytest.approx(0.25 ** 0.5)


def test_disc_heuristic_stays_below_exact(tmp_path):
    _, exact = run_json(["disc", "--fn", "disj", "--n", "1", "--k", "2",
                         "--mode", "exact"], tmp_path, "a.json")
    _, heur = run_json(["disc", "--fn", "disj", "--n", "1", "--k", "2",
                        "--mode", "heuristic", "--seed", "5"], tmp_path, "b.json")
    assert heur["value"] <= exact["value"] + 1e-12


def test_exact_error_gip_and_mod3(tmp_path):
    x = tmp_path / "x.txt"
    x.write_text("2 3\n111\n011\n")
    code, payload = run_json(
        ["exact-error", "--protocol", "gip", "--matrix", str(x)], tmp_path)
    assert code == 0
    assert payload["exact_error"] == pytest.approx(2 / 7)
    assert payload["exact_error_repr"] == "2/7"
    code, payload = run_json(
        ["exact-error", "--protocol", "mod3", "--matrix", str(x)], tmp_path,
        "m.json")
    assert code == 0
    assert payload["k_eff"] == 3
    assert payload["exact_error"] == pytest.approx(2 / 8)


def test_exact_error_ell_override(tmp_path):
    x = tmp_path / "x.txt"
    x.write_text("2 2\n11\n00\n")
    code, payload = run_json(
        ["exact-error", "--protocol", "gip", "--matrix", str(x),
         "--ell", "1"], tmp_path)
    assert code == 0
    assert payload["ell"] == 1
    # the all-zero row carries 2 zeros, so only the all-ones row collides
    assert payload["exact_error"] == pytest.approx(1 / 3)


def test_verify_single_suite(tmp_path):
    code, payload = run_json(["verify", "--suite", "bounds"], tmp_path)
    assert code == 0
    assert payload["ok"] is True
    assert all(row["ok"] for row in payload["rows"])


def test_verify_csv(capsys):
    code = main(["verify", "--suite", "decompose", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "suite,check,ok,detail"
    assert all(ln.split(",")[2] == "1" for ln in lines[1:])


def test_missing_file_reports_error(capsys):
    code = main(["exact-error", "--protocol", "gip", "--matrix", "/no/such"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_bad_flag_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--protocol", "nope", "--n", "2", "--k", "2"])
    assert info.value.code == 2
