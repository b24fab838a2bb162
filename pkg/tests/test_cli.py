"""End-to-end CLI behavior: exit codes, reports, reproducibility."""

import json

import pytest

from halfstep.cli import main

GOOD_CONFIG = {
    "family": [
        {"p": 0.5, "weights": [1]},
        {"p": 1, "weights": [2]},
    ],
    "sequence": {
        "kind": "driven",
        "x1": [1],
        "drive": {"kind": "named", "family": "geometric",
                  "scale": [1], "ratio": "1/4"},
    },
    "limit": [0],
}


def write_config(tmp_path, obj, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCertify:
    def test_happy_path(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        code, out, err = run(["certify", "--config", cfg], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["manifest"]["tool"] == "halfstep"
        assert report["manifest"]["subcommand"] == "certify"
        assert report["certify"]["all_certified"] is True
        outcome = report["certify"]["outcomes"][0]
        assert outcome["verdict"] == "certified"
        assert {"seminorm_index", "p", "epsilon", "N", "sigma_xN", "rows",
                "empirical_limsup", "verdict"} <= set(outcome)
        first_row = outcome["rows"][0]
        assert {"m", "observed", "bound", "pass"} <= set(first_row)
        assert "halfstep certify: exit 0" in err

    def test_reruns_are_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert main(["certify", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["certify", "--config", cfg, "--out", str(out2)]) == 0
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()

    def test_timing_breaks_byte_identity_predictably(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        code, out, _ = run(
            ["certify", "--config", cfg, "--timing"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert isinstance(report["manifest"]["runtime_ms"], float)

    def test_no_timing_means_no_runtime_field(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        _, out, _ = run(["certify", "--config", cfg], capsys)
        assert "runtime_ms" not in json.loads(out)["manifest"]

    def test_refusal_exits_2(self, tmp_path, capsys):
        alternating = {
            "family": {"p": 1, "weights": [1]},
            "sequence": {
                "kind": "explicit",
                "terms": [[1 if n % 2 == 0 else -1] for n in range(16)],
            },
            "limit": [0],
        }
        cfg = write_config(tmp_path, alternating)
        code, out, err = run(
            ["certify", "--config", cfg, "--prefix", "16", "--eps", "0.1"],
            capsys,
        )
        assert code == 2
        report = json.loads(out)
        assert report["certify"]["all_certified"] is False
        assert report["certify"]["outcomes"][0]["verdict"] == "refusal"
        assert "halfstep certify: exit 2" in err

    def test_csv_projection(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        code, out, _ = run(
            ["certify", "--config", cfg, "--format", "csv"], capsys
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "seminorm_index,epsilon,m,observed,bound,pass"
        assert len(lines) > 1

    def test_bad_exponent_names_the_problem(self, tmp_path, capsys):
        bad = dict(GOOD_CONFIG, family={"p": 1.5, "weights": [1]})
        cfg = write_config(tmp_path, bad)
        code, _, err = run(["certify", "--config", cfg], capsys)
        assert code == 1
        assert "exponent must lie in (0, 1]" in err

    def test_missing_field_named(self, tmp_path, capsys):
        bad = {k: v for k, v in GOOD_CONFIG.items() if k != "limit"}
        cfg = write_config(tmp_path, bad)
        code, _, err = run(["certify", "--config", cfg], capsys)
        assert code == 1
        assert "'limit'" in err

    def test_unknown_sequence_field_named(self, tmp_path, capsys):
        bad = dict(
            GOOD_CONFIG,
            sequence={"kind": "named", "family": "harmonic",
                      "scale": [1], "rato": 2},
        )
        cfg = write_config(tmp_path, bad)
        code, _, err = run(["certify", "--config", cfg], capsys)
        assert code == 1
        assert "rato" in err

    def test_invalid_json_config(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        code, _, err = run(["certify", "--config", str(path)], capsys)
        assert code == 1
        assert "halfstep: error:" in err

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run(
            ["certify", "--config", str(tmp_path / "nope.json")], capsys
        )
        assert code == 1

    def test_manifest_echoes_canonical_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        _, out, _ = run(["certify", "--config", cfg], capsys)
        echoed = json.loads(out)["manifest"]["config"]
        assert echoed["limit"] == [0]
        assert echoed["sequence"]["kind"] == "driven"
        assert echoed["sequence"]["drive"]["ratio"] == 0.25


class TestCounterexample:
    def test_exact_mode(self, capsys):
        code, out, err = run(["counterexample", "--n", "1..4"], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["all_ok"] is True
        rows = report["rows"]
        assert [r["n"] for r in rows] == [1, 2, 3, 4]
        for r in rows:
            assert r["union_probability"] == "1/2"
            assert r["union_is_half"] is True
            assert r["recurrence_identity"] is True
            assert r["tail_solution_at_least_half"] is True
        assert rows[0]["tail_solution_exact"] == "1/2"
        assert rows[0]["metric_solution_exact"] == "11/21"
        assert rows[0]["tail_drive_exact"] == "1/1"
        assert rows[1]["tail_drive_exact"] == "1/2"
        assert "seed" not in report["manifest"]

    def test_index_list_forms(self, capsys):
        code, out, _ = run(["counterexample", "--n", "3,5"], capsys)
        assert code == 0
        assert [r["n"] for r in json.loads(out)["rows"]] == [3, 5]

    def test_mc_requires_seed(self, capsys):
        code, _, err = run(
            ["counterexample", "--n", "2", "--mode", "mc"], capsys
        )
        assert code == 1
        assert "--seed" in err

    def test_both_mode_gates_against_oracles(self, capsys):
        code, out, _ = run(
            ["counterexample", "--n", "2,3", "--mode", "both",
             "--samples", "20000", "--seed", "7"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["manifest"]["seed"] == 7
        assert report["manifest"]["rng"] == "philox4x64"
        for r in report["rows"]:
            for key in ("tail_drive_mc", "tail_solution_mc",
                        "metric_drive_mc", "metric_solution_mc"):
                assert r[key]["samples"] == 20000
                assert r[key]["within_4_stderr"] is True
            assert r["tail_drive_mc"]["exact"] == r["tail_drive_exact"]

    def test_mc_mode_reports_lower_bound_past_cap(self, capsys):
        # 2n = 26 exceeds the enumeration cap: no exact solution tail
        code, out, _ = run(
            ["counterexample", "--n", "13", "--mode", "mc",
             "--samples", "20000", "--seed", "3"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert "tail_solution_exact" not in row
        assert "exact" not in row["tail_solution_mc"]
        assert row["tail_solution_mc"]["above_half_lower_bound"] is True
        # drive oracles never hit the cap
        assert row["tail_drive_mc"]["within_4_stderr"] is True

    def test_csv_projection(self, capsys):
        code, out, _ = run(
            ["counterexample", "--n", "1..3", "--format", "csv"], capsys
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ("n,union_probability,recurrence_identity,"
                            "tail_drive_exact,tail_solution_exact,ok")
        assert lines[1].startswith("1,1/2,True,1/1,1/2,")

    @pytest.mark.parametrize("bad", ["", "0", "5..3", "x"])
    def test_bad_index_lists(self, bad, capsys):
        code, _, _ = run(["counterexample", "--n", bad], capsys)
        assert code == 1


class TestScan:
    def test_drive_family_decays(self, capsys):
        code, out, _ = run(
            ["scan", "--family", "drive", "--n", "1..12", "--seed", "1"],
            capsys,
        )
        assert code == 0
        scan = json.loads(out)["scan"]
        assert scan["verdict"] == "decaying"
        assert scan["rows"][0] == {
            "n": 1, "value": 1.0, "stderr": None, "mode": "exact",
            "exact": "1/1",
        }
        assert scan["rows"][11]["exact"] == "1/12"

    def test_solution_family_bounded_away(self, capsys):
        code, out, _ = run(
            ["scan", "--family", "solution-odd", "--n", "1..8",
             "--seed", "1"],
            capsys,
        )
        assert code == 0
        scan = json.loads(out)["scan"]
        assert scan["verdict"] == "bounded away"
        assert all(row["value"] >= 0.5 for row in scan["rows"])

    def test_requires_seed(self, capsys):
        code, _, err = run(["scan", "--n", "1..4"], capsys)
        assert code == 1
        assert "--seed" in err

    def test_csv_projection(self, capsys):
        code, out, _ = run(
            ["scan", "--n", "1..4", "--seed", "1", "--format", "csv"],
            capsys,
        )
        assert code == 0
        assert out.splitlines()[0] == "n,value,stderr,mode"

    def test_reruns_byte_identical_with_mc_rows(self, tmp_path, capsys):
        argv = ["scan", "--family", "solution-odd", "--n", "1,14",
                "--samples", "20000", "--seed", "5"]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()
        report = json.loads(out1.read_text())
        modes = [r["mode"] for r in report["scan"]["rows"]]
        assert modes == ["exact", "mc"]


class TestParser:
    def test_version_exits_zero(self, capsys):
        assert main(["--version"]) == 0
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()

    def test_unknown_subcommand_exits_one(self, capsys):
        assert main(["frobnicate"]) == 1
        capsys.readouterr()

    def test_no_subcommand_exits_one(self, capsys):
        assert main([]) == 1
        capsys.readouterr()

    def test_negative_eps_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, GOOD_CONFIG)
        code, _, _ = run(
            ["certify", "--config", cfg, "--eps", "-0.5"], capsys
        )
        assert code == 1
