"""End-to-end tests of the wavelet-asym command line."""

import json

import pytest

import lib.oracle
from lib.core import CSV_HEADER, GOLDEN_CASES, build_run_config
from lib.error_handler import ConfigError
from wavelet_asym import main

SHORT_GRID = "100:3162.2776601683795:4"


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def read_json(path):
    with open(path, "r", encoding="utf-8") as file:
        return json.load(file)


class TestEval:

    def test_zero_profile(self, workspace):
        assert main(["eval", "--profile", "zero", "--json", "out.json"]) == 0
        record = read_json("out.json")
        assert record["oracle"] == {"re": 0.0, "im": 0.0}
        assert record["remainder"] == {"re": 0.0, "im": 0.0}
        assert record["hypotheses"]["all_passed"] is True

    def test_sidecar(self, workspace):
        assert main(["eval", "--profile", "zero", "--json", "out.json"]) == 0
        meta = read_json("out.json.meta.json")
        assert meta["command"] == "eval"
        assert meta["success"] is True
        assert meta["config"]["profile"] == "zero"

    def test_standard_output(self, capsys):
        assert main(["eval", "--profile", "zero"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["wavelet"] == "mexican"
        assert record["n_terms"] == 1

    def test_mexican_hat_record(self, workspace):
        assert main(["eval", "--n", "2", "--json", "out.json"]) == 0
        record = read_json("out.json")
        assert record["expansion"]["formula_id"] == "mexican_hat"
        assert record["remainder"]["re"] == pytest.approx(-3e-5, rel=1e-3)

    @pytest.mark.parametrize("argv", [
        ["eval", "--profile", "no-such-profile"],
        ["eval", "--wavelet", "triangle"],
        ["eval", "--wavelet", "haar"],
        ["eval", "--negative-axis", "sideways"],
        ["eval", "--config", "missing.txt"],
        ["converge", "--a-grid", "100:3162.2776601683795:3"],
    ])
    def test_configuration_errors(self, argv):
        assert main(argv) == 2

    def test_config_file_and_flags(self, workspace):
        (workspace / "config.txt").write_text("profile = zero\n[eval]\na = 50\nn = 2\n", encoding="utf-8")
        cfg = build_run_config("eval", {"n": "3"})
        assert cfg.profile_name == "zero"
        assert cfg.a == 50.0
        assert cfg.n_terms == 3
        assert cfg.config_path == "config.txt"
        assert build_run_config("converge", {}).a == 100.0

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            build_run_config("plot", {})


class TestConverge:

    def test_csv(self, workspace):
        assert main(["converge", "--csv", "c.csv", "--a-grid", SHORT_GRID, "--workers", "2"]) == 0
        lines = (workspace / "c.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 5
        assert all(line.endswith(",true") for line in lines[1:])

    def test_reruns_are_identical(self, workspace):
        argv = ["converge", "--csv", "c.csv", "--json", "c.json", "--a-grid", SHORT_GRID]
        assert main(argv + ["--workers", "3"]) == 0
        first = (workspace / "c.csv").read_bytes(), (workspace / "c.json").read_bytes()
        assert main(argv + ["--workers", "1"]) == 0
        assert ((workspace / "c.csv").read_bytes(), (workspace / "c.json").read_bytes()) == first

    def test_json_carries_policy_notes(self, workspace):
        assert main(["converge", "--json", "c.json", "--csv", "c.csv", "--a-grid", SHORT_GRID]) == 0
        assert main(["eval", "--json", "e.json"]) == 0
        converge, evaluation = read_json("c.json"), read_json("e.json")
        assert converge["formula_id"] == evaluation["expansion"]["formula_id"] == "mexican_hat"
        assert converge["negative_axis"] == evaluation["expansion"]["negative_axis"] == "reflected"
        assert converge["notes"] == evaluation["expansion"]["notes"]
        assert converge["notes"]["display"] is False

    def test_degenerate_study_still_succeeds(self, workspace):
        assert main(["converge", "--profile", "zero", "--csv", "c.csv", "--a-grid", SHORT_GRID]) == 0
        rows = (workspace / "c.csv").read_text(encoding="utf-8").splitlines()[1:]
        assert all(row.endswith(",,,false") for row in rows)


class TestGolden:

    def test_written_and_reproducible(self, workspace):
        assert main(["golden", "--golden-dir", "g"]) == 0
        files = sorted(p.name for p in (workspace / "g").glob("*.json") if not p.name.endswith(".meta.json"))
        assert files == sorted(f"{case[0]}.json" for case in GOLDEN_CASES)
        first = {name: (workspace / "g" / name).read_bytes() for name in files}
        assert main(["golden", "--golden-dir", "g"]) == 0
        assert {name: (workspace / "g" / name).read_bytes() for name in files} == first

        assert main(["eval", "--profile", "gauss", "--wavelet", "mexican", "--b", "0", "--a", "100",
                     "--n", "2", "--json", "e.json"]) == 0
        assert (workspace / "e.json").read_bytes() == first["mexican_gauss_b0_n2.json"]

    def test_disagreeing_rules_write_nothing(self, workspace, monkeypatch):
        def tampered(profile, wavelet, b, a, q=lib.oracle.DEFAULT_SETTINGS, rule=lib.oracle.GAUSS_LEGENDRE):
            return 1.0 if rule == lib.oracle.GAUSS_LEGENDRE else 2.0
        monkeypatch.setattr(lib.oracle, "cwt_oracle", tampered)
        assert main(["golden", "--golden-dir", "g"]) == 3
        assert not (workspace / "g").exists()


class TestHypotheses:

    def test_failures_are_data(self, workspace):
        assert main(["hypotheses", "--profile", "gauss", "--wavelet", "haar", "--json", "h.json"]) == 0
        record = read_json("h.json")
        assert record["all_passed"] is False
        failed = [c["name"] for c in record["checks"] if not c["passed"]]
        assert failed == ["vanishing_d0"]


@pytest.mark.slow
class TestAdjudicate:

    def test_report(self, workspace):
        assert main(["adjudicate", "--report", "adj.md", "--workers", "2"]) == 0
        text = (workspace / "adj.md").read_text(encoding="utf-8")
        rows = [line for line in text.splitlines() if line.startswith("| morlet") or line.startswith("| mexican")
                or line.startswith("| haar")]
        assert len(rows) == 3
        assert all(row.endswith("| yes |") for row in rows)
