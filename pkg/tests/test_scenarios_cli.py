"""Scenario schema validation, presets, and the command-line surface."""

import csv
import json

import pytest

from aoi_outage import cli
from aoi_outage.reference import PUBLISHED_OUTAGE_RATES
from aoi_outage.scenarios import ConfigError, PRESETS, config_hash, load_scenario


def run_cli(argv):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


def write_config(tmp_path, document, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


class TestScenarios:
    def test_presets_load(self):
        for name, alphas in (
            ("scenario_a", (0.9, 0.7)),
            ("scenario_b", (0.6, 0.4)),
            ("scenario_c", (0.9, 0.2)),
        ):
            sc = load_scenario(name)
            assert sc.name == name
            assert (sc.system.profile.alpha_1, sc.system.profile.alpha_2) == alphas
            assert sc.system.link.blocklength_total == 1000
            assert sc.system.link.payload_bits == 16
            assert sc.system.a_max == 5
            assert sc.system.a_out == 3
            assert sc.system.epsilon_cvg == 1e-5
            assert sc.system.initial_index == 1
            assert sc.optimizer.seeds == 10
            assert sc.simulation.reps == 100
            assert sc.simulation.periods == 2500

    def test_file_round_trip(self, tmp_path):
        path = write_config(tmp_path, PRESETS["scenario_b"])
        sc = load_scenario(path)
        assert sc.system == load_scenario("scenario_b").system
        assert sc.config_hash == load_scenario("scenario_b").config_hash

    def test_hash_is_canonical(self):
        doc = json.loads(json.dumps(PRESETS["scenario_a"]))
        shuffled = dict(reversed(list(doc.items())))
        assert config_hash(doc) == config_hash(shuffled)
        changed = json.loads(json.dumps(doc))
        changed["alpha"] = [0.9, 0.71]
        assert config_hash(changed) != config_hash(doc)

    @pytest.mark.parametrize(
        "mutate,fragment",
        [
            (lambda d: d.update(alphaa=[0.5, 0.5]), "alphaa"),
            (lambda d: d["snr_db"].update(medium=-13.0), "medium"),
            (lambda d: d["blocklength"].pop("d"), "d"),
            (lambda d: d["state"].update(a_out=9), "a_out"),
            (lambda d: d["optimizer"].update(seeds=0), "seeds"),
            (lambda d: d["blocklength"].update(N=10.5), "N"),
            (lambda d: d.update(schema_version=2), "schema_version"),
            (lambda d: d["state"].update(initial=[1, 1]), "initial"),
        ],
    )
    def test_rejects_malformed(self, mutate, fragment):
        doc = json.loads(json.dumps(PRESETS["scenario_a"]))
        mutate(doc)
        with pytest.raises(ConfigError, match=fragment):
            load_scenario(doc)

    def test_missing_source(self):
        with pytest.raises(ConfigError, match="preset"):
            load_scenario("scenario_z")

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_scenario(str(path))


class TestCliEvaluate:
    def test_naive_scenario_b(self, tmp_path, capsys):
        out = tmp_path / "eval.json"
        assert run_cli(["evaluate", "--config", "scenario_b", "--policy", "naive",
                        "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        # regression pin for the analytic stationary outage rate
        assert doc["analytic_p_out"] == pytest.approx(0.004207229583839432, rel=1e-9)
        assert doc["metadata"]["scenario"] == "scenario_b"
        assert doc["metadata"]["duration_convention"] == "outage-periods"
        assert doc["burst"]["defined"] is True
        assert doc["burst"]["p_out"] == doc["analytic_p_out"]

    def test_policy_file_round_trip(self, tmp_path):
        policy = {"policy_lambda": [500] * 100, "index_base": 1}
        pol_path = tmp_path / "pol.json"
        pol_path.write_text(json.dumps(policy))
        out = tmp_path / "eval.json"
        code = run_cli(["evaluate", "--config", "scenario_b", "--policy", "file",
                        "--policy-file", str(pol_path), "--out", str(out)])
        assert code == 0
        naive_out = tmp_path / "naive.json"
        run_cli(["evaluate", "--config", "scenario_b", "--policy", "naive",
                 "--out", str(naive_out)])
        assert json.loads(out.read_text())["analytic_p_out"] == json.loads(
            naive_out.read_text()
        )["analytic_p_out"]

    def test_policy_file_out_of_range(self, tmp_path, capsys):
        pol_path = tmp_path / "bad.json"
        pol_path.write_text(json.dumps({"policy_lambda": [1500] * 100}))
        out = tmp_path / "eval.json"
        code = run_cli(["evaluate", "--config", "scenario_b", "--policy", "file",
                        "--policy-file", str(pol_path), "--out", str(out)])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_malformed_config_names_key(self, tmp_path, capsys):
        doc = json.loads(json.dumps(PRESETS["scenario_a"]))
        doc["alphaa"] = [0.5, 0.5]
        del doc["alpha"]
        path = write_config(tmp_path, doc)
        code = run_cli(["evaluate", "--config", path, "--policy", "naive",
                        "--out", str(tmp_path / "x.json")])
        assert code == 1
        assert "alphaa" in capsys.readouterr().err

    def test_missing_policy_file_flag(self, tmp_path, capsys):
        code = run_cli(["evaluate", "--config", "scenario_b", "--policy", "file",
                        "--out", str(tmp_path / "x.json")])
        assert code == 1


class TestCliOptimize:
    def test_deterministic_output(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        small = json.loads(json.dumps(PRESETS["scenario_b"]))
        small["blocklength"]["N"] = 60
        small["state"]["a_max"] = 2
        small["state"]["a_out"] = 1
        path = write_config(tmp_path, small)
        for out in (a, b):
            code = run_cli(["optimize", "--config", path, "--penalty", "exp-peak-aoi",
                            "--seeds", "1", "--out", str(out)])
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["penalty"] == "exp-peak-aoi"
        assert doc["best"]["index_base"] == 1
        assert len(doc["best"]["policy_lambda"]) == 16
        assert doc["seed_reports"][0]["trace"][0]["iteration"] == 1

    def test_unknown_penalty(self, tmp_path, capsys):
        code = run_cli(["optimize", "--config", "scenario_b", "--penalty", "bogus",
                        "--out", str(tmp_path / "x.json")])
        assert code == 1


class TestCliSimulate:
    def test_json_and_csv(self, tmp_path):
        out = tmp_path / "sim.json"
        table = tmp_path / "sim.csv"
        code = run_cli(["simulate", "--config", "scenario_b", "--policy", "naive",
                        "--reps", "3", "--periods", "400",
                        "--out", str(out), "--csv", str(table)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["reps"] == 3 and doc["periods"] == 400
        assert len(doc["per_rep_outage_rate"]) == 3
        with open(table, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        assert list(rows[0].keys()) == [
            "rep", "seed", "outage_rate", "n_bursts", "mean_burst", "n_iois", "mean_ioi",
        ]

    def test_deterministic(self, tmp_path):
        outs = []
        for name in ("s1.json", "s2.json"):
            out = tmp_path / name
            assert run_cli(["simulate", "--config", "scenario_b", "--policy", "min-error",
                            "--reps", "2", "--periods", "300", "--out", str(out)]) == 0
            outs.append(out.read_text())
        assert outs[0] == outs[1]


class TestCliGrids:
    def test_reproduce_table2_smoke(self, tmp_path):
        out = tmp_path / "table2.csv"
        code = run_cli(["reproduce-table2", "--seeds", "1", "--reps", "2",
                        "--periods", "300", "--out", str(out)])
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 18
        for row in rows:
            key = (row["scenario"], row["policy"])
            assert float(row["published_p_out"]) == PUBLISHED_OUTAGE_RATES[key]
            assert float(row["analytic_p_out"]) >= 0.0

    def test_burst_convergence_smoke(self, tmp_path):
        out = tmp_path / "cvg.csv"
        code = run_cli(["burst-convergence", "--config", "scenario_b",
                        "--n-policies", "2", "--out", str(out)])
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10  # policies x checkpoints
        checkpoints = sorted({int(r["checkpoint"]) for r in rows})
        assert checkpoints == [500, 1000, 2500, 5000, 10000]
        for row in rows:
            assert float(row["analytic_p_out"]) > 0.0


class TestCliBasics:
    def test_version(self, capsys):
        assert run_cli(["--version"]) == 0

    def test_usage_error_exits_one(self):
        assert run_cli([]) == 1
        assert run_cli(["no-such-command"]) == 1
