import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pgmcoding.cli import run
from pgmcoding.models import CQChannel, DensityOperator, KrausChannel, Precoder, serialize_model


@pytest.fixture
def files(tmp_path):
    def write(name, model):
        path = tmp_path / name
        path.write_text(serialize_model(model) if not isinstance(model, str) else model)
        return str(path)

    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    mac = CQChannel(("0|0", "0|1", "1|0", "1|1"), np.full(4, 0.25),
                    tuple(np.diag(np.eye(4)[k]) for k in range(4)))
    return {
        "noiseless": write("noiseless.json", CQChannel.from_states([np.diag([1.0, 0]), np.diag([0, 1.0])])),
        "bsc": write("bsc.json", CQChannel.from_states([np.diag([0.9, 0.1]), np.diag([0.1, 0.9])])),
        "rho": write("rho.json", DensityOperator(np.diag([0.5, 0.5]))),
        "sigma": write("sigma.json", DensityOperator(np.diag([0.9, 0.1]))),
        "bell": write("bell.json", DensityOperator(bell)),
        "mixed": write("mixed.json", DensityOperator(np.eye(2) / 2)),
        "identity": write("id.json", KrausChannel.identity(2)),
        "mac": write("mac.json", mac),
        "wide": write("wide.json", CQChannel.from_states([np.diag(np.eye(4)[k]) for k in (0, 3)])),
        "precoder": write("pre.json", Precoder(("0", "1"), [0.5, 0.5], ("0", "1"), [0.5, 0.5],
                                               {("0", "0"): "0", ("0", "1"): "1",
                                                ("1", "0"): "1", ("1", "1"): "0"})),
        "broken": write("broken.json", "{"),
    }


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, err = call(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestBound:
    def test_cq_json(self, capsys, files):
        obj = call_json(capsys, "bound", "cq", "--model", files["noiseless"], "--messages", "2", "--strengthened")
        assert set(obj) == {"protocol", "inputs_digest", "values", "diagnostics"}
        assert obj["protocol"] == "cq"
        assert obj["values"]["bound"] == pytest.approx(0.5)
        assert obj["values"]["strengthened_bound"] == pytest.approx(0.375)
        assert obj["diagnostics"]["trivial"] is False

    def test_csv(self, capsys, files):
        code, out, _ = call(capsys, "bound", "cq", "--model", files["bsc"], "--messages", "2", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and rows[0]["protocol"] == "cq"
        assert float(rows[0]["bound"]) == pytest.approx(0.6)

    def test_ea(self, capsys, files):
        obj = call_json(capsys, "bound", "ea", "--model", files["bell"], "--channel", files["identity"],
                        "--shape", "2,2", "--messages", "2")
        assert obj["values"]["bound"] == pytest.approx(0.25)

    def test_packing(self, capsys, files):
        obj = call_json(capsys, "bound", "packing", "--model", files["bell"], "--tau", files["mixed"],
                        "--shape", "2,2", "--messages", "2")
        assert obj["values"]["bound"] == pytest.approx(0.25)

    def test_mac(self, capsys, files):
        obj = call_json(capsys, "bound", "mac", "--model", files["mac"], "--ma", "2", "--mb", "2")
        assert obj["values"]["bound"] == pytest.approx(1.0)

    def test_broadcast(self, capsys, files):
        obj = call_json(capsys, "bound", "broadcast", "--model", files["wide"], "--shape", "2,2",
                        "--precoder", files["precoder"], "--mb", "2", "--mc", "2")
        assert {"bound_B", "bound_C"} <= set(obj["values"])
        assert set(obj["diagnostics"]) == {"B", "C"}

    def test_output_file(self, capsys, files, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = call(capsys, "bound", "cqsw", "--model", files["noiseless"], "--messages", "2",
                            "--output", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["values"]["bound"] == pytest.approx(0.5)


class TestExitCodes:
    def test_help(self, capsys):
        assert call(capsys, "--help")[0] == 0

    @pytest.mark.parametrize("argv", [[], ["bound"], ["bound", "cq", "--messages", "0"],
                                      ["bound", "cq", "--bogus"], ["frobnicate"]])
    def test_usage(self, capsys, files, argv):
        assert call(capsys, *argv, "--model", files["bsc"])[0] == 1

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = call(capsys, "bound", "cq", "--model", str(tmp_path / "none.json"), "--messages", "2")
        assert code == 1 and "cannot read" in err

    def test_missing_messages(self, capsys, files):
        assert call(capsys, "bound", "cq", "--model", files["bsc"])[0] == 1

    def test_parse_error(self, capsys, files):
        assert call(capsys, "bound", "cq", "--model", files["broken"], "--messages", "2")[0] == 2

    def test_wrong_kind(self, capsys, files):
        assert call(capsys, "bound", "cq", "--model", files["rho"], "--messages", "2")[0] == 2

    def test_out_of_range(self, capsys, files):
        assert call(capsys, "rate", "--model", files["bsc"], "--eps", "1.5", "--delta", "0.1")[0] == 2

    def test_mc_needs_seed(self, capsys, files):
        assert call(capsys, "simulate", "cq", "--model", files["bsc"], "--messages", "2", "--mode", "mc")[0] == 1

    def test_enumeration_cap(self, capsys, files):
        code, _, err = call(capsys, "simulate", "cq", "--model", files["bsc"], "--messages", "3", "--cap", "4")
        assert code == 2 and "Monte-Carlo" in err

    def test_failed_check(self, capsys, monkeypatch):
        from pgmcoding import checks, cli

        def failing(dim, trials, seed):
            rep = checks.CheckReport("facts", dim, trials, seed, 1e-9)
            rep.record("identity", -1.0)
            return rep

        monkeypatch.setitem(cli.BATTERIES, "facts", failing)
        code, out, err = call(capsys, "check", "facts", "--trials", "1")
        assert code == 3 and err.startswith("FAIL facts")
        assert json.loads(out)["values"]["passed"] is False


class TestCommands:
    def test_simulate_exact(self, capsys, files):
        obj = call_json(capsys, "simulate", "cq", "--model", files["noiseless"], "--messages", "2")
        assert obj["values"]["mean_error"] == pytest.approx(0.25)
        assert obj["values"]["certified"] is True
        assert obj["diagnostics"]["mode"] == "exact"

    def test_simulate_mc_threads(self, capsys, files):
        argv = ["simulate", "cq", "--model", files["bsc"], "--messages", "3", "--mode", "mc",
                "--trials", "50", "--seed", "42"]
        a = call(capsys, *argv, "--threads", "1")
        b = call(capsys, *argv, "--threads", "4")
        assert a[0] == 0 and a[1] == b[1]

    def test_simulate_broadcast_csv(self, capsys, files):
        code, out, _ = call(capsys, "simulate", "broadcast", "--model", files["wide"], "--shape", "2,2",
                            "--precoder", files["precoder"], "--mb", "2", "--mc", "2", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and [r["receiver"] for r in rows] == ["B", "C"]

    def test_packing_is_exact_only(self, capsys, files):
        code = call(capsys, "simulate", "packing", "--model", files["bell"], "--tau", files["mixed"],
                    "--shape", "2,2", "--messages", "2", "--mode", "mc", "--seed", "1")[0]
        assert code == 1

    def test_rate(self, capsys, files):
        obj = call_json(capsys, "rate", "--model", files["noiseless"], "--eps", "0.26", "--delta", "0.01")
        assert obj["values"]["ours"] == pytest.approx(-math.log(0.375) - math.log(100), abs=1e-9)

    def test_exponent_csv_grid(self, capsys, files):
        code, out, _ = call(capsys, "exponent", "--model", files["noiseless"], "--rate", "0.5",
                            "--grid-steps", "5", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 5 and list(rows[0]) == ["alpha", "integrand"]

    def test_exponent_source(self, capsys, files):
        obj = call_json(capsys, "exponent", "--model", files["noiseless"], "--rate", "0.5", "--source")
        assert obj["protocol"] == "cqsw-exponent" and obj["values"]["positive"] is True

    @pytest.mark.parametrize("kind,extra,expected", [
        ("petz", ["--alpha", "2"], math.log(0.25 / 0.9 + 0.25 / 0.1)),
        ("kl", [], 0.5 * math.log(5 / 9) + 0.5 * math.log(5)),
        ("max", [], math.log(5)),
        ("ht", ["--eps", "0.25"], -math.log(0.55)),
        ("is", ["--eps", "0.5"], math.log(5)),
    ])
    def test_divergence(self, capsys, files, kind, extra, expected):
        obj = call_json(capsys, "divergence", kind, "--rho", files["rho"], "--sigma", files["sigma"], *extra)
        assert obj["values"]["value"] == pytest.approx(expected, abs=1e-8)

    def test_bits(self, capsys, files):
        nats = call_json(capsys, "divergence", "variance", "--rho", files["rho"], "--sigma", files["sigma"])
        bits = call_json(capsys, "divergence", "variance", "--rho", files["rho"], "--sigma", files["sigma"],
                         "--bits")
        assert bits["units"] == "bits" and "units" not in nats
        assert bits["values"]["value"] == pytest.approx(nats["values"]["value"] / math.log(2) ** 2)
        ht = call_json(capsys, "divergence", "ht", "--rho", files["rho"], "--sigma", files["sigma"],
                       "--eps", "0.5", "--bits")
        assert ht["values"]["value"] == pytest.approx(math.log2(10), abs=1e-8)

    def test_infinity_is_a_string(self, capsys, files, tmp_path):
        pure = tmp_path / "pure.json"
        pure.write_text(serialize_model(DensityOperator(np.diag([1.0, 0.0]))))
        obj = call_json(capsys, "divergence", "max", "--rho", files["mixed"], "--sigma", str(pure))
        assert obj["values"]["value"] == "inf" and obj["diagnostics"]["infinite"] is True

    def test_second_order(self, capsys, files):
        obj = call_json(capsys, "second-order", "--info", "0.5108", "--variance", "1.2069",
                        "--eps", "0.025", "--n", "1000")
        oracle = 510.8 - 1.959964 * math.sqrt(1206.9) - 0.5 * math.log(1000)
        assert obj["values"]["log_m"] == pytest.approx(oracle, abs=1e-3)
        obj = call_json(capsys, "second-order", "--model", files["noiseless"], "--eps", "0.1", "--n", "10")
        assert obj["values"]["log_m"] == pytest.approx(10 * math.log(2) - 0.5 * math.log(10))

    def test_hoeffding(self, capsys, files):
        obj = call_json(capsys, "hoeffding", "--rho", files["rho"], "--sigma", files["sigma"],
                        "--order", "0.5", "--r", "0.1")
        v = obj["values"]
        assert v["type1_actual"] <= v["type1_bound"] + 1e-12 and v["type2_actual"] <= v["type2_bound"] + 1e-12

    def test_check(self, capsys):
        code, out, err = call(capsys, "check", "hn", "--dim", "2", "--trials", "20", "--format", "csv")
        assert code == 0 and err.startswith("PASS hn dim=2 trials=20")
        assert out.splitlines()[0] == "property,worst_margin"

    def test_module_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "pgmcoding", "bound", "cq", "--model", files["noiseless"],
                               "--messages", "2"], capture_output=True, text=True, check=False)
        assert proc.returncode == 0 and json.loads(proc.stdout)["values"]["bound"] == pytest.approx(0.5)
