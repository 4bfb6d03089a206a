import json
import math
import os

import numpy as np
import pytest

from chansim.cli import main


def run(argv, tmp_path, name="out"):
    path = os.path.join(tmp_path, name)
    code = main(argv + ["--output", path])
    text = open(path).read() if os.path.exists(path) else ""
    return code, text


FAST = ["--restarts", "2", "--max-iter", "10"]


class TestBounds:
    def test_constant_channel_values(self, tmp_path):
        code, text = run(
            ["bounds", "--builtin", "constant", "--eps", "0.2", "--delta", "0.1"] + FAST,
            tmp_path,
        )
        assert code == 0
        row = text.splitlines()[1].split()
        assert abs(float(row[2]) - 0.0) <= 1e-5
        assert abs(float(row[3]) - 6.643856) <= 1e-5

    def test_ordering_on_builtin(self, tmp_path):
        code, text = run(
            ["bounds", "--builtin", "depolarizing", "--p", "0.3", "--eps", "0.2",
             "--delta", "0.1"] + FAST,
            tmp_path,
        )
        assert code == 0
        row = text.splitlines()[1].split()
        assert float(row[3]) >= float(row[2]) - 1e-6

    def test_missing_kraus_field_exit_2(self, tmp_path, capsys):
        bad = os.path.join(tmp_path, "chan.json")
        with open(bad, "w") as fh:
            json.dump({"d_in": 2, "d_out": 2}, fh)
        code = main(["bounds", "--channel", bad, "--eps", "0.2", "--delta", "0.1"])
        assert code == 2
        assert "kraus" in capsys.readouterr().err

    def test_invalid_epsilon_exit_2(self, tmp_path):
        code = main(["bounds", "--builtin", "constant", "--eps", "1.5", "--delta", "0.1"])
        assert code == 2

    def test_channel_file_round_trip(self, tmp_path):
        from chansim.quantum import random_channel

        ch = random_channel(2, 2, 2, seed=3)
        spec = {
            "d_in": 2,
            "d_out": 2,
            "kraus": [[[[z.real, z.imag] for z in row] for row in k] for k in ch.kraus],
        }
        path = os.path.join(tmp_path, "chan.json")
        with open(path, "w") as fh:
            json.dump(spec, fh)
        code, text = run(
            ["bounds", "--channel", path, "--eps", "0.3", "--delta", "0.1"] + FAST, tmp_path
        )
        assert code == 0
        assert "0.3" in text


class TestCapacity:
    def test_identity(self, tmp_path):
        code, text = run(["capacity", "--builtin", "identity", "--d", "2"] + FAST, tmp_path)
        assert code == 0
        assert "C_E = 2.000000" in text

    def test_fully_depolarizing(self, tmp_path):
        code, text = run(
            ["capacity", "--builtin", "depolarizing", "--p", "1.0"] + FAST, tmp_path
        )
        assert code == 0
        assert "C_E = 0.000000" in text

    def test_alpha_column_nondecreasing(self, tmp_path):
        code, text = run(
            ["capacity", "--builtin", "depolarizing", "--p", "0.3", "--alpha", "1.5", "2",
             "--format", "json"] + FAST,
            tmp_path,
        )
        assert code == 0
        rep = json.loads(text)
        vals = [r["value_bits"] for r in rep["results"] if r["kind"] == "renyi"]
        assert vals[1] >= vals[0] - 1e-4


class TestVerify:
    def test_default_suite_passes(self, tmp_path):
        code, text = run(
            ["verify", "--builtin", "dephasing", "--p", "0.5", "--trials", "25",
             "--format", "json"] + FAST,
            tmp_path,
        )
        assert code == 0
        rep = json.loads(text)
        assert all(r["pass"] for r in rep["results"])
        assert {r["name"] for r in rep["results"]} >= {
            "lemma1-convexity-in-state",
            "concavity-in-channel",
            "restricted-minimax-gap",
        }

    def test_seed_reproducibility_byte_identical(self, tmp_path):
        args = ["verify", "--builtin", "dephasing", "--p", "0.5", "--trials", "10",
                "--seed", "7", "--format", "json"] + FAST
        _, first = run(args, tmp_path, "a.json")
        _, second = run(args, tmp_path, "a.json")
        assert first == second and first


class TestSweep:
    def test_constant_sweep_csv(self, tmp_path):
        code, text = run(
            ["sweep", "--builtin", "constant", "--eps", "0.2", "--delta", "0.1",
             "--n", "1", "--format", "csv"] + FAST,
            tmp_path,
        )
        assert code == 0
        lines = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert lines[0] == "kind,epsilon,delta,n,alpha,value_bits,converged,wall_ms"
        table = {tuple(l.split(",")[:1]): l.split(",") for l in lines[1:]}
        conv = [l.split(",") for l in lines[1:] if l.startswith("converse")]
        assert conv and abs(float(conv[0][5])) <= 1e-6
        ach = [l.split(",") for l in lines[1:] if l.startswith("achievability")]
        assert ach and abs(float(ach[0][5]) - 2 * math.log2(10)) <= 1e-5

    def test_json_deterministic(self, tmp_path):
        args = ["sweep", "--builtin", "dephasing", "--p", "1.0", "--eps", "0.3",
                "--delta", "0.1", "--n", "1", "--seed", "3", "--format", "json"] + FAST
        _, first = run(args, tmp_path, "a.json")
        _, second = run(args, tmp_path, "a.json")
        assert first == second and first

    def test_unknown_builtin_exit_2(self, tmp_path):
        code = main(["sweep", "--builtin", "nope", "--eps", "0.2", "--delta", "0.1"])
        assert code == 2
