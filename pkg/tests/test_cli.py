import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from cqexp.channel import noiseless_binary, useless_channel
from cqexp.cli import main, parse_grid
from cqexp.errors import InputError
from cqexp.fileio import write_channel


@pytest.fixture
def files(tmp_path):
    paths = {}
    nb = tmp_path / "noiseless.json"
    write_channel(nb, noiseless_binary())
    paths["noiseless"] = nb
    us = tmp_path / "useless.json"
    write_channel(us, useless_channel(np.diag([0.25, 0.75]), 3))
    paths["useless"] = us
    for name, text in {
        "a": "[4]",
        "b": "9",
        "s1": "1 0\n0 0\n",
        "s2": "0 0\n0 1\n",
        "pd": "[[2, 1], [1, 2]]",
        "neg": "1 0\n0 -1\n",
        "bad": "1 2\n3 x\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = p
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0:1:0.1")[3] == 0.3
    assert parse_grid("2:2:1") == [2.0]
    for bad in ("0:1", "0:1:0", "1:0:0.1", "a:b:c", "0:inf:1"):
        with pytest.raises(InputError):
            parse_grid(bad)


class TestE0:
    def test_noiseless_column_equals_s(self, capsys, files):
        code, out, _ = run(capsys, "e0", files["noiseless"], "--s-grid", "0:8:0.5")
        assert code == 0
        table = rows(out)
        assert list(table[0]) == ["s", "E0_bits", "dE0_ds", "d2E0_ds2"]
        assert float(table[0]["E0_bits"]) == 0.0
        for r in table:
            assert abs(float(r["E0_bits"]) - float(r["s"])) <= 1e-9
            assert abs(float(r["dE0_ds"]) - 1) <= 1e-6

    def test_useless_all_zero(self, capsys, files):
        code, out, _ = run(capsys, "e0", files["useless"], "--s-grid", "0:4:1")
        assert code == 0
        assert all(abs(float(r["E0_bits"])) <= 1e-12 for r in rows(out))

    def test_json_and_dist(self, capsys, files):
        code, out, _ = run(capsys, "e0", files["noiseless"], "--s-grid", "1:1:1", "--dist", "0.25,0.75", "--format", "json")
        assert code == 0
        rec = json.loads(out)[0]
        assert rec["s"] == 1.0
        assert rec["E0_bits"] == pytest.approx(-math.log2(0.25**2 + 0.75**2), abs=1e-12)

    def test_out_file(self, capsys, files, tmp_path):
        out_path = tmp_path / "e0.csv"
        code, out, _ = run(capsys, "e0", files["noiseless"], "--s-grid", "0:1:1", "--out", out_path)
        assert code == 0 and out == ""
        assert out_path.read_text().startswith("s,E0_bits")

    @pytest.mark.parametrize(
        "argv",
        [
            ["--s-grid", "0:1"],
            ["--s-grid", "-1:1:1"],
            ["--dist", "0.5,0.6"],
            ["--dist", "1"],
            ["--dist", "a,b"],
        ],
    )
    def test_bad_arguments(self, capsys, files, argv):
        code, _, err = run(capsys, "e0", files["noiseless"], *argv)
        assert code == 2 and "error" in err

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2,\n "states": [[1, 0, 0]]}')
        code, _, err = run(capsys, "e0", bad)
        assert code == 2
        assert "states[0]" in err and "bad.json" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "e0", tmp_path / "missing.json")
        assert code == 2 and "missing.json" in err


class TestExponents:
    def test_noiseless(self, capsys, files):
        code, out, _ = run(capsys, "exponents", files["noiseless"], "--r-grid", "0:0.5:0.5")
        assert code == 0
        t = rows(out)
        assert list(t[0]) == ["R", "Er_bits", "Er_arg_s", "Esp_bits_or_inf", "Esp_arg_s", "s_cap_hit"]
        # R = 0: the sR term vanishes, E_r is max over s <= 1 of E0 = 1
        assert float(t[0]["Er_bits"]) == pytest.approx(1.0, abs=1e-9)
        assert float(t[1]["Er_bits"]) == pytest.approx(0.5, abs=1e-9)
        assert t[1]["Esp_bits_or_inf"] == "inf"
        assert t[1]["s_cap_hit"] == "true"

    def test_useless_zero_rows(self, capsys, files):
        code, out, _ = run(capsys, "exponents", files["useless"], "--r-grid", "0:0.5:0.25", "--s-max", "8")
        assert code == 0
        for r in rows(out):
            assert float(r["Er_bits"]) == 0.0 and float(r["Esp_bits_or_inf"]) == 0.0
            assert r["s_cap_hit"] == "false"

    def test_workers_do_not_change_output(self, capsys, files):
        argv = ["exponents", files["noiseless"], "--r-grid", "0:1:0.25", "--s-max", "4"]
        _, one, _ = run(capsys, *argv)
        _, two, _ = run(capsys, *argv, "--workers", "2")
        assert one == two

    def test_json(self, capsys, files):
        code, out, _ = run(capsys, "exponents", files["noiseless"], "--r-grid", "0.5:0.5:1", "--format", "json")
        rec = json.loads(out)[0]
        assert code == 0 and rec["Esp_bits_or_inf"] == "inf" and rec["s_cap_hit"] is True

    @pytest.mark.parametrize("argv", [["--s-max", "0"], ["--s-max", "x"], ["--r-grid", "-1:0:1"], ["--seed", "-3"]])
    def test_bad_arguments(self, capsys, files, argv):
        code, _, _ = run(capsys, "exponents", files["noiseless"], *argv)
        assert code == 2


class TestGeomean:
    def test_scalar(self, capsys, files):
        code, out, _ = run(capsys, "geomean", files["a"], files["b"], "0.5")
        assert code == 0
        assert out.splitlines()[0] == "6"
        assert out.splitlines()[1] == "eigenvalues: 6"

    def test_s0_echoes_a(self, capsys, files):
        code, out, _ = run(capsys, "geomean", files["pd"], files["s1"], "0", "--format", "json")
        assert code == 0
        M = np.array(json.loads(out)["matrix"])
        np.testing.assert_allclose(M[..., 0], [[2, 1], [1, 2]], atol=1e-12)

    def test_singular_pair_gives_zero(self, capsys, files):
        code, out, _ = run(capsys, "geomean", files["s1"], files["s2"], "0.5")
        assert code == 0
        lines = out.splitlines()
        assert lines[:2] == ["0 0", "0 0"]

    @pytest.mark.parametrize("pair", [("neg", "a"), ("bad", "a"), ("a", "pd"), ("s1", "s2")])
    def test_errors(self, capsys, files, pair):
        s = "1.5" if pair == ("s1", "s2") else "0.5"
        code, _, err = run(capsys, "geomean", files[pair[0]], files[pair[1]], s)
        assert code == 2 and "error" in err


class TestVerify:
    def test_passing_suite(self, capsys):
        code, out, err = run(capsys, "verify", "holder", "--trials", "50", "--seed", "3")
        assert code == 0
        report = json.loads(out)[0]
        assert report["suite_name"] == "holder" and report["trials"] == 50
        assert "PASS holder" in err

    @pytest.mark.parametrize("slack", ["-1", "nan", "inf", "abc"])
    def test_bad_slack(self, capsys, slack):
        code, _, _ = run(capsys, "verify", "holder", "--trials", "5", "--tol-slack", slack)
        assert code == 2

    def test_violation_exit_code(self, capsys, monkeypatch):
        import dataclasses

        import cqexp.cli as cli

        real = cli.run_suite

        def failing(*args, **kwargs):
            return dataclasses.replace(real(*args, **kwargs), violations=1)

        monkeypatch.setattr(cli, "run_suite", failing)
        code, _, err = run(capsys, "verify", "holder", "--trials", "5")
        assert code == 1 and "FAIL holder" in err

    def test_zero_trials(self, capsys):
        code, _, err = run(capsys, "verify", "holder", "--trials", "0")
        assert code == 2

    def test_unknown_selector(self, capsys):
        code, _, err = run(capsys, "verify", "nope")
        assert code == 2 and "nope" in err

    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 2
        code, _, _ = run(capsys, "verify", "--workers", "0")
        assert code == 2

    def test_deterministic_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "verify", "geomean-props", "--trials", "30", "--seed", "9", "--out", a)
        run(capsys, "verify", "geomean-props", "--trials", "30", "--seed", "9", "--out", b, "--workers", "2")
        assert a.read_bytes() == b.read_bytes()
        assert len(json.loads(a.read_text())) == 8

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("CQEXP_SEED", "17")
        _, env_out, _ = run(capsys, "verify", "logmajor", "--trials", "10")
        monkeypatch.delenv("CQEXP_SEED")
        _, flag_out, _ = run(capsys, "verify", "logmajor", "--trials", "10", "--seed", "17")
        assert env_out == flag_out
        monkeypatch.setenv("CQEXP_SEED", "zebra")
        code, _, _ = run(capsys, "verify", "logmajor", "--trials", "10")
        assert code == 2

    def test_csv_summary(self, capsys):
        code, out, _ = run(capsys, "verify", "vector-power", "--trials", "20", "--format", "csv")
        assert code == 0
        assert rows(out)[0]["violations"] == "0"

    def test_all_with_defaults(self, capsys):
        code, out, _ = run(capsys, "verify", "all")
        assert code == 0
        reports = json.loads(out)
        assert len(reports) == 16
        assert all(r["violations"] == 0 for r in reports)


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "cqexp.cli", "verify", "bogus"], capture_output=True, text=True
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "cqexp.cli", "geomean", str(files["a"]), str(files["b"]), "0.5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("6")
