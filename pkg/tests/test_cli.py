import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from hyperghz.cli import DEFAULT_SEED, main


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestAnalyze:
    def test_single_label(self, capsys):
        code, out, _ = run(["analyze", "1:+:1:+"], capsys)
        assert code == 0
        assert "i=1" in out and "pol_sign=+" in out and "result=PASS" in out

    def test_all(self, capsys):
        code, out, _ = run(["analyze", "all"], capsys)
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "label,branches,total_probability,correct_probability,status"
        assert len(lines) == 66 and all(line.endswith("PASS") for line in lines[1:65])
        assert lines[-1] == "# 64/64 PASS"

    def test_bad_index(self, capsys):
        code, _, err = run(["analyze", "9:+:1:+"], capsys)
        assert code == 2 and "1..4" in err

    def test_malformed(self, capsys):
        assert run(["analyze", "1:+:1"], capsys)[0] == 2

    def test_random_seeded(self, capsys):
        a = run(["analyze", "random", "--seed", "7"], capsys)[1]
        b = run(["analyze", "random", "--seed", "7"], capsys)[1]
        assert a == b

    def test_verbose_trace(self, capsys):
        out = run(["analyze", "2:-:3:+", "--verbose"], capsys)[1]
        for stage in ("input", "stage1", "qwp", "stage2", "hadamard"):
            assert f"[{stage}]" in out

    def test_physical_mode_header(self, capsys):
        code, out, _ = run(["analyze", "1:+:1:+", "--mode", "physical", "--g", "3",
                            "--kappa-s", "0.01"], capsys)
        assert out.startswith("# physical mode") and code in (0, 1)


class TestGenerate:
    def test_exact(self, capsys):
        code, out, _ = run(["generate"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 4
        assert {r["probability"] for r in rows} == {"0.250000000"}
        assert {r["fidelity"] for r in rows} == {"1.000000000"}

    def test_sampled_within_three_sigma(self, capsys):
        shots = 4096
        out = run(["generate", "--shots", str(shots)], capsys)[1]
        assert f"seed={DEFAULT_SEED}" in out
        sampled = out.split("spin1,spin2,count,frequency\n")[1]
        rows = list(csv.reader(io.StringIO(sampled)))
        sigma = math.sqrt(0.25 * 0.75 / shots)
        assert len(rows) == 4
        for r in rows:
            assert abs(float(r[3]) - 0.25) <= 3 * sigma

    def test_byte_identical(self, capsys):
        a = run(["generate", "--shots", "500", "--seed", "9"], capsys)[1]
        b = run(["generate", "--shots", "500", "--seed", "9"], capsys)[1]
        assert a == b

    def test_negative_shots(self, capsys):
        assert run(["generate", "--shots", "-1"], capsys)[0] == 2


class TestOtherCommands:
    def test_swap(self, capsys):
        code, out, _ = run(["swap"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 64
        assert {r["remote_fidelity"] for r in rows} == {"1.000000000"}

    def test_coeffs_cold_resonance(self, capsys):
        code, out, _ = run(["coeffs", "--g", "0", "--kappa-s", "0"], capsys)
        rows = {r["name"]: r for r in csv.DictReader(io.StringIO(out.split("\n", 1)[1]))}
        assert code == 0
        assert float(rows["r_0"]["abs"]) == 0
        assert float(rows["t_0"]["re"]) == -1 and float(rows["t_0"]["im"]) == 0

    def test_sweep(self, capsys):
        code, out, _ = run(["sweep", "--ks", "0.01", "--g-min", "0.2", "--g-max", "3",
                            "--steps", "12"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 12
        assert list(rows[0]) == ["ks_over_k", "g_over_ktot", "omega_star_double",
                                 "omega_star_single", "F_plus", "F_minus", "E_plus", "E_minus",
                                 "F_prime", "E_prime", "status"]
        for col in ("F_plus", "F_minus"):
            assert np.all(np.diff([float(r[col]) for r in rows]) >= -1e-9)

    def test_sweep_flagged_rows_exit_1(self, capsys):
        code, out, _ = run(["sweep", "--ks", "0.7", "--g-min", "2", "--g-max", "3",
                            "--steps", "3"], capsys)
        assert code == 1 and "no_balanced_detuning" in out

    def test_sweep_bad_range(self, capsys):
        assert run(["sweep", "--steps", "1"], capsys)[0] == 2


class TestPlumbing:
    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "rep.csv"
        code, out, _ = run(["generate", "--out", str(target)], capsys)
        assert code == 0 and out == ""
        assert target.read_text().startswith("spin1,spin2,label")

    def test_unwritable_out(self, tmp_path, capsys):
        assert run(["generate", "--out", str(tmp_path / "no" / "x.csv")], capsys)[0] == 2

    def test_config_defaults_and_override(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("# defaults\nseed = 9\nshots = 200\n")
        a = run(["generate", "--config", str(conf)], capsys)[1]
        b = run(["generate", "--shots", "200", "--seed", "9"], capsys)[1]
        c = run(["generate", "--config", str(conf), "--seed", "10"], capsys)[1]
        assert a == b and "seed=10" in c

    def test_config_unknown_key(self, tmp_path, capsys):
        conf = tmp_path / "bad.conf"
        conf.write_text("colour = red\n")
        assert run(["generate", "--config", str(conf)], capsys)[0] == 2

    def test_unknown_command(self, capsys):
        assert run(["plot"], capsys)[0] == 2

    def test_module_entry(self):
        res = subprocess.run([sys.executable, "-m", "hyperghz", "analyze", "3:-:3:-"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and "result=PASS" in res.stdout
