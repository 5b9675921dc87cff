import json
import math
import subprocess
import sys

import numpy as np
import pytest

from matvar.cli import main
from matvar.matcore import HpdMatrix, SpdMatrix, matrix_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEval:
    def test_gamma(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", "gamma", "--case", "real", "--p", "2",
                           "--alpha", "1.5", "--format", "json")
        assert code == 0
        res = json.loads(out)
        assert res["log_value"] == pytest.approx(math.log(math.pi / 2), abs=1e-12)
        assert res["linear_value"] == pytest.approx(math.pi / 2, rel=1e-12)

    def test_beta_text_is_labelled(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", "beta1", "--case", "real", "--p", "2",
                           "--alpha", "2", "--beta", "2")
        assert code == 0
        log_line, lin_line = out.splitlines()
        assert log_line.startswith("log ") and lin_line.startswith("linear ")
        assert float(log_line.split("=")[-1]) == pytest.approx(math.log(math.pi / 45), abs=1e-12)

    def test_domain_error_cites_bound(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "gamma", "--case", "real", "--p", "3",
                           "--alpha", "0.5")
        assert code == 2
        assert "(p-1)/2 = 1" in err

    def test_complex_domain_error(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "gamma", "--case", "complex", "--p", "3",
                           "--alpha", "1.5")
        assert code == 2 and "p-1 = 2" in err

    def test_overflow_reports_log_only(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", "gamma", "--p", "10", "--alpha", "200",
                           "--format", "json")
        assert code == 0 and json.loads(out)["linear_value"] is None

    def test_missing_beta(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "beta1", "--p", "2", "--alpha", "2")
        assert code == 2 and "--beta" in err

    def test_missing_alpha(self, capsys):
        code, _, _ = run(capsys, "eval", "--family", "gamma", "--p", "2")
        assert code == 2

    def test_argparse_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["eval", "--family", "wishart"])
        assert info.value.code == 2


class TestReduce:
    def test_gamma_p4(self, capsys):
        code, out, _ = run(capsys, "reduce", "--family", "gamma", "--case", "real", "--p", "4",
                           "--format", "json")
        assert code == 0
        trace = json.loads(out)
        assert len(trace["steps"]) == 4
        assert trace["total"]["pi_exponent"] == {"num": 3, "den": 1}

    def test_block_schedule_matches_all_ones(self, capsys):
        _, out, _ = run(capsys, "reduce", "--family", "gamma", "--p", "5", "--schedule", "3,2",
                        "--format", "json")
        block = json.loads(out)
        _, out, _ = run(capsys, "reduce", "--family", "gamma", "--p", "5", "--format", "json")
        ones = json.loads(out)
        assert len(block["steps"]) == 2
        assert block["total"] == ones["total"] and block["matches_closed_form"]

    def test_beta1_complex_p2(self, capsys):
        code, out, _ = run(capsys, "reduce", "--family", "beta1", "--case", "complex", "--p", "2")
        assert code == 0
        assert "π^1 Γ(α − 1) Γ(β − 1) / Γ(α + β − 1)" in out
        assert out.rstrip().splitlines()[-2].strip() == "= B̃_2(α, β)"

    def test_text_ends_with_closed_form_name(self, capsys):
        _, out, _ = run(capsys, "reduce", "--family", "gamma", "--p", "4", "--audit")
        assert "= Γ_4(α)" in out and "α − 3/2" in out

    @pytest.mark.parametrize("schedule", ["3,3", "2,x", "0,5"])
    def test_invalid_schedule(self, capsys, schedule):
        code, _, _ = run(capsys, "reduce", "--family", "gamma", "--p", "5", "--schedule", schedule)
        assert code == 2

    def test_complex_type2_not_traced(self, capsys):
        code, _, err = run(capsys, "reduce", "--family", "beta2", "--case", "complex", "--p", "2")
        assert code == 2 and "type-2" in err


class TestSample:
    ARGS = ("sample", "--family", "gamma", "--case", "real", "--p", "2", "--alpha", "3",
            "--n", "10", "--seed", "7")

    def test_gamma_draws(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 0
        lines = out.splitlines()
        header = json.loads(lines[0])
        assert header["seed"] == 7 and header["p"] == 2 and "matvar_version" in header
        assert len(lines) == 11
        for line in lines[1:]:
            SpdMatrix(matrix_from_json(json.loads(line)))

    def test_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main([*self.ARGS, "--output", str(a)]) == 0
        assert main([*self.ARGS, "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_matters(self, capsys):
        _, out7, _ = run(capsys, *self.ARGS)
        _, out8, _ = run(capsys, *self.ARGS[:-1], "8")
        assert out7.splitlines()[1:] != out8.splitlines()[1:]

    def test_beta1_support(self, capsys):
        code, out, _ = run(capsys, "sample", "--family", "beta1", "--p", "2", "--alpha", "3",
                           "--beta", "3", "--n", "5", "--seed", "1")
        assert code == 0
        draws = [matrix_from_json(json.loads(l)) for l in out.splitlines()[1:]]
        assert len(draws) == 5
        for U in draws:
            SpdMatrix(U)
            SpdMatrix(np.eye(2) - U)

    def test_complex_round_trip(self, capsys):
        _, out, _ = run(capsys, "sample", "--family", "gamma", "--case", "complex", "--p", "3",
                        "--alpha", "4", "--n", "3")
        for line in out.splitlines()[1:]:
            HpdMatrix(matrix_from_json(json.loads(line)))

    def test_domain_error(self, capsys):
        code, _, _ = run(capsys, "sample", "--family", "beta2", "--p", "3", "--alpha", "3",
                         "--beta", "0.5", "--n", "5")
        assert code == 2


class TestVerify:
    def test_single_quadrature(self, capsys):
        code, out, _ = run(capsys, "verify", "--family", "gamma", "--p", "2", "--alpha", "1.5",
                           "--oracle", "quadrature", "--format", "json")
        assert code == 0
        (rep,) = json.loads(out)
        assert rep["passed"] and rep["rel_error"] <= 1e-4

    def test_bad_config(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, _ = run(capsys, "verify", "--config", str(bad))
        assert code == 2

    def test_config_missing_fields(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"checks": [{"family": "gamma_real"}]}))
        assert run(capsys, "verify", "--config", str(cfg))[0] == 2

    def test_failing_check_exits_1(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"checks": [
            {"family": "gamma_real", "p": 3, "alpha": 3.0, "oracle": "mc", "n": 20000,
             "max_std_error": 1e-9}]}))
        code, out, _ = run(capsys, "verify", "--config", str(cfg))
        assert code == 1 and "[FAIL]" in out

    @pytest.mark.slow
    def test_default_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--default")
        assert code == 0
        assert out.rstrip().endswith("12/12 checks passed")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "matvar", "eval", "--family", "gamma", "--p", "1",
                          "--alpha", "5"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert float(res.stdout.splitlines()[0].split("=")[-1]) == pytest.approx(math.log(24))
