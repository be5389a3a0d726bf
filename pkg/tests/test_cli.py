"""Command-line interface: formats, determinism, exit codes, golden values."""

import json
import math

import pytest

from normrisk.cli import main
from tests.conftest import PUBLISHED_TABLE


def run_cli(args, tmp_path, name="out.txt"):
    path = tmp_path / name
    code = main([*args, "--out", str(path)])
    return code, path.read_text(encoding="utf-8")


class TestTableCommand:
    def test_csv_golden_subset(self, tmp_path):
        code, text = run_cli(["table", "--n", "5", "10"], tmp_path)
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == (
            "n,plugin_mise,umvu_ratio,b_n,normal_ratio1,normal_ratio2,"
            "c_n,epan_ratio1,epan_ratio2"
        )
        for line, n in zip(lines[1:], (5, 10)):
            fields = line.split(",")
            bench, umvu, b_n, r1n, r2n, c_n, r1e, r2e = map(float, fields[1:])
            published = PUBLISHED_TABLE[n]
            assert int(fields[0]) == n
            # half an ulp of the printed digits plus our own rounding
            assert bench == pytest.approx(published[0], abs=1e-5)
            assert umvu == pytest.approx(published[1], abs=1e-4)
            assert b_n == pytest.approx(published[2], abs=1e-4)
            assert c_n == pytest.approx(published[5], abs=1e-4)
            for got, printed in ((r1n, published[3]), (r2n, published[4]), (r1e, published[6]), (r2e, published[7])):
                assert got == pytest.approx(printed, abs=6e-4)

    def test_byte_identical_reruns(self, tmp_path):
        _, first = run_cli(["table", "--n", "4", "7"], tmp_path, "a.csv")
        _, second = run_cli(["table", "--n", "4", "7"], tmp_path, "b.csv")
        assert first == second

    def test_worker_pool_preserves_output(self, tmp_path):
        _, serial = run_cli(["table", "--n", "5", "8"], tmp_path, "serial.csv")
        _, pooled = run_cli(["table", "--n", "5", "8", "--threads", "2"], tmp_path, "pool.csv")
        assert serial == pooled

    def test_infinite_ratio_formats(self, tmp_path):
        _, csv_text = run_cli(["table", "--n", "3"], tmp_path, "t.csv")
        row = csv_text.strip().splitlines()[1].split(",")
        assert row[2] == "inf"
        assert float(row[2]) == math.inf  # round-trips through float()

        _, json_text = run_cli(["table", "--n", "3", "--format", "json"], tmp_path, "t.json")
        obj = json.loads(json_text.strip())
        assert obj["umvu_ratio"] is None
        assert obj["umvu_ratio_infinite"] is True

    def test_rejects_tiny_n(self, capsys):
        assert main(["table", "--n", "2"]) == 2
        assert "usage error" in capsys.readouterr().err


class TestMiseCommand:
    def test_plugin_json(self, tmp_path):
        code, text = run_cli(
            ["mise", "--estimator", "plugin", "--n", "10", "--format", "json"], tmp_path
        )
        assert code == 0
        obj = json.loads(text)
        assert obj["value"] == pytest.approx(0.03044, abs=1e-5)
        assert obj["method"] == "quadrature"
        assert obj["infinite"] is False

    def test_umvu_infinity_exits_zero(self, tmp_path):
        code, text = run_cli(
            ["mise", "--estimator", "umvu", "--n", "3", "--format", "json"], tmp_path
        )
        assert code == 0
        obj = json.loads(text)
        assert obj["value"] is None
        assert obj["infinite"] is True

    def test_kernel_rule_matches_table_product(self, tmp_path):
        code, text = run_cli(
            [
                "mise", "--estimator", "kernel", "--kernel", "normal",
                "--n", "10", "--rule", "thumb", "--format", "json",
            ],
            tmp_path,
        )
        assert code == 0
        obj = json.loads(text)
        assert obj["value"] == pytest.approx(0.03044 * 1.010, abs=3e-5)

    def test_kernel_fixed_bandwidth_csv(self, tmp_path):
        code, text = run_cli(
            ["mise", "--estimator", "kernel", "--kernel", "epan", "--n", "5", "--h", "1.2"],
            tmp_path,
        )
        assert code == 0
        header, row = text.strip().splitlines()
        assert header == "estimator,n,kernel,value,method,std_error"
        assert row.split(",")[4] == "closed_form"

    def test_mc_deterministic(self, tmp_path):
        args = [
            "mise", "--estimator", "kernel", "--kernel", "normal", "--n", "5",
            "--rule", "thumb", "--method", "mc", "--seed", "7",
            "--replicates", "400", "--eval-points", "3", "--format", "json",
        ]
        _, first = run_cli(args, tmp_path, "m1.json")
        _, second = run_cli(args, tmp_path, "m2.json")
        assert first == second
        obj = json.loads(first)
        assert obj["method"] == "monte_carlo"
        assert obj["std_error"] > 0

    def test_sigma_scaling(self, tmp_path):
        base = [
            "mise", "--estimator", "plugin", "--n", "8", "--format", "json",
        ]
        _, at_one = run_cli(base, tmp_path, "s1.json")
        _, at_two = run_cli([*base, "--sigma", "2.0"], tmp_path, "s2.json")
        v1 = json.loads(at_one)["value"]
        v2 = json.loads(at_two)["value"]
        assert v2 == pytest.approx(v1 / 2.0, rel=1e-12)

    @pytest.mark.parametrize(
        "args",
        [
            ["mise", "--estimator", "kernel", "--n", "5"],
            ["mise", "--estimator", "kernel", "--kernel", "epan", "--n", "5"],
            ["mise", "--estimator", "kernel", "--kernel", "epan", "--n", "5",
             "--h", "0.5", "--rule", "thumb"],
            ["mise", "--estimator", "plugin", "--n", "5", "--kernel", "normal"],
            ["mise", "--estimator", "kernel", "--kernel", "epan", "--n", "5",
             "--h", "0.5", "--method", "mc"],
        ],
    )
    def test_invalid_combinations(self, args):
        assert main(args) == 2

    def test_numerical_failure_exit_code(self, capsys):
        # a tolerance below machine resolution cannot converge
        code = main(["mise", "--estimator", "plugin", "--n", "5", "--tol", "1e-300"])
        assert code == 3
        assert "numerical failure" in capsys.readouterr().err


class TestCurveCommands:
    def test_figure_one_structure(self, tmp_path):
        code, text = run_cli(
            ["figure", "--which", "1", "--n", "8", "--x-step", "0.5"], tmp_path
        )
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == "estimator,x,bias,sd,rmse"
        labels = {line.split(",")[0] for line in lines[1:]}
        assert labels == {"parametric_plugin", "epan_kernel"}
        # 13 grid points per curve on [-3, 3] at step 0.5
        assert len(lines) == 1 + 2 * 13
        for line in lines[1:]:
            _, x, bias, sd, rmse = line.split(",")
            assert float(rmse) ** 2 == pytest.approx(
                float(bias) ** 2 + float(sd) ** 2, abs=1e-12
            )

    def test_figure_two_labels(self, tmp_path):
        code, text = run_cli(
            ["figure", "--which", "2", "--n", "6", "--x-step", "1.0", "--format", "json"],
            tmp_path,
        )
        assert code == 0
        labels = {json.loads(line)["estimator"] for line in text.strip().splitlines()}
        assert labels == {"normal_kernel", "epan_kernel"}

    def test_mse_curve_kernel(self, tmp_path):
        code, text = run_cli(
            [
                "mse-curve", "--estimator", "kernel", "--kernel", "epan",
                "--n", "14", "--rule", "thumb", "--x-step", "1.5",
            ],
            tmp_path,
        )
        assert code == 0
        assert len(text.strip().splitlines()) == 1 + 5

    def test_mse_curve_plugin_rejects_kernel_flags(self):
        assert main(
            ["mse-curve", "--estimator", "plugin", "--n", "5", "--kernel", "epan"]
        ) == 2

    def test_bad_grid(self):
        assert main(["figure", "--which", "1", "--x-min", "2", "--x-max", "-2"]) == 2


class TestOtherCommands:
    def test_bandwidth_constants(self, tmp_path):
        code, text = run_cli(["bandwidth-constants", "--n", "10"], tmp_path)
        assert code == 0
        header, row = text.strip().splitlines()
        assert header == "n,b_n,c_n"
        _, b, c = row.split(",")
        assert float(b) == pytest.approx(1.2021, abs=1e-4)
        assert float(c) == pytest.approx(5.0628, abs=1e-4)

    def test_lognormal_defaults(self, tmp_path):
        code, text = run_cli(["lognormal"], tmp_path)
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == "b,n0"
        got = {float(b): int(n0) for b, n0 in (line.split(",") for line in lines[1:])}
        assert got == {0.2: 312, 0.4: 87, 0.6: 45, 0.8: 31, 1.0: 25, 1.2: 22}

    def test_lognormal_empty_list(self, tmp_path):
        code, text = run_cli(["lognormal", "--b"], tmp_path)
        assert code == 0
        assert text.strip() == "b,n0"

    def test_skew_mise(self, tmp_path):
        code, text = run_cli(["skew-mise", "--format", "json"], tmp_path)
        assert code == 0
        obj = json.loads(text)
        assert obj["n_mise_limit"] == pytest.approx(0.342, abs=2e-3)
        assert obj["ratio_to_normal_family"] == pytest.approx(1.386, abs=5e-3)

    def test_stdout_default(self, capsys):
        assert main(["bandwidth-constants", "--n", "5"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("n,b_n,c_n")
