# tests/e2e/test_cli.py

import json

import pytest

from quotatope import __version__
from quotatope.cli import EXIT_CAPACITY, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from quotatope.schemas.responses import CheckResult, VerificationReport

pytestmark = pytest.mark.e2e


def read_lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def summary(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


class TestCommands:
    def test_euler(self, tmp_path, capsys):
        assert main(["euler", "--qmax", "550", "--out", str(tmp_path)]) == EXIT_OK
        lines = read_lines(tmp_path / "euler.csv")
        assert lines[0] == "q,chi"
        assert len(lines) == 549
        assert lines[1:5] == ["3,1", "4,2", "5,2", "6,2"]
        result = summary(capsys)
        assert result == {"command": "euler", "outputs": [str(tmp_path / "euler.csv")], "rows": 548}

    def test_euler_methods_agree(self, tmp_path):
        assert main(["euler", "--qmax", "40", "--out", str(tmp_path / "dp")]) == EXIT_OK
        assert main(["euler", "--qmax", "40", "--method", "enumerate", "--out", str(tmp_path / "enum")]) == EXIT_OK
        assert (tmp_path / "dp" / "euler.csv").read_bytes() == (tmp_path / "enum" / "euler.csv").read_bytes()

    def test_seq(self, tmp_path):
        assert main(["seq", "squares", "--qmax", "60", "--imax", "3", "--out", str(tmp_path)]) == EXIT_OK
        values = read_lines(tmp_path / "seq_squares.csv")
        assert values[0] == "q,i,s_i,h_i,S_i,H_i,S_i_ave"
        slopes = read_lines(tmp_path / "slopes_squares.csv")
        assert slopes[0] == "i,slope,intercept,residual,points"

    def test_divisor(self, tmp_path):
        assert main(["divisor", "--nmax", "30", "--out", str(tmp_path)]) == EXIT_OK
        lines = read_lines(tmp_path / "divisor.csv")
        assert lines[0] == "n,tau,classification,top_dim,perfect_gap,sphere_counts"
        assert [int(line.split(",")[0]) for line in lines[1:]] == [6, 12, 18, 20, 24, 28]

    def test_logprime(self, tmp_path):
        argv = ["logprime", "--qlo", "3", "--qhi", "7", "--nmax", "2000", "--samples", "200", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        summary_rows = read_lines(tmp_path / "logprime_summary.csv")
        assert summary_rows[0] == "samples,skipped_zero,anchor,slope,intercept,fraction_below,holdout_fraction_below"
        assert summary_rows[1].startswith("200,")
        skipped = int(summary_rows[1].split(",")[1])
        assert len(read_lines(tmp_path / "logprime.csv")) == 1 + 200 - skipped
        assert summary_rows[1].split(",")[2] == "first"

    def test_series_lehmer(self, tmp_path):
        assert main(["series", "lehmer", "--degree", "200", "--out", str(tmp_path)]) == EXIT_OK
        assert read_lines(tmp_path / "lehmer_counterexamples.csv") == ["m"]
        assert read_lines(tmp_path / "tau.csv")[1:4] == ["1,1", "2,-24", "3,252"]
        assert (tmp_path / "count_24.csv").exists()

    def test_series_partitions(self, tmp_path):
        assert main(["series", "partitions", "--degree", "10", "--out", str(tmp_path)]) == EXIT_OK
        assert read_lines(tmp_path / "partitions.csv")[-1] == "10,42"

    def test_random(self, tmp_path, uniform_spec_file):
        out = tmp_path / "random"
        assert main(["random", str(uniform_spec_file), "--trials", "200", "--out", str(out)]) == EXIT_OK
        assert len(read_lines(out / "random.csv")) == 1 + 5 * 2
        euler = read_lines(out / "random_euler.csv")
        assert len(euler) == 1 + 5
        assert euler[0] == "q,expected_chi,empirical_mean,stderr,complex_dimension"

    def test_random_missing_spec(self, tmp_path):
        assert main(["random", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_json_format_is_reproducible(self, tmp_path):
        for name in ("a", "b"):
            assert main(["series", "tau", "--degree", "30", "--format", "json", "--out", str(tmp_path / name)]) == EXIT_OK
        first = (tmp_path / "a" / "tau.json").read_bytes()
        assert first == (tmp_path / "b" / "tau.json").read_bytes()
        payload = json.loads(first)
        assert payload["rows"][1] == {"n": 2, "tau_n": -24}

    def test_svg(self, tmp_path, mocker):
        plotter = mocker.patch("quotatope.cli.create_plotter").return_value
        plotter.scatter.return_value = tmp_path / "euler.svg"
        assert main(["euler", "--qmax", "20", "--svg", "--out", str(tmp_path)]) == EXIT_OK
        dataset, x, y, path = plotter.scatter.call_args.args
        assert (dataset.name, x, y) == ("euler", "q", "chi")
        assert plotter.scatter.call_args.kwargs == {"group": None}


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        ["euler"],
        ["seq", "fibonacci", "--qmax", "10", "--imax", "2"],
        ["verify", "closure"],
        ["euler", "--qmax", "ten"],
    ])
    def test_argument_errors(self, argv, tmp_path):
        assert main(argv + ["--out", str(tmp_path)]) == EXIT_USAGE

    def test_invalid_range(self, tmp_path):
        assert main(["logprime", "--qlo", "5", "--qhi", "3", "--out", str(tmp_path)]) == EXIT_USAGE
        assert main(["euler", "--qmax", "2", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_capacity(self, tmp_path):
        argv = ["logprime", "--qlo", "3", "--qhi", "20", "--nmax", "1000", "--out", str(tmp_path)]
        assert main(argv) == EXIT_CAPACITY

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out


class TestVerify:
    def test_partitions(self, tmp_path, capsys):
        assert main(["verify", "partitions", "--out", str(tmp_path)]) == EXIT_OK
        lines = read_lines(tmp_path / "verify_partitions.csv")
        assert lines[0] == "check,passed,informational,detail"
        assert lines[1].startswith("partitions:reciprocal-series,true,false,")
        assert summary(capsys)["command"] == "verify"

    def test_failing_suite(self, tmp_path, mocker):
        mocker.patch("quotatope.cli.run_suite", return_value=VerificationReport(
            suite="lehmer", seed=7, scale="quick",
            checks=[CheckResult(name="lehmer:no-counterexamples", passed=False, detail="m = 5")],
        ))
        assert main(["verify", "lehmer", "--out", str(tmp_path)]) == EXIT_FAILURE
        assert "false" in read_lines(tmp_path / "verify_lehmer.csv")[1]
