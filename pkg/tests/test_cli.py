import csv
import io
import json

import pytest

from spindex.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    SCALING_HEADER,
    SWEEP_HEADER,
    RunConfig,
    UsageError,
    main,
    parse_grid,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def p3(tmp_path):
    path = tmp_path / "p3.txt"
    path.write_text("0 1\n1 2\n")
    return str(path)


@pytest.fixture
def k4(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text("".join(f"{i} {j}\n" for i in range(4) for j in range(i + 1, 4)))
    return str(path)


class TestMean:
    @pytest.mark.parametrize("argv, want", [
        (["2", "4", "2"], "3.00000000000"),
        (["4", "9", "-1"], "6.00000000000"),
        (["2", "4", "lim0"], "2.88539008178"),
        (["2", "4", "--", "-inf"], "2.00000000000"),
        (["2", "4", "+inf"], "4.00000000000"),
    ])
    def test_values(self, capsys, argv, want):
        code, out, _ = run(capsys, "mean", *argv)
        assert code == EXIT_OK and out.strip() == want

    @pytest.mark.parametrize("argv", [["2", "4", "lim7"], ["2", "4", "1"], ["-2", "4", "2"], ["2", "4", "0"]])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, "mean", *argv)
        assert code == EXIT_USAGE and "usage error" in err


class TestIndex:
    def test_path(self, capsys, p3):
        code, out, _ = run(capsys, "index", p3, "--index", "sp:2", "--index", "m1")
        assert code == EXIT_OK
        assert out.splitlines() == ["index,value", "sp:2,3.00000000000", "m1,6.00000000000"]

    def test_complete(self, capsys, k4):
        code, out, _ = run(capsys, "index", k4, "--index", "sp:lim0")
        assert code == EXIT_OK and rows(out) == [{"index": "sp:lim0", "value": "18.0000000000"}]

    def test_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 1\n1 1\n")
        code, _, err = run(capsys, "index", str(path))
        assert code == EXIT_IO and "line 2" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "index", str(tmp_path / "nope"))[0] == EXIT_IO

    def test_bad_label(self, capsys, p3):
        assert run(capsys, "index", p3, "--index", "sp:1")[0] == EXIT_USAGE


class TestSweep:
    def test_complete_graph(self, capsys):
        code, out, _ = run(capsys, "sweep", "--n", "125", "--grid", "1", "--index", "sp:lim0",
                           "--replicates", "3", "--workers", "1")
        assert code == EXIT_OK
        assert out.splitlines()[0] == ",".join(SWEEP_HEADER)
        (row,) = rows(out)
        assert float(row["mean"]) == 961000 and float(row["std_err"]) == 0
        assert float(row["prediction"]) == 961000
        assert row["replicates"] == "3" and row["seed"] == "42"

    def test_replicates_recorded(self, capsys):
        out = run(capsys, "sweep", "--n", "20", "--grid", "0.1,0.4", "--replicates", "100",
                  "--index", "sp:2", "--index", "rr", "--workers", "1")[1]
        table = rows(out)
        assert len(table) == 4 and {r["replicates"] for r in table} == {"100"}

    def test_byte_identical(self, capsys):
        argv = ["sweep", "--model", "rg", "--n", "40", "--grid", "lin:0.1:0.5:3", "--replicates", "20",
                "--seed", "7", "--workers", "1"]
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        c = run(capsys, *argv[:-1], "2")[1]
        assert a == b == c
        assert run(capsys, *argv[:-3], "8", "--workers", "1")[1] != a

    def test_lf_and_decimal_point(self, capsys):
        out = run(capsys, "sweep", "--n", "10", "--grid", "0.5", "--replicates", "4", "--workers", "1")[1]
        assert "\r" not in out and "," not in rows(out)[0]["mean"]

    def test_json(self, capsys):
        out = run(capsys, "sweep", "--n", "10", "--grid", "0.5", "--replicates", "4",
                  "--format", "json", "--workers", "1")[1]
        doc = json.loads(out)
        assert doc["config"]["seed"] == 42 and len(doc["rows"]) == 4

    def test_unwritable_output(self, capsys, tmp_path):
        code = run(capsys, "sweep", "--n", "10", "--grid", "0.5", "--replicates", "2",
                   "-o", str(tmp_path / "no" / "such" / "file.csv"))[0]
        assert code == EXIT_IO

    @pytest.mark.parametrize("extra", [["--grid", "1.5"], ["--replicates", "1"], ["--index", "zz"],
                                       ["--model", "xx"], ["--grid", "lin:0:1"]])
    def test_usage(self, capsys, extra):
        assert run(capsys, "sweep", "--n", "10", *extra)[0] == EXIT_USAGE


class TestScaling:
    def test_prediction_column(self, capsys):
        code, out, _ = run(capsys, "scaling", "--n", "30", "--n", "60", "--grid", "0.1,0.3,1",
                           "--replicates", "10", "--index", "sp:-inf", "--workers", "1")
        assert code == EXIT_OK and out.splitlines()[0] == ",".join(SCALING_HEADER)
        for r in rows(out):
            d = float(r["mean_degree"])
            assert float(r["prediction"]) == pytest.approx(d * d / 2, rel=1e-11)

    def test_complete_identity(self, capsys):
        out = run(capsys, "scaling", "--n", "1000", "--grid", "1", "--replicates", "2",
                  "--index", "sp:-inf", "--workers", "1")[1]
        (r,) = rows(out)
        assert float(r["normalized_mean"]) == float(r["prediction"]) == 499000.5

    def test_json_collapse(self, capsys):
        out = run(capsys, "scaling", "--n", "40", "--n", "80", "--grid", "deg:2:30:5", "--replicates", "20",
                  "--index", "sp:2", "--format", "json", "--workers", "1")[1]
        doc = json.loads(out)
        (rep,) = doc["collapse"]
        assert rep["index"] == "sp:2" and rep["points"] > 0


class TestCheck:
    def test_default_passes(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code = run(capsys, "check", "-o", str(path))[0]
        report = json.loads(path.read_text())
        assert code == EXIT_OK and report["passed"]
        assert set(report["suites"]) >= {"ineq", "ineq22", "limits", "g_of_r"}

    def test_injected_fault(self, capsys):
        code, out, _ = run(capsys, "check", "--chain", "ineq", "--inject-fault")
        report = json.loads(out)
        assert code == EXIT_VERIFY and not report["passed"]
        v = report["suites"]["ineq"]["violations"][0]
        assert (v["context"]["x"], v["context"]["y"]) == (1, 2) and not v["holds"]

    def test_equality_at_p1(self, capsys):
        code, out, _ = run(capsys, "check", "--chain", "ineq3", "--grid", "1", "--replicates", "2")
        report = json.loads(out)
        assert code == EXIT_OK
        (suite,) = report["suites"].values()
        assert suite["rows"] and all(r["equal"] for r in suite["rows"])


class TestConfig:
    def test_round_trip(self):
        cfg = RunConfig(command="scaling", model="rg", sizes=[125, 250], grid="deg:1:100:16", replicates=8000,
                        seed=3, indices=["sp:-inf", "ka:0.5:2"], format="json", threshold=12.5)
        assert RunConfig.from_text(cfg.to_text()) == cfg
        assert RunConfig.from_text(RunConfig().to_text()) == RunConfig()

    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.seed == 42 and cfg.replicates_for(1000) == 10_000

    @pytest.mark.parametrize("text", ["bogus = 1", "seed = x", "no equals sign", "model = ba"])
    def test_bad(self, text):
        with pytest.raises(UsageError):
            RunConfig.from_text(text)

    def test_file_with_override(self, capsys, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# small run\nmodel = er\nsizes = 20\ngrid = 0.2\nreplicates = 5\nindices = sp:2\n"
                        "workers = 1\n")
        out = run(capsys, "sweep", "--config", str(path), "--seed", "9")[1]
        (r,) = rows(out)
        assert r["seed"] == "9" and r["replicates"] == "5"

    def test_grids(self):
        assert parse_grid("0.1, 0.2", "er", 10) == (0.1, 0.2)
        assert parse_grid("lin:0:1:3", "er", 10) == (0.0, 0.5, 1.0)
        assert len(parse_grid("log:0.01:1:5", "er", 10)) == 5
        assert len(parse_grid("deg:1:100:16", "rg", 125)) == 16
