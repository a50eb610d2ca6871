import csv
import io
import json
from fractions import Fraction as F

import pytest

from permealab import cli
from permealab.errors import MalformedCSV


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), stdout=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run("--json", *argv)
    return code, json.loads(text) if text else None


def test_eval_json():
    code, rep = run_json("eval", "--scheme", "gH", "--t", "1/2", "--level", "1")
    assert code == 0
    assert (rep["lo"], rep["hi"]) == ("-11/4", "-7/4")


def test_eval_picks_level_from_tol():
    code, rep = run_json("eval", "--t", "1/2", "--tol", "1/1000")
    assert code == 0 and rep["level"] == 4
    assert abs(F(rep["value"]) + 2) <= F(1, 1000)


def test_json_flag_after_subcommand():
    code, text = run("eval", "--t", "0", "--level", "0", "--json")
    assert code == 0 and json.loads(text)["lo"] == "-5"


def test_usage_errors(capsys):
    assert run("eval")[0] == 1
    assert run("nosuch")[0] == 1
    assert run()[0] == 1
    assert run("--budget", "0", "eval", "--t", "0")[0] == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert json.loads(err)["exit"] == 1


def test_dim_zero_levels_four(tmp_path):
    out = tmp_path / "boxes.csv"
    code, rep = run_json("dim", "--scheme", "gH", "--f", "zero", "--levels", "4", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["count"]) for r in rows] == [1, 26, 676, 17576, 456976]
    assert rows[-1]["width"] == f"1/{234 ** 4}"
    assert abs(float(rows[-1]["slope"]) - 0.59723) < 1e-5


def test_cross_budget_exit(tmp_path, capsys):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"points": [["0", "0"], ["1", "0"]]}))
    code, _ = run("cross", "--scheme", "gH", "--f", str(f), "--depth", "9")
    assert code == 3
    assert json.loads(capsys.readouterr().err)["error"] == "EnumerationLimitExceeded"


def test_cross_writes_tree(tmp_path):
    out = tmp_path / "tree.json"
    code, rep = run_json("cross", "--f", "zero", "--depth", "1", "--out", str(out))
    assert code == 0 and rep["root_xi"] == 26 and rep["branching_ok"]
    tree = json.loads(out.read_text())
    assert len(tree["nodes"]) == 27


def test_validate_exit_codes(tmp_path):
    assert run("validate", "--scheme", "gH", "--level", "2")[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "grow", "heights": [10, 20, 20], "pattern": "gH"}))
    code, rep = run_json("validate", "--descriptor", str(bad), "--level", "1")
    assert code == 2 and rep["violation"] == "NestingHeight"


@pytest.mark.slow
def test_validate_gc_level_two():
    assert run("validate", "--scheme", "gC", "--level", "2")[0] == 0


def test_plot_budget_and_window(tmp_path):
    assert run("plot", "--level", "3")[0] == 3
    out, svg = tmp_path / "g.csv", tmp_path / "g.svg"
    code, _ = run("plot", "--level", "3", "--window", "0:1/10000", "--out", str(out),
                  "--svg", str(svg))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert all(F(r["hi"]) - F(r["lo"]) == F(1, 100) for r in rows)
    assert svg.read_text().startswith("<svg")


def test_emit_plot():
    two = cli.emit_plot([("0", "0", "1"), ("1", "1", "2")])
    assert two == cli.emit_plot([("0", "0", "1"), ("1", "1", "2")])
    assert two.count("<polygon") == 1
    with pytest.raises(MalformedCSV):
        cli.emit_plot([])
    with pytest.raises(MalformedCSV):
        cli.emit_plot([("0", "x", "1"), ("1", "0", "1")])


def test_permeate_and_bv(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"points": [["0", "0"], ["1/2", "1"], ["1", "0"]]}))
    f = tmp_path / "f.json"
    code, rep = run_json("permeate", "--g", str(g), "--y", "0", "--rho", "1/16",
                         "--out", str(f), "--verify")
    assert code == 0 and rep["checks"] == {"tube": True, "variation_bound": True}
    code, rep = run_json("bv", "--in", str(f))
    assert code == 0 and rep["unfrayed"] and F(rep["variation"]) <= F(3, 8)
    code, rep = run_json("permeate", "--g", str(g), "--y", "0", "--delta", "1/2", "--verify")
    assert code == 0 and F(rep["variation"]) < F(1, 2)
    assert run("permeate", "--g", str(g), "--y", "0")[0] == 1


def test_metric_report(tmp_path):
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("t1,t2\n0,1\n0,1/3\n0,1/9\n")
    out = tmp_path / "report.csv"
    code, _ = run("metric", "--pairs", str(pairs), "--K", "4", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["lower"] for r in rows] == ["1/5", "1/10", "1/20"]
    assert all(r["ok"] == "true" for r in rows)
    pairs.write_text("a,b\n0,1\n")
    assert run("metric", "--pairs", str(pairs))[0] == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nscheme = gH\nlevel = 1\njson = true\n")
    code, text = run("--config", str(cfg), "validate")
    assert code == 0 and json.loads(text)["level"] == 1
    code, text = run("--config", str(cfg), "validate", "--level", "2")
    assert json.loads(text)["level"] == 2


def test_outputs_are_byte_identical(tmp_path):
    blobs = []
    for i in range(2):
        d = tmp_path / str(i)
        d.mkdir()
        run("dim", "--levels", "2", "--out", str(d / "b.csv"))
        run("cross", "--f", "zero", "--depth", "2", "--out", str(d / "t.json"))
        blobs.append(((d / "b.csv").read_bytes(), (d / "t.json").read_bytes()))
    assert blobs[0] == blobs[1]
