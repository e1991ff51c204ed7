import csv
import json
import subprocess
import sys

import pytest

from gbw.cli import CSV_COLUMNS, ConfigError, load_config, main


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data, indent=2) if not isinstance(data, str) else data)
    return p


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_norm_task(tmp_path, capsys):
    cfg = write(tmp_path, {"space": "l1", "tasks": [{"op": "norm", "x": [1, -2, 3]}]})
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    (row,) = rows(out / "summary.csv")
    assert tuple(row) == CSV_COLUMNS
    assert float(row["value"]) == 6.0 and row["task_id"] == "t1"
    assert rows(out / "t1.csv") == [row]
    assert "overall: passed" in (out / "summary.txt").read_text()


def test_mixed_tasks_and_determinism(tmp_path):
    cfg = write(tmp_path, {
        "spaces": {"w": {"kind": "WeightedL1", "dim_cap": 8,
                         "weights": {"prefix": [2.0], "tail": {"constant": 1.0}}}},
        "seed": 7,
        "tasks": [
            {"id": "g", "op": "gamma", "space": "w", "x": [1, 1], "m": 1},
            {"id": "s", "op": "sigma", "space": "w", "x": [0, 5, 1], "m": 1, "kind": "LeftDK", "ordering": [2, 3]},
            {"id": "d", "op": "constant", "space": "w", "kind": "Democracy",
             "budget": {"index_window": [1, 8]}},
            {"id": "tr", "op": "truncation", "space": "schreier_m7", "samples": 200},
            {"id": "c", "op": "check", "name": "schreier_m7", "params": {"k_list": [4, 16]}},
        ],
    })
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(cfg), "--out", str(a), "--quiet"]) == 0
    assert main(["run", str(cfg), "--out", str(b), "--quiet", "--jobs", "3"]) == 0
    for f in ("summary.csv", "summary.txt", "g.csv", "tr.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    got = {r["task_id"]: r for r in rows(a / "summary.csv")}
    assert float(got["g"]["value"]) == 2.0
    assert float(got["s"]["value"]) == 6.0
    assert float(got["d"]["value"]) == 2.0
    assert json.loads(got["d"]["witness_json"])["witness"]["A"] == [1]
    assert float(got["tr"]["value"]) <= 1.0
    assert float(got["c"]["value"]) == 1.0
    assert got["c"]["elapsed_ms"] == ""


def test_malformed_weights_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, {"spaces": {"bad": {"kind": "WeightedL1", "dim_cap": 6,
                                               "weights": {"prefix": [1, 1, 0], "tail": {"constant": 1}}}},
                           "tasks": [{"op": "norm", "space": "bad", "x": [1]}]})
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "semi-normalization" in capsys.readouterr().err


def test_json_syntax_error_points_at_line(tmp_path, capsys):
    cfg = write(tmp_path, '{\n  "tasks": [\n    {"op": "norm",, }\n  ]\n}')
    assert main(["run", str(cfg)]) == 2
    assert "cfg.json:3:" in capsys.readouterr().err


@pytest.mark.parametrize("bad, msg", [
    ({"tasks": []}, "tasks"),
    ({"space": "l1", "tasks": [{"op": "frobnicate"}]}, "tasks[0].op"),
    ({"space": "l1", "tasks": [{"op": "norm", "id": "a", "x": [1]}, {"op": "norm", "id": "a", "x": [1]}]}, "duplicate"),
    ({"tasks": [{"op": "norm", "x": [1]}]}, "no defined space"),
    ({"space": "nowhere", "tasks": [{"op": "norm", "x": [1]}]}, "unknown space"),
])
def test_config_errors(tmp_path, bad, msg):
    with pytest.raises(ConfigError, match=msg.replace("[", r"\[").replace("]", r"\]")):
        load_config(write(tmp_path, bad))


def test_failed_check_exit_1(tmp_path, capsys):
    cfg = write(tmp_path, {"tasks": [{"op": "check", "name": "renormed_l1", "params": {"lam": 1.0},
                                      "budget": {"max_support": 3, "index_window": [1, 5]}}]})
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "check failed: renormed_l1" in capsys.readouterr().err


def test_renormed_l1_check_passes(tmp_path, capsys):
    cfg = write(tmp_path, {"tasks": [{"op": "check", "name": "renormed_l1", "params": {"lam": 2.0},
                                      "budget": {"max_support": 4, "index_window": [1, 8]}}]})
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert "passed" in (tmp_path / "o" / "summary.txt").read_text()


def test_describe(capsys):
    assert main(["describe", "schreier_m7"]) == 0
    assert "min F >= |F|" in capsys.readouterr().out
    assert main(["describe", "nope"]) == 2


def test_constants_and_check_subcommands(capsys):
    assert main(["constants", "l1", "--kind", "QuasiGreedy", "--max-support", "3", "--dim-cap", "8"]) == 0
    est = json.loads(capsys.readouterr().out)
    assert est["value"] == 1.0 and est["kind"] == "QuasiGreedy"
    assert main(["constants", "l1", "--kind", "SLC(0.5)"]) == 2
    assert main(["check", "slc_eq_1slc", "--space", "l1", "--budget", '{"max_support": 3}']) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
    assert main(["check", "m2_transport"]) == 2


def test_overflow_exit_3(capsys):
    assert main(["constants", "l1", "--kind", "SLC", "--budget", '{"max_instances": 5}']) == 3


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "gbw", "describe", "l1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("l1:")
