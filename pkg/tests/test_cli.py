import json
import subprocess
import sys

import pytest

from eqwalk.cli import build_parser, main
from eqwalk.experiments import CSV_FIELDS, read_results


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_constants(capsys):
    code, out, _ = run(["constants"], capsys)
    data = json.loads(out)
    assert code == 0
    assert abs(data["J"] - 4.0) < 1e-8
    assert data["two_over_pi_squared"] == pytest.approx(0.20264236728467555)
    assert data["inner_integral"]["0"] == pytest.approx(3.141592653589793)


def test_walk_then_count(tmp_path, capsys):
    w = tmp_path / "w.json"
    assert run(["walk", "--n", "2", "--seed", "1", "--out", str(w)], capsys)[0] == 0
    assert len(json.loads(w.read_text())) == 3
    code, out, _ = run(["count", "--input", str(w)], capsys)
    assert code == 0 and json.loads(out)["count"] == 0


def test_polygon_output_is_closed_and_counted_as_polygon(tmp_path, capsys):
    p = tmp_path / "p.json"
    assert run(["polygon", "--n", "12", "--seed", "3", "--out", str(p)], capsys)[0] == 0
    verts = json.loads(p.read_text())
    assert verts[0] == verts[-1] == [0, 0]
    code, out, _ = run(["count", "--input", str(p), "--counter", "naive"], capsys)
    res = json.loads(out)
    assert res["closed"] and res["pairs_examined"] == 12 * 11 // 2 - 12
    code, out, _ = run(["count", "--input", str(p), "--kind", "walk", "--counter", "naive"], capsys)
    assert not json.loads(out)["closed"]


def test_walk_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        run(["walk", "--n", "50", "--seed", "9", "--out", str(f)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_mean_writes_schema(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run(["mean", "--kind", "walk", "--n", "64,128,256", "--samples", "50",
                      "--seed", "42", "--out", str(out), "--threads", "2"], capsys)
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_FIELDS)
    rows = read_results(out)
    assert [r.n for r in rows] == [64, 128, 256]
    assert all(r.wall_ms is None for r in rows)


def test_mean_is_byte_identical_across_threads(tmp_path, capsys):
    files = []
    for t in ("1", "4"):
        f = tmp_path / f"m{t}.csv"
        run(["mean", "--n", "32,64", "--samples", "40", "--seed", "5", "--threads", t, "--out", str(f)], capsys)
        files.append(f.read_bytes())
    assert files[0] == files[1]


def test_variance_json_and_sample_floor(tmp_path, capsys):
    code, _, err = run(["variance", "--n", "16", "--samples", "50"], capsys)
    assert code == 2 and "--samples" in err
    out = tmp_path / "v.json"
    code, _, _ = run(["variance", "--n", "16", "--samples", "200", "--format", "json", "--out", str(out)], capsys)
    assert code == 0 and json.loads(out.read_text())[0]["n"] == 16


def test_probe_em(capsys):
    code, out, _ = run(["probe-em", "--m", "5", "--samples", "2000", "--seed", "3"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("kind,") and lines[1].startswith("em,5,2000,")


def test_probe_covar(capsys):
    code, out, _ = run(["probe-covar", "--n", "10", "--pattern", "disjoint", "--gaps", "1,1,1,3",
                        "--samples", "2000"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["pairs"] == [[1, 3], [5, 7]]
    assert 0 <= data["p_joint"] <= 1


def test_density(capsys):
    code, out, _ = run(["density", "--n", "6", "--step", "1"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,density,gaussian,difference" and len(lines) == 8


@pytest.mark.parametrize("argv, flag", [
    (["mean", "--n", "64", "--samples", "1"], "--samples"),
    (["mean", "--n", "64,32"], "--n"),
    (["mean", "--n", "abc"], "--n"),
    (["mean", "--n", "8", "--threads", "0"], "--threads"),
    (["walk", "--n", "0"], "--n"),
    (["walk", "--n", "3,4"], "--n"),
    (["polygon", "--n", "4"], "--n"),
    (["density", "--n", "4"], "--n"),
    (["probe-covar", "--n", "7", "--pattern", "nested", "--gaps", "1,1,1,1"], "--gaps"),
    (["probe-covar", "--n", "9", "--pattern", "nested", "--gaps", "1,1,1"], "--gaps"),
    (["probe-em", "--m", "5", "--samples", "10"], "--samples"),
    (["count", "--input", "/nonexistent/x.json"], "--input"),
    (["mean", "--n", "8", "--counter", "fast"], "--counter"),
    (["walk", "--n", "3", "--bogus", "1"], "--bogus"),
])
def test_usage_errors_exit_2_and_name_the_flag(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert flag in err


def test_bad_input_content(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("[[0, 0]]")
    assert run(["count", "--input", str(f)], capsys)[0] == 2
    f.write_text("{nope")
    assert run(["count", "--input", str(f)], capsys)[0] == 2


def test_runtime_failure_exits_1(tmp_path, capsys):
    out = tmp_path / "missing-dir" / "r.csv"
    code, _, err = run(["mean", "--n", "8", "--samples", "5", "--out", str(out)], capsys)
    assert code == 1 and "missing-dir" in err


def test_every_subcommand_help_lists_defaults():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, sp in sub.choices.items():
        text = sp.format_help()
        for action in sp._actions:
            if action.option_strings and action.dest != "help":
                assert action.option_strings[0] in text, (name, action.dest)
                if action.default is not None and action.default is not False and not action.required:
                    assert "default" in text, name


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "eqwalk", "constants"], capture_output=True, text=True)
    assert r.returncode == 0 and '"J"' in r.stdout
    r = subprocess.run([sys.executable, "-m", "eqwalk"], capture_output=True, text=True)
    assert r.returncode == 2
