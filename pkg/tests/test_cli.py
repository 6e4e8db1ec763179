import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from mobb.cli import BENCH_COLUMNS, STATS_SCHEMA, main, run
from mobb.instances import generate_random, read_generic, write_generic
from mobb.oracle import brute_force_front
from mobb.search import SolveConfig


@pytest.fixture
def tiny_kp(tmp_path):
    inst = generate_random("kp", 3, 8, 1)
    path = tmp_path / "tiny.txt"
    path.write_text(write_generic(inst))
    return path


def test_solve_defaults(tiny_kp, tmp_path):
    out = tmp_path / "front.csv"
    assert main(["solve", str(tiny_kp), "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    inst = read_generic(tiny_kp)
    assert rows[0] == [f"z{k + 1}" for k in range(3)] + [f"x{j + 1}" for j in range(8)]
    got = sorted(tuple(int(v) for v in r[:3]) for r in rows[1:])
    ref = sorted(inst.reported(s.image) for s in brute_force_front(inst))
    assert got == ref
    assert rows[1:] == sorted(rows[1:], key=lambda r: [int(v) for v in r[:3]])


def test_stats_document(tiny_kp, tmp_path):
    stats = tmp_path / "s.json"
    assert main(["solve", str(tiny_kp), "--out", str(tmp_path / "f.csv"), "--stats", str(stats)]) == 0
    doc = json.loads(stats.read_text())
    jsonschema.validate(doc, STATS_SCHEMA)
    assert doc["config"]["enum_threshold"] == 14
    assert doc["config"]["enum_leaf_budget"] == 16384
    assert doc["config"]["ob_mode"] == "fob" and doc["config"]["node_rule"] == "bbwsn"
    t = doc["timings"]
    assert t["time_lbs"] + t["time_probing"] + t["time_gap_update"] <= t["time_total"] + 1e-9


def test_bbgap_records_gap_update_time(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text(write_generic(generate_random("kp", 3, 12, 2)))
    stats = tmp_path / "s.json"
    assert main(["solve", str(path), "--node", "bbgap", "--enum", "0", "--out", str(tmp_path / "f.csv"),
                 "--stats", str(stats)]) == 0
    doc = json.loads(stats.read_text())
    jsonschema.validate(doc, STATS_SCHEMA)
    assert doc["timings"]["time_gap_update"] > 0


def test_schema_rejects_malformed_documents(tiny_kp, tmp_path):
    doc = run(read_generic(tiny_kp), SolveConfig()).stats_document()
    jsonschema.validate(doc, STATS_SCHEMA)
    for broken in ({**doc, "version": 99}, {**doc, "extra": 1},
                   {k: v for k, v in doc.items() if k != "counters"}):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(broken, STATS_SCHEMA)


@pytest.mark.parametrize("argv", [
    ["solve", "{f}", "--ob", "xyz"],
    ["solve", "{f}", "--enum", "-3"],
    ["solve", "{f}", "--time-limit", "0"],
    ["solve", "{f}", "--bogus"],
    ["solve", "{missing}"],
    ["frobnicate"],
    [],
])
def test_errors_exit_one(argv, tiny_kp, tmp_path, capsys):
    argv = [a.format(f=tiny_kp, missing=tmp_path / "nope.txt") for a in argv]
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_file_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2 1\nmin 1 2\nmin 1 x\n")
    assert main(["solve", str(bad)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_unwritable_output_exits_one(tiny_kp, tmp_path):
    assert main(["solve", str(tiny_kp), "--out", str(tmp_path / "no" / "dir" / "f.csv")]) == 1
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["generate", "kp", "3", "6", "--out-dir", str(blocker / "sub")]) == 1


def test_time_limit_exits_two(tmp_path):
    path = tmp_path / "big.txt"
    path.write_text(write_generic(generate_random("kp", 4, 30, 1)))
    stats = tmp_path / "s.json"
    code = main(["solve", str(path), "--time-limit", "0.2", "--node", "df", "--out", str(tmp_path / "f.csv"),
                 "--stats", str(stats)])
    assert code == 2
    assert json.loads(stats.read_text())["complete"] is False


def test_generate_is_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "kp", "3", "10", "--seeds", "1..10", "--out-dir", str(a)]) == 0
    assert main(["generate", "kp", "3", "10", "--seeds", "1..10", "--out-dir", str(b)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(f"kp_p3_10_s{s}.txt" for s in range(1, 11))
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert main(["generate", "uflp", "3", "2x3", "--seeds", "4,5", "--out-dir", str(a)]) == 0
    assert (a / "uflp_p3_2x3_s4.txt").exists()
    assert main(["generate", "kp", "3", "10", "--seeds", "5..1"]) == 1


def test_bench_grid(tmp_path):
    d = tmp_path / "inst"
    assert main(["generate", "kp", "3", "8", "--seeds", "1..2", "--out-dir", str(d)]) == 0
    out = tmp_path / "bench.csv"
    assert main(["bench", str(d), "--ob", "fob,cb,nob", "--probing", "vf,nvf", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == BENCH_COLUMNS
    assert "pct_lb_set" in BENCH_COLUMNS and "pct_probing" in BENCH_COLUMNS
    assert len(rows) == 12
    for name in ("kp_p3_8_s1", "kp_p3_8_s2"):
        mine = [r for r in rows if r["instance"] == name]
        assert len(mine) == 6
        assert {(r["ob"], r["probing"]) for r in mine} == {(o, p) for o in ("fob", "cb", "nob") for p in ("vf", "none")}
        assert len({r["front_size"] for r in mine}) == 1
    for r in rows:
        assert 0 <= float(r["pct_lb_set"]) + float(r["pct_probing"]) <= 100.0 + 1e-6
    assert main(["bench", str(tmp_path / "empty")]) == 1


def test_front_csv_byte_identical(tiny_kp, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"f{i}.csv"
        assert main(["solve", str(tiny_kp), "--node", "bbgap", "--cuts", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    inst = read_generic(tiny_kp)
    assert run(inst, SolveConfig()).to_bytes() == run(inst, SolveConfig()).to_bytes()


def test_module_entry_point(tiny_kp):
    proc = subprocess.run([sys.executable, "-m", "mobb", "solve", str(tiny_kp), "--enum", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    rows = list(csv.reader(io.StringIO(proc.stdout)))
    assert len(rows) > 1 and len(rows[0]) == 11
