import csv
import io
import subprocess
import sys

import pytest

from mwsnsim.cli import cli_dispatch
from mwsnsim.config import CONFIG_KEYS
from mwsnsim.io import HISTOGRAM_HEADER, SNAPSHOT_HEADER, SWEEP_HEADER, sweep_csv_text, write_sweep_csv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_analyze_golden_values():
    code, out, _ = run("analyze", "--pd", "0.9", "0.99", "--td", "500", "1000")
    assert code == 0
    for line in [
        "min_nodes_static(pd=0.9) = 47",
        "min_nodes_static(pd=0.99) = 94",
        "min_nodes_mobile(pd=0.9, t=500) = 12",
        "min_nodes_mobile(pd=0.99, t=1000) = 13",
        "nodes_no_overlap(td=1000) = 3",
        "detect_prob_static(n=10) = 0.387909",
    ]:
        assert line in out.splitlines()


def test_analyze_single_pd():
    code, out, _ = run("analyze", "--pd", "0.99", "--td", "1000")
    assert code == 0 and "min_nodes_mobile(pd=0.99, t=1000) = 13" in out


def test_simulate_prints_aggregates(tmp_path):
    dest = tmp_path / "one.csv"
    code, out, _ = run("simulate", "--model", "static", "--n", "10", "--runs", "50",
                       "--target", "stationary", "--td", "100", "--out", str(dest))
    assert code == 0 and "detection_mean=" in out
    lines = dest.read_text(encoding="utf-8").split("\n")
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert lines[1].startswith("static,10,100,") and len(lines[1].split(",")) == 8
    assert lines[2] == ""


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for dest in (a, b):
        assert run("simulate", "--runs", "30", "--seed", "5", "--out", str(dest))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_reparses_and_repeats(tmp_path):
    args = ["sweep", "--runs", "5", "--n-values", "2,10", "--td-values", "100",
            "--models", "random_walk,coverage_based"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*args, "--out", str(a))[0] == 0
    assert run(*args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    with open(a, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == list(SWEEP_HEADER)
    assert [(r["model"], r["n_nodes"]) for r in rows] == [
        ("coverage_based", "2"), ("coverage_based", "10"), ("random_walk", "2"), ("random_walk", "10"),
    ]
    assert all(r["runs"] == "5" for r in rows)


def test_sweep_to_stdout():
    code, out, _ = run("sweep", "--runs", "2", "--n-values", "2", "--td-values", "100", "--models", "static")
    assert code == 0 and out.startswith("model,n_nodes")


def test_sweep_bad_config_leaves_no_file(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text("runs = 5\nwidth = 3\n", encoding="utf-8")
    dest = tmp_path / "out.csv"
    code, _, err = run("sweep", "--config", str(cfg), "--out", str(dest))
    assert code == 1 and "width" in err
    assert not dest.exists() and list(tmp_path.iterdir()) == [cfg]


def test_sweep_grid_guard_is_config_error(tmp_path):
    dest = tmp_path / "out.csv"
    code, _, _ = run("sweep", "--dt", "9", "--target", "random_walk", "--out", str(dest))
    assert code == 1 and not dest.exists()


@pytest.mark.parametrize("argv", [
    ["simulate", "--range", "-5"],
    ["frobnicate"],
    ["simulate", "--config", "/nonexistent/path.cfg"],
    ["snapshot"],
])
def test_config_errors_exit_1(argv):
    assert run(*argv)[0] == 1


def test_unwritable_output_exits_2(tmp_path):
    code, _, err = run("simulate", "--runs", "2", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "x.csv" in err


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_nodes = 3\nruns = 4\n", encoding="utf-8")
    dest = tmp_path / "o.csv"
    assert run("simulate", "--config", str(cfg), "--n-nodes", "7", "--out", str(dest))[0] == 0
    row = dest.read_text(encoding="utf-8").split("\n")[1].split(",")
    assert row[1] == "7" and row[-1] == "4"


def test_every_config_key_has_a_flag():
    from mwsnsim.cli import _build_parser

    sim = _build_parser()._subparsers._group_actions[0].choices["simulate"]
    flags = {s for a in sim._actions for s in a.option_strings}
    for key in CONFIG_KEYS:
        assert "--" + key.replace("_", "-") in flags


def test_snapshot_outputs(tmp_path):
    pos, hist = tmp_path / "p.csv", tmp_path / "h.csv"
    code, _, _ = run("snapshot", "--n", "5", "--runs", "3", "--times", "0,100",
                     "--out", str(pos), "--hist-out", str(hist))
    assert code == 0
    with open(pos, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == SNAPSHOT_HEADER and len(rows) == 10
    with open(hist, newline="") as fh:
        h = list(csv.DictReader(fh))
    assert tuple(h[0]) == HISTOGRAM_HEADER
    assert sum(int(r["count"]) for r in h) == 2 * 3 * 5
    assert h[0]["bin_left_m"] == "0" and h[0]["bin_right_m"] == "50"


def test_minnodes_analytic():
    code, out, _ = run("minnodes", "--pd", "0.9", "--td", "500")
    assert code == 0 and "min_nodes_mobile(pd=0.9, t=500) = 12" in out


def test_empty_sweep_csv_is_header_only(tmp_path):
    assert sweep_csv_text([]) == ",".join(SWEEP_HEADER) + "\n"
    write_sweep_csv([], tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_bytes() == (",".join(SWEEP_HEADER) + "\n").encode()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mwsnsim", "analyze", "--pd", "0.9"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "min_nodes_static(pd=0.9) = 47" in proc.stdout
