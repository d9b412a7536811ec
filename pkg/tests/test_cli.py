"""File format and command-line interface.

Core claims:
    - parse/serialize round-trip graph files, reject malformed input with
      1-based line numbers, and distinguish plain from metric files.
    - Every subcommand produces correct output in text and json modes;
      exit codes are 0 (success), 1 (negative decision), 2 (bad input).
    - JSON reports are deterministic apart from wall_time_ms.
    - The bench subcommand emits a parity-checked CSV.
"""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from chipfire.formats import (
    GraphFormatError,
    format_fraction,
    format_point,
    parse,
    parse_divisor_arg,
    parse_fraction,
    parse_point,
    serialize,
)
from chipfire.graph import Divisor
from chipfire.metric import GraphPoint

K3_TEXT = """# triangle
graph 3
edge 0 1
edge 1 2
edge 0 2
divisor start 5 0 0
divisor flat 1 1 1
"""

SEGMENT_TEXT = """graph 2
edge 0 1 1
divisor twoa v:1=2
divisor mix v:1=-1 e:0@1/2=2
"""


def run_cli(args, text=None):
    return subprocess.run(
        [sys.executable, "-m", "chipfire.cli", *args],
        capture_output=True,
        text=True,
        input=text,
    )


@pytest.fixture()
def k3_file(tmp_path):
    p = tmp_path / "k3.cf"
    p.write_text(K3_TEXT)
    return str(p)


@pytest.fixture()
def seg_file(tmp_path):
    p = tmp_path / "seg.cf"
    p.write_text(SEGMENT_TEXT)
    return str(p)


# -- Format primitives ---------------------------------------------------------

def test_fraction_round_trip():
    for tok in ("3", "-2", "1/2", "-7/3"):
        assert format_fraction(parse_fraction(tok)) == tok
    with pytest.raises(ValueError):
        parse_fraction("1.5.2")


def test_point_round_trip():
    for tok, want in (
        ("v:1", GraphPoint.vertex(1)),
        ("3", GraphPoint.vertex(3)),
        ("e:0@1/2", GraphPoint("e", 0, Fraction(1, 2))),
    ):
        assert parse_point(tok) == want
    assert format_point(GraphPoint("e", 2, Fraction(1, 3))) == "e:2@1/3"
    assert format_point(GraphPoint.vertex(4)) == "v:4"


# -- Parsing ----------------------------------------------------------------------

def test_parse_plain_file():
    gf = parse(K3_TEXT)
    assert not gf.is_metric
    assert gf.graph.n == 3 and gf.graph.m == 3
    assert gf.divisors["start"] == Divisor((5, 0, 0))


def test_parse_metric_file():
    gf = parse(SEGMENT_TEXT)
    assert gf.is_metric
    assert gf.graph.lengths == (Fraction(1),)
    assert gf.divisors["twoa"].get(GraphPoint.vertex(1)) == 2


def test_serialize_round_trip_plain():
    gf = parse(K3_TEXT)
    again = parse(serialize(gf))
    assert again.graph == gf.graph
    assert again.divisors == gf.divisors


def test_serialize_round_trip_metric():
    gf = parse(SEGMENT_TEXT)
    again = parse(serialize(gf))
    assert again.graph == gf.graph
    assert again.divisors == gf.divisors


def test_parse_error_line_numbers():
    bad = "graph 2\nedge 0 0\n"
    with pytest.raises(GraphFormatError) as err:
        parse(bad)
    assert "line 2" in str(err.value)

    bad = "graph 2\nedge 0 1\ndivisor a 1\n"
    with pytest.raises(GraphFormatError) as err:
        parse(bad)
    assert "line 3" in str(err.value)


def test_parse_rejects_mixed_lengths():
    bad = "graph 3\nedge 0 1 2\nedge 1 2\nedge 0 2 1\n"
    with pytest.raises(GraphFormatError):
        parse(bad)


def test_parse_rejects_duplicates():
    with pytest.raises(GraphFormatError):
        parse("graph 2\ngraph 2\nedge 0 1\n")
    with pytest.raises(GraphFormatError):
        parse("graph 2\nedge 0 1\ndivisor a 1 0\ndivisor a 0 1\n")


def test_parse_divisor_arg_forms(tmp_path):
    gf = parse(K3_TEXT)
    assert parse_divisor_arg("start", gf) == Divisor((5, 0, 0))
    assert parse_divisor_arg("2 -1 0", gf) == Divisor((2, -1, 0))
    assert parse_divisor_arg("2,-1,0", gf) == Divisor((2, -1, 0))
    ext = tmp_path / "d.txt"
    ext.write_text("0 4 -4")
    assert parse_divisor_arg(f"@{ext}", gf) == Divisor((0, 4, -4))


# -- Subcommands ------------------------------------------------------------------

def test_cli_reduce_text(k3_file):
    out = run_cli(["reduce", k3_file, "--q", "2", "--divisor", "start"])
    assert out.returncode == 0
    assert "result: 0 1 4" in out.stdout
    assert "script: 3 1 0" in out.stdout


def test_cli_reduce_json_deterministic(k3_file):
    a = run_cli(["reduce", k3_file, "--q", "2", "--divisor", "start", "--format", "json"])
    b = run_cli(["reduce", k3_file, "--q", "2", "--divisor", "start", "--format", "json"])
    assert a.returncode == 0
    da, db = json.loads(a.stdout), json.loads(b.stdout)
    del da["wall_time_ms"], db["wall_time_ms"]
    assert da == db
    assert da["outputs"]["result"] == [0, 1, 4]
    assert da["command"] == "reduce"
    assert "graph_sha256" in da["inputs"]


def test_cli_check_reduced_exit_codes(k3_file):
    ok = run_cli(["check-reduced", k3_file, "--q", "2", "--divisor", "0 1 4"])
    assert ok.returncode == 0
    no = run_cli(["check-reduced", k3_file, "--q", "2", "--divisor", "start"])
    assert no.returncode == 1


def test_cli_tree_round_trip(k3_file):
    out = run_cli(["to-tree", k3_file, "--q", "0", "--divisor", "0 0 1"])
    assert out.returncode == 0
    tree_line = [l for l in out.stdout.splitlines() if l.startswith("tree_edges:")][0]
    edges = tree_line.split(":", 1)[1].split()
    back = run_cli(["from-tree", k3_file, "--q", "0", "--tree", " ".join(edges), "--degree", "1"])
    assert back.returncode == 0
    assert "divisor: 0 0 1" in back.stdout


def test_cli_to_tree_rejects_unreduced(k3_file):
    out = run_cli(["to-tree", k3_file, "--q", "2", "--divisor", "start"])
    assert out.returncode == 2
    assert out.stderr.strip()


def test_cli_count_trees_and_jacobian(k3_file):
    out = run_cli(["count-trees", k3_file])
    assert out.returncode == 0 and "count: 3" in out.stdout
    out = run_cli(["jacobian", k3_file, "--format", "json"])
    rep = json.loads(out.stdout)
    assert rep["outputs"]["invariant_factors"] == [3]
    assert rep["outputs"]["order"] == 3


def test_cli_sample_tree_deterministic(k3_file):
    a = run_cli(["sample-tree", k3_file, "--q", "0", "--seed", "42", "--count", "5", "--format", "json"])
    b = run_cli(["sample-tree", k3_file, "--q", "0", "--seed", "42", "--count", "5", "--format", "json"])
    ta = json.loads(a.stdout)["outputs"]["trees"]
    tb = json.loads(b.stdout)["outputs"]["trees"]
    assert ta == tb and len(ta) == 5


def test_cli_group_add(k3_file):
    out = run_cli(["group-add", k3_file, "--q", "2", "--divisor", "1 0 -1", "--divisor2", "1 0 -1"])
    assert out.returncode == 0
    assert "result: 0 1 -1" in out.stdout


def test_cli_winnable_exit_codes(k3_file):
    win = run_cli(["winnable", k3_file, "--divisor", "2 -1 0"])
    assert win.returncode == 0
    assert "winnable: true" in win.stdout
    lose = run_cli(["winnable", k3_file, "--divisor", "-1 0 0"])
    assert lose.returncode == 1
    assert "winnable: false" in lose.stdout


def test_cli_rank(k3_file):
    yes = run_cli(["rank", k3_file, "--divisor", "flat", "--c", "2"])
    assert yes.returncode == 0
    no = run_cli(["rank", k3_file, "--divisor", "flat", "--c", "3"])
    assert no.returncode == 1


def test_cli_bounds(k3_file):
    out = run_cli(["bounds", k3_file, "--q", "2", "--format", "json"])
    rep = json.loads(out.stdout)
    assert rep["bounds"]["exact"] == "12"
    assert rep["bounds"]["resistance"] == "16"
    assert rep["bounds"]["spectral_is_approximate"] is True


def test_cli_metric_commands(seg_file):
    chk = run_cli(["metric-check", seg_file, "--q", "v:0", "--divisor", "twoa"])
    assert chk.returncode == 1  # two chips at the far end are not reduced
    red = run_cli(["metric-reduce", seg_file, "--q", "v:0", "--divisor", "twoa", "--format", "json"])
    assert red.returncode == 0
    rep = json.loads(red.stdout)
    assert rep["outputs"]["result"] == [["v:0", 2]]
    assert rep["move_counts"]["luo_iterations"] >= 1
    chk2 = run_cli(["metric-check", seg_file, "--q", "v:0", "--divisor", "v:0=2"])
    assert chk2.returncode == 0


def test_cli_bad_input_exit_2(tmp_path, k3_file):
    missing = run_cli(["reduce", str(tmp_path / "nope.cf"), "--q", "0", "--divisor", "1 0 0"])
    assert missing.returncode == 2
    bad = tmp_path / "bad.cf"
    bad.write_text("graph 2\nedge 0 0\n")
    loops = run_cli(["reduce", str(bad), "--q", "0", "--divisor", "1 0"])
    assert loops.returncode == 2
    assert "line 2" in loops.stderr
    badq = run_cli(["reduce", k3_file, "--q", "7", "--divisor", "start"])
    assert badq.returncode == 2


def test_cli_metric_command_on_plain_file(k3_file):
    out = run_cli(["metric-reduce", k3_file, "--q", "v:0", "--divisor", "start"])
    assert out.returncode == 2


def test_cli_bench_smoke():
    out = run_cli(["bench", "--sizes", "6", "--reps", "1", "--seed", "3"])
    assert out.returncode == 0
    lines = [l for l in out.stdout.splitlines() if l.strip()]
    assert lines[0].startswith("n,m,op,backend")
    assert len(lines) > 1
