import json
import math
import subprocess
import sys

import pytest

MONOMIAL = {"d": 2, "P": ["1", "0", "0"], "Q": ["0", "0", "1"]}
Z2_MINUS_1 = {"d": 2, "P": ["1", "0", "-1"], "Q": ["0", "0", "1"]}
THREE_Z2 = {"d": 2, "P": ["3", "0", "0"], "Q": ["0", "0", "1"]}


@pytest.fixture
def map_file(tmp_path):
    def write(obj, name="m.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "dynheights", *args],
        capture_output=True,
        text=True,
        timeout=240,
    )
    return proc


def test_resultant_output(map_file):
    proc = run_cli("resultant", "--map", map_file(MONOMIAL))
    assert proc.returncode == 0
    assert proc.stdout == '{"res":"1"}\n'


def test_height_output(map_file):
    proc = run_cli("height", "--map", map_file(MONOMIAL), "--point", "[2:1]")
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["total"]["value"] == pytest.approx(math.log(2), abs=1e-10)
    assert "err" in out["total"]


def test_orbit_output(map_file):
    proc = run_cli("orbit", "--map", map_file(Z2_MINUS_1), "--point", "[0:1]")
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["status"] == "preperiodic" and out["tail"] == 0 and out["cycle"] == 2


def test_minres_output(map_file):
    proc = run_cli("minres", "--map", map_file(THREE_Z2), "--prime", "3")
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out == {
        "conjugator": [["3", "0"], ["0", "1"]],
        "method": "descent",
        "ord_min": 0,
        "ord_start": 2,
        "p": 3,
    }


def test_green_output(map_file):
    proc = run_cli(
        "green", "--map", map_file(MONOMIAL), "--x", "[2:1]", "--y", "[3:1]", "--place", "inf"
    )
    out = json.loads(proc.stdout)
    assert out["value"] == pytest.approx(math.log(6), abs=1e-9)
    assert set(out) == {"value", "err", "exact"}


def test_census_csv(map_file):
    proc = run_cli(
        "census", "--map", map_file(MONOMIAL), "--bound", "1.0", "--format", "csv"
    )
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "point,weil_h,hhat,hhat_err,preperiodic,tail,cycle"
    assert any(line.startswith("[1:1]") for line in lines[1:])


def test_invalid_point_exits_2(map_file):
    proc = run_cli("height", "--map", map_file(MONOMIAL), "--point", "oops")
    assert proc.returncode == 2
    assert "error" in proc.stderr


def test_unknown_subcommand_exits_2(map_file):
    proc = run_cli("frobnicate", "--map", map_file(MONOMIAL))
    assert proc.returncode == 2


def test_degenerate_map_exits_2(map_file):
    proc = run_cli("resultant", "--map", map_file({"d": 2, "P": ["1", "0", "0"], "Q": ["2", "0", "0"]}))
    assert proc.returncode == 2


def test_milnor_on_cubic_exits_2(map_file):
    cubic = {"d": 3, "P": ["1", "0", "0", "0"], "Q": ["0", "0", "0", "1"]}
    proc = run_cli("milnor", "--map", map_file(cubic))
    assert proc.returncode == 2


def test_undecided_orbit_exits_3(map_file):
    proc = run_cli(
        "orbit", "--map", map_file(Z2_MINUS_1), "--point", "[2:1]", "--budget", "1"
    )
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["status"] == "undecided"


def test_escape_cli(map_file):
    proc = run_cli(
        "escape", "--map", map_file(THREE_Z2), "--place", "3", "--z", "[1/27:1]",
        "--delta", "0.5",
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["escapes"] is True


def test_gap_cli(map_file):
    proc = run_cli("gap", "--map", map_file(MONOMIAL), "--bound", "1.1")
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["min_certified"] == pytest.approx(math.log(2), abs=1e-8)
    assert out["observational"] is True


def test_badplaces_cli(map_file):
    half = {"d": 2, "P": ["2", "0", "1"], "Q": ["0", "0", "2"]}
    proc = run_cli("badplaces", "--map", map_file(half))
    out = json.loads(proc.stdout)
    assert out["bad_primes"] == [[2, 2]] and out["s"] == 2


def test_compare_cli(map_file):
    proc = run_cli(
        "compare", "--map", map_file(MONOMIAL, "a.json"), "--map", map_file(Z2_MINUS_1, "b.json")
    )
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert len(out["rows"]) == 2 and out["observational"]


def test_energy_cli(map_file):
    proc = run_cli(
        "energy", "--map", map_file(MONOMIAL), "--points", "[2:1];[3:1]", "--place", "all"
    )
    out = json.loads(proc.stdout)
    assert out["ordered_sum"]["value"] == pytest.approx(2 * math.log(6), abs=1e-9)


def test_manifest_and_reproducibility(map_file, tmp_path):
    mpath = map_file(Z2_MINUS_1)
    man1 = tmp_path / "man1.json"
    man2 = tmp_path / "man2.json"
    args = ["census", "--map", mpath, "--bound", "1.4", "--t-fraction", "0.3"]
    p1 = run_cli("--manifest", str(man1), *args, "--threads", "1")
    p2 = run_cli("--manifest", str(man2), *args, "--threads", "4")
    assert p1.returncode == 0 and p2.returncode == 0
    assert p1.stdout == p2.stdout  # byte-identical across thread counts
    m1 = json.loads(man1.read_text())
    m2 = json.loads(man2.read_text())
    assert m1["output_digest"] == m2["output_digest"]
    assert m1["map_hash"] == m2["map_hash"]
    assert m1["tool_version"]


def test_plot_svg(map_file, tmp_path):
    svg = tmp_path / "scatter.svg"
    proc = run_cli(
        "census", "--map", map_file(MONOMIAL), "--bound", "1.0", "--plot", str(svg)
    )
    assert proc.returncode == 0
    content = svg.read_text()
    assert content.startswith("<svg") and "circle" in content
