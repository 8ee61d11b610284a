import io
import json
import math
import subprocess
import sys

import pytest

from golden import TABLES
from nonlocality.cli import parse_angle, parse_observable, parse_observables, run
from nonlocality.empirical import deserialize


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_table_support_golden():
    code, out, _ = call("table", "--state", "fd:XOR", "--obs", "Y/Z", "--support")
    assert code == 0
    rows = [line.split("|")[1].split() for line in out.splitlines()[2:]]
    assert [[int(v) for v in r] for r in rows] == TABLES["XOR"]


def test_table_csv_and_dp():
    code, out, _ = call("table", "--state", "bell:+", "--obs", "A/B", "--dp", "2")
    assert code == 0 and "0.43" in out and "0.07" in out
    code, out, _ = call("table", "--state", "fd:AND", "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("context,")


def test_json_roundtrip_through_file(tmp_path):
    code, out, _ = call("table", "--state", "fd:NAND", "--format", "json")
    assert code == 0
    model = deserialize(out)
    assert model.exact and model.n == 3
    path = tmp_path / "m.json"
    path.write_text(out)
    code, out2, _ = call("classify", "--model", str(path))
    assert code == 0 and out2.splitlines()[0] == "Logical"


@pytest.mark.parametrize("argv,first", [
    (("classify", "--state", "fd:XOR"), "Strong"),
    (("classify", "--state", "ghz:3", "--obs", "X/Y"), "Strong"),
    (("classify", "--state", "dict:3,1,+", "--obs", "A/B"), "Weak"),
    (("classify", "--state", "fd:0"), "NonContextual"),
    (("classify", "--state", "dicke:4,1"), "Logical"),
])
def test_classify(argv, first):
    code, out, _ = call(*argv)
    assert code == 0 and out.splitlines()[0] == first


def test_classify_json():
    code, out, _ = call("classify", "--state", "bell:+", "--obs", "A/B", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["label"] == "Weak" and doc["lp"]["status"] == "infeasible"


def test_witness_and_certificate():
    code, out, _ = call("witness", "--state", "dicke:3,2")
    assert code == 0 and "Logical" in out and "X/Z" in out
    code, out, _ = call("certificate", "--dicke", "4,1")
    assert code == 0 and out.startswith("logical; violation 1/2")
    code, out, _ = call("certificate", "--dicke", "3,2", "--format", "json")
    assert json.loads(out)["violation"] == "1/4"


def test_bellcheck_small():
    code, out, _ = call("bellcheck", "--res", "2")
    assert code == 0 and out.startswith("PASS")


def test_sweep_to_file(tmp_path):
    path = tmp_path / "sweep.csv"
    code, out, _ = call("sweep", "--nvars", "2", "--out", str(path))
    assert code == 0 and "0 disagreements" in out
    assert len(path.read_text().splitlines()) == 17


@pytest.mark.parametrize("argv", [
    ("classify", "--state", "dicke:3,3"),
    ("classify", "--state", "fd:q1+"),
    ("classify", "--state", "fd:XOR", "--obs", "Y/Z,Y/Z"),
    ("classify", "--state", "fd:XOR", "--obs", "Y/Y"),
    ("classify", "--state", "fd:XOR", "--obs", "Q/Z"),
    ("classify", "--model", "/nonexistent.json"),
    ("certificate", "--dicke", "2,1"),
    ("certificate", "--dicke", "three"),
    ("classify",),
    ("nosuchcommand",),
])
def test_validation_errors_exit_1(argv):
    code, _, err = call(*argv)
    assert code == 1


def test_size_bound_exit_2():
    code, _, err = call("classify", "--state", "ghz:15")
    assert code == 2 and "error" in err
    code, _, _ = call("sweep", "--nvars", "5")
    assert code == 2


def test_deterministic_output():
    a = call("table", "--state", "dicke:3,1", "--obs", "U(pi/2,pi/8)/U(pi/2,5pi/8)")
    b = call("table", "--state", "dicke:3,1", "--obs", "U(pi/2,pi/8)/U(pi/2,5pi/8)")
    assert a == b and a[0] == 0


def test_angle_and_observable_parsing():
    assert parse_angle("5pi/8") == pytest.approx(5 * math.pi / 8)
    assert parse_angle("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_angle("0.25") == 0.25
    for bad in ("pi/0", "__import__('os')", "2**3"):
        with pytest.raises(ValueError):
            parse_angle(bad)
    u = parse_observable("U(pi/2, pi/8)")
    assert u.theta == pytest.approx(math.pi / 2) and u.phi == pytest.approx(math.pi / 8)
    pairs = parse_observables("X/Z,U(pi/2,0)/Y", 2)
    assert pairs[0][0].name == "X" and pairs[1][1].name == "Y"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonlocality", "certificate", "--dicke", "3,2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "violation 1/4" in proc.stdout
