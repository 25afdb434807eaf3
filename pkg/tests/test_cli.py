import json

import pytest

from waveset.cli import EXIT_BAD_INPUT, main
from waveset.regions import Region, load_region


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize(
    "matrix, code, rule",
    [
        ("2", 0, "R1-eigenvalues-at-least-one"),
        ("[2, 0.5]", 1, "R0-unimodular-determinant"),
        ("[[1,1],[-1,1]]", 0, None),
    ],
)
def test_analyze_exit_codes(capsys, matrix, code, rule):
    got, out = run(capsys, "analyze", "--matrix", matrix, "--jmax", "8")
    assert got == code
    report = json.loads(out)
    assert "tool_version" in report and report["seed"] == 0
    if rule:
        assert report["verdict"]["rule"] == rule


def test_analyze_from_spec_file(capsys, tmp_path):
    spec = tmp_path / "p.json"
    spec.write_text(json.dumps({"matrix": [[4, 0], [0, 0.5]], "lattice": [[1, 0], ["sqrt(2)", 1]], "jmax": 10}))
    code, out = run(capsys, "analyze", "--spec", str(spec))
    assert code == 0
    assert json.loads(out)["verdict"]["rule"] == "R3-two-dimensional-kernel"


def test_count_csv(capsys):
    code, out = run(capsys, "count", "--matrix", "[2, 0.5]", "--jmax", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("j,")
    assert [int(l.split(",")[1]) for l in lines[1:]] == [5, 9, 17, 33, 65]


def test_count_json(capsys):
    code, out = run(capsys, "count", "--matrix", "[2, 0.5]", "--jmax", "4", "--format", "json")
    data = json.loads(out)
    assert code == 0 and "diagnostics" in data


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--matrix", "[[1,2],[2,4]]"],
        ["analyze", "--matrix", "[[1,2"],
        ["analyze", "--matrix", "2", "--radius", "-1"],
        ["analyze", "--matrix", "[2,3]", "--lattice", "[[1,0,0]]"],
        ["nonsense"],
    ],
)
def test_bad_input_exit_code(capsys, argv):
    assert main(argv) == EXIT_BAD_INPUT


def test_construct_then_verify(capsys, tmp_path):
    out = tmp_path / "run"
    code, _ = run(capsys, "construct", "--matrix", "2", "--out", str(out))
    assert code == 0
    for name in ("region.json", "trace.csv", "region.svg", "report.json"):
        assert (out / name).exists()
    region = load_region(out / "region.json")
    assert region.dim == 1
    code, _ = run(capsys, "verify", str(out / "region.json"), "--matrix", "2", "--tol", "1/1000")
    assert code == 0


def test_verify_rejects_square(capsys, tmp_path):
    path = tmp_path / "sq.json"
    path.write_text(json.dumps(Region.box([0, 0], [1, 1]).to_json()))
    assert main(["verify", str(path), "--matrix", "[2, 2]"]) == 1


def test_render(capsys, tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(json.dumps(Region.polygon([(0, 0), (1, 0), (0, 1)]).to_json()))
    code, out = run(capsys, "render", str(path))
    assert code == 0 and out.lstrip().startswith("<svg")


@pytest.mark.parametrize("name, code", [("shannon", 0), ("iw2d", 0), ("quincunx", 0), ("obvious", 1), ("lcc", 0)])
def test_demos(capsys, name, code):
    argv = ["demo", name, "--jmax", "8"]
    assert run(capsys, *argv)[0] == code


def test_outputs_are_deterministic(capsys, tmp_path):
    for i in (1, 2):
        assert main(["construct", "--matrix", "2", "--out", str(tmp_path / str(i))]) in (0, 1)
    for name in ("region.json", "trace.csv", "report.json"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()
    a, b = run(capsys, "analyze", "--matrix", "[[1,1],[-1,1]]"), run(capsys, "analyze", "--matrix", "[[1,1],[-1,1]]")
    assert a == b


def test_thread_cap_validated(capsys, monkeypatch):
    monkeypatch.setenv("WAVESET_THREADS", "zero")
    assert main(["analyze", "--matrix", "2"]) == EXIT_BAD_INPUT
