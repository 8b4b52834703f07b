import io
import json

import pytest

import main
from analyzer import SearchBudget, Status
from app import App, Check, analyze_system
from errors import InputFormatError
from formats import Report, exit_code, parse_system
from polyhedron import LinearSystem

SYSTEM2 = {"M": [[1, 1], [-1, 0], [0, -1]], "b": [3, 0, 0]}
SYSTEM3 = {"M": [[3, 1], [0, 1], [-1, 0], [0, -1]], "b": [6, 3, 0, 0]}
SYSTEM4 = {"M": [[2], [3]], "b": [0, 0]}


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
        return str(p)

    return _write


def _run_json(capsys, *argv):
    code = main.run([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# --- analyze ---


def test_analyze_tdi_certified(write, capsys):
    code, report = _run_json(capsys, "analyze", write("s2.json", SYSTEM2))
    assert code == 0
    (v,) = report["verdicts"]
    assert v["status"] == "Certified"
    assert report["theorems"] == ["nondegenerate-tdi-characterization"]
    assert report["schema"] == 1


def test_analyze_tdi_refuted(write, capsys):
    code, report = _run_json(capsys, "analyze", write("s3.json", SYSTEM3), "--check", "tdi")
    assert code == 1
    (v,) = report["verdicts"]
    assert v["status"] == "Refuted"
    assert 1 in v["evidence"]["rows"]


def test_analyze_degenerate_falls_back_to_scan(write, capsys):
    code, report = _run_json(capsys, "analyze", write("s4.json", SYSTEM4), "--box", "1")
    assert code == 1
    (v,) = report["verdicts"]
    assert v["theorem"] == "weight-scan"
    assert v["evidence"]["bad_weight"] == [1]


def test_analyze_td_in_l(write, capsys):
    path = write("s3.json", SYSTEM3)
    code, report = _run_json(capsys, "analyze", path, "--check", "td-in-l", "--primes", "2,3")
    assert code == 0
    assert report["verdicts"][0]["lspec"] == "L({2,3})"
    code, report = _run_json(
        capsys, "analyze", path, "--check", "td-in-l", "--primes", "2", "--box", "1"
    )
    assert code == 1
    assert report["verdicts"][0]["theorem"] == "tilt-characterization"


def test_analyze_near_tdi(write, capsys):
    code, report = _run_json(
        capsys, "analyze", write("s3.json", SYSTEM3), "--check", "near-tdi",
        "--primes", "2,3", "--box", "2",
    )
    assert code == 1
    assert report["verdicts"][0]["evidence"]["prime"] == 2


def test_analyze_text_output(write, capsys):
    code = main.run(["analyze", write("s3.json", SYSTEM3)])
    out = capsys.readouterr().out
    assert code == 1
    assert "❌  TDI in Z: Refuted" in out
    assert "rows: (1, 2, 4)" in out


# --- tilt ---


def test_tilt_command(write, capsys):
    code, report = _run_json(
        capsys, "tilt", write("s2.json", SYSTEM2),
        "--w=0,1", "--face", "1,2", "--downface", "1",
    )
    assert code == 0
    res = report["results"]
    assert res["tilt"] == "u2 = 1"
    assert res["index_set"] == [2]
    assert res["solvability"]["Z"]["solvable"] is True
    assert res["brace"]["gap"] == 1
    assert res["brace_solution"] == ["1"]
    assert report["input"]["optimum"] == "3"


def test_tilt_command_with_lspec(write, capsys):
    code, report = _run_json(
        capsys, "tilt", write("s3.json", SYSTEM3),
        "--w=1,1", "--face", "1,2", "--downface", "2", "--lspec", "Z", "--lspec", "3",
    )
    assert code == 0
    res = report["results"]
    assert res["tilt"] == "3 u1 = 1"
    assert res["solvability"]["Z"]["solvable"] is False
    assert res["solvability"]["L({3})"]["witness"] == ["1/3"]


@pytest.mark.parametrize("downface", ["3", "9"])
def test_tilt_rejects_bad_down_face(write, capsys, downface):
    code = main.run([
        "tilt", write("s2.json", SYSTEM2), "--w=0,1", "--face", "1,2", "--downface", downface,
    ])
    assert code == 3
    assert capsys.readouterr().out == ""


# --- clutter ---


def test_clutter_ideal(write, capsys):
    code, report = _run_json(capsys, "clutter", write("tri.txt", "3\n1 2\n2 3\n1 3\n"), "--ideal")
    assert code == 0
    assert report["results"]["ideal"] is False
    assert report["results"]["fractional_vertex"] == ["1/2", "1/2", "1/2"]


def test_clutter_tdd(write, capsys):
    code, report = _run_json(
        capsys, "clutter", write("path.txt", "3\n1 2\n2 3\n"), "--tdd", "--box", "1"
    )
    assert code == 0
    assert report["verdicts"][0]["theorem"] == "clutter-intersection-3"


def test_clutter_tdd_default_box(write, capsys):
    code, report = _run_json(capsys, "clutter", write("path.txt", "3\n1 2\n2 3\n"), "--tdd")
    assert code == 0
    verdict = report["verdicts"][0]
    assert verdict["status"] == "Certified"
    assert verdict["evidence"]["scan"]["bad_weight"] is None


def test_clutter_blocker(write, capsys):
    code, report = _run_json(capsys, "clutter", write("c.txt", "2\n1\n2\n"), "--blocker")
    assert code == 0
    assert report["results"] == {"blocker": [[1, 2]]}


def test_clutter_everything_by_default(write, capsys):
    code, report = _run_json(capsys, "clutter", write("path.txt", "3\n1 2\n2 3\n"), "--box", "1")
    assert code == 0
    assert {"blocker", "ideal", "profile"} <= set(report["results"])
    assert len(report["verdicts"]) == 1


def test_clutter_containment_error(write, capsys):
    code = main.run(["clutter", write("bad.txt", "3\n1\n1 2\n")])
    assert code == 3
    assert "⊆" in capsys.readouterr().err


# --- 入力エラー ---


@pytest.mark.parametrize(
    "content",
    [
        '{"M": [[1, 1]], "b": [3',
        '{"M": [["1/2", 1]], "b": [3]}',
        '{"M": [[0.5, 1]], "b": [3]}',
        '{"M": [[1, 1]]}',
        '{"M": [[1, 1]], "b": [3, 4]}',
    ],
)
def test_bad_system_input(write, capsys, content):
    assert main.run(["analyze", write("bad.json", content)]) == 3
    assert "❌" in capsys.readouterr().err


def test_missing_file(capsys, tmp_path):
    assert main.run(["analyze", str(tmp_path / "nope.json")]) == 3


def test_usage_errors(capsys):
    assert main.run(["frobnicate"]) == 3
    assert main.run(["analyze"]) == 3
    assert main.run(["--help"]) == 0


def test_parse_system_reports_line():
    text = '{\n  "M": [[1, 1]],\n  "b": ["1/2"]\n}'
    with pytest.raises(InputFormatError) as exc:
        parse_system(text)
    assert exc.value.line == 3


# --- レポート ---


def test_report_is_deterministic_and_round_trips(write):
    path = write("s3.json", SYSTEM3)
    app = App(SearchBudget(weight_box=1), out=io.StringIO())
    first = app.cmd_analyze(path, Check.TDI)
    second = app.cmd_analyze(path, Check.TDI)
    assert first.to_json(include_timing=False) == second.to_json(include_timing=False)
    back = Report.from_json(first.to_json())
    assert back == first
    assert exit_code(back) == 1


def test_exit_code_without_verdicts():
    assert exit_code(Report("tilt", {})) == 0


def test_analyze_system_checks_hierarchy():
    system = LinearSystem.of(SYSTEM2["M"], SYSTEM2["b"])
    (v,) = analyze_system(system, Check.NEAR_TDI, SearchBudget(weight_box=1, prime_sample=(2,)))
    assert v.status is Status.CERTIFIED
