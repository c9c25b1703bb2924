import json
import re
import subprocess
import sys
from fractions import Fraction as F

import pytest

from molpdual.cli import main, parse_instance, InputError
from molpdual.linalg import parse_rational

from conftest import DUAL_VERTICES


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def example_file(tmp_path, capsys):
    path = tmp_path / "example.json"
    assert main(["example", "--out", str(path)]) == 0
    return path


def _variant(tmp_path, example_file, name, edit):
    data = json.loads(example_file.read_text())
    edit(data)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_example_command(example_file):
    data = json.loads(example_file.read_text())
    assert (data["q"], data["n"], data["m"]) == (2, 2, 4)
    assert data["A"][1] == ["8", "2"] and data["b"][1] == "11"
    assert data["P"] == [["1", "0"], ["0", "1"]]


def test_solve_reports_dual_vertices(example_file, capsys):
    code, out, _ = run(["solve", str(example_file)], capsys)
    assert code == 0
    report = json.loads(out)
    assert set(report) >= {"instance", "upper_image", "lower_image_geometric", "lower_image_parametric",
                           "face_lattices", "correspondence", "verdicts"}
    verts = {tuple(parse_rational(x) for x in g["coords"])
             for g in report["lower_image_geometric"]["generators"] if g["type"] == "vertex"}
    assert verts == DUAL_VERTICES


def test_every_rational_round_trips(example_file, capsys):
    _, out, _ = run(["solve", str(example_file)], capsys)
    for token in re.findall(r'"(-?\d+(?:/\d+)?)"', out):
        assert str(parse_rational(token)) == token


def test_solve_zero_rhs(tmp_path, example_file, capsys):
    path = _variant(tmp_path, example_file, "b0.json", lambda d: d.update(b=[0, 0, 0, 0]))
    code, out, _ = run(["solve", str(path)], capsys)
    report = json.loads(out)
    assert code == 0 and report["verdicts"]["all_ok"]
    assert not report["upper_image"]["empty"]


def test_solve_infeasible_in_band(tmp_path, capsys):
    path = tmp_path / "inf.json"
    path.write_text(json.dumps({"n": 1, "m": 2, "q": 2, "P": [[1], [0]], "A": [[1], [-1]], "b": [1, 0]}))
    code, out, _ = run(["solve", str(path)], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["upper_image"]["empty"] and report["status"].startswith("primal infeasible")
    assert run(["verify", str(path)], capsys)[0] == 1


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2,\n  "m": }')
    code, _, err = run(["solve", str(path)], capsys)
    assert code == 2 and "line 2 column" in err


@pytest.mark.parametrize("text, where", [
    ('{"n": 2, "m": 1, "q": 2, "P": [[1, 0], [0, 1]], "A": [[1, "x"]], "b": [0]}', "A[0][1]"),
    ('{"n": 2, "m": 1, "q": 2, "P": [[1, 0], [0]], "A": [[1, 0]], "b": [0]}', "P[1]"),
    ('{"n": 2, "m": 1, "q": 2, "P": [[1, 0], [0, 1]], "A": [[1, 0]], "b": [0.5]}', "b[0]"),
    ('{"n": 2, "m": 1, "q": 1, "P": [[1, 0]], "A": [[1, 0]], "b": [0]}', "q"),
    ('{"n": 2, "m": 1, "P": [[1, 0]], "A": [[1, 0]], "b": [0]}', "'q'"),
    ('[1, 2]', "object"),
])
def test_parse_errors_name_location(text, where):
    with pytest.raises(InputError) as exc:
        parse_instance(text)
    assert where in str(exc.value)


def test_parse_accepts_mixed_scalars():
    inst = parse_instance('{"n": 1, "m": 1, "q": 2, "P": [["1/2"], [-1]], "A": [["3"]], "b": ["-6/4"]}')
    assert inst.P[0][0] == F(1, 2) and inst.b[0] == F(-3, 2)


def test_verify_example_and_variant(tmp_path, example_file, capsys):
    code, out, _ = run(["verify", str(example_file)], capsys)
    verdicts = json.loads(out)["verdicts"]
    assert code == 0
    for key in ("bijection_ok", "inclusion_reversing_ok", "dimension_formula_ok", "slice_identity_ok",
                "strict_positivity_ok"):
        assert verdicts[key] is True
    path = _variant(tmp_path, example_file, "b12.json", lambda d: d["b"].__setitem__(1, "12"))
    assert run(["verify", str(path)], capsys)[0] == 0


def test_inject_fault(example_file, capsys):
    code, out, err = run(["verify", str(example_file), "--inject-fault"], capsys)
    assert code == 1
    assert "bijection" in err
    assert json.loads(out)["verdicts"]["bijection_ok"] is False


def test_plot_example(tmp_path, example_file, capsys):
    out = tmp_path / "figs"
    assert run(["plot", str(example_file), "--out", str(out)], capsys)[0] == 0
    dual = (out / "dual.svg").read_text()
    primal = (out / "primal.svg").read_text()
    para = (out / "parametric.svg").read_text()
    for text in ("(1/3, 5/6)", "(2/3, 7/6)", "(4/5, 11/10)", "(1, 1/2)"):
        assert text in dual
    assert primal.count('class="highlight"') == 4
    assert primal.count('class="vertex"') == 3
    shapes = lambda s: re.findall(r'<(?:line class="highlight"|circle class="vertex")[^>]*>', s)
    assert shapes(para) == shapes(dual)
    assert "(2/3, 1/3, 7/6)" in para


def test_plot_q3_dual_only(tmp_path, capsys):
    path = tmp_path / "q3.json"
    path.write_text(json.dumps({"n": 3, "m": 3, "q": 3, "P": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                "A": [[1, 0, 0], [0, 1, 0], [1, 1, 1]], "b": [0, 0, 1]}))
    out = tmp_path / "figs"
    assert run(["plot", str(path), "--out", str(out)], capsys)[0] == 0
    assert sorted(p.name for p in out.iterdir()) == ["dual.svg"]


def test_plot_unsupported_q(tmp_path, capsys):
    path = tmp_path / "q4.json"
    eye = [[int(i == j) for j in range(4)] for i in range(4)]
    path.write_text(json.dumps({"n": 4, "m": 4, "q": 4, "P": eye, "A": eye, "b": [0] * 4}))
    assert run(["plot", str(path), "--out", str(tmp_path)], capsys)[0] == 3


def test_fuzz_commands(capsys):
    code, out, _ = run(["fuzz", "--count", "0"], capsys)
    assert code == 0 and json.loads(out)["campaign"]["instances_run"] == 0
    first = run(["fuzz", "--seed", "5", "--count", "3"], capsys)
    second = run(["fuzz", "--seed", "5", "--count", "3"], capsys)
    assert first == second and first[0] == 0
    assert run(["fuzz", "--q", "4", "--count", "1"], capsys)[0] == 3


def test_module_entry_point(example_file):
    res = subprocess.run([sys.executable, "-m", "molpdual", "verify", str(example_file)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["verdicts"]["all_ok"]
