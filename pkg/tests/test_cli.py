import json
from pathlib import Path

import pytest

from qtate import cli, scatter
from qtate.scalars import Scalar

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = cli.main(["-o", str(out), *argv])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_norm_gauss(tmp_path):
    code, out = run(tmp_path, "norm", "gauss", "--element", str(GOLDEN / "f.json"), "--rho", "0,0")
    assert code == 0 and out == {"lognorm": "0"}
    code, out = run(tmp_path, "norm", "gauss", "--element", str(GOLDEN / "f.json"), "--rho", "1/2,2")
    assert out == {"lognorm": "3"}


def test_stdout(capsys):
    assert cli.main(["norm", "gauss", "--element", str(GOLDEN / "f.json"), "--rho", "0,0"]) == 0
    assert json.loads(capsys.readouterr().out) == {"lognorm": "0"}


@pytest.mark.parametrize("argv", [
    ["norm", "check", "--pairs", "30"],
    ["norm", "check", "--pairs", "30", "--free"],
    ["seminorm", "check", "--pairs", "20"],
    ["seminorm", "check", "--pairs", "20", "--kind", "torus"],
    ["sheaf", "check", "--trials", "20"],
    ["sheaf", "check", "--trials", "20", "--convention", "pullback"],
    ["k3", "sweep", "--chart", "2", "--grid", "8"],
    ["k3", "glue", "--overlap", "13"],
    ["k3", "conventions"],
])
def test_suites_pass_and_are_deterministic(tmp_path, argv):
    code, first = run(tmp_path, "--seed", "3", *argv)
    code2, second = run(tmp_path, "--seed", "3", *argv)
    assert code == code2 == 0
    assert first == second
    assert first.get("ok", True)


def test_check_failure_exit_code(tmp_path):
    # at q = 1 every orientation works, so the oracle is not unique
    code, out = run(tmp_path, "k3", "conventions", "--q", "1")
    assert code == 1 and not out["unique"]


def test_k3_verify_at_q_one(tmp_path):
    code, out = run(tmp_path, "k3", "verify", "--chart", "3", "--q", "1")
    assert code == 0 and out == {"residuals": ["0"] * 4}


def test_scatter_wall_roundtrip(tmp_path):
    code, out = run(tmp_path, "scatter", "wall", "--alpha", "0,1", "--coeffs", "1", "--q", "1+t")
    assert code == 0
    phi = scatter.aut_from_json(out)
    assert phi.commutation_defect().is_zero()


def test_scatter_factorize_default_walls(tmp_path):
    code, out = run(tmp_path, "scatter", "factorize", "--order", "6", "--q", "1+t")
    assert code == 0 and out["residual"] == "0"
    assert [f["slope"] for f in out["factors"]] == ["0", "1", "inf"]


def test_scatter_diagram(tmp_path):
    one = Scalar.const(1)
    lines = [scatter.Line((0, -2), (0, 1), scatter.RayFunction((0, -1), 1, {1: one})),
             scatter.Line((-2, 0), (1, 0), scatter.RayFunction((-1, 0), 1, {1: one}))]
    d = scatter.ScatteringDiagram(scatter.TwistForm.ordered([[0, 1], [-1, 0]]), one, lines)
    src = tmp_path / "d.json"
    src.write_text(json.dumps(d.to_json()))
    code, out = run(tmp_path, "scatter", "diagram", "--input", str(src), "--order", "4")
    assert code == 0 and out["consistent"] and len(out["lines"]) == 3


def test_sheaf_commands(tmp_path):
    g = {"A": [[1, 1], [0, 1]], "lambda": [Scalar.t().to_json(), Scalar.const(1).to_json()]}
    src = tmp_path / "g.json"
    src.write_text(json.dumps(g))
    code, out = run(tmp_path, "sheaf", "point", "--transition", str(src), "--x", "1,2")
    assert code == 0 and out == {"point": ["0", "3"]}
    code, out = run(tmp_path, "sheaf", "transform", "--transition", str(src),
                    "--element", str(GOLDEN / "f.json"))
    assert code == 0 and len(out["terms"]) == 3


def test_malformed_input(tmp_path, capsys):
    assert cli.main(["norm", "gauss", "--element", str(tmp_path / "missing.json"),
                     "--rho", "0,0"]) == cli.EXIT_MALFORMED
    bad = tmp_path / "bad.json"
    bad.write_text('{"twist": 1}')
    assert cli.main(["norm", "gauss", "--element", str(bad), "--rho", "0,0"]) == cli.EXIT_MALFORMED
    assert cli.main(["norm", "gauss", "--element", str(GOLDEN / "f.json"),
                     "--rho", "a,b"]) == cli.EXIT_MALFORMED
    assert json.loads(capsys.readouterr().err.splitlines()[-1])["error"] == "malformed input"
    with pytest.raises(SystemExit) as exc:
        cli.main(["norm"])
    assert exc.value.code == 2


def test_precondition(tmp_path):
    assert cli.main(["norm", "gauss", "--element", str(GOLDEN / "f.json"),
                     "--rho", "0,0,0"]) == cli.EXIT_PRECONDITION


def test_precision_option_is_scoped(tmp_path, monkeypatch):
    monkeypatch.delenv("QTATE_PRECISION", raising=False)
    code, out = run(tmp_path, "--precision", "5", "scatter", "wall", "--alpha", "1,0",
                    "--coeffs", "1")
    assert code == 0 and out["images"][0]["q"]["precision"] == 5
    assert Scalar.const(1).precision == 16
