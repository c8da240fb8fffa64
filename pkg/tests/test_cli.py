import json

import pytest

from eiscong.cli import main, parse_char
from eiscong.characters import LocalMultChar
from eiscong.pipeline import FIXTURE_DIR


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_gzeta_unit_case(capsys):
    code, out = run(capsys, "gzeta", "--p", "3", "--label", "split", "--n", "1", "--zeta", "1",
                    "--depth", "3")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert "1" in json.dumps(rep["g"])


def test_unknown_verb_exits_2(capsys):
    assert main(["frobnicate"]) == 2


def test_bad_input_exits_2(capsys):
    code, out = run(capsys, "gzeta", "--p", "4", "--label", "split", "--n", "1", "--zeta", "1")
    assert code == 2 and json.loads(out)["pass"] is False


def test_budget_overflow_exits_3(capsys):
    code, out = run(capsys, "tate", "--p", "3", "--degree", "9", "--budget", "degree=2")
    assert code == 3 and json.loads(out)["kind"] == "budget"


def test_global_options_after_verb(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["tate", "--p", "2", "--level", "1", "--out", str(out)])
    assert code == 0 and json.loads(out.read_text())["pass"]
    code = main(["--format", "tsv", "tate", "--p", "2", "--level", "0"])
    assert code == 0 and "\t" in capsys.readouterr().out


def test_parse_char():
    assert parse_char(3, "0") == LocalMultChar.trivial(3)
    assert parse_char(3, "1:1") == LocalMultChar(3, 1, (1,))
    assert parse_char(3, "0@2/1").chi_p == LocalMultChar.unramified(3, 2, 1).chi_p


def test_whittaker_verb(capsys):
    code, out = run(capsys, "whittaker", "--p", "2", "--n", "2", "--chi2", "0@2/1",
                    "--beta", "[[1,0],[1,3]]")
    assert code == 0 and json.loads(out)["pass"]
    code, out = run(capsys, "whittaker", "--p", "2", "--n", "2", "--chi2", "0@2/1",
                    "--beta", "[[1,0],[1,3]]", "--orientation", "stated")
    assert code == 1


def test_gj_verb(capsys):
    code, out = run(capsys, "gj", "--mode", "lemmaI", "--p", "3", "--nu1", "1:1", "--chi", "1:1")
    assert code == 0


def test_iwasawa_model_file(capsys):
    path = FIXTURE_DIR / "models" / "model-unipotent.json"
    code, out = run(capsys, "iwasawa", "rw-check", "--exhaustive", str(path))
    assert code == 0 and json.loads(out)["pass"]


def test_iwasawa_m(capsys):
    code, out = run(capsys, "iwasawa", "m", "--orders", "3", "--images", "4", "--M", "3", "--U", "[[1]]")
    assert code == 0 and json.loads(out)["m"] == 1


@pytest.mark.parametrize("name,code", [("compliant", 0), ("perturbed-form", 1)])
def test_pipeline_verb(capsys, name, code):
    assert main(["pipeline", "torsion", str(FIXTURE_DIR / f"{name}.json")]) == code
    capsys.readouterr()


def test_qexp_pullback(capsys):
    code, out = run(capsys, "qexp", "pullback", "--p", "3", "--bound", "3")
    rep = json.loads(out)
    assert code == 0
    coeffs = {tuple(c["index"]): c["value"] for c in rep["result"]["coeffs"]}
    assert coeffs[(3,)] == "10"


def test_suite_empty_fixture_dir(tmp_path, capsys):
    assert main(["suite", "pipeline", "--fixtures", str(tmp_path)]) == 2


def test_suite_zeta_reduced_degree(capsys):
    code, out = run(capsys, "suite", "zeta", "--budget-degree", "2")
    assert code == 0 and json.loads(out)["pass"]


def test_suite_deterministic(capsys):
    _, a = run(capsys, "suite", "iwasawa")
    _, b = run(capsys, "suite", "iwasawa")
    assert a == b


def test_qexp_congruence_default_bounds(capsys):
    for model in ("free", "hermitian"):
        code, out = run(capsys, "qexp", "congruence", "--model", model, "--count", "2")
        assert code == 0 and json.loads(out)["pass"]
