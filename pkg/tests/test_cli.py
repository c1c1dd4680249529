import json
from pathlib import Path

import pytest

from main import main

UNIT_TRIANGLE = {"dim": 2, "inequalities": [{"a": [-1, 0], "b": 0}, {"a": [0, -1], "b": 0}, {"a": [1, 1], "b": 1}]}
TRIANGLE_PRIME = {"dim": 2, "vertices": [[0, 0], [2, 0], [0, 3]]}


@pytest.fixture
def write_json(tmp_path: Path):
    def write(name: str, doc: object) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path

    return write


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_expand_prints_terms(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, out = run(capsys, "expand", "--polyhedron", str(polyhedron), "--order", "2")
    assert code == 0
    doc = json.loads(out)
    ops = {(tuple(t["face"]), t["m"]): t["operator"] for t in doc["terms"]}
    assert ops[((1,), 1)] == "-1/12*d2"
    assert ops[((2,), 1)] == "1/24*d1 + 1/24*d2"
    assert ops[((0, 1), 0)] == "1/4"
    assert doc["mode"] == "integer"


def test_expand_with_values(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, out = run(capsys, "expand", "--polyhedron", str(polyhedron), "--t", "2", "--h", "one")
    assert code == 0
    assert json.loads(out)["values"] == [{"t": "2", "value": "3/2"}]


def test_ehrhart(capsys, write_json):
    polyhedron = write_json("p.json", TRIANGLE_PRIME)
    code, out = run(capsys, "ehrhart", "--polyhedron", str(polyhedron))
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficients"] == ["3", "3", "1"]
    assert all(c["status"] == "exact match" for c in doc["checks"])


def test_ehrhart_rational_t(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, out = run(capsys, "ehrhart", "--polyhedron", str(polyhedron), "--mode", "rational-t", "--t", "3/2", "7/3")
    assert code == 0
    assert [c["count"] for c in json.loads(out)["checks"]] == [3, 6]


def test_ehrhart_table(capsys, write_json):
    polyhedron = write_json("p.json", TRIANGLE_PRIME)
    code, out = run(capsys, "ehrhart", "--polyhedron", str(polyhedron), "--format", "table")
    assert code == 0
    assert "t^2" in out
    assert "exact match" in out


def test_verify(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, out = run(capsys, "verify", "--polyhedron", str(polyhedron), "--h", "x1^2*x2 - 1/2*x1", "--t", "1", "2", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["order"] == 5
    assert [r["status"] for r in doc["results"]] == ["exact match"] * 3


def test_verify_rational_t(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, _ = run(capsys, "verify", "--polyhedron", str(polyhedron), "--mode", "rational-t", "--t", "1/2", "5/3")
    assert code == 0


def test_verify_from_terms_document(capsys, write_json, tmp_path):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    terms = tmp_path / "terms.json"
    code, _ = run(capsys, "expand", "--polyhedron", str(polyhedron), "--output", str(terms))
    assert code == 0
    code, out = run(capsys, "verify", "--terms", str(terms), "--t", "1", "2", "3")
    assert code == 0
    assert all(r["status"] == "exact match" for r in json.loads(out)["results"])


def test_tampered_terms_document_fails(capsys, write_json, tmp_path):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    terms = tmp_path / "terms.json"
    run(capsys, "expand", "--polyhedron", str(polyhedron), "--output", str(terms))
    text = terms.read_text(encoding="utf-8")
    assert '"operator": "1/4"' in text
    terms.write_text(text.replace('"operator": "1/4"', '"operator": "1/3"'), encoding="utf-8")
    code, out = run(capsys, "verify", "--terms", str(terms))
    assert code == 3
    assert any(r["status"] == "mismatch" for r in json.loads(out)["results"])


def test_mu_of_cone(capsys, write_json):
    cone = write_json("c.json", {"dim": 1, "rays": [[1]]})
    code, out = run(capsys, "mu", "--cone", str(cone), "--order", "2")
    assert code == 0
    assert json.loads(out)["components"] == ["1/2", "-1/12*xi1", "0"]


def test_mu_of_transverse_cones(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, out = run(capsys, "mu", "--polyhedron", str(polyhedron), "--order", "0", "--t", "1", "3/2")
    assert code == 0
    faces = {tuple(f["face"]): f for f in json.loads(out)["faces"]}
    assert faces[(2,)]["mu"] == {"1": ["1/2"], "3/2": ["0"]}
    assert faces[(0, 1)]["mu"]["1"] == ["1/4"]


def test_local_eml(capsys, write_json):
    cone = write_json("c.json", {"dim": 2, "rays": [[1, 0], [1, 1]]})
    code, out = run(capsys, "local-eml", "--cone", str(cone), "--order", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["reconstruction"] == "exact"
    assert len(doc["faces"]) == 4


def test_output_file(capsys, write_json, tmp_path):
    polyhedron = write_json("p.json", TRIANGLE_PRIME)
    target = tmp_path / "out.txt"
    code, out = run(capsys, "ehrhart", "--polyhedron", str(polyhedron), "--output", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["coefficients"] == ["3", "3", "1"]


# ── Invalid input ────────────────────────────────────
def test_malformed_json_exits_2(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text("{not json", encoding="utf-8")
    code, _ = run(capsys, "expand", "--polyhedron", str(path))
    assert code == 2


def test_schema_violation_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", {"dim": 2, "inequalities": [{"a": [1, 0, 0], "b": 1}]})
    code, _ = run(capsys, "expand", "--polyhedron", str(polyhedron))
    assert code == 2


def test_missing_input_exits_2(capsys):
    code, _ = run(capsys, "expand")
    assert code == 2


def test_fractional_t_in_integer_mode_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, _ = run(capsys, "verify", "--polyhedron", str(polyhedron), "--t", "3/2")
    assert code == 2


def test_non_lattice_polytope_in_integer_mode_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", {"dim": 2, "vertices": [[0, 0], ["1/2", 0], [0, 1]]})
    code, _ = run(capsys, "expand", "--polyhedron", str(polyhedron))
    assert code == 2


def test_indefinite_scalar_product_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    q = write_json("q.json", {"matrix": [[1, 2], [2, 1]]})
    code, _ = run(capsys, "expand", "--polyhedron", str(polyhedron), "--scalar-product", str(q))
    assert code == 2


def test_negative_order_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, _ = run(capsys, "expand", "--polyhedron", str(polyhedron), "--order", "-1")
    assert code == 2


def test_bad_polynomial_exits_2(capsys, write_json):
    polyhedron = write_json("p.json", UNIT_TRIANGLE)
    code, _ = run(capsys, "verify", "--polyhedron", str(polyhedron), "--h", "x3^2")
    assert code == 2
