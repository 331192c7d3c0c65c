import json
import math

import numpy as np
import pytest

from gtcone import corpus as C
from gtcone import jets as J
from gtcone.errors import ArgumentError
from gtcone.expr import case_from_dict, compile_array, compile_expression, load_case_file

SPHERE = {
    "id": "json_sphere",
    "coordinates": ["x", "y"],
    "domain": {"box": [[-3, 3], [-3, 3]], "sample_box": [[-1.5, 1.5], [-1.5, 1.5]]},
    "signature": [2, 0],
    "metric": [["4/(1+x^2+y^2)^2", "0"], ["0", "4/(1+x^2+y^2)^2"]],
    "scalars": {"u0": "2*x/(1+x^2+y^2)"},
    "vectors": {"rotation": ["-y", "x"]},
    "expected": {"laplacian_eigenvalue:u0": -2},
}


@pytest.mark.parametrize("text,point,value", [
    ("x^2 + 2*y", [3.0, 1.0], 11.0),
    ("x**3", [2.0, 0.0], 8.0),
    ("pow(x, 0.5)", [4.0, 0.0], 2.0),
    ("-x + +y", [1.0, 5.0], 4.0),
    ("exp(0) + log(e) + sin(pi/2) + cos(0) + sqrt(9)", [0.0, 0.0], 7.0),
    ("2 - 3 - 4", [0.0, 0.0], -5.0),
    ("2^3^2", [0.0, 0.0], 512.0),
    ("1/(x*y)", [2.0, 4.0], 0.125),
    (1.5, [0.0, 0.0], 1.5),
])
def test_grammar(text, point, value):
    assert compile_expression(text, ["x", "y"])(point) == pytest.approx(value)


@pytest.mark.parametrize("text", ["x +", "z", "tan(x)", "x < y", "f(x)", "sin(x, y)", "x[0]", "True", "'s'"])
def test_grammar_errors(text):
    with pytest.raises(ArgumentError):
        compile_expression(text, ["x", "y"])


def test_non_string_expression_rejected():
    with pytest.raises(ArgumentError):
        compile_expression(None, ["x"])


def test_expressions_evaluate_on_jets():
    f = compile_expression("sin(x*y) + x^3 / y", ["x", "y"])
    jet = f(list(J.seed_point([0.5, 2.0])))
    assert J.extract_partial(jet, (1, 0)) == pytest.approx(2 * math.cos(1.0) + 3 * 0.25 / 2)
    assert J.extract_partial(jet, (3, 0)) == pytest.approx(-8 * math.cos(1.0) + 3.0)


def test_compile_array_nested():
    f = compile_array([["x", "1"], ["0", "y^2"]], ["x", "y"])
    assert f([2.0, 3.0]) == [[2.0, 1.0], [0.0, 9.0]]


def test_case_matches_corpus_sphere():
    case = case_from_dict(SPHERE)
    ref = C.make_case("round_sphere", n=2)
    assert case.id == "json_sphere" and case.metric.signature == (2, 0)
    for x in case.sample(10, 3):
        np.testing.assert_allclose(case.metric.jet(x, 2).coeffs, ref.metric.jet(x, 2).coeffs, atol=1e-13)
        assert case.scalars["u0"].value(x) == pytest.approx(ref.scalars["harmonic_deg1"].value(x))
    assert case.expected["laplacian_eigenvalue:u0"] == -2
    assert all(case.chart.contains(p) for p in case.sample(20, 1))


def test_domain_positive_constraint():
    data = dict(SPHERE, domain={"box": [[-3, 3], [-3, 3]], "positive": ["1 - x^2 - y^2"]})
    case = case_from_dict(data)
    assert case.chart.contains([0.2, 0.2]) and not case.chart.contains([0.9, 0.9])


@pytest.mark.parametrize("patch", [
    {"metric": [["1"]]},
    {"signature": [3, 0]},
    {"vectors": {"v": ["1"]}},
    {"domain": {"box": [[1, -1], [0, 1]]}},
    {"metric": [["1", "0"], ["0", "q"]]},
])
def test_case_errors(patch):
    with pytest.raises(ArgumentError):
        case_from_dict(dict(SPHERE, **patch))


def test_missing_key():
    with pytest.raises(ArgumentError, match="coordinates"):
        case_from_dict({"metric": [["1"]]})


def test_load_case_file(tmp_path):
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps({k: v for k, v in SPHERE.items() if k != "id"}))
    case = load_case_file(path)
    assert case.id == "sphere"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ArgumentError, match="invalid JSON"):
        load_case_file(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ArgumentError):
        load_case_file(arr)
    with pytest.raises(ArgumentError):
        load_case_file(tmp_path / "missing.json")
