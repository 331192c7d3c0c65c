"""A small arithmetic expression language for user-supplied case files.

Grammar: numbers, coordinate names, ``pi`` and ``e``; binary ``+ - * /``
and ``^`` / ``**``; unary minus; calls ``exp log sin cos sqrt`` and
``pow(a, b)``.  Expressions compile to functions of the coordinate list, so
they evaluate on floats and on jets alike.
"""

from __future__ import annotations

import ast
import json
import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .corpus import CorpusCase
from .errors import ArgumentError
from .geometry import Chart, MetricField, ScalarField, TensorField, VectorFieldOnChart

FUNCTIONS = {"exp": J.exp, "log": J.log, "sin": J.sin, "cos": J.cos, "sqrt": J.sqrt}
CONSTANTS = {"pi": math.pi, "e": math.e}


def _pow(a, b):
    if isinstance(b, (int, float)) and float(b).is_integer() and b >= 0:
        if isinstance(a, J.Jet):
            return a ** int(b)
        return a ** b
    return J.power(a, b)


def compile_expression(text: str, coordinates: Sequence[str]) -> Callable:
    """Compile ``text`` into ``f(coords) -> value``."""
    if not isinstance(text, (str, int, float)):
        raise ArgumentError(f"expression must be a string or number, got {text!r}")
    source = str(text).replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ArgumentError(f"cannot parse expression {text!r}: {exc.msg}") from None
    names = {name: i for i, name in enumerate(coordinates)}

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            value = float(node.value)
            return lambda x: value
        if isinstance(node, ast.Name):
            if node.id in names:
                i = names[node.id]
                return lambda x: x[i]
            if node.id in CONSTANTS:
                value = CONSTANTS[node.id]
                return lambda x: value
            raise ArgumentError(f"unknown name {node.id!r} in {text!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda x: -inner(x)
            return inner
        if isinstance(node, ast.BinOp):
            left, right = build(node.left), build(node.right)
            op = type(node.op)
            if op is ast.Add:
                return lambda x: left(x) + right(x)
            if op is ast.Sub:
                return lambda x: left(x) - right(x)
            if op is ast.Mult:
                return lambda x: left(x) * right(x)
            if op is ast.Div:
                return lambda x: left(x) / right(x)
            if op is ast.Pow:
                return lambda x: _pow(left(x), right(x))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            args = [build(a) for a in node.args]
            if node.func.id == "pow" and len(args) == 2:
                return lambda x: _pow(args[0](x), args[1](x))
            if node.func.id in FUNCTIONS and len(args) == 1:
                fn = FUNCTIONS[node.func.id]
                return lambda x: fn(args[0](x))
        raise ArgumentError(f"unsupported construct {ast.dump(node)[:40]}... in {text!r}")

    return build(tree)


def compile_array(spec, coordinates: Sequence[str]) -> Callable:
    """Compile a nested list of expressions into a nested-list function."""
    if isinstance(spec, list):
        parts = [compile_array(s, coordinates) for s in spec]
        return lambda x: [p(x) for p in parts]
    return compile_expression(spec, coordinates)


def _chart_from_spec(name: str, coords: list[str], spec: dict) -> Chart:
    n = len(coords)
    box = np.asarray(spec.get("box", [[-1.0, 1.0]] * n), float)
    if box.shape != (n, 2) or np.any(box[:, 0] >= box[:, 1]):
        raise ArgumentError("domain.box must list one [lo, hi] interval per coordinate")
    constraints = [compile_expression(c, coords) for c in spec.get("positive", [])]
    sample_box = np.asarray(spec.get("sample_box", box), float)

    def domain(p):
        inside = bool(np.all(p > box[:, 0]) and np.all(p < box[:, 1]))
        return inside and all(float(c(list(p))) > 0 for c in constraints)

    def sampler(rng, count):
        return rng.uniform(sample_box[:, 0], sample_box[:, 1], size=(count, n))

    return Chart(name, n, domain, sampler, note=spec.get("note", ""))


def case_from_dict(data: dict, source: str = "<dict>") -> CorpusCase:
    """Build a case from the documented JSON layout (see the README)."""
    try:
        coords = list(data["coordinates"])
        metric_spec = data["metric"]
    except KeyError as exc:
        raise ArgumentError(f"{source}: missing required key {exc.args[0]!r}") from None
    n = len(coords)
    case_id = data.get("id", Path(source).stem)
    chart = _chart_from_spec(case_id, coords, data.get("domain", {}))
    signature = tuple(data.get("signature", (n, 0)))
    if len(signature) != 2 or sum(signature) != n:
        raise ArgumentError(f"{source}: signature must be [p, q] with p + q = {n}")

    def metric_field(spec, name):
        if len(spec) != n or any(len(row) != n for row in spec):
            raise ArgumentError(f"{source}: metric {name!r} must be {n}x{n}")
        return MetricField(chart, signature, expr=compile_array(spec, coords), name=name)

    case = CorpusCase(case_id, dict(data.get("params", {})), chart, metric_field(metric_spec, "g"))
    for name, spec in data.get("scalars", {}).items():
        case.scalars[name] = ScalarField(chart, expr=compile_expression(spec, coords), name=name)
    for name, spec in data.get("vectors", {}).items():
        if len(spec) != n:
            raise ArgumentError(f"{source}: vector {name!r} needs {n} components")
        case.vectors[name] = VectorFieldOnChart(chart, expr=compile_array(spec, coords), name=name)
    for name, spec in data.get("tensors", {}).items():
        case.tensors[name] = TensorField(chart, 2, expr=compile_array(spec, coords), name=name)
    for name, spec in data.get("metrics", {}).items():
        case.metrics[name] = metric_field(spec, name)
    case.expected = dict(data.get("expected", {}))
    case.note = data.get("note", "")
    return case


def load_case_file(path) -> CorpusCase:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ArgumentError(f"cannot read case file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ArgumentError(f"{path}: top level must be an object")
    return case_from_dict(data, str(path))
