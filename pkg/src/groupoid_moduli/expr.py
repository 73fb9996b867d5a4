"""Tiny safe expression language for analytic fields.

Expressions are Python-syntax arithmetic over numbers, the coordinate names
``x0, x1, ...`` (points of the base) and ``u0, u1`` (chart coordinates on the
worldsheet), the constants ``pi`` and ``e``, and a handful of elementwise
functions. Evaluation is vectorised: variables may be numpy arrays and the
result broadcasts against them.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
_VAR = re.compile(r"^[xu]\d+$")

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class ExpressionError(ValueError):
    pass


def _check(node: ast.AST, names: set[str]) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, names)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported constant {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id not in CONSTANTS and not _VAR.match(node.id):
            raise ExpressionError(f"unknown name {node.id!r}")
        if node.id not in CONSTANTS:
            names.add(node.id)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        _check(node.left, names)
        _check(node.right, names)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.UAdd, ast.USub)):
            raise ExpressionError(f"unsupported unary operator {type(node.op).__name__}")
        _check(node.operand, names)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError("only sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh may be called")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], names)
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__}")


def _eval(node: ast.AST, env: Mapping[str, object]):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in CONSTANTS:
            return CONSTANTS[node.id]
        try:
            return env[node.id]
        except KeyError:
            raise ExpressionError(f"variable {node.id} is not bound") from None
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return FUNCTIONS[node.func.id](_eval(node.args[0], env))
    raise ExpressionError(f"unsupported syntax {type(node).__name__}")


@dataclass(frozen=True)
class Expr:
    source: str
    tree: ast.Expression
    names: frozenset[str]

    def __call__(self, env: Mapping[str, object], shape: tuple[int, ...] = ()) -> np.ndarray:
        with np.errstate(all="ignore"):
            out = _eval(self.tree.body, env)
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy() if shape else np.asarray(out, dtype=float)

    def __str__(self) -> str:
        return self.source


def parse(source: str | int | float) -> Expr:
    if isinstance(source, bool):
        raise ExpressionError("booleans are not expressions")
    if isinstance(source, (int, float)):
        source = repr(float(source))
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
    names: set[str] = set()
    _check(tree, names)
    return Expr(source, tree, frozenset(names))


def point_env(points: np.ndarray, prefix: str = "x") -> dict[str, np.ndarray]:
    """Bind ``x0, x1, ...`` to the columns of an ``(n, d)`` point array."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return {f"{prefix}{i}": pts[:, i] for i in range(pts.shape[1])}
