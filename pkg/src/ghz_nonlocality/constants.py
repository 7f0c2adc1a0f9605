"""Tiny constant-expression evaluator for state parameters.

Accepts decimals, rationals and square roots of integers combined with
``+ - * /`` and parentheses, e.g. ``sqrt3/4``, ``-1/(4*sqrt3)``,
``1/(2*sqrt2)`` or ``(1/4)*(sqrt(10)-sqrt3)``.
"""

from __future__ import annotations

import ast
import math
import operator
import re

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_SQRT_NAME = re.compile(r"sqrt(\d+)$")


class ConstantSyntaxError(ValueError):
    pass


def _eval(node: ast.AST, text: str) -> float:
    if isinstance(node, ast.Expression):
        return _eval(node.body, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval(node.left, text), _eval(node.right, text)
        if isinstance(node.op, ast.Div) and right == 0:
            raise ConstantSyntaxError(f"division by zero in {text!r}")
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Name):
        m = _SQRT_NAME.match(node.id)
        if m:
            return math.sqrt(int(m.group(1)))
        raise ConstantSyntaxError(f"unknown name {node.id!r} in {text!r}")
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = node.args[0]
        if not (isinstance(arg, ast.Constant) and isinstance(arg.value, int) and arg.value >= 0):
            raise ConstantSyntaxError(f"sqrt takes a non-negative integer literal in {text!r}")
        return math.sqrt(arg.value)
    raise ConstantSyntaxError(f"unsupported syntax in {text!r}")


def parse_constant(text: str | float) -> float:
    """Evaluate a constant expression string to a float."""
    if isinstance(text, (int, float)):
        return float(text)
    src = text.strip()
    if not src:
        raise ConstantSyntaxError("empty constant expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ConstantSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree, text)
