"""Constant expressions for rule files: numbers, pi, golden, sqrt/sin/cos, + - * / and parentheses."""
import ast
import math

CONSTANTS = {"pi": math.pi, "golden": (1 + math.sqrt(5)) / 2}
FUNCTIONS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


class ExprError(ValueError):
    """Bad constant expression; ``col`` is a 0-based offset into the expression."""

    def __init__(self, message: str, col: int = 0):
        super().__init__(message)
        self.col = col


def evaluate(text: str) -> float:
    src = text.strip()
    if not src:
        raise ExprError("empty expression", 0)
    lead = len(text) - len(text.lstrip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"syntax error in expression {src!r}", lead + max(0, (exc.offset or 1) - 1)) from None
    return _eval(tree.body, lead)


def _eval(node, lead):
    col = lead + getattr(node, "col_offset", 0)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in CONSTANTS:
            return CONSTANTS[node.id]
        raise ExprError(f"unknown identifier {node.id!r}", col)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval(node.operand, lead)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        a, b = _eval(node.left, lead), _eval(node.right, lead)
        try:
            return _BINOPS[type(node.op)](a, b)
        except ZeroDivisionError:
            raise ExprError("division by zero", col) from None
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ExprError(f"unknown identifier {node.func.id!r}", col)
        if len(node.args) != 1 or node.keywords:
            raise ExprError(f"{node.func.id}() takes exactly one argument", col)
        try:
            return fn(_eval(node.args[0], lead))
        except ValueError:
            raise ExprError(f"math domain error in {node.func.id}()", col) from None
    raise ExprError(f"unsupported syntax in expression: {type(node).__name__}", col)


def is_expression(text: str) -> bool:
    try:
        evaluate(text)
    except ExprError:
        return False
    return True
