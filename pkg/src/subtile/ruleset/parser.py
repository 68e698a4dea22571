"""Line-oriented rule file format.

::

    # comment
    name table
    lambda 2
    group translations          # translations | direct | all
    rotation_order 4            # optional; makes `rot` an integer index
    tile 0 V
    v 0 0
    v 1 0
    v (1, 2)
    sub 0
    child 1 rot 0 dx 0 dy 0
    child 0 rot pi/2 reflect dx 2 dy 0

Numeric fields are constant expressions (see :mod:`subtile.ruleset.exprs`).
"""
from __future__ import annotations

import ast
import math
import re
from pathlib import Path

import numpy as np

from ..geom import GeometryError, Polygon, angle_index
from .exprs import ExprError, evaluate
from .model import ChildPlacement, Group, Prototile, RuleError, SubstitutionRule

_KEYWORDS = ("rot", "reflect", "dx", "dy")


class RuleParseError(RuleError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.reason = message


def _tokens(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in re.finditer(r"\S+", text)]


def _expr(text: str, line: int, col0: int) -> float:
    try:
        return evaluate(text)
    except ExprError as exc:
        raise RuleParseError(str(exc), line, col0 + exc.col + 1) from None


def _syntactic(text: str) -> bool:
    try:
        ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        return False
    return bool(text.strip())


def _split_pair(body: str, line: int, col0: int) -> tuple[tuple[str, int], tuple[str, int]]:
    """Split a vertex body into two expression substrings with their column offsets."""
    stripped = body.strip()
    lead = len(body) - len(body.lstrip())
    if stripped.startswith("(") and stripped.endswith(")"):
        try:
            node = ast.parse(stripped, mode="eval").body
        except SyntaxError:
            node = None
        if isinstance(node, ast.Tuple):
            if len(node.elts) != 2:
                raise RuleParseError("vertex tuple needs exactly two coordinates", line, col0 + lead + 1)
            inner = stripped[1:-1]
            depth = 0
            for i, ch in enumerate(inner):
                depth += ch == "("
                depth -= ch == ")"
                if ch == "," and depth == 0:
                    return (inner[:i], col0 + lead + 1), (inner[i + 1:], col0 + lead + 2 + i)
    depth = 0
    for i, ch in enumerate(body):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            return (body[:i], col0), (body[i + 1:], col0 + i + 1)
    cands = []
    for m in re.finditer(r"\s+", body.strip()):
        a, b = stripped[:m.start()], stripped[m.end():]
        if _syntactic(a) and _syntactic(b):
            cands.append(((a, col0 + lead), (b, col0 + lead + m.end())))
    if not cands:
        raise RuleParseError("expected two coordinates", line, col0 + lead + 1)
    if len(cands) > 1:
        raise RuleParseError("ambiguous coordinates; separate them with a comma", line, col0 + lead + 1)
    return cands[0]


def _parse_child(rest: str, col0: int, line: int, rotation_order: int | None):
    toks = _tokens(rest)
    if not toks:
        raise RuleParseError("child needs a prototile index", line, col0 + 1)
    idx_tok, idx_col = toks[0]
    try:
        child = int(idx_tok)
    except ValueError:
        raise RuleParseError(f"bad prototile index {idx_tok!r}", line, col0 + idx_col + 1) from None
    fields: dict[str, tuple[str, int]] = {}
    reflect = False
    k = 1
    while k < len(toks):
        word, wcol = toks[k]
        if word not in _KEYWORDS:
            raise RuleParseError(f"unexpected token {word!r}", line, col0 + wcol + 1)
        if word in fields or (word == "reflect" and reflect):
            raise RuleParseError(f"duplicate field {word!r}", line, col0 + wcol + 1)
        k += 1
        if word == "reflect":
            reflect = True
            continue
        start = k
        while k < len(toks) and toks[k][0] not in _KEYWORDS:
            k += 1
        if start == k:
            raise RuleParseError(f"missing value for {word!r}", line, col0 + wcol + 1)
        s, e = toks[start][1], toks[k - 1][1] + len(toks[k - 1][0])
        fields[word] = (rest[s:e], col0 + s)
    for req in ("rot", "dx", "dy"):
        if req not in fields:
            raise RuleParseError(f"child line missing {req!r}", line, col0 + len(rest) + 1)
    rot_text, rot_col = fields["rot"]
    rot_index = None
    if rotation_order is not None:
        try:
            rot_index = int(rot_text)
        except ValueError:
            raise RuleParseError("rot must be an integer index when rotation_order is set", line, rot_col + 1) from None
        angle = 2 * math.pi * (rot_index % rotation_order) / rotation_order
    else:
        angle = _expr(rot_text, line, rot_col)
    dx = _expr(fields["dx"][0], line, fields["dx"][1])
    dy = _expr(fields["dy"][0], line, fields["dy"][1])
    return child, idx_col + col0, ChildPlacement.make(child, angle, reflect, dx, dy, rot_index)


def parse_rule(text: str) -> SubstitutionRule:
    name = ""
    lam = None
    group = Group.ALL
    rotation_order = None
    tiles: dict[int, dict] = {}
    subs: dict[int, list] = {}
    refs: list[tuple[int, int, int]] = []
    block = None  # ("tile", id) | ("sub", id)
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        toks = _tokens(body)
        key, kcol = toks[0]
        rest_col = kcol + len(key)
        rest = body[rest_col:]
        if key == "name":
            name = rest.strip()
        elif key == "lambda":
            lam = _expr(rest, ln, rest_col)
            if not lam > 1:
                raise RuleParseError(f"lambda must exceed 1, got {lam}", ln, rest_col + 2)
        elif key == "group":
            try:
                group = Group(rest.strip())
            except ValueError:
                raise RuleParseError(f"unknown group {rest.strip()!r}", ln, rest_col + 2) from None
        elif key == "rotation_order":
            try:
                rotation_order = int(rest.strip())
            except ValueError:
                raise RuleParseError("rotation_order must be a positive integer", ln, rest_col + 2) from None
            if rotation_order < 1:
                raise RuleParseError("rotation_order must be a positive integer", ln, rest_col + 2)
        elif key in ("tile", "sub"):
            if len(toks) < 2:
                raise RuleParseError(f"{key} needs an id", ln, rest_col + 1)
            try:
                ident = int(toks[1][0])
            except ValueError:
                raise RuleParseError(f"bad id {toks[1][0]!r}", ln, toks[1][1] + 1) from None
            if key == "tile":
                if ident in tiles:
                    raise RuleParseError(f"duplicate tile {ident}", ln, toks[1][1] + 1)
                label = body[toks[1][1] + len(toks[1][0]):].strip()
                tiles[ident] = {"label": label, "verts": [], "line": ln}
            else:
                if ident in subs:
                    raise RuleParseError(f"duplicate sub block {ident}", ln, toks[1][1] + 1)
                subs[ident] = []
                refs.append((ident, ln, toks[1][1] + 1))
            block = (key, ident)
        elif key == "v":
            if block is None or block[0] != "tile":
                raise RuleParseError("vertex outside a tile block", ln, kcol + 1)
            (xs, xc), (ys, yc) = _split_pair(rest, ln, rest_col)
            tiles[block[1]]["verts"].append((_expr(xs, ln, xc), _expr(ys, ln, yc)))
        elif key == "child":
            if block is None or block[0] != "sub":
                raise RuleParseError("child outside a sub block", ln, kcol + 1)
            c, ccol, placement = _parse_child(rest, rest_col, ln, rotation_order)
            subs[block[1]].append(placement)
            refs.append((c, ln, ccol + 1))
        else:
            raise RuleParseError(f"unknown directive {key!r}", ln, kcol + 1)

    if lam is None:
        raise RuleParseError("missing 'lambda' header", 1)
    n = len(tiles)
    if n == 0:
        raise RuleParseError("no tiles declared", 1)
    if sorted(tiles) != list(range(n)):
        raise RuleParseError("tile ids must be 0..n-1", 1)
    for ident, ln, col in refs:
        if not 0 <= ident < n:
            raise RuleParseError(f"unknown prototile index {ident}", ln, col)
    protos = []
    for i in range(n):
        t = tiles[i]
        try:
            protos.append(Prototile(i, Polygon(t["verts"]), t["label"]))
        except GeometryError as exc:
            raise RuleParseError(f"tile {i}: {exc}", t["line"]) from None
        if i not in subs or not subs[i]:
            raise RuleParseError(f"tile {i} has no sub block", t["line"])
    return SubstitutionRule(tuple(protos), lam, tuple(tuple(subs[i]) for i in range(n)), group, rotation_order, name)


def load_rule(path: str | Path) -> SubstitutionRule:
    return parse_rule(Path(path).read_text())


def serialize_rule(rule: SubstitutionRule) -> str:
    out = []
    if rule.name:
        out.append(f"name {rule.name}")
    out.append(f"lambda {float(rule.lam)!r}")
    out.append(f"group {rule.group.value}")
    if rule.rotation_order is not None:
        out.append(f"rotation_order {rule.rotation_order}")
    for p in rule.prototiles:
        out.append(f"tile {p.id} {p.label}".rstrip())
        for x, y in p.shape.vertices:
            out.append(f"v {float(x)!r}, {float(y)!r}")
    for i, kids in enumerate(rule.children):
        out.append(f"sub {i}")
        for ch in kids:
            if rule.rotation_order is not None:
                rot = str(ch.rot_index if ch.rot_index is not None else angle_to_index(ch, rule.rotation_order))
            else:
                rot = repr(float(ch.angle))
            refl = " reflect" if ch.iso.reflect else ""
            dx, dy = ch.iso.translation
            out.append(f"child {ch.child_prototile} rot {rot}{refl} dx {float(dx)!r} dy {float(dy)!r}")
    return "\n".join(out) + "\n"


def angle_to_index(ch: ChildPlacement, order: int) -> int:
    return angle_index(ch.iso.angle, order, tol=1e-9)


def rules_equal(a: SubstitutionRule, b: SubstitutionRule, tol: float = 0.0) -> bool:
    """Field-by-field comparison; ``tol`` = 0 demands exact float equality."""
    if (a.name, a.group, a.rotation_order, a.n) != (b.name, b.group, b.rotation_order, b.n):
        return False
    if abs(a.lam - b.lam) > tol:
        return False
    for p, q in zip(a.prototiles, b.prototiles):
        if p.label != q.label or p.shape.vertices.shape != q.shape.vertices.shape:
            return False
        if np.max(np.abs(p.shape.vertices - q.shape.vertices)) > tol:
            return False
    for ka, kb in zip(a.children, b.children):
        if len(ka) != len(kb):
            return False
        for x, y in zip(ka, kb):
            if x.child_prototile != y.child_prototile or x.iso.reflect != y.iso.reflect:
                return False
            if x.rot_index != y.rot_index or abs(x.angle - y.angle) > tol:
                return False
            vals = (*x.iso.rotation, *x.iso.translation), (*y.iso.rotation, *y.iso.translation)
            if max(abs(u - v) for u, v in zip(*vals)) > tol:
                return False
    return True
