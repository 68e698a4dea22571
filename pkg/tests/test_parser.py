import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtile.ruleset import (
    NAMES,
    RuleParseError,
    builtin,
    evaluate,
    parse_rule,
    rules_equal,
    serialize_rule,
    substitution_matrix,
)
from subtile.ruleset.exprs import ExprError

TABLE_TEXT = """\
name table
lambda 2
group translations
tile 0 V
v 0 0
v 1 0
v 1 2
v 0 2
tile 1 H
v 0 0
v 2 0
v 2 1
v 0 1
sub 0
child 1 rot 0 dx 0 dy 0
child 0 rot 0 dx 0 dy 1
child 0 rot 0 dx 1 dy 1
child 1 rot 0 dx 0 dy 3
sub 1
child 0 rot 0 dx 0 dy 0
child 1 rot 0 dx 1 dy 0
child 1 rot 0 dx 1 dy 1
child 0 rot 0 dx 3 dy 0
"""


def test_parse_table():
    rule = parse_rule(TABLE_TEXT)
    assert rule.n == 2
    assert rule.lam == 2
    assert [len(k) for k in rule.children] == [4, 4]
    assert substitution_matrix(rule).tolist() == [[2, 2], [2, 2]]


def test_unknown_prototile_index():
    bad = TABLE_TEXT.replace("child 1 rot 0 dx 0 dy 3", "child 5 rot 0 dx 0 dy 3")
    with pytest.raises(RuleParseError, match="unknown prototile index") as ei:
        parse_rule(bad)
    assert ei.value.line == TABLE_TEXT.splitlines().index("child 1 rot 0 dx 0 dy 3") + 1


def test_unknown_identifier_column():
    with pytest.raises(RuleParseError, match="unknown identifier 'foo'") as ei:
        parse_rule("lambda 2\ntile 0\nv 0 0\nv foo 0\nv 0 1\nsub 0\nchild 0 rot 0 dx 0 dy 0\n")
    assert (ei.value.line, ei.value.col) == (4, 3)


def test_lambda_must_exceed_one():
    with pytest.raises(RuleParseError, match="exceed 1"):
        parse_rule(TABLE_TEXT.replace("lambda 2", "lambda 1"))


def test_tile_without_sub_block():
    text = TABLE_TEXT.split("sub 1")[0]
    with pytest.raises(RuleParseError):
        parse_rule(text)


def test_symbolic_vertex():
    text = ("lambda golden\ngroup all\ntile 0\nv (sin(pi/10), 0)\nv (-sin(pi/10), 0)\nv 0 cos(pi/10)\n"
            "sub 0\nchild 0 rot 0 dx 0 dy 0\n")
    rule = parse_rule(text)
    xs = sorted(rule.prototiles[0].shape.vertices[:, 0])
    assert xs[-1] == pytest.approx(0.309017, abs=1e-6)
    assert rule.lam == pytest.approx((1 + math.sqrt(5)) / 2)


def test_ambiguous_vertex_rejected():
    text = "lambda 2\ntile 0\nv 1 - 2 - 3\nv 1 0\nv 0 1\nsub 0\nchild 0 rot 0 dx 0 dy 0\n"
    with pytest.raises(RuleParseError, match="ambiguous"):
        parse_rule(text)


def test_comments_and_blank_lines():
    rule = parse_rule("# header\n\n" + TABLE_TEXT.replace("lambda 2", "lambda 2  # dilation"))
    assert rule.lam == 2


@pytest.mark.parametrize("name", NAMES)
def test_roundtrip_builtins(name):
    rule = builtin(name)
    text = serialize_rule(rule)
    again = parse_rule(text)
    assert rules_equal(rule, again)
    assert serialize_rule(again) == text


def test_evaluate_whitelist():
    assert evaluate("2*sqrt(5)/golden") == pytest.approx(2 * math.sqrt(5) * 2 / (1 + math.sqrt(5)))
    for bad in ("__import__('os')", "x", "open('f')", "2**1000**1000", "[1]"):
        with pytest.raises(ExprError):
            evaluate(bad)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e6, 1e6, allow_nan=False), st.floats(-1e6, 1e6, allow_nan=False))
def test_roundtrip_translation_values(dx, dy):
    text = TABLE_TEXT.replace("child 1 rot 0 dx 0 dy 0", f"child 1 rot 0 dx {dx!r} dy {dy!r}")
    rule = parse_rule(text)
    assert rules_equal(rule, parse_rule(serialize_rule(rule)))
