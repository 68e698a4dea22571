import math

import numpy as np
import pytest

from subtile.geom import GeometryError, Polygon
from subtile.pf_core import perron_data
from subtile.ruleset import (
    NAMES,
    ChildPlacement,
    Group,
    Prototile,
    RuleError,
    SubstitutionRule,
    builtin,
    builtin_matrix,
    expand_group,
    orbit_labels,
    substitution_matrix,
    validate_rule,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def test_golden_matrices():
    assert substitution_matrix(builtin("table")).tolist() == [[2, 2], [2, 2]]
    assert substitution_matrix(builtin("pinwheel")).tolist() == [[2, 3], [3, 2]]
    assert substitution_matrix(builtin("penrose2")).tolist() == [[2, 1], [1, 1]]
    assert substitution_matrix(builtin("square")).tolist() == [
        [2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]]


def test_builtin_shapes():
    assert builtin("square").n == 4 and builtin("square").lam == 2
    assert builtin("pinwheel").n == 2 and builtin("pinwheel").lam == pytest.approx(math.sqrt(5))
    assert builtin("penrose40").n == 40
    with pytest.raises(KeyError):
        builtin("hexagon")


@pytest.mark.parametrize("name", NAMES)
def test_builtins_validate(name):
    rep = validate_rule(builtin(name), coverage_samples=500)
    assert rep.passed, rep.failures()


@pytest.mark.parametrize("name", NAMES)
def test_areas_are_left_eigenvector(name):
    rule = builtin(name)
    M = substitution_matrix(rule).to_float()
    a = rule.areas()
    np.testing.assert_allclose(a @ M, rule.lam**2 * a, rtol=1e-6)


@pytest.mark.parametrize("name", NAMES)
def test_column_sums_equal_child_counts(name):
    rule = builtin(name)
    M = substitution_matrix(rule)
    assert M.column_sums() == tuple(len(k) for k in rule.children)


def test_pinwheel_children_equal_area():
    rep = validate_rule(builtin("pinwheel"))
    assert [c.n_children for c in rep.checks] == [5, 5]
    rule = builtin("pinwheel")
    areas = [rule.child_polygon(0, k).area for k in range(5)]
    np.testing.assert_allclose(areas, areas[0])


def _table_variant(children):
    t = builtin("table")
    return SubstitutionRule(t.prototiles, t.lam, children, t.group, name="variant")


def test_validate_detects_missing_child():
    t = builtin("table")
    rule = _table_variant((t.children[0][:-1], t.children[1]))
    rep = validate_rule(rule)
    assert not rep.passed
    chk = rep.checks[0]
    assert not chk.area_ok
    assert chk.expected_area - chk.child_area == pytest.approx(2.0)


def test_validate_detects_overlap():
    t = builtin("table")
    kids = list(t.children[0])
    kids[1] = kids[2]
    rep = validate_rule(_table_variant((tuple(kids), t.children[1])))
    assert not rep.checks[0].overlap_ok


def test_rule_errors():
    t = builtin("table")
    with pytest.raises(RuleError, match="unknown prototile index"):
        _table_variant((t.children[0] + (ChildPlacement.make(7),), t.children[1]))
    with pytest.raises(RuleError):
        SubstitutionRule(t.prototiles, 1.0, t.children)


def test_translation_typing_requires_closure():
    sq = Polygon([(0, 0), (1, 0), (0, 1)])
    rule = SubstitutionRule((Prototile(0, sq, "a"),), 2.0,
                            ((ChildPlacement.make(0, math.pi / 2, False, 1, 0),),), Group.TRANSLATIONS)
    with pytest.raises(RuleError, match="expand_group"):
        substitution_matrix(rule)


def test_expand_group_penrose():
    p2 = builtin("penrose2")
    p40 = expand_group(p2, 20)
    assert p40.n == 40
    assert p40.group is Group.TRANSLATIONS
    assert perron_data(substitution_matrix(p40)).mu == pytest.approx(
        perron_data(substitution_matrix(p2)).mu, abs=1e-9)
    # orbit aggregation of frequencies
    nu40 = perron_data(substitution_matrix(p40)).nu
    labels = orbit_labels(p40)
    agg = [sum(x for x, lab in zip(nu40, labels) if lab == base) for base in ("fat", "thin")]
    np.testing.assert_allclose(agg, perron_data(substitution_matrix(p2)).nu, atol=1e-9)


@pytest.mark.parametrize("name", ["penrose40", "table", "square"])
def test_expand_group_idempotent(name):
    rule = builtin(name)
    again = expand_group(rule, rule.rotation_order or 1)
    assert again.n == rule.n
    assert substitution_matrix(again) == substitution_matrix(rule)


def test_expand_group_pinwheel_incommensurate():
    for order in (4, 8, 20, 360):
        with pytest.raises(GeometryError):
            expand_group(builtin("pinwheel"), order)


def test_builtin_matrix_rauzy():
    assert builtin_matrix("rauzy").tolist() == [[0, 0, 1], [1, 0, 0], [0, 1, 1]]
