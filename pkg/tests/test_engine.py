import json
import math

import numpy as np
import pytest

from subtile.engine import (
    SupertileTree,
    TileCapExceeded,
    finite_complexity_constant,
    level_tiles,
    metrics,
    rule_metrics,
    supertile,
)
from subtile.geom import Isometry, apply
from subtile.pf_core import power_column
from subtile.ruleset import NAMES, builtin, substitution_matrix


def brute_leaves(rule, root, depth):
    """Recursive expansion with Isometry objects; returns (type, vertices) of level-0 tiles in address order."""
    out = []

    def rec(t, g, l):
        if l == 0:
            out.append((t, apply(g, rule.prototiles[t].shape).vertices))
            return
        for c, h in rule.typed_children[t]:
            rec(c, g @ h.scaled(rule.lam ** (l - 1)), l - 1)

    rec(root, Isometry(), depth)
    return out


@pytest.mark.parametrize("name", ["table", "pinwheel", "penrose2", "square"])
def test_matches_recursive_oracle(name):
    rule = builtin(name)
    tree = SupertileTree(rule, 0, 3)
    ref = brute_leaves(rule, 0, 3)
    polys, nv = tree.polygons(0)
    assert [t for t, _ in ref] == tree.level(0).types.tolist()
    for (t, v), p, k in zip(ref, polys, nv):
        # same vertex set up to cyclic order
        got = p[:k]
        d = np.abs(got[:, None, :] - v[None, :, :]).sum(axis=2)
        assert d.min(axis=1).max() < 1e-9


def test_pinwheel_depth2_counts():
    tree = supertile(builtin("pinwheel"), 0, 2)
    assert tree.size(0) == 25
    assert tree.type_counts(0) == (13, 12)


def test_depth0_single_tile():
    for name in NAMES:
        tree = supertile(builtin(name), 0, 0)
        assert tree.size(0) == 1
        assert tree.address(0, 0) == ()


def test_table_depth1():
    tree = supertile(builtin("table"), 0, 1)
    assert tree.type_counts(0) == (2, 2)


def test_level_tiles():
    tree = supertile(builtin("pinwheel"), 0, 3)
    assert len(level_tiles(tree, 3)) == 1
    assert len(level_tiles(tree, 1)) == 25
    assert len(level_tiles(supertile(builtin("table"), 0, 2), 1)) == 4
    t = level_tiles(tree, 1)[7]
    assert len(t.address) == 2
    ref = apply(t.iso, builtin("pinwheel").prototiles[t.prototile].shape, builtin("pinwheel").lam)
    np.testing.assert_allclose(np.sort(ref.vertices, axis=0), np.sort(t.polygon.vertices, axis=0), atol=1e-9)


@pytest.mark.parametrize("name", NAMES)
def test_type_counts_match_power_column(name):
    rule = builtin(name)
    M = substitution_matrix(rule)
    roots = range(rule.n) if rule.n <= 4 else (0, 7, 21)
    for j in roots:
        for L in range(0, 5):
            assert SupertileTree(rule, j, L, verify_samples=0).type_counts(0) == power_column(M, L, j)


def test_addresses_unique_and_consistent():
    tree = supertile(builtin("square"), 1, 4)
    addrs = tree.addresses(0)
    assert len({tuple(a) for a in addrs.tolist()}) == tree.size(0)
    for i in (0, 17, 255):
        assert tuple(addrs[i]) == tree.address(0, i)


def test_descend_and_children():
    tree = supertile(builtin("pinwheel"), 0, 3)
    assert list(tree.descend(3, [0], 0)) == list(range(125))
    kids = tree.children(2, 3)
    assert len(kids) == 5
    assert all(tree.level(1).parent[k] == 3 for k in kids)


def test_metrics_table_and_scaling():
    m = metrics(supertile(builtin("table"), 0, 2), 0)
    assert m.R == pytest.approx(math.sqrt(5) / 2)
    assert m.r == pytest.approx(0.5)
    assert m.K == 80
    for name in NAMES:
        rule = builtin(name)
        a, b = rule_metrics(rule, 1), rule_metrics(rule, 2)
        assert b.R == pytest.approx(rule.lam * a.R)
        assert b.r == pytest.approx(rule.lam * a.r)
        assert a.K == b.K
    assert finite_complexity_constant(math.sqrt(2) / 2, 0.5) == 32


def test_jobs_deterministic():
    rule = builtin("penrose40")
    a = SupertileTree(rule, 3, 8)
    b = SupertileTree(rule, 3, 8, jobs=4)
    assert np.array_equal(a.addresses(0), b.addresses(0))
    assert np.array_equal(a.polygons(0)[0], b.polygons(0)[0])
    assert a.to_json(0) == b.to_json(0)


def test_cap():
    with pytest.raises(TileCapExceeded, match="390625"):
        SupertileTree(builtin("pinwheel"), 0, 8, cap=100_000)


def test_check_sample():
    for name in NAMES:
        SupertileTree(builtin(name), 0, 4, verify_samples=0).check_sample(50, seed=1)


def test_exports():
    tree = supertile(builtin("table"), 0, 2)
    doc = json.loads(tree.to_json(0))
    assert doc["schema_version"] == 1 and len(doc["tiles"]) == 16
    assert doc["tiles"][0]["address"] == [0, 0]
    svg = tree.to_svg(1)
    assert svg.startswith("<svg") and svg.count("<polygon") == 4
    assert tree.to_json(0) == supertile(builtin("table"), 0, 2).to_json(0)
