import numpy as np
import pytest

from subtile import kernels
from subtile.engine import SupertileTree
from subtile.geom import Curve, Polygon, contains, meets_curve
from subtile.lab import curve_family, patch_center
from subtile.ruleset import builtin

py = kernels.get_backend("python")
try:
    cy = kernels.get_backend("cython")
except ImportError:  # extension not built
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def _setup(name="pinwheel", depth=4, kind="star_blob", seed=3):
    tree = SupertileTree(builtin(name), 0, depth)
    polys, nv = tree.level_polygons(0)
    c = patch_center(tree)
    curve = curve_family(kind, 0.4 * tree.root_polygon().boundary_distance(c), seed, c).vertices
    return tree, polys, nv, np.ascontiguousarray(curve)


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("name", ["pinwheel", "table", "penrose2"])
def test_python_kernel_matches_exact_predicates(name):
    tree, polys, nv, curve = _setup(name)
    gamma = Curve(curve)
    m, c = py.classify_convex(polys, nv, curve, True, tree.tol, True)
    for k in range(0, len(polys), max(1, len(polys) // 150)):
        tile = Polygon(polys[k, : nv[k]], check=False)
        assert bool(m[k]) == meets_curve(gamma, tile, tree.tol)
        assert bool(c[k]) == contains(gamma, tile, tree.tol)


@needs_cython
@pytest.mark.parametrize("name,kind", [("pinwheel", "star_blob"), ("square", "ngon_circle"), ("penrose40", "rot_rect")])
@pytest.mark.parametrize("closed", [True, False])
def test_classify_parity(name, kind, closed):
    tree, polys, nv, curve = _setup(name, 5, kind)
    a = py.classify_convex(polys, nv, curve, closed, tree.tol, closed)
    b = cy.classify_convex(polys, nv, curve, closed, tree.tol, closed)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


@needs_cython
def test_points_and_balls_parity():
    tree, polys, nv, curve = _setup("table", 5)
    rng = np.random.default_rng(0)
    lo, hi = polys.reshape(-1, 2).min(0), polys.reshape(-1, 2).max(0)
    pts = rng.uniform(lo, hi, size=(5000, 2))
    assert np.array_equal(py.points_inside(pts, curve, tree.tol), cy.points_inside(pts, curve, tree.tol))
    centers = rng.uniform(lo, hi, size=(20, 2))
    assert np.array_equal(np.asarray(py.balls_meet(polys, nv, centers, 1.3), dtype=bool),
                          np.asarray(cy.balls_meet(polys, nv, centers, 1.3), dtype=bool))


def test_points_inside_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [1.0, 0.5], [-1e-12, 0.3]])
    assert list(py.points_inside(pts, sq, 1e-9)) == [True, False, True, True]


def test_empty_batch():
    m, c = py.classify_convex(np.zeros((0, 3, 2)), np.zeros(0, dtype=np.int64),
                              np.array([[0, 0], [1, 0], [0, 1.0]]), True, 1e-9, True)
    assert len(m) == len(c) == 0
