"""Built-in rules: Robinson-triangle Penrose (2 and 40 types), square, table, pinwheel."""
from __future__ import annotations

import math
from functools import lru_cache
from importlib import resources

import numpy as np

from ..geom import GeometryError, Polygon, congruence
from ..pf_core import IntMatrix
from .model import ChildPlacement, Group, Prototile, SubstitutionRule, expand_group
from .parser import parse_rule

GOLDEN = (1 + math.sqrt(5)) / 2
NAMES = ("penrose2", "penrose40", "square", "table", "pinwheel")
MATRIX_NAMES = NAMES + ("rauzy",)

RAUZY = IntMatrix([[0, 0, 1], [1, 0, 0], [0, 1, 1]])


def _place(shapes, lam, parent_targets, pick):
    """Child placements from target vertex lists; ``pick(child_type, isos)`` chooses the isometry."""
    out = []
    for child, pts in parent_targets:
        target = Polygon(pts)
        isos = congruence(shapes[child], target, allow_reflect=True, tol=1e-9)
        g = pick(child, isos)
        if g is None:
            raise GeometryError(f"no admissible congruence for a child of type {child}")
        out.append(ChildPlacement.make(child, g.angle, g.reflect, *g.translation))
    return tuple(out)


def _penrose_shapes():
    s3, c3 = math.sin(3 * math.pi / 10), math.cos(3 * math.pi / 10)
    s1, c1 = math.sin(math.pi / 10), math.cos(math.pi / 10)
    fat = Polygon([(-s3, 0.0), (s3, 0.0), (0.0, c3)])
    thin = Polygon([(-s1, 0.0), (s1, 0.0), (0.0, c1)])
    return fat, thin


def _penrose_chiral() -> SubstitutionRule:
    """Two Robinson triangles; each child carries a chirality bit (its reflect flag).

    fat (obtuse, legs 1, base golden) -> fat, fat, thin; thin (acute, legs 1) -> fat, thin.
    """
    phi = GOLDEN
    fat, thin = _penrose_shapes()
    shapes = (fat, thin)

    def corners(poly):
        v = poly.vertices * phi
        apex = int(np.argmax(v[:, 1]))
        left, right = sorted((k for k in range(3) if k != apex), key=lambda k: v[k, 0])
        return v[apex], v[left], v[right]

    # inflated fat: apex A, base B (left) .. C (right)
    A, B, C = corners(fat)
    E = B + (C - B) / phi
    F = B + (A - B) / phi
    fat_kids = [(0, (E, C, A), False), (0, (F, E, B), True), (1, (E, F, A), True)]
    # inflated thin: apex A, base B .. C
    A, B, C = corners(thin)
    D = A + (B - A) / phi
    thin_kids = [(0, (D, C, A), False), (1, (C, D, B), False)]

    children = []
    for kids in (fat_kids, thin_kids):
        chi = {k: r for k, (_, _, r) in enumerate(kids)}
        order = iter(range(len(kids)))

        def pick(child, isos, order=order, chi=chi):
            want = chi[next(order)]
            return next((g for g in isos if g.reflect == want), None)

        children.append(_place(shapes, phi, [(c, pts) for c, pts, _ in kids], pick))
    protos = (Prototile(0, fat, "fat"), Prototile(1, thin, "thin"))
    return SubstitutionRule(protos, phi, tuple(children), Group.ALL, None, "penrose2")


def _pinwheel() -> SubstitutionRule:
    r5 = math.sqrt(5)
    p0 = Polygon([(0, 0), (2 / r5, 0), (2 / r5, 1 / r5)])
    p1 = Polygon([(0, 0), (2 / r5, 0), (2 / r5, -1 / r5)])
    shapes = (p0, p1)
    A, B, C = np.array([0.0, 0.0]), np.array([2.0, 0.0]), np.array([2.0, 1.0])
    H, Mp = np.array([1.6, 0.8]), np.array([1.0, 0.0])
    Q1, Q2 = np.array([0.8, 0.4]), np.array([1.8, 0.4])
    tris = [(B, C, H), (A, Mp, Q1), (H, Mp, Q1), (Mp, B, Q2), (Mp, H, Q2)]
    conj = np.array([1.0, -1.0])

    def place(pts_list):
        out = []
        for pts in pts_list:
            target = Polygon(pts)
            for c in (0, 1):
                isos = congruence(shapes[c], target, allow_reflect=False, tol=1e-9)
                if isos:
                    g = isos[0]
                    out.append(ChildPlacement.make(c, g.angle, False, *g.translation))
                    break
            else:
                raise GeometryError("pinwheel child matches neither chirality")
        return tuple(out)

    kids0 = place(tris)
    kids1 = place([tuple(p * conj for p in t) for t in tris])
    protos = (Prototile(0, p0, "R", False), Prototile(1, p1, "L", True))
    return SubstitutionRule(protos, r5, (kids0, kids1), Group.DIRECT, None, "pinwheel")


def _from_file(name: str) -> SubstitutionRule:
    text = resources.files("subtile").joinpath("rules", f"{name}.rule").read_text()
    return parse_rule(text)


@lru_cache(maxsize=None)
def builtin(name: str) -> SubstitutionRule:
    if name == "penrose2":
        return _penrose_chiral()
    if name == "penrose40":
        return expand_group(_penrose_chiral(), 20, name="penrose40")
    if name in ("square", "table"):
        return _from_file(name)
    if name == "pinwheel":
        return _pinwheel()
    raise KeyError(f"unknown builtin rule {name!r}; choose from {', '.join(NAMES)}")


def builtin_matrix(name: str) -> IntMatrix:
    if name == "rauzy":
        return RAUZY
    from .model import substitution_matrix

    return substitution_matrix(builtin(name))
