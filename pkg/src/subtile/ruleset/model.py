"""Substitution rules: prototiles, child placements, tile typing and the substitution matrix."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..geom import GeometryError, Isometry, Polygon, angle_index, apply, congruence, diameter, tile_inradius
from ..pf_core import IntMatrix


class RuleError(ValueError):
    pass


class Group(enum.Enum):
    TRANSLATIONS = "translations"
    DIRECT = "direct"
    ALL = "all"


@dataclass(frozen=True, eq=False)
class Prototile:
    id: int
    shape: Polygon
    label: str = ""
    chirality: bool = False


@dataclass(frozen=True, eq=False)
class ChildPlacement:
    """Copy of prototile ``child_prototile`` placed by ``iso`` inside the inflated parent.

    ``angle`` keeps the rotation as written (radians) so serialization is exact;
    ``rot_index`` is the exact rotation class when the rule declares a rotation order.
    """

    child_prototile: int
    iso: Isometry
    angle: float = 0.0
    rot_index: int | None = None

    @classmethod
    def make(cls, child: int, angle: float = 0.0, reflect: bool = False, dx: float = 0.0, dy: float = 0.0,
             rot_index: int | None = None) -> "ChildPlacement":
        return cls(child, Isometry.from_angle(angle, reflect, (dx, dy)), float(angle), rot_index)


@dataclass(frozen=True, eq=False)
class SubstitutionRule:
    prototiles: tuple[Prototile, ...]
    lam: float
    children: tuple[tuple[ChildPlacement, ...], ...]
    group: Group = Group.ALL
    rotation_order: int | None = None
    name: str = ""

    def __post_init__(self):
        n = len(self.prototiles)
        if n == 0:
            raise RuleError("a rule needs at least one prototile")
        if [p.id for p in self.prototiles] != list(range(n)):
            raise RuleError("prototile ids must be dense 0..n-1 in order")
        if not self.lam > 1:
            raise RuleError(f"dilation factor must exceed 1, got {self.lam}")
        if len(self.children) != n:
            raise RuleError(f"expected {n} substitution blocks, got {len(self.children)}")
        for i, kids in enumerate(self.children):
            for ch in kids:
                if not 0 <= ch.child_prototile < n:
                    raise RuleError(f"unknown prototile index {ch.child_prototile} in substitution of {i}")

    @property
    def n(self) -> int:
        return len(self.prototiles)

    @cached_property
    def all_convex(self) -> bool:
        return all(p.shape.is_convex() for p in self.prototiles)

    @cached_property
    def typed_children(self) -> tuple[tuple[tuple[int, Isometry], ...], ...]:
        """Per prototile, the children as (typed prototile index, isometry of that prototile)."""
        return tuple(tuple(_type_child(self, ch) for ch in kids) for kids in self.children)

    def child_polygon(self, parent: int, k: int) -> Polygon:
        ch = self.children[parent][k]
        return apply(ch.iso, self.prototiles[ch.child_prototile].shape)

    def areas(self) -> np.ndarray:
        return np.array([p.shape.area for p in self.prototiles])

    @cached_property
    def _diameter(self) -> float:
        return max(diameter(p.shape) for p in self.prototiles)

    @cached_property
    def _inradius(self) -> float:
        return min(tile_inradius(p.shape) for p in self.prototiles)

    def max_diameter(self) -> float:
        return self._diameter

    def min_inradius(self) -> float:
        return self._inradius

    def max_vertices(self) -> int:
        return max(len(p.shape) for p in self.prototiles)


def _is_linear_identity(rule: SubstitutionRule, ch: ChildPlacement) -> bool:
    if ch.iso.reflect:
        return False
    if rule.rotation_order is not None and ch.rot_index is not None:
        return ch.rot_index % rule.rotation_order == 0
    return abs(ch.iso.rotation[1]) <= 1e-12 and ch.iso.rotation[0] > 0


def _type_child(rule: SubstitutionRule, ch: ChildPlacement) -> tuple[int, Isometry]:
    c = ch.child_prototile
    if rule.group is Group.ALL:
        return c, ch.iso
    if rule.group is Group.DIRECT and not ch.iso.reflect:
        return c, ch.iso
    if rule.group is Group.TRANSLATIONS and _is_linear_identity(rule, ch):
        return c, Isometry.translation_by(*ch.iso.translation)
    target = apply(ch.iso, rule.prototiles[c].shape)
    label = rule.prototiles[c].label
    tol = 1e-9 * max(1.0, float(np.abs(target.vertices).max()))
    for p in rule.prototiles:
        if p.label != label and rule.group is Group.TRANSLATIONS:
            continue
        for g in congruence(p.shape, target, allow_reflect=False, tol=tol):
            if rule.group is Group.DIRECT or abs(g.rotation[1]) <= 1e-9 and g.rotation[0] > 0:
                if rule.group is Group.TRANSLATIONS:
                    g = Isometry.translation_by(*g.translation)
                return p.id, g
    if rule.group is Group.TRANSLATIONS:
        raise RuleError(
            f"child of type {c} is rotated/reflected and no declared prototile is a translate of it; "
            "translation typing needs a rotation-closed prototile set (use expand_group)"
        )
    raise RuleError(f"reflected child of type {c} has no mirror-image prototile for direct-isometry typing")


def substitution_matrix(rule: SubstitutionRule) -> IntMatrix:
    """m[i][j] = number of copies of prototile i (under the rule's group) in the substitution of j."""
    n = rule.n
    m = [[0] * n for _ in range(n)]
    for j, kids in enumerate(rule.typed_children):
        for t, _ in kids:
            m[t][j] += 1
    return IntMatrix(m)


def _rotation_index(rule: SubstitutionRule, ch: ChildPlacement, order: int) -> int:
    if rule.rotation_order is not None and ch.rot_index is not None:
        if (ch.rot_index * order) % rule.rotation_order:
            raise GeometryError(f"rotation index {ch.rot_index}/{rule.rotation_order} not a multiple of 1/{order}")
        return (ch.rot_index * order // rule.rotation_order) % order
    return angle_index(ch.iso.angle, order)


def expand_group(rule: SubstitutionRule, rotation_order: int, name: str | None = None) -> SubstitutionRule:
    """Re-express ``rule`` with translation-only typing over oriented prototiles.

    Oriented prototiles are (base prototile, reflected?, rotation index mod
    ``rotation_order``); the new prototile set is everything reachable from the
    base prototiles in standard position under repeated substitution.
    """
    if rotation_order < 1:
        raise ValueError("rotation_order must be positive")
    order = rotation_order
    base = []
    for kids in rule.children:
        row = []
        for ch in kids:
            row.append((ch.child_prototile, ch.iso.reflect, _rotation_index(rule, ch, order), ch.iso.t))
        base.append(row)
    unit = [complex(math.cos(2 * math.pi * k / order), math.sin(2 * math.pi * k / order)) for k in range(order)]

    start = [(i, False, 0) for i in range(rule.n)]
    seen = set(start)
    queue = deque(start)
    edges: dict[tuple, list] = {}
    while queue:
        key = queue.popleft()
        i, a, k = key
        out = []
        for c, r, kc, t in base[i]:
            ck = (c, a ^ r, (k + (-kc if a else kc)) % order)
            tt = unit[k] * (t.conjugate() if a else t)
            out.append((ck, tt))
            if ck not in seen:
                seen.add(ck)
                queue.append(ck)
        edges[key] = out

    keys = sorted(seen, key=lambda x: (x[0], x[1], x[2]))
    index = {key: n for n, key in enumerate(keys)}
    protos = []
    for n, (i, a, k) in enumerate(keys):
        p = rule.prototiles[i]
        lin = Isometry.from_complex(unit[k], a, 0j)
        label = f"{p.label or i}@{k}{'m' if a else ''}"
        protos.append(Prototile(n, apply(lin, p.shape), label, p.chirality ^ a))
    children = []
    for key in keys:
        row = []
        for ck, tt in edges[key]:
            row.append(ChildPlacement(index[ck], Isometry.translation_by(tt.real, tt.imag), 0.0, 0))
        children.append(tuple(row))
    return SubstitutionRule(
        prototiles=tuple(protos),
        lam=rule.lam,
        children=tuple(children),
        group=Group.TRANSLATIONS,
        rotation_order=order,
        name=name if name is not None else f"{rule.name}-r{order}",
    )


def orbit_labels(rule: SubstitutionRule) -> list[str]:
    """Base label of each oriented prototile of an expanded rule (text before '@')."""
    return [p.label.split("@", 1)[0] for p in rule.prototiles]
