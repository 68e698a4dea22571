"""Supertile expansion: all levels 0..L of the subdivision of lambda^L * p_j.

Each level is stored as flat numpy arrays (type, rotation as a unit complex,
reflect flag, translation as a complex, parent index).  Children of a node are
contiguous in the level below, in rule order, so addresses are implicit.
"""
from __future__ import annotations

import colorsys
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import SCHEMA_VERSION
from .geom import Isometry, Polygon, contains
from .pf_core import power_column
from .ruleset.model import SubstitutionRule, substitution_matrix

DEFAULT_TILE_CAP = 5_000_000


class TileCapExceeded(RuntimeError):
    pass


def tile_cap() -> int:
    env = os.environ.get("SUBTILE_TILE_CAP")
    return int(env) if env else DEFAULT_TILE_CAP


@dataclass(frozen=True)
class Tile:
    prototile: int
    iso: Isometry
    level: int
    address: tuple[int, ...]
    polygon: Polygon


@dataclass(frozen=True)
class PatchMetrics:
    R: float
    r: float
    K: int

    def as_dict(self) -> dict:
        return {"R": self.R, "r": self.r, "K": self.K}


def finite_complexity_constant(R: float, r: float) -> int:
    x = 16.0 * R * R / (r * r)
    return int(math.floor(x + 1e-9 * max(1.0, x)))


def rule_metrics(rule: SubstitutionRule, l: int = 0) -> PatchMetrics:
    s = rule.lam**l
    R = s * rule.max_diameter() / 2
    r = s * rule.min_inradius()
    return PatchMetrics(R, r, finite_complexity_constant(R, r))


@dataclass
class Level:
    types: np.ndarray  # int32 typed prototile ids
    rot: np.ndarray  # complex128 unit rotations
    reflect: np.ndarray  # bool
    trans: np.ndarray  # complex128
    parent: np.ndarray  # int64 index into level l+1 (-1 at the root)
    child_index: np.ndarray  # int32 position among the parent's children
    child_start: np.ndarray | None = None  # int64 first child in level l-1
    child_count: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.types)


class _ChildTable:
    """Per typed prototile, padded arrays of its children's (type, rot, reflect, trans)."""

    def __init__(self, rule: SubstitutionRule):
        typed = rule.typed_children
        n = rule.n
        kmax = max(len(k) for k in typed)
        self.count = np.array([len(k) for k in typed], dtype=np.int64)
        self.type = np.zeros((n, kmax), dtype=np.int32)
        self.rot = np.ones((n, kmax), dtype=np.complex128)
        self.reflect = np.zeros((n, kmax), dtype=bool)
        self.trans = np.zeros((n, kmax), dtype=np.complex128)
        for i, kids in enumerate(typed):
            for k, (c, g) in enumerate(kids):
                self.type[i, k] = c
                self.rot[i, k] = g.z
                self.reflect[i, k] = g.reflect
                self.trans[i, k] = g.t


def _expand(parent: Level, table: _ChildTable, scale: float, lo: int, hi: int) -> Level:
    """Children of parent nodes lo..hi-1; child translations are scaled by ``scale``."""
    pt = parent.types[lo:hi]
    counts = table.count[pt]
    pidx = np.repeat(np.arange(lo, hi, dtype=np.int64), counts)
    starts = np.cumsum(counts) - counts
    kidx = (np.arange(int(counts.sum())) - np.repeat(starts, counts)).astype(np.int32)
    ptype = parent.types[pidx]
    ctype = table.type[ptype, kidx]
    crot = table.rot[ptype, kidx]
    crefl = table.reflect[ptype, kidx]
    ctr = table.trans[ptype, kidx] * scale
    prot, prefl, ptr = parent.rot[pidx], parent.reflect[pidx], parent.trans[pidx]
    rot = prot * np.where(prefl, np.conj(crot), crot)
    trans = prot * np.where(prefl, np.conj(ctr), ctr) + ptr
    return Level(ctype, rot, prefl ^ crefl, trans, pidx, kidx)


class SupertileTree:
    """Hierarchy T^L (the root) ... T^0 of the supertile lambda^L * p_root."""

    def __init__(self, rule: SubstitutionRule, root: int, depth: int, jobs: int = 1, cap: int | None = None,
                 verify_samples: int = 8):
        if not 0 <= root < rule.n:
            raise IndexError(f"root prototile {root} out of range 0..{rule.n - 1}")
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.rule = rule
        self.root = root
        self.depth = depth
        self.matrix = substitution_matrix(rule)
        cap = tile_cap() if cap is None else cap
        total = sum(power_column(self.matrix, depth, root))
        if total > cap:
            raise TileCapExceeded(
                f"depth {depth} supertile of prototile {root} has {total} level-0 tiles, above the cap of {cap} "
                "(set SUBTILE_TILE_CAP to raise it)"
            )
        table = _ChildTable(rule)
        top = Level(
            np.array([root], dtype=np.int32),
            np.ones(1, dtype=np.complex128),
            np.zeros(1, dtype=bool),
            np.zeros(1, dtype=np.complex128),
            np.full(1, -1, dtype=np.int64),
            np.zeros(1, dtype=np.int32),
        )
        levels = [top]
        for l in range(depth, 0, -1):
            par = levels[-1]
            scale = rule.lam ** (l - 1)
            n = len(par)
            if jobs > 1 and n >= 2 * jobs:
                bounds = np.linspace(0, n, jobs + 1).astype(int)
                with ThreadPoolExecutor(jobs) as ex:
                    parts = list(ex.map(lambda b: _expand(par, table, scale, b[0], b[1]), zip(bounds[:-1], bounds[1:])))
                child = Level(*(np.concatenate([getattr(p, f) for p in parts]) for f in
                                ("types", "rot", "reflect", "trans", "parent", "child_index")))
            else:
                child = _expand(par, table, scale, 0, n)
            counts = table.count[par.types]
            par.child_count = counts
            par.child_start = np.cumsum(counts) - counts
            levels.append(child)
        self._levels = levels[::-1]  # index by level
        if verify_samples:
            self.check_sample(verify_samples, seed=0)

    # ------------------------------------------------------------------ access
    def level(self, l: int) -> Level:
        if not 0 <= l <= self.depth:
            raise IndexError(f"level {l} out of range 0..{self.depth}")
        return self._levels[l]

    def size(self, l: int = 0) -> int:
        return len(self.level(l))

    @property
    def tol(self) -> float:
        return 1e-9 * self.rule.lam**self.depth

    @cached_property
    def shape_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(n, K) complex vertices padded by repeating the last vertex, the same with the real
        vertices reversed (images under a reflection stay counterclockwise), and vertex counts."""
        n = self.rule.n
        K = self.rule.max_vertices()
        tab = np.zeros((n, K), dtype=np.complex128)
        rev = np.zeros((n, K), dtype=np.complex128)
        nv = np.zeros(n, dtype=np.int32)
        for i, p in enumerate(self.rule.prototiles):
            v = p.shape.vertices[:, 0] + 1j * p.shape.vertices[:, 1]
            tab[i, : len(v)] = v
            tab[i, len(v):] = v[-1]
            rev[i, : len(v)] = v[::-1]
            rev[i, len(v):] = v[0]
            nv[i] = len(v)
        return tab, rev, nv

    def polygons(self, l: int, idx=None) -> tuple[np.ndarray, np.ndarray]:
        """(T, K, 2) vertex array and (T,) vertex counts for level-l tiles ``idx`` (all by default)."""
        lev = self.level(l)
        tab, rev, nv = self.shape_table
        sel = slice(None) if idx is None else np.asarray(idx)
        types = lev.types[sel]
        refl = lev.reflect[sel][:, None]
        base = np.where(refl, np.conj(rev[types]), tab[types]) * self.rule.lam**l
        z = lev.rot[sel][:, None] * base + lev.trans[sel][:, None]
        return np.stack([z.real, z.imag], axis=-1), nv[types]

    def level_polygons(self, l: int) -> tuple[np.ndarray, np.ndarray]:
        """Cached ``polygons(l)`` for the whole level."""
        cache = self.__dict__.setdefault("_poly_cache", {})
        if l not in cache:
            cache[l] = self.polygons(l)
        return cache[l]

    def polygon(self, l: int, i: int) -> Polygon:
        v, nv = self.polygons(l, [i])
        return Polygon(v[0, : nv[0]], check=False)

    def iso(self, l: int, i: int) -> Isometry:
        lev = self.level(l)
        return Isometry.from_complex(complex(lev.rot[i]), bool(lev.reflect[i]), complex(lev.trans[i]))

    def address(self, l: int, i: int) -> tuple[int, ...]:
        out = []
        for k in range(l, self.depth):
            lev = self._levels[k]
            out.append(int(lev.child_index[i]))
            i = int(lev.parent[i])
        return tuple(reversed(out))

    def addresses(self, l: int) -> np.ndarray:
        """(T, depth - l) array of child indices from the root down."""
        T = self.size(l)
        out = np.zeros((T, self.depth - l), dtype=np.int32)
        idx = np.arange(T)
        for k in range(l, self.depth):
            lev = self._levels[k]
            out[:, self.depth - 1 - k] = lev.child_index[idx]
            idx = lev.parent[idx]
        return out

    def tile(self, l: int, i: int) -> Tile:
        return Tile(int(self.level(l).types[i]), self.iso(l, i), l, self.address(l, i), self.polygon(l, i))

    def level_tiles(self, l: int) -> list[Tile]:
        return [self.tile(l, i) for i in range(self.size(l))]

    def children(self, l: int, i: int) -> range:
        if l == 0:
            return range(0)
        lev = self.level(l)
        s = int(lev.child_start[i])
        return range(s, s + int(lev.child_count[i]))

    def descend(self, l: int, idx, to: int = 0) -> np.ndarray:
        """Indices at level ``to`` of all descendants of level-l nodes ``idx``."""
        idx = np.asarray(idx, dtype=np.int64)
        for k in range(l, to, -1):
            lev = self._levels[k]
            cnt = lev.child_count[idx]
            st = lev.child_start[idx]
            idx = np.repeat(st - np.cumsum(cnt) + cnt, cnt) + np.arange(int(cnt.sum()))
        return idx

    def type_counts(self, l: int = 0) -> tuple[int, ...]:
        return tuple(int(x) for x in np.bincount(self.level(l).types, minlength=self.rule.n))

    def root_polygon(self) -> Polygon:
        return self.polygon(self.depth, 0)

    def metrics(self, l: int = 0) -> PatchMetrics:
        return rule_metrics(self.rule, l)

    # ------------------------------------------------------------ self checks
    def check_sample(self, samples: int = 100, seed: int = 0, rtol: float = 1e-6) -> list[str]:
        """Children of random non-leaf nodes exactly tile their parent (area and containment)."""
        problems = []
        if self.depth == 0:
            return problems
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            l = int(rng.integers(1, self.depth + 1))
            i = int(rng.integers(self.size(l)))
            parent = self.polygon(l, i)
            kids = [self.polygon(l - 1, c) for c in self.children(l, i)]
            area = sum(k.area for k in kids)
            if abs(area - parent.area) > rtol * parent.area:
                problems.append(f"level {l} node {i}: child area {area} vs parent {parent.area}")
            for c, k in zip(self.children(l, i), kids):
                if not contains(parent, k, self.tol):
                    problems.append(f"level {l - 1} node {c} not inside its parent")
        if problems:
            raise AssertionError("; ".join(problems[:5]))
        return problems

    # ----------------------------------------------------------------- export
    def to_json(self, level: int = 0) -> str:
        v, nv = self.polygons(level)
        types = self.level(level).types
        addrs = self.addresses(level)
        tiles = [
            {"prototile": int(t), "level": level, "address": a, "vertices": p[:k].tolist()}
            for t, a, p, k in zip(types.tolist(), addrs.tolist(), v, nv.tolist())
        ]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "rule": self.rule.name,
            "lambda": self.rule.lam,
            "root": self.root,
            "depth": self.depth,
            "level": level,
            "tiles": tiles,
        }
        return json.dumps(doc, separators=(",", ":"))

    def to_svg(self, level: int = 0, width: int = 800, stroke: float | None = None) -> str:
        v, nv = self.polygons(level)
        types = self.level(level).types
        palette = type_palette(self.rule)
        root = self.root_polygon()
        x0, y0, x1, y1 = root.bbox()
        pad = 0.02 * max(x1 - x0, y1 - y0)
        w, h = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
        height = max(1, int(round(width * h / w)))
        sw = stroke if stroke is not None else 0.002 * max(w, h)
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="{x0 - pad:.6f} {-(y1 + pad):.6f} {w:.6f} {h:.6f}">',
            f'<g stroke="black" stroke-width="{sw:.6g}" stroke-linejoin="round">',
        ]
        for t, p, k in zip(types.tolist(), v, nv.tolist()):
            pts = " ".join(f"{x:.6f},{-y:.6f}" for x, y in p[:k])
            out.append(f'<polygon points="{pts}" fill="{palette[t]}"/>')
        out.append("</g></svg>")
        return "\n".join(out) + "\n"


def type_palette(rule: SubstitutionRule) -> list[str]:
    """One fill colour per prototile; oriented copies of the same base tile share a hue."""
    bases = sorted({p.label.split("@", 1)[0] for p in rule.prototiles})
    out = []
    for p in rule.prototiles:
        b = bases.index(p.label.split("@", 1)[0])
        hue = b / max(1, len(bases))
        mirrored = "@" in p.label and p.label.endswith("m")
        light = 0.8 if mirrored else 0.55
        r, g, bl = colorsys.hls_to_rgb(hue, light, 0.6)
        out.append(f"#{int(r * 255):02x}{int(g * 255):02x}{int(bl * 255):02x}")
    return out


def supertile(rule: SubstitutionRule, j: int, L: int, jobs: int = 1, cap: int | None = None) -> SupertileTree:
    return SupertileTree(rule, j, L, jobs=jobs, cap=cap)


def level_tiles(tree: SupertileTree, l: int) -> list[Tile]:
    return tree.level_tiles(l)


def metrics(tree: SupertileTree, l: int = 0) -> PatchMetrics:
    return tree.metrics(l)

