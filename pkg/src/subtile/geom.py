"""Planar primitives: isometries, simple polygons and the predicates used for counting.

Tiles are closed sets, so boundary contact counts both as containment and as
intersection. Every predicate takes an absolute tolerance ``tol``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Isometry:
    """x -> R(theta) F x + t, where F is the reflection about the x-axis when ``reflect``."""

    rotation: tuple[float, float] = (1.0, 0.0)
    reflect: bool = False
    translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        c, s = self.rotation
        if abs(math.hypot(c, s) - 1.0) > 1e-12:
            raise GeometryError(f"rotation vector {self.rotation} is not a unit vector")

    @classmethod
    def from_angle(cls, theta: float, reflect: bool = False, translation=(0.0, 0.0)) -> "Isometry":
        return cls((math.cos(theta), math.sin(theta)), bool(reflect), (float(translation[0]), float(translation[1])))

    @classmethod
    def from_complex(cls, z: complex, reflect: bool, t: complex) -> "Isometry":
        z = z / abs(z)
        return cls((z.real, z.imag), bool(reflect), (t.real, t.imag))

    @classmethod
    def translation_by(cls, dx: float, dy: float) -> "Isometry":
        return cls((1.0, 0.0), False, (float(dx), float(dy)))

    @property
    def z(self) -> complex:
        return complex(*self.rotation)

    @property
    def t(self) -> complex:
        return complex(*self.translation)

    @property
    def angle(self) -> float:
        return math.atan2(self.rotation[1], self.rotation[0])

    def apply_complex(self, p):
        p = np.asarray(p)
        if self.reflect:
            p = np.conj(p)
        return self.z * p + self.t

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        zc = pts[..., 0] + 1j * pts[..., 1]
        out = self.apply_complex(zc)
        return np.stack([out.real, out.imag], axis=-1)

    def compose(self, other: "Isometry") -> "Isometry":
        """``self`` after ``other``."""
        zo = other.z.conjugate() if self.reflect else other.z
        to = other.t.conjugate() if self.reflect else other.t
        return Isometry.from_complex(self.z * zo, self.reflect ^ other.reflect, self.z * to + self.t)

    __matmul__ = compose

    def inverse(self) -> "Isometry":
        # x = F R^-1 (y - t)
        zi = self.z.conjugate()
        if self.reflect:
            # F R^-1 = R F  (as maps): x = R(theta) F (y - t)
            return Isometry.from_complex(self.z, True, -(self.z * self.t.conjugate()))
        return Isometry.from_complex(zi, False, -zi * self.t)

    def scaled(self, k: float) -> "Isometry":
        """Same linear part, translation multiplied by ``k`` (conjugation by a dilation)."""
        return Isometry(self.rotation, self.reflect, (self.translation[0] * k, self.translation[1] * k))


IDENTITY = Isometry()


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _segments_properly_cross(p1, p2, q1, q2, eps=0.0) -> bool:
    d1 = _cross(q2[0] - q1[0], q2[1] - q1[1], p1[0] - q1[0], p1[1] - q1[1])
    d2 = _cross(q2[0] - q1[0], q2[1] - q1[1], p2[0] - q1[0], p2[1] - q1[1])
    d3 = _cross(p2[0] - p1[0], p2[1] - p1[1], q1[0] - p1[0], q1[1] - p1[1])
    d4 = _cross(p2[0] - p1[0], p2[1] - p1[1], q2[0] - p1[0], q2[1] - p1[1])
    return ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    )


def _segments_touch(p1, p2, q1, q2) -> bool:
    """Closed segments intersect (exact orientation tests, collinear overlap included)."""

    def orient(a, b, c):
        v = _cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])
        return int(v > 0) - int(v < 0)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


def point_segment_distance(p, a, b) -> float:
    ax, ay = b[0] - a[0], b[1] - a[1]
    L2 = ax * ax + ay * ay
    if L2 == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - a[0] - t * ax, p[1] - a[1] - t * ay)


def segment_distance(p1, p2, q1, q2) -> float:
    if _segments_touch(p1, p2, q1, q2):
        return 0.0
    return min(
        point_segment_distance(p1, q1, q2),
        point_segment_distance(p2, q1, q2),
        point_segment_distance(q1, p1, p2),
        point_segment_distance(q2, p1, p2),
    )


class Polygon:
    """Simple polygon with counterclockwise vertices.

    Clockwise input is reversed; self-intersecting or degenerate input raises.
    """

    __slots__ = ("vertices", "_convex")

    def __init__(self, vertices, *, check: bool = True):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(v) < 3:
            raise GeometryError("a polygon needs at least 3 vertices")
        area = signed_area(v)
        if area == 0.0:
            raise GeometryError("degenerate polygon (zero area)")
        if area < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        self.vertices = v
        self._convex = None
        if check and not self.is_simple():
            raise GeometryError("polygon is self-intersecting")

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({np.round(self.vertices, 6).tolist()})"

    @property
    def edges(self):
        v = self.vertices
        return list(zip(v, np.roll(v, -1, axis=0)))

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        a = 0.5 * c.sum()
        return np.array([((x + xn) * c).sum() / (6 * a), ((y + yn) * c).sum() / (6 * a)])

    def bbox(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    def is_simple(self) -> bool:
        edges = self.edges
        n = len(edges)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_touch(edges[i][0], edges[i][1], edges[j][0], edges[j][1]):
                    return False
        return True

    def is_convex(self, tol: float = 1e-12) -> bool:
        if self._convex is None:
            v = self.vertices
            e = np.roll(v, -1, axis=0) - v
            cr = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
            scale = float(np.max(np.abs(e))) ** 2
            self._convex = bool(np.all(cr >= -tol * scale))
        return self._convex

    def transformed(self, iso: Isometry, scale: float = 1.0) -> "Polygon":
        return apply(iso, self, scale)

    def scaled(self, k: float) -> "Polygon":
        return Polygon(self.vertices * k, check=False)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(self.vertices + np.array([dx, dy]), check=False)

    def boundary_distance(self, p) -> float:
        return min(point_segment_distance(p, a, b) for a, b in self.edges)

    def contains_point(self, p, tol: float = 0.0) -> bool:
        """Inside-or-on test (crossing number, with ``tol`` slack on the boundary)."""
        if self.boundary_distance(p) <= tol:
            return True
        return _crossing_inside(self.vertices, p)

    def strictly_contains_point(self, p, tol: float = 0.0) -> bool:
        return _crossing_inside(self.vertices, p) and self.boundary_distance(p) > tol

    def interior_point(self) -> np.ndarray:
        """A point strictly inside the polygon."""
        c = self.centroid
        if _crossing_inside(self.vertices, c) and self.boundary_distance(c) > 0:
            return c
        # ear midpoint fallback for non-convex shapes
        v = self.vertices
        n = len(v)
        best, best_d = None, -1.0
        for i in range(n):
            cand = (v[i - 1] + v[i] + v[(i + 1) % n]) / 3.0
            if _crossing_inside(v, cand):
                d = self.boundary_distance(cand)
                if d > best_d:
                    best, best_d = cand, d
        if best is None:
            raise GeometryError("could not find an interior point")
        return best

    @classmethod
    def regular(cls, n: int, radius: float, center=(0.0, 0.0), phase: float = 0.0) -> "Polygon":
        k = np.arange(n)
        ang = phase + 2 * np.pi * k / n
        pts = np.stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)], axis=1)
        return cls(pts, check=False)

    @classmethod
    def rectangle(cls, x0, y0, x1, y1) -> "Polygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], check=False)


class Curve(Polygon):
    """Closed polyline bounding a disk; same data as a polygon."""

    @classmethod
    def from_text(cls, text: str) -> "Curve":
        pts = []
        for k, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise GeometryError(f"line {k}: expected 'x y', got {line!r}")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise GeometryError(f"line {k}: non-numeric vertex {line!r}") from None
        if len(pts) > 1 and np.allclose(pts[0], pts[-1]):
            pts.pop()
        return cls(pts)

    @classmethod
    def load(cls, path: str | Path) -> "Curve":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "".join(f"{x!r} {y!r}\n" for x, y in self.vertices.tolist())

    @classmethod
    def of(cls, poly: Polygon) -> "Curve":
        c = cls.__new__(cls)
        c.vertices = poly.vertices
        c._convex = None
        return c


def _crossing_inside(v: np.ndarray, p) -> bool:
    px, py = float(p[0]), float(p[1])
    inside = False
    x0, y0 = v[-1]
    for x1, y1 in v:
        if (y1 > py) != (y0 > py):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if px < xint:
                inside = not inside
        x0, y0 = x1, y1
    return inside


def apply(iso: Isometry, poly: Polygon, scale: float = 1.0) -> Polygon:
    """Image of ``scale * poly`` under ``iso``; orientation is restored to CCW."""
    out = iso(poly.vertices * scale)
    if iso.reflect:
        out = out[::-1]
    cls = type(poly)
    res = cls.__new__(cls)
    out = np.ascontiguousarray(out)
    out.setflags(write=False)
    res.vertices = out
    res._convex = poly._convex
    return res


# --------------------------------------------------------------------------
# predicates


def _split_params(a, b, poly: Polygon) -> list[float]:
    """Parameters along segment ab where it may enter/leave ``poly``."""
    ts = {0.0, 1.0}
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return [0.0]
    for q1, q2 in poly.edges:
        ex, ey = q2[0] - q1[0], q2[1] - q1[1]
        den = _cross(dx, dy, ex, ey)
        if den != 0.0:
            t = _cross(q1[0] - a[0], q1[1] - a[1], ex, ey) / den
            if 0.0 < t < 1.0:
                ts.add(t)
        t = ((q1[0] - a[0]) * dx + (q1[1] - a[1]) * dy) / L2
        if 0.0 < t < 1.0:
            ts.add(t)
    return sorted(ts)


def curve_enters_interior(gamma: Polygon, poly: Polygon, tol: float, closed: bool = True) -> bool:
    """Whether some point of ``gamma`` lies in the open interior of ``poly`` (deeper than ``tol``)."""
    v = gamma.vertices
    n = len(v)
    segs = range(n) if closed else range(n - 1)
    for k in segs:
        a, b = v[k], v[(k + 1) % n]
        ts = _split_params(a, b, poly)
        pts = [a + t * (b - a) for t in ts]
        pts += [a + 0.5 * (t0 + t1) * (b - a) for t0, t1 in zip(ts, ts[1:])]
        for p in pts:
            if poly.strictly_contains_point(p, tol):
                return True
    return False


def contains(outer: Polygon, inner: Polygon, tol: float = 1e-9) -> bool:
    """Closed containment ``inner`` ⊆ ``outer`` up to ``tol``."""
    ob, ib = outer.bbox(), inner.bbox()
    if ib[0] < ob[0] - tol or ib[1] < ob[1] - tol or ib[2] > ob[2] + tol or ib[3] > ob[3] + tol:
        return False
    if not all(outer.contains_point(p, tol) for p in inner.vertices):
        return False
    # no proper crossing of boundaries
    for p1, p2 in inner.edges:
        for q1, q2 in outer.edges:
            if _segments_properly_cross(p1, p2, q1, q2, eps=tol * max(1.0, math.dist(q1, q2))):
                return False
    if curve_enters_interior(outer, inner, tol):
        return False
    return outer.contains_point(inner.interior_point(), tol)


def meets_curve(gamma: Polygon, poly: Polygon, tol: float = 1e-9, closed: bool = True) -> bool:
    """Whether the closed polyline ``gamma`` intersects the closed polygon ``poly``."""
    gb, pb = gamma.bbox(), poly.bbox()
    if gb[0] > pb[2] + tol or gb[2] < pb[0] - tol or gb[1] > pb[3] + tol or gb[3] < pb[1] - tol:
        return False
    v = gamma.vertices
    n = len(v)
    if any(poly.contains_point(p, tol) for p in v):
        return True
    segs = range(n) if closed else range(n - 1)
    for k in segs:
        a, b = v[k], v[(k + 1) % n]
        for q1, q2 in poly.edges:
            if segment_distance(a, b, q1, q2) <= tol:
                return True
    return False


class Polyline:
    """Open polyline (for arc estimates)."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(v) < 2:
            raise GeometryError("a polyline needs at least 2 vertices")
        self.vertices = v

    def bbox(self):
        v = self.vertices
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())


def meets_polyline(line: Polyline, poly: Polygon, tol: float = 1e-9) -> bool:
    return meets_curve(line, poly, tol, closed=False)  # type: ignore[arg-type]


def diameter(poly) -> float:
    """Maximum pairwise vertex distance."""
    v = np.asarray(poly.vertices if hasattr(poly, "vertices") else poly, dtype=float)
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def chebyshev_center(poly: Polygon) -> tuple[np.ndarray, float]:
    """Center and radius of the largest disk inside a convex polygon (linear program over edge half-planes)."""
    if not poly.is_convex():
        raise GeometryError(
            "inradius requires a convex polygon; use inradius_lower_bound for non-convex tiles"
        )
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    L = np.hypot(e[:, 0], e[:, 1])
    keep = L > 0
    e, v0, L = e[keep], v[keep], L[keep]
    # inward unit normal of a CCW edge is (-ey, ex)/|e|; constraint: n.(x - v) >= r
    nrm = np.stack([-e[:, 1], e[:, 0]], axis=1) / L[:, None]
    A_ub = np.hstack([-nrm, np.ones((len(nrm), 1))])
    b_ub = -(nrm * v0).sum(1)
    res = linprog(c=[0, 0, -1], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        raise GeometryError(f"Chebyshev LP failed: {res.message}")
    return np.array(res.x[:2]), float(res.x[2])


def inradius(poly: Polygon) -> float:
    """Chebyshev radius of a convex polygon."""
    return chebyshev_center(poly)[1]


def inradius_lower_bound(poly: Polygon, grid: int = 64) -> float:
    """Largest inscribed disk over a ``grid`` x ``grid`` sample of candidate centers."""
    x0, y0, x1, y1 = poly.bbox()
    best = 0.0
    for x in np.linspace(x0, x1, grid):
        for y in np.linspace(y0, y1, grid):
            if _crossing_inside(poly.vertices, (x, y)):
                best = max(best, poly.boundary_distance((x, y)))
    return best


def tile_inradius(poly: Polygon) -> float:
    return inradius(poly) if poly.is_convex() else inradius_lower_bound(poly)


# --------------------------------------------------------------------------
# convex clipping (used by the rule validator)


def clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: ``subject`` polygon clipped by convex CCW ``clip``."""
    out = np.asarray(subject, dtype=float)
    n = len(clip)
    for i in range(n):
        a, b = clip[i], clip[(i + 1) % n]
        if len(out) == 0:
            break
        inp = out
        side = _cross(b[0] - a[0], b[1] - a[1], inp[:, 0] - a[0], inp[:, 1] - a[1])
        res = []
        m = len(inp)
        for k in range(m):
            cur, prev = inp[k], inp[k - 1]
            sc, sp = side[k], side[k - 1]
            if sc >= 0:
                if sp < 0:
                    t = sp / (sp - sc)
                    res.append(prev + t * (cur - prev))
                res.append(cur)
            elif sp >= 0:
                t = sp / (sp - sc)
                res.append(prev + t * (cur - prev))
        out = np.array(res) if res else np.zeros((0, 2))
    return out


def convex_intersection_area(a: Polygon, b: Polygon) -> float:
    pts = clip_convex(a.vertices, b.vertices)
    if len(pts) < 3:
        return 0.0
    return abs(signed_area(pts))


def polygons_overlap_area(a: Polygon, b: Polygon, samples: int = 10_000, seed: int = 0) -> float:
    """Interior overlap area; exact for convex pairs, Monte Carlo otherwise."""
    if a.is_convex() and b.is_convex():
        return convex_intersection_area(a, b)
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    x0, y0, x1, y1 = max(ax0, bx0), max(ay0, by0), min(ax1, bx1), min(ay1, by1)
    if x0 >= x1 or y0 >= y1:
        return 0.0
    rng = np.random.default_rng(seed)
    pts = rng.uniform((x0, y0), (x1, y1), size=(samples, 2))
    hits = sum(1 for p in pts if _crossing_inside(a.vertices, p) and _crossing_inside(b.vertices, p))
    return hits / samples * (x1 - x0) * (y1 - y0)


def congruence(shape: Polygon, target: Polygon, allow_reflect: bool = True, tol: float = 1e-9):
    """Isometries g with g(shape) == target as vertex sets, direct ones first."""
    sv, tv = shape.vertices, target.vertices
    if len(sv) != len(tv):
        return []
    n = len(sv)
    s = sv[:, 0] + 1j * sv[:, 1]
    t = tv[:, 0] + 1j * tv[:, 1]
    scale = max(1.0, float(np.max(np.abs(t))))
    found = []
    for reflect in ((False, True) if allow_reflect else (False,)):
        src = np.conj(s) if reflect else s
        # reflection reverses the cyclic order of a CCW polygon
        order = src[::-1] if reflect else src
        for k in range(n):
            tgt = np.roll(t, -k)
            d_src = order[1] - order[0]
            d_tgt = tgt[1] - tgt[0]
            if abs(d_src) == 0:
                continue
            z = d_tgt / d_src
            if abs(abs(z) - 1) > 1e-9:
                continue
            z /= abs(z)
            tr = tgt[0] - z * order[0]
            if np.all(np.abs(z * order + tr - tgt) <= tol * scale):
                found.append(Isometry.from_complex(z, reflect, tr))
    return found


def angle_index(theta: float, order: int, tol: float = 1e-12) -> int:
    """Integer k with theta == 2*pi*k/order (mod 2*pi); raises if incommensurate."""
    q = theta / (2 * math.pi / order)
    k = round(q)
    if abs(q - k) > tol * max(1.0, abs(q)):
        raise GeometryError(f"rotation {theta!r} is not a multiple of 2*pi/{order}")
    return int(k) % order


def phase(z: complex) -> float:
    return cmath.phase(z)
