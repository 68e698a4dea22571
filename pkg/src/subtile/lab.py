"""Counting tiles inside Jordan domains, hierarchical decompositions and discrepancy experiments."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .engine import SupertileTree, rule_metrics
from .geom import Curve, Polygon, Polyline, chebyshev_center, contains, meets_curve
from .pf_core import IntMatrix, perron_data, power_column
from .ruleset.model import SubstitutionRule, substitution_matrix

CURVE_KINDS = ("ngon_circle", "square", "star_blob", "rot_rect")


class CurveNotCovered(ValueError):
    pass


@dataclass(frozen=True)
class Counts:
    N: int
    N_i: tuple[int, ...]
    L: int
    L_levels: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"N": self.N, "N_i": list(self.N_i), "L": self.L, "L_levels": list(self.L_levels)}


@dataclass
class Decomposition:
    """Parts P_0..P_{m-1} as arrays of node indices into the corresponding tree level."""

    m: int
    parts: list[np.ndarray]
    types: list[np.ndarray]
    tree: SupertileTree | None = field(default=None, repr=False)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]


@dataclass(frozen=True)
class _Descent:
    meets: list[np.ndarray]  # per level, nodes meeting the curve
    selected: list[np.ndarray]  # per level, contained nodes with no contained ancestor


# ------------------------------------------------------------------ predicates
def _classify(tree: SupertileTree, l: int, idx: np.ndarray, curve: np.ndarray, tol: float, closed: bool = True,
              need_contained: bool = True) -> tuple[np.ndarray, np.ndarray]:
    if len(idx) == 0:
        z = np.zeros(0, dtype=bool)
        return z, z
    polys, nv = tree.polygons(l, idx)
    if tree.rule.all_convex:
        m, c = kernels.classify_convex(polys, nv, curve, closed, tol, need_contained)
        return m.astype(bool), c.astype(bool)
    # non-convex tiles: per-tile exact predicates
    gamma = Polygon(curve, check=False) if closed else Polyline(curve)
    m = np.zeros(len(idx), dtype=bool)
    c = np.zeros(len(idx), dtype=bool)
    for k in range(len(idx)):
        poly = Polygon(polys[k, : nv[k]], check=False)
        m[k] = meets_curve(gamma, poly, tol, closed=closed)
        if closed and need_contained:
            c[k] = contains(gamma, poly, tol)
    return m, c


def _check_cover(tree: SupertileTree, curve: np.ndarray, tol: float) -> None:
    root = tree.root_polygon()
    if root.is_convex():
        ok = kernels.points_inside(curve, root.vertices, tol).all()
    else:
        ok = contains(root, Polygon(curve, check=False), tol)
    if not ok:
        raise CurveNotCovered("curve not covered by patch")


def _curve_array(gamma) -> np.ndarray:
    v = gamma.vertices if hasattr(gamma, "vertices") else gamma
    return np.ascontiguousarray(v, dtype=np.float64)


def _descend(tree: SupertileTree, gamma, check_coverage: bool = True) -> _Descent:
    curve = _curve_array(gamma)
    tol = tree.tol
    if check_coverage:
        _check_cover(tree, curve, tol)
    L = tree.depth
    meets = [np.zeros(0, dtype=np.int64)] * (L + 1)
    selected = [np.zeros(0, dtype=np.int64)] * (L + 1)
    active = np.zeros(1, dtype=np.int64)
    under = np.zeros(1, dtype=bool)  # some ancestor already selected
    for l in range(L, -1, -1):
        m, c = _classify(tree, l, active, curve, tol)
        meets[l] = active[m]
        selected[l] = active[c & ~under]
        if l == 0:
            break
        grow = m
        lev = tree.level(l)
        par = active[grow]
        cnt = lev.child_count[par]
        st = lev.child_start[par]
        active = np.repeat(st - np.cumsum(cnt) + cnt, cnt) + np.arange(int(cnt.sum()))
        under = np.repeat((under | c)[grow], cnt)
    return _Descent(meets, selected)


# -------------------------------------------------------------------- counting
def _leaf_type_counts(tree: SupertileTree, selected: list[np.ndarray]) -> np.ndarray:
    n = tree.rule.n
    tot = np.zeros(n, dtype=np.int64)
    for l, idx in enumerate(selected):
        if len(idx):
            leaves = tree.descend(l, idx, 0)
            tot += np.bincount(tree.level(0).types[leaves], minlength=n)
    return tot


def count(tree: SupertileTree, gamma, check_coverage: bool = True) -> Counts:
    """N, N_i (level-0 tiles inside the closed disk), L and per-level boundary counts.

    Subtrees disjoint from the curve are resolved in one step (entirely inside or
    entirely outside); contained subtrees contribute their actual level-0 tiles.
    """
    d = _descend(tree, gamma, check_coverage)
    Ni = _leaf_type_counts(tree, d.selected)
    L_levels = tuple(len(x) for x in d.meets)
    return Counts(int(Ni.sum()), tuple(int(x) for x in Ni), L_levels[0], L_levels)


def count_scan(tree: SupertileTree, gamma, check_coverage: bool = True, chunk: int = 200_000) -> Counts:
    """Unpruned reference: every tile of every level is tested."""
    curve = _curve_array(gamma)
    tol = tree.tol
    if check_coverage:
        _check_cover(tree, curve, tol)
    n = tree.rule.n
    L_levels = []
    Ni = np.zeros(n, dtype=np.int64)
    for l in range(tree.depth + 1):
        hits = 0
        for s in range(0, tree.size(l), chunk):
            idx = np.arange(s, min(tree.size(l), s + chunk))
            m, c = _classify(tree, l, idx, curve, tol, need_contained=(l == 0))
            hits += int(m.sum())
            if l == 0:
                Ni += np.bincount(tree.level(0).types[idx[c]], minlength=n)
        L_levels.append(hits)
    return Counts(int(Ni.sum()), tuple(int(x) for x in Ni), L_levels[0], tuple(L_levels))


def contained_leaves(tree: SupertileTree, gamma, check_coverage: bool = True) -> np.ndarray:
    """Sorted level-0 indices of tiles contained in the closed disk bounded by ``gamma`` (full scan)."""
    curve = _curve_array(gamma)
    if check_coverage:
        _check_cover(tree, curve, tree.tol)
    idx = np.arange(tree.size(0))
    _, c = _classify(tree, 0, idx, curve, tree.tol)
    return idx[c]


# --------------------------------------------------------------- decomposition
def decompose(tree: SupertileTree, gamma, check_coverage: bool = True) -> Decomposition:
    """Top-down hierarchical decomposition: P_l are the maximal tree nodes contained in the disk."""
    d = _descend(tree, gamma, check_coverage)
    levels = [l for l, s in enumerate(d.selected) if len(s)]
    m = max(levels) + 1 if levels else 0
    parts = [np.sort(d.selected[l]) for l in range(m)]
    types = [tree.level(l).types[p] for l, p in enumerate(parts)]
    return Decomposition(m, parts, types, tree)


@lru_cache(maxsize=4096)
def _power_column_cached(M: IntMatrix, l: int, j: int) -> tuple[int, ...]:
    return power_column(M, l, j)


def reconstruct_counts(dec: Decomposition, M: IntMatrix) -> tuple[int, tuple[int, ...]]:
    """(N, N_i) from the decomposition via matrix powers: sum over parts of columns of M^l."""
    n = M.n
    Ni = [0] * n
    for l, types in enumerate(dec.types):
        for j, k in zip(*np.unique(types, return_counts=True)):
            col = _power_column_cached(M, l, int(j))
            for i in range(n):
                Ni[i] += int(k) * col[i]
    return sum(Ni), tuple(Ni)


def check_decomposition(tree: SupertileTree, dec: Decomposition, gamma, check_coverage: bool = True) -> dict:
    """Properties (i)-(iv) of a hierarchical decomposition, each by direct evaluation."""
    curve = _curve_array(gamma)
    tol = tree.tol
    leaves = [tree.descend(l, p, 0) for l, p in enumerate(dec.parts)]
    allv = np.concatenate(leaves) if leaves else np.zeros(0, dtype=np.int64)
    inside = contained_leaves(tree, curve, check_coverage)
    union_ok = np.array_equal(np.sort(allv), inside)
    disjoint_ok = len(np.unique(allv)) == len(allv)
    # (iii): no level-(l+1) tile lies in Delta_l, i.e. no parent has all its children in P_l
    no_coarser_ok = True
    for l, p in enumerate(dec.parts):
        if l == tree.depth or len(p) == 0:
            continue
        lev = tree.level(l)
        parents, k = np.unique(lev.parent[p], return_counts=True)
        if np.any(k == tree.level(l + 1).child_count[parents]):
            no_coarser_ok = False
    # (iv): nothing at level m is inside the disk
    top_ok = True
    if dec.m <= tree.depth:
        idx = np.arange(tree.size(dec.m))
        _, c = _classify(tree, dec.m, idx, curve, tol)
        top_ok = not c.any()
    return {"union": bool(union_ok), "disjoint": bool(disjoint_ok), "no_coarser_tile": bool(no_coarser_ok),
            "nothing_at_m": bool(top_ok)}


def verify_prop_inequalities(dec: Decomposition, counts: Counts, metrics, M: IntMatrix) -> list[dict]:
    """Per level l < m: lambda^(m-l-1) <= (R/r) L(T^l) and |P_l| <= ||M||_1 L(T^(l+1)).

    The second inequality is skipped at l = depth (no level above the root).
    """
    if dec.m == 0:
        return []
    if dec.tree is None:
        raise ValueError("decomposition carries no tree; the dilation factor is unknown")
    lam = dec.tree.rule.lam
    ratio = metrics.R / metrics.r
    norm1 = M.norm1()
    rows = []
    for l in range(dec.m):
        lhs1 = lam ** (dec.m - l - 1)
        rhs1 = ratio * counts.L_levels[l]
        row = {"level": l, "lambda_lhs": lhs1, "lambda_rhs": rhs1, "lambda_ok": lhs1 <= rhs1 * (1 + 1e-12)}
        if l + 1 < len(counts.L_levels):
            lhs2 = len(dec.parts[l])
            rhs2 = norm1 * counts.L_levels[l + 1]
            row.update(parts_lhs=lhs2, parts_rhs=rhs2, parts_ok=lhs2 <= rhs2)
        else:
            row.update(parts_lhs=len(dec.parts[l]), parts_rhs=None, parts_ok=None)
        rows.append(row)
    return rows


def decomposition_svg(tree: SupertileTree, dec: Decomposition, gamma=None, width: int = 800) -> str:
    """Parts coloured by level over a light outline of the root supertile."""
    root = tree.root_polygon()
    x0, y0, x1, y1 = root.bbox()
    pad = 0.02 * max(x1 - x0, y1 - y0)
    w, h = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    sw = 0.002 * max(w, h)
    height = max(1, int(round(width * h / w)))
    pts = " ".join(f"{x:.6f},{-y:.6f}" for x, y in root.vertices)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0 - pad:.6f} {-(y1 + pad):.6f} {w:.6f} {h:.6f}">',
        f'<polygon points="{pts}" fill="#f4f4f4" stroke="#999" stroke-width="{sw:.6g}"/>',
    ]
    m = max(dec.m, 1)
    for l, p in enumerate(dec.parts):
        if len(p) == 0:
            continue
        v, nv = tree.polygons(l, p)
        shade = int(60 + 160 * l / m)
        out.append(f'<g fill="rgb({255 - shade},{120 + shade // 3},{shade})" stroke="black" '
                   f'stroke-width="{sw:.6g}" data-level="{l}">')
        for poly, k in zip(v, nv.tolist()):
            out.append('<polygon points="' + " ".join(f"{x:.6f},{-y:.6f}" for x, y in poly[:k]) + '"/>')
        out.append("</g>")
    if gamma is not None:
        c = _curve_array(gamma)
        out.append('<polygon points="' + " ".join(f"{x:.6f},{-y:.6f}" for x, y in c)
                   + f'" fill="none" stroke="red" stroke-width="{2 * sw:.6g}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------------- curves
def curve_family(kind: str, scale: float, seed: int = 0, center=(0.0, 0.0)) -> Curve:
    """Seeded Jordan curves of size ``scale`` centred at ``center``.

    ngon_circle: regular 64-gon of radius ``scale``; square: axis-aligned, side
    ``scale``; star_blob: 128-vertex star-shaped blob of mean radius ``scale``
    with radial perturbation below 30%; rot_rect: ``scale`` x ``scale``/2
    rectangle at a seeded angle.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    cx, cy = float(center[0]), float(center[1])
    if kind == "ngon_circle":
        phase = 0.0 if seed == 0 else rng.uniform(0, 2 * math.pi / 64)
        return Curve(Polygon.regular(64, scale, (cx, cy), phase).vertices)
    if kind == "square":
        h = scale / 2
        return Curve([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)])
    if kind == "star_blob":
        th = np.linspace(0, 2 * math.pi, 128, endpoint=False)
        ks = np.arange(2, 7)
        amp = rng.uniform(0, 1, len(ks))
        amp *= 0.29 / amp.sum()
        ph = rng.uniform(0, 2 * math.pi, len(ks))
        rad = scale * (1 + (amp[:, None] * np.cos(ks[:, None] * th[None, :] + ph[:, None])).sum(0))
        return Curve(np.stack([cx + rad * np.cos(th), cy + rad * np.sin(th)], axis=1))
    if kind == "rot_rect":
        a = rng.uniform(0, math.pi)
        c, s = math.cos(a), math.sin(a)
        base = np.array([(-0.5, -0.25), (0.5, -0.25), (0.5, 0.25), (-0.5, 0.25)]) * scale
        rot = base @ np.array([[c, s], [-s, c]])
        return Curve(rot + (cx, cy))
    raise ValueError(f"unknown curve kind {kind!r}; choose from {', '.join(CURVE_KINDS)}")


def patch_center(tree: SupertileTree) -> np.ndarray:
    """Centroid of the root supertile when it is as deep as the incenter, else the incenter."""
    root = tree.root_polygon()
    if not root.is_convex():
        return root.interior_point()
    c, r = chebyshev_center(root)
    g = root.centroid
    if root.boundary_distance(g) >= r * (1 - 1e-9):
        return g
    return c


def patch_inradius(tree: SupertileTree) -> float:
    root = tree.root_polygon()
    return chebyshev_center(root)[1] if root.is_convex() else root.boundary_distance(root.interior_point())


def placed_curve(tree: SupertileTree, kind: str, scale: float, seed: int = 0) -> Curve:
    """Curve centred in the root supertile; seeds > 0 shift the centre by up to one tile radius."""
    c = patch_center(tree)
    if seed:
        rng = np.random.default_rng([seed, 7])
        R0 = rule_metrics(tree.rule).R
        a, r = rng.uniform(0, 2 * math.pi), R0 * math.sqrt(rng.uniform())
        c = c + r * np.array([math.cos(a), math.sin(a)])
    return curve_family(kind, scale, seed, c)


# ----------------------------------------------------------------- experiments
@dataclass(frozen=True)
class ExperimentRow:
    rule: str
    kind: str
    seed: int
    scale: float
    L_gamma: int
    N: int
    N_i: tuple[int, ...]
    D: tuple[float, ...]
    ratio_lin: float | None
    ratio_log: float | None
    L_levels: tuple[int, ...] = ()


def discrepancies(counts: Counts, nu) -> tuple[float, ...]:
    return tuple(abs(n - v * counts.N) for n, v in zip(counts.N_i, nu))


def _row(rule_name, kind, seed, scale, counts: Counts, nu) -> ExperimentRow:
    D = discrepancies(counts, nu)
    L = counts.L
    dmax = max(D)
    lin = dmax / L if L >= 1 else None
    log = dmax / (L * math.log(L)) if L >= 2 else None
    return ExperimentRow(rule_name, kind, seed, float(scale), L, counts.N, counts.N_i, D, lin, log, counts.L_levels)


def run_experiment(rule: SubstitutionRule, depth: int, kinds=("ngon_circle",), scales=(10.0,), seeds=1, root: int = 0,
                   jobs: int = 1, tree: SupertileTree | None = None, check_coverage: bool = True) -> list[ExperimentRow]:
    """One row per (kind, scale, seed) curve, sorted by scale then kind then seed."""
    if tree is None:
        tree = SupertileTree(rule, root, depth, jobs=jobs)
    nu = perron_data(substitution_matrix(rule)).nu
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    jobs_list = [(k, float(s), sd) for s in scales for k in kinds for sd in seed_list]

    def one(job):
        k, s, sd = job
        curve = placed_curve(tree, k, s, sd)
        return _row(rule.name, k, sd, s, count(tree, curve, check_coverage), nu)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            rows = list(ex.map(one, jobs_list))
    else:
        rows = [one(j) for j in jobs_list]
    order = {k: i for i, k in enumerate(kinds)}
    rows.sort(key=lambda r: (r.scale, order[r.kind], r.seed))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def rows_to_csv(rows: list[ExperimentRow], n: int | None = None) -> str:
    n = n if n is not None else (len(rows[0].D) if rows else 0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rule", "kind", "seed", "scale", "L_gamma", "N", "ratio_lin", "ratio_log"] + [f"D_{i}" for i in range(n)])
    for r in rows:
        w.writerow([r.rule, r.kind, r.seed, _fmt(r.scale), r.L_gamma, r.N, _fmt(r.ratio_lin), _fmt(r.ratio_log)]
                   + [_fmt(d) for d in r.D])
    return buf.getvalue()


def envelope_check(rows: list[ExperimentRow], stat: str = "lin", factor: float = 1.5) -> dict:
    """Per scale, the worst ratio over kinds and seeds; the top half of scales must stay within
    ``factor`` times the median of the bottom half.

    ``stat`` is "lin" (max D / L), "log" (max D / (L ln L)) or "lin_over_log" (ratio_lin / ln L).
    """
    per: dict[float, float] = {}
    for r in rows:
        if stat == "lin":
            v = r.ratio_lin
        elif stat == "log":
            v = r.ratio_log
        elif stat == "lin_over_log":
            v = r.ratio_lin / math.log(r.L_gamma) if r.ratio_lin is not None and r.L_gamma >= 2 else None
        else:
            raise ValueError(f"unknown statistic {stat!r}")
        if v is None:
            continue
        per[r.scale] = max(per.get(r.scale, 0.0), v)
    scales = sorted(per)
    half = len(scales) // 2
    bottom = [per[s] for s in scales[:half]]
    top = [per[s] for s in scales[half:]]
    med = float(np.median(bottom)) if bottom else float("nan")
    worst = max(top) if top else float("nan")
    return {"stat": stat, "bottom_median": med, "top_max": worst, "factor": factor,
            "ok": bool(bottom and top and worst <= factor * med), "per_scale": per}


def empirical_frequencies(rule: SubstitutionRule, depth: int, root: int = 0, tree: SupertileTree | None = None) -> np.ndarray:
    """Type proportions among the level-0 tiles of the depth-``depth`` supertile."""
    if tree is None:
        tree = SupertileTree(rule, root, depth, verify_samples=0)
    c = np.array(tree.type_counts(0), dtype=float)
    return c / c.sum()


# ------------------------------------------------------------------ lemma suites
@dataclass
class LemmaReport:
    name: str
    checked: int = 0
    violations: int = 0
    skipped: int = 0
    worst_slack: float = float("inf")
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self, lhs: float, rhs: float, info=None) -> None:
        self.checked += 1
        self.worst_slack = min(self.worst_slack, rhs - lhs)
        if lhs > rhs * (1 + 1e-12):
            self.violations += 1
            if len(self.details) < 10:
                self.details.append({"lhs": lhs, "rhs": rhs, "info": info})

    def as_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "violations": self.violations, "skipped": self.skipped,
                "worst_slack": self.worst_slack, "details": self.details}


def _random_points_in(poly: Polygon, n: int, rng) -> np.ndarray:
    x0, y0, x1, y1 = poly.bbox()
    out = []
    while len(out) < n:
        pts = rng.uniform((x0, y0), (x1, y1), size=(max(16, 2 * n), 2))
        keep = kernels.points_inside(pts, poly.vertices, 0.0)
        out.extend(pts[keep][: n - len(out)])
    return np.array(out)


def check_finite_complexity(tree: SupertileTree, samples: int = 1000, levels=None, seed: int = 0) -> LemmaReport:
    """Every ball of radius 2R_l meets at most K level-l tiles."""
    rep = LemmaReport("finite_complexity")
    rng = np.random.default_rng(seed)
    levels = list(levels) if levels is not None else list(range(min(2, tree.depth) + 1))
    centers = _random_points_in(tree.root_polygon(), samples, rng)
    mets = {l: rule_metrics(tree.rule, l) for l in levels}
    for k, x in enumerate(centers):
        l = levels[k % len(levels)]
        met = mets[l]
        polys, nv = tree.level_polygons(l)
        lo, hi = polys.min(axis=1), polys.max(axis=1)
        rad = 2 * met.R
        near = np.nonzero((lo[:, 0] <= x[0] + rad) & (hi[:, 0] >= x[0] - rad)
                          & (lo[:, 1] <= x[1] + rad) & (hi[:, 1] >= x[1] - rad))[0]
        hit = kernels.balls_meet(polys[near], nv[near], x[None, :], rad)[0]
        rep.record(float(hit.sum()), float(met.K), {"level": l, "center": x.tolist()})
    return rep


def random_polyline(tree: SupertileTree, rng, max_len: float | None = None, steps: int = 12) -> np.ndarray:
    """x-monotone (hence simple) polyline at a random angle inside the root supertile."""
    root = tree.root_polygon()
    rmax = patch_inradius(tree)
    length = rng.uniform(0.05, 1.0) * (max_len if max_len is not None else rmax)
    xs = np.sort(rng.uniform(0, length, steps))
    xs[0], xs[-1] = 0.0, length
    ys = rng.uniform(-0.15, 0.15, steps) * length
    a = rng.uniform(0, 2 * math.pi)
    c, s = math.cos(a), math.sin(a)
    pts = np.stack([xs * c - ys * s, xs * s + ys * c], axis=1)
    for _ in range(100):
        start = _random_points_in(root, 1, rng)[0]
        cand = pts - pts.mean(axis=0) + start
        if kernels.points_inside(cand, root.vertices, 0.0).all():
            return cand
    return pts - pts.mean(axis=0) + patch_center(tree)


def check_diam_arc(tree: SupertileTree, samples: int = 500, seed: int = 0) -> LemmaReport:
    """diam(gamma) <= 2 R L(gamma, T^0) for random simple open polylines."""
    rep = LemmaReport("diam_jordan_arc")
    rng = np.random.default_rng(seed)
    R = rule_metrics(tree.rule).R
    polys, nv = tree.level_polygons(0)
    lo, hi = polys.min(axis=1), polys.max(axis=1)
    for _ in range(samples):
        line = random_polyline(tree, rng)
        a, b = line.min(axis=0), line.max(axis=0)
        near = np.nonzero((lo[:, 0] <= b[0]) & (hi[:, 0] >= a[0]) & (lo[:, 1] <= b[1]) & (hi[:, 1] >= a[1]))[0]
        m, _ = _classify(tree, 0, near, line, tree.tol, closed=False, need_contained=False)
        d = line[:, None, :] - line[None, :, :]
        diam = float(np.sqrt((d**2).sum(-1)).max())
        rep.record(diam, 2 * R * int(np.asarray(m).sum()))
    return rep


def check_bord(tree: SupertileTree, samples: int = 50, seed: int = 0, kinds=("star_blob", "ngon_circle")) -> LemmaReport:
    """L(T^l) <= (2K+1) lambda^-l L(T^0) whenever K < L(T^l) <= L(T^0)."""
    rep = LemmaReport("bord")
    rng = np.random.default_rng(seed)
    K = rule_metrics(tree.rule).K
    lam = tree.rule.lam
    rmax = patch_inradius(tree)
    R0 = rule_metrics(tree.rule).R
    for k in range(samples):
        kind = kinds[k % len(kinds)]
        scale = rng.uniform(0.3, 0.9) * (rmax - 2 * R0) / (1.3 if kind == "star_blob" else 1.0)
        curve = placed_curve(tree, kind, max(scale, R0), int(rng.integers(1, 2**31)))
        c = count(tree, curve, check_coverage=False)
        for l in range(1, tree.depth + 1):
            Lp, L0 = c.L_levels[l], c.L_levels[0]
            if not (K < Lp <= L0):
                rep.skipped += 1
                continue
            rep.record(float(Lp), (2 * K + 1) * lam**-l * L0, {"level": l, "scale": scale})
    return rep


def check_prop_inequalities(tree: SupertileTree, samples: int = 100, seed: int = 0, kinds=CURVE_KINDS) -> LemmaReport:
    rep = LemmaReport("prop_inequalities")
    rng = np.random.default_rng(seed)
    M = substitution_matrix(tree.rule)
    met = rule_metrics(tree.rule)
    rmax = patch_inradius(tree)
    R0 = met.R
    for k in range(samples):
        kind = kinds[k % len(kinds)]
        scale = rng.uniform(0.02, 0.7) * max(rmax - 2 * R0, R0)
        curve = placed_curve(tree, kind, scale, int(rng.integers(1, 2**31)))
        c = count(tree, curve, check_coverage=False)
        dec = decompose(tree, curve, check_coverage=False)
        for row in verify_prop_inequalities(dec, c, met, M):
            rep.record(row["lambda_lhs"], row["lambda_rhs"], row)
            if row["parts_ok"] is not None:
                rep.record(row["parts_lhs"], row["parts_rhs"], row)
    return rep


def verify_lemmas(tree: SupertileTree, samples: int = 100, seed: int = 0) -> dict[str, LemmaReport]:
    return {
        "finite_complexity": check_finite_complexity(tree, samples * 10, seed=seed),
        "diam_jordan_arc": check_diam_arc(tree, samples * 5, seed=seed),
        "bord": check_bord(tree, max(10, samples // 2), seed=seed),
        "prop_inequalities": check_prop_inequalities(tree, samples, seed=seed),
    }


def random_curve(tree: SupertileTree, rng, kinds=CURVE_KINDS) -> Curve:
    """Seeded curve of random kind and size that fits inside the root supertile."""
    kind = kinds[int(rng.integers(len(kinds)))]
    R0 = rule_metrics(tree.rule).R
    rmax = patch_inradius(tree)
    frac = rng.uniform(0.02, 0.7)
    scale = max(frac * (rmax - 2 * R0), 0.1 * R0)
    if kind == "star_blob":
        scale /= 1.3
    return placed_curve(tree, kind, scale, int(rng.integers(1, 2**31)))
