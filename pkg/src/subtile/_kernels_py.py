"""Vectorized numpy implementation of the batch tile/curve predicates.

Same contract as the compiled ``_ckernels`` module; selected by
:mod:`subtile.kernels` when the extension is unavailable.

Tiles are convex CCW polygons padded to a common vertex count by repeating
their last vertex; zero-length edges impose no constraint.
"""
import numpy as np

_CHUNK_ELEMS = 2_000_000


def _edge_frames(polys):
    e = np.roll(polys, -1, axis=1) - polys
    L = np.hypot(e[..., 0], e[..., 1])
    valid = L > 0
    Ls = np.where(valid, L, 1.0)
    return e, Ls, valid


def _signed_dist(polys, e, Ls, valid, pts):
    # (T, P, K): distance of pts[p] to the supporting line of tile edge k, positive inside
    dx = pts[None, :, None, 0] - polys[:, None, :, 0]
    dy = pts[None, :, None, 1] - polys[:, None, :, 1]
    d = (e[:, None, :, 0] * dy - e[:, None, :, 1] * dx) / Ls[:, None, :]
    return np.where(valid[:, None, :], d, np.inf)


def _clip_nonempty(da, db, offset):
    # segment a->b against half-planes {d >= offset}; da, db: (T, E, K)
    A = da - offset
    B = db - da
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -A / B
    pos = B > 0
    neg = B < 0
    finite = np.isfinite(A)
    t_lo = np.where(pos & finite, t, -np.inf).max(axis=2)
    t_hi = np.where(neg & finite, t, np.inf).min(axis=2)
    blocked = ((B == 0) | ~np.isfinite(B)) & finite & (A < 0)
    return (np.maximum(t_lo, 0.0) <= np.minimum(t_hi, 1.0)) & ~blocked.any(axis=2)


def points_inside(points, curve, tol):
    """Inside-or-on test of many points against a closed curve."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    curve = np.asarray(curve, dtype=np.float64)
    out = np.zeros(len(points), dtype=bool)
    a = curve
    b = np.roll(curve, -1, axis=0)
    step = max(1, _CHUNK_ELEMS // max(1, len(curve)))
    for s in range(0, len(points), step):
        p = points[s:s + step]
        px = p[:, 0:1]
        py = p[:, 1:2]
        ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
        straddle = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = ax + (py - ay) * (bx - ax) / (by - ay)
        crossings = np.sum(straddle & (px < xint), axis=1)
        inside = (crossings % 2) == 1
        # distance to edges
        ex, ey = bx - ax, by - ay
        L2 = ex * ex + ey * ey
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip(np.where(L2 > 0, ((px - ax) * ex + (py - ay) * ey) / L2, 0.0), 0.0, 1.0)
        dist = np.hypot(px - ax - t * ex, py - ay - t * ey).min(axis=1)
        out[s:s + step] = inside | (dist <= tol)
    return out


def classify_convex(polys, nverts, curve, closed, tol, need_contained=True):
    """Return (meets, contained) uint8 arrays for a batch of convex tiles."""
    polys = np.ascontiguousarray(polys, dtype=np.float64)
    curve = np.ascontiguousarray(curve, dtype=np.float64)
    T, K, _ = polys.shape
    V = len(curve)
    meets = np.zeros(T, dtype=np.uint8)
    contained = np.zeros(T, dtype=np.uint8)
    if T == 0:
        return meets, contained
    cx0, cy0 = curve.min(axis=0)
    cx1, cy1 = curve.max(axis=0)
    lo = polys.min(axis=1)
    hi = polys.max(axis=1)
    near = (lo[:, 0] <= cx1 + tol) & (hi[:, 0] >= cx0 - tol) & (lo[:, 1] <= cy1 + tol) & (hi[:, 1] >= cy0 - tol)
    idx = np.nonzero(near)[0]
    nseg = V if closed else V - 1
    ia = np.arange(nseg)
    ib = (ia + 1) % V
    step = max(1, _CHUNK_ELEMS // max(1, V * K))
    for s in range(0, len(idx), step):
        sel = idx[s:s + step]
        P = polys[sel]
        e, Ls, valid = _edge_frames(P)
        D = _signed_dist(P, e, Ls, valid, curve)
        da, db = D[:, ia, :], D[:, ib, :]
        m = _clip_nonempty(da, db, -tol).any(axis=1)
        meets[sel] = m
        if closed and need_contained:
            enters = _clip_nonempty(da, db, tol).any(axis=1)
            cand = sel[m & ~enters]
            far = sel[~m]
            if len(far):
                nv = nverts[far].astype(float)
                mask = np.arange(K)[None, :] < nverts[far][:, None]
                cen = (polys[far] * mask[..., None]).sum(axis=1) / nv[:, None]
                contained[far] = points_inside(cen, curve, tol)
            if len(cand):
                Pc = polys[cand]
                ok = points_inside(Pc.reshape(-1, 2), curve, tol).reshape(len(cand), K).all(axis=1)
                nv = nverts[cand].astype(float)
                mask = np.arange(K)[None, :] < nverts[cand][:, None]
                cen = (Pc * mask[..., None]).sum(axis=1) / nv[:, None]
                ok &= points_inside(cen, curve, tol)
                contained[cand] = ok
    return meets, contained


def balls_meet(polys, nverts, centers, radius):
    """For each tile, whether it meets any of the closed balls B(center, radius).

    Returns an (n_centers, T) boolean matrix.
    """
    polys = np.ascontiguousarray(polys, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    e, Ls, valid = _edge_frames(polys)
    out = np.zeros((len(centers), len(polys)), dtype=bool)
    for c_i, c in enumerate(centers):
        d = _signed_dist(polys, e, Ls, valid, c[None, :])[:, 0, :]
        inside = (d >= 0).all(axis=1)
        ax = polys[..., 0]
        ay = polys[..., 1]
        ex, ey = e[..., 0], e[..., 1]
        L2 = np.where(valid, ex * ex + ey * ey, 1.0)
        t = np.clip(((c[0] - ax) * ex + (c[1] - ay) * ey) / L2, 0.0, 1.0)
        dist = np.hypot(c[0] - ax - t * ex, c[1] - ay - t * ey).min(axis=1)
        out[c_i] = inside | (dist <= radius)
    return out
