# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch predicates for convex tiles against a polyline.

Mirrors ``subtile._kernels_py``; see there for the contract.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY, fabs

cnp.import_array()


cdef inline bint _inside_or_on(double px, double py, const double[:, ::1] cv, int V, double tol) noexcept nogil:
    cdef int k, j
    cdef bint inside = False
    cdef double ax, ay, bx, by, ex, ey, L2, t, dx, dy
    cdef double best = INFINITY
    for k in range(V):
        j = k + 1
        if j == V:
            j = 0
        ax = cv[k, 0]; ay = cv[k, 1]; bx = cv[j, 0]; by = cv[j, 1]
        if (ay > py) != (by > py):
            if px < ax + (py - ay) * (bx - ax) / (by - ay):
                inside = not inside
        ex = bx - ax; ey = by - ay
        L2 = ex * ex + ey * ey
        if L2 > 0:
            t = ((px - ax) * ex + (py - ay) * ey) / L2
            if t < 0:
                t = 0
            elif t > 1:
                t = 1
        else:
            t = 0
        dx = px - ax - t * ex; dy = py - ay - t * ey
        L2 = dx * dx + dy * dy
        if L2 < best:
            best = L2
    return inside or best <= tol * tol


cdef inline bint _clip(const double[:, :, ::1] P, Py_ssize_t i, int K,
                       double ax, double ay, double bx, double by, double offset) noexcept nogil:
    cdef int k, k1
    cdef double t0 = 0.0, t1 = 1.0
    cdef double vx, vy, ex, ey, L, da, db, A, B, t
    for k in range(K):
        k1 = k + 1
        if k1 == K:
            k1 = 0
        vx = P[i, k, 0]; vy = P[i, k, 1]
        ex = P[i, k1, 0] - vx; ey = P[i, k1, 1] - vy
        L = sqrt(ex * ex + ey * ey)
        if L == 0:
            continue
        da = (ex * (ay - vy) - ey * (ax - vx)) / L
        db = (ex * (by - vy) - ey * (bx - vx)) / L
        A = da - offset
        B = db - da
        if B == 0:
            if A < 0:
                return False
        elif B > 0:
            t = -A / B
            if t > t0:
                t0 = t
        else:
            t = -A / B
            if t < t1:
                t1 = t
        if t0 > t1:
            return False
    return t0 <= t1


def points_inside(points, curve, double tol):
    cdef const double[:, ::1] pv = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    cdef const double[:, ::1] cv = np.ascontiguousarray(curve, dtype=np.float64)
    cdef Py_ssize_t n = pv.shape[0], i
    cdef int V = cv.shape[0]
    out = np.zeros(n, dtype=bool)
    cdef cnp.npy_bool[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _inside_or_on(pv[i, 0], pv[i, 1], cv, V, tol)
    return out


def classify_convex(polys, nverts, curve, bint closed, double tol, bint need_contained=True):
    cdef const double[:, :, ::1] P = np.ascontiguousarray(polys, dtype=np.float64)
    cdef const int[::1] NV = np.ascontiguousarray(nverts, dtype=np.int32)
    cdef const double[:, ::1] cv = np.ascontiguousarray(curve, dtype=np.float64)
    cdef Py_ssize_t T = P.shape[0], i
    cdef int K = P.shape[1] if T > 0 else 0
    cdef int V = cv.shape[0]
    cdef int nseg = V if closed else V - 1
    meets_a = np.zeros(T, dtype=np.uint8)
    cont_a = np.zeros(T, dtype=np.uint8)
    cdef unsigned char[::1] meets = meets_a
    cdef unsigned char[::1] cont = cont_a
    cdef double cx0 = INFINITY, cy0 = INFINITY, cx1 = -INFINITY, cy1 = -INFINITY
    cdef double tx0, ty0, tx1, ty1, ax, ay, bx, by, sx, sy
    cdef int k, s, j, nv
    cdef bint m, enters, ok
    for k in range(V):
        if cv[k, 0] < cx0: cx0 = cv[k, 0]
        if cv[k, 0] > cx1: cx1 = cv[k, 0]
        if cv[k, 1] < cy0: cy0 = cv[k, 1]
        if cv[k, 1] > cy1: cy1 = cv[k, 1]
    with nogil:
        for i in range(T):
            tx0 = INFINITY; ty0 = INFINITY; tx1 = -INFINITY; ty1 = -INFINITY
            for k in range(K):
                if P[i, k, 0] < tx0: tx0 = P[i, k, 0]
                if P[i, k, 0] > tx1: tx1 = P[i, k, 0]
                if P[i, k, 1] < ty0: ty0 = P[i, k, 1]
                if P[i, k, 1] > ty1: ty1 = P[i, k, 1]
            if tx0 > cx1 + tol or tx1 < cx0 - tol or ty0 > cy1 + tol or ty1 < cy0 - tol:
                continue
            m = False
            enters = False
            for s in range(nseg):
                j = s + 1
                if j == V:
                    j = 0
                ax = cv[s, 0]; ay = cv[s, 1]; bx = cv[j, 0]; by = cv[j, 1]
                if (ax < tx0 - tol and bx < tx0 - tol) or (ax > tx1 + tol and bx > tx1 + tol):
                    continue
                if (ay < ty0 - tol and by < ty0 - tol) or (ay > ty1 + tol and by > ty1 + tol):
                    continue
                if not m and _clip(P, i, K, ax, ay, bx, by, -tol):
                    m = True
                    if not (closed and need_contained):
                        break
                if m and closed and need_contained and _clip(P, i, K, ax, ay, bx, by, tol):
                    enters = True
                    break
            meets[i] = m
            if not (closed and need_contained) or enters:
                continue
            nv = NV[i]
            sx = 0; sy = 0
            for k in range(nv):
                sx = sx + P[i, k, 0]; sy = sy + P[i, k, 1]
            ok = _inside_or_on(sx / nv, sy / nv, cv, V, tol)
            if ok and m:
                for k in range(nv):
                    if not _inside_or_on(P[i, k, 0], P[i, k, 1], cv, V, tol):
                        ok = False
                        break
            cont[i] = ok
    return meets_a, cont_a


def balls_meet(polys, nverts, centers, double radius):
    cdef const double[:, :, ::1] P = np.ascontiguousarray(polys, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(np.asarray(centers, dtype=np.float64).reshape(-1, 2))
    cdef Py_ssize_t T = P.shape[0], nc = C.shape[0], i, c
    cdef int K = P.shape[1] if T > 0 else 0
    cdef int k, k1
    cdef double px, py, vx, vy, ex, ey, L2, t, dx, dy, best, cr
    cdef bint inside
    out = np.zeros((nc, T), dtype=bool)
    cdef cnp.npy_bool[:, ::1] ov = out
    with nogil:
        for c in range(nc):
            px = C[c, 0]; py = C[c, 1]
            for i in range(T):
                inside = True
                best = INFINITY
                for k in range(K):
                    k1 = k + 1
                    if k1 == K:
                        k1 = 0
                    vx = P[i, k, 0]; vy = P[i, k, 1]
                    ex = P[i, k1, 0] - vx; ey = P[i, k1, 1] - vy
                    L2 = ex * ex + ey * ey
                    if L2 == 0:
                        continue
                    cr = ex * (py - vy) - ey * (px - vx)
                    if cr < 0:
                        inside = False
                    t = ((px - vx) * ex + (py - vy) * ey) / L2
                    if t < 0:
                        t = 0
                    elif t > 1:
                        t = 1
                    dx = px - vx - t * ex; dy = py - vy - t * ey
                    if dx * dx + dy * dy < best:
                        best = dx * dx + dy * dy
                ov[c, i] = inside or best <= radius * radius
    return out
