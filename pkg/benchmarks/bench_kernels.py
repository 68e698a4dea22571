"""Compare the compiled and numpy kernel backends on pinwheel level-0 tiles.

Run: python3 benchmarks/bench_kernels.py [--depth 7] [--repeat 5]
"""
import argparse
import time

import numpy as np

from subtile.engine import SupertileTree
from subtile.kernels import get_backend
from subtile.lab import patch_center
from subtile.ruleset import builtin


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rule", default="pinwheel")
    ap.add_argument("--depth", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--balls", type=int, default=50)
    args = ap.parse_args(argv)

    tree = SupertileTree(builtin(args.rule), 0, args.depth)
    polys, nv = tree.level_polygons(0)
    c = patch_center(tree)
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    radius = 0.4 * tree.root_polygon().boundary_distance(c)
    curve = np.ascontiguousarray(np.column_stack([c[0] + radius * np.cos(th), c[1] + radius * np.sin(th)]))
    rng = np.random.default_rng(0)
    centers = c + rng.uniform(-radius, radius, size=(args.balls, 2))
    pts = c + rng.uniform(-1.2 * radius, 1.2 * radius, size=(200_000, 2))
    R = tree.metrics(0).R

    cases = {
        "classify_convex": lambda k: k.classify_convex(polys, nv, curve, True, tree.tol, True),
        "points_inside": lambda k: k.points_inside(pts, curve, tree.tol),
        "balls_meet": lambda k: k.balls_meet(polys, nv, centers, 2 * R),
    }
    try:
        backends = {"python": get_backend("python"), "cython": get_backend("cython")}
    except ImportError:
        backends = {"python": get_backend("python")}
        print("compiled extension not built; timing the numpy backend only")

    print(f"{args.rule} depth {args.depth}: {len(polys)} tiles, best of {args.repeat}")
    print(f"{'kernel':<16}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        res = {}
        outs = {}
        for b, mod in backends.items():
            res[b], outs[b] = _best(lambda: fn(mod), args.repeat)
        if len(outs) == 2:
            a, b = (np.asarray(o, dtype=np.int64) if not isinstance(o, tuple) else np.stack(o).astype(np.int64)
                    for o in outs.values())
            assert np.array_equal(a, b), f"{name}: backends disagree"
        speed = f"{res['python'] / res['cython']:9.1f}x" if "cython" in res else ""
        print(f"{name:<16}" + "".join(f"{res[b] * 1e3:10.1f}ms" for b in backends) + speed)


if __name__ == "__main__":
    main()
