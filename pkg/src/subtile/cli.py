"""``subtile`` command line."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import SCHEMA_VERSION, __version__
from .engine import SupertileTree, TileCapExceeded, rule_metrics
from .geom import Curve, GeometryError, diameter
from .pf_core import IntMatrix, NotPrimitiveError, classify, multiplicities_at_modulus, perron_data, semisimple_exact
from .ruleset import (
    MATRIX_NAMES,
    NAMES,
    RuleError,
    builtin,
    builtin_matrix,
    load_rule,
    serialize_rule,
    substitution_matrix,
    validate_rule,
)


class UsageError(Exception):
    """Bad invocation: exit status 2."""


class DomainError(Exception):
    """Valid invocation that the theory or the data rejects: exit status 1."""


def _dump(obj) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"file not found: {path}")
    return p


def resolve_rule(spec: str):
    if spec in NAMES:
        return builtin(spec)
    return load_rule(_existing(spec))


def _curve(args) -> Curve:
    if getattr(args, "curve", None):
        return Curve.load(_existing(args.curve))
    raise UsageError("a curve is required (--curve FILE or --kind/--scale)")


def parse_scales(text: str) -> list[float]:
    """``a:b:n`` for n geometrically spaced scales from a to b, or a comma list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
            if a <= 0 or b <= 0 or n < 1:
                raise ValueError
            return [float(x) for x in np.geomspace(a, b, n)]
        vals = [float(x) for x in text.split(",") if x.strip()]
        if not vals or min(vals) <= 0:
            raise ValueError
        return vals
    except ValueError:
        raise UsageError(f"bad --scales {text!r}; use START:STOP:COUNT or a comma list of positive numbers") from None


def _tree(args, rule) -> SupertileTree:
    if not 0 <= args.root < rule.n:
        raise UsageError(f"--root must be in 0..{rule.n - 1}")
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    return SupertileTree(rule, args.root, args.depth, jobs=args.jobs)


def _placed_curve(args, tree):
    from .lab import placed_curve

    if getattr(args, "curve", None):
        return _curve(args)
    if args.kind and args.scale:
        return placed_curve(tree, args.kind, args.scale, args.seed)
    raise UsageError("a curve is required (--curve FILE or --kind KIND --scale S)")


# ---------------------------------------------------------------- subcommands
def cmd_rules(args) -> int:
    if args.action == "list":
        for name in NAMES:
            r = builtin(name)
            sys.stdout.write(f"{name}\tn={r.n}\tlambda={r.lam:.12g}\tgroup={r.group.value}\n")
        return 0
    if not args.target:
        raise UsageError(f"rules {args.action} needs a rule name or file")
    rule = resolve_rule(args.target)
    if args.action == "show":
        _emit(serialize_rule(rule), None)
        return 0
    rep = validate_rule(rule, tol=args.tol, coverage_samples=args.samples)
    _emit(_dump({"validation": rep.as_dict(), "matrix": _safe_matrix(rule)}), None)
    return 0 if rep.passed else 1


def _safe_matrix(rule):
    try:
        return substitution_matrix(rule).tolist()
    except RuleError:
        return None


def cmd_matrix(args) -> int:
    lam = args.lam
    if args.rule and args.file:
        raise UsageError("give either a matrix file or --rule, not both")
    if args.rule:
        if args.rule in MATRIX_NAMES:
            M = builtin_matrix(args.rule)
            if args.rule != "rauzy" and lam is None:
                lam = builtin(args.rule).lam
        else:
            rule = resolve_rule(args.rule)
            M = substitution_matrix(rule)
            lam = rule.lam if lam is None else lam
    elif args.file:
        try:
            M = IntMatrix.load(_existing(args.file))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
    else:
        raise UsageError("matrix needs a file or --rule")
    pd = perron_data(M)
    out = {"matrix": M.tolist(), "perron": pd.as_dict()}
    if args.classify:
        if lam is None:
            raise UsageError("--classify needs --lambda for this matrix")
        verdict = classify(M, lam)
        out["classification"] = verdict.as_dict()
        out["regime"] = verdict.regime.value
        out["modulus_r_eigenvalues"] = [
            {**d, "value": [d["value"].real, d["value"].imag]} for d in multiplicities_at_modulus(M, pd.r)
        ]
        if args.poly:
            coeffs = [int(c) for c in args.poly.split(",")]
            out["semisimple_exact"] = semisimple_exact(M, coeffs)
    out["mu"], out["r"] = pd.mu, pd.r
    _emit(_dump(out), args.out)
    return 0


def cmd_curve_info(args) -> int:
    c = Curve.load(_existing(args.file))
    v = c.vertices
    per = float(np.hypot(*(np.roll(v, -1, axis=0) - v).T).sum())
    _emit(_dump({"vertices": len(c), "diameter": diameter(c), "area": c.area, "perimeter": per,
                 "bbox": list(c.bbox())}), None)
    return 0


def cmd_generate(args) -> int:
    rule = resolve_rule(args.rule)
    tree = _tree(args, rule)
    level = args.level
    if not 0 <= level <= tree.depth:
        raise UsageError(f"--level must be in 0..{tree.depth}")
    if args.out and args.out.endswith(".svg"):
        text = tree.to_svg(level)
    else:
        text = tree.to_json(level) + "\n"
    _emit(text, args.out)
    if args.out:
        sys.stderr.write(f"wrote {tree.size(level)} tiles to {args.out}\n")
    return 0


def cmd_count(args) -> int:
    from .lab import count, discrepancies

    rule = resolve_rule(args.rule)
    tree = _tree(args, rule)
    curve = _placed_curve(args, tree)
    c = count(tree, curve, check_coverage=not args.no_coverage_check)
    nu = perron_data(substitution_matrix(rule)).nu
    _emit(_dump({"rule": rule.name, "depth": tree.depth, "root": tree.root, "counts": c.as_dict(),
                 "nu": nu.tolist(), "D": list(discrepancies(c, nu))}), args.out)
    return 0


def cmd_decompose(args) -> int:
    from .lab import count, decompose, decomposition_svg, reconstruct_counts, verify_prop_inequalities

    rule = resolve_rule(args.rule)
    tree = _tree(args, rule)
    curve = _placed_curve(args, tree)
    cov = not args.no_coverage_check
    dec = decompose(tree, curve, cov)
    if args.out and args.out.endswith(".svg"):
        _emit(decomposition_svg(tree, dec, curve), args.out)
        return 0
    c = count(tree, curve, cov)
    M = substitution_matrix(rule)
    N, Ni = reconstruct_counts(dec, M)
    doc = {
        "rule": rule.name,
        "m": dec.m,
        "parts": [{"level": l, "size": len(p), "addresses": tree.addresses(l)[p].tolist()} for l, p in enumerate(dec.parts)],
        "counts": c.as_dict(),
        "reconstructed": {"N": N, "N_i": list(Ni)},
        "inequalities": verify_prop_inequalities(dec, c, rule_metrics(rule), M),
    }
    _emit(_dump(doc), args.out)
    return 0


def cmd_experiment(args) -> int:
    from .lab import CURVE_KINDS, rows_to_csv, run_experiment

    rule = resolve_rule(args.rule)
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
    bad = [k for k in kinds if k not in CURVE_KINDS]
    if bad or not kinds:
        raise UsageError(f"unknown curve kind(s) {bad}; choose from {', '.join(CURVE_KINDS)}")
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    scales = parse_scales(args.scales)
    tree = _tree(args, rule)
    rows = run_experiment(rule, args.depth, kinds, scales, args.seeds, root=args.root, jobs=args.jobs, tree=tree,
                          check_coverage=not args.no_coverage_check)
    _emit(rows_to_csv(rows, rule.n), args.out)
    return 0


def cmd_frequencies(args) -> int:
    from .lab import empirical_frequencies

    rule = resolve_rule(args.rule)
    tree = _tree(args, rule)
    emp = empirical_frequencies(rule, args.depth, tree=tree)
    nu = perron_data(substitution_matrix(rule)).nu
    _emit(_dump({"rule": rule.name, "depth": args.depth, "empirical": emp.tolist(), "nu": nu.tolist(),
                 "max_deviation": float(np.abs(emp - nu).max())}), args.out)
    return 0


def cmd_verify(args) -> int:
    from .lab import verify_lemmas

    rule = resolve_rule(args.rule)
    tree = _tree(args, rule)
    reps = verify_lemmas(tree, args.samples, args.seed)
    ok = all(r.ok for r in reps.values())
    _emit(_dump({"rule": rule.name, "depth": tree.depth, "ok": ok,
                 "reports": {k: r.as_dict() for k, r in reps.items()}}), args.out)
    return 0 if ok else 1


# --------------------------------------------------------------------- parser
def _tree_opts(p, depth_default: int | None = None) -> None:
    p.add_argument("--rule", required=True, help="builtin name or path to a .rule file")
    if depth_default is None:
        p.add_argument("--depth", type=int, required=True, help="supertile depth L")
    else:
        p.add_argument("--depth", type=int, default=depth_default, help="supertile depth L")
    p.add_argument("--root", type=int, default=0, help="root prototile index (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (results do not depend on it)")


def _curve_opts(p) -> None:
    from .lab import CURVE_KINDS

    p.add_argument("--curve", help="curve file: one 'x y' vertex per line, implicitly closed")
    p.add_argument("--kind", choices=CURVE_KINDS, help="generated curve centred in the patch")
    p.add_argument("--scale", type=float, help="size of the generated curve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-coverage-check", action="store_true", help="allow curves that leave the patch")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subtile", description="Substitution tilings and tile-count discrepancy lab.")
    ap.add_argument("--version", action="version", version=f"subtile {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("rules", help="list, show or validate substitution rules")
    p.add_argument("action", choices=("list", "show", "validate"))
    p.add_argument("target", nargs="?", help="builtin name or .rule file")
    p.add_argument("--tol", type=float, default=1e-6, help="relative validation tolerance")
    p.add_argument("--samples", type=int, default=0, help="random coverage sample points per prototile")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("matrix", help="Perron data and discrepancy regime of a substitution matrix")
    p.add_argument("file", nargs="?", help="matrix file: n, then n rows of n integers")
    p.add_argument("--rule", help=f"builtin ({', '.join(MATRIX_NAMES)}) or .rule file")
    p.add_argument("--lambda", dest="lam", type=float, help="dilation factor (defaults to the rule's)")
    p.add_argument("--classify", action="store_true", help="report the regime")
    p.add_argument("--poly", help="integer coefficients (highest first) for the exact semi-simplicity test")
    p.add_argument("--out")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("curve-info", help="diameter and vertex count of a curve file")
    p.add_argument("file")
    p.set_defaults(func=cmd_curve_info)

    p = sub.add_parser("generate", help="expand a supertile and export it as JSON or SVG")
    _tree_opts(p)
    p.add_argument("--level", type=int, default=0, help="hierarchy level to export (default 0)")
    p.add_argument("--out", help="output path; .svg selects SVG, anything else JSON (default stdout JSON)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("count", help="tiles inside and on a Jordan curve")
    _tree_opts(p)
    _curve_opts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("decompose", help="hierarchical decomposition of the disk bounded by a curve")
    _tree_opts(p)
    _curve_opts(p)
    p.add_argument("--out", help=".svg renders parts by level; otherwise JSON")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("experiment", help="discrepancy sweep over curve kinds, scales and seeds (CSV)")
    _tree_opts(p)
    p.add_argument("--kinds", default="ngon_circle", help="comma list of curve kinds")
    p.add_argument("--scales", default="10:100:12", help="START:STOP:COUNT (geometric) or comma list")
    p.add_argument("--seeds", type=int, default=1, help="seeds 0..N-1 per kind and scale")
    p.add_argument("--no-coverage-check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("frequencies", help="empirical tile frequencies against the Perron frequencies")
    _tree_opts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_frequencies)

    p = sub.add_parser("verify", help="run the lemma and inequality suites on a supertile")
    _tree_opts(p)
    p.add_argument("--samples", type=int, default=100, help="base sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    from .lab import CurveNotCovered

    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"subtile: error: {exc}\n")
        return 2
    except KeyError as exc:
        sys.stderr.write(f"subtile: error: {exc.args[0] if exc.args else exc}\n")
        return 2
    except (DomainError, NotPrimitiveError, CurveNotCovered, RuleError, GeometryError, TileCapExceeded) as exc:
        sys.stderr.write(f"subtile: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"subtile: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
