"""Geometric validation of substitution rules."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geom import Polygon, contains, polygons_overlap_area
from ..pf_core import is_primitive
from .model import RuleError, SubstitutionRule, substitution_matrix

MC_OVERLAP_TOL = 1e-4


@dataclass
class PrototileCheck:
    id: int
    n_children: int
    child_area: float
    expected_area: float
    area_ok: bool
    contained_ok: bool
    overlap_ok: bool
    max_overlap: float
    coverage_ok: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.area_ok and self.contained_ok and self.overlap_ok and self.coverage_ok


@dataclass
class ValidationReport:
    rule_name: str
    checks: list[PrototileCheck]
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return self.errors + [f"prototile {c.id}: {m}" for c in self.checks for m in c.failures]

    def as_dict(self) -> dict:
        return {
            "rule": self.rule_name,
            "passed": self.passed,
            "warnings": list(self.warnings),
            "failures": self.failures(),
            "prototiles": [
                {
                    "id": c.id,
                    "children": c.n_children,
                    "child_area": c.child_area,
                    "expected_area": c.expected_area,
                    "area_ok": c.area_ok,
                    "contained_ok": c.contained_ok,
                    "overlap_ok": c.overlap_ok,
                    "max_overlap": c.max_overlap,
                    "coverage_ok": c.coverage_ok,
                }
                for c in self.checks
            ],
        }


def _bbox_disjoint(a, b) -> bool:
    return a[0] >= b[2] or b[0] >= a[2] or a[1] >= b[3] or b[1] >= a[3]


def validate_rule(rule: SubstitutionRule, tol: float = 1e-6, coverage_samples: int = 0, seed: int = 0) -> ValidationReport:
    """Area identity, child containment and pairwise interior overlap per prototile.

    ``coverage_samples`` > 0 additionally checks that random points of the
    inflated parent are covered by some child.
    """
    lam2 = rule.lam**2
    checks = []
    rng = np.random.default_rng(seed)
    for i, proto in enumerate(rule.prototiles):
        parent = proto.shape.scaled(rule.lam)
        expected = lam2 * proto.shape.area
        kids = [rule.child_polygon(i, k) for k in range(len(rule.children[i]))]
        got = float(sum(k.area for k in kids))
        failures = []
        area_ok = abs(got - expected) <= tol * expected
        if not area_ok:
            failures.append(f"area identity: children {got:.9g} vs lambda^2*area {expected:.9g}")
        scale = max(1.0, float(np.abs(parent.vertices).max()))
        bad = [k for k, poly in enumerate(kids) if not contains(parent, poly, tol * scale)]
        if bad:
            failures.append(f"children {bad} not contained in the inflated prototile")
        worst = 0.0
        overlap_ok = True
        boxes = [k.bbox() for k in kids]
        for a in range(len(kids)):
            for b in range(a + 1, len(kids)):
                if _bbox_disjoint(boxes[a], boxes[b]):
                    continue
                exact = kids[a].is_convex() and kids[b].is_convex()
                ov = polygons_overlap_area(kids[a], kids[b], seed=seed)
                worst = max(worst, ov)
                limit = (tol if exact else MC_OVERLAP_TOL) * expected
                if ov > limit:
                    overlap_ok = False
                    failures.append(f"children {a} and {b} overlap (area {ov:.3g})")
        coverage_ok = True
        if coverage_samples > 0:
            x0, y0, x1, y1 = parent.bbox()
            pts = rng.uniform((x0, y0), (x1, y1), size=(coverage_samples, 2))
            for p in pts:
                if parent.strictly_contains_point(p, tol * scale) and not any(
                    k.contains_point(p, tol * scale) for k in kids
                ):
                    coverage_ok = False
                    failures.append(f"point {p.tolist()} of the inflated prototile is not covered")
                    break
        checks.append(
            PrototileCheck(i, len(kids), got, expected, area_ok, not bad, overlap_ok, worst, coverage_ok, failures)
        )
    report = ValidationReport(rule.name, checks)
    try:
        M = substitution_matrix(rule)
    except RuleError as exc:
        report.errors.append(str(exc))
        return report
    if not is_primitive(M):
        report.warnings.append("substitution matrix is not primitive")
    a = rule.areas()
    resid = np.abs(a @ M.to_float() - lam2 * a).max()
    if resid > 1e-6 * np.abs(a).max():
        report.errors.append(f"area vector is not a left eigenvector for lambda^2 (residual {resid:.3g})")
    return report
