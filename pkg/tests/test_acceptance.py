"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from subtile.engine import SupertileTree, rule_metrics
from subtile.lab import (
    check_bord,
    check_diam_arc,
    check_finite_complexity,
    check_prop_inequalities,
    count,
    curve_family,
    decompose,
    empirical_frequencies,
    envelope_check,
    patch_center,
    patch_inradius,
    random_curve,
    reconstruct_counts,
    run_experiment,
)
from subtile.pf_core import Regime, classify, envelope_growth, perron_data, power_column, real_root_bisect
from subtile.ruleset import NAMES, builtin, builtin_matrix, substitution_matrix

SQRT5 = math.sqrt(5)
PHI = (1 + SQRT5) / 2


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        assert ok, f"criterion {label}: {detail}"

    return emit


# 1 ---------------------------------------------------------------------------
def test_criterion_1a_golden_matrices(report):
    t0 = time.perf_counter()
    expected = {
        "table": [[2, 2], [2, 2]],
        "square": [[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]],
        "pinwheel": [[2, 3], [3, 2]],
        "penrose2": [[2, 1], [1, 1]],
    }
    bad = [k for k, v in expected.items() if substitution_matrix(builtin(k)).tolist() != v]
    dt = time.perf_counter() - t0
    report("1a", not bad and dt < 1.0, f"mismatched={bad} time={dt:.2f}s")


def test_criterion_1b_rauzy_perron(report):
    t0 = time.perf_counter()
    lam = real_root_bisect([1, -1, -1, -1], 1.0, 2.0)
    target = lam**2
    mu = perron_data(builtin_matrix("rauzy")).mu
    dt = time.perf_counter() - t0
    ok = abs(mu - target) <= 1e-6 and dt < 1.0
    report("1b", ok, f"mu={mu:.9f} target={target:.9f} |diff|={abs(mu - target):.3g}")


def test_criterion_1c_rauzy_other_moduli(report):
    pd = perron_data(builtin_matrix("rauzy"))
    others = [abs(v) for v, _ in pd.spectrum if abs(v - pd.mu) > 1e-9]
    v = pd.v
    rel = abs(v[2] - pd.mu * v[0]) + abs(v[0] - pd.mu * v[1])
    report("1c", max(others) < 1 and rel < 1e-12, f"max other modulus={max(others):.6f} nu relation residual={rel:.2g}")


# 2 ---------------------------------------------------------------------------
def test_criterion_2_penrose_spectrum(report):
    t0 = time.perf_counter()
    M40 = substitution_matrix(builtin("penrose40"))
    pd = perron_data(M40)
    from subtile.pf_core import multiplicities_at_modulus

    mods = multiplicities_at_modulus(M40, pd.r)
    v40 = classify(M40, PHI)
    v2 = classify(substitution_matrix(builtin("penrose2")), PHI)
    dt = time.perf_counter() - t0
    checks = {
        "mu": abs(pd.mu - (3 + SQRT5) / 2) <= 1e-8,
        "r": abs(pd.r - PHI) <= 1e-8,
        "two_eigs": len(mods) == 2 and {round(d["value"].real, 6) for d in mods} == {round(PHI, 6), round(-PHI, 6)},
        "mult3_semisimple": all(d["algebraic"] == 3 and d["geometric"] == 3 for d in mods),
        "linearlog": v40.regime is Regime.LINEAR_LOG,
        "penrose2_linear": v2.regime is Regime.LINEAR and abs(v2.r - (3 - SQRT5) / 2) <= 1e-8,
        "time": dt < 5,
    }
    report("2", all(checks.values()), f"{checks} time={dt:.2f}s")


# 3 ---------------------------------------------------------------------------
def test_criterion_3_count_matrix_consistency(report):
    t0 = time.perf_counter()
    bad = []
    n_checked = 0
    for name in NAMES:
        rule = builtin(name)
        M = substitution_matrix(rule)
        for j in range(rule.n):
            for L in range(7):
                tree = SupertileTree(rule, j, L, verify_samples=0)
                n_checked += 1
                if tree.type_counts(0) != power_column(M, L, j):
                    bad.append((name, j, L))
    dt = time.perf_counter() - t0
    report("3", not bad and dt < 30, f"{n_checked} trees, mismatches={bad[:3]} time={dt:.1f}s")


# 4 ---------------------------------------------------------------------------
def test_criterion_4_reconstruction_identity(report):
    t0 = time.perf_counter()
    bad = []
    for name in NAMES:
        tree = SupertileTree(builtin(name), 0, 6)
        M = substitution_matrix(tree.rule)
        rng = np.random.default_rng(404)
        for k in range(100):
            gamma = random_curve(tree, rng)
            c = count(tree, gamma)
            if reconstruct_counts(decompose(tree, gamma), M) != (c.N, c.N_i):
                bad.append((name, k))
    dt = time.perf_counter() - t0
    report("4", not bad and dt < 120, f"500 curves, mismatches={bad[:3]} time={dt:.1f}s")


# 5 ---------------------------------------------------------------------------
LEMMA_DEPTHS = {"penrose2": 12, "penrose40": 12, "square": 7, "table": 7, "pinwheel": 6}


@pytest.mark.slow
def test_criterion_5_lemma_suites(report):
    t0 = time.perf_counter()
    summary = {}
    ok = True
    for name, depth in LEMMA_DEPTHS.items():
        tree = SupertileTree(builtin(name), 0, depth)
        reps = {
            "fc": check_finite_complexity(tree, 1000, seed=1),
            "arc": check_diam_arc(tree, 500, seed=2),
            "prop": check_prop_inequalities(tree, 100, seed=3),
            "bord": check_bord(tree, 30, seed=4),
        }
        ok &= all(r.ok for r in reps.values()) and reps["bord"].checked > 0
        summary[name] = {k: (r.checked, r.violations) for k, r in reps.items()}
    dt = time.perf_counter() - t0
    report("5", ok and dt < 180, f"(checked, violations)={summary} time={dt:.1f}s")


# 6 ---------------------------------------------------------------------------
ENVELOPE = {
    "pinwheel": (7, ("lin",)),
    "table": (9, ("lin",)),
    "square": (9, ("log", "lin_over_log")),
    "penrose40": (14, ("log", "lin_over_log")),
}


def _envelope_rows(name, depth):
    rule = builtin(name)
    tree = SupertileTree(rule, 0, depth, jobs=4)
    R0 = rule_metrics(rule).R
    smax = (patch_inradius(tree) - 3 * R0) / 1.3
    scales = np.geomspace(smax / 10, smax, 12)
    return run_experiment(rule, depth, ("ngon_circle", "square", "star_blob"), scales, 5, tree=tree, jobs=4)


@pytest.mark.slow
@pytest.mark.parametrize("name", list(ENVELOPE))
def test_criterion_6_envelopes(name, report):
    depth, stats = ENVELOPE[name]
    t0 = time.perf_counter()
    rows = _envelope_rows(name, depth)
    results = {s: envelope_check(rows, s, 1.5) for s in stats}
    dt = time.perf_counter() - t0
    detail = " ".join(f"{s}: top_max={r['top_max']:.4g} <= 1.5*{r['bottom_median']:.4g}? {r['ok']}"
                      for s, r in results.items())
    report(f"6[{name}]", all(r["ok"] for r in results.values()) and dt < 600, f"{detail} time={dt:.1f}s")


# 7 ---------------------------------------------------------------------------
def test_criterion_7_frequency_convergence(report):
    t0 = time.perf_counter()
    tol = {"table": 0.01, "pinwheel": 0.01, "penrose2": 0.02}
    dev = {}
    for name, eps in tol.items():
        nu = perron_data(substitution_matrix(builtin(name))).nu
        dev[name] = float(np.abs(empirical_frequencies(builtin(name), 8) - nu).max())
    dt = time.perf_counter() - t0
    report("7", all(dev[k] <= tol[k] for k in tol) and dt < 60, f"deviation={dev} time={dt:.2f}s")


# 8 ---------------------------------------------------------------------------
def test_criterion_8_corollary_envelope(report):
    t0 = time.perf_counter()
    growth = {}
    for name in ("penrose2", "square", "table", "pinwheel", "rauzy"):
        c_fit, c_max, _ = envelope_growth(builtin_matrix(name), 5, 15)
        growth[name] = c_max / c_fit if c_fit > 0 else (1.0 if c_max == 0 else math.inf)
    dt = time.perf_counter() - t0
    report("8", all(g <= 1.10 for g in growth.values()) and dt < 1.0,
           f"growth={ {k: round(v, 4) for k, v in growth.items()} } time={dt:.2f}s")


# 9 ---------------------------------------------------------------------------
def test_criterion_9_performance(report, tmp_path):
    t0 = time.perf_counter()
    tree = SupertileTree(builtin("pinwheel"), 0, 7)
    (tmp_path / "patch.json").write_text(tree.to_json(0))
    gamma = curve_family("ngon_circle", 100.0, 0, patch_center(tree))
    c = count(tree, gamma, check_coverage=False)
    dt = time.perf_counter() - t0
    report("9", tree.size(0) == 78125 and dt < 5.0, f"tiles={tree.size(0)} N={c.N} L={c.L} time={dt:.2f}s")
