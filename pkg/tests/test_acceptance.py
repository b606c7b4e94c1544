"""End-to-end acceptance checks, one test and one printed PASS/FAIL line per criterion.

Heavy runs come from ``sweep_cache`` so other modules in the same session reuse them.
Run ``python tests/test_acceptance.py`` to print the lines without pytest.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction

import numpy as np

import sweep_cache as cache
from snrlab.algebra import AlgebraSpec, NormSpec, coordinatewise
from snrlab.engine import estimate_snr, numerical_radius, unital_reduction_check
from snrlab.witnesses import (
    FUNCTIONAL_TOL,
    DiscreteSemigroup,
    StepFunction,
    delta,
    l1_line_witness,
    polar_grid,
    semigroup_algebra,
    semigroup_witness,
    volterra_discrete_witness,
    volterra_l1_witness,
)

LINES: list[str] = []
RADII: list[tuple[str, float, float]] = []


def record(name: str, ok: bool, detail: str) -> bool:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    print(LINES[-1])
    return ok


def table_sweep_check() -> bool:
    bad = []
    worst = {"outside": 0.0, "hausdorff": 0.0, "oracle_defect": 0.0}
    for case in cache.CASES:
        res = cache.sweep_case(*case)
        RADII.append((cache.case_id(case), res["radius"], res["element_norm"]))
        for key in worst:
            worst[key] = max(worst[key], res[key])
        fails = [
            label
            for label, ok in (
                ("sound", res["outside"] <= 1e-6),
                ("hausdorff", res["hausdorff"] <= 0.05),
                ("convex", res["oracle_defect"] <= 0.02),
            )
            if not ok
        ]
        if fails:
            bad.append(f"{cache.case_id(case)}({','.join(fails)})")
    detail = f"{len(cache.CASES)} row/p cases; worst outside {worst['outside']:.3g}, hausdorff {worst['hausdorff']:.3g}, oracle defect {worst['oracle_defect']:.3g}"
    if bad:
        detail += "; failing " + " ".join(bad)
    return record("table sweep", not bad, detail)


def product_algebra_check() -> bool:
    gaps = []
    for seed in range(3):
        res = cache.direct_sum_case(seed)
        RADII.append((f"direct-sum-{seed}", *res["radius"]))
        gaps.append(res["hausdorff"])
    return record("l1-sum product rule", max(gaps) <= 0.05, f"3 pairs, max hull hausdorff {max(gaps):.3g}")


def pointwise_check() -> bool:
    gaps = []
    for larger in (False, True):
        for i in range(20):
            res = cache.pointwise_case(i, larger)
            RADII.append((f"pointwise-{i}-{larger}", *res["radius"]))
            gaps.append(max(res["hausdorff"], res["outside"]))
    return record("pointwise l^p hull of values", max(gaps) <= 0.05, f"40 instances (20 at p, 20 at r > p), max gap {max(gaps):.3g}")


def _sweep(run, targets, tol) -> tuple[float, bool]:
    err, ok = 0.0, True
    for z in targets:
        w = run(z)
        err = max(err, w.error / max(1.0, abs(w.target)))
        ok &= w.functional_ok and abs(w.g_pairing - 1) <= FUNCTIONAL_TOL and abs(w.h_dual_norm - 1) <= FUNCTIONAL_TOL
    return err, ok and err <= tol


def witness_check() -> bool:
    S = DiscreteSemigroup.naturals(40)
    f_semi = {2: 1 + 1j, 5: -0.5, 11: 2j}
    weight = {s: (1 + (s - 1) / 10) ** 0.5 for s in S.labels}
    norm_semi = sum(abs(v) * weight[s] for s, v in f_semi.items())
    f_disc = {Fraction(1, 8): 1, Fraction(1, 4): -2j, Fraction(1, 2): 0.5 + 0.5j}
    norm_disc = sum(abs(v) for v in f_disc.values())
    line_f = StepFunction.from_pieces([(1, 2, 1), (-4, -2.5, 0.5), (3, 3.5, 2)])
    volt_f = StepFunction.from_pieces([(0.2, 0.4, 1), (0.5, 0.7, 2)])
    runs = {
        "semigroup": (lambda z: semigroup_witness(S, weight, f_semi, 1, z), polar_grid(norm_semi), 1e-9),
        "volterra-discrete": (lambda z: volterra_discrete_witness(f_disc, z), polar_grid(norm_disc, closed=False), 1e-9),
        "l1-line": (lambda z: l1_line_witness(line_f, z), polar_grid(1), 1e-9),
        "volterra-l1": (lambda z: volterra_l1_witness(volt_f, z), polar_grid(1), 1e-9),
        "l1-line-simpson": (lambda z: l1_line_witness(line_f, z, quad="simpson"), polar_grid(1), 1e-4),
        "volterra-l1-simpson": (lambda z: volterra_l1_witness(volt_f, z, quad="simpson"), polar_grid(1), 1e-4),
    }
    parts, all_ok = [], True
    for name, (run, targets, tol) in runs.items():
        err, ok = _sweep(run, targets, tol)
        all_ok &= ok
        parts.append(f"{name} {err:.1e}")
    return record("witness identities", all_ok, "16x8 grids; max relative error " + ", ".join(parts))


def remark_check() -> bool:
    worst = 0.0
    Z = DiscreteSemigroup.nonnegative(8)
    clouds = [(semigroup_algebra(Z), delta(Z, 0))]
    R = DiscreteSemigroup.right_zero(8)
    clouds += [(semigroup_algebra(R), delta(R, n)) for n in (1, 4, 8)]
    for A, a in clouds:
        cloud = estimate_snr(A, a, 10_000, 16)
        RADII.append(("remark", numerical_radius(cloud), float(A.norm(a))))
        worst = max(worst, float(np.abs(cloud.points - 1).max()))
    return record("unit-delta ranges", worst <= 1e-9, f"4 clouds, max distance from 1 {worst:.1e}")


def unital_check() -> bool:
    A = AlgebraSpec(coordinatewise(2), NormSpec.lp(math.inf, 2), identity=[1, 1])
    r = np.random.default_rng(77)
    worst = 0.0
    for _ in range(5):
        a = r.normal(size=2) + 1j * r.normal(size=2)
        rep = unital_reduction_check(A, a, cache.SAMPLES, cache.K)
        worst = max(worst, rep.max_distance)
    return record("unital reduction", worst <= 0.02, f"5 elements, max distance to hull at identity {worst:.3g}")


def radius_check() -> bool:
    if not RADII:
        table_sweep_check()
        product_algebra_check()
        pointwise_check()
        remark_check()
    ratios = [nu / max(norm, 1e-300) if norm > 0 else (0.0 if nu == 0 else math.inf) for _, nu, norm in RADII]
    worst = max(ratios)
    return record("radius bound", worst <= 1 + 1e-8, f"{len(RADII)} clouds, max radius/norm {worst:.10f}")


def hunt_check() -> bool:
    calib = cache.hunt_calibration()
    first, again = cache.random_hunt(1), cache.random_hunt(2)
    deterministic = first.defects == again.defects and [r.to_json() for r in first.reports] == [r.to_json() for r in again.reports]
    ok = not calib.reports and not calib.artifacts and deterministic and first.candidates == 1000
    detail = (
        f"table calibration {calib.candidates} combos, {len(calib.reports)} survivors, max defect {max(calib.defects):.3g}; "
        f"random budget {first.candidates}: {first.associative} associative, {len(first.reports)} survivors, "
        f"deterministic across workers {deterministic}"
    )
    return record("hunt calibration", ok, detail)


def test_table_sweep():
    assert table_sweep_check()


def test_product_algebra():
    assert product_algebra_check()


def test_pointwise_hull():
    assert pointwise_check()


def test_witness_identities():
    assert witness_check()


def test_unit_delta_ranges():
    assert remark_check()


def test_unital_reduction():
    assert unital_check()


def test_radius_bound():
    assert radius_check()


def test_hunt_calibration():
    assert hunt_check()


CHECKS = [table_sweep_check, product_algebra_check, pointwise_check, witness_check, remark_check, unital_check, radius_check, hunt_check]

if __name__ == "__main__":
    results = [check() for check in CHECKS]
    sys.exit(0 if all(results) else 1)
