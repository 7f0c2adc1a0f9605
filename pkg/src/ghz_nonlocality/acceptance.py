"""Self-checks reproducing the analytical results numerically.

``run_all`` evaluates every criterion and returns one :class:`CriterionResult`
per criterion; the ``verify`` command and ``tests/test_acceptance.py`` both
use it.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import bisect

from . import regions
from .bell import builtin
from .entanglement import cgm_closed_form, cgm_x, classify
from .optimize import DEFAULT_STARTS, DEFAULT_TOL, seesaw_batch
from .states import Q_MAX, Q_MIN, SQRT3, density_matrix, max_abs_p, validate, x_elements

GRID_STEPS = 50
BOUNDARY_BAND = 1  # grid cells


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


class _Context:
    """Lazily computed data shared between criteria."""

    def __init__(self, seed: int, starts: int, tol: float):
        self.seed, self.starts, self.tol = seed, starts, tol
        self._grid = None

    def grid(self) -> list[regions.NonlocalityReport]:
        if self._grid is None:
            self._grid = regions.scan(GRID_STEPS, GRID_STEPS, "both", starts=self.starts, tol=self.tol, seed=self.seed)
        return self._grid


def _closed_form_agreement(ctx: _Context, name: str, tol: float):
    grid = ctx.grid()
    errs = np.array([abs(r.numeric(name) - r.analytic(name)) for r in grid])
    worst = int(np.argmax(errs))
    bad = [r for r, e in zip(grid, errs) if e >= tol]
    detail = f"{len(grid)} points, max |num - closed form| = {errs[worst]:.3g} at (p={grid[worst].p:.4f}, q={grid[worst].q:.4f})"
    if bad:
        qs = [r.q for r in bad]
        detail += f"; {len(bad)} points over {tol:g}, q in [{min(qs):.4f}, {max(qs):.4f}]"
    return not bad, detail, bad


def criterion_1(ctx: _Context) -> CriterionResult:
    ok, detail, _ = _closed_form_agreement(ctx, "mermin", 1e-6)
    return CriterionResult(1, "Mermin maximum equals 8|p|", ok, detail)


def criterion_2(ctx: _Context) -> CriterionResult:
    ok, detail, _ = _closed_form_agreement(ctx, "svetlichny", 1e-6)
    return CriterionResult(2, "Svetlichny maximum equals 8*sqrt2*|p|", ok, detail)


def criterion_3(ctx: _Context) -> CriterionResult:
    ok, detail, _ = _closed_form_agreement(ctx, "bancal99", 1e-6)
    nonneg = [abs(r.ns99_num - r.ns99_max) for r in ctx.grid() if r.q >= 0]
    detail += f"; q >= 0 only: max error {max(nonneg):.3g}"
    return CriterionResult(3, "Bancal-99 maximum equals 4q/sqrt3 + 2 sqrt(16q^2/3 + 4p^2)", ok, detail)


def _near_boundary(r, grid_by_pos, predicate, dp, dq) -> bool:
    """True if a neighbour within BOUNDARY_BAND cells has a different predicate value."""
    here = predicate(r)
    for i in range(-BOUNDARY_BAND, BOUNDARY_BAND + 1):
        for j in range(-BOUNDARY_BAND, BOUNDARY_BAND + 1):
            key = (round((r.p + i * dp) / dp), round((r.q + j * dq) / dq))
            other = grid_by_pos.get(key)
            if other is not None and predicate(other) != here:
                return True
    return False


def criterion_4(ctx: _Context) -> CriterionResult:
    grid = ctx.grid()
    applicable = [r for r in grid if regions.l15_formula_applies(r.p, r.q)]
    errs = [abs(r.l15_num - r.l15_max) for r in applicable]
    bad = [r for r, e in zip(applicable, errs) if e >= 1e-5]
    part_a = not bad

    ps, qs = regions.grid_axes(GRID_STEPS, GRID_STEPS)
    dp, dq = ps[1] - ps[0], qs[1] - qs[0]
    by_pos = {(round(r.p / dp), round(r.q / dq)): r for r in grid}

    # numeric violation never leaves the analytic standard-nonlocal region
    outside = [r for r in grid if r.l15_num > 4 and not r.standard_nl]
    part_b = all(_near_boundary(r, by_pos, lambda x: x.standard_nl, dp, dq) for r in outside)

    # numeric violation coincides with condition (ii)
    def cond_ii(x):
        return regions.sliwa15_condition(x.p, x.q)

    mismatch = [r for r in grid if (r.l15_num > 4) != cond_ii(r)]
    unexplained = [r for r in mismatch if not _near_boundary(r, by_pos, cond_ii, dp, dq)]
    part_c = not unexplained

    detail = (
        f"(a) formula agreement on {len(applicable)} applicable points, max error {max(errs):.3g}"
        + (f", {len(bad)} over 1e-5 with q in [{min(r.q for r in bad):.4f}, {max(r.q for r in bad):.4f}]" if bad else "")
        + f"; (b) see-saw > 4 outside (i) or (ii): {len(outside)} points, all within one cell of the boundary: {part_b}"
        + f"; (c) see-saw > 4 vs condition (ii): {len(mismatch)} mismatches, {len(unexplained)} away from the boundary"
    )
    return CriterionResult(4, "Sliwa-15 maximum and violation region", part_a and part_b and part_c, detail)


def criterion_5(ctx: _Context) -> CriterionResult:
    p, q = 0.5, SQRT3 / 4.0
    r = regions.report(p, q, numeric=True, starts=ctx.starts, tol=ctx.tol, seed=ctx.seed)
    targets = [
        ("mermin", 4.0, 1e-9),
        ("svetlichny", 4.0 * math.sqrt(2.0), 1e-7),
        ("bancal99", 1.0 + 2.0 * math.sqrt(2.0), 1e-7),
    ]
    errs = []
    ok = True
    for name, target, tol in targets:
        e = max(abs(r.analytic(name) - target), abs(r.numeric(name) - target))
        ok &= e <= tol
        errs.append(f"{name} err {e:.2g}")
    return CriterionResult(5, "GHZ-corner maxima", ok, ", ".join(errs))


def criterion_6(ctx: _Context) -> CriterionResult:
    p = 0.2
    lo = (p - 0.125) / (SQRT3 / 2.0)
    q_star = bisect(lambda q: regions.l15_max(p, q) - 4.0, lo, Q_MAX, xtol=1e-12)
    ok = abs(q_star - 0.37861) <= 5e-4
    return CriterionResult(6, "Sliwa-15 threshold at p = 0.2", ok, f"q* = {q_star:.6f} (target 0.37861 +- 5e-4)")


def criterion_7(ctx: _Context) -> CriterionResult:
    cases = [
        ("sliwa15", lambda p, q: regions.l15_max(p, q) > 4.0, 0.5, regions.SLIWA15_Q),
        ("bancal99", lambda p, q: regions.ns99_max(p, q) > 3.0, 0.5, regions.BANCAL99_Q),
        ("sliwa15, |p| <= 1/4", lambda p, q: regions.l15_max(p, q) > 4.0, regions.MERMIN_P, regions.SLIWA15_BEYOND_MERMIN_Q),
        ("bancal99, |p| <= 1/(2sqrt2)", lambda p, q: regions.ns99_max(p, q) > 3.0, regions.SVETLICHNY_P, regions.BANCAL99_BEYOND_SVETLICHNY_Q),
    ]
    ok = True
    parts = []
    for label, pred, p_limit, target in cases:
        found = regions.region_infimum_q(pred, p_limit=p_limit, steps=500)
        ok &= abs(found - target) <= 1e-3
        parts.append(f"{label}: {found:.5f} vs {target:.5f}")
    return CriterionResult(7, "Region threshold constants", ok, "; ".join(parts))


def _random_biseparable(rng: np.random.Generator, n: int) -> list[tuple[float, float]]:
    out = []
    while len(out) < n:
        p = rng.uniform(-0.5, 0.5, size=4 * n)
        q = rng.uniform(Q_MIN, Q_MAX, size=4 * n)
        keep = (np.abs(p) <= max_abs_p(q)) & (np.abs(p) <= 0.375 - 0.5 * SQRT3 * q)
        out.extend(zip(p[keep].tolist(), q[keep].tolist()))
    return out[:n]


def criterion_8(ctx: _Context) -> CriterionResult:
    rng = np.random.default_rng(ctx.seed)
    pts = _random_biseparable(rng, 10_000)
    nonlocal_pts = [pt for pt in pts if regions.standard_nonlocal(*pt)[0]]
    rhos = [density_matrix(p, q) for p, q in pts]
    mermin = np.array([r.value for r in seesaw_batch(rhos, builtin("mermin"), ctx.starts, ctx.tol, ctx.seed)])
    sliwa = np.array([r.value for r in seesaw_batch(rhos, builtin("sliwa15"), ctx.starts, ctx.tol, ctx.seed)])
    qs = np.linspace(1.0 / (4.0 * SQRT3), Q_MAX, 1000)
    f = np.array([regions.biseparable_l15_bound(q) for q in qs])
    ok = not nonlocal_pts and mermin.max() <= 2 + 1e-7 and sliwa.max() <= 4 + 1e-7 and f.max() <= 4.0 + 1e-12
    detail = (
        f"{len(pts)} points: {len(nonlocal_pts)} flagged nonlocal, max Mermin {mermin.max():.9f}, "
        f"max Sliwa-15 {sliwa.max():.9f}; boundary bound max {f.max():.6f} on q in [1/(4sqrt3), sqrt3/4]"
    )
    return CriterionResult(8, "No biseparable state is standard nonlocal", bool(ok), detail)


def criterion_9(ctx: _Context) -> CriterionResult:
    worst, count = 0.0, 0
    ps, qs = np.linspace(-0.5, 0.5, 200), np.linspace(Q_MIN, Q_MAX, 200)
    for q in qs:
        for p in ps:
            if not validate(p, q):
                continue
            count += 1
            e = abs(cgm_x(x_elements(density_matrix(p, q))) - cgm_closed_form(p, q))
            worst = max(worst, e)
    return CriterionResult(9, "C_GM from X-state elements equals closed form", worst < 1e-10, f"{count} points, max error {worst:.3g}")


def _grid_search(predicate, steps: int = 200) -> list[tuple[float, float]]:
    ps, qs = np.linspace(-0.5, 0.5, steps), np.linspace(Q_MIN, Q_MAX, steps)
    return [(float(p), float(q)) for q in qs for p in ps if validate(p, q) and predicate(float(p), float(q))]


def criterion_10(ctx: _Context) -> CriterionResult:
    found = _grid_search(regions.genuinely_entangled_local)
    if not found:
        return CriterionResult(10, "Genuinely entangled local states exist", False, "grid search found no point")

    def margin(pt):
        return min(2.0 - regions.mermin_max(*pt), 4.0 - regions.l15_max(*pt))

    p, q = max(found, key=margin)
    rho = density_matrix(p, q)
    m = seesaw_batch([rho], builtin("mermin"), ctx.starts, ctx.tol, ctx.seed)[0].value
    s = seesaw_batch([rho], builtin("sliwa15"), ctx.starts, ctx.tol, ctx.seed)[0].value
    ok = m <= 2.0 and s <= 4.0
    detail = f"{len(found)} grid points; cross-check at (p={p:.4f}, q={q:.4f}) [{classify(p, q)}]: Mermin {m:.6f}, Sliwa-15 {s:.6f}"
    return CriterionResult(10, "Genuinely entangled local states exist", ok, detail)


def criterion_11(ctx: _Context) -> CriterionResult:
    def pred(p, q):
        return (
            classify(p, q).is_genuine()
            and abs(p) <= regions.SVETLICHNY_P
            and regions.ns99_max(p, q) <= 3.0
            and q <= regions.BANCAL99_Q
        )

    found = _grid_search(pred)
    detail = f"{len(found)} grid points" + (f", e.g. (p={found[0][0]:.4f}, q={found[0][1]:.4f})" if found else "")
    return CriterionResult(11, "Genuinely entangled, not genuinely nonlocal states exist", bool(found), detail)


def criterion_12(ctx: _Context) -> CriterionResult:
    q = SQRT3 / 4.0
    worst = 0.0
    for p in (0.1, 0.2, 0.3, 0.4):
        worst = max(
            worst,
            abs(regions.l15_max(p, q) - 4.0 * (8.0 * p**3 - 1.0) / (4.0 * p**2 - 1.0)),
            abs(regions.ns99_max(p, q) - (1.0 + 2.0 * math.sqrt(1.0 + 4.0 * p**2))),
        )
    return CriterionResult(12, "q = sqrt3/4 subclass formulas", worst <= 1e-10, f"max error {worst:.3g}")


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def _digest(results: list[CriterionResult]) -> str:
    return hashlib.sha256(json.dumps([asdict(r) for r in results], sort_keys=True).encode()).hexdigest()


def run_criteria(numbers=None, seed: int = 42, starts: int = DEFAULT_STARTS, tol: float = DEFAULT_TOL, on_result=None) -> list[CriterionResult]:
    ctx = _Context(seed, starts, tol)
    out = []
    for n in sorted(numbers or CRITERIA):
        res = CRITERIA[n](ctx)
        out.append(res)
        if on_result is not None:
            on_result(res)
    return out


def run_all(seed: int = 42, starts: int = DEFAULT_STARTS, tol: float = DEFAULT_TOL, numbers=None, on_result=None) -> list[CriterionResult]:
    """Criteria 1-12, then criterion 13: a second run must reproduce the first exactly."""
    numbers = sorted(n for n in (numbers or CRITERIA) if n in CRITERIA)
    first = run_criteria(numbers, seed, starts, tol, on_result)
    second = run_criteria(numbers, seed, starts, tol)
    d1, d2 = _digest(first), _digest(second)
    res13 = CriterionResult(13, "Determinism of repeated runs", d1 == d2, f"report digests {d1[:16]} / {d2[:16]}")
    if on_result is not None:
        on_result(res13)
    return first + [res13]
