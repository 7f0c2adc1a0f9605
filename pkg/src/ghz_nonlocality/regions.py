"""Closed-form Bell maxima, nonlocality predicates and (p, q) region scans."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .bell import builtin
from .entanglement import EntanglementClass, biseparable_limit, cgm_closed_form, cgm_unclamped, classify
from .optimize import DEFAULT_STARTS, DEFAULT_TOL, seesaw_batch
from .states import Q_MAX, Q_MIN, SQRT3, density_matrix, max_abs_p, require_valid, validate

SQRT2 = math.sqrt(2.0)
L15_WINDOW = 1e-9

# q thresholds of the detection regions
MERMIN_Q = 1.0 / (4.0 * SQRT3)
SLIWA15_Q = 3.0 / 148.0 * (8.0 + 3.0 * SQRT3)
SVETLICHNY_Q = (1.0 / SQRT2 - 0.25) / SQRT3
BANCAL99_Q = (8.0 * math.sqrt(5.0) - 5.0 * SQRT3) / 28.0
SLIWA15_BEYOND_MERMIN_Q = (math.sqrt(15.0) + SQRT3) / 16.0
BANCAL99_BEYOND_SVETLICHNY_Q = (math.sqrt(10.0) - SQRT3) / 4.0

MERMIN_P = 0.25
SVETLICHNY_P = 1.0 / (2.0 * SQRT2)

NUMERIC_NAMES = ("mermin", "sliwa15", "svetlichny", "bancal99")


def mermin_max(p: float, q: float) -> float:
    require_valid(p, q)
    return 8.0 * abs(p)


def svetlichny_max(p: float, q: float) -> float:
    require_valid(p, q)
    return 8.0 * SQRT2 * abs(p)


def ns99_max(p: float, q: float) -> float:
    require_valid(p, q)
    return 4.0 * q / SQRT3 + 2.0 * math.sqrt(16.0 * q * q / 3.0 + 4.0 * p * p)


def l15_branch1(p: float, q: float) -> float:
    """8(9|p|^3 - 8 sqrt3 |q|^3) / (9p^2 - 12q^2), continuous at the 0/0 line.

    Where the denominator is within ``L15_WINDOW`` of zero the numerator
    vanishes too and the limit 12|p| is returned.
    """
    den = 9.0 * p * p - 12.0 * q * q
    if abs(den) < L15_WINDOW:
        return 12.0 * abs(p)
    return 8.0 * (9.0 * abs(p) ** 3 - 8.0 * SQRT3 * abs(q) ** 3) / den


def l15_branch2(q: float) -> float:
    return -16.0 * SQRT3 * q


def l15_in_window(p: float, q: float) -> bool:
    return abs(9.0 * p * p - 12.0 * q * q) < L15_WINDOW


def l15_max(p: float, q: float) -> float:
    require_valid(p, q)
    return max(l15_branch1(p, q), l15_branch2(q))


def biseparable_l15_bound(q: float) -> float:
    """Branch-1 value on the biseparable boundary |p| = 3/8 - (sqrt3/2) q."""
    if not (Q_MIN - 1e-12 <= q <= Q_MAX + 1e-12):
        raise ValueError(f"q={q!r} outside [-1/(4*sqrt3), sqrt3/4]")
    return l15_branch1(max(biseparable_limit(q), 0.0), q)


def mermin_condition(p: float, q: float) -> bool:
    return 4.0 * abs(p) > 1.0 and q > MERMIN_Q


def sliwa15_condition(p: float, q: float) -> bool:
    return l15_branch1(p, q) > 4.0 and q > SLIWA15_Q


def svetlichny_condition(p: float, q: float) -> bool:
    return abs(p) > SVETLICHNY_P and q > SVETLICHNY_Q


def bancal99_condition(p: float, q: float) -> bool:
    return 4.0 * q / SQRT3 + 2.0 * math.sqrt(16.0 * q * q / 3.0 + 4.0 * p * p) > 3.0 and q > BANCAL99_Q


def standard_nonlocal(p: float, q: float) -> tuple[bool, list[str]]:
    require_valid(p, q)
    witnesses = []
    if mermin_condition(p, q):
        witnesses.append("mermin")
    if sliwa15_condition(p, q):
        witnesses.append("sliwa15")
    return bool(witnesses), witnesses


def genuine_nonlocal(p: float, q: float) -> tuple[bool, list[str]]:
    require_valid(p, q)
    witnesses = []
    if svetlichny_condition(p, q):
        witnesses.append("svetlichny")
    if bancal99_condition(p, q):
        witnesses.append("bancal99")
    return bool(witnesses), witnesses


def genuinely_entangled_local(p: float, q: float) -> bool:
    return classify(p, q).is_genuine() and not standard_nonlocal(p, q)[0]


def genuinely_entangled_not_genuinely_nonlocal(p: float, q: float) -> bool:
    return classify(p, q).is_genuine() and not genuine_nonlocal(p, q)[0]


@dataclass
class NonlocalityReport:
    p: float
    q: float
    valid: bool = True
    ent_class: EntanglementClass | None = None
    cgm: float | None = None
    cgm_unclamped: float | None = None
    mermin_max: float | None = None
    l15_max: float | None = None
    svet_max: float | None = None
    ns99_max: float | None = None
    mermin_num: float | None = None
    l15_num: float | None = None
    svet_num: float | None = None
    ns99_num: float | None = None
    standard_nl: bool | None = None
    genuine_nl: bool | None = None
    witnesses: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def analytic(self, name: str) -> float:
        return getattr(self, _COLUMNS[name][0])

    def numeric(self, name: str) -> float | None:
        return getattr(self, _COLUMNS[name][1])


_COLUMNS = {
    "mermin": ("mermin_max", "mermin_num"),
    "sliwa15": ("l15_max", "l15_num"),
    "svetlichny": ("svet_max", "svet_num"),
    "bancal99": ("ns99_max", "ns99_num"),
}


def _check_report(r: NonlocalityReport) -> None:
    if r.genuine_nl and not r.standard_nl:
        raise AssertionError(f"genuinely nonlocal but not standard nonlocal at ({r.p}, {r.q})")
    if r.standard_nl and not r.ent_class.is_genuine():
        raise AssertionError(f"standard nonlocal but {r.ent_class} at ({r.p}, {r.q})")


def analytic_report(p: float, q: float) -> NonlocalityReport:
    require_valid(p, q)
    std, std_w = standard_nonlocal(p, q)
    gen, gen_w = genuine_nonlocal(p, q)
    r = NonlocalityReport(
        p=p,
        q=q,
        ent_class=classify(p, q),
        cgm=cgm_closed_form(p, q),
        cgm_unclamped=cgm_unclamped(p, q),
        mermin_max=mermin_max(p, q),
        l15_max=l15_max(p, q),
        svet_max=svetlichny_max(p, q),
        ns99_max=ns99_max(p, q),
        standard_nl=std,
        genuine_nl=gen,
        witnesses=std_w + gen_w,
    )
    _check_report(r)
    return r


def add_numeric(reports: list[NonlocalityReport], starts: int = DEFAULT_STARTS, tol: float = DEFAULT_TOL, seed: int = 0) -> None:
    """Fill the ``*_num`` fields with see-saw maxima of the four built-ins."""
    live = [r for r in reports if r.valid]
    if not live:
        return
    rhos = [density_matrix(r.p, r.q) for r in live]
    for name in NUMERIC_NAMES:
        results = seesaw_batch(rhos, builtin(name), starts=starts, tol=tol, seed=seed)
        column = _COLUMNS[name][1]
        for r, res in zip(live, results):
            setattr(r, column, res.value)
            if not res.converged:
                r.warnings.append(f"{name}: see-saw hit the sweep limit")


def report(p: float, q: float, numeric: bool = False, starts: int = DEFAULT_STARTS, tol: float = DEFAULT_TOL, seed: int = 0) -> NonlocalityReport:
    r = analytic_report(p, q)
    if numeric:
        add_numeric([r], starts=starts, tol=tol, seed=seed)
    return r


def grid_axes(p_steps: int, q_steps: int) -> tuple[np.ndarray, np.ndarray]:
    if p_steps < 2 or q_steps < 2:
        raise ValueError("grid needs at least 2 steps per axis")
    return np.linspace(-0.5, 0.5, p_steps), np.linspace(Q_MIN, Q_MAX, q_steps)


def grid_points(p_steps: int, q_steps: int) -> list[tuple[float, float]]:
    """Valid points of the bounding-box grid, row-major in (q, p)."""
    ps, qs = grid_axes(p_steps, q_steps)
    return [(float(p), float(q)) for q in qs for p in ps if validate(p, q)]


def scan(
    p_steps: int,
    q_steps: int,
    mode: str = "analytic",
    starts: int = DEFAULT_STARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    include_invalid: bool = False,
) -> list[NonlocalityReport]:
    """Reports over a uniform grid on p in [-1/2, 1/2], q in [-1/(4sqrt3), sqrt3/4].

    ``mode`` is ``analytic`` (closed forms only), ``numeric`` (see-saw only)
    or ``both``.  Rows are ordered by q, then p.
    """
    if mode not in ("analytic", "numeric", "both"):
        raise ValueError(f"unknown scan mode {mode!r}")
    ps, qs = grid_axes(p_steps, q_steps)
    reports = []
    for q in qs:
        for p in ps:
            p, q = float(p), float(q)
            if validate(p, q):
                reports.append(analytic_report(p, q))
            elif include_invalid:
                reports.append(NonlocalityReport(p=p, q=q, valid=False))
    if mode in ("numeric", "both"):
        add_numeric(reports, starts=starts, tol=tol, seed=seed)
    if mode == "numeric":
        for r in reports:
            for name in NUMERIC_NAMES:
                setattr(r, _COLUMNS[name][0], None)
    return reports


def l15_formula_applies(p: float, q: float) -> bool:
    """Branch 1 active, positive and away from its removable singularity."""
    b1 = l15_branch1(p, q)
    return not l15_in_window(p, q) and b1 > 0 and b1 >= l15_branch2(q)


def discrepancies(reports: Iterable[NonlocalityReport], tol: float = 1e-5) -> list[tuple[float, float, str, float, float]]:
    """(p, q, name, analytic, numeric) wherever the two differ by more than ``tol``.

    Sliwa-15 is compared only where :func:`l15_formula_applies`.
    """
    out = []
    for r in reports:
        if not r.valid:
            continue
        for name in NUMERIC_NAMES:
            a, n = r.analytic(name), r.numeric(name)
            if a is None or n is None:
                continue
            if name == "sliwa15" and not l15_formula_applies(r.p, r.q):
                continue
            if abs(a - n) > tol:
                out.append((r.p, r.q, name, a, n))
    return out


def region_infimum_q(
    predicate: Callable[[float, float], bool],
    p_limit: float = 0.5,
    steps: int = 500,
    q_tol: float = 1e-7,
) -> float:
    """Smallest q at which some valid |p| <= p_limit satisfies ``predicate``.

    A q grid of ``steps`` points is refined around the first hit until the
    bracket is narrower than ``q_tol``.  Each q row samples ``steps`` values
    of p >= 0 up to min(p_limit, max |p|), endpoints included; predicates are
    expected to depend on |p| only.
    """

    def hit(q: float) -> bool:
        top = min(p_limit, max_abs_p(q))
        if top < 0:
            return False
        return any(predicate(float(p), q) for p in np.linspace(0.0, top, steps))

    lo, hi = Q_MIN, Q_MAX
    if not hit(hi):
        raise ValueError("predicate never holds on the triangle")
    while hi - lo > q_tol:
        qs = np.linspace(lo, hi, steps)
        first = next(i for i, q in enumerate(qs) if hit(float(q)))
        if first == 0:
            return float(qs[0])
        lo, hi = float(qs[first - 1]), float(qs[first])
    return hi


CSV_FIELDS = (
    "p", "q", "valid", "ent_class", "cgm", "cgm_unclamped",
    "mermin_max", "l15_max", "svet_max", "ns99_max",
    "mermin_num", "l15_num", "svet_num", "ns99_num",
    "standard_nl", "genuine_nl", "witnesses",
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, EntanglementClass):
        return v.value
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, list):
        return "|".join(v)
    return str(v)


def report_row(r: NonlocalityReport) -> dict[str, str]:
    return {name: _fmt(getattr(r, name)) for name in CSV_FIELDS}


def report_dict(r: NonlocalityReport) -> dict:
    out = {}
    for name in CSV_FIELDS:
        v = getattr(r, name)
        if isinstance(v, EntanglementClass):
            v = v.value
        elif isinstance(v, float):
            v = float(format(v, ".12g"))
        out[name] = v
    if r.warnings:
        out["warnings"] = list(r.warnings)
    return out


def write_csv(reports: Iterable[NonlocalityReport], fh, metadata: dict | None = None) -> None:
    """CSV with an optional ``# key: value`` metadata block on top."""
    for k, v in (metadata or {}).items():
        fh.write(f"# {k}: {v}\n")
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(report_row(r))


def write_json(reports: Iterable[NonlocalityReport], fh, metadata: dict | None = None) -> None:
    json.dump({"metadata": metadata or {}, "points": [report_dict(r) for r in reports]}, fh, indent=1)
    fh.write("\n")
