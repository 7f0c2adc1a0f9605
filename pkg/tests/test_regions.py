import csv
import io
import json
import math

import numpy as np
import pytest

from ghz_nonlocality.bell import builtin
from ghz_nonlocality.entanglement import EntanglementClass, cgm_closed_form, classify
from ghz_nonlocality.optimize import seesaw, seesaw_batch
from ghz_nonlocality.regions import (
    BANCAL99_BEYOND_SVETLICHNY_Q,
    CSV_FIELDS,
    MERMIN_Q,
    SLIWA15_Q,
    SVETLICHNY_P,
    biseparable_l15_bound,
    discrepancies,
    genuine_nonlocal,
    genuinely_entangled_local,
    genuinely_entangled_not_genuinely_nonlocal,
    l15_branch1,
    l15_formula_applies,
    l15_max,
    mermin_max,
    ns99_max,
    report,
    scan,
    standard_nonlocal,
    svetlichny_max,
    write_csv,
    write_json,
)
from ghz_nonlocality.states import Q_MAX, Q_MIN, InvalidStateError, density_matrix, max_abs_p

SQ3 = math.sqrt(3)
SQ2 = math.sqrt(2)


def test_mermin_max_examples():
    assert mermin_max(0.5, Q_MAX) == 4
    assert mermin_max(0, 0.1) == 0
    assert mermin_max(0.25, MERMIN_Q) == 2


def test_svetlichny_max_examples():
    assert svetlichny_max(0.5, Q_MAX) == pytest.approx(4 * SQ2)
    assert svetlichny_max(1 / (2 * SQ2), 0.3) == pytest.approx(4)
    assert svetlichny_max(0, 0.2) == 0


def test_ns99_max_examples():
    assert ns99_max(0.5, Q_MAX) == pytest.approx(1 + 2 * SQ2)
    assert ns99_max(0, 0) == 0
    # the region |p| <= 1/(2 sqrt2) is first crossed at its edge
    assert ns99_max(SVETLICHNY_P, BANCAL99_BEYOND_SVETLICHNY_Q) == pytest.approx(3, abs=1e-12)
    assert ns99_max(0, BANCAL99_BEYOND_SVETLICHNY_Q) < 3


def test_l15_max_examples():
    assert l15_max(0.2, 0.37861) == pytest.approx(4, abs=5e-4)
    assert l15_max(0, Q_MIN) == pytest.approx(4)
    # removable singularity at the GHZ corner: limit 12|p|
    assert l15_max(0.5, Q_MAX) == pytest.approx(6)
    assert l15_max(0.5 - 1e-6, Q_MAX) == pytest.approx(6, abs=1e-5)


def test_l15_limit_matches_seesaw_at_ghz_corner():
    assert seesaw(density_matrix(0.5, Q_MAX), builtin("sliwa15")).value == pytest.approx(6, abs=1e-9)


def test_biseparable_bound_examples():
    assert biseparable_l15_bound(0) == pytest.approx(3)
    assert biseparable_l15_bound(MERMIN_Q) <= 4
    # boundary |p| = 0 at the top: 8 (-8 sqrt3 q^3) / (-12 q^2) = 16 q / sqrt3 = 4
    assert biseparable_l15_bound(Q_MAX) == pytest.approx(4)
    with pytest.raises(ValueError):
        biseparable_l15_bound(0.5)


def test_standard_nonlocal_examples():
    assert standard_nonlocal(0.3, 0.3) == (True, ["mermin"])
    assert standard_nonlocal(0.2, 0.40) == (True, ["sliwa15"])
    assert l15_branch1(0.1, 0.1) <= 4
    assert standard_nonlocal(0.1, 0.1) == (False, [])


def test_genuine_nonlocal_examples():
    assert genuine_nonlocal(0.5, Q_MAX) == (True, ["svetlichny", "bancal99"])
    assert genuine_nonlocal(0.3, 0.40) == (True, ["bancal99"])
    assert ns99_max(0.2, 0.2) == pytest.approx(1.6839, abs=1e-4)
    assert genuine_nonlocal(0.2, 0.2) == (False, [])


def test_predicates_reject_invalid_states():
    with pytest.raises(InvalidStateError):
        standard_nonlocal(0.2, 0)
    with pytest.raises(InvalidStateError):
        genuine_nonlocal(0.2, 0)


def test_genuinely_entangled_local_point():
    # found by grid search; W class, 4|p| <= 1 and the Sliwa-15 branch stays below 4
    assert classify(0.2, 0.25) is EntanglementClass.W
    assert genuinely_entangled_local(0.2, 0.25)
    assert not genuinely_entangled_local(0.5, Q_MAX)
    assert not genuinely_entangled_local(0, 0)
    rho = density_matrix(0.2, 0.25)
    assert seesaw(rho, builtin("mermin")).value < 2
    assert seesaw(rho, builtin("sliwa15")).value < 4


def test_genuinely_entangled_not_genuinely_nonlocal_point():
    assert genuinely_entangled_not_genuinely_nonlocal(0.2, 0.25)
    assert not genuinely_entangled_not_genuinely_nonlocal(0.5, Q_MAX)


def test_report_at_ghz_corner():
    r = report(0.5, Q_MAX, numeric=True, starts=20)
    assert r.ent_class is EntanglementClass.GHZ
    assert r.cgm == pytest.approx(1)
    assert r.mermin_num == pytest.approx(4, abs=1e-9)
    assert r.svet_num == pytest.approx(4 * SQ2, abs=1e-7)
    assert r.ns99_num == pytest.approx(1 + 2 * SQ2, abs=1e-7)
    assert r.standard_nl and r.genuine_nl


def test_subclass_identities():
    for p in np.linspace(0.01, 0.49, 49):
        assert l15_max(p, Q_MAX) == pytest.approx(4 * (8 * p**3 - 1) / (4 * p**2 - 1), abs=1e-10)
        assert ns99_max(p, Q_MAX) == pytest.approx(1 + 2 * math.sqrt(1 + 4 * p**2), abs=1e-10)


def test_analytic_scan_small_grid():
    reports = scan(3, 3)
    corners = [r for r in reports if abs(abs(r.p) - 0.5) < 1e-12 and r.q == pytest.approx(Q_MAX)]
    assert len(corners) == 2
    for r in corners:
        assert r.ent_class is EntanglementClass.GHZ and r.genuine_nl
    assert all(r.mermin_num is None for r in reports)


def test_scan_includes_maximally_mixed_point():
    reports = scan(11, 5)
    (mm,) = [r for r in reports if r.p == 0 and abs(r.q) < 1e-12]
    assert not mm.standard_nl and not mm.genuine_nl
    assert mm.mermin_max < 2 and mm.l15_max < 4 and mm.svet_max < 4 and mm.ns99_max < 3


def test_scan_rejects_bad_arguments():
    with pytest.raises(ValueError):
        scan(1, 5)
    with pytest.raises(ValueError):
        scan(5, 5, mode="fast")


def test_region_nesting_on_grid():
    for r in scan(120, 120):
        if r.genuine_nl:
            assert r.standard_nl
        if r.standard_nl:
            assert r.ent_class.is_genuine()


def test_maxima_monotone_in_abs_p():
    for q in np.linspace(Q_MIN, Q_MAX, 40):
        ps = np.linspace(0, max_abs_p(q), 60)
        for f in (mermin_max, svetlichny_max, ns99_max):
            vals = [f(p, q) for p in ps]
            assert np.all(np.diff(vals) >= -1e-12)
        cg = [cgm_closed_form(p, q) for p in ps]
        assert np.all(np.diff(cg) >= -1e-12)


def test_l15_monotone_where_branch_one_applies():
    for q in np.linspace(0.01, Q_MAX, 30):
        ps = [p for p in np.linspace(0, max_abs_p(q), 80) if l15_formula_applies(p, q)]
        vals = [l15_max(p, q) for p in ps]
        assert np.all(np.diff(vals) >= -1e-9)


def test_seesaw_agrees_with_closed_forms_for_nonnegative_q():
    pts = [(p, q) for q in np.linspace(0, Q_MAX, 7) for p in np.linspace(-max_abs_p(q), max_abs_p(q), 7)]
    rhos = [density_matrix(p, q) for p, q in pts]
    for name, f in [("mermin", mermin_max), ("svetlichny", svetlichny_max), ("bancal99", ns99_max)]:
        for (p, q), res in zip(pts, seesaw_batch(rhos, builtin(name))):
            assert abs(res.value - f(p, q)) < 1e-6
    for (p, q), res in zip(pts, seesaw_batch(rhos, builtin("sliwa15"))):
        if l15_formula_applies(p, q):
            assert abs(res.value - l15_max(p, q)) < 1e-5


def test_bancal99_maximum_for_negative_q_uses_abs_q():
    # for q < 0 the see-saw maximum is |4q/sqrt3| + 2 sqrt(16q^2/3 + 4p^2)
    pts = [(0.0, -0.1), (0.01, -0.12), (-0.05, -0.05)]
    results = seesaw_batch([density_matrix(p, q) for p, q in pts], builtin("bancal99"))
    for (p, q), res in zip(pts, results):
        expected = abs(4 * q / SQ3) + 2 * math.sqrt(16 * q * q / 3 + 4 * p * p)
        assert res.value == pytest.approx(expected, abs=1e-9)
        assert res.value > ns99_max(p, q) + 0.1


def test_discrepancies():
    reports = scan(7, 7, mode="both", starts=20)
    assert all(r.mermin_num is not None for r in reports)
    assert not [d for d in discrepancies(reports) if d[1] >= 0]
    reports[0].mermin_num = reports[0].mermin_max + 1
    assert any(d[2] == "mermin" for d in discrepancies(reports))


def test_threshold_constants():
    assert SLIWA15_Q == pytest.approx(0.26749, abs=1e-5)
    below, above = SLIWA15_Q - 1e-6, SLIWA15_Q + 1e-6
    assert "sliwa15" not in standard_nonlocal(max_abs_p(below), below)[1]
    assert "sliwa15" in standard_nonlocal(max_abs_p(above), above)[1]


def test_csv_schema():
    buf = io.StringIO()
    write_csv(scan(5, 5, include_invalid=True), buf, {"seed": 0})
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# seed: 0"
    assert lines[1] == ",".join(CSV_FIELDS)
    assert lines[1].startswith("p,q,valid,ent_class,cgm,cgm_unclamped,mermin_max,l15_max")
    rows = list(csv.DictReader(lines[1:]))
    assert len(rows) == 25
    invalid = [r for r in rows if r["valid"] == "false"]
    assert invalid and all(r["ent_class"] == "" for r in invalid)
    assert all(r["mermin_num"] == "" for r in rows)


def test_json_mirrors_csv_fields():
    buf = io.StringIO()
    write_json(scan(4, 4), buf, {"seed": 1})
    data = json.loads(buf.getvalue())
    assert data["metadata"] == {"seed": 1}
    assert all(set(CSV_FIELDS) <= set(pt) for pt in data["points"])
