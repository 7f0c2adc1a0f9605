import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghz_nonlocality.bell import (
    BUILTIN_NAMES,
    BellExpression,
    FacetSyntaxError,
    builtin,
    deterministic_values,
    evaluate,
    load,
    parse,
    parse_all,
    render,
    term_index,
    term_name,
)

MERMIN_TEXT = "name m; polytope L3; bound 2; +1 A1B0C0 +1 A0B1C0 +1 A0B0C1 -1 A1B1C1"
SLIWA_TEXT = (
    "+2 A0B0 +1 A0C0 +1 A0C1 +2 A1B0 +1 A1C0 +1 A1C1 -2 B0C0 -2 B0C1 "
    "+1 A0B1C0 -1 A0B1C1 -1 A1B1C0 +1 A1B1C1"
)


def test_builtin_bounds():
    assert builtin("mermin").bound == 2
    assert builtin("sliwa15").bound == 4
    assert builtin("svetlichny").bound == 4
    assert builtin("bancal99").bound == 3
    assert builtin("bancal99").polytope == "NS2"


def test_bancal99_coefficient():
    assert builtin("bancal99").coefficients[term_index("B1C0")] == 1
    assert term_index("B1C0") == (0, 2, 1)


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown builtin"):
        builtin("chsh")


def test_parse_equals_builtin():
    assert parse(MERMIN_TEXT).equivalent(builtin("mermin"))
    sliwa = parse(f"name s; polytope L3; bound 4; {SLIWA_TEXT}")
    assert sliwa.equivalent(builtin("sliwa15"))


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_render_round_trip(name):
    expr = builtin(name)
    assert parse(render(expr)) == expr


def test_parse_comments_and_separators():
    text = f"# first\n{MERMIN_TEXT}\n---\n# second\nname s; polytope L3; bound 4;\n{SLIWA_TEXT}\n"
    exprs = parse_all(text)
    assert [e.name for e in exprs] == ["m", "s"]
    with pytest.raises(FacetSyntaxError):
        parse(text)


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("name x; polytope L3; bound 0; +1 A0B0C0", "zero bound", 1),
        ("name x;\npolytope L3;\nbound 2;\n+1 A0B0C0 +1 A0B0C0", "duplicate term", 4),
        ("name x; polytope Q; bound 2; +1 A0", "unknown polytope", 1),
        ("name x; polytope L3; bound 2;\n +1 A2B0", "bad term", 2),
    ],
)
def test_parse_errors_carry_position(text, message, line):
    with pytest.raises(FacetSyntaxError, match=message) as info:
        parse(text)
    assert info.value.line == line
    assert info.value.col >= 1


def test_parse_missing_bound():
    with pytest.raises(FacetSyntaxError, match="bound"):
        parse("name x; polytope L3; +1 A0")


def test_expression_invariants():
    with pytest.raises(ValueError):
        BellExpression.from_terms("x", {}, 2, "L3")
    with pytest.raises(ValueError):
        BellExpression.from_terms("x", {"A0": 1}, -1, "L3")


def test_load_builtin_and_file(tmp_path):
    path = tmp_path / "m.facet"
    path.write_text(MERMIN_TEXT)
    assert load(str(path)).equivalent(load("mermin"))


def _all_plus():
    v = np.array([1.0, 1.0, 1.0])
    return np.einsum("i,j,k->ijk", v, v, v)


def test_evaluate_on_all_plus_strategy():
    assert evaluate(builtin("mermin"), _all_plus()) == 2
    assert evaluate(builtin("svetlichny"), _all_plus()) == 4


def test_evaluate_missing_correlator():
    corr = _all_plus()
    corr[term_index("A1B1C1")] = np.nan
    with pytest.raises(KeyError, match="A1B1C1"):
        evaluate(builtin("mermin"), corr)
    corr = _all_plus()
    corr[term_index("A0")] = np.nan
    assert evaluate(builtin("mermin"), corr) == 2


def test_evaluate_bancal99_at_ghz_corner():
    from ghz_nonlocality.optimize import correlations, seesaw
    from ghz_nonlocality.states import density_matrix

    rho = density_matrix(0.5, math.sqrt(3) / 4)
    res = seesaw(rho, builtin("bancal99"), starts=20)
    assert evaluate(builtin("bancal99"), correlations(rho, res.scenario)) == pytest.approx(1 + 2 * math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_deterministic_strategies_respect_bound(name):
    expr = builtin(name)
    values = deterministic_values(expr)
    assert len(values) == 64
    assert values.max() <= expr.bound + 1e-12


@pytest.mark.parametrize("name", ["mermin", "sliwa15"])
def test_local_facets_are_tight(name):
    expr = builtin(name)
    assert deterministic_values(expr).max() == expr.bound


def test_negation_and_term_names():
    m = builtin("mermin")
    assert (-m).coefficients[term_index("A1B1C1")] == 1
    for name, _ in m.terms():
        assert term_name(term_index(name)) == name


@st.composite
def expressions(draw):
    terms = {}
    for idx in draw(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=10)):
        if idx == (0, 0, 0):
            continue
        terms[term_name(idx)] = draw(st.integers(-5, 5).filter(bool) | st.floats(-3, 3).filter(lambda x: x != 0))
    if not terms:
        terms["A0"] = 1
    return BellExpression.from_terms(draw(st.sampled_from(["e", "x1"])), terms, draw(st.integers(1, 9)), draw(st.sampled_from(["L3", "NS2"])))


@given(expressions())
@settings(max_examples=100, deadline=None)
def test_render_parse_round_trip_property(expr):
    assert parse(render(expr)) == expr
