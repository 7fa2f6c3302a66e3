"""Expression DSL: parsing, printing, evaluation, symbolic differentiation."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from bicontact import expressions as ex
from bicontact.errors import DomainError, ParseError, UnknownIdentifier
from bicontact.jets import Jet


@pytest.mark.parametrize("text,value", [
    ("1+2*3", 7.0),
    ("(1+2)*3", 9.0),
    ("2^3^2", 512.0),            # right-associative power
    ("-2^2", 4.0),               # unary minus binds tighter than power
    ("-(2^2)", -4.0),
    ("2--3", 5.0),
    ("10/4/5", 0.5),             # left-associative division
    ("cos(0)+sin(0)", 1.0),
    ("exp(ln(3))", 3.0),
    ("sqrt(2)^2", 2.0),
    ("csc(1)*sin(1)", 1.0),
    ("cot(1)*tan(1)", 1.0),
])
def test_numeric_evaluation(text, value):
    node = ex.parse(text)
    assert ex.eval_number(node, {}) == pytest.approx(value, abs=1e-12)


def test_variables_and_params():
    node = ex.parse("a*x+y^2", coords=("x", "y"), params=("a",))
    assert ex.eval_number(node, {"x": 2.0, "y": 3.0, "a": 10.0}) == 29.0
    jet = ex.eval_jet(node, (2.0, 3.0), 3, ("x", "y"), {"a": 10.0})
    assert jet.value == 29.0
    assert jet.coeff((1, 0)) == pytest.approx(10.0)
    assert jet.coeff((0, 1)) == pytest.approx(6.0)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        ex.parse("x+q", coords=("x",))


@pytest.mark.parametrize("bad", ["", "1+", "(2", "2*", "sin()", "sin(1,2)",
                                 "1 2", "^2", "foo(1)"])
def test_parse_errors(bad):
    with pytest.raises((ParseError, UnknownIdentifier)):
        ex.parse(bad, coords=())


# -- printing round trip ----------------------------------------------------

_FN = ["sin", "cos", "exp", "cosh", "sinh", "atan"]


def _ast(depth):
    leaf = st.one_of(
        st.floats(0.1, 4.0).map(lambda v: ex.Num(round(v, 3))),
        st.sampled_from(["x", "y"]).map(ex.Var))
    if depth == 0:
        return leaf
    sub = _ast(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(st.sampled_from("+-*/^"), sub, sub).map(
            lambda t: ex.BinOp(t[0], t[1], t[2])),
        sub.map(ex.Neg),
        st.tuples(st.sampled_from(_FN), sub).map(
            lambda t: ex.Call(t[0], [t[1]])))


@given(_ast(3))
@settings(max_examples=120, deadline=None)
def test_print_parse_round_trip(node):
    """to_text -> parse preserves the evaluated value wherever it is finite."""
    text = ex.to_text(node)
    back = ex.parse(text, coords=("x", "y"))
    scope = {"x": 0.7, "y": -1.3}
    try:
        want = ex.eval_number(node, scope)
    except (DomainError, OverflowError, ZeroDivisionError):
        return
    if not math.isfinite(want) or abs(want) > 1e12:
        return
    got = ex.eval_number(back, scope)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


@given(_ast(3))
@settings(max_examples=80, deadline=None)
def test_derivative_matches_jet(node):
    """Symbolic d/dx agrees with the first-order jet coefficient."""
    point = (0.7, -1.3)
    try:
        jet = ex.eval_jet(node, point, 2, ("x", "y"))
        dnode = ex.differentiate(node, "x")
        dval = ex.eval_number(dnode, {"x": point[0], "y": point[1]})
    except (DomainError, OverflowError, ZeroDivisionError):
        return
    if not (math.isfinite(dval) and abs(dval) < 1e9):
        return
    assert jet.coeff((1, 0)) == pytest.approx(dval, rel=1e-8, abs=1e-8)


def test_differentiate_products_and_chains():
    node = ex.parse("x^2*sin(3*x)", coords=("x",))
    d = ex.differentiate(node, "x")
    x = 0.9
    want = 2 * x * math.sin(3 * x) + 3 * x * x * math.cos(3 * x)
    assert ex.eval_number(d, {"x": x}) == pytest.approx(want, abs=1e-12)


def test_differentiate_constant_folds():
    node = ex.parse("2*y+7", coords=("x", "y"))
    d = ex.differentiate(node, "x")
    assert ex.eval_number(d, {"x": 1.0, "y": 5.0}) == 0.0


def test_eval_jet_matches_taylor():
    node = ex.parse("exp(x)*y", coords=("x", "y"))
    jet = ex.eval_jet(node, (0.0, 2.0), 4, ("x", "y"))
    # coefficient of x^k y^0 about (0, 2): 2/k!
    for k in range(4):
        assert jet.coeff((k, 0)) == pytest.approx(2.0 / math.factorial(k))
    assert jet.coeff((2, 1)) == pytest.approx(0.5)


def test_to_text_parenthesizes_by_precedence():
    node = ex.parse("(x+1)*(x-2)", coords=("x",))
    text = ex.to_text(node)
    again = ex.parse(text, coords=("x",))
    for v in (-1.0, 0.0, 2.5):
        assert ex.eval_number(again, {"x": v}) == \
            pytest.approx(ex.eval_number(node, {"x": v}))
