import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emtensor.errors import ExpressionError
from emtensor.expressions import parse_expression
from emtensor.scalars import Dual, seed_partial


NAMES = ("t", "x")


def ev(src, t=0.0, x=0.0):
    return parse_expression(src, NAMES)((t, x))


def test_literals_and_coordinates():
    assert ev("3") == 3.0
    assert ev("2.5e-1") == 0.25
    assert ev("t", t=1.5) == 1.5
    assert ev("pi") == pytest.approx(math.pi)


def test_precedence_and_associativity():
    assert ev("2 + 3*4") == 14.0
    assert ev("2*3 + 4") == 10.0
    assert ev("2^3^2") == 512.0  # right associative
    assert ev("-2^2") == -4.0    # unary minus binds looser than power
    assert ev("(2 + 3)*4") == 20.0
    assert ev("6/3/2") == 1.0    # left associative


def test_functions():
    assert ev("sin(0)") == 0.0
    assert ev("cos(0)") == 1.0
    assert ev("exp(1)") == pytest.approx(math.e)
    assert ev("sqrt(4)") == 2.0
    assert ev("pow(2, 5)") == 32.0
    assert ev("sin(t)^2 + cos(t)^2", t=0.77) == pytest.approx(1.0)


def test_differentiable_through_duals():
    f = parse_expression("sin(t)*x^2", NAMES)
    assert seed_partial(f, (0.7, 1.3), 0) == pytest.approx(math.cos(0.7) * 1.69)
    assert seed_partial(f, (0.7, 1.3), 1) == pytest.approx(math.sin(0.7) * 2.6)


def test_unknown_symbol_reports_position():
    with pytest.raises(ExpressionError) as err:
        parse_expression("t + bogus", NAMES)
    assert "bogus" in str(err.value)
    assert err.value.position == 4


def test_unknown_function():
    with pytest.raises(ExpressionError) as err:
        parse_expression("tan(t)", NAMES)
    assert "tan" in str(err.value)


def test_malformed_input_positions():
    with pytest.raises(ExpressionError):
        parse_expression("1 +", NAMES)
    with pytest.raises(ExpressionError):
        parse_expression("(t", NAMES)
    with pytest.raises(ExpressionError):
        parse_expression("t @ x", NAMES)
    with pytest.raises(ExpressionError):
        parse_expression("pow(t)", NAMES)
    with pytest.raises(ExpressionError):
        parse_expression("t x", NAMES)


@st.composite
def simple_exprs(draw):
    terms = draw(st.lists(
        st.sampled_from(["t", "x", "2", "3.5", "0.25"]), min_size=2, max_size=5))
    ops = draw(st.lists(st.sampled_from([" + ", " - ", "*"]),
                        min_size=len(terms) - 1, max_size=len(terms) - 1))
    out = terms[0]
    for op, term in zip(ops, terms[1:]):
        out += op + term
    return out


@given(simple_exprs(), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=50, deadline=None)
def test_matches_python_eval_on_plus_minus_times(src, t, x):
    ours = parse_expression(src, NAMES)((t, x))
    theirs = eval(src, {"__builtins__": {}}, {"t": t, "x": x})
    assert ours == pytest.approx(theirs, nan_ok=True)
