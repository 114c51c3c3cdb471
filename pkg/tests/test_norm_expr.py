"""Expression parser: shapes, precedence, errors, printing round-trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minksub.jets import Jet4
from minksub.norm_expr import (ArityError, Bin, ExprSyntaxError, Neg, Num,
                               Pow, Sqrt, UnknownVariable, Var, evaluate,
                               parse_norm, to_text)


def ev(text, dim, args):
    return evaluate(parse_norm(text, dim), list(args))


def test_arithmetic_values():
    assert ev("1 + 2 * 3", 1, [0.0]) == 7.0
    assert ev("(1 + 2) * 3", 1, [0.0]) == 9.0
    assert ev("2 * 3 ^ 2", 1, [0.0]) == 18.0  # ^ binds tighter than *
    with pytest.raises(ExprSyntaxError):
        ev("2 ^ 3 ^ 1", 1, [0.0])  # chained exponents need parens
    assert ev("8 / 4 / 2", 1, [0.0]) == 1.0  # left-associative
    assert ev("1 - 2 - 3", 1, [0.0]) == -4.0


def test_variables_and_sqrt():
    assert ev("y1 * y2", 2, [3.0, 5.0]) == 15.0
    assert ev("sqrt(y1^2 + y2^2)", 2, [3.0, 4.0]) == 5.0
    assert ev("sqrt(2) * sqrt(2)", 1, [0.0]) == pytest.approx(2.0)


def test_unary_minus_precedence():
    # -y1^2 parses as -(y1^2), and a*-b as a*(-b)
    assert ev("-y1^2", 1, [3.0]) == -9.0
    assert ev("2 * -3", 1, [0.0]) == -6.0
    assert ev("-2^2", 1, [0.0]) == -4.0
    assert ev("(-2)^2", 1, [0.0]) == 4.0
    assert ev("--2", 1, [0.0]) == 2.0


def test_negative_exponent():
    assert ev("2^-2", 1, [0.0]) == 0.25


def test_scientific_notation():
    assert ev("1.5e2 + .5", 1, [0.0]) == 150.5
    assert ev("2E-1", 1, [0.0]) == pytest.approx(0.2)


def test_tree_shape():
    tree = parse_norm("y1 + y2 * y1", 2)
    assert tree == Bin("+", Var(1), Bin("*", Var(2), Var(1)))
    assert parse_norm("-y1^2", 1) == Neg(Pow(Var(1), 2))
    assert parse_norm("sqrt(y1)", 1) == Sqrt(Var(1))


def test_syntax_error_positions():
    with pytest.raises(ExprSyntaxError) as err:
        parse_norm("y1 + ", 1)
    assert err.value.pos == 5
    with pytest.raises(ExprSyntaxError) as err:
        parse_norm("y1 @ y1", 1)
    assert err.value.pos == 3
    with pytest.raises(ExprSyntaxError) as err:
        parse_norm("(y1 + 1", 1)
    assert err.value.pos == 7
    with pytest.raises(ExprSyntaxError) as err:
        parse_norm("y1 1", 1)
    assert "trailing" in str(err.value)
    with pytest.raises(ExprSyntaxError):
        parse_norm("y1 ^ y1", 1)  # exponent must be an integer literal
    with pytest.raises(ExprSyntaxError):
        parse_norm("2 ^ 1.5", 1)


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        parse_norm("y3", 2)
    with pytest.raises(UnknownVariable):
        parse_norm("z1", 2)
    with pytest.raises(UnknownVariable) as err:
        parse_norm("y1 + spam", 2)
    assert err.value.name == "spam"


def test_sqrt_arity():
    with pytest.raises(ArityError):
        parse_norm("sqrt()", 1)


def test_evaluate_over_jets_matches_floats():
    text = "sqrt(y1^2 + 2*y2^2) + y1/4"
    tree = parse_norm(text, 2)
    base = np.array([1.0, 0.5])
    jet = evaluate(tree, list(Jet4.variables(2, base)))
    assert jet.value == pytest.approx(evaluate(tree, list(base)))
    # gradient against central differences
    eps = 1e-6
    for i in range(2):
        bumped = base.copy()
        bumped[i] += eps
        plus = evaluate(tree, list(bumped))
        bumped[i] -= 2 * eps
        minus = evaluate(tree, list(bumped))
        assert jet.gradient()[i] == pytest.approx((plus - minus) / (2 * eps),
                                                  abs=1e-8)


def test_to_text_round_trips_fixed_cases():
    cases = [
        "y1 - (y2 - 1)",
        "y1 / (y2 / 2)",
        "-(y1 + y2)",
        "(y1 + y2)^3",
        "-y1^2 + sqrt(y1 * y2)",
        "2^-1 * y1",
    ]
    for text in cases:
        tree = parse_norm(text, 2)
        assert parse_norm(to_text(tree), 2) == tree


def node_strategy():
    leaves = st.one_of(
        st.integers(min_value=0, max_value=9).map(lambda v: Num(float(v))),
        st.integers(min_value=1, max_value=3).map(Var),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/"), children, children).map(
                lambda t: Bin(*t)),
            children.map(Neg),
            children.map(Sqrt),
            st.tuples(children, st.integers(min_value=-3, max_value=3)).map(
                lambda t: Pow(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=120, deadline=None)
@given(node_strategy())
def test_to_text_round_trips_random_trees(tree):
    assert parse_norm(to_text(tree), 3) == tree
