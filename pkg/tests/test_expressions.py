import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from popuc.expressions import (
    BinOp,
    Call,
    Const,
    EvalError,
    ExprSyntaxError,
    Neg,
    NonDifferentiableError,
    Var,
    differentiate,
    evaluate,
    free_vars,
    parse,
    to_source,
)


def test_parse_literal_zero():
    assert parse("0") == Const(0.0)


def test_parse_arithmetic_of_literals():
    e = parse("2*pi/3 + t/4")
    assert evaluate(e, {"t": 0.0}) == pytest.approx(2 * math.pi / 3, abs=1e-12)
    assert evaluate(e, {"t": 1.0}) == pytest.approx(2 * math.pi / 3 + 0.25, abs=1e-12)


def test_parse_free_variables():
    assert free_vars(parse("sin(theta - t)")) == {"theta", "t"}


def test_precedence_and_associativity():
    assert evaluate(parse("2 - 3 - 4"), {}) == -5.0
    assert evaluate(parse("2 + 3 * 4"), {}) == 14.0
    assert evaluate(parse("8 / 4 / 2"), {}) == 1.0
    assert evaluate(parse("-2*3"), {}) == -6.0


def test_eval_binds_variables():
    assert evaluate(parse("t"), {"t": 0.5}) == 0.5


def test_eval_unbound_variable():
    with pytest.raises(EvalError):
        evaluate(parse("theta"), {"t": 1.0})


def test_eval_division_by_zero_is_error():
    with pytest.raises(EvalError):
        evaluate(parse("1/(1-t)"), {"t": 1.0})


def test_eval_domain_error():
    with pytest.raises(EvalError):
        evaluate(parse("sqrt(0-1)"), {})


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("1 + $")
    assert err.value.offset == 4


def test_unknown_identifier_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("1 + foo")


def test_empty_source_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_derivative_of_variable():
    assert differentiate(parse("t"), "t") == Const(1.0)


def test_derivative_of_sine():
    assert differentiate(parse("sin(t)"), "t") == Call("cos", Var("t"))


def test_derivative_of_affine():
    d = differentiate(parse("0.1 + 0.8*t"), "t")
    assert d == Const(0.8)
    h = 1e-6
    e = parse("0.1 + 0.8*t")
    fd = (evaluate(e, {"t": 0.3 + h}) - evaluate(e, {"t": 0.3 - h})) / (2 * h)
    assert abs(evaluate(d, {"t": 0.3}) - fd) < 1e-10


def test_derivative_of_abs_rejected():
    with pytest.raises(NonDifferentiableError):
        differentiate(parse("abs(t)"), "t")


def _random_tree(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        choice = rng.integers(0, 3)
        if choice == 0:
            return Var("t")
        if choice == 1:
            return Var("theta")
        return Const(float(rng.uniform(-2, 2)))
    kind = rng.integers(0, 2)
    if kind == 0:
        op = "+-*/"[int(rng.integers(0, 4))]
        return BinOp(op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if rng.random() < 0.2:
        return Neg(_random_tree(rng, depth - 1))
    fn = ["sin", "cos", "exp", "sqrt", "abs"][int(rng.integers(0, 5))]
    return Call(fn, _random_tree(rng, depth - 1))


def test_parse_print_round_trip_random_trees():
    # the parser folds a unary minus on a literal into a negative constant,
    # so compare after one normalizing parse: print/parse must then be exact
    rng = np.random.default_rng(7)
    for _ in range(300):
        tree = parse(to_source(_random_tree(rng, int(rng.integers(1, 6)))))
        assert parse(to_source(tree)) == tree


def test_derivative_matches_central_difference():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 100:
        tree = _random_tree(rng, int(rng.integers(1, 6)))
        t = float(rng.uniform(-1, 1))
        try:
            d = differentiate(tree, "t")
            h = 1e-6
            up = evaluate(tree, {"t": t + h, "theta": 0.4})
            lo = evaluate(tree, {"t": t - h, "theta": 0.4})
            sym = evaluate(d, {"t": t, "theta": 0.4})
        except (EvalError, NonDifferentiableError):
            continue
        fd = (up - lo) / (2 * h)
        if abs(fd) > 1e6:
            continue
        assert abs(sym - fd) <= 1e-6 * (1 + abs(sym))
        checked += 1


@given(st.floats(min_value=-10, max_value=10), st.floats(min_value=-10, max_value=10))
def test_eval_matches_python_arithmetic(a, b):
    e = BinOp("*", BinOp("+", Var("t"), Const(b)), Const(2.0))
    assert evaluate(e, {"t": a}) == pytest.approx((a + b) * 2.0, rel=1e-12)


@given(st.floats(min_value=-3, max_value=3))
def test_round_trip_of_rendered_source(x):
    e = BinOp("-", Call("sin", Var("t")), BinOp("/", Var("t"), Const(4.0)))
    again = parse(to_source(e))
    assert again == e
    assert evaluate(again, {"t": x}) == pytest.approx(math.sin(x) - x / 4, abs=1e-12)
