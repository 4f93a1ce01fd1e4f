import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torickgk.errors import ArityError, DimensionMismatch, DivByZero, DomainError, ExprSyntaxError, UnknownIdentifier
from torickgk.expr import BinOp, Neg, Num, Var, evaluate, max_variable, parse, to_source


@pytest.mark.parametrize("src, x, expected", [
    ("mu1^2 + 0.5*log(mu2)", (2, 1), 4.0),
    ("2^3^2", (0,), 512.0),
    ("-2^2", (0,), -4.0),
    ("(-2)^2", (0,), 4.0),
    ("2^-1", (0,), 0.5),
    ("1 - 2 - 3", (0,), -4.0),
    ("8 / 4 / 2", (0,), 1.0),
    ("1 + 2*3", (0,), 7.0),
    ("sqrt(mu1*mu2)", (4, 9), 6.0),
    ("  mu1\t*\n( mu2 +1 ) ", (2, 3), 8.0),
    ("1.5e2 + .5", (0,), 150.5),
    ("--mu1", (3,), 3.0),
])
def test_evaluate(src, x, expected):
    assert evaluate(parse(src), x) == expected


def test_log_e():
    assert abs(evaluate(parse("log(mu1)", 1), (math.e,)) - 1.0) <= 1e-15


def test_right_associative_tree():
    t = parse("mu1^mu2^mu3")
    assert t == BinOp("^", Var(0), BinOp("^", Var(1), Var(2)))


def test_unary_minus_binds_looser_than_power():
    assert parse("-mu1^2") == Neg(BinOp("^", Var(0), Num(2.0)))


@pytest.mark.parametrize("src, position", [
    ("mu1*(", 5),
    ("mu1 +", 5),
    ("(mu1", 4),
    ("mu1 mu2", 4),
    ("2 $ 3", 2),
    ("mu1)", 3),
    ("", 0),
])
def test_syntax_error_position(src, position):
    with pytest.raises(ExprSyntaxError) as err:
        parse(src, 2)
    assert err.value.position == position


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse("x + 1", 1)
    with pytest.raises(UnknownIdentifier):
        parse("mu10", None)
    with pytest.raises(UnknownIdentifier):
        parse("sin(mu1)", 1)


@pytest.mark.parametrize("src", ["log()", "log(mu1, mu2)", "sqrt", "exp + 1"])
def test_arity(src):
    with pytest.raises(ArityError):
        parse(src, 2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        parse("mu3", 2)
    with pytest.raises(DimensionMismatch):
        evaluate(parse("mu3"), (1.0, 2.0))
    assert max_variable(parse("mu1 + mu4*2")) == 4


@pytest.mark.parametrize("src, x, err", [
    ("1/mu1", (0,), DivByZero),
    ("mu1^-1", (0,), DivByZero),
    ("log(mu1)", (0,), DomainError),
    ("log(mu1)", (-1,), DomainError),
    ("sqrt(mu1)", (-1e-300,), DomainError),
    ("mu1^0.5", (-1,), DomainError),
])
def test_evaluation_errors(src, x, err):
    with pytest.raises(err) as e:
        evaluate(parse(src), x)
    assert e.value.node is not None


def test_sqrt_zero_allowed():
    assert evaluate(parse("sqrt(mu1)"), (0.0,)) == 0.0


def test_vectorised_evaluation():
    X = np.array([[1.0, 2.0], [3.0, 4.0], [0.5, 0.25]])
    t = parse("mu1*mu2 + 3")
    np.testing.assert_array_equal(evaluate(t, X), X[:, 0] * X[:, 1] + 3)
    np.testing.assert_array_equal(evaluate(parse("2"), X), [2.0, 2.0, 2.0])


# ------------------------------------------------------------ round trip

@pytest.mark.parametrize("src", ["mu1^2 + 0.5*log(mu2)", "-mu1^-mu2^2", "1/(2*mu1) - exp(-mu2)", "1e-05*mu1"])
def test_canonical_printer_round_trip(src):
    t = parse(src)
    s = to_source(t)
    assert parse(s) == t
    assert to_source(parse(s)) == s


# ------------------------------------------------- differential testing
#
# The reference is a separate evaluator over nested tuples.  It calls the
# numpy ufuncs on scalars so that both sides share the elementary functions:
# a one-ulp difference between two exp implementations would otherwise be
# amplified by a large power far beyond the comparison tolerance.  Random
# trees are printed with the fewest parentheses the grammar allows, so the
# comparison also exercises precedence and associativity.

PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
CONSTANTS = (0.5, 1.0, 2.0, 3.25, 0.001, 7.0, 1.5e-2)


def random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return ("num", float(rng.choice(CONSTANTS)))
        return ("var", int(rng.integers(3)))
    r = rng.random()
    if r < 0.15:
        return ("neg", random_tree(rng, depth - 1))
    if r < 0.3:
        return ("call", str(rng.choice(["log", "sqrt", "exp"])), random_tree(rng, depth - 1))
    op = str(rng.choice(["+", "-", "*", "/", "^"]))
    return (op, random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def prec(t):
    return PREC.get(t[0], 5)


def render(t):
    kind = t[0]
    if kind == "num":
        return repr(t[1])
    if kind == "var":
        return f"mu{t[1] + 1}"
    if kind == "call":
        return f"{t[1]}({render(t[2])})"
    if kind == "neg":
        inner = render(t[1])
        return "-" + (f"({inner})" if prec(t[1]) < 3 else inner)
    left, right = render(t[1]), render(t[2])
    if kind == "^":
        left = f"({left})" if prec(t[1]) <= 4 else left
        right = f"({right})" if prec(t[2]) < 3 else right
    else:
        p = PREC[kind]
        left = f"({left})" if prec(t[1]) < p else left
        right = f"({right})" if prec(t[2]) <= p else right
    return f"{left} {kind} {right}"


def reference(t, x):
    kind = t[0]
    if kind == "num":
        return t[1]
    if kind == "var":
        return x[t[1]]
    if kind == "neg":
        return -reference(t[1], x)
    if kind == "call":
        a = reference(t[2], x)
        if (t[1] == "log" and a <= 0) or (t[1] == "sqrt" and a < 0):
            raise ValueError(t[1])
        return float({"log": np.log, "sqrt": np.sqrt, "exp": np.exp}[t[1]](a))
    a, b = reference(t[1], x), reference(t[2], x)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    if (a == 0 and b < 0) or (a < 0 and b != round(b)):
        raise ValueError("pow")
    return float(np.power(a, b))


def test_differential_against_reference():
    rng = np.random.default_rng(2024)
    compared = 0
    attempts = 0
    while compared < 1000:
        attempts += 1
        assert attempts < 20000
        t = random_tree(rng, 4)
        x = rng.uniform(0.1, 3.0, size=3).tolist()
        try:
            with np.errstate(all="raise"):
                want = reference(t, x)
        except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError):
            continue
        if not math.isfinite(want):
            continue
        got = evaluate(parse(render(t), 3), x)
        assert abs(got - want) <= 1e-14 * max(1.0, abs(want)), render(t)
        compared += 1


_names = st.sampled_from(["mu1", "mu2", "2", "0.5", "3.0"])


@st.composite
def sources(draw, depth=3):
    if depth == 0:
        return draw(_names)
    kind = draw(st.sampled_from(["leaf", "bin", "neg", "call", "paren"]))
    if kind == "leaf":
        return draw(_names)
    if kind == "neg":
        return "-" + draw(sources(depth - 1))
    if kind == "call":
        return f"{draw(st.sampled_from(['log', 'sqrt', 'exp']))}({draw(sources(depth - 1))})"
    if kind == "paren":
        return f"({draw(sources(depth - 1))})"
    op = draw(st.sampled_from(["+", "-", "*", "/", "^"]))
    return f"{draw(sources(depth - 1))} {op} {draw(sources(depth - 1))}"


@settings(max_examples=200, deadline=None)
@given(src=sources())
def test_parse_print_parse_idempotent(src):
    t = parse(src, 2)
    assert parse(to_source(t), 2) == t
