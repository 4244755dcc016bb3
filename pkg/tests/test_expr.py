import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlesing import jets as J
from bundlesing.errors import DomainError, ParseError
from bundlesing.expr import BinOp, Call, Const, Expression, Pow, Var, eval_jet, parse, to_text
from bundlesing.families import random_polynomial

XYZ = ("x", "y", "z")


def test_quartic_has_four_summands():
    e = parse("y^4 + x*y + z + z*y^2")
    terms = []

    def flatten(n):
        if isinstance(n, BinOp) and n.op == "+":
            flatten(n.left)
            flatten(n.right)
        else:
            terms.append(n)

    flatten(e.root)
    assert len(terms) == 4
    assert terms[0] == Pow(Var(1), 4)


def test_difference_of_squares_in_other_coordinates():
    e = parse("v^2 - w^2", ("u", "v", "w"))
    assert e.root == BinOp("-", Pow(Var(1), 2), Pow(Var(2), 2))


@pytest.mark.parametrize(
    "text, position",
    [
        ("x +", 3),
        ("x + q", 4),
        ("sin(x, y)", 5),
        ("(x + y", 6),
        ("x + y)", 5),
        ("x $ y", 2),
        ("foo(x)", 0),
        ("x ^ y", 4),
        ("x^2^3", 3),
        ("sin x", 4),
    ],
)
def test_errors_carry_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == position
    assert f"at position {position}" in str(info.value)


def test_precedence():
    assert parse("-x^2").root == Call("neg", Pow(Var(0), 2))
    assert parse("x - y - z").root == BinOp("-", BinOp("-", Var(0), Var(1)), Var(2))
    assert parse("x + y*z").root == BinOp("+", Var(0), BinOp("*", Var(1), Var(2)))
    assert parse("x / y / z").root == BinOp("/", BinOp("/", Var(0), Var(1)), Var(2))
    assert parse("2**3").root == Pow(Const(2.0), 3)


def test_negative_and_parenthesised_exponents():
    assert parse("x^-2").root == Pow(Var(0), -2)
    assert parse("x^(3)").root == Pow(Var(0), 3)
    assert parse("x^(-1)").root == Pow(Var(0), -1)


def test_scientific_literals():
    assert parse("1.5e-3*x").root == BinOp("*", Const(1.5e-3), Var(0))


def test_bad_coordinates():
    with pytest.raises(ValueError):
        parse("x", ("x", "x", "y"))
    with pytest.raises(ValueError):
        parse("x", ("x", "sin", "y"))


def test_jet_of_polynomial():
    j = eval_jet(parse("y^2 + z"), (0, 0, 0), 2)
    assert j.coeff((0, 0, 1)) == 1.0
    assert j.coeff((0, 2, 0)) == 1.0
    assert np.count_nonzero(j.coeffs) == 2


def test_jet_of_sin():
    j = eval_jet(parse("sin(x)"), (0, 0, 0), 3)
    assert j.coeff((1, 0, 0)) == pytest.approx(1.0)
    assert j.coeff((3, 0, 0)) == pytest.approx(-1 / 6)


def test_jet_of_geometric_series():
    j = eval_jet(parse("1/(1-x)"), (0, 0, 0), 2)
    assert [j.coeff((k, 0, 0)) for k in range(3)] == pytest.approx([1, 1, 1])


def test_domain_errors_are_raised_not_nan():
    with pytest.raises(DomainError):
        eval_jet(parse("log(x)"), (-1, 0, 0), 1)
    with pytest.raises(DomainError):
        eval_jet(parse("1/x"), (0, 0, 0), 1)
    with pytest.raises(DomainError):
        eval_jet(parse("x^-1"), (0, 0, 0), 1)
    with pytest.raises(DomainError):
        parse("sqrt(x)").evaluate((-1, 0, 0))
    with pytest.raises(DomainError):
        parse("1/(x-y)").evaluate((1, 1, 0))


def test_scalar_evaluation_matches_jet_value():
    e = parse("exp(x)*cos(y) + sqrt(z+2) - log(1+x^2)/3")
    p = (0.3, -0.7, 0.4)
    assert e.evaluate(p) == pytest.approx(e.jet(p, 0).value, rel=1e-14)
    assert e(p) == e.evaluate(p)


def test_builder_arithmetic_and_substitute():
    x = Expression.variable("x", XYZ)
    y = Expression.variable("y", XYZ)
    e = x * y - 2 + (y**2) / 4
    assert str(e) == "x*y - 2 + y^2/4"
    assert e.evaluate((1, 2, 0)) == pytest.approx(1.0)
    s = parse("x + y*z").substitute({2: 3.0})
    assert s.coords == ("x", "y")
    assert s.evaluate((1, 2)) == pytest.approx(7.0)
    assert s.variables() == {0, 1}
    leaf = parse("x + y*z").substitute({2: 3.0}, coords=("u", "v"))
    assert leaf.coords == ("u", "v")
    assert leaf.evaluate((1, 2)) == pytest.approx(7.0)


# -- round trip ---------------------------------------------------------------------------

consts = st.one_of(
    st.integers(0, 50).map(float),
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False),
    st.sampled_from([0.5, 1e-7, 2.5e10, 3.141592653589793]),
)
leaves = st.one_of(st.integers(0, 2).map(Var), consts.map(Const))


def extend(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(Pow, children, st.integers(-3, 5)),
        st.builds(Call, st.sampled_from(["sin", "cos", "exp", "log", "sqrt", "neg"]), children),
    )


trees = st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_round_trip(node):
    text = to_text(node, XYZ)
    assert parse(text).root == node


# -- derivative checks -----------------------------------------------------------------------


def central_fd(e, p, i, h=1e-4):
    a, b = list(p), list(p)
    a[i] += h
    b[i] -= h
    return (e.evaluate(a) - e.evaluate(b)) / (2 * h)


def central_fd2(e, p, i, j, h=1e-3):
    def f(di, dj):
        q = list(p)
        q[i] += di
        q[j] += dj
        return e.evaluate(q)

    return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_polynomial_partials_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    e = parse(random_polynomial(rng, degree=3))
    p = rng.uniform(-1, 1, 3)
    jet = e.jet(p, 2)
    scale = max(1.0, float(np.max(np.abs(jet.coeffs))))
    for i in range(3):
        alpha = [0, 0, 0]
        alpha[i] = 1
        assert abs(jet.derivative(alpha) - central_fd(e, p, i)) <= 1e-6 * scale
        for j in range(i, 3):
            beta = [0, 0, 0]
            beta[i] += 1
            beta[j] += 1
            assert abs(jet.derivative(beta) - central_fd2(e, p, i, j)) <= 1e-6 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 4))
def test_jet_of_product_is_product_of_jets(seed, order):
    rng = np.random.default_rng(seed)
    e1 = parse(random_polynomial(rng, degree=2))
    e2 = parse("exp(" + random_polynomial(rng, degree=1, scale=0.5) + ")")
    p = rng.uniform(-1, 1, 3)
    prod = e1 * e2
    assert prod.jet(p, order).allclose(e1.jet(p, order) * e2.jet(p, order), rtol=1e-12, atol=1e-12)


def test_evaluation_is_pure():
    e = parse("sin(x)*y + z^3")
    p = (0.1, 0.2, 0.3)
    a = e.jet(p, 3)
    b = e.jet(p, 3)
    assert np.array_equal(a.coeffs, b.coeffs)


def test_mpmath_evaluation():
    mpmath = pytest.importorskip("mpmath")
    e = parse("exp(x) - 1")
    with mpmath.workdps(40):
        v = e.evaluate((mpmath.mpf("1e-20"), 0, 0), lib=mpmath)
        assert abs(v - mpmath.mpf("1e-20")) < mpmath.mpf("1e-39")
    assert math.isclose(float(v), 1e-20, rel_tol=1e-12)
