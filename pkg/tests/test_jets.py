import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlesing import jets as J
from bundlesing.errors import DomainError, JetOrderError
from bundlesing.jets import Jet


def random_jet(rng, order, nvars=3, c0=None, scale=1.0):
    c = rng.uniform(-scale, scale, J.num_coeffs(nvars, order))
    if c0 is not None:
        c[0] = c0
    return Jet(c, nvars, order)


def x_(order=4, value=0.0):
    return Jet.variable(0, value, order)


def test_variable_constructor():
    a = Jet.variable(1, 0.5, 2)
    assert a.value == 0.5
    assert a.coeff((0, 1, 0)) == 1.0
    assert np.count_nonzero(a.coeffs) == 2


def test_variable_order_zero_is_constant():
    a = Jet.variable(0, 0.0, 0)
    assert a.coeffs.tolist() == [0.0]


def test_sum_of_variables_constant_term():
    a = Jet.variable(0, 0.3, 3) + Jet.variable(1, -1.2, 3)
    assert a.value == pytest.approx(-0.9)


def test_variable_index_out_of_range():
    with pytest.raises(JetOrderError):
        Jet.variable(3, 0.0, 2)


def test_coefficient_count_is_binomial():
    for order in range(0, 9):
        assert len(Jet.zero(3, order).coeffs) == math.comb(order + 3, 3)


def test_order_beyond_max_rejected():
    with pytest.raises(JetOrderError):
        Jet.zero(3, J.MAX_ORDER + 1)


def test_non_finite_rejected():
    c = np.zeros(J.num_coeffs(3, 1))
    c[2] = np.nan
    with pytest.raises(DomainError):
        Jet(c, 3, 1)


def test_product_difference_of_squares():
    x = x_(2)
    p = (1 + x) * (1 - x)
    assert p.allclose(1 - x * x)
    assert p.coeff((2, 0, 0)) == -1.0


def test_geometric_series():
    x = x_(3)
    g = 1 / (1 - x)
    assert np.allclose([g.coeff((k, 0, 0)) for k in range(4)], [1, 1, 1, 1])


def test_division_by_near_zero_constant():
    x = x_(2)
    with pytest.raises(DomainError):
        J.reciprocal(x + 1e-13)


def test_order_mismatch():
    with pytest.raises(JetOrderError):
        Jet.variable(0, 0, 2) + Jet.variable(0, 0, 3)


def test_exp_series():
    e = J.exp(x_(2))
    assert np.allclose([e.coeff((k, 0, 0)) for k in range(3)], [1, 1, 0.5])


def test_sin_cos_series():
    s = J.sin(x_(3))
    assert s.coeff((1, 0, 0)) == pytest.approx(1.0)
    assert s.coeff((3, 0, 0)) == pytest.approx(-1 / 6)
    c = J.cos(x_(4))
    assert c.coeff((2, 0, 0)) == pytest.approx(-0.5)
    assert c.coeff((4, 0, 0)) == pytest.approx(1 / 24)


def test_log_exp_inverse():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = random_jet(rng, 4, scale=0.3)
        assert J.log(J.exp(a)).allclose(a, rtol=1e-10, atol=1e-10)


def test_sqrt_squared():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = random_jet(rng, 4, c0=rng.uniform(0.5, 2.0))
        r = J.sqrt(a)
        assert (r * r).allclose(a, rtol=1e-10, atol=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        J.log(x_(2, value=-1.0))
    with pytest.raises(DomainError):
        J.log(x_(2, value=0.0))
    with pytest.raises(DomainError):
        J.sqrt(x_(2, value=-0.5))
    with pytest.raises(DomainError):
        J.sqrt(x_(2, value=0.0))


def test_sqrt_of_zero_order_zero_ok():
    assert J.sqrt(Jet.constant(0.0, 3, 0)).value == 0.0


def test_extract_derivative():
    y = Jet.variable(1, 0.0, 3)
    x = Jet.variable(0, 0.0, 3)
    assert (y * y).derivative((0, 2, 0)) == 2.0
    assert (x * y).derivative((1, 1, 0)) == 1.0
    assert (x + 3).derivative((0, 0, 0)) == 3.0
    with pytest.raises(JetOrderError):
        (x * y).derivative((2, 2, 0))


def test_gradient_examples():
    x, y, z = J.jet_variables((0, 0, 0), 4)
    g = y**4 + x * y + z + z * y**2
    assert g.gradient().tolist() == [0, 0, 1]
    assert Jet.constant(4.0, 3, 2).gradient().tolist() == [0, 0, 0]
    assert x.gradient().tolist() == [1, 0, 0]
    with pytest.raises(JetOrderError):
        Jet.constant(1.0, 3, 0).gradient()


def test_partial_matches_derivative_shift():
    rng = np.random.default_rng(3)
    a = random_jet(rng, 5)
    for i in range(3):
        d = a.partial(i)
        assert d.order == 4
        e = [0, 0, 0]
        e[i] = 1
        for alpha in [(0, 0, 0), (1, 2, 0), (0, 1, 3), (2, 0, 2)]:
            beta = tuple(a_ + b_ for a_, b_ in zip(alpha, e))
            assert d.derivative(alpha) == pytest.approx(a.derivative(beta), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 5))
def test_ring_axioms(seed, order):
    rng = np.random.default_rng(seed)
    a, b, c = (random_jet(rng, order) for _ in range(3))
    assert (a * b).allclose(b * a)
    assert ((a * b) * c).allclose(a * (b * c), rtol=1e-12, atol=1e-12)
    assert (a * (b + c)).allclose(a * b + a * c, rtol=1e-12, atol=1e-12)
    assert np.max(np.abs((a * b - b * a).coeffs)) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_leibniz(seed):
    rng = np.random.default_rng(seed)
    a, b = random_jet(rng, 3), random_jet(rng, 3)
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 1
        lhs = (a * b).derivative(e)
        rhs = a.derivative(e) * b.value + a.value * b.derivative(e)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_truncation_consistency():
    x, y, z = J.jet_variables((0.3, -0.2, 0.7), 5)
    f5 = J.exp(x * y) / (2 + J.sin(z)) + y**3
    x4, y4, z4 = J.jet_variables((0.3, -0.2, 0.7), 4)
    f4 = J.exp(x4 * y4) / (2 + J.sin(z4)) + y4**3
    assert f5.truncate(4).allclose(f4, rtol=1e-12, atol=1e-14)


def test_negative_power():
    x = x_(3, value=2.0)
    assert (x**-2).allclose(1 / (x * x))


def test_immutable():
    a = x_(2)
    with pytest.raises(AttributeError):
        a.order = 3
    with pytest.raises(ValueError):
        a.coeffs[0] = 1.0


def test_table_built_once_under_threads():
    results = []

    def work():
        results.append(J.table(3, 7))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r is results[0] for r in results)
